//! Construction of the polynomial conformal model `(p, phi)` for a finite
//! Blaschke product `B`, so that `B = p o phi` on the unit disk.
//!
//! * degree one: `p(z) = z`, `phi = B`;
//! * zeros equally spaced about the origin (any degree): closed form;
//! * degree two, or degree three with a double critical point: precompose
//!   with the disk automorphism sending `0` to the critical point, which
//!   lands in the equally spaced case;
//! * generic degree three: `p(z) = z^3 + c z + d` with the critical values
//!   of `B`, and `phi` realised by branch continuation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::{principal_nth_root, Complex, ComplexPolynomial};
use crate::blaschke::{disk_automorphism, EquallySpacedForm, FiniteBlaschkeProduct, MobiusDisk};
use crate::continuation::{phi_eval, select_analytic_branch, BranchGrid, PolarGridSpec};
use crate::error::{Error, Result};
use crate::verify::residual_sup;

/// `p(z) = z^3 + c z + d`. Its critical points are `+-sqrt(-c / 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DepressedCubic {
    pub c: Complex,
    pub d: Complex,
}

impl DepressedCubic {
    pub fn eval(&self, z: Complex) -> Complex {
        z * z * z + self.c * z + self.d
    }

    pub fn poly(&self) -> ComplexPolynomial {
        ComplexPolynomial::new(vec![
            self.d,
            self.c,
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        ])
    }

    pub fn critical_points(&self) -> [Complex; 2] {
        let s = (-self.c / 3.0).sqrt();
        [s, -s]
    }

    pub fn critical_values(&self) -> [Complex; 2] {
        let [a, b] = self.critical_points();
        [self.eval(a), self.eval(b)]
    }
}

/// `c = -3 ((k2 - k1) / 4)^(2/3)` (square of the principal cube root) and
/// `d = (k1 + k2) / 2`; then `p(+s) = k1` and `p(-s) = k2` for
/// `s = cbrt((k2 - k1) / 4)`.
pub fn depressed_cubic_coeffs(k1: Complex, k2: Complex) -> Result<DepressedCubic> {
    if (k1 - k2).norm() <= 1e-10 * (1.0 + k1.norm() + k2.norm()) {
        return Err(Error::DegenerateCriticalValues);
    }
    let s = principal_nth_root((k2 - k1) / 4.0, 3)?;
    Ok(DepressedCubic {
        c: -3.0 * s * s,
        d: (k1 + k2) / 2.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelCase {
    Degree1,
    EquallySpaced,
    Degree3Generic,
}

impl ModelCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelCase::Degree1 => "degree1",
            ModelCase::EquallySpaced => "equally_spaced",
            ModelCase::Degree3Generic => "degree3_generic",
        }
    }
}

/// How `phi` is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiRepresentation {
    /// `phi = B`.
    Blaschke(FiniteBlaschkeProduct),
    /// `phi(z) = e^{i pi / n} z / (1 - conj(base)^n z^n)^(1/n)`, principal root.
    ClosedForm(EquallySpacedForm),
    TrackedBranch {
        grid: BranchGrid,
        cubic: DepressedCubic,
        blaschke: FiniteBlaschkeProduct,
    },
}

impl PhiRepresentation {
    pub fn eval(&self, z: Complex) -> Result<Complex> {
        match self {
            PhiRepresentation::Blaschke(b) => Ok(b.eval(z)),
            PhiRepresentation::ClosedForm(form) => Ok(equally_spaced_phi(form, z)),
            PhiRepresentation::TrackedBranch {
                grid,
                cubic,
                blaschke,
            } => phi_eval(grid, cubic, blaschke, z),
        }
    }
}

fn equally_spaced_phi(form: &EquallySpacedForm, z: Complex) -> Complex {
    let n = form.n;
    let phase = Complex::from_polar(1.0, PI / f64::from(n));
    let inner = 1.0 - form.base.conj().powu(n) * z.powu(n);
    // inner has positive real part on the disk, so the root never fails
    let root = principal_nth_root(inner, n).unwrap_or(Complex::new(1.0, 0.0));
    phase * z / root
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalModel {
    pub case: ModelCase,
    pub p: ComplexPolynomial,
    pub phi: PhiRepresentation,
    /// `tau` such that `B o tau` was modelled; then `phi_total = phi o tau^-1`.
    pub pre_automorphism: Option<MobiusDisk>,
    pub critical_values: Vec<Complex>,
    /// Sup of `|B - p o phi_total|` over the verification grid.
    pub residual_certificate: f64,
}

impl ConformalModel {
    /// `phi_total(z)`, the map with `B = p o phi_total`.
    pub fn phi(&self, z: Complex) -> Result<Complex> {
        let w = match &self.pre_automorphism {
            Some(tau) => tau.inverse(z),
            None => z,
        };
        self.phi.eval(w)
    }

    pub fn composite(&self, z: Complex) -> Result<Complex> {
        Ok(self.p.eval(self.phi(z)?))
    }

    pub fn degree(&self) -> usize {
        self.p.degree().unwrap_or(0)
    }

    pub fn depressed_cubic(&self) -> Option<DepressedCubic> {
        match &self.phi {
            PhiRepresentation::TrackedBranch { cubic, .. } => Some(*cubic),
            _ => None,
        }
    }

    pub fn branch_grid(&self) -> Option<&BranchGrid> {
        match &self.phi {
            PhiRepresentation::TrackedBranch { grid, .. } => Some(grid),
            _ => None,
        }
    }
}

/// Grid used for branch tracking and for the residual certificate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModelOptions {
    pub grid: PolarGridSpec,
}

pub fn model_degree_one(b: &FiniteBlaschkeProduct) -> Result<ConformalModel> {
    model_degree_one_with(b, &ModelOptions::default())
}

fn model_degree_one_with(b: &FiniteBlaschkeProduct, opts: &ModelOptions) -> Result<ConformalModel> {
    if b.degree() != 1 {
        return Err(Error::WrongDegree {
            expected: 1,
            found: b.degree(),
        });
    }
    let mut model = ConformalModel {
        case: ModelCase::Degree1,
        p: ComplexPolynomial::from_real(&[0.0, 1.0]),
        phi: PhiRepresentation::Blaschke(b.clone()),
        pre_automorphism: None,
        critical_values: Vec::new(),
        residual_certificate: 0.0,
    };
    model.residual_certificate = residual_sup(b, &model, &opts.grid)?;
    Ok(model)
}

/// `p(z) = lambda (|base|^{2n} - 1) z^n - lambda base^n`.
pub fn model_equally_spaced(form: &EquallySpacedForm) -> Result<ConformalModel> {
    model_equally_spaced_with(form, &ModelOptions::default())
}

fn equally_spaced_polynomial(form: &EquallySpacedForm) -> ComplexPolynomial {
    let n = form.n as usize;
    let bn = form.base.powu(form.n);
    let mut coeffs = vec![Complex::new(0.0, 0.0); n + 1];
    coeffs[0] = -form.lambda * bn;
    coeffs[n] = form.lambda * (bn.norm_sqr() - 1.0);
    ComplexPolynomial::new(coeffs)
}

fn model_equally_spaced_with(
    form: &EquallySpacedForm,
    opts: &ModelOptions,
) -> Result<ConformalModel> {
    let critical_values = if form.n >= 2 {
        vec![-form.lambda * form.base.powu(form.n)]
    } else {
        Vec::new()
    };
    let mut model = ConformalModel {
        case: ModelCase::EquallySpaced,
        p: equally_spaced_polynomial(form),
        phi: PhiRepresentation::ClosedForm(*form),
        pre_automorphism: None,
        critical_values,
        residual_certificate: 0.0,
    };
    model.residual_certificate = residual_sup(&form.to_blaschke(), &model, &opts.grid)?;
    Ok(model)
}

/// Moves the (single) critical point to the origin, canonicalises, and models
/// the result in closed form; the automorphism is recorded on the model.
fn model_via_critical_point(
    b: &FiniteBlaschkeProduct,
    critical_point: Complex,
    critical_values: Vec<Complex>,
    opts: &ModelOptions,
) -> Result<ConformalModel> {
    let tau = disk_automorphism(critical_point)?;
    let form = b.precompose(&tau).canonicalize_equally_spaced()?;
    let mut model = model_equally_spaced_with(&form, opts)?;
    model.pre_automorphism = Some(tau);
    model.critical_values = critical_values;
    model.residual_certificate = residual_sup(b, &model, &opts.grid)?;
    Ok(model)
}

pub fn model_degree_three(b: &FiniteBlaschkeProduct) -> Result<ConformalModel> {
    model_degree_three_with(b, &ModelOptions::default())
}

/// Double-critical-point threshold.
const DOUBLE_POINT_TOL: f64 = 1e-8;

fn model_degree_three_with(
    b: &FiniteBlaschkeProduct,
    opts: &ModelOptions,
) -> Result<ConformalModel> {
    if b.degree() != 3 {
        return Err(Error::WrongDegree {
            expected: 3,
            found: b.degree(),
        });
    }
    let cd = b.critical_points_in_disk()?;
    let double = match cd.points.as_slice() {
        [single] => Some(single.z),
        [a, c] if (a.z - c.z).norm() <= DOUBLE_POINT_TOL => Some((a.z + c.z) / 2.0),
        _ => None,
    };
    if let Some(z) = double {
        let k = b.eval(z);
        return model_via_critical_point(b, z, vec![k], opts);
    }
    let (k1, k2) = (cd.values[0], cd.values[1]);
    let cubic = depressed_cubic_coeffs(k1, k2)?;
    let grid = select_analytic_branch(&cubic, b, &opts.grid)?;
    let mut model = ConformalModel {
        case: ModelCase::Degree3Generic,
        p: cubic.poly(),
        phi: PhiRepresentation::TrackedBranch {
            grid,
            cubic,
            blaschke: b.clone(),
        },
        pre_automorphism: None,
        critical_values: vec![k1, k2],
        residual_certificate: 0.0,
    };
    model.residual_certificate = residual_sup(b, &model, &opts.grid)?;
    Ok(model)
}

/// Dispatches on the shape of `B`.
pub fn model(b: &FiniteBlaschkeProduct) -> Result<ConformalModel> {
    model_with(b, &ModelOptions::default())
}

pub fn model_with(b: &FiniteBlaschkeProduct, opts: &ModelOptions) -> Result<ConformalModel> {
    opts.grid.validate()?;
    let n = b.degree();
    if n == 1 {
        return model_degree_one_with(b, opts);
    }
    if let Ok(form) = b.canonicalize_equally_spaced() {
        let mut model = model_equally_spaced_with(&form, opts)?;
        model.residual_certificate = residual_sup(b, &model, &opts.grid)?;
        return Ok(model);
    }
    match n {
        2 => {
            let cd = b.critical_points_in_disk()?;
            let z = cd.points[0].z;
            model_via_critical_point(b, z, cd.values.clone(), opts)
        }
        3 => model_degree_three_with(b, opts),
        _ => Err(Error::UnsupportedInput(n)),
    }
}
