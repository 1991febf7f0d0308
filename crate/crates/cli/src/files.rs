//! JSON file formats. Complex numbers are always `{"re": .., "im": ..}`.

use serde::{Deserialize, Serialize};

use confmodel::blaschke::CriticalData;
use confmodel::continuation::{BranchGrid, PolarGridSpec};
use confmodel::modeler::{ConformalModel, DepressedCubic, ModelCase, PhiRepresentation};
use confmodel::{Complex, ComplexPolynomial, EquallySpacedForm, FiniteBlaschkeProduct, MobiusDisk};

use crate::CliError;

/// `|lambda|` may be off the unit circle by this much before it is rejected;
/// accepted values are normalised.
pub const LAMBDA_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for ComplexJson {
    fn from(z: Complex) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex {
    fn from(z: ComplexJson) -> Self {
        Complex::new(z.re, z.im)
    }
}

fn one() -> ComplexJson {
    ComplexJson { re: 1.0, im: 0.0 }
}

fn to_json(zs: &[Complex]) -> Vec<ComplexJson> {
    zs.iter().map(|&z| z.into()).collect()
}

fn from_json(zs: &[ComplexJson]) -> Vec<Complex> {
    zs.iter().map(|&z| z.into()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeSpecFile {
    #[serde(default = "one")]
    pub lambda: ComplexJson,
    pub zeros: Vec<ComplexJson>,
}

impl BlaschkeSpecFile {
    pub fn to_blaschke(&self) -> Result<FiniteBlaschkeProduct, CliError> {
        let lambda = Complex::from(self.lambda);
        let modulus = lambda.norm();
        if !modulus.is_finite() || (modulus - 1.0).abs() > LAMBDA_TOL {
            return Err(confmodel::Error::NotUnimodular(modulus).into());
        }
        Ok(FiniteBlaschkeProduct::new(
            lambda / modulus,
            from_json(&self.zeros),
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismJson {
    pub a: ComplexJson,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquallySpacedJson {
    pub lambda: ComplexJson,
    pub base: ComplexJson,
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepressedJson {
    pub c: ComplexJson,
    pub d: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpecJson {
    pub n_radii: usize,
    pub n_angles: usize,
    pub r_max: f64,
}

/// Tracked branch values, row-major by radius, with enough context to
/// evaluate `phi` without re-tracking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiGridJson {
    pub spec: GridSpecJson,
    pub seed_index: usize,
    pub center: ComplexJson,
    pub center_z: ComplexJson,
    pub values: Vec<ComplexJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub case: String,
    /// Lowest degree first.
    pub p_coeffs: Vec<ComplexJson>,
    pub pre_automorphism: Option<AutomorphismJson>,
    pub equally_spaced: Option<EquallySpacedJson>,
    pub depressed: Option<DepressedJson>,
    pub critical_values: Vec<ComplexJson>,
    pub phi_grid: Option<PhiGridJson>,
    pub residual: f64,
}

fn parse_case(s: &str) -> Result<ModelCase, CliError> {
    match s {
        "degree1" => Ok(ModelCase::Degree1),
        "equally_spaced" => Ok(ModelCase::EquallySpaced),
        "degree3_generic" => Ok(ModelCase::Degree3Generic),
        other => Err(CliError::Malformed(format!("unknown case {other:?}"))),
    }
}

impl ModelFile {
    pub fn from_model(m: &ConformalModel) -> Self {
        let mut file = ModelFile {
            case: m.case.as_str().to_string(),
            p_coeffs: to_json(m.p.coeffs()),
            pre_automorphism: m.pre_automorphism.map(|tau| AutomorphismJson {
                a: tau.a.into(),
                theta: tau.theta,
            }),
            equally_spaced: None,
            depressed: None,
            critical_values: to_json(&m.critical_values),
            phi_grid: None,
            residual: m.residual_certificate,
        };
        match &m.phi {
            PhiRepresentation::Blaschke(_) => {}
            PhiRepresentation::ClosedForm(form) => {
                file.equally_spaced = Some(EquallySpacedJson {
                    lambda: form.lambda.into(),
                    base: form.base.into(),
                    n: form.n,
                });
            }
            PhiRepresentation::TrackedBranch { grid, cubic, .. } => {
                file.depressed = Some(DepressedJson {
                    c: cubic.c.into(),
                    d: cubic.d.into(),
                });
                file.phi_grid = Some(PhiGridJson {
                    spec: GridSpecJson {
                        n_radii: grid.spec.n_radii,
                        n_angles: grid.spec.n_angles,
                        r_max: grid.spec.r_max,
                    },
                    seed_index: grid.seed_index,
                    center: grid.center.into(),
                    center_z: grid.center_z.into(),
                    values: to_json(&grid.values),
                });
            }
        }
        file
    }

    /// Rebuilds the model for `b`, the product it was constructed from.
    pub fn to_model(&self, b: &FiniteBlaschkeProduct) -> Result<ConformalModel, CliError> {
        let case = parse_case(&self.case)?;
        let p = ComplexPolynomial::new(from_json(&self.p_coeffs));
        if p.degree() != Some(b.degree()) {
            return Err(CliError::Malformed(format!(
                "p has degree {:?}, the product has degree {}",
                p.degree(),
                b.degree()
            )));
        }
        let pre_automorphism = self
            .pre_automorphism
            .as_ref()
            .map(|t| MobiusDisk::new(t.a.into(), t.theta))
            .transpose()?;
        let phi = match case {
            ModelCase::Degree1 => PhiRepresentation::Blaschke(b.clone()),
            ModelCase::EquallySpaced => {
                let form = self
                    .equally_spaced
                    .as_ref()
                    .ok_or_else(|| CliError::Malformed("missing equally_spaced".into()))?;
                PhiRepresentation::ClosedForm(EquallySpacedForm::new(
                    form.lambda.into(),
                    form.base.into(),
                    form.n,
                )?)
            }
            ModelCase::Degree3Generic => {
                let depressed = self
                    .depressed
                    .as_ref()
                    .ok_or_else(|| CliError::Malformed("missing depressed".into()))?;
                let stored = self
                    .phi_grid
                    .as_ref()
                    .ok_or_else(|| CliError::Malformed("missing phi_grid".into()))?;
                let spec = PolarGridSpec::new(
                    stored.spec.n_radii,
                    stored.spec.n_angles,
                    stored.spec.r_max,
                )?;
                if stored.values.len() != spec.len() {
                    return Err(CliError::Malformed(format!(
                        "phi_grid has {} values, expected {}",
                        stored.values.len(),
                        spec.len()
                    )));
                }
                if stored.seed_index > 2 {
                    return Err(confmodel::Error::InvalidSeed(stored.seed_index).into());
                }
                let grid = BranchGrid {
                    spec,
                    values: from_json(&stored.values),
                    center: stored.center.into(),
                    center_z: stored.center_z.into(),
                    seed_index: stored.seed_index,
                    monodromy_ok: true,
                    ring_closure_defect: 0.0,
                    radial_defect: 0.0,
                    residual_sup: self.residual,
                    max_step_refinements: 0,
                    algebraic_branch_counts: [0; 3],
                };
                PhiRepresentation::TrackedBranch {
                    grid,
                    cubic: DepressedCubic {
                        c: depressed.c.into(),
                        d: depressed.d.into(),
                    },
                    blaschke: b.clone(),
                }
            }
        };
        Ok(ConformalModel {
            case,
            p,
            phi,
            pre_automorphism,
            critical_values: from_json(&self.critical_values),
            residual_certificate: self.residual,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointJson {
    pub z: ComplexJson,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub degree: usize,
    pub critical_points: Vec<CriticalPointJson>,
    pub critical_values: Vec<ComplexJson>,
}

impl CriticalReport {
    pub fn new(degree: usize, cd: &CriticalData) -> Self {
        CriticalReport {
            degree,
            critical_points: cd
                .points
                .iter()
                .map(|p| CriticalPointJson {
                    z: p.z.into(),
                    multiplicity: p.multiplicity,
                })
                .collect(),
            critical_values: to_json(&cd.values),
        }
    }
}
