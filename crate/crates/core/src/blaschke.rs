//! Finite Blaschke products on the unit disk, their critical structure, disk
//! automorphisms, and recognition of the equally-spaced-zeros form
//! `lambda (z^n - b^n) / (1 - conj(b)^n z^n)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    cluster_roots, principal_nth_root, solve_low_degree, Complex, ComplexPolynomial,
    ComplexRational,
};
use crate::error::{Error, Result};

/// Tolerance on `|lambda|` for a product constructed in code.
pub const UNIMODULAR_TOL: f64 = 1e-12;
/// Zeros must satisfy `|a| < 1 - BOUNDARY_MARGIN`.
pub const BOUNDARY_MARGIN: f64 = 1e-12;
/// n-th powers of the zeros must agree to this for the equally spaced form.
pub const EQUAL_SPACING_TOL: f64 = 1e-9;

fn finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `lambda * prod (z - a_j) / (1 - conj(a_j) z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteBlaschkeProduct {
    lambda: Complex,
    zeros: Vec<Complex>,
}

impl FiniteBlaschkeProduct {
    pub fn new(lambda: Complex, zeros: Vec<Complex>) -> Result<Self> {
        if !finite(lambda) || !zeros.iter().all(|&a| finite(a)) {
            return Err(Error::NonFinite);
        }
        if (lambda.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular(lambda.norm()));
        }
        if zeros.is_empty() {
            return Err(Error::NoZeros);
        }
        if let Some(&a) = zeros.iter().find(|a| a.norm() >= 1.0 - BOUNDARY_MARGIN) {
            return Err(Error::ZeroOutsideDisk(a));
        }
        Ok(Self { lambda, zeros })
    }

    /// `lambda = 1`.
    pub fn with_zeros(zeros: Vec<Complex>) -> Result<Self> {
        Self::new(Complex::new(1.0, 0.0), zeros)
    }

    pub fn lambda(&self) -> Complex {
        self.lambda
    }

    pub fn zeros(&self) -> &[Complex] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Valid for `|z| <= 1 + 1e-9`; poles sit at `1 / conj(a_j)` outside.
    pub fn eval(&self, z: Complex) -> Complex {
        self.zeros
            .iter()
            .fold(self.lambda, |acc, &a| acc * (z - a) / (1.0 - a.conj() * z))
    }

    /// `B'(z) = B(z) * sum (1 - |a|^2) / ((z - a)(1 - conj(a) z))`, expanded
    /// so that it stays finite at the zeros.
    pub fn derivative_at(&self, z: Complex) -> Complex {
        let factors: Vec<Complex> = self
            .zeros
            .iter()
            .map(|&a| (z - a) / (1.0 - a.conj() * z))
            .collect();
        let mut total = Complex::new(0.0, 0.0);
        for (j, &a) in self.zeros.iter().enumerate() {
            let den = 1.0 - a.conj() * z;
            let mut term = Complex::new(1.0 - a.norm_sqr(), 0.0) / (den * den);
            for (k, &f) in factors.iter().enumerate() {
                if k != j {
                    term *= f;
                }
            }
            total += term;
        }
        self.lambda * total
    }

    pub fn as_rational(&self) -> ComplexRational {
        let num = ComplexPolynomial::from_roots(&self.zeros).scale(self.lambda);
        let den = self.zeros.iter().fold(
            ComplexPolynomial::constant(Complex::new(1.0, 0.0)),
            |acc, &a| {
                acc.mul(&ComplexPolynomial::new(vec![
                    Complex::new(1.0, 0.0),
                    -a.conj(),
                ]))
            },
        );
        ComplexRational::new(num, den)
    }

    /// Numerator of `B'` as produced by the quotient rule. The `z^(2n-1)`
    /// coefficient cancels exactly in theory and is dropped, as are leading
    /// coefficients left over when zeros sit at the origin.
    pub fn derivative_numerator(&self) -> ComplexPolynomial {
        let num = self.as_rational().derivative().num;
        let keep = (2 * self.degree()).saturating_sub(1);
        let truncated: Vec<Complex> = num.coeffs().iter().copied().take(keep).collect();
        ComplexPolynomial::new(truncated).trim_relative(1e-13)
    }

    pub fn critical_points_in_disk(&self) -> Result<CriticalData> {
        let n = self.degree();
        if n > 3 {
            return Err(Error::UnsupportedInput(n));
        }
        let numerator = self.derivative_numerator();
        let roots = if numerator.degree().unwrap_or(0) == 0 {
            Vec::new()
        } else {
            solve_low_degree(&numerator)?
        };
        let points: Vec<CriticalPoint> = cluster_roots(&numerator, &roots)
            .into_iter()
            .filter(|c| c.root.norm() < 1.0)
            .map(|c| CriticalPoint {
                z: c.root,
                multiplicity: c.multiplicity,
            })
            .collect();
        let found: usize = points.iter().map(|p| p.multiplicity).sum();
        if found != n - 1 {
            return Err(Error::SolverFailure {
                expected: n - 1,
                found,
            });
        }
        let values = points.iter().map(|p| self.eval(p.z)).collect();
        Ok(CriticalData { points, values })
    }

    /// The product `B o tau`, rewritten in factored form. Its zeros are the
    /// preimages `tau^-1(a_j)`; the constant is recovered by evaluating the
    /// composition at whichever of `0, 0.3, 0.7i` lies farthest from them.
    pub fn precompose(&self, tau: &MobiusDisk) -> Self {
        let zeros: Vec<Complex> = self.zeros.iter().map(|&a| tau.inverse(a)).collect();
        let reference = [
            Complex::new(0.0, 0.0),
            Complex::new(0.3, 0.0),
            Complex::new(0.0, 0.7),
        ]
        .into_iter()
        .map(|z| {
            let gap = zeros
                .iter()
                .map(|&a| (z - a).norm())
                .fold(f64::INFINITY, f64::min);
            (z, gap)
        })
        .fold((Complex::new(0.0, 0.0), -1.0), |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        })
        .0;
        let unit = Self {
            lambda: Complex::new(1.0, 0.0),
            zeros,
        };
        let lambda = self.eval(tau.eval(reference)) / unit.eval(reference);
        Self {
            lambda: lambda / lambda.norm(),
            zeros: unit.zeros,
        }
    }

    /// Succeeds when the zeros are `base` times the n-th roots of unity, up
    /// to [`EQUAL_SPACING_TOL`] on their n-th powers and on the intermediate
    /// symmetric functions.
    pub fn canonicalize_equally_spaced(&self) -> Result<EquallySpacedForm> {
        let n = self.degree();
        let powers: Vec<Complex> = self.zeros.iter().map(|a| a.powu(n as u32)).collect();
        let common = powers.iter().sum::<Complex>() / n as f64;
        if powers
            .iter()
            .any(|w| (w - common).norm() > EQUAL_SPACING_TOL)
        {
            return Err(Error::NotEquallySpaced);
        }
        // equal n-th powers alone admit repeated zeros such as {b, b}
        let monic = ComplexPolynomial::from_roots(&self.zeros);
        if monic.coeffs()[1..n]
            .iter()
            .any(|c| c.norm() > EQUAL_SPACING_TOL)
        {
            return Err(Error::NotEquallySpaced);
        }
        let base = if common.norm() == 0.0 {
            Complex::new(0.0, 0.0)
        } else {
            principal_nth_root(common, n as u32)?
        };
        EquallySpacedForm::new(self.lambda, base, n as u32)
    }
}

/// A critical point of `B` inside the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub z: Complex,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalData {
    pub points: Vec<CriticalPoint>,
    /// `values[j] = B(points[j].z)`.
    pub values: Vec<Complex>,
}

/// Disk automorphism `tau(z) = (e^{i theta} z + a) / (1 + conj(a) e^{i theta} z)`,
/// parametrised so that `tau(0) = a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusDisk {
    pub a: Complex,
    pub theta: f64,
}

impl MobiusDisk {
    pub fn new(a: Complex, theta: f64) -> Result<Self> {
        if !finite(a) || !theta.is_finite() {
            return Err(Error::NonFinite);
        }
        if a.norm() >= 1.0 {
            return Err(Error::OutsideDisk(a));
        }
        Ok(Self { a, theta })
    }

    pub fn identity() -> Self {
        Self {
            a: Complex::new(0.0, 0.0),
            theta: 0.0,
        }
    }

    pub fn eval(&self, z: Complex) -> Complex {
        let u = Complex::from_polar(1.0, self.theta) * z;
        (u + self.a) / (1.0 + self.a.conj() * u)
    }

    pub fn inverse(&self, w: Complex) -> Complex {
        Complex::from_polar(1.0, -self.theta) * (w - self.a) / (1.0 - self.a.conj() * w)
    }
}

/// The automorphism with `tau(0) = a` and no rotation.
pub fn disk_automorphism(a: Complex) -> Result<MobiusDisk> {
    MobiusDisk::new(a, 0.0)
}

/// `lambda (z^n - base^n) / (1 - conj(base)^n z^n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquallySpacedForm {
    pub lambda: Complex,
    pub base: Complex,
    pub n: u32,
}

impl EquallySpacedForm {
    pub fn new(lambda: Complex, base: Complex, n: u32) -> Result<Self> {
        if !finite(lambda) || !finite(base) {
            return Err(Error::NonFinite);
        }
        if (lambda.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(Error::NotUnimodular(lambda.norm()));
        }
        if base.norm() >= 1.0 {
            return Err(Error::ZeroOutsideDisk(base));
        }
        if n == 0 {
            return Err(Error::NoZeros);
        }
        Ok(Self { lambda, base, n })
    }

    pub fn eval(&self, z: Complex) -> Complex {
        let zn = z.powu(self.n);
        let bn = self.base.powu(self.n);
        self.lambda * (zn - bn) / (1.0 - bn.conj() * zn)
    }

    pub fn to_blaschke(&self) -> FiniteBlaschkeProduct {
        let zeros = (0..self.n)
            .map(|k| {
                self.base * Complex::from_polar(1.0, 2.0 * PI * f64::from(k) / f64::from(self.n))
            })
            .collect();
        FiniteBlaschkeProduct {
            lambda: self.lambda,
            zeros,
        }
    }
}
