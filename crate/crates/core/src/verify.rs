//! Numerical certification of a constructed model: residual, injectivity,
//! image containment, critical values, boundary modulus, and uniqueness of
//! the selected branch.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Complex;
use crate::blaschke::FiniteBlaschkeProduct;
use crate::continuation::{seed_trials, PolarGridSpec};
use crate::error::{Error, Result};
use crate::geometry::closed_polyline_self_intersections;
use crate::modeler::{depressed_cubic_coeffs, ConformalModel, DepressedCubic, ModelCase};

/// Every gate threshold in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub residual: f64,
    pub boundary: f64,
    pub critical_value: f64,
    /// Smallest acceptable `|phi(z) - phi(w)|` over the sampled pairs.
    pub min_separation: f64,
    pub n_pairs: usize,
    /// Minimum `|z - w|` for a sampled pair.
    pub delta: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-8,
            boundary: 1e-8,
            critical_value: 1e-10,
            min_separation: 1e-9,
            n_pairs: 2000,
            delta: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: ModelCase,
    pub residual_sup: f64,
    pub injectivity_min_separation: f64,
    pub self_intersections: usize,
    pub image_containment_violations: usize,
    /// Only meaningful for the generic degree-three case.
    pub critical_value_defect: Option<f64>,
    pub boundary_defect: f64,
    pub unique_branch: Option<bool>,
    pub seed: u64,
    pub passed: bool,
}

/// `sup |B(z) - p(phi(z))|` over the grid nodes.
pub fn residual_sup(
    b: &FiniteBlaschkeProduct,
    m: &ConformalModel,
    spec: &PolarGridSpec,
) -> Result<f64> {
    let nodes: Vec<Complex> = spec.nodes().collect();
    let defects: Vec<f64> = nodes
        .par_iter()
        .map(|&z| m.composite(z).map(|v| (b.eval(z) - v).norm()))
        .collect::<Result<_>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

fn radical_inverse(mut k: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut x = 0.0;
    while k > 0 {
        x += (k % base) as f64 * inv;
        k /= base;
        inv /= base as f64;
    }
    x
}

fn disk_point(u: f64, v: f64, r_max: f64) -> Complex {
    Complex::from_polar(r_max * u.sqrt(), 2.0 * PI * v)
}

/// Halton pairs in the disk of radius `r_max`: `z` from bases (2, 3), `w`
/// from bases (5, 7), starting at index `seed + 1`; pairs closer than `delta`
/// are skipped.
pub fn halton_pairs(n_pairs: usize, delta: f64, r_max: f64, seed: u64) -> Vec<(Complex, Complex)> {
    let mut pairs = Vec::with_capacity(n_pairs);
    let mut k = seed + 1;
    let cap = seed + 1 + 100 * n_pairs as u64 + 1000;
    while pairs.len() < n_pairs && k < cap {
        let z = disk_point(radical_inverse(k, 2), radical_inverse(k, 3), r_max);
        let w = disk_point(radical_inverse(k, 5), radical_inverse(k, 7), r_max);
        if (z - w).norm() >= delta {
            pairs.push((z, w));
        }
        k += 1;
    }
    pairs
}

/// Separation over sampled pairs plus the parameter pairs at which the
/// boundary curve crosses itself.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivitySample {
    pub min_separation: f64,
    pub crossings: Vec<(f64, f64)>,
}

pub fn injectivity_sample(
    m: &ConformalModel,
    n_pairs: usize,
    delta: f64,
    spec: &PolarGridSpec,
    seed: u64,
) -> Result<InjectivitySample> {
    let pairs = halton_pairs(n_pairs.max(1), delta, spec.r_max, seed);
    let seps: Vec<f64> = pairs
        .par_iter()
        .map(|&(z, w)| Ok((m.phi(z)? - m.phi(w)?).norm()))
        .collect::<Result<_>>()?;
    let min_separation = seps.into_iter().fold(f64::INFINITY, f64::min);

    let samples = 4 * spec.n_angles;
    let params: Vec<f64> = (0..samples)
        .map(|k| 2.0 * PI * k as f64 / samples as f64)
        .collect();
    let curve: Vec<Complex> = params
        .par_iter()
        .map(|&t| m.phi(Complex::from_polar(spec.r_max, t)))
        .collect::<Result<_>>()?;
    let crossings = closed_polyline_self_intersections(&curve)
        .into_iter()
        .map(|(i, j)| (params[i], params[j]))
        .collect();
    Ok(InjectivitySample {
        min_separation,
        crossings,
    })
}

/// Minimum `|phi(z) - phi(w)|` over `n_pairs` quasi-random pairs, failing
/// with the first crossing if the boundary image is not a simple curve.
pub fn injectivity_check(
    m: &ConformalModel,
    n_pairs: usize,
    delta: f64,
    spec: &PolarGridSpec,
    seed: u64,
) -> Result<f64> {
    let sample = injectivity_sample(m, n_pairs, delta, spec, seed)?;
    match sample.crossings.first() {
        Some(&(s, t)) => Err(Error::SelfIntersection(s, t)),
        None => Ok(sample.min_separation),
    }
}

/// Number of grid nodes where `|p(phi(z))| >= 1`.
pub fn image_containment(m: &ConformalModel, spec: &PolarGridSpec) -> Result<usize> {
    let nodes: Vec<Complex> = spec.nodes().collect();
    let flags: Vec<bool> = nodes
        .par_iter()
        .map(|&z| m.composite(z).map(|v| v.norm() >= 1.0))
        .collect::<Result<_>>()?;
    Ok(flags.into_iter().filter(|&f| f).count())
}

fn hausdorff(a: &[Complex], b: &[Complex]) -> f64 {
    let one_sided = |x: &[Complex], y: &[Complex]| {
        x.iter()
            .map(|&p| {
                y.iter()
                    .map(|&q| (p - q).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Hausdorff distance between the critical values of `p` (read from its
/// coefficients) and `{k1, k2}`.
pub fn critical_value_defect(m: &ConformalModel, k1: Complex, k2: Complex) -> Result<f64> {
    if m.case != ModelCase::Degree3Generic {
        return Err(Error::WrongCase);
    }
    let coeffs = m.p.coeffs();
    let cubic = DepressedCubic {
        c: coeffs[1],
        d: coeffs[0],
    };
    Ok(hausdorff(&cubic.critical_values(), &[k1, k2]))
}

/// Distinct critical values, and exactly one seed surviving every gate.
pub fn uniqueness_probe(b: &FiniteBlaschkeProduct, m: &ConformalModel) -> bool {
    let (Some(grid), [k1, k2]) = (m.branch_grid(), m.critical_values.as_slice()) else {
        return false;
    };
    if m.case != ModelCase::Degree3Generic || (k1 - k2).norm() <= 1e-10 {
        return false;
    }
    let Ok(cubic) = depressed_cubic_coeffs(*k1, *k2) else {
        return false;
    };
    match seed_trials(&cubic, b, &grid.spec) {
        Ok(trials) => trials.iter().filter(|t| t.passed).count() == 1,
        Err(_) => false,
    }
}

/// `sup ||p(phi(z))| - |B(z)||` on `|z| = r_max`, sampled at `4 n_angles` points.
pub fn boundary_defect(
    b: &FiniteBlaschkeProduct,
    m: &ConformalModel,
    spec: &PolarGridSpec,
) -> Result<f64> {
    let samples = 4 * spec.n_angles;
    let defects: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let z = Complex::from_polar(spec.r_max, 2.0 * PI * k as f64 / samples as f64);
            m.composite(z).map(|v| (v.norm() - b.eval(z).norm()).abs())
        })
        .collect::<Result<_>>()?;
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// Runs every gate. Gate failures are recorded in the report; only
/// evaluation failures surface as errors.
pub fn verify_model(
    b: &FiniteBlaschkeProduct,
    m: &ConformalModel,
    spec: &PolarGridSpec,
    tol: &Tolerances,
    seed: u64,
) -> Result<VerificationReport> {
    spec.validate()?;
    let residual = residual_sup(b, m, spec)?;
    let injectivity = injectivity_sample(m, tol.n_pairs, tol.delta, spec, seed)?;
    let containment = image_containment(m, spec)?;
    let boundary = boundary_defect(b, m, spec)?;
    let (cv_defect, unique) = match (m.case, m.critical_values.as_slice()) {
        (ModelCase::Degree3Generic, [k1, k2]) => (
            Some(critical_value_defect(m, *k1, *k2)?),
            Some(uniqueness_probe(b, m)),
        ),
        _ => (None, None),
    };
    let passed = residual <= tol.residual
        && injectivity.crossings.is_empty()
        && injectivity.min_separation > tol.min_separation
        && containment == 0
        && boundary <= tol.boundary
        && cv_defect.is_none_or(|d| d <= tol.critical_value)
        && unique.unwrap_or(true);
    Ok(VerificationReport {
        case: m.case,
        residual_sup: residual,
        injectivity_min_separation: injectivity.min_separation,
        self_intersections: injectivity.crossings.len(),
        image_containment_violations: containment,
        critical_value_defect: cv_defect,
        boundary_defect: boundary,
        unique_branch: unique,
        seed,
        passed,
    })
}
