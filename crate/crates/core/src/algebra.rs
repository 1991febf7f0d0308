//! Dense complex polynomials and rational functions, closed-form solvers for
//! degrees one through four, and an independent simultaneous-iteration root
//! finder used for cross-checking.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Roots closer than this after polishing are reported as one multiple root.
pub const CLUSTER_TOL: f64 = 1e-7;

const NEWTON_MAX_STEPS: usize = 50;

/// Polynomial stored lowest power first. The leading coefficient is nonzero
/// unless the polynomial is zero, which is the empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex>,
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex]) -> Self {
        let mut coeffs = vec![Complex::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex::new(0.0, 0.0); coeffs.len() + 1];
            for (j, &c) in coeffs.iter().enumerate() {
                next[j + 1] += c;
                next[j] -= c * r;
            }
            coeffs = next;
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<Complex> {
        self.coeffs.last().copied()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex::new(0.0, 0.0);
        Self::new(
            (0..n)
                .map(|j| {
                    self.coeffs.get(j).copied().unwrap_or(zero)
                        + other.coeffs.get(j).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Drops leading coefficients whose modulus is at most `rel_tol` times the
    /// largest coefficient modulus.
    pub fn trim_relative(&self, rel_tol: f64) -> Self {
        let cutoff = rel_tol * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    fn all_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `num / den` without any common-factor reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRational {
    pub num: ComplexPolynomial,
    pub den: ComplexPolynomial,
}

impl ComplexRational {
    /// Panics if `den` is the zero polynomial.
    pub fn new(num: ComplexPolynomial, den: ComplexPolynomial) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        Self { num, den }
    }

    pub fn eval(&self, z: Complex) -> Complex {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Quotient rule, `(num' den - num den') / den^2`, no cancellation.
    pub fn derivative(&self) -> Self {
        let num = self
            .num
            .derivative()
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative()));
        Self::new(num, self.den.mul(&self.den))
    }
}

/// Principal n-th root: `arg(w) / n` with `arg` taken in `(-pi, pi]`.
pub fn principal_nth_root(w: Complex, n: u32) -> Result<Complex> {
    if n == 0 {
        return Err(Error::DegreeOutOfRange(0));
    }
    if w.norm() == 0.0 {
        return Err(Error::ZeroInput);
    }
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut arg = w.im.atan2(w.re);
    if arg <= -PI {
        arg = PI;
    }
    // a negative real with a signed-zero imaginary part still maps to +pi
    if w.im == 0.0 && w.re < 0.0 {
        arg = PI;
    }
    let nf = f64::from(n);
    Ok(Complex::from_polar(w.norm().powf(1.0 / nf), arg / nf))
}

/// Result of [`newton_polish`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polished {
    pub root: Complex,
    /// False when the derivative vanished at the seed and no step was taken.
    pub progressed: bool,
}

pub fn newton_polish(p: &ComplexPolynomial, z0: Complex) -> Polished {
    let dp = p.derivative();
    let tol = 1e-13 * (1.0 + p.max_abs_coeff());
    let mut z = z0;
    let mut best = z0;
    let mut best_res = p.eval(z0).norm();
    let mut progressed = false;
    for _ in 0..NEWTON_MAX_STEPS {
        let fz = p.eval(z);
        if fz.norm() <= tol {
            break;
        }
        let dfz = dp.eval(z);
        if dfz.norm() <= f64::MIN_POSITIVE * 1e10 {
            break;
        }
        let step = fz / dfz;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
        progressed = true;
        let res = p.eval(z).norm();
        if res < best_res {
            best_res = res;
            best = z;
        }
        if step.norm() < 1e-15 {
            break;
        }
    }
    Polished {
        root: best,
        progressed,
    }
}

/// All `degree` roots (with multiplicity) of a polynomial of degree 1..=4,
/// from the closed-form quadratic, Cardano and Ferrari formulas, each
/// Newton-polished against the input.
pub fn solve_low_degree(p: &ComplexPolynomial) -> Result<Vec<Complex>> {
    let degree = p.degree().unwrap_or(0);
    if !(1..=4).contains(&degree) {
        return Err(Error::DegreeOutOfRange(degree));
    }
    if !p.all_finite() {
        return Err(Error::NonFinite);
    }
    let lead = p.coeffs[degree];
    if lead.norm() < 1e-14 * p.max_abs_coeff() {
        return Err(Error::DegreeDeficient);
    }
    let monic: Vec<Complex> = p.coeffs[..degree].iter().map(|&c| c / lead).collect();
    let seeds = match degree {
        1 => vec![-monic[0]],
        2 => quadratic_roots(monic[1], monic[0]).to_vec(),
        3 => cubic_roots(monic[2], monic[1], monic[0]).to_vec(),
        _ => quartic_roots(monic[3], monic[2], monic[1], monic[0]).to_vec(),
    };
    let monic_poly =
        ComplexPolynomial::new(monic.into_iter().chain([Complex::new(1.0, 0.0)]).collect());
    let mut roots: Vec<Complex> = seeds
        .into_iter()
        .map(|s| newton_polish(&monic_poly, s).root)
        .collect();
    merge_multiple_roots(&monic_poly, &mut roots);
    Ok(roots)
}

/// Pairs closer than this are tested for being one double root.
const DOUBLE_ROOT_CAPTURE: f64 = 1e-5;

/// Newton on `p` pins a double root only to about the square root of the
/// working precision, leaving a spurious split. For each close pair, the
/// root of `p'` between them is taken instead when it is itself a root of
/// `p` to polishing accuracy; two genuinely distinct roots fail that test
/// unless they are closer than roughly `sqrt(1e-13)`.
fn merge_multiple_roots(p: &ComplexPolynomial, roots: &mut [Complex]) {
    let dp = p.derivative();
    let tol = 1e-13 * (1.0 + p.max_abs_coeff());
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let gap = (roots[i] - roots[j]).norm();
            if gap == 0.0 || gap > DOUBLE_ROOT_CAPTURE * (1.0 + roots[i].norm()) {
                continue;
            }
            let mid = (roots[i] + roots[j]) / 2.0;
            let candidate = newton_polish(&dp, mid).root;
            if (candidate - mid).norm() <= gap && p.eval(candidate).norm() <= tol {
                roots[i] = candidate;
                roots[j] = candidate;
            }
        }
    }
}

/// A root together with the number of computed roots merged into it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub root: Complex,
    pub multiplicity: usize,
}

/// Groups roots within [`CLUSTER_TOL`] of each other. A cluster of size `m`
/// is refined as the simple root of the `(m-1)`-th derivative of `p`, which
/// is far better conditioned than either member.
pub fn cluster_roots(p: &ComplexPolynomial, roots: &[Complex]) -> Vec<RootCluster> {
    let mut groups: Vec<Vec<Complex>> = Vec::new();
    for &r in roots {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|&m| (m - r).norm() <= CLUSTER_TOL))
        {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let multiplicity = g.len();
            let mean = g.iter().sum::<Complex>() / multiplicity as f64;
            let root = if multiplicity == 1 {
                mean
            } else {
                let mut q = p.clone();
                for _ in 1..multiplicity {
                    q = q.derivative();
                }
                let refined = newton_polish(&q, mean).root;
                if (refined - mean).norm() <= CLUSTER_TOL {
                    refined
                } else {
                    mean
                }
            };
            RootCluster { root, multiplicity }
        })
        .collect()
}

/// [`solve_low_degree`] followed by [`cluster_roots`].
pub fn solve_low_degree_clustered(p: &ComplexPolynomial) -> Result<Vec<RootCluster>> {
    let roots = solve_low_degree(p)?;
    Ok(cluster_roots(p, &roots))
}

/// Roots of `x^2 + b x + c`, avoiding cancellation in the larger root.
fn quadratic_roots(b: Complex, c: Complex) -> [Complex; 2] {
    let s = (b * b - 4.0 * c).sqrt();
    let s = if (b.conj() * s).re < 0.0 { -s } else { s };
    let q = -(b + s) / 2.0;
    if q.norm() == 0.0 {
        [q, q]
    } else {
        [q, c / q]
    }
}

/// Roots of `x^3 + a x^2 + b x + c`.
fn cubic_roots(a: Complex, b: Complex, c: Complex) -> [Complex; 3] {
    let shift = a / 3.0;
    let pp = b - a * a / 3.0;
    let qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let t = depressed_cubic_roots(pp, qq);
    [t[0] - shift, t[1] - shift, t[2] - shift]
}

/// Cardano for `t^3 + p t + q`. The square root sign is chosen to maximise
/// `|U^3|`; `V` then follows from `U V = -p / 3`.
fn depressed_cubic_roots(p: Complex, q: Complex) -> [Complex; 3] {
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let plus = -q / 2.0 + disc;
    let minus = -q / 2.0 - disc;
    let u3 = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    };
    if u3.norm() == 0.0 {
        return [Complex::new(0.0, 0.0); 3];
    }
    let u = u3.powf(1.0 / 3.0);
    let omega = Complex::from_polar(1.0, 2.0 * PI / 3.0);
    let mut out = [Complex::new(0.0, 0.0); 3];
    let mut uk = u;
    for slot in &mut out {
        *slot = uk - p / (3.0 * uk);
        uk *= omega;
    }
    out
}

/// Ferrari for `x^4 + a x^3 + b x^2 + c x + d`.
fn quartic_roots(a: Complex, b: Complex, c: Complex, d: Complex) -> [Complex; 4] {
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = a2 * a / 8.0 - a * b / 2.0 + c;
    let r = -3.0 * a2 * a2 / 256.0 + a2 * b / 16.0 - a * c / 4.0 + d;
    let scale = 1.0 + p.norm() + q.norm().sqrt() + r.norm().sqrt();

    let ys: [Complex; 4] = if q.norm() <= 1e-14 * scale * scale * scale {
        let [t1, t2] = quadratic_roots(p, r);
        let (s1, s2) = (t1.sqrt(), t2.sqrt());
        [s1, -s1, s2, -s2]
    } else {
        // (y^2 + p/2 + m)^2 = 2m y^2 - q y + m^2 + m p + p^2/4 - r is a perfect
        // square in y when 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0.
        let res = cubic_roots(p, p * p / 4.0 - r, -q * q / 8.0);
        let m = res.iter().copied().fold(
            res[0],
            |best, x| if x.norm() > best.norm() { x } else { best },
        );
        let s = (2.0 * m).sqrt();
        let half = p / 2.0 + m;
        let t = q / (2.0 * s);
        let [y1, y2] = quadratic_roots(-s, half + t);
        let [y3, y4] = quadratic_roots(s, half - t);
        [y1, y2, y3, y4]
    };
    [ys[0] - shift, ys[1] - shift, ys[2] - shift, ys[3] - shift]
}

/// Weierstrass (Durand-Kerner) simultaneous iteration for any degree. Shares
/// no code path with [`solve_low_degree`] beyond Horner evaluation.
pub fn all_roots_oracle(p: &ComplexPolynomial) -> Result<Vec<Complex>> {
    all_roots_oracle_with_cap(p, 1000)
}

pub fn all_roots_oracle_with_cap(p: &ComplexPolynomial, max_iter: usize) -> Result<Vec<Complex>> {
    let degree = p.degree().unwrap_or(0);
    if degree == 0 {
        return Err(Error::DegreeOutOfRange(0));
    }
    let lead = p.coeffs[degree];
    let monic = p.scale(Complex::new(1.0, 0.0) / lead);
    let bound = 1.0
        + monic.coeffs[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex> = (0..degree)
        .map(|k| Complex::from_polar(0.5 * bound, 2.0 * PI * k as f64 / degree as f64 + 0.4))
        .collect();
    for _ in 0..max_iter {
        let mut max_step: f64 = 0.0;
        for i in 0..degree {
            let mut den = Complex::new(1.0, 0.0);
            for j in 0..degree {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex::new(1e-300, 0.0);
            }
            let step = monic.eval(z[i]) / den;
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // linear convergence near multiple roots leaves steps just above 1e-15
    let tol = 1e-12 * (1.0 + monic.max_abs_coeff());
    if z.iter().all(|&r| monic.eval(r).norm() <= tol) {
        Ok(z)
    } else {
        Err(Error::NonConvergence(max_iter))
    }
}
