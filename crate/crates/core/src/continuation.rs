//! Realisation of the analytic branch of `phi` for a generic degree-three
//! product. Each point `z` of the disk has three candidates, the roots of
//! `w^3 + c w + (d - B(z))`; only one choice glues into an analytic function
//! on the whole disk. It is found by continuing each candidate over a polar
//! grid and keeping the one that comes back single-valued.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{principal_nth_root, solve_low_degree, Complex, ComplexPolynomial};
use crate::blaschke::FiniteBlaschkeProduct;
use crate::error::{Error, Result};
use crate::geometry::{closed_polyline_self_intersections, winding_number};
use crate::modeler::DepressedCubic;

/// Maximum number of times one continuation step may be bisected.
pub const MAX_REFINEMENTS: usize = 24;
/// Ring closure and radial agreement tolerance.
pub const MONODROMY_TOL: f64 = 1e-8;
/// Sup of `|B - p o phi|` over the grid a branch must meet.
pub const BRANCH_RESIDUAL_TOL: f64 = 1e-8;
/// Grid nodes closer than this to a critical point of `B` are moved outward.
const JITTER_TRIGGER: f64 = 1e-6;
const JITTER: f64 = 3e-6;
const SEED_MERGE_TOL: f64 = 1e-7;
/// Paths passing closer than this to a critical point of `B` are rerouted.
const DETOUR_TRIGGER: f64 = 5e-4;
const DETOUR_OFFSET: f64 = 2e-3;
const DETOUR_SAMPLES: usize = 256;
/// Fiber roots closer than this count as collided.
const COLLISION_TOL: f64 = 1e-7;

/// Polar sampling of the disk: `n_radii` rings, Chebyshev-clustered towards
/// `r_max`, each with `n_angles` equally spaced nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGridSpec {
    pub n_radii: usize,
    pub n_angles: usize,
    pub r_max: f64,
}

impl Default for PolarGridSpec {
    fn default() -> Self {
        Self {
            n_radii: 64,
            n_angles: 256,
            r_max: 0.999,
        }
    }
}

impl PolarGridSpec {
    pub fn new(n_radii: usize, n_angles: usize, r_max: f64) -> Result<Self> {
        let spec = Self {
            n_radii,
            n_angles,
            r_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_radii < 2 {
            return Err(Error::InvalidGrid("n_radii must be at least 2".into()));
        }
        if self.n_angles < 8 {
            return Err(Error::InvalidGrid("n_angles must be at least 8".into()));
        }
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(Error::InvalidGrid("r_max must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// `r_max * sin(pi/2 * (i + 1) / n_radii)`; the last ring is `r_max`.
    pub fn radius(&self, i: usize) -> f64 {
        self.r_max * (0.5 * PI * (i + 1) as f64 / self.n_radii as f64).sin()
    }

    pub fn angle(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_angles as f64
    }

    pub fn node(&self, i: usize, j: usize) -> Complex {
        Complex::from_polar(self.radius(i), self.angle(j))
    }

    pub fn len(&self) -> usize {
        self.n_radii * self.n_angles
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All nodes, ring by ring.
    pub fn nodes(&self) -> impl Iterator<Item = Complex> + '_ {
        (0..self.n_radii).flat_map(move |i| (0..self.n_angles).map(move |j| self.node(i, j)))
    }
}

/// Samples of one continued branch over a [`PolarGridSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchGrid {
    pub spec: PolarGridSpec,
    /// Row-major, ring index first.
    pub values: Vec<Complex>,
    /// Value at the continuation start `center_z` (the origin unless the
    /// fiber over `B(0)` is degenerate).
    pub center: Complex,
    pub center_z: Complex,
    pub seed_index: usize,
    /// Every ring closes and every node agrees with its radial continuation
    /// from the previous ring, within [`MONODROMY_TOL`].
    pub monodromy_ok: bool,
    pub ring_closure_defect: f64,
    pub radial_defect: f64,
    pub residual_sup: f64,
    pub max_step_refinements: usize,
    /// How many nodes each cube-root choice of the `U + V` formula matches.
    #[serde(default)]
    pub algebraic_branch_counts: [usize; 3],
}

impl BranchGrid {
    pub fn value(&self, i: usize, j: usize) -> Complex {
        self.values[i * self.spec.n_angles + j]
    }

    /// True when a single cube-root choice reproduces the branch at every node.
    pub fn algebraic_branch_constant(&self) -> bool {
        self.algebraic_branch_counts
            .iter()
            .filter(|&&c| c > 0)
            .count()
            == 1
    }
}

/// Radicals of the cubic formula at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UVRadicals {
    pub discriminant_sqrt: Complex,
    pub u: Complex,
    pub v: Complex,
}

impl UVRadicals {
    pub fn phi(&self) -> Complex {
        self.u + self.v
    }
}

/// The three roots of `w^3 + c w + (d - target)`.
pub fn fiber_roots(cubic: &DepressedCubic, target: Complex) -> Result<[Complex; 3]> {
    let poly = ComplexPolynomial::new(vec![
        cubic.d - target,
        cubic.c,
        Complex::new(0.0, 0.0),
        Complex::new(1.0, 0.0),
    ]);
    let r = solve_low_degree(&poly)?;
    Ok([r[0], r[1], r[2]])
}

/// `U + V` with the principal discriminant root, `U` the principal cube root
/// rotated by `branch` thirds of a turn, and `V = -c / (3 U)`.
pub fn algebraic_phi(cubic: &DepressedCubic, target: Complex, branch: usize) -> Result<UVRadicals> {
    let e = cubic.d - target;
    let disc = e * e / 4.0 + cubic.c * cubic.c * cubic.c / 27.0;
    let discriminant_sqrt = disc.sqrt();
    let radicand = -e / 2.0 + discriminant_sqrt;
    if radicand.norm() == 0.0 || cubic.c.norm() == 0.0 {
        return Err(Error::ZeroU(target));
    }
    let omega = Complex::from_polar(1.0, 2.0 * PI * (branch % 3) as f64 / 3.0);
    let u = principal_nth_root(radicand, 3)? * omega;
    let v = -cubic.c / (3.0 * u);
    Ok(UVRadicals {
        discriminant_sqrt,
        u,
        v,
    })
}

fn min_separation(roots: &[Complex; 3]) -> f64 {
    (roots[0] - roots[1])
        .norm()
        .min((roots[0] - roots[2]).norm())
        .min((roots[1] - roots[2]).norm())
}

fn nearest(roots: &[Complex; 3], target: Complex) -> (usize, Complex) {
    let mut best = 0;
    for k in 1..3 {
        if (roots[k] - target).norm() < (roots[best] - target).norm() {
            best = k;
        }
    }
    (best, roots[best])
}

#[derive(Debug, Clone, Copy)]
struct Polar {
    r: f64,
    theta: f64,
}

impl Polar {
    fn lerp(self, to: Polar, t: f64) -> Polar {
        Polar {
            r: self.r + t * (to.r - self.r),
            theta: self.theta + t * (to.theta - self.theta),
        }
    }

    fn point(self) -> Complex {
        Complex::from_polar(self.r, self.theta)
    }
}

struct Tracker<'a> {
    cubic: &'a DepressedCubic,
    blaschke: &'a FiniteBlaschkeProduct,
    /// Critical points of `B`; paths are steered around them.
    critical: Vec<Complex>,
}

impl<'a> Tracker<'a> {
    fn new(cubic: &'a DepressedCubic, blaschke: &'a FiniteBlaschkeProduct) -> Self {
        Tracker {
            cubic,
            blaschke,
            critical: critical_points(blaschke),
        }
    }

    /// Waypoints taking the path from `from` to `to` around any critical
    /// point of `B` it passes close to. Through a critical point two fiber
    /// roots collide and the tracked root cannot be told apart.
    fn detour(&self, from: Polar, to: Polar) -> Option<(Polar, Polar)> {
        let (za, zb) = (from.point(), to.point());
        let tangent = zb - za;
        if tangent.norm() == 0.0 {
            return None;
        }
        let mut closest: Option<(f64, Complex, Complex)> = None;
        // the path stays within its polar length of `za`
        let reach = (to.r - from.r).abs() + from.r.max(to.r) * (to.theta - from.theta).abs();
        for &zc in &self.critical {
            if (za - zc).norm() > reach + DETOUR_TRIGGER {
                continue;
            }
            for k in 0..=DETOUR_SAMPLES {
                let p = from.lerp(to, k as f64 / DETOUR_SAMPLES as f64).point();
                let d = (p - zc).norm();
                if closest.is_none_or(|(best, _, _)| d < best) {
                    closest = Some((d, zc, p));
                }
            }
        }
        let (d, zc, p) = closest?;
        if d >= DETOUR_TRIGGER {
            return None;
        }
        let mut normal = Complex::new(0.0, 1.0) * tangent / tangent.norm();
        if (normal.conj() * (p - zc)).re < 0.0 {
            normal = -normal;
        }
        let shift = |q: Complex, near: f64| {
            let w = q + DETOUR_OFFSET * normal;
            let mut theta = w.arg();
            while theta - near > PI {
                theta -= 2.0 * PI;
            }
            while near - theta > PI {
                theta += 2.0 * PI;
            }
            Polar { r: w.norm(), theta }
        };
        Some((shift(za, from.theta), shift(zb, to.theta)))
    }

    /// `advance` with a detour around nearby critical points.
    fn follow(&self, from: Polar, to: Polar, value: Complex) -> Result<(Complex, usize)> {
        match self.detour(from, to) {
            None => self.advance(from, to, value, 0),
            Some((w1, w2)) => {
                let (v1, d1) = self.advance(from, w1, value, 0)?;
                let (v2, d2) = self.advance(w1, w2, v1, 0)?;
                let (v3, d3) = self.advance(w2, to, v2, 0)?;
                Ok((v3, d1.max(d2).max(d3)))
            }
        }
    }

    /// One continuation step from `za` (value `va`) to `zb`. The candidate
    /// is the fiber root nearest the Euler prediction; it is accepted when
    /// it lies within half the fiber's minimum separation of both the
    /// prediction and the current value.
    fn try_step(&self, za: Complex, zb: Complex, va: Complex) -> Result<Option<Complex>> {
        let roots = fiber_roots(self.cubic, self.blaschke.eval(zb))?;
        let slope = 3.0 * va * va + self.cubic.c;
        let predicted = if slope.norm() > 1e-300 {
            va + self.blaschke.derivative_at(za) / slope * (zb - za)
        } else {
            va
        };
        let (_, candidate) = nearest(&roots, predicted);
        let half_gap = 0.5 * min_separation(&roots);
        if (candidate - predicted).norm() < half_gap && (candidate - va).norm() < half_gap {
            Ok(Some(candidate))
        } else {
            Ok(None)
        }
    }

    /// Continues `value` along the polar-linear path from `from` to `to`,
    /// bisecting rejected steps. Returns the value at `to` and the deepest
    /// bisection level used.
    fn advance(
        &self,
        from: Polar,
        to: Polar,
        value: Complex,
        depth: usize,
    ) -> Result<(Complex, usize)> {
        let (za, zb) = (from.point(), to.point());
        if let Some(v) = self.try_step(za, zb, value)? {
            return Ok((v, depth));
        }
        if depth >= MAX_REFINEMENTS {
            return Err(Error::StepCollapse { z: zb });
        }
        let mid = from.lerp(to, 0.5);
        let (vm, d1) = self.advance(from, mid, value, depth + 1)?;
        let (vb, d2) = self.advance(mid, to, vm, depth + 1)?;
        Ok((vb, d1.max(d2)))
    }
}

fn continuation_start(
    cubic: &DepressedCubic,
    b: &FiniteBlaschkeProduct,
) -> Result<(Polar, [Complex; 3])> {
    let origin = Polar { r: 0.0, theta: 0.0 };
    let roots = fiber_roots(cubic, b.eval(Complex::new(0.0, 0.0)))?;
    if min_separation(&roots) >= JITTER_TRIGGER {
        return Ok((origin, roots));
    }
    // the origin is a critical point of B: start just off it
    let start = Polar {
        r: JITTER,
        theta: 0.0,
    };
    let roots = fiber_roots(cubic, b.eval(start.point()))?;
    Ok((start, roots))
}

fn critical_points(b: &FiniteBlaschkeProduct) -> Vec<Complex> {
    b.critical_points_in_disk()
        .map(|cd| cd.points.iter().map(|p| p.z).collect())
        .unwrap_or_default()
}

fn node_positions(spec: &PolarGridSpec, critical: &[Complex]) -> Vec<Polar> {
    (0..spec.n_radii)
        .flat_map(|i| (0..spec.n_angles).map(move |j| (i, j)))
        .map(|(i, j)| {
            let nominal = spec.node(i, j);
            let r = spec.radius(i);
            let r = if critical
                .iter()
                .any(|&c| (c - nominal).norm() < JITTER_TRIGGER)
            {
                r + JITTER
            } else {
                r
            };
            Polar {
                r,
                theta: spec.angle(j),
            }
        })
        .collect()
}

/// Continues fiber root `seed_index` over `B(0)` outward ring by ring and
/// around each ring, and cross-checks every node against an independent
/// radial continuation from the ring inside it.
pub fn track_branch(
    cubic: &DepressedCubic,
    b: &FiniteBlaschkeProduct,
    spec: &PolarGridSpec,
    seed_index: usize,
) -> Result<BranchGrid> {
    spec.validate()?;
    if seed_index > 2 {
        return Err(Error::InvalidSeed(seed_index));
    }
    let tracker = Tracker::new(cubic, b);
    let (start, seeds) = continuation_start(cubic, b)?;
    let center = seeds[seed_index];
    let positions = node_positions(spec, &tracker.critical);
    let na = spec.n_angles;
    let mut values = vec![Complex::new(0.0, 0.0); spec.len()];
    let mut closure: f64 = 0.0;
    let mut radial: f64 = 0.0;
    let mut deepest = 0;

    for i in 0..spec.n_radii {
        let inner = |j: usize| -> (Polar, Complex) {
            if i == 0 {
                let from = if start.r == 0.0 {
                    Polar {
                        r: 0.0,
                        theta: spec.angle(j),
                    }
                } else {
                    start
                };
                (from, center)
            } else {
                (positions[(i - 1) * na + j], values[(i - 1) * na + j])
            }
        };
        let ring = &positions[i * na..(i + 1) * na];

        let (from, v) = inner(0);
        let (first, d) = tracker.follow(from, ring[0], v)?;
        deepest = deepest.max(d);
        let mut ring_values = vec![first; na];
        let mut current = first;
        for j in 0..na {
            let to = if j + 1 < na {
                ring[j + 1]
            } else {
                Polar {
                    r: ring[0].r,
                    theta: ring[0].theta + 2.0 * PI,
                }
            };
            let (next, d) = tracker.follow(ring[j], to, current)?;
            deepest = deepest.max(d);
            current = next;
            if j + 1 < na {
                ring_values[j + 1] = next;
            }
        }
        closure = closure.max((current - first).norm());

        let checks: Vec<(f64, usize)> = (1..na)
            .into_par_iter()
            .map(|j| {
                let (from, v) = inner(j);
                tracker
                    .follow(from, ring[j], v)
                    .map(|(rv, d)| ((rv - ring_values[j]).norm(), d))
            })
            .collect::<Result<_>>()?;
        for (defect, d) in checks {
            radial = radial.max(defect);
            deepest = deepest.max(d);
        }
        values[i * na..(i + 1) * na].copy_from_slice(&ring_values);
    }

    let residual_sup = positions
        .iter()
        .zip(&values)
        .map(|(pos, &v)| (b.eval(pos.point()) - cubic.eval(v)).norm())
        .fold(0.0, f64::max);

    Ok(BranchGrid {
        spec: *spec,
        values,
        center,
        center_z: start.point(),
        seed_index,
        monodromy_ok: closure <= MONODROMY_TOL && radial <= MONODROMY_TOL,
        ring_closure_defect: closure,
        radial_defect: radial,
        residual_sup,
        max_step_refinements: deepest,
        algebraic_branch_counts: [0; 3],
    })
}

/// Outcome of continuing one seed, with the gates it was judged by.
#[derive(Debug, Clone)]
pub struct SeedTrial {
    pub seed_index: usize,
    pub grid: std::result::Result<BranchGrid, Error>,
    pub outer_ring_simple: bool,
    pub outer_ring_winding: i64,
    pub passed: bool,
}

/// The injectivity spot-check: the image of the outermost ring is a simple
/// closed curve winding once around the image of the centre.
fn outer_ring_gate(grid: &BranchGrid) -> (bool, i64) {
    let na = grid.spec.n_angles;
    let last = grid.spec.n_radii - 1;
    let ring = &grid.values[last * na..(last + 1) * na];
    let simple = closed_polyline_self_intersections(ring).is_empty();
    (simple, winding_number(ring, grid.center))
}

/// Continues every distinct seed over `B(0)` and applies the three gates
/// (single-valuedness, residual, injectivity spot-check) to each.
pub fn seed_trials(
    cubic: &DepressedCubic,
    b: &FiniteBlaschkeProduct,
    spec: &PolarGridSpec,
) -> Result<Vec<SeedTrial>> {
    let (_, seeds) = continuation_start(cubic, b)?;
    let mut distinct: Vec<usize> = Vec::new();
    for k in 0..3 {
        if distinct
            .iter()
            .all(|&m| (seeds[m] - seeds[k]).norm() > SEED_MERGE_TOL)
        {
            distinct.push(k);
        }
    }
    Ok(distinct
        .into_par_iter()
        .map(|seed_index| {
            let grid = track_branch(cubic, b, spec, seed_index);
            let (outer_ring_simple, outer_ring_winding, passed) = match &grid {
                Ok(g) => {
                    let (simple, winding) = outer_ring_gate(g);
                    let passed = g.monodromy_ok
                        && g.residual_sup <= BRANCH_RESIDUAL_TOL
                        && simple
                        && winding == 1;
                    (simple, winding, passed)
                }
                Err(_) => (false, 0, false),
            };
            SeedTrial {
                seed_index,
                grid,
                outer_ring_simple,
                outer_ring_winding,
                passed,
            }
        })
        .collect())
}

/// The unique seed passing every gate, or `BranchSelectionFailure`.
pub fn select_analytic_branch(
    cubic: &DepressedCubic,
    b: &FiniteBlaschkeProduct,
    spec: &PolarGridSpec,
) -> Result<BranchGrid> {
    let trials = seed_trials(cubic, b, spec)?;
    let passing: Vec<&SeedTrial> = trials.iter().filter(|t| t.passed).collect();
    if passing.len() != 1 {
        return Err(Error::BranchSelectionFailure {
            passing: passing.len(),
        });
    }
    let mut grid = passing[0].grid.clone()?;
    grid.algebraic_branch_counts = algebraic_branch_usage(&grid, cubic, b);
    Ok(grid)
}

/// For each node, which cube-root choice in `U + V` lands on the tracked
/// value. Whether one choice serves the whole grid is recorded, not assumed.
pub fn algebraic_branch_usage(
    grid: &BranchGrid,
    cubic: &DepressedCubic,
    b: &FiniteBlaschkeProduct,
) -> [usize; 3] {
    let mut counts = [0; 3];
    for (node, &v) in grid.spec.nodes().zip(&grid.values) {
        let w = b.eval(node);
        let best = (0..3)
            .filter_map(|k| {
                algebraic_phi(cubic, w, k)
                    .ok()
                    .map(|uv| (k, (uv.phi() - v).norm()))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((k, dist)) = best {
            if dist <= 1e-6 * (1.0 + v.norm()) {
                counts[k] += 1;
            }
        }
    }
    counts
}

fn interpolate(grid: &BranchGrid, z: Complex) -> Complex {
    let spec = &grid.spec;
    let na = spec.n_angles;
    let r = z.norm();
    let mut theta = z.arg();
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    let pos = theta / (2.0 * PI) * na as f64;
    let j0 = (pos.floor() as usize) % na;
    let j1 = (j0 + 1) % na;
    let s = pos - pos.floor();
    let ring = |i: usize| grid.value(i, j0) * (1.0 - s) + grid.value(i, j1) * s;

    let r0 = spec.radius(0);
    if r <= r0 {
        let t = r / r0;
        return grid.center * (1.0 - t) + ring(0) * t;
    }
    let last = spec.n_radii - 1;
    if r >= spec.radius(last) {
        return ring(last);
    }
    let i = (0..last)
        .find(|&i| r < spec.radius(i + 1))
        .unwrap_or(last - 1);
    let (ra, rb) = (spec.radius(i), spec.radius(i + 1));
    let t = (r - ra) / (rb - ra);
    ring(i) * (1.0 - t) + ring(i + 1) * t
}

/// Evaluates the tracked branch at any `z` in the disk: bilinear
/// interpolation in `(r, theta)`, snapped to the nearest fiber root. When the
/// snap is not decisive the branch is continued from the closest node.
pub fn phi_eval(
    grid: &BranchGrid,
    cubic: &DepressedCubic,
    b: &FiniteBlaschkeProduct,
    z: Complex,
) -> Result<Complex> {
    let roots = fiber_roots(cubic, b.eval(z))?;
    let guess = interpolate(grid, z);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| {
        (roots[x] - guess)
            .norm()
            .total_cmp(&(roots[y] - guess).norm())
    });
    let (first, second) = (roots[order[0]], roots[order[1]]);
    let gap = (first - second).norm();
    let off = (first - guess).norm();
    if off < 0.25 * gap {
        return Ok(first);
    }
    let third = roots[order[2]];
    if gap <= COLLISION_TOL {
        // at a critical point of B the analytic branch runs through the
        // collided pair; anything else cannot be decided from the grid
        if off < 0.25 * (third - first).norm() {
            return Ok((first + second) / 2.0);
        }
        return Err(Error::AmbiguousFiber(z));
    }

    let spec = &grid.spec;
    let r = z.norm();
    let mut theta = z.arg();
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    let tracker = Tracker::new(cubic, b);
    let target = Polar { r, theta };
    let (from, value) = if r < 0.5 * spec.radius(0) {
        let from = if grid.center_z.norm() == 0.0 {
            Polar { r: 0.0, theta }
        } else {
            Polar {
                r: grid.center_z.norm(),
                theta: grid.center_z.arg(),
            }
        };
        (from, grid.center)
    } else {
        let i = (0..spec.n_radii)
            .min_by(|&a, &b| {
                (spec.radius(a) - r)
                    .abs()
                    .total_cmp(&(spec.radius(b) - r).abs())
            })
            .unwrap_or(0);
        let j = ((theta / (2.0 * PI) * spec.n_angles as f64).round() as usize) % spec.n_angles;
        let mut node_theta = spec.angle(j);
        // walk the short way round
        if node_theta - theta > PI {
            node_theta -= 2.0 * PI;
        } else if theta - node_theta > PI {
            node_theta += 2.0 * PI;
        }
        (
            Polar {
                r: spec.radius(i),
                theta: node_theta,
            },
            grid.value(i, j),
        )
    };
    let (v, _) = tracker.follow(from, target, value)?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modeler::depressed_cubic_coeffs;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn example_cubic() -> DepressedCubic {
        depressed_cubic_coeffs(c(0.0, 0.0), c(2.0, 0.0)).unwrap()
    }

    fn sorted(mut v: Vec<Complex>) -> Vec<Complex> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    fn multiset_close(a: &[Complex], b: &[Complex], tol: f64) -> bool {
        let mut used = vec![false; b.len()];
        a.iter().all(
            |&x| match (0..b.len()).find(|&i| !used[i] && (b[i] - x).norm() <= tol) {
                Some(i) => {
                    used[i] = true;
                    true
                }
                None => false,
            },
        )
    }

    #[test]
    fn grid_spec_defaults_and_guards() {
        let spec = PolarGridSpec::default();
        assert_eq!((spec.n_radii, spec.n_angles), (64, 256));
        assert!((spec.radius(63) - 0.999).abs() < 1e-15);
        assert!(spec.radius(0) > 0.0);
        // clustered towards the boundary
        assert!(spec.radius(63) - spec.radius(62) < spec.radius(1) - spec.radius(0));
        assert!(PolarGridSpec::new(64, 4, 0.9).is_err());
        assert!(PolarGridSpec::new(64, 256, 1.0).is_err());
    }

    #[test]
    fn fiber_root_examples() {
        let unit = DepressedCubic {
            c: c(0.0, 0.0),
            d: c(0.0, 0.0),
        };
        let roots = fiber_roots(&unit, c(1.0, 0.0)).unwrap();
        let cube_roots: Vec<Complex> = (0..3)
            .map(|k| Complex::from_polar(1.0, 2.0 * PI * k as f64 / 3.0))
            .collect();
        assert!(multiset_close(&roots, &cube_roots, 1e-14));

        let k = c(0.3, -0.2);
        let shifted = DepressedCubic {
            c: c(0.0, 0.0),
            d: k,
        };
        let roots = fiber_roots(&shifted, k).unwrap();
        assert!(roots.iter().all(|r| r.norm() < 1e-14));

        let cubic = example_cubic();
        let roots = fiber_roots(&cubic, c(0.0, 0.0)).unwrap();
        let s = 2f64.powf(-1.0 / 3.0);
        assert!(multiset_close(
            &roots,
            &[c(s, 0.0), c(s, 0.0), c(-2.0 * s, 0.0)],
            1e-7
        ));
    }

    #[test]
    fn algebraic_candidates_match_fiber() {
        let cases = [
            (c(0.4, -1.1), c(0.2, 0.3), c(-0.5, 0.25)),
            (c(-2.0, 0.5), c(1.0, 0.0), c(0.1, 0.9)),
            (c(0.01, 0.02), c(-0.3, -0.3), c(0.7, 0.0)),
        ];
        for (cc, dd, w) in cases {
            let cubic = DepressedCubic { c: cc, d: dd };
            let candidates: Vec<Complex> = (0..3)
                .map(|k| {
                    let uv = algebraic_phi(&cubic, w, k).unwrap();
                    assert!((uv.u * uv.v + cc / 3.0).norm() <= 1e-9 * (1.0 + cc.norm()));
                    let phi = uv.phi();
                    assert!((phi * phi * phi + cc * phi + (dd - w)).norm() <= 1e-8);
                    phi
                })
                .collect();
            let roots = fiber_roots(&cubic, w).unwrap();
            assert!(multiset_close(&sorted(candidates), &roots, 1e-7));
        }
    }

    #[test]
    fn algebraic_candidates_collide_at_critical_value() {
        let cubic = example_cubic();
        let candidates: Vec<Complex> = (0..3)
            .map(|k| algebraic_phi(&cubic, c(2.0, 0.0), k).unwrap().phi())
            .collect();
        let close_pairs = (0..3)
            .flat_map(|i| ((i + 1)..3).map(move |j| (i, j)))
            .filter(|&(i, j)| (candidates[i] - candidates[j]).norm() < 1e-6)
            .count();
        assert_eq!(close_pairs, 1);
    }

    #[test]
    fn algebraic_phi_needs_nonzero_c() {
        let cubic = DepressedCubic {
            c: c(0.0, 0.0),
            d: c(0.5, 0.0),
        };
        assert!(matches!(
            algebraic_phi(&cubic, c(0.5, 0.0), 0),
            Err(Error::ZeroU(_))
        ));
    }
}
