//! Critical level curves and modulus bands as SVG, plus a flood-fill
//! component counter for checking sublevel-set topology.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::algebra::{Complex, ComplexPolynomial};
use crate::blaschke::FiniteBlaschkeProduct;
use crate::modeler::ConformalModel;

pub const FIGURE_RESOLUTION: usize = 512;
pub const ORACLE_RESOLUTION: usize = 128;
const MIN_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Bounds {
    pub fn square(half_width: f64) -> Self {
        Bounds {
            re_min: -half_width,
            re_max: half_width,
            im_min: -half_width,
            im_max: half_width,
        }
    }
}

/// Samples of a real function on a regular `nx x ny` lattice covering
/// `bounds`, row-major with `iy` (imaginary part) as the row. `NaN` marks
/// points outside the domain of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub bounds: Bounds,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn point(&self, ix: f64, iy: f64) -> Complex {
        let b = &self.bounds;
        Complex::new(
            b.re_min + ix * (b.re_max - b.re_min) / (self.nx - 1) as f64,
            b.im_min + iy * (b.im_max - b.im_min) / (self.ny - 1) as f64,
        )
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    /// Bilinear interpolation at lattice coordinates.
    pub fn interpolate(&self, ix: f64, iy: f64) -> f64 {
        let x0 = (ix.floor() as usize).min(self.nx - 2);
        let y0 = (iy.floor() as usize).min(self.ny - 2);
        let (s, t) = (ix - x0 as f64, iy - y0 as f64);
        let v = |dx, dy| self.value(x0 + dx, y0 + dy);
        (1.0 - t) * ((1.0 - s) * v(0, 0) + s * v(1, 0)) + t * ((1.0 - s) * v(0, 1) + s * v(1, 1))
    }

    pub fn finite_range(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .filter(|v| v.is_finite())
            .fold(None, |acc, &v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }
}

/// `|f|` on the lattice, `NaN` where `mask` rejects.
///
/// # Panics
///
/// If `nx` or `ny` is below 16.
pub fn sample_modulus<F, M>(f: F, bounds: Bounds, nx: usize, ny: usize, mask: M) -> ScalarField
where
    F: Fn(Complex) -> Complex + Sync,
    M: Fn(Complex) -> bool + Sync,
{
    assert!(
        nx >= MIN_SAMPLES && ny >= MIN_SAMPLES,
        "field needs at least 16x16 samples"
    );
    let mut field = ScalarField {
        bounds,
        nx,
        ny,
        values: vec![f64::NAN; nx * ny],
    };
    let values: Vec<f64> = (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let z = field.point((k % nx) as f64, (k / nx) as f64);
            if mask(z) {
                f(z).norm()
            } else {
                f64::NAN
            }
        })
        .collect();
    field.values = values;
    field
}

/// Lattice edge: `(vertical, ix, iy)`; a horizontal edge joins `(ix, iy)` to
/// `(ix + 1, iy)`, a vertical one joins `(ix, iy)` to `(ix, iy + 1)`.
type EdgeKey = (bool, usize, usize);

/// Marching-squares level curves at `level`, in the complex plane. Closed
/// curves repeat their first point at the end. Cells touching `NaN` are
/// skipped; saddles are resolved by the cell-centre average.
pub fn extract_contours(field: &ScalarField, level: f64) -> Vec<Vec<Complex>> {
    let crossing = |key: EdgeKey| -> Complex {
        let (vertical, ix, iy) = key;
        let (jx, jy) = if vertical { (ix, iy + 1) } else { (ix + 1, iy) };
        let (a, b) = (field.value(ix, iy), field.value(jx, jy));
        let t = (level - a) / (b - a);
        field.point(
            ix as f64 + t * (jx - ix) as f64,
            iy as f64 + t * (jy - iy) as f64,
        )
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for iy in 0..field.ny - 1 {
        for ix in 0..field.nx - 1 {
            let v = [
                field.value(ix, iy),
                field.value(ix + 1, iy),
                field.value(ix + 1, iy + 1),
                field.value(ix, iy + 1),
            ];
            if v.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let bottom = (false, ix, iy);
            let right = (true, ix + 1, iy);
            let top = (false, ix, iy + 1);
            let left = (true, ix, iy);
            let case = v
                .iter()
                .enumerate()
                .fold(0, |acc, (k, &x)| acc | (usize::from(x < level) << k));
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 | 10 => {
                    let center_below = (v.iter().sum::<f64>() / 4.0) < level;
                    // corners 0 and 2 below when case 5
                    if (case == 5) == center_below {
                        segments.push((left, top));
                        segments.push((bottom, right));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(k);
        incident.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let walk = |start: usize, from: EdgeKey, used: &mut Vec<bool>| -> Vec<EdgeKey> {
        let mut keys = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            keys.push(next);
            at = next;
            match incident[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        keys
    };

    let mut chains = Vec::new();
    // open chains start at edges with a single incident segment
    let mut ends: Vec<EdgeKey> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(&k, _)| k)
        .collect();
    ends.sort_unstable();
    for key in ends {
        let seg = incident[&key][0];
        if !used[seg] {
            chains.push(walk(seg, key, &mut used));
        }
    }
    for seg in 0..segments.len() {
        if !used[seg] {
            let from = segments[seg].0;
            chains.push(walk(seg, from, &mut used));
        }
    }
    chains
        .into_iter()
        .map(|keys| keys.into_iter().map(crossing).collect())
        .collect()
}

/// Number of 4-connected components of `{values < threshold}`.
pub fn component_count(field: &ScalarField, threshold: f64) -> usize {
    let (nx, ny) = (field.nx, field.ny);
    let inside: Vec<bool> = field.values.iter().map(|&v| v < threshold).collect();
    let mut seen = vec![false; nx * ny];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..nx * ny {
        if !inside[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(k) = stack.pop() {
            let (ix, iy) = (k % nx, k / nx);
            let mut visit = |n: usize| {
                if inside[n] && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            };
            if ix > 0 {
                visit(k - 1);
            }
            if ix + 1 < nx {
                visit(k + 1);
            }
            if iy > 0 {
                visit(k - nx);
            }
            if iy + 1 < ny {
                visit(k + nx);
            }
        }
    }
    count
}

/// Levels for a figure: the critical moduli in `(0, 1)`, then `1`.
pub fn figure_levels(critical_values: &[Complex]) -> Vec<f64> {
    let mut levels: Vec<f64> = critical_values
        .iter()
        .map(|k| k.norm())
        .filter(|&m| m > 1e-12 && m < 1.0 - 1e-12)
        .collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    levels.push(1.0);
    levels
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurveFigure {
    pub field: ScalarField,
    /// Strictly increasing, ending at `1`.
    pub levels: Vec<f64>,
    /// One set of polylines per level.
    pub contours: Vec<Vec<Vec<Complex>>>,
}

impl LevelCurveFigure {
    pub fn new(field: ScalarField, levels: Vec<f64>) -> Self {
        let contours = levels
            .iter()
            .map(|&t| extract_contours(&field, t))
            .collect();
        LevelCurveFigure {
            field,
            levels,
            contours,
        }
    }

    /// Gray value for the band just below `levels[k]`; lighter means smaller.
    pub fn band_gray(&self, k: usize) -> u8 {
        const LIGHTEST: f64 = 235.0;
        const DARKEST: f64 = 120.0;
        if self.levels.len() == 1 {
            return DARKEST as u8;
        }
        let t = k as f64 / (self.levels.len() - 1) as f64;
        (LIGHTEST + t * (DARKEST - LIGHTEST)).round() as u8
    }
}

fn path_data(polylines: &[Vec<Complex>], to_px: &dyn Fn(Complex) -> (f64, f64)) -> String {
    let mut d = String::new();
    for line in polylines.iter().filter(|l| l.len() >= 2) {
        for (k, &z) in line.iter().enumerate() {
            let (x, y) = to_px(z);
            let cmd = if k == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{x:.2},{y:.2}");
        }
        if line.first() == line.last() {
            d.push('Z');
        }
    }
    d
}

/// Grayscale SVG: nested band fills (largest level painted first) and a
/// black stroke for every level. Identical inputs give identical bytes.
///
/// # Panics
///
/// If `size_px` is below 100.
pub fn render_figure(fig: &LevelCurveFigure, size_px: usize) -> String {
    assert!(size_px >= 100, "figures need at least 100 px");
    let b = &fig.field.bounds;
    let (w_units, h_units) = (b.re_max - b.re_min, b.im_max - b.im_min);
    let width = size_px as f64;
    let height = (width * h_units / w_units).round().max(1.0);
    let to_px = |z: Complex| {
        (
            (z.re - b.re_min) / w_units * width,
            (b.im_max - z.im) / h_units * height,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    for k in (0..fig.levels.len()).rev() {
        let gray = fig.band_gray(k);
        let d = path_data(&fig.contours[k], &to_px);
        let _ = writeln!(
            svg,
            r#"<path class="band" data-level="{:.6}" fill="rgb({gray},{gray},{gray})" fill-rule="evenodd" stroke="none" d="{d}"/>"#,
            fig.levels[k]
        );
    }
    for (k, level) in fig.levels.iter().enumerate() {
        let d = path_data(&fig.contours[k], &to_px);
        let _ = writeln!(
            svg,
            r#"<path class="contour" data-level="{level:.6}" fill="none" stroke="black" stroke-width="1" d="{d}"/>"#
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Half-width of a square containing `{|p| <= 1}`: a Cauchy bound for the
/// roots of `p - w`, `|w| <= 1`, padded by 10%.
pub fn unit_sublevel_half_width(p: &ComplexPolynomial) -> f64 {
    let coeffs = p.coeffs();
    let Some(lead) = p.leading().map(|c| c.norm()).filter(|&l| l > 0.0) else {
        return 1.1;
    };
    let n = coeffs.len() - 1;
    let worst = (0..n)
        .map(|j| {
            let c = coeffs[j].norm();
            if j == 0 {
                c + 1.0
            } else {
                c
            }
        })
        .fold(0.0, f64::max);
    1.1 * (1.0 + worst / lead)
}

/// Radius of the disk on which `|B|` is sampled: a little past the unit
/// circle so the level-1 curve is resolved, short of every pole.
pub fn blaschke_sample_radius(b: &FiniteBlaschkeProduct) -> f64 {
    let max_zero = b.zeros().iter().map(|a| a.norm()).fold(0.0, f64::max);
    if max_zero == 0.0 {
        1.05
    } else {
        1.05f64.min((1.0 + 1.0 / max_zero) / 2.0)
    }
}

/// `|B|` around the closed disk and `|p|` on a box containing its unit
/// sublevel set, at `resolution x resolution` samples.
pub fn figure_fields(
    b: &FiniteBlaschkeProduct,
    m: &ConformalModel,
    resolution: usize,
) -> (ScalarField, ScalarField) {
    let radius = blaschke_sample_radius(b);
    let b_field = sample_modulus(
        |z| b.eval(z),
        Bounds::square(radius),
        resolution,
        resolution,
        |z| z.norm() < radius,
    );
    let p_field = sample_modulus(
        |z| m.p.eval(z),
        Bounds::square(unit_sublevel_half_width(&m.p)),
        resolution,
        resolution,
        |_| true,
    );
    (b_field, p_field)
}

/// The `B` figure and the `p` figure with the same levels and shading.
pub fn figure_pair(
    b: &FiniteBlaschkeProduct,
    m: &ConformalModel,
    size_px: usize,
) -> (String, String) {
    let (b_field, p_field) = figure_fields(b, m, FIGURE_RESOLUTION);
    let levels = figure_levels(&m.critical_values);
    let left = LevelCurveFigure::new(b_field, levels.clone());
    let right = LevelCurveFigure::new(p_field, levels);
    (
        render_figure(&left, size_px),
        render_figure(&right, size_px),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn modulus_field(n: usize) -> ScalarField {
        sample_modulus(|z| z, Bounds::square(1.0), n, n, |z| z.norm() < 1.0)
    }

    #[test]
    fn identity_field_is_modulus_with_nan_outside() {
        let f = modulus_field(33);
        for iy in 0..33 {
            for ix in 0..33 {
                let z = f.point(ix as f64, iy as f64);
                let v = f.value(ix, iy);
                if z.norm() < 1.0 {
                    assert!((v - z.norm()).abs() < 1e-15);
                } else {
                    assert!(v.is_nan());
                }
            }
        }
        let cubed = sample_modulus(|z| z * z * z, Bounds::square(1.0), 17, 17, |_| true);
        let z = cubed.point(3.0, 11.0);
        assert!((cubed.value(3, 11) - z.norm().powi(3)).abs() < 1e-15);
    }

    #[test]
    fn circle_contour() {
        let f = modulus_field(128);
        let lines = extract_contours(&f, 0.5);
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        assert_eq!(line.first(), line.last());
        let deviation = line
            .iter()
            .map(|z| (z.norm() - 0.5).abs())
            .fold(0.0, f64::max);
        assert!(deviation <= 2.0 / 128.0, "{deviation}");

        let cubed = sample_modulus(|z| z * z * z, Bounds::square(1.0), 128, 128, |_| true);
        let lines = extract_contours(&cubed, 0.5);
        assert_eq!(lines.len(), 1);
        let r = 0.5f64.powf(1.0 / 3.0);
        assert!(lines[0].iter().all(|z| (z.norm() - r).abs() <= 2.0 / 128.0));
    }

    #[test]
    fn contour_vertices_sit_on_the_level() {
        let f = sample_modulus(|z| z * z - 0.2, Bounds::square(1.0), 64, 64, |_| true);
        let b = f.bounds;
        for line in extract_contours(&f, 0.3) {
            for z in line {
                let ix = (z.re - b.re_min) / (b.re_max - b.re_min) * 63.0;
                let iy = (z.im - b.im_min) / (b.im_max - b.im_min) * 63.0;
                assert!((f.interpolate(ix, iy) - 0.3).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn components() {
        let f = modulus_field(ORACLE_RESOLUTION);
        assert_eq!(component_count(&f, 0.5), 1);
        let two = sample_modulus(|z| z * z - 0.25, Bounds::square(1.0), 128, 128, |_| true);
        assert_eq!(component_count(&two, 0.1), 2);
        assert_eq!(component_count(&two, 0.5), 1);
    }

    #[test]
    fn trivial_figure_has_two_contours() {
        let fig = LevelCurveFigure::new(
            sample_modulus(|z| z, Bounds::square(1.1), 128, 128, |z| z.norm() < 1.05),
            vec![0.5, 1.0],
        );
        let svg = render_figure(&fig, 200);
        assert_eq!(svg.matches(r#"class="contour""#).count(), 2);
        assert_eq!(svg.matches(r#"class="band""#).count(), 2);
        assert_eq!(svg, render_figure(&fig, 200));
        assert!(fig.band_gray(0) > fig.band_gray(1));
    }

    #[test]
    fn levels_from_critical_values() {
        let ks = [
            Complex::new(0.0, 0.5),
            Complex::new(0.2, 0.0),
            Complex::new(0.0, 0.0),
        ];
        assert_eq!(figure_levels(&ks), vec![0.2, 0.5, 1.0]);
        assert_eq!(figure_levels(&[]), vec![1.0]);
    }

    #[test]
    fn cauchy_box_contains_unit_sublevel_set() {
        let p = ComplexPolynomial::from_real(&[-0.125, 0.0, 0.0, -0.984375]);
        let h = unit_sublevel_half_width(&p);
        for k in 0..360 {
            let w = Complex::from_polar(1.0, k as f64 * std::f64::consts::PI / 180.0);
            let shifted = p.sub(&ComplexPolynomial::constant(w));
            for z in crate::algebra::all_roots_oracle(&shifted).unwrap() {
                assert!(z.re.abs() < h && z.im.abs() < h);
            }
        }
    }
}
