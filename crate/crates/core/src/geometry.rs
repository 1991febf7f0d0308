//! Planar polyline helpers shared by branch selection and verification.

use std::f64::consts::PI;

use crate::algebra::Complex;

fn cross(a: Complex, b: Complex) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Proper or touching intersection of segments `[p1, p2]` and `[q1, q2]`.
pub fn segments_intersect(p1: Complex, p2: Complex, q1: Complex, q2: Complex) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on_segment = |a: Complex, b: Complex, p: Complex| {
        p.re >= a.re.min(b.re)
            && p.re <= a.re.max(b.re)
            && p.im >= a.im.min(b.im)
            && p.im <= a.im.max(b.im)
    };
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Index pairs `(i, j)` of non-adjacent segments of the closed polyline
/// through `points` that intersect. Segment `i` joins `points[i]` to
/// `points[i + 1]` (wrapping).
pub fn closed_polyline_self_intersections(points: &[Complex]) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut hits = Vec::new();
    if n < 4 {
        return hits;
    }
    let seg = |i: usize| (points[i], points[(i + 1) % n]);
    let boxes: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let (a, b) = seg(i);
            [
                a.re.min(b.re),
                a.re.max(b.re),
                a.im.min(b.im),
                a.im.max(b.im),
            ]
        })
        .collect();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                continue;
            }
            let (a1, a2) = seg(i);
            let (b1, b2) = seg(j);
            if segments_intersect(a1, a2, b1, b2) {
                hits.push((i, j));
            }
        }
    }
    hits
}

/// Winding number of the closed polyline around `center`.
pub fn winding_number(points: &[Complex], center: Complex) -> i64 {
    let n = points.len();
    let total: f64 = (0..n)
        .map(|i| ((points[(i + 1) % n] - center) / (points[i] - center)).arg())
        .sum();
    (total / (2.0 * PI)).round() as i64
}
