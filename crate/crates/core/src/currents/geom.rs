//! Small helpers on points stored as coordinate slices.

use std::cmp::Ordering;

use crate::tolerance::SNAP_TOL;

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn lex(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Points identified up to `SNAP_TOL`; the first inserted point of a
/// cluster is its representative.
#[derive(Default)]
pub(crate) struct Pool {
    pub pts: Vec<Vec<f64>>,
}

impl Pool {
    pub fn find(&self, p: &[f64]) -> Option<usize> {
        self.pts.iter().position(|q| dist(p, q) <= SNAP_TOL)
    }

    pub fn id(&mut self, p: &[f64]) -> usize {
        match self.find(p) {
            Some(i) => i,
            None => {
                self.pts.push(p.to_vec());
                self.pts.len() - 1
            }
        }
    }
}

/// Closest points of segments `[a1, b1]` and `[a2, b2]` for non-parallel
/// supports, as parameters `(s, t)` clamped to the unit square.
pub(crate) fn closest_params(a1: &[f64], b1: &[f64], a2: &[f64], b2: &[f64]) -> Option<(f64, f64)> {
    let d1 = sub(b1, a1);
    let d2 = sub(b2, a2);
    let r = sub(a1, a2);
    let a = dot(&d1, &d1);
    let e = dot(&d2, &d2);
    let b = dot(&d1, &d2);
    let c = dot(&d1, &r);
    let f = dot(&d2, &r);
    let den = a * e - b * b;
    if den <= 1e-14 * a * e {
        return None;
    }
    let s = ((b * f - c * e) / den).clamp(0.0, 1.0);
    let t = ((b * s + f) / e).clamp(0.0, 1.0);
    let s = ((b * t - c) / a).clamp(0.0, 1.0);
    Some((s, t))
}

pub(crate) fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}
