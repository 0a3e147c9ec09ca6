use serde::Serialize;

use crate::anisotropy::lines::{cross, rot90, rotate};
use crate::anisotropy::SymmetricPolygon;
use crate::error::{Error, Result};
use crate::igrep::DirectionMeasure;
use crate::tolerance::{GENERIC_MARGIN, PARALLEL_TOL};
use crate::Vec2;

/// Weights `λ_i > 0` and directions `w_i = R v_i` with
/// `‖u‖_P = Σ λ_i |⟨u, w_i⟩|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonDecomposition {
    pub weights: Vec<f64>,
    pub directions: Vec<Vec2>,
    /// Edge support normals `n_1, …, n_N` of the first half of the polygon.
    pub normals: Vec<Vec2>,
    /// Inradius `r` of the polygon, so that `Σ λ_i ‖v_i‖ <= 8 / r`.
    pub inradius: f64,
    /// Rotation applied internally before reading off edge slopes.
    pub angle: f64,
}

impl PolygonDecomposition {
    pub fn reconstruct(&self, u: &Vec2) -> f64 {
        self.weights
            .iter()
            .zip(&self.directions)
            .map(|(l, w)| l * u.dot(w).abs())
            .sum()
    }

    /// `Σ λ_i ‖v_i‖`.
    pub fn weight_sum(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.directions)
            .map(|(l, w)| l * w.norm())
            .sum()
    }

    pub fn weight_bound(&self) -> f64 {
        8.0 / self.inradius
    }

    pub fn measure(&self) -> DirectionMeasure {
        let atoms = self
            .weights
            .iter()
            .zip(&self.directions)
            .map(|(l, w)| (w / w.norm(), l * w.norm()))
            .collect();
        DirectionMeasure::new(atoms).expect("decomposition weights are positive")
    }
}

/// Edge lines `a_i x + b_i y = 1` from slope and intercept,
/// `a_i = −m_i / q_i`, `b_i = 1 / q_i`.
///
/// Requires a generic position: no vertical or horizontal edge.
pub fn edge_normals(p: &SymmetricPolygon) -> Result<Vec<Vec2>> {
    let v = p.vertices();
    let m = v.len();
    (0..m)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % m]);
            let (dx, dy) = (b.x - a.x, b.y - a.y);
            if dx == 0.0 && dy == 0.0 {
                return Err(Error::DegenerateEdge { index: i });
            }
            if dx == 0.0 || dy == 0.0 {
                return Err(Error::NotGeneric(format!("edge {i} is axis-parallel")));
            }
            let slope = dy / dx;
            let q = a.y - slope * a.x;
            Ok(Vec2::new(-slope / q, 1.0 / q))
        })
        .collect()
}

fn bad_angles(p: &SymmetricPolygon) -> Vec<f64> {
    let quarter = std::f64::consts::FRAC_PI_2;
    let v = p.vertices();
    let m = v.len();
    let mut bad = Vec::with_capacity(2 * m);
    for i in 0..m {
        let e = v[(i + 1) % m] - v[i];
        for t in [v[i].y.atan2(v[i].x), e.y.atan2(e.x)] {
            bad.push((-t).rem_euclid(quarter));
        }
    }
    bad.sort_by(f64::total_cmp);
    bad
}

/// Rotate so that no vertex sits on an axis and no edge is axis-parallel.
///
/// Returns the rotated polygon and the angle; the angle is `0` when the
/// input is already generic with margin `GENERIC_MARGIN`, otherwise the
/// midpoint of the widest gap between forbidden angles (mod π/2).
pub fn rotate_generic(p: &SymmetricPolygon) -> (SymmetricPolygon, f64) {
    let quarter = std::f64::consts::FRAC_PI_2;
    let bad = bad_angles(p);
    let dist0 = bad
        .iter()
        .map(|b| b.min(quarter - b))
        .fold(f64::INFINITY, f64::min);
    if dist0 >= GENERIC_MARGIN {
        return (p.clone(), 0.0);
    }
    let mut best = (0.0, 0.0);
    for i in 0..bad.len() {
        let lo = bad[i];
        let hi = if i + 1 < bad.len() {
            bad[i + 1]
        } else {
            bad[0] + quarter
        };
        if hi - lo > best.1 {
            best = (lo, hi - lo);
        }
    }
    let angle = (best.0 + best.1 / 2.0).rem_euclid(quarter);
    (p.rotated(angle), angle)
}

/// Integral-geometric decomposition of a symmetric polygon norm via
/// `2 λ_k w_k = n_k − n_{k−1}`, `n_0 = −n_N`.
pub fn polygon_decompose(p: &SymmetricPolygon) -> Result<PolygonDecomposition> {
    let (rp, angle) = rotate_generic(p);
    let normals = edge_normals(&rp)?;
    let n = rp.half_len();
    let rv = rp.vertices();
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        let prev = if k == 0 { -normals[n - 1] } else { normals[k - 1] };
        let d = normals[k] - prev;
        let w = rot90(&rv[k]);
        let sin = cross(&d, &w) / (d.norm() * w.norm());
        if !(sin.abs() <= PARALLEL_TOL && d.dot(&w) > 0.0) {
            return Err(Error::NumericalDegeneracy {
                prev: (k + 2 * n - 1) % (2 * n),
                next: k,
            });
        }
        weights.push(d.norm() / (2.0 * w.norm()));
    }
    let directions = p.vertices()[..n].iter().map(rot90).collect();
    let normals = normals[..n].iter().map(|m| rotate(m, -angle)).collect();
    Ok(PolygonDecomposition {
        weights,
        directions,
        normals,
        inradius: p.inradius(),
        angle,
    })
}
