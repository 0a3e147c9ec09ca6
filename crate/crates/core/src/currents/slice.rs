use serde::{Deserialize, Serialize};

use crate::anisotropy::BranchingFunction;
use crate::currents::geom::{dot, lerp};
use crate::currents::{PolyhedralOneCurrent, ZeroCurrent};
use crate::error::{Error, Result};
use crate::igrep::DirectionMeasure;
use crate::tolerance::SNAP_TOL;

/// The fiber `⟨x, direction⟩ = offset` of the projection onto a line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    direction: Vec<f64>,
    offset: f64,
}

impl SliceSpec {
    /// Normalises `direction`.
    pub fn new(direction: Vec<f64>, offset: f64) -> Result<Self> {
        let r = dot(&direction, &direction).sqrt();
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::ZeroVector);
        }
        if !offset.is_finite() {
            return Err(Error::Domain("non-finite slice offset".into()));
        }
        Ok(Self {
            direction: direction.iter().map(|x| x / r).collect(),
            offset,
        })
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

/// Signed crossings of the canonical edges with the fiber.
///
/// Each edge counts on the half-open range `[min, max)` of its projection,
/// so a vertex shared by consecutive edges is counted once; the weight is
/// `sign⟨b − a, direction⟩ · θ`.
pub fn slice(p: &PolyhedralOneCurrent, s: &SliceSpec) -> Result<ZeroCurrent> {
    if let Some(d) = p.dim() {
        if d != s.direction.len() {
            return Err(Error::DimensionMismatch {
                expected: s.direction.len(),
                got: d,
            });
        }
    }
    let c = p.canonicalize();
    let y = s.offset;
    let mut atoms = Vec::new();
    for (i, e) in c.edges().iter().enumerate() {
        let pa = dot(&e.a, &s.direction);
        let pb = dot(&e.b, &s.direction);
        if (pa - y).abs() <= SNAP_TOL && (pb - y).abs() <= SNAP_TOL {
            return Err(Error::DegenerateSlice { edge: i });
        }
        let (lo, hi) = if pa < pb { (pa, pb) } else { (pb, pa) };
        if !(lo <= y && y < hi) {
            continue;
        }
        let t = (y - pa) / (pb - pa);
        let sign = if pb > pa { 1.0 } else { -1.0 };
        atoms.push((lerp(&e.a, &e.b, t), sign * e.theta));
    }
    Ok(ZeroCurrent::canonical(atoms))
}

/// Closed form of `∫ M_H(⟨P, p_L, y⟩) dy dμ(L)`:
/// `Σ_atoms m Σ_e H(|θ_e|) |⟨b_e − a_e, ω⟩|`.
///
/// An empty measure yields `0`.
pub fn h_mass_via_slicing(
    p: &PolyhedralOneCurrent,
    h: &BranchingFunction,
    mu: &DirectionMeasure,
) -> Result<f64> {
    if p.dim().is_some_and(|d| d != 2) {
        return Err(Error::Unsupported("slicing measures are planar".into()));
    }
    let c = p.canonicalize();
    let per_edge: Vec<(f64, [f64; 2])> = c
        .edges()
        .iter()
        .map(|e| (h.cost(e.theta), [e.b[0] - e.a[0], e.b[1] - e.a[1]]))
        .collect();
    Ok(mu
        .atoms()
        .iter()
        .map(|a| {
            a.mass
                * per_edge
                    .iter()
                    .map(|(hc, v)| hc * (v[0] * a.omega[0] + v[1] * a.omega[1]).abs())
                    .sum::<f64>()
        })
        .sum())
}

/// The same quantity by integrating slice masses: for each atom the slice
/// `H`-mass is piecewise constant in `y` between vertex projections, so
/// evaluating at interval midpoints integrates it exactly.
pub fn h_mass_by_slice_integration(
    p: &PolyhedralOneCurrent,
    h: &BranchingFunction,
    mu: &DirectionMeasure,
) -> Result<f64> {
    if p.dim().is_some_and(|d| d != 2) {
        return Err(Error::Unsupported("slicing measures are planar".into()));
    }
    let c = p.canonicalize();
    let verts = c.vertices();
    let mut total = 0.0;
    for a in mu.atoms() {
        let dir = a.omega.to_vec();
        let mut ys: Vec<f64> = verts.iter().map(|v| dot(v, &dir)).collect();
        ys.sort_by(f64::total_cmp);
        ys.dedup_by(|x, y| (*x - *y).abs() <= 1e-12);
        let mut integral = 0.0;
        for w in ys.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let s = slice(&c, &SliceSpec::new(dir.clone(), mid)?)?;
            integral += (w[1] - w[0]) * s.h_mass(h);
        }
        total += a.mass * integral;
    }
    Ok(total)
}
