use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec2;

const MERGE_TOL: f64 = 1e-12;

/// One atom `mass · δ_ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionAtom {
    pub omega: [f64; 2],
    pub mass: f64,
}

/// A finite positive measure on unoriented planar directions, stored
/// folded onto the upper half circle and sorted by angle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DirectionAtom>", into = "Vec<DirectionAtom>")]
pub struct DirectionMeasure {
    atoms: Vec<DirectionAtom>,
}

impl TryFrom<Vec<DirectionAtom>> for DirectionMeasure {
    type Error = Error;
    fn try_from(a: Vec<DirectionAtom>) -> Result<Self> {
        Self::new(
            a.into_iter()
                .map(|a| (Vec2::new(a.omega[0], a.omega[1]), a.mass))
                .collect(),
        )
    }
}

impl From<DirectionMeasure> for Vec<DirectionAtom> {
    fn from(m: DirectionMeasure) -> Self {
        m.atoms
    }
}

fn fold(w: Vec2) -> Vec2 {
    if w.y < 0.0 || (w.y == 0.0 && w.x < 0.0) {
        -w
    } else {
        w
    }
}

impl DirectionMeasure {
    /// Normalises, folds and merges atoms; directions need not be unit.
    pub fn new(atoms: Vec<(Vec2, f64)>) -> Result<Self> {
        let mut folded = Vec::with_capacity(atoms.len());
        for (w, m) in atoms {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::Domain(format!("atom mass {m} must be positive")));
            }
            let r = w.norm();
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::ZeroVector);
            }
            let u = fold(w / r);
            folded.push((u.y.atan2(u.x), u, m));
        }
        folded.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<DirectionAtom> = Vec::with_capacity(folded.len());
        for (_, u, m) in folded {
            match out.last_mut() {
                Some(last) if (Vec2::from(last.omega) - u).norm() <= MERGE_TOL => last.mass += m,
                _ => out.push(DirectionAtom {
                    omega: [u.x, u.y],
                    mass: m,
                }),
            }
        }
        // Directions just below π are antipodal to those just above 0.
        if out.len() > 1 {
            let first = Vec2::from(out[0].omega);
            let last = Vec2::from(out[out.len() - 1].omega);
            if (first + last).norm() <= MERGE_TOL {
                let m = out.pop().expect("nonempty").mass;
                out[0].mass += m;
            }
        }
        Ok(Self { atoms: out })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn atoms(&self) -> &[DirectionAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// `Σ_j m_j |⟨u, ω_j⟩|`, the norm represented by the measure.
    pub fn reconstruct(&self, u: &Vec2) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.mass * (u.x * a.omega[0] + u.y * a.omega[1]).abs())
            .sum()
    }

    /// `max |reconstruct(u) / ‖u‖ − 1|` over the given directions.
    pub fn relative_error(&self, dirs: &[Vec2], norm: impl Fn(&Vec2) -> f64) -> f64 {
        dirs.iter()
            .map(|u| (self.reconstruct(u) / norm(u) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
