use serde::{Deserialize, Serialize};

use crate::anisotropy::BranchingFunction;
use crate::currents::geom::{lex, Pool};
use crate::error::{Error, Result};
use crate::tolerance::MULT_TOL;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub p: Vec<f64>,
    pub w: f64,
}

/// A finite signed sum of Dirac masses `Σ w_i δ_{p_i}`, kept canonical:
/// distinct points (up to snapping), no zero weights, lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawZero")]
pub struct ZeroCurrent {
    atoms: Vec<Atom>,
}

#[derive(Deserialize)]
struct RawZero {
    atoms: Vec<Atom>,
}

impl TryFrom<RawZero> for ZeroCurrent {
    type Error = Error;
    fn try_from(r: RawZero) -> Result<Self> {
        Self::new(r.atoms.into_iter().map(|a| (a.p, a.w)).collect())
    }
}

impl ZeroCurrent {
    pub fn new(atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if let Some((p, _)) = atoms.first() {
            let d = p.len();
            for (q, w) in &atoms {
                if q.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        got: q.len(),
                    });
                }
                if !w.is_finite() || q.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Domain("non-finite atom".into()));
                }
            }
        }
        Ok(Self::canonical(atoms))
    }

    pub fn dirac(p: Vec<f64>, w: f64) -> Result<Self> {
        Self::new(vec![(p, w)])
    }

    pub(crate) fn canonical(atoms: Vec<(Vec<f64>, f64)>) -> Self {
        let mut pool = Pool::default();
        let mut weights: Vec<f64> = Vec::new();
        for (p, w) in atoms {
            let i = pool.id(&p);
            if i == weights.len() {
                weights.push(0.0);
            }
            weights[i] += w;
        }
        let mut out: Vec<Atom> = pool
            .pts
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| w.abs() > MULT_TOL)
            .map(|(p, w)| Atom { p, w })
            .collect();
        out.sort_by(|a, b| lex(&a.p, &b.p));
        Self { atoms: out }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `M(T) = Σ |w_i|`.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.w.abs()).sum()
    }

    /// `M_H(T) = Σ H(|w_i|)`.
    pub fn h_mass(&self, h: &BranchingFunction) -> f64 {
        self.atoms.iter().map(|a| h.cost(a.w)).sum()
    }

    /// Positive and negative parts as lists of `(point, weight > 0)`.
    pub fn split(&self) -> (Vec<Atom>, Vec<Atom>) {
        let pos = self.atoms.iter().filter(|a| a.w > 0.0).cloned().collect();
        let neg = self
            .atoms
            .iter()
            .filter(|a| a.w < 0.0)
            .map(|a| Atom { p: a.p.clone(), w: -a.w })
            .collect();
        (pos, neg)
    }

    pub fn sub(&self, other: &ZeroCurrent) -> ZeroCurrent {
        let mut all: Vec<(Vec<f64>, f64)> = self.atoms.iter().map(|a| (a.p.clone(), a.w)).collect();
        all.extend(other.atoms.iter().map(|a| (a.p.clone(), -a.w)));
        Self::canonical(all)
    }

    /// Atoms of `self − other` whose weights differ, `(point, self, other)`.
    pub fn diff(&self, other: &ZeroCurrent) -> Vec<(Vec<f64>, f64, f64)> {
        let mut out = Vec::new();
        let find = |c: &ZeroCurrent, p: &[f64]| {
            c.atoms
                .iter()
                .find(|a| crate::currents::geom::dist(&a.p, p) <= crate::tolerance::SNAP_TOL)
                .map_or(0.0, |a| a.w)
        };
        for a in &self.atoms {
            let w = find(other, &a.p);
            if w != a.w {
                out.push((a.p.clone(), a.w, w));
            }
        }
        for a in &other.atoms {
            if find(self, &a.p) == 0.0 {
                out.push((a.p.clone(), 0.0, a.w));
            }
        }
        out
    }
}
