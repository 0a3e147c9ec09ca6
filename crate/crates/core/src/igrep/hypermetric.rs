use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anisotropy::Anisotropy;
use crate::error::{Error, Result};
use crate::tolerance::HYPERMETRIC_TOL;

/// Finite point sets for the hypermetric search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PointGrid {
    /// Cartesian power `values^dim`, enumerated with the last coordinate
    /// varying fastest.
    Cube { dim: usize, values: Vec<f64> },
    Explicit { points: Vec<Vec<f64>> },
}

impl PointGrid {
    pub fn cube(dim: usize, values: &[f64]) -> Self {
        Self::Cube {
            dim,
            values: values.to_vec(),
        }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            Self::Explicit { points } => points.clone(),
            Self::Cube { dim, values } => {
                let k = values.len();
                (0..k.pow(*dim as u32))
                    .map(|mut code| {
                        let mut p = vec![0.0; *dim];
                        for slot in p.iter_mut().rev() {
                            *slot = values[code % k];
                            code /= k;
                        }
                        p
                    })
                    .collect()
            }
        }
    }
}

/// Points `P_i` and integers `x_i` with `Σ x_i = 1` and
/// `Σ_{i<j} x_i x_j d(P_i, P_j) > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypermetricCertificate {
    pub points: Vec<Vec<f64>>,
    pub coefficients: Vec<i64>,
    pub value: f64,
}

impl HypermetricCertificate {
    /// Recompute the inequality value from scratch.
    pub fn evaluate(&self, norm: &Anisotropy) -> f64 {
        let mut v = 0.0;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d: Vec<f64> = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(a, b)| a - b)
                    .collect();
                v += (self.coefficients[i] * self.coefficients[j]) as f64 * norm.eval(&d);
            }
        }
        v
    }
}

struct Search<'a> {
    d: &'a [f64],
    n: usize,
    a: usize,
    coeffs: Vec<i64>,
}

impl Search<'_> {
    /// Depth-first over increasing point indices; returns the first
    /// violating `(indices, coefficients)`.
    ///
    /// `acc[..n]` holds `Σ_{q chosen} x_q d(q, p)` for every `p`, so a leaf
    /// costs one lookup; deeper levels follow in `acc[n..]`.
    fn dfs(
        &self,
        idx: &mut Vec<usize>,
        x: &mut Vec<i64>,
        acc: &mut [f64],
        sum: i64,
        value: f64,
    ) -> Option<(Vec<usize>, Vec<i64>)> {
        let t = idx.len();
        let bound = *self.coeffs.last().expect("nonempty coefficients");
        let remaining = (self.a - t) as i64;
        let start = idx.last().map_or(0, |i| i + 1);
        let (cur, rest) = acc.split_at_mut(self.n);
        if remaining == 1 {
            let last = 1 - sum;
            if last == 0 || last.abs() > bound {
                return None;
            }
            let lf = last as f64;
            for (p, d) in cur.iter().enumerate().skip(start) {
                if value + lf * d > HYPERMETRIC_TOL {
                    let mut i = idx.clone();
                    i.push(p);
                    let mut c = x.clone();
                    c.push(last);
                    return Some((i, c));
                }
            }
            return None;
        }
        // Leave room for the remaining strictly increasing indices.
        let end = self.n + 1 - remaining as usize;
        let r = remaining - 1;
        for p in start..end {
            let row = &self.d[p * self.n..(p + 1) * self.n];
            for &c in &self.coeffs {
                let s = sum + c;
                // The remaining nonzero coefficients must bring the sum to 1.
                if (1 - s).abs() > r * bound || (r == 1 && s == 1) {
                    continue;
                }
                let cf = c as f64;
                for ((nq, cq), dq) in rest[..self.n].iter_mut().zip(cur.iter()).zip(row) {
                    *nq = cq + cf * dq;
                }
                idx.push(p);
                x.push(c);
                let found = self.dfs(idx, x, rest, s, value + cf * cur[p]);
                idx.pop();
                x.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
}

/// Exhaustive search for a violated hypermetric inequality.
///
/// Enumerates `a = 2, …, max_points` distinct grid points in increasing
/// index order with nonzero coefficients `|x_i| <= coeff_bound` summing to
/// one, in the order (point, coefficient ascending) at each position. The
/// first violation in that order is returned, independent of scheduling.
///
/// `None` only means that nothing was found within the budget; it does not
/// certify hypermetricity.
pub fn hypermetric_search(
    norm: &Anisotropy,
    max_points: usize,
    coeff_bound: i64,
    grid: &PointGrid,
) -> Result<Option<HypermetricCertificate>> {
    if coeff_bound < 1 {
        return Err(Error::Domain(format!("coefficient bound {coeff_bound} < 1")));
    }
    let points = grid.points();
    if let Some(p) = points.iter().find(|p| p.len() != norm.dim()) {
        return Err(Error::DimensionMismatch {
            expected: norm.dim(),
            got: p.len(),
        });
    }
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let diff: Vec<f64> = points[i].iter().zip(&points[j]).map(|(a, b)| a - b).collect();
            d[i * n + j] = norm.eval(&diff);
        }
    }
    let coeffs: Vec<i64> = (-coeff_bound..=coeff_bound).filter(|c| *c != 0).collect();
    for a in 2..=max_points.min(n) {
        let search = Search {
            d: &d,
            n,
            a,
            coeffs: coeffs.clone(),
        };
        let tasks: Vec<(usize, i64)> = (0..=n - a)
            .flat_map(|p| coeffs.iter().map(move |c| (p, *c)))
            .collect();
        let found = tasks.par_iter().find_map_first(|&(p, c)| {
            if (1 - c).abs() > (a as i64 - 1) * coeff_bound {
                return None;
            }
            let mut acc = vec![0.0; a * n];
            for (slot, dq) in acc.iter_mut().zip(&d[p * n..(p + 1) * n]) {
                *slot = c as f64 * dq;
            }
            let mut idx = vec![p];
            let mut x = vec![c];
            search.dfs(&mut idx, &mut x, &mut acc, c, 0.0)
        });
        if let Some((idx, x)) = found {
            let cert = HypermetricCertificate {
                points: idx.iter().map(|i| points[*i].clone()).collect(),
                coefficients: x,
                value: 0.0,
            };
            let value = cert.evaluate(norm);
            return Ok(Some(HypermetricCertificate { value, ..cert }));
        }
    }
    Ok(None)
}
