use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::anisotropy::{Anisotropy, BranchingFunction};
use crate::currents::geom::{closest_params, dist, dot, lerp, lex, sub, Pool};
use crate::currents::ZeroCurrent;
use crate::error::{Error, Result};
use crate::tolerance::{MULT_TOL, SNAP_TOL};

/// Oriented segment `a → b` with multiplicity `theta`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub theta: f64,
}

impl Edge {
    pub fn new(a: Vec<f64>, b: Vec<f64>, theta: f64) -> Self {
        Self { a, b, theta }
    }

    pub fn length(&self) -> f64 {
        dist(&self.a, &self.b)
    }

    pub fn vector(&self) -> Vec<f64> {
        sub(&self.b, &self.a)
    }
}

/// A finite sum of oriented segments with real multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurrent")]
pub struct PolyhedralOneCurrent {
    edges: Vec<Edge>,
}

#[derive(Deserialize)]
struct RawCurrent {
    edges: Vec<Edge>,
}

impl TryFrom<RawCurrent> for PolyhedralOneCurrent {
    type Error = Error;
    fn try_from(r: RawCurrent) -> Result<Self> {
        Self::new(r.edges)
    }
}

impl PolyhedralOneCurrent {
    /// Validates dimensions, finiteness and nonzero edge lengths.
    pub fn new(edges: Vec<Edge>) -> Result<Self> {
        if let Some(first) = edges.first() {
            let d = first.a.len();
            for (i, e) in edges.iter().enumerate() {
                for p in [&e.a, &e.b] {
                    if p.len() != d {
                        return Err(Error::DimensionMismatch {
                            expected: d,
                            got: p.len(),
                        });
                    }
                    if p.iter().any(|x| !x.is_finite()) {
                        return Err(Error::Domain(format!("edge {i} has a non-finite endpoint")));
                    }
                }
                if !e.theta.is_finite() {
                    return Err(Error::Domain(format!("edge {i} has non-finite multiplicity")));
                }
                if e.length() <= SNAP_TOL {
                    return Err(Error::DegenerateEdge { index: i });
                }
            }
        }
        Ok(Self { edges })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Polygonal path through `points` with constant multiplicity.
    pub fn path(points: &[Vec<f64>], theta: f64) -> Result<Self> {
        Self::new(
            points
                .windows(2)
                .map(|w| Edge::new(w[0].clone(), w[1].clone(), theta))
                .collect(),
        )
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Ambient dimension, `None` for the empty current.
    pub fn dim(&self) -> Option<usize> {
        self.edges.first().map(|e| e.a.len())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut e = self.edges.clone();
        e.extend(other.edges.iter().cloned());
        Self::new(e)
    }

    pub fn neg(&self) -> Self {
        Self {
            edges: self
                .edges
                .iter()
                .map(|e| Edge::new(e.a.clone(), e.b.clone(), -e.theta))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Canonical form: supports are split at all mutual endpoints and
    /// crossings (up to `SNAP_TOL`), overlaps merged with summed
    /// multiplicities, edges oriented from the lexicographically smaller
    /// endpoint, zero multiplicities dropped and edges sorted.
    pub fn canonicalize(&self) -> Self {
        let mut pool = Pool::default();
        for e in &self.edges {
            pool.id(&e.a);
            pool.id(&e.b);
        }
        let m = self.edges.len();
        for i in 0..m {
            for j in i + 1..m {
                let (e, f) = (&self.edges[i], &self.edges[j]);
                if let Some((s, t)) = closest_params(&e.a, &e.b, &f.a, &f.b) {
                    let p = lerp(&e.a, &e.b, s);
                    if dist(&p, &lerp(&f.a, &f.b, t)) <= SNAP_TOL {
                        pool.id(&p);
                    }
                }
            }
        }
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for e in &self.edges {
            let ia = pool.find(&e.a).expect("pooled");
            let ib = pool.find(&e.b).expect("pooled");
            let d = sub(&e.b, &e.a);
            let dd = dot(&d, &d);
            let mut cuts: Vec<(f64, usize)> = vec![(0.0, ia), (1.0, ib)];
            for (k, p) in pool.pts.iter().enumerate() {
                if k == ia || k == ib {
                    continue;
                }
                let t = dot(&sub(p, &e.a), &d) / dd;
                if t <= 0.0 || t >= 1.0 {
                    continue;
                }
                if dist(p, &lerp(&e.a, &e.b, t)) <= SNAP_TOL {
                    cuts.push((t, k));
                }
            }
            cuts.sort_by(|x, y| x.0.total_cmp(&y.0));
            for w in cuts.windows(2) {
                let (i, j) = (w[0].1, w[1].1);
                if i == j {
                    continue;
                }
                let (key, th) = if lex(&pool.pts[i], &pool.pts[j]).is_lt() {
                    ((i, j), e.theta)
                } else {
                    ((j, i), -e.theta)
                };
                *acc.entry(key).or_insert(0.0) += th;
            }
        }
        let mut edges: Vec<Edge> = acc
            .into_iter()
            .filter(|(_, th)| th.abs() > MULT_TOL)
            .map(|((i, j), th)| Edge::new(pool.pts[i].clone(), pool.pts[j].clone(), th))
            .collect();
        edges.sort_by(|x, y| lex(&x.a, &y.a).then_with(|| lex(&x.b, &y.b)));
        Self { edges }
    }

    /// `∂P = Σ θ (δ_b − δ_a)`.
    pub fn boundary(&self) -> ZeroCurrent {
        let c = self.canonicalize();
        let mut atoms = Vec::with_capacity(2 * c.edges.len());
        for e in &c.edges {
            atoms.push((e.b.clone(), e.theta));
            atoms.push((e.a.clone(), -e.theta));
        }
        ZeroCurrent::canonical(atoms)
    }

    /// Euclidean mass `Σ |θ| len` of the canonical form.
    pub fn mass(&self) -> f64 {
        self.canonicalize()
            .edges
            .iter()
            .map(|e| e.theta.abs() * e.length())
            .sum()
    }

    /// Vertices of the canonical form in lexicographic order.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let mut pool = Pool::default();
        for e in &self.canonicalize().edges {
            pool.id(&e.a);
            pool.id(&e.b);
        }
        let mut v = pool.pts;
        v.sort_by(|a, b| lex(a, b));
        v
    }

    pub fn max_multiplicity(&self) -> f64 {
        self.canonicalize()
            .edges
            .iter()
            .map(|e| e.theta.abs())
            .fold(0.0, f64::max)
    }

    /// `Σ H(|θ|) len` over canonical edges.
    pub fn weighted_length(&self, h: &BranchingFunction) -> f64 {
        self.canonicalize()
            .edges
            .iter()
            .map(|e| h.cost(e.theta) * e.length())
            .sum()
    }
}

/// Anisotropic `H`-mass `Σ H(|θ_e|) G_σ(b_e − a_e)` over canonical edges.
///
/// Overlaps are merged before `H` is applied.
pub fn h_mass(p: &PolyhedralOneCurrent, h: &BranchingFunction, sigma: &Anisotropy) -> Result<f64> {
    if let Some(d) = p.dim() {
        if d != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                got: d,
            });
        }
    }
    Ok(h_mass_canonical(&p.canonicalize(), h, sigma))
}

pub(crate) fn h_mass_canonical(
    c: &PolyhedralOneCurrent,
    h: &BranchingFunction,
    sigma: &Anisotropy,
) -> f64 {
    c.edges
        .iter()
        .map(|e| h.cost(e.theta) * sigma.eval(&e.vector()))
        .sum()
}
