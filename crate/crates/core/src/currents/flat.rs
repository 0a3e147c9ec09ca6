use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::currents::geom::{dist, dot, lerp, sub};
use crate::currents::{PolyhedralOneCurrent, ZeroCurrent};
use crate::error::{Error, Result};
use crate::lp::Lp;
use crate::tolerance::SNAP_TOL;

/// Flat distance `𝔽(S − T)` between 0-currents.
///
/// Positive and negative atoms of `S − T` are either joined by straight
/// fillings at Euclidean cost per unit weight or paid for directly at cost
/// one per unit; the linear program over these choices is exact for
/// 0-current differences.
pub fn flat_distance_zero(s: &ZeroCurrent, t: &ZeroCurrent) -> Result<f64> {
    let d = s.sub(t);
    let (pos, neg) = d.split();
    if pos.is_empty() && neg.is_empty() {
        return Ok(0.0);
    }
    let mut lp = Lp::minimize();
    let mut out_terms: Vec<Vec<(usize, f64)>> = vec![Vec::new(); pos.len()];
    let mut in_terms: Vec<Vec<(usize, f64)>> = vec![Vec::new(); neg.len()];
    for (i, p) in pos.iter().enumerate() {
        for (j, q) in neg.iter().enumerate() {
            let v = lp.pos(dist(&p.p, &q.p));
            out_terms[i].push((v, 1.0));
            in_terms[j].push((v, 1.0));
        }
        let r = lp.pos(1.0);
        out_terms[i].push((r, 1.0));
    }
    for terms in in_terms.iter_mut() {
        let r = lp.pos(1.0);
        terms.push((r, 1.0));
    }
    for (i, p) in pos.iter().enumerate() {
        lp.eq(&out_terms[i], p.w);
    }
    for (j, q) in neg.iter().enumerate() {
        lp.eq(&in_terms[j], q.w);
    }
    Ok(lp.solve()?.objective)
}

/// How to split each grid square into two triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    /// Lower-left to upper-right.
    Rising,
    /// Upper-left to lower-right.
    Falling,
}

/// A planar triangulation with its edge list; triangles are stored
/// counterclockwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMesh", into = "RawMesh")]
pub struct TriMesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<(usize, usize)>,
}

#[derive(Clone, Serialize, Deserialize)]
struct RawMesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
}

impl TryFrom<RawMesh> for TriMesh {
    type Error = Error;
    fn try_from(r: RawMesh) -> Result<Self> {
        Self::new(r.vertices, r.triangles)
    }
}

impl From<TriMesh> for RawMesh {
    fn from(m: TriMesh) -> Self {
        RawMesh {
            vertices: m.vertices,
            triangles: m.triangles,
        }
    }
}

impl TriMesh {
    pub fn new(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut tris = Vec::with_capacity(triangles.len());
        for t in triangles {
            if t.iter().any(|&i| i >= vertices.len()) {
                return Err(Error::NonConformingMesh("triangle index out of range".into()));
            }
            let [a, b, c] = t.map(|i| vertices[i]);
            let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
            if area2.abs() <= 1e-15 {
                return Err(Error::NonConformingMesh("degenerate triangle".into()));
            }
            tris.push(if area2 > 0.0 { t } else { [t[0], t[2], t[1]] });
        }
        let mut edges: Vec<(usize, usize)> = tris
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        edges.sort();
        edges.dedup();
        Ok(Self {
            vertices,
            triangles: tris,
            edges,
        })
    }

    /// Regular `nx × ny` grid on `[x0, x1] × [y0, y1]`, the diagonal of
    /// cell `(i, j)` chosen by `diag(i, j)`.
    pub fn grid_with(
        lo: [f64; 2],
        hi: [f64; 2],
        nx: usize,
        ny: usize,
        diag: impl Fn(usize, usize) -> Diagonal,
    ) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::NonConformingMesh("empty grid".into()));
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push([
                    lo[0] + (hi[0] - lo[0]) * i as f64 / nx as f64,
                    lo[1] + (hi[1] - lo[1]) * j as f64 / ny as f64,
                ]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                match diag(i, j) {
                    Diagonal::Rising => {
                        triangles.push([a, b, c]);
                        triangles.push([a, c, d]);
                    }
                    Diagonal::Falling => {
                        triangles.push([a, b, d]);
                        triangles.push([b, c, d]);
                    }
                }
            }
        }
        Self::new(vertices, triangles)
    }

    pub fn grid(lo: [f64; 2], hi: [f64; 2], nx: usize, ny: usize) -> Result<Self> {
        Self::grid_with(lo, hi, nx, ny, |_, _| Diagonal::Rising)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn vertex_at(&self, p: &[f64]) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| dist(v, p) <= SNAP_TOL)
    }

    fn area(&self, t: &[usize; 3]) -> f64 {
        let [a, b, c] = t.map(|i| self.vertices[i]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    }

    /// Coefficients of a planar current on the mesh edges, with edge
    /// `(i, j)`, `i < j`, oriented from `i` to `j`.
    fn chain(&self, p: &PolyhedralOneCurrent) -> Result<BTreeMap<(usize, usize), f64>> {
        let mut out = BTreeMap::new();
        for e in p.canonicalize().edges() {
            let d = sub(&e.b, &e.a);
            let dd = dot(&d, &d);
            let mut on: Vec<(f64, usize)> = Vec::new();
            for (k, v) in self.vertices.iter().enumerate() {
                let t = dot(&sub(v, &e.a), &d) / dd;
                if (-1e-12..=1.0 + 1e-12).contains(&t) && dist(v, &lerp(&e.a, &e.b, t)) <= SNAP_TOL {
                    on.push((t, k));
                }
            }
            on.sort_by(|x, y| x.0.total_cmp(&y.0));
            let ends_ok = on.first().is_some_and(|f| Some(f.1) == self.vertex_at(&e.a))
                && on.last().is_some_and(|l| Some(l.1) == self.vertex_at(&e.b));
            if !ends_ok {
                return Err(Error::NonConformingMesh(format!(
                    "edge {:?} -> {:?} does not end at mesh vertices",
                    e.a, e.b
                )));
            }
            for w in on.windows(2) {
                let (i, j) = (w[0].1, w[1].1);
                let key = (i.min(j), i.max(j));
                if self.edges.binary_search(&key).is_err() {
                    return Err(Error::NonConformingMesh(format!(
                        "segment between mesh vertices {i} and {j} is not a mesh edge"
                    )));
                }
                let s = if i < j { e.theta } else { -e.theta };
                *out.entry(key).or_insert(0.0) += s;
            }
        }
        Ok(out)
    }
}

/// Upper bound for `𝔽(P − Q)`: the LP `min Σ len|R_e| + Σ area|S_t|` over
/// mesh 1-chains `R` and 2-chains `S` with `P − Q = R + ∂S`.
pub fn flat_distance_one_upper(
    p: &PolyhedralOneCurrent,
    q: &PolyhedralOneCurrent,
    mesh: &TriMesh,
) -> Result<f64> {
    let diff = p.sub(q)?;
    if diff.dim().is_some_and(|d| d != 2) {
        return Err(Error::Unsupported("mesh flat norm is planar".into()));
    }
    let target = mesh.chain(&diff)?;
    if target.values().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let mut lp = Lp::minimize();
    let ne = mesh.edges.len();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ne];
    for (k, &(i, j)) in mesh.edges.iter().enumerate() {
        let len = dist(&mesh.vertices[i], &mesh.vertices[j]);
        let rp = lp.pos(len);
        let rm = lp.pos(len);
        rows[k].push((rp, 1.0));
        rows[k].push((rm, -1.0));
    }
    for t in &mesh.triangles {
        let area = mesh.area(t);
        let sp = lp.pos(area);
        let sm = lp.pos(area);
        for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let key = (i.min(j), i.max(j));
            let k = mesh.edges.binary_search(&key).expect("triangle edge");
            let s = if i < j { 1.0 } else { -1.0 };
            rows[k].push((sp, s));
            rows[k].push((sm, -s));
        }
    }
    for (k, row) in rows.iter().enumerate() {
        lp.eq(row, target.get(&mesh.edges[k]).copied().unwrap_or(0.0));
    }
    Ok(lp.solve()?.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::currents::Edge;

    #[test]
    fn zero_current_examples() {
        let a = ZeroCurrent::dirac(vec![0.0, 0.0], 1.0).unwrap();
        let b = ZeroCurrent::dirac(vec![0.3, 0.4], 1.0).unwrap();
        assert!((flat_distance_zero(&a, &b).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(flat_distance_zero(&a, &a).unwrap(), 0.0);
        let far = ZeroCurrent::dirac(vec![10.0, 0.0], 1.0).unwrap();
        assert!((flat_distance_zero(&a, &far).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unequal_masses_pay_the_excess() {
        let a = ZeroCurrent::dirac(vec![0.0, 0.0], 3.0).unwrap();
        let b = ZeroCurrent::dirac(vec![0.5, 0.0], 1.0).unwrap();
        // Move one unit for 0.5, pay the remaining 2 units directly.
        assert!((flat_distance_zero(&a, &b).unwrap() - 2.5).abs() < 1e-12);
    }

    fn path(v: &[[f64; 2]]) -> PolyhedralOneCurrent {
        PolyhedralOneCurrent::path(&v.iter().map(|p| p.to_vec()).collect::<Vec<_>>(), 1.0).unwrap()
    }

    #[test]
    fn unit_square_fillings() {
        let mesh = TriMesh::grid([0.0, 0.0], [1.0, 1.0], 1, 1).unwrap();
        let lower = path(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]);
        let upper = path(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        // The two halves of the boundary differ by the boundary of the
        // square, which is filled at cost equal to its area.
        assert!((flat_distance_one_upper(&lower, &upper, &mesh).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(flat_distance_one_upper(&lower, &lower, &mesh).unwrap(), 0.0);
        // Parallel opposite sides: filling the square costs 1 plus the two
        // vertical sides, so paying the mass 2 directly is optimal.
        let bottom = path(&[[0.0, 0.0], [1.0, 0.0]]);
        let top = path(&[[0.0, 1.0], [1.0, 1.0]]);
        assert!((flat_distance_one_upper(&bottom, &top, &mesh).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn staircase_area_bound() {
        for k in 1..=4 {
            let mut pts = vec![[0.0, 0.0]];
            for i in 0..k {
                let x = (i + 1) as f64 / k as f64;
                pts.push([x, i as f64 / k as f64]);
                pts.push([x, x]);
            }
            let stairs = path(&pts);
            let diag = path(&[[0.0, 0.0], [1.0, 1.0]]);
            let mesh = TriMesh::grid([0.0, 0.0], [1.0, 1.0], k, k).unwrap();
            let v = flat_distance_one_upper(&stairs, &diag, &mesh).unwrap();
            assert!((v - 0.5 / k as f64).abs() < 1e-9, "k={k} v={v}");
        }
    }

    #[test]
    fn non_conforming_is_rejected() {
        let mesh = TriMesh::grid([0.0, 0.0], [1.0, 1.0], 1, 1).unwrap();
        let p = PolyhedralOneCurrent::new(vec![Edge::new(vec![0.0, 0.0], vec![0.5, 0.0], 1.0)]).unwrap();
        assert!(matches!(
            flat_distance_one_upper(&p, &PolyhedralOneCurrent::empty(), &mesh),
            Err(Error::NonConformingMesh(_))
        ));
    }
}
