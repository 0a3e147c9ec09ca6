use std::collections::VecDeque;

use crate::anisotropy::{BranchingFunction, SampleGrid};
use crate::currents::geom::{lex, Pool};
use crate::currents::{Edge, PolyhedralOneCurrent};
use crate::error::{Error, Result};

/// Support digraph of a canonical current: vertices in lexicographic
/// order, each edge oriented along the sign of its multiplicity.
struct Digraph {
    /// `out[v]` lists `(w, edge index)` sorted by `w`.
    out: Vec<Vec<(usize, usize)>>,
}

fn digraph(c: &PolyhedralOneCurrent) -> (Digraph, Vec<(usize, usize)>) {
    let mut pool = Pool::default();
    let mut verts: Vec<Vec<f64>> = Vec::new();
    for e in c.edges() {
        for p in [&e.a, &e.b] {
            if pool.find(p).is_none() {
                pool.id(p);
                verts.push(p.clone());
            }
        }
    }
    verts.sort_by(|a, b| lex(a, b));
    let index = |p: &[f64]| {
        verts
            .binary_search_by(|v| lex(v, p))
            .expect("vertex present")
    };
    let mut out = vec![Vec::new(); verts.len()];
    let mut arcs = Vec::with_capacity(c.edges().len());
    for (k, e) in c.edges().iter().enumerate() {
        let (ia, ib) = (index(&e.a), index(&e.b));
        let (u, v) = if e.theta > 0.0 { (ia, ib) } else { (ib, ia) };
        out[u].push((v, k));
        arcs.push((u, v));
    }
    for o in &mut out {
        o.sort();
    }
    (Digraph { out }, arcs)
}

impl Digraph {
    /// Shortest directed cycle through `s` using vertices `>= s`, as a list
    /// of edge indices; BFS visits neighbours in vertex order.
    fn cycle_through(&self, s: usize) -> Option<Vec<usize>> {
        let n = self.out.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[s] = true;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &(w, k) in &self.out[u] {
                if w < s {
                    continue;
                }
                if w == s {
                    let mut edges = vec![k];
                    let mut x = u;
                    while x != s {
                        let (p, pk) = parent[x].expect("tree path");
                        edges.push(pk);
                        x = p;
                    }
                    edges.reverse();
                    return Some(edges);
                }
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((u, k));
                    queue.push_back(w);
                }
            }
        }
        None
    }
}

/// A directed cycle of the support digraph carrying the largest uniform
/// amount `c = min |θ_e|` along it, or `None` when the support is acyclic.
///
/// The cycle passes through the smallest vertex lying on any cycle and is
/// a shortest one there (ties broken by vertex order).
pub fn find_cycle(p: &PolyhedralOneCurrent) -> Option<PolyhedralOneCurrent> {
    let c = p.canonicalize();
    find_cycle_indices(&c).map(|(idx, amount)| {
        let edges = idx
            .iter()
            .map(|&k| {
                let e = &c.edges()[k];
                Edge::new(e.a.clone(), e.b.clone(), amount * e.theta.signum())
            })
            .collect();
        PolyhedralOneCurrent::new(edges).expect("sub-edges of a valid current")
    })
}

fn find_cycle_indices(c: &PolyhedralOneCurrent) -> Option<(Vec<usize>, f64)> {
    let (g, _) = digraph(c);
    (0..g.out.len()).find_map(|s| {
        g.cycle_through(s).map(|idx| {
            let amount = idx
                .iter()
                .map(|&k| c.edges()[k].theta.abs())
                .fold(f64::INFINITY, f64::min);
            (idx, amount)
        })
    })
}

/// Whether the support digraph has no directed cycle.
pub fn is_acyclic(p: &PolyhedralOneCurrent) -> bool {
    find_cycle_indices(&p.canonicalize()).is_none()
}

/// Repeatedly subtract cycles at their bottleneck amount until the current
/// is acyclic. Each step zeroes at least one edge, so this terminates; the
/// boundary is untouched and, for monotone `H`, the `H`-mass cannot grow.
pub fn remove_cycles(p: &PolyhedralOneCurrent, h: &BranchingFunction) -> Result<PolyhedralOneCurrent> {
    let report = crate::anisotropy::check_branching_axioms(h, &SampleGrid::default());
    if !report.monotone_ok {
        return Err(Error::InvalidBranching(
            "cycle removal requires H non-decreasing on the positive axis".into(),
        ));
    }
    let mut c = p.canonicalize();
    while let Some((idx, amount)) = find_cycle_indices(&c) {
        let mut edges = c.edges().to_vec();
        for &k in &idx {
            let e = &mut edges[k];
            if e.theta.abs() == amount {
                e.theta = 0.0;
            } else {
                e.theta -= amount * e.theta.signum();
            }
        }
        edges.retain(|e| e.theta != 0.0);
        c = PolyhedralOneCurrent::new(edges)?.canonicalize();
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::Anisotropy;
    use crate::currents::h_mass;

    fn pts(v: &[[f64; 2]]) -> Vec<Vec<f64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn triangle_plus_path() {
        let tri = PolyhedralOneCurrent::path(&pts(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]), 1.0).unwrap();
        let path = PolyhedralOneCurrent::path(&pts(&[[5.0, 5.0], [6.0, 5.0]]), 2.0).unwrap();
        let c = find_cycle(&tri.add(&path).unwrap()).unwrap();
        assert_eq!(c.canonicalize(), tri.canonicalize());
        assert!(find_cycle(&path).is_none());
    }

    #[test]
    fn tree_is_acyclic() {
        let y = PolyhedralOneCurrent::new(vec![
            Edge::new(vec![-1.0, 0.0], vec![0.0, 1.0], 1.0),
            Edge::new(vec![1.0, 0.0], vec![0.0, 1.0], 1.0),
            Edge::new(vec![0.0, 1.0], vec![0.0, 2.0], 2.0),
        ])
        .unwrap();
        assert!(is_acyclic(&y));
    }

    #[test]
    fn figure_eight_picks_loop_with_smallest_vertex() {
        // Two triangles sharing the origin; the left one owns the smallest
        // vertex (−1, 0).
        let left = PolyhedralOneCurrent::path(&pts(&[[0.0, 0.0], [-1.0, 0.0], [-1.0, 1.0], [0.0, 0.0]]), 1.0).unwrap();
        let right = PolyhedralOneCurrent::path(&pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 0.0]]), 1.0).unwrap();
        let c = find_cycle(&left.add(&right).unwrap()).unwrap();
        assert_eq!(c.canonicalize(), left.canonicalize());
    }

    #[test]
    fn superfluous_loop_is_removed() {
        let sqrt = BranchingFunction::power(0.5).unwrap();
        let euc = Anisotropy::euclidean(2);
        let path = PolyhedralOneCurrent::path(&pts(&[[0.0, 0.0], [2.0, 0.0]]), 1.0).unwrap();
        let lp = PolyhedralOneCurrent::path(&pts(&[[2.0, 0.0], [3.0, 0.0], [3.0, 1.0], [2.0, 0.0]]), 0.5).unwrap();
        let r = path.add(&lp).unwrap();
        let out = remove_cycles(&r, &sqrt).unwrap();
        assert_eq!(out, path.canonicalize());
        assert!(h_mass(&out, &sqrt, &euc).unwrap() < h_mass(&r, &sqrt, &euc).unwrap());
        assert_eq!(remove_cycles(&path, &sqrt).unwrap(), path.canonicalize());
    }

    #[test]
    fn nonuniform_cycle_keeps_boundary() {
        // Loop with unequal multiplicities riding on a path.
        let r = PolyhedralOneCurrent::new(vec![
            Edge::new(vec![0.0, 0.0], vec![1.0, 0.0], 3.0),
            Edge::new(vec![1.0, 0.0], vec![1.0, 1.0], 1.0),
            Edge::new(vec![1.0, 1.0], vec![0.0, 0.0], 2.0),
        ])
        .unwrap();
        let out = remove_cycles(&r, &BranchingFunction::power(0.5).unwrap()).unwrap();
        assert!(is_acyclic(&out));
        assert_eq!(out.boundary(), r.boundary());
    }
}
