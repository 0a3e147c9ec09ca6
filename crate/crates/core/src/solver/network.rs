use serde::{Deserialize, Serialize};

use crate::currents::{h_mass_canonical, is_acyclic, remove_cycles, Edge, PolyhedralOneCurrent};
use crate::error::Result;
use crate::solver::{Topology, TransportProblem};
use crate::tolerance::{COLLAPSE_TOL, MULT_TOL, SNAP_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `C` in `M(R) ≤ C · M_{H,σ}(R)`.
    pub mass_bound_c: f64,
    /// Every `|θ_e| ≤ M(μ⁺)`.
    pub linf_bound_ok: bool,
    pub acyclic: bool,
    /// Unweighted mass `M(R)`.
    pub mass: f64,
}

/// A feasible competitor: canonical acyclic current plus the tree it came
/// from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub current: PolyhedralOneCurrent,
    /// `M_{H,σ}` of `current`.
    pub cost: f64,
    pub topology: Topology,
    pub steiner_positions: Vec<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Snaps Steiner points that sit on a neighbour: nodes joined by
/// collapsed edges form clusters placed at a member terminal if there is
/// one, else at the first Steiner member.
fn snap_collapsed(topology: &Topology, all: &mut [Vec<f64>], threshold: f64) {
    let nt = topology.n_terminals();
    let n = all.len();
    let mut root: Vec<usize> = (0..n).collect();
    fn find(r: &mut [usize], x: usize) -> usize {
        let mut y = x;
        while r[y] != y {
            y = r[y];
        }
        r[x] = y;
        y
    }
    for &(a, b) in topology.edges() {
        if (a >= nt || b >= nt) && dist(&all[a], &all[b]) <= threshold {
            let (ra, rb) = (find(&mut root, a), find(&mut root, b));
            // The smaller index wins, so terminals represent their cluster.
            root[ra.max(rb)] = ra.min(rb);
        }
    }
    for v in nt..n {
        let r = find(&mut root, v);
        if r != v {
            all[v] = all[r].clone();
        }
    }
}

impl Network {
    /// Places `topology` at the given Steiner positions, drops zero-length
    /// and zero-flow edges and removes any cycle created by overlaps.
    pub fn build(problem: &TransportProblem, topology: &Topology, steiner: &[Vec<f64>]) -> Result<Self> {
        let mut all = problem.positions();
        all.extend(steiner.iter().cloned());
        snap_collapsed(topology, &mut all, COLLAPSE_TOL * problem.scale());
        let edges: Vec<Edge> = topology
            .edges()
            .iter()
            .zip(topology.flows())
            .filter(|(&(a, b), &f)| f > MULT_TOL && dist(&all[a], &all[b]) > SNAP_TOL)
            .map(|(&(a, b), &f)| Edge::new(all[a].clone(), all[b].clone(), f))
            .collect();
        let current = remove_cycles(&PolyhedralOneCurrent::new(edges)?, &problem.h)?;
        let cost = h_mass_canonical(&current, &problem.h, &problem.sigma);
        let diagnostics = Diagnostics {
            mass_bound_c: problem.mass_bound_constant(),
            linf_bound_ok: current.max_multiplicity() <= problem.target_mass() * (1.0 + 1e-12),
            acyclic: is_acyclic(&current),
            mass: current.mass(),
        };
        Ok(Self {
            current,
            cost,
            topology: topology.clone(),
            steiner_positions: all[problem.n_terminals()..].to_vec(),
            diagnostics,
        })
    }

    /// Distinct Steiner positions away from every terminal.
    pub fn effective_steiner(&self) -> usize {
        let boundary = self.current.boundary();
        let mut seen: Vec<&Vec<f64>> = Vec::new();
        for p in &self.steiner_positions {
            if boundary.atoms().iter().any(|a| &a.p == p) || seen.contains(&p) {
                continue;
            }
            seen.push(p);
        }
        seen.len()
    }
}

/// Direct matching by the north-west-corner rule on lexicographically
/// sorted atoms: one segment per matched pair.
pub fn initial_feasible(problem: &TransportProblem) -> Result<Network> {
    problem.check_data()?;
    let ns = problem.sources.len();
    let order = |v: &[crate::solver::Terminal], offset: usize| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| crate::currents::lex_order(&v[i].p, &v[j].p));
        idx.into_iter().map(|i| (i + offset, v[i].m)).collect::<Vec<_>>()
    };
    let mut src = order(&problem.sources, 0);
    let mut dst = order(&problem.targets, ns);
    let eps = 1e-12 * problem.target_mass();
    let (mut i, mut j) = (0, 0);
    let mut edges = Vec::new();
    while i < src.len() && j < dst.len() {
        let amount = src[i].1.min(dst[j].1);
        edges.push((src[i].0, dst[j].0));
        src[i].1 -= amount;
        dst[j].1 -= amount;
        // `amount` is the smaller remainder, so at least one side closes.
        if src[i].1 <= eps {
            i += 1;
        }
        if dst[j].1 <= eps {
            j += 1;
        }
    }
    let n = problem.n_terminals();
    edges.extend(joining_edges(n, &edges));
    let topology = Topology::from_tree(0, &edges, &problem.imbalance())?;
    Network::build(problem, &topology, &[])
}

/// Zero-flow edges from terminal 0's component to every other component of
/// the forest.
pub(crate) fn joining_edges(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut out = Vec::new();
    for v in 1..n {
        let (r0, rv) = (find(&mut parent, 0), find(&mut parent, v));
        if r0 != rv {
            out.push((0, v));
            parent[rv.max(r0)] = rv.min(r0);
        }
    }
    out
}
