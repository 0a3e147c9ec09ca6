use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Combinatorial type of a tree network.
///
/// Nodes `0..n_terminals` are the terminals (sources first), the rest are
/// Steiner nodes of degree at least three. Edges are oriented along the
/// flow, which conservation fixes uniquely on a tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    n_terminals: usize,
    n_steiner: usize,
    edges: Vec<(usize, usize)>,
    flows: Vec<f64>,
    encoding: String,
}

impl Topology {
    /// Orients the undirected tree `edges` and assigns flows balancing the
    /// terminal `imbalance` (`−m` at sources, `+m` at targets).
    pub fn from_tree(n_steiner: usize, edges: &[(usize, usize)], imbalance: &[f64]) -> Result<Self> {
        let n_terminals = imbalance.len();
        let n = n_terminals + n_steiner;
        if n < 2 || edges.len() != n - 1 {
            return Err(Error::InvalidProblem(format!(
                "a tree on {n} nodes needs {} edges, got {}",
                n.saturating_sub(1),
                edges.len()
            )));
        }
        let adj = adjacency(n, edges)?;
        for (v, a) in adj.iter().enumerate().skip(n_terminals) {
            if a.len() < 3 {
                return Err(Error::InvalidProblem(format!(
                    "Steiner node {v} has degree {}",
                    a.len()
                )));
            }
        }
        // BFS from terminal 0.
        let mut parent = vec![usize::MAX; n];
        let mut order = vec![0];
        parent[0] = 0;
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &w in &adj[u] {
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    order.push(w);
                }
            }
        }
        if order.len() != n {
            return Err(Error::InvalidProblem("topology is not connected".into()));
        }
        let mut sub: Vec<f64> = (0..n)
            .map(|v| if v < n_terminals { imbalance[v] } else { 0.0 })
            .collect();
        let mut oriented = Vec::with_capacity(n - 1);
        let mut flows = Vec::with_capacity(n - 1);
        for &v in order.iter().skip(1).rev() {
            let p = parent[v];
            // θ on v → p equals minus the boundary carried by v's subtree.
            let theta = -sub[v];
            sub[p] += sub[v];
            if theta >= 0.0 {
                oriented.push((v, p));
                flows.push(theta);
            } else {
                oriented.push((p, v));
                flows.push(-theta);
            }
        }
        let encoding = encode(&adj, n_terminals);
        Ok(Self {
            n_terminals,
            n_steiner,
            edges: oriented,
            flows,
            encoding,
        })
    }

    pub fn n_terminals(&self) -> usize {
        self.n_terminals
    }

    pub fn n_steiner(&self) -> usize {
        self.n_steiner
    }

    pub fn n_nodes(&self) -> usize {
        self.n_terminals + self.n_steiner
    }

    /// `(from, to)` along the flow.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Non-negative flow on each edge.
    pub fn flows(&self) -> &[f64] {
        &self.flows
    }

    /// Canonical string of the tree rooted at terminal 0 with Steiner
    /// labels forgotten; equal exactly for Steiner relabelings.
    pub fn encoding(&self) -> &str {
        &self.encoding
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a >= n || b >= n || a == b {
            return Err(Error::InvalidProblem(format!("bad edge ({a}, {b})")));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    Ok(adj)
}

fn encode(adj: &[Vec<usize>], n_terminals: usize) -> String {
    fn rec(v: usize, from: usize, adj: &[Vec<usize>], nt: usize) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&w| w != from)
            .map(|&w| rec(w, v, adj, nt))
            .collect();
        kids.sort();
        let label = if v < nt { format!("t{v}") } else { "s".to_string() };
        if kids.is_empty() {
            label
        } else {
            format!("{label}({})", kids.join(","))
        }
    }
    rec(0, usize::MAX, adj, n_terminals)
}

/// Tree with `seq.len() + 2` labelled nodes from its Prüfer sequence.
pub(crate) fn prufer_decode(seq: &[usize]) -> Vec<(usize, usize)> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Visits every Prüfer sequence over `n_terminals + n_steiner` labels in
/// which each Steiner label occurs at least twice (degree ≥ 3).
pub(crate) fn for_each_sequence(n_terminals: usize, n_steiner: usize, mut f: impl FnMut(&[usize])) {
    let n = n_terminals + n_steiner;
    if n < 2 {
        return;
    }
    let len = n - 2;
    let mut seq = Vec::with_capacity(len);
    let mut count = vec![0usize; n_steiner];
    fn rec(
        seq: &mut Vec<usize>,
        count: &mut [usize],
        len: usize,
        nt: usize,
        f: &mut dyn FnMut(&[usize]),
    ) {
        let missing: usize = count.iter().map(|&c| 2usize.saturating_sub(c)).sum();
        let left = len - seq.len();
        if missing > left {
            return;
        }
        if left == 0 {
            f(seq);
            return;
        }
        for label in 0..nt + count.len() {
            seq.push(label);
            if label >= nt {
                count[label - nt] += 1;
            }
            rec(seq, count, len, nt, f);
            if label >= nt {
                count[label - nt] -= 1;
            }
            seq.pop();
        }
    }
    rec(&mut seq, &mut count, len, n_terminals, &mut f);
}

/// All tree topologies with at most `max_steiner` Steiner nodes, one per
/// isomorphism class, ordered by `(n_steiner, encoding)`.
pub fn enumerate_topologies(imbalance: &[f64], max_steiner: usize) -> Vec<Topology> {
    let nt = imbalance.len();
    let cap = max_steiner.min(nt.saturating_sub(2));
    let mut out = Vec::new();
    for s in 0..=cap {
        let mut seen: BTreeMap<String, Topology> = BTreeMap::new();
        for_each_sequence(nt, s, |seq| {
            let edges = prufer_decode(seq);
            if let Ok(t) = Topology::from_tree(s, &edges, imbalance) {
                seen.entry(t.encoding.clone()).or_insert(t);
            }
        });
        out.extend(seen.into_values());
    }
    out
}
