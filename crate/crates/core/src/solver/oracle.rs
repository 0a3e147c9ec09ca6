use crate::error::{Error, Result};
use crate::solver::topology::prufer_decode;
use crate::solver::{Network, Topology, TransportProblem};

pub const ORACLE_MAX_TERMINALS: usize = 4;
pub const ORACLE_MAX_GRID: usize = 100;
pub const ORACLE_MAX_STEINER: usize = 2;

/// Flows on a labelled tree by peeling leaves: a leaf's edge carries its
/// accumulated imbalance. Returns `(from, to, flow ≥ 0)`.
fn peel_flows(n: usize, edges: &[(usize, usize)], imbalance: &[f64]) -> Vec<(usize, usize, f64)> {
    let mut alive: Vec<bool> = vec![true; edges.len()];
    let mut excess: Vec<f64> = (0..n).map(|v| imbalance.get(v).copied().unwrap_or(0.0)).collect();
    let mut out = Vec::with_capacity(edges.len());
    for _ in 0..edges.len() {
        let deg = |v: usize, alive: &[bool]| {
            edges
                .iter()
                .zip(alive)
                .filter(|(e, &a)| a && (e.0 == v || e.1 == v))
                .count()
        };
        let leaf = (0..n).find(|&v| deg(v, &alive) == 1).expect("tree has a leaf");
        let k = (0..edges.len())
            .find(|&k| alive[k] && (edges[k].0 == leaf || edges[k].1 == leaf))
            .expect("leaf edge");
        let other = if edges[k].0 == leaf { edges[k].1 } else { edges[k].0 };
        alive[k] = false;
        // The leaf needs `excess` delivered to it.
        let need = excess[leaf];
        if need >= 0.0 {
            out.push((other, leaf, need));
        } else {
            out.push((leaf, other, -need));
        }
        excess[other] += need;
        excess[leaf] = 0.0;
    }
    out
}

/// `(cost, encoding, Steiner count, edges, grid indices)`.
type Candidate = (f64, String, usize, Vec<(usize, usize)>, Vec<usize>);

/// Exact optimum over trees with at most two Steiner nodes placed on
/// `grid` points, by exhaustive evaluation.
///
/// Ties in cost are broken by the lexicographically smallest encoding of
/// the placed network.
pub fn brute_force_oracle(problem: &TransportProblem, grid: &[Vec<f64>]) -> Result<Network> {
    problem.check_data()?;
    let nt = problem.n_terminals();
    if nt > ORACLE_MAX_TERMINALS {
        return Err(Error::SizeLimit(format!(
            "oracle supports at most {ORACLE_MAX_TERMINALS} terminals, got {nt}"
        )));
    }
    if grid.len() > ORACLE_MAX_GRID {
        return Err(Error::SizeLimit(format!(
            "oracle grid has {} points, limit {ORACLE_MAX_GRID}",
            grid.len()
        )));
    }
    if let Some(p) = grid.iter().find(|p| p.len() != problem.dim()) {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            got: p.len(),
        });
    }
    let imbalance = problem.imbalance();
    let terminals = problem.positions();
    let mut best: Option<Candidate> = None;
    for s in 0..=ORACLE_MAX_STEINER.min(nt.saturating_sub(2)) {
        let n = nt + s;
        if s > 0 && grid.is_empty() {
            break;
        }
        let trees: Vec<Vec<(usize, usize)>> = if n == 2 {
            vec![vec![(0, 1)]]
        } else {
            let len = n - 2;
            let total = n.pow(len as u32);
            (0..total)
                .filter_map(|mut code| {
                    let seq: Vec<usize> = (0..len)
                        .map(|_| {
                            let d = code % n;
                            code /= n;
                            d
                        })
                        .collect();
                    let edges = prufer_decode(&seq);
                    let steiner_ok = (nt..n).all(|v| edges.iter().filter(|e| e.0 == v || e.1 == v).count() >= 3);
                    steiner_ok.then_some(edges)
                })
                .collect()
        };
        for edges in trees {
            let flows = peel_flows(n, &edges, &imbalance);
            let weights: Vec<(usize, usize, f64)> =
                flows.iter().map(|&(a, b, f)| (a, b, problem.h.cost(f))).collect();
            let placements = grid.len().pow(s as u32);
            for code in 0..placements {
                let mut c = code;
                let slots: Vec<usize> = (0..s)
                    .map(|_| {
                        let g = c % grid.len();
                        c /= grid.len();
                        g
                    })
                    .collect();
                let pos = |v: usize| -> &[f64] {
                    if v < nt {
                        &terminals[v]
                    } else {
                        &grid[slots[v - nt]]
                    }
                };
                let cost: f64 = weights
                    .iter()
                    .map(|&(a, b, w)| {
                        let d: Vec<f64> = pos(a).iter().zip(pos(b)).map(|(x, y)| x - y).collect();
                        w * problem.sigma.eval(&d)
                    })
                    .sum();
                let better = match &best {
                    None => true,
                    Some((bc, benc, ..)) => {
                        cost < *bc || (cost == *bc && encode(&flows, &slots, grid, nt) < *benc)
                    }
                };
                if better {
                    best = Some((cost, encode(&flows, &slots, grid, nt), s, edges.clone(), slots));
                }
            }
        }
    }
    let (_, _, s, edges, slots) = best.expect("at least the terminal-only trees exist");
    let topology = Topology::from_tree(s, &edges, &imbalance)?;
    let steiner: Vec<Vec<f64>> = slots.iter().map(|&g| grid[g].clone()).collect();
    Network::build(problem, &topology, &steiner)
}

fn encode(flows: &[(usize, usize, f64)], slots: &[usize], grid: &[Vec<f64>], nt: usize) -> String {
    let label = |v: usize| {
        if v < nt {
            format!("t{v}")
        } else {
            format!("{:?}", grid[slots[v - nt]])
        }
    };
    let mut parts: Vec<String> = flows
        .iter()
        .map(|&(a, b, f)| format!("{}>{}:{f:e}", label(a), label(b)))
        .collect();
    parts.sort();
    parts.join(";")
}
