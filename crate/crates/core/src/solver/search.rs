use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::optimize::optimize_unchecked;
use crate::solver::topology::{enumerate_topologies, prufer_decode};
use crate::solver::{initial_feasible, Network, OptimizeOptions, Optimized, Topology, TransportProblem};
use crate::tolerance::TIE_TOL;

/// Terminal limit for exhaustive enumeration.
pub const MAX_EXHAUSTIVE_TERMINALS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    LocalSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub mode: SearchMode,
    /// Defaults to `#terminals − 2`.
    pub max_steiner: Option<usize>,
    /// One local-search run per seed.
    pub seeds: Vec<u64>,
    /// Random restarts per seed besides the north-west-corner start.
    pub restarts: usize,
    /// Improving moves allowed per local-search run.
    pub iters: usize,
    /// Cap on optimised topologies (exhaustive mode).
    pub max_evaluations: Option<usize>,
    pub optimize: OptimizeOptions,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            mode: SearchMode::Exhaustive,
            max_steiner: None,
            seeds: vec![0],
            restarts: 2,
            iters: 200,
            max_evaluations: None,
            optimize: OptimizeOptions::default(),
        }
    }
}

impl Budget {
    pub fn exhaustive() -> Self {
        Self::default()
    }

    pub fn local(seeds: Vec<u64>) -> Self {
        Self {
            mode: SearchMode::LocalSearch,
            seeds,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub best: Network,
    /// Other networks within the tie tolerance of `best`, distinct as
    /// currents.
    pub ties: Vec<Network>,
    /// The budget ran out before the search finished; `best` is the best
    /// found so far.
    pub budget_exhausted: bool,
    pub evaluated: usize,
    pub warnings: Vec<String>,
}

/// Best acyclic tree network for `problem` within `budget`.
pub fn solve(problem: &TransportProblem, budget: &Budget) -> Result<SolveResult> {
    let mut warnings = problem.validate()?;
    let n = problem.n_terminals();
    let max_steiner = budget.max_steiner.unwrap_or(n.saturating_sub(2));
    let (mut candidates, evaluated, exhausted) = match budget.mode {
        SearchMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_TERMINALS {
                return Err(Error::SizeLimit(format!(
                    "exhaustive mode supports at most {MAX_EXHAUSTIVE_TERMINALS} terminals, got {n}"
                )));
            }
            exhaustive(problem, budget, max_steiner)?
        }
        SearchMode::LocalSearch => local(problem, budget, max_steiner)?,
    };
    if exhausted {
        warnings.push("budget exhausted; returning best network found".into());
    }
    candidates.sort_by(rank);
    let best = candidates.remove(0);
    let slack = TIE_TOL * best.cost.abs().max(1.0);
    let mut ties: Vec<Network> = Vec::new();
    for c in candidates {
        if c.cost > best.cost + slack {
            break;
        }
        if !same_current(&c, &best) && !ties.iter().any(|t| same_current(t, &c)) {
            ties.push(c);
        }
    }
    Ok(SolveResult {
        best,
        ties,
        budget_exhausted: exhausted,
        evaluated,
        warnings,
    })
}

/// Cost, then fewer effective Steiner points, then the topology encoding.
fn rank(a: &Network, b: &Network) -> std::cmp::Ordering {
    let slack = TIE_TOL * a.cost.abs().max(b.cost.abs()).max(1.0);
    if (a.cost - b.cost).abs() > slack {
        return a.cost.total_cmp(&b.cost);
    }
    a.effective_steiner()
        .cmp(&b.effective_steiner())
        .then_with(|| a.topology.n_steiner().cmp(&b.topology.n_steiner()))
        .then_with(|| a.topology.encoding().cmp(b.topology.encoding()))
}

fn same_current(a: &Network, b: &Network) -> bool {
    let (x, y) = (a.current.edges(), b.current.edges());
    let close = |p: &[f64], q: &[f64]| p.iter().zip(q).all(|(s, t)| (s - t).abs() <= 1e-7);
    x.len() == y.len()
        && x.iter()
            .zip(y)
            .all(|(e, f)| close(&e.a, &f.a) && close(&e.b, &f.b) && (e.theta - f.theta).abs() <= 1e-9)
}

fn exhaustive(
    problem: &TransportProblem,
    budget: &Budget,
    max_steiner: usize,
) -> Result<(Vec<Network>, usize, bool)> {
    let mut topologies = enumerate_topologies(&problem.imbalance(), max_steiner);
    let mut exhausted = false;
    if let Some(cap) = budget.max_evaluations {
        if topologies.len() > cap {
            topologies.truncate(cap.max(1));
            exhausted = true;
        }
    }
    let networks = topologies
        .par_iter()
        .map(|t| {
            let o = optimize_unchecked(t, problem, &budget.optimize)?;
            Network::build(problem, t, &o.positions)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = networks.len();
    Ok((networks, n, exhausted))
}

/// Undirected tree over terminals `0..nt` and Steiner nodes `nt..`.
#[derive(Clone, Debug)]
struct Tree {
    nt: usize,
    ns: usize,
    edges: Vec<(usize, usize)>,
}

impl Tree {
    fn from_topology(t: &Topology) -> Self {
        Self {
            nt: t.n_terminals(),
            ns: t.n_steiner(),
            edges: t.edges().to_vec(),
        }
    }

    fn n(&self) -> usize {
        self.nt + self.ns
    }

    fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort();
        out
    }

    fn remove_edge(&mut self, a: usize, b: usize) {
        self.edges.retain(|&(x, y)| !((x == a && y == b) || (x == b && y == a)));
    }

    fn add_steiner(&mut self) -> usize {
        self.ns += 1;
        self.n() - 1
    }

    /// Deletes node `v` (edges already detached) by moving the last Steiner
    /// node into its slot.
    fn drop_node(&mut self, v: usize) {
        let last = self.n() - 1;
        for e in &mut self.edges {
            if e.0 == last {
                e.0 = v;
            }
            if e.1 == last {
                e.1 = v;
            }
        }
        self.ns -= 1;
    }

    /// Removes Steiner leaves and splices out Steiner nodes of degree two.
    fn normalize(&mut self) {
        loop {
            let Some(v) = (self.nt..self.n()).find(|&v| self.neighbours(v).len() <= 2) else {
                return;
            };
            let nb = self.neighbours(v);
            for &w in &nb {
                self.remove_edge(v, w);
            }
            if nb.len() == 2 {
                self.edges.push((nb[0], nb[1]));
            }
            self.drop_node(v);
        }
    }

    fn contract(&mut self, s: usize, u: usize) {
        self.remove_edge(s, u);
        for e in &mut self.edges {
            if e.0 == s {
                e.0 = u;
            }
            if e.1 == s {
                e.1 = u;
            }
        }
        self.drop_node(s);
    }

    /// Candidate neighbours: insertions, reroutes of terminal leaves and
    /// contractions. Collapsed contractions come first.
    fn moves(&self, collapsed: &[(usize, usize)]) -> Vec<Tree> {
        let mut out = Vec::new();
        for &(s, u) in collapsed {
            let mut t = self.clone();
            t.contract(s, u);
            out.push(t);
        }
        let n = self.n();
        for v in 0..n {
            let nb = self.neighbours(v);
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    let mut t = self.clone();
                    t.remove_edge(v, nb[i]);
                    t.remove_edge(v, nb[j]);
                    let s = t.add_steiner();
                    t.edges.extend([(v, s), (s, nb[i]), (s, nb[j])]);
                    out.push(t);
                }
            }
        }
        for leaf in 0..self.nt {
            let nb = self.neighbours(leaf);
            if nb.len() != 1 {
                continue;
            }
            let mut base = self.clone();
            base.remove_edge(leaf, nb[0]);
            for w in 0..n {
                if w != leaf && w != nb[0] {
                    let mut t = base.clone();
                    t.edges.push((leaf, w));
                    out.push(t);
                }
            }
            for &(a, b) in &base.edges {
                let mut t = base.clone();
                t.remove_edge(a, b);
                let s = t.add_steiner();
                t.edges.extend([(a, s), (s, b), (s, leaf)]);
                out.push(t);
            }
        }
        for s in self.nt..n {
            for u in self.neighbours(s) {
                let mut t = self.clone();
                t.contract(s, u);
                out.push(t);
            }
        }
        for t in &mut out {
            t.normalize();
        }
        out
    }
}

struct Evaluator<'a> {
    problem: &'a TransportProblem,
    opts: OptimizeOptions,
    imbalance: Vec<f64>,
    cache: HashMap<String, (Topology, Optimized)>,
}

impl Evaluator<'_> {
    fn eval(&mut self, tree: &Tree) -> Result<(Topology, Optimized)> {
        let t = Topology::from_tree(tree.ns, &tree.edges, &self.imbalance)?;
        if let Some(hit) = self.cache.get(t.encoding()) {
            return Ok(hit.clone());
        }
        let o = optimize_unchecked(&t, self.problem, &self.opts)?;
        self.cache.insert(t.encoding().to_string(), (t.clone(), o.clone()));
        Ok((t, o))
    }
}

fn random_tree(nt: usize, rng: &mut ChaCha8Rng) -> Tree {
    if nt == 2 {
        return Tree {
            nt,
            ns: 0,
            edges: vec![(0, 1)],
        };
    }
    let seq: Vec<usize> = (0..nt - 2).map(|_| rng.random_range(0..nt)).collect();
    Tree {
        nt,
        ns: 0,
        edges: prufer_decode(&seq),
    }
}

/// Returns the final tree, its evaluation, and whether the move budget
/// ran out.
fn descend(
    ev: &mut Evaluator,
    mut tree: Tree,
    max_steiner: usize,
    iters: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Topology, Optimized, bool)> {
    let (mut topo, mut cur) = ev.eval(&tree)?;
    // Cached evaluations may use another Steiner labelling; follow theirs.
    tree = Tree::from_topology(&topo);
    for _ in 0..iters {
        let mut moves = tree.moves(&cur.collapsed);
        let ncol = cur.collapsed.len().min(moves.len());
        moves[ncol..].shuffle(rng);
        let mut improved = false;
        for m in moves {
            if m.ns > max_steiner {
                continue;
            }
            let (t, o) = ev.eval(&m)?;
            if o.cost < cur.cost - 1e-12 * cur.cost.abs().max(1.0) {
                tree = Tree::from_topology(&t);
                topo = t;
                cur = o;
                improved = true;
                break;
            }
        }
        if !improved {
            return Ok((topo, cur, false));
        }
    }
    Ok((topo, cur, true))
}

fn local(problem: &TransportProblem, budget: &Budget, max_steiner: usize) -> Result<(Vec<Network>, usize, bool)> {
    let nt = problem.n_terminals();
    let start = initial_feasible(problem)?;
    let nw = Tree::from_topology(&start.topology);
    let mut ev = Evaluator {
        problem,
        opts: OptimizeOptions {
            max_iters: budget.optimize.max_iters.min(1500),
            tol: budget.optimize.tol.max(1e-11),
        },
        imbalance: problem.imbalance(),
        cache: HashMap::new(),
    };
    let mut found: Vec<Topology> = Vec::new();
    let mut exhausted = false;
    let seeds = if budget.seeds.is_empty() { vec![0] } else { budget.seeds.clone() };
    for &seed in &seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in 0..=budget.restarts {
            let tree = if r == 0 { nw.clone() } else { random_tree(nt, &mut rng) };
            let (t, _, out) = descend(&mut ev, tree, max_steiner, budget.iters, &mut rng)?;
            exhausted |= out;
            found.push(t);
        }
    }
    let evaluated = ev.cache.len();
    // Polish the local optima with full optimiser settings.
    let mut networks = Vec::new();
    for t in found {
        let o = optimize_unchecked(&t, problem, &budget.optimize)?;
        networks.push(Network::build(problem, &t, &o.positions)?);
    }
    networks.push(start);
    Ok((networks, evaluated, exhausted))
}
