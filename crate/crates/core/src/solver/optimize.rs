use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::anisotropy::{check_convexity, Anisotropy, AnisotropyRep, DirectionGrid};
use crate::error::{Error, Result};
use crate::lp::Lp;
use crate::solver::{Topology, TransportProblem};
use crate::tolerance::COLLAPSE_TOL;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    /// Relative cost decrease below which iteration stops.
    pub tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 4000,
            tol: 1e-13,
        }
    }
}

/// Optimised Steiner positions for one topology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimized {
    /// One point per Steiner node, in node order.
    pub positions: Vec<Vec<f64>>,
    pub cost: f64,
    /// `(steiner node, neighbour)` pairs closer than the collapse
    /// threshold; candidates for contraction.
    pub collapsed: Vec<(usize, usize)>,
}

/// Minimises `Σ_e H(θ_e) G_σ(x_u − x_v)` over the Steiner positions of
/// `topology`, terminals fixed.
///
/// Polygonal gauges are solved exactly as a linear program, constant ones
/// by Weiszfeld-type reweighting finished with Newton steps; other convex gauges use normalised
/// subgradient steps `c/√k` with iterate averaging.
pub fn optimize_positions(
    topology: &Topology,
    problem: &TransportProblem,
    opts: &OptimizeOptions,
) -> Result<Optimized> {
    if !problem.sigma.is_convex_by_construction() {
        let r = check_convexity(&problem.sigma, &DirectionGrid::Circle { count: 360 });
        if !r.convex {
            return Err(Error::NonConvex {
                defect: r.worst_defect,
            });
        }
    }
    if topology.n_terminals() != problem.n_terminals() {
        return Err(Error::InvalidProblem(format!(
            "topology has {} terminals, problem {}",
            topology.n_terminals(),
            problem.n_terminals()
        )));
    }
    optimize_unchecked(topology, problem, opts)
}

pub(crate) fn optimize_unchecked(
    topology: &Topology,
    problem: &TransportProblem,
    opts: &OptimizeOptions,
) -> Result<Optimized> {
    let inst = Instance::new(topology, problem);
    let positions = if topology.n_steiner() == 0 {
        Vec::new()
    } else {
        match problem.sigma.rep() {
            AnisotropyRep::Polygonal(_) => inst.solve_lp(&problem.sigma)?,
            AnisotropyRep::Constant(_) => inst.weiszfeld(opts),
            AnisotropyRep::Functional(_) => inst.subgradient(&problem.sigma, opts),
        }
    };
    let all = inst.with_terminals(&positions);
    let cost = inst.cost(&problem.sigma, &all);
    let threshold = COLLAPSE_TOL * inst.scale;
    let mut collapsed = Vec::new();
    for &(a, b) in topology.edges() {
        let (s, other) = if a >= inst.nt { (a, b) } else if b >= inst.nt { (b, a) } else { continue };
        if dist(&all[s], &all[other]) <= threshold {
            collapsed.push((s, other));
        }
    }
    collapsed.sort();
    Ok(Optimized {
        positions,
        cost,
        collapsed,
    })
}

struct Instance {
    nt: usize,
    ns: usize,
    dim: usize,
    terminals: Vec<Vec<f64>>,
    /// `(u, v, H(θ))` for edges with positive weight.
    arcs: Vec<(usize, usize, f64)>,
    scale: f64,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl Instance {
    fn new(t: &Topology, p: &TransportProblem) -> Self {
        let arcs = t
            .edges()
            .iter()
            .zip(t.flows())
            .map(|(&(u, v), &f)| (u, v, p.h.cost(f)))
            .filter(|a| a.2 > 0.0)
            .collect();
        Self {
            nt: t.n_terminals(),
            ns: t.n_steiner(),
            dim: p.dim(),
            terminals: p.positions(),
            arcs,
            scale: p.scale(),
        }
    }

    fn with_terminals(&self, steiner: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.terminals.iter().chain(steiner).cloned().collect()
    }

    fn cost(&self, sigma: &Anisotropy, all: &[Vec<f64>]) -> f64 {
        self.arcs
            .iter()
            .map(|&(u, v, c)| {
                let d: Vec<f64> = all[u].iter().zip(&all[v]).map(|(x, y)| x - y).collect();
                c * sigma.eval(&d)
            })
            .sum()
    }

    /// Deterministic start: terminal centroid plus a small node-dependent
    /// offset so no two Steiner nodes coincide.
    fn start(&self) -> Vec<Vec<f64>> {
        let mut c = vec![0.0; self.dim];
        for p in &self.terminals {
            for (ci, x) in c.iter_mut().zip(p) {
                *ci += x / self.nt as f64;
            }
        }
        (0..self.ns)
            .map(|i| {
                c.iter()
                    .enumerate()
                    .map(|(k, x)| x + 1e-2 * self.scale * ((i + 1) as f64 * (k + 1) as f64 * 1.3).sin())
                    .collect()
            })
            .collect()
    }

    fn solve_lp(&self, sigma: &Anisotropy) -> Result<Vec<Vec<f64>>> {
        let normals = sigma.polygon().expect("polygonal gauge").support_normals().to_vec();
        let mut lp = Lp::minimize();
        let coords: Vec<[usize; 2]> = (0..self.ns).map(|_| [lp.free(0.0), lp.free(0.0)]).collect();
        for &(u, v, c) in &self.arcs {
            let t = lp.pos(c);
            // t ≥ ⟨n, x_u − x_v⟩ for every facet normal n.
            for n in &normals {
                let mut terms = vec![(t, 1.0)];
                let mut rhs = 0.0;
                for (node, sign) in [(u, -1.0), (v, 1.0)] {
                    if node < self.nt {
                        let p = &self.terminals[node];
                        rhs -= sign * (n.x * p[0] + n.y * p[1]);
                    } else {
                        let [x, y] = coords[node - self.nt];
                        terms.push((x, sign * n.x));
                        terms.push((y, sign * n.y));
                    }
                }
                lp.ge(&terms, rhs);
            }
        }
        let sol = lp.solve()?;
        Ok(coords
            .iter()
            .map(|[x, y]| vec![sol.values[*x], sol.values[*y]])
            .collect())
    }

    /// Reweighted least squares: each step minimises
    /// `Σ w_e |x_u − x_v|²` with `w_e = H(θ_e) / |x_u − x_v|`, a
    /// majorisation of the Euclidean objective.
    fn weiszfeld(&self, opts: &OptimizeOptions) -> Vec<Vec<f64>> {
        let euc = Anisotropy::euclidean(self.dim);
        let mut x = self.start();
        let eps = 1e-14 * self.scale;
        let mut prev = self.cost(&euc, &self.with_terminals(&x));
        for _ in 0..opts.max_iters {
            let all = self.with_terminals(&x);
            let mut a = DMatrix::<f64>::zeros(self.ns, self.ns);
            let mut b = DMatrix::<f64>::zeros(self.ns, self.dim);
            for &(u, v, c) in &self.arcs {
                let w = c / dist(&all[u], &all[v]).max(eps);
                for (p, q) in [(u, v), (v, u)] {
                    if p < self.nt {
                        continue;
                    }
                    let i = p - self.nt;
                    a[(i, i)] += w;
                    if q < self.nt {
                        for k in 0..self.dim {
                            b[(i, k)] += w * all[q][k];
                        }
                    } else {
                        a[(i, q - self.nt)] -= w;
                    }
                }
            }
            // Tiny proximal term keeps Steiner-only components well posed.
            let rho = 1e-13 * a.diagonal().max().max(1.0);
            for i in 0..self.ns {
                a[(i, i)] += rho;
                for k in 0..self.dim {
                    b[(i, k)] += rho * x[i][k];
                }
            }
            let Some(sol) = a.lu().solve(&b) else { break };
            let next: Vec<Vec<f64>> = (0..self.ns)
                .map(|i| (0..self.dim).map(|k| sol[(i, k)]).collect())
                .collect();
            let cost = self.cost(&euc, &self.with_terminals(&next));
            let step = x
                .iter()
                .zip(&next)
                .map(|(p, q)| dist(p, q))
                .fold(0.0, f64::max);
            if cost <= prev {
                x = next;
            }
            let done = prev - cost <= opts.tol * prev && step <= 1e-13 * self.scale;
            prev = prev.min(cost);
            if done || step == 0.0 {
                break;
            }
        }
        self.newton_polish(x, &euc)
    }

    /// Damped Newton steps on the Euclidean cost with backtracking.
    /// Weiszfeld crawls when the optimum sits close to a terminal; Newton
    /// converges quadratically there as long as no edge is exactly zero.
    fn newton_polish(&self, mut x: Vec<Vec<f64>>, euc: &Anisotropy) -> Vec<Vec<f64>> {
        let (d, n) = (self.dim, self.ns * self.dim);
        let eps = 1e-14 * self.scale;
        let mut cost = self.cost(euc, &self.with_terminals(&x));
        for _ in 0..50 {
            let all = self.with_terminals(&x);
            let mut g = DMatrix::<f64>::zeros(n, 1);
            let mut hess = DMatrix::<f64>::zeros(n, n);
            for &(u, v, c) in &self.arcs {
                let r = dist(&all[u], &all[v]);
                if r <= eps {
                    continue;
                }
                let e: Vec<f64> = (0..d).map(|k| (all[u][k] - all[v][k]) / r).collect();
                let block = |i: usize, j: usize| c * (f64::from(u8::from(i == j)) - e[i] * e[j]) / r;
                let ends = [(u, 1.0), (v, -1.0)];
                for &(p, sp) in &ends {
                    if p < self.nt {
                        continue;
                    }
                    let bp = (p - self.nt) * d;
                    for k in 0..d {
                        g[bp + k] += sp * c * e[k];
                    }
                    for &(q, sq) in &ends {
                        if q < self.nt {
                            continue;
                        }
                        let bq = (q - self.nt) * d;
                        for i in 0..d {
                            for j in 0..d {
                                hess[(bp + i, bq + j)] += sp * sq * block(i, j);
                            }
                        }
                    }
                }
            }
            let damp = 1e-12 * hess.diagonal().max().max(1.0);
            for i in 0..n {
                hess[(i, i)] += damp;
            }
            let Some(step) = hess.lu().solve(&g) else { break };
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..40 {
                let trial: Vec<Vec<f64>> = (0..self.ns)
                    .map(|i| (0..d).map(|k| x[i][k] - t * step[i * d + k]).collect())
                    .collect();
                let c = self.cost(euc, &self.with_terminals(&trial));
                if c < cost {
                    accepted = Some((trial, c));
                    break;
                }
                t *= 0.5;
            }
            let Some((trial, c)) = accepted else { break };
            let moved = t * step.amax();
            x = trial;
            cost = c;
            if moved <= 1e-15 * self.scale {
                break;
            }
        }
        x
    }

    fn gradient(&self, sigma: &Anisotropy, all: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut g = vec![vec![0.0; self.dim]; self.ns];
        for &(u, v, c) in &self.arcs {
            let d: Vec<f64> = all[u].iter().zip(&all[v]).map(|(x, y)| x - y).collect();
            let r = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r == 0.0 {
                // Zero is a subgradient of the norm at its kink.
                continue;
            }
            let h = 1e-6 * r;
            let grad: Vec<f64> = (0..self.dim)
                .map(|k| {
                    let mut p = d.clone();
                    let mut m = d.clone();
                    p[k] += h;
                    m[k] -= h;
                    (sigma.eval(&p) - sigma.eval(&m)) / (2.0 * h)
                })
                .collect();
            for (node, sign) in [(u, 1.0), (v, -1.0)] {
                if node >= self.nt {
                    for k in 0..self.dim {
                        g[node - self.nt][k] += sign * c * grad[k];
                    }
                }
            }
        }
        g
    }

    fn subgradient(&self, sigma: &Anisotropy, opts: &OptimizeOptions) -> Vec<Vec<f64>> {
        let mut x = self.start();
        let mut avg = x.clone();
        let mut best = x.clone();
        let mut best_cost = self.cost(sigma, &self.with_terminals(&x));
        let mut checkpoint = best_cost;
        let c0 = 0.1 * self.scale;
        let iters = opts.max_iters.max(100) * 5;
        for k in 1..=iters {
            let g = self.gradient(sigma, &self.with_terminals(&x));
            let gn = g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
            if gn == 0.0 {
                break;
            }
            let step = c0 / (k as f64).sqrt() / gn;
            for (xi, gi) in x.iter_mut().zip(&g) {
                for (a, b) in xi.iter_mut().zip(gi) {
                    *a -= step * b;
                }
            }
            let w = 1.0 / k as f64;
            for (ai, xi) in avg.iter_mut().zip(&x) {
                for (a, b) in ai.iter_mut().zip(xi) {
                    *a += w * (b - *a);
                }
            }
            for cand in [&x, &avg] {
                let c = self.cost(sigma, &self.with_terminals(cand));
                if c < best_cost {
                    best_cost = c;
                    best = cand.clone();
                }
            }
            if k % 100 == 0 {
                if checkpoint - best_cost <= 1e-8 * checkpoint {
                    break;
                }
                checkpoint = best_cost;
            }
        }
        best
    }
}
