use serde::{Deserialize, Serialize};

use crate::anisotropy::{
    check_branching_axioms, check_convexity, Anisotropy, BranchingFunction, DirectionGrid, SampleGrid,
};
use crate::currents::ZeroCurrent;
use crate::error::{Error, Result};

/// A point mass of the source or target measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub p: Vec<f64>,
    pub m: f64,
}

/// Atomic branched transport problem: find `R` with `∂R = μ⁺ − μ⁻`
/// minimising `Σ H(|θ|) G_σ`.
///
/// Terminals are indexed sources first, then targets.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportProblem {
    pub sources: Vec<Terminal>,
    pub targets: Vec<Terminal>,
    #[serde(rename = "H")]
    pub h: BranchingFunction,
    pub sigma: Anisotropy,
}

/// Relative slack accepted on the mass balance.
const BALANCE_TOL: f64 = 1e-12;

impl TransportProblem {
    pub fn new(
        sources: Vec<(Vec<f64>, f64)>,
        targets: Vec<(Vec<f64>, f64)>,
        h: BranchingFunction,
        sigma: Anisotropy,
    ) -> Result<Self> {
        let wrap = |v: Vec<(Vec<f64>, f64)>| v.into_iter().map(|(p, m)| Terminal { p, m }).collect();
        let problem = Self {
            sources: wrap(sources),
            targets: wrap(targets),
            h,
            sigma,
        };
        problem.check_data()?;
        Ok(problem)
    }

    /// Structural checks: non-empty sides, positive finite masses,
    /// consistent dimensions, equal total masses.
    pub fn check_data(&self) -> Result<()> {
        if self.sources.is_empty() || self.targets.is_empty() {
            return Err(Error::InvalidProblem("need at least one source and one target".into()));
        }
        let dim = self.sigma.dim();
        for t in self.sources.iter().chain(&self.targets) {
            if t.p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.p.len(),
                });
            }
            if !t.p.iter().all(|x| x.is_finite()) {
                return Err(Error::InvalidProblem("non-finite terminal coordinate".into()));
            }
            if !(t.m.is_finite() && t.m > 0.0) {
                return Err(Error::InvalidProblem(format!("terminal mass {} must be positive", t.m)));
            }
        }
        let (s, t) = (self.source_mass(), self.target_mass());
        if (s - t).abs() > BALANCE_TOL * s.max(t).max(1.0) {
            return Err(Error::Unbalanced { sources: s, targets: t });
        }
        Ok(())
    }

    /// Full admissibility for the solver. Returns warnings for conditions
    /// the solver tolerates (a cost without blow-up at zero).
    pub fn validate(&self) -> Result<Vec<String>> {
        self.check_data()?;
        let mut warnings = Vec::new();
        let report = check_branching_axioms(&self.h, &SampleGrid::new(self.target_mass().max(1.0), 200));
        if !report.admissible_for_solver() {
            let why = report
                .worst_violation()
                .map(|v| format!("{:?} fails at y={} (defect {:.3e})", v.axiom, v.y1, v.defect))
                .unwrap_or_default();
            return Err(Error::InvalidBranching(why));
        }
        if !report.derivative_blowup_ok {
            warnings.push("H(y)/y does not blow up at 0: branching is not enforced".into());
        }
        let grid = if self.sigma.dim() == 2 {
            DirectionGrid::Circle { count: 360 }
        } else {
            DirectionGrid::Lattice {
                dim: self.sigma.dim(),
                radius: 2,
            }
        };
        let conv = check_convexity(&self.sigma, &grid);
        if !conv.convex {
            return Err(Error::NonConvex {
                defect: conv.worst_defect,
            });
        }
        Ok(warnings)
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    pub fn n_terminals(&self) -> usize {
        self.sources.len() + self.targets.len()
    }

    pub fn source_mass(&self) -> f64 {
        self.sources.iter().map(|t| t.m).sum()
    }

    /// `M(μ⁺)`, the bound on every multiplicity of an acyclic solution.
    pub fn target_mass(&self) -> f64 {
        self.targets.iter().map(|t| t.m).sum()
    }

    /// Terminal positions, sources first.
    pub fn positions(&self) -> Vec<Vec<f64>> {
        self.sources.iter().chain(&self.targets).map(|t| t.p.clone()).collect()
    }

    /// Required boundary weight per terminal: `−m` at sources, `+m` at
    /// targets.
    pub fn imbalance(&self) -> Vec<f64> {
        self.sources
            .iter()
            .map(|t| -t.m)
            .chain(self.targets.iter().map(|t| t.m))
            .collect()
    }

    /// `μ⁺ − μ⁻` as a 0-current.
    pub fn boundary(&self) -> ZeroCurrent {
        ZeroCurrent::canonical(self.positions().into_iter().zip(self.imbalance()).collect())
    }

    /// `C` with `M(R) ≤ C · M_{H,σ}(R)` for acyclic `R` with multiplicities
    /// bounded by `M(μ⁺)`: `(min σ)⁻¹ · sup_{0<y≤M(μ⁺)} y / H(y)`.
    pub fn mass_bound_constant(&self) -> f64 {
        self.h.sup_ratio(self.target_mass(), 4096) / self.sigma.min_unit_cost()
    }

    /// Largest coordinate spread of the terminals, used as a length scale.
    pub fn scale(&self) -> f64 {
        let pts = self.positions();
        let dim = self.dim();
        let mut s: f64 = 0.0;
        for k in 0..dim {
            let lo = pts.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
            s = s.max(hi - lo);
        }
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    /// Same problem with every position multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        let f = |v: &[Terminal]| {
            v.iter()
                .map(|a| Terminal {
                    p: a.p.iter().map(|x| x * t).collect(),
                    m: a.m,
                })
                .collect()
        };
        Self {
            sources: f(&self.sources),
            targets: f(&self.targets),
            h: self.h.clone(),
            sigma: self.sigma.clone(),
        }
    }
}
