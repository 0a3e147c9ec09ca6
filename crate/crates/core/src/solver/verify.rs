use serde::{Deserialize, Serialize};

use crate::currents::{h_mass, is_acyclic};
use crate::solver::{Network, TransportProblem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMismatch {
    pub p: Vec<f64>,
    pub got: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub boundary_ok: bool,
    pub boundary_diff: Vec<BoundaryMismatch>,
    pub acyclic: bool,
    pub linf_ok: bool,
    /// `M(μ⁺) − max |θ_e|`.
    pub linf_slack: f64,
    pub mass_bound_ok: bool,
    /// `C · M_{H,σ}(R) − M(R)`.
    pub mass_bound_slack: f64,
    pub cost_ok: bool,
    pub cost_recomputed: f64,
}

impl VerifyReport {
    pub fn all_ok(&self) -> bool {
        self.boundary_ok && self.acyclic && self.linf_ok && self.mass_bound_ok && self.cost_ok
    }
}

/// Boundary weights may differ from the prescribed masses by rounding in
/// the subtree sums; this relative slack absorbs it.
const BOUNDARY_TOL: f64 = 1e-12;

/// Independent re-check of a network against the problem it claims to
/// solve.
pub fn verify_network(net: &Network, problem: &TransportProblem) -> VerifyReport {
    let scale = problem.target_mass().max(1.0);
    let boundary_diff: Vec<BoundaryMismatch> = net
        .current
        .boundary()
        .diff(&problem.boundary())
        .into_iter()
        .filter(|(_, got, expected)| (got - expected).abs() > BOUNDARY_TOL * scale)
        .map(|(p, got, expected)| BoundaryMismatch { p, got, expected })
        .collect();
    let max_theta = net.current.max_multiplicity();
    let linf_slack = problem.target_mass() - max_theta;
    let cost_recomputed = h_mass(&net.current, &problem.h, &problem.sigma).unwrap_or(f64::NAN);
    let mass_bound_slack = problem.mass_bound_constant() * cost_recomputed - net.current.mass();
    let rel = 1e-9 * cost_recomputed.abs().max(1.0);
    VerifyReport {
        boundary_ok: boundary_diff.is_empty(),
        boundary_diff,
        acyclic: is_acyclic(&net.current),
        linf_ok: linf_slack >= -1e-12 * scale,
        linf_slack,
        mass_bound_ok: mass_bound_slack >= -rel,
        mass_bound_slack,
        cost_ok: (cost_recomputed - net.cost).abs() <= rel,
        cost_recomputed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::{Anisotropy, BranchingFunction};
    use crate::currents::{remove_cycles, Edge, PolyhedralOneCurrent};
    use crate::solver::{initial_feasible, solve, Budget};

    fn problem() -> TransportProblem {
        TransportProblem::new(
            vec![(vec![0.0, 0.0], 1.0)],
            vec![(vec![2.0, 0.0], 1.0)],
            BranchingFunction::power(0.5).unwrap(),
            Anisotropy::euclidean(2),
        )
        .unwrap()
    }

    #[test]
    fn solver_output_passes() {
        let p = problem();
        let r = solve(&p, &Budget::exhaustive()).unwrap();
        assert!(verify_network(&r.best, &p).all_ok());
    }

    #[test]
    fn superfluous_loop_is_flagged() {
        let p = problem();
        let mut net = initial_feasible(&p).unwrap();
        let lp = PolyhedralOneCurrent::path(
            &[vec![2.0, 0.0], vec![3.0, 0.0], vec![3.0, 1.0], vec![2.0, 0.0]],
            0.5,
        )
        .unwrap();
        net.current = net.current.add(&lp).unwrap();
        net.cost = h_mass(&net.current, &p.h, &p.sigma).unwrap();
        let rep = verify_network(&net, &p);
        assert!(!rep.acyclic && rep.boundary_ok);
        let fixed = remove_cycles(&net.current, &p.h).unwrap();
        assert!(h_mass(&fixed, &p.h, &p.sigma).unwrap() < net.cost);
    }

    #[test]
    fn wrong_boundary_is_reported() {
        let p = problem();
        let mut net = initial_feasible(&p).unwrap();
        net.current = PolyhedralOneCurrent::new(vec![Edge::new(vec![0.0, 0.0], vec![1.0, 0.0], 1.0)]).unwrap();
        net.cost = h_mass(&net.current, &p.h, &p.sigma).unwrap();
        let rep = verify_network(&net, &p);
        assert!(!rep.boundary_ok);
        assert_eq!(rep.boundary_diff.len(), 2);
    }
}
