//! Minimal linear-program builder over `microlp`.

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};

pub(crate) struct Lp {
    problem: Problem,
    vars: Vec<Variable>,
}

pub(crate) type Var = usize;

pub(crate) struct LpSolution {
    pub objective: f64,
    pub values: Vec<f64>,
}

impl Lp {
    pub fn minimize() -> Self {
        Self {
            problem: Problem::new(OptimizationDirection::Minimize),
            vars: Vec::new(),
        }
    }

    pub fn var(&mut self, cost: f64, lo: f64, hi: f64) -> Var {
        self.vars.push(self.problem.add_var(cost, (lo, hi)));
        self.vars.len() - 1
    }

    /// A nonnegative variable.
    pub fn pos(&mut self, cost: f64) -> Var {
        self.var(cost, 0.0, f64::INFINITY)
    }

    pub fn free(&mut self, cost: f64) -> Var {
        self.var(cost, f64::NEG_INFINITY, f64::INFINITY)
    }

    fn expr(&self, terms: &[(Var, f64)]) -> Vec<(Variable, f64)> {
        terms.iter().map(|(v, c)| (self.vars[*v], *c)).collect()
    }

    pub fn eq(&mut self, terms: &[(Var, f64)], rhs: f64) {
        let e = self.expr(terms);
        self.problem.add_constraint(e, ComparisonOp::Eq, rhs);
    }

    pub fn ge(&mut self, terms: &[(Var, f64)], rhs: f64) {
        let e = self.expr(terms);
        self.problem.add_constraint(e, ComparisonOp::Ge, rhs);
    }

    pub fn solve(self) -> Result<LpSolution> {
        let outcome = self
            .problem
            .solve()
            .map_err(|e| Error::Lp(format!("{e:?}")))?;
        let sol = outcome
            .into_solution()
            .map_err(|_| Error::Lp("solve interrupted".into()))?;
        let values = self.vars.iter().map(|v| sol.var_value(*v)).collect();
        Ok(LpSolution {
            objective: sol.objective(),
            values,
        })
    }
}
