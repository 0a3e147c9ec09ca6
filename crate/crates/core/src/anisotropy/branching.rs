//! Multiplicity costs `H`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::BRANCHING_TOL;

/// An even, subadditive multiplicity cost with `H(0) = 0`.
///
/// Lower semicontinuity is not checked; the only discontinuity admitted is
/// the jump at zero of [`BranchingFunction::AffineJump`] (and of a tabulated
/// function whose first knot sits at zero with positive cost).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBranching", into = "RawBranching")]
pub enum BranchingFunction {
    /// `H(y) = |y|^α` with `α ∈ (0, 1]`.
    Power { alpha: f64 },
    /// `H(y) = a + b|y|` for `y ≠ 0`.
    AffineJump { a: f64, b: f64 },
    /// Piecewise-linear interpolation of `(multiplicity, cost)` knots.
    ///
    /// An implicit knot `(0, 0)` is used unless the first knot is at
    /// multiplicity zero, in which case its cost is the right limit at zero.
    /// Beyond the last knot the last segment's slope is continued.
    Tabulated { knots: Vec<[f64; 2]> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawBranching {
    Power { alpha: f64 },
    AffineJump { a: f64, b: f64 },
    Tabulated { knots: Vec<[f64; 2]> },
}

impl TryFrom<RawBranching> for BranchingFunction {
    type Error = Error;

    fn try_from(raw: RawBranching) -> Result<Self> {
        match raw {
            RawBranching::Power { alpha } => Self::power(alpha),
            RawBranching::AffineJump { a, b } => Self::affine_jump(a, b),
            RawBranching::Tabulated { knots } => Self::tabulated(knots),
        }
    }
}

impl From<BranchingFunction> for RawBranching {
    fn from(h: BranchingFunction) -> Self {
        match h {
            BranchingFunction::Power { alpha } => RawBranching::Power { alpha },
            BranchingFunction::AffineJump { a, b } => RawBranching::AffineJump { a, b },
            BranchingFunction::Tabulated { knots } => RawBranching::Tabulated { knots },
        }
    }
}

impl BranchingFunction {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidBranching(format!(
                "power exponent {alpha} outside (0, 1]"
            )));
        }
        Ok(Self::Power { alpha })
    }

    pub fn affine_jump(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
            return Err(Error::InvalidBranching(format!(
                "affine jump needs finite a, b >= 0 (got a={a}, b={b})"
            )));
        }
        Ok(Self::AffineJump { a, b })
    }

    pub fn tabulated(knots: Vec<[f64; 2]>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidBranching("empty knot table".into()));
        }
        for (i, k) in knots.iter().enumerate() {
            if !(k[0].is_finite() && k[1].is_finite() && k[0] >= 0.0 && k[1] >= 0.0) {
                return Err(Error::InvalidBranching(format!(
                    "knot {i} must be finite and non-negative"
                )));
            }
            if i > 0 && k[0] <= knots[i - 1][0] {
                return Err(Error::InvalidBranching(format!(
                    "knot multiplicities must increase strictly (knot {i})"
                )));
            }
        }
        Ok(Self::Tabulated { knots })
    }

    /// `H(θ)`; rejects non-finite multiplicities.
    pub fn eval(&self, theta: f64) -> Result<f64> {
        if !theta.is_finite() {
            return Err(Error::Domain(format!("multiplicity {theta} is not finite")));
        }
        Ok(self.cost(theta))
    }

    /// `H(θ)` without the finiteness check.
    #[inline]
    pub fn cost(&self, theta: f64) -> f64 {
        let y = theta.abs();
        if y == 0.0 {
            return 0.0;
        }
        match self {
            Self::Power { alpha } => {
                if *alpha == 1.0 {
                    y
                } else if *alpha == 0.5 {
                    y.sqrt()
                } else {
                    y.powf(*alpha)
                }
            }
            Self::AffineJump { a, b } => a + b * y,
            Self::Tabulated { knots } => interpolate(knots, y),
        }
    }

    /// `H(y) = |y|`, the cost of classical (non-branching) transport.
    pub fn identity() -> Self {
        Self::Power { alpha: 1.0 }
    }

    /// `sup_{0 < y <= max} y / H(y)` evaluated on `samples` uniform points
    /// (plus `max` itself). Infinite if `H` vanishes somewhere on the grid.
    pub fn sup_ratio(&self, max: f64, samples: usize) -> f64 {
        let n = samples.max(1);
        (1..=n)
            .map(|i| max * i as f64 / n as f64)
            .map(|y| {
                let h = self.cost(y);
                if h > 0.0 {
                    y / h
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

fn interpolate(knots: &[[f64; 2]], y: f64) -> f64 {
    let mut prev = [0.0, 0.0];
    let mut start = 0;
    if knots[0][0] == 0.0 {
        prev = knots[0];
        start = 1;
    }
    for k in &knots[start..] {
        if y <= k[0] {
            let t = (y - prev[0]) / (k[0] - prev[0]);
            return prev[1] + t * (k[1] - prev[1]);
        }
        prev = *k;
    }
    // Past the last knot: continue the final segment.
    let n = knots.len();
    let slope = if n >= 2 {
        let (p, q) = (knots[n - 2], knots[n - 1]);
        (q[1] - p[1]) / (q[0] - p[0])
    } else if knots[0][0] > 0.0 {
        knots[0][1] / knots[0][0]
    } else {
        0.0
    };
    prev[1] + slope * (y - prev[0])
}

/// Uniform sample grid `y_i = max · i / points`, `i = 1..=points`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub max: f64,
    pub points: usize,
}

impl SampleGrid {
    pub fn new(max: f64, points: usize) -> Self {
        Self { max, points }
    }

    pub fn values(&self) -> Vec<f64> {
        (1..=self.points)
            .map(|i| self.max * i as f64 / self.points as f64)
            .collect()
    }
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self::new(10.0, 100)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Even,
    Subadditive,
    Monotone,
    DerivativeBlowup,
}

/// Worst sampled failure of one axiom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub y1: f64,
    pub y2: f64,
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub grid: Vec<f64>,
    pub even_ok: bool,
    pub subadditive_ok: bool,
    pub monotone_ok: bool,
    pub derivative_blowup_ok: bool,
    /// One entry per failing axiom, holding its worst sampled witness.
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn all_ok(&self) -> bool {
        self.even_ok && self.subadditive_ok && self.monotone_ok && self.derivative_blowup_ok
    }

    pub fn worst_violation(&self) -> Option<&AxiomViolation> {
        self.violations
            .iter()
            .max_by(|a, b| a.defect.total_cmp(&b.defect))
    }

    /// The solver needs monotonicity and the small-multiplicity blow-up in
    /// addition to the basic axioms.
    pub fn admissible_for_solver(&self) -> bool {
        self.even_ok && self.subadditive_ok && self.monotone_ok
    }
}

/// Probe points for `H(y)/y → ∞` as `y → 0⁺`.
pub const BLOWUP_PROBES: [f64; 8] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Grid check of evenness, subadditivity, monotonicity on `ℝ⁺` and the
/// blow-up of `H(y)/y` at zero.
pub fn check_branching_axioms(h: &BranchingFunction, grid: &SampleGrid) -> AxiomReport {
    let ys = grid.values();
    let mut violations = Vec::new();
    let worst = |axiom: Axiom, y1: f64, y2: f64, defect: f64, slot: &mut Option<AxiomViolation>| {
        if defect > BRANCHING_TOL && slot.as_ref().is_none_or(|v| defect > v.defect) {
            *slot = Some(AxiomViolation { axiom, y1, y2, defect });
        }
    };

    let mut even = None;
    for &y in &ys {
        let d = (h.cost(y) - h.cost(-y)).abs();
        worst(Axiom::Even, y, -y, d, &mut even);
    }

    let mut sub = None;
    for (i, &y1) in ys.iter().enumerate() {
        for &y2 in &ys[i..] {
            let d = h.cost(y1 + y2) - h.cost(y1) - h.cost(y2);
            worst(Axiom::Subadditive, y1, y2, d, &mut sub);
        }
    }

    let mut mono = None;
    let mut prev = 0.0;
    for &y in &ys {
        let d = h.cost(prev) - h.cost(y);
        worst(Axiom::Monotone, prev, y, d, &mut mono);
        prev = y;
    }

    // Strictly increasing ratio as y decreases along the probes.
    let mut blowup = None;
    for w in BLOWUP_PROBES.windows(2) {
        let (big, small) = (w[0], w[1]);
        let r_big = h.cost(big) / big;
        let r_small = h.cost(small) / small;
        if r_small <= r_big {
            let defect = (r_big - r_small).max(f64::MIN_POSITIVE) + BRANCHING_TOL;
            if blowup.as_ref().is_none_or(|v: &AxiomViolation| defect > v.defect) {
                blowup = Some(AxiomViolation {
                    axiom: Axiom::DerivativeBlowup,
                    y1: big,
                    y2: small,
                    defect,
                });
            }
        }
    }

    let report = AxiomReport {
        grid: ys,
        even_ok: even.is_none(),
        subadditive_ok: sub.is_none(),
        monotone_ok: mono.is_none(),
        derivative_blowup_ok: blowup.is_none(),
        violations: Vec::new(),
    };
    violations.extend([even, sub, mono, blowup].into_iter().flatten());
    AxiomReport { violations, ..report }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let h = BranchingFunction::power(0.5).unwrap();
        assert_eq!(h.eval(4.0).unwrap(), 2.0);
        assert_eq!(h.eval(-9.0).unwrap(), 3.0);
        assert_eq!(h.eval(0.0).unwrap(), 0.0);
        assert!(h.eval(f64::NAN).is_err());
        assert!(h.eval(f64::INFINITY).is_err());
        for h in [
            BranchingFunction::affine_jump(1.0, 1.0).unwrap(),
            BranchingFunction::tabulated(vec![[0.0, 0.5], [1.0, 1.0]]).unwrap(),
        ] {
            assert_eq!(h.eval(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(BranchingFunction::power(0.0).is_err());
        assert!(BranchingFunction::power(1.5).is_err());
        assert!(BranchingFunction::affine_jump(-1.0, 0.0).is_err());
        assert!(BranchingFunction::tabulated(vec![]).is_err());
        assert!(BranchingFunction::tabulated(vec![[1.0, 1.0], [1.0, 2.0]]).is_err());
    }

    #[test]
    fn tabulated_interpolation() {
        let h = BranchingFunction::tabulated(vec![[1.0, 1.0], [3.0, 2.0]]).unwrap();
        assert_eq!(h.cost(0.5), 0.5);
        assert_eq!(h.cost(2.0), 1.5);
        assert_eq!(h.cost(5.0), 3.0);
        let jump = BranchingFunction::tabulated(vec![[0.0, 1.0], [1.0, 2.0]]).unwrap();
        assert_eq!(jump.cost(0.0), 0.0);
        assert_eq!(jump.cost(0.5), 1.5);
    }

    #[test]
    fn power_axioms_pass() {
        let r = check_branching_axioms(&BranchingFunction::power(0.5).unwrap(), &SampleGrid::default());
        assert!(r.all_ok(), "{r:?}");
        assert!(r.worst_violation().is_none());
    }

    #[test]
    fn affine_jump_axioms_pass() {
        let h = BranchingFunction::affine_jump(1.0, 1.0).unwrap();
        let grid = SampleGrid::new(5.0, 50);
        let r = check_branching_axioms(&h, &grid);
        assert!(r.all_ok(), "{r:?}");
        // H(y1+y2) = 1+y1+y2 against 2+y1+y2: slack of exactly 1 everywhere.
        let ys = grid.values();
        for &a in &ys {
            for &b in &ys {
                let slack = h.cost(a) + h.cost(b) - h.cost(a + b);
                assert!((slack - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn convex_bump_breaks_subadditivity() {
        // H(1) = 1 but H(2) = 3 > H(1) + H(1).
        let h = BranchingFunction::tabulated(vec![[1.0, 1.0], [2.0, 3.0], [3.0, 3.2]]).unwrap();
        let grid = SampleGrid::new(3.0, 6);
        let r = check_branching_axioms(&h, &grid);
        assert!(!r.subadditive_ok);
        let w = r
            .violations
            .iter()
            .find(|v| v.axiom == Axiom::Subadditive)
            .unwrap();
        // Exhaustive pair scan as the oracle for the worst witness.
        let ys = grid.values();
        let mut best = (0.0, 0.0, f64::NEG_INFINITY);
        for (i, &a) in ys.iter().enumerate() {
            for &b in &ys[i..] {
                let d = h.cost(a + b) - h.cost(a) - h.cost(b);
                if d > best.2 {
                    best = (a, b, d);
                }
            }
        }
        assert_eq!((w.y1, w.y2), (best.0, best.1));
        assert!((w.defect - best.2).abs() < 1e-15);
        assert!(best.2 > 0.0);
    }

    #[test]
    fn linear_cost_fails_blowup_only() {
        let r = check_branching_axioms(&BranchingFunction::identity(), &SampleGrid::default());
        assert!(r.even_ok && r.subadditive_ok && r.monotone_ok);
        assert!(!r.derivative_blowup_ok);
    }

    #[test]
    fn power_family_passes_on_fine_grid() {
        for i in 1..=9 {
            let alpha = i as f64 / 10.0;
            let r = check_branching_axioms(
                &BranchingFunction::power(alpha).unwrap(),
                &SampleGrid::new(10.0, 100),
            );
            assert!(r.all_ok(), "alpha={alpha}: {r:?}");
        }
    }

    #[test]
    fn json_shape() {
        let h: BranchingFunction = serde_json::from_str(r#"{"kind":"power","alpha":0.5}"#).unwrap();
        assert_eq!(h, BranchingFunction::Power { alpha: 0.5 });
        let back = serde_json::to_string(&h).unwrap();
        assert_eq!(back, r#"{"kind":"power","alpha":0.5}"#);
        let bad: Result<BranchingFunction, _> = serde_json::from_str(r#"{"kind":"power","alpha":2.0}"#);
        assert!(bad.is_err());
        let tab: BranchingFunction =
            serde_json::from_str(r#"{"kind":"tabulated","knots":[[1,1],[2,1.5]]}"#).unwrap();
        assert_eq!(tab.cost(2.0), 1.5);
    }
}
