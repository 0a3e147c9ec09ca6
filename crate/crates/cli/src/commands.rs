use abot_core::*;
use serde::{Deserialize, Serialize};

use crate::config::{read_json, CommandKind, GridSpec, Mode, RunConfig, Sweep, SweepVar};
use crate::error::{exit, CliError};
use crate::output::{fmt_f64, Artifacts, OutDir};
use crate::svg;

/// Runs one command and returns the exit status it asks for.
pub fn execute(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    match cfg.command {
        CommandKind::Solve => run_solve(cfg),
        CommandKind::IgDecompose => run_ig_decompose(cfg),
        CommandKind::IgApproximate => run_ig_approximate(cfg),
        CommandKind::Hypermetric => run_hypermetric(cfg),
        CommandKind::VerifySlicing => run_verify_slicing(cfg),
        CommandKind::LscExperiment => run_lsc_experiment(cfg),
        CommandKind::Flatnorm => run_flatnorm(cfg),
    }
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// `n` evenly spaced unit directions.
fn directions(n: usize) -> Vec<Vec2> {
    (0..n)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / n as f64;
            Vec2::new(t.cos(), t.sin())
        })
        .collect()
}

const SAMPLE_DIRECTIONS: usize = 1000;

// ---------------------------------------------------------------- solve

fn budget(cfg: &RunConfig) -> Budget {
    let mut b = match cfg.mode {
        Mode::Exhaustive => Budget::exhaustive(),
        Mode::Local => Budget::local(vec![cfg.seed]),
    };
    b.max_steiner = cfg.max_steiner;
    b.max_evaluations = cfg.max_evaluations;
    b
}

/// `nx × ny` evenly spaced points over the bounding box of the terminals.
fn oracle_points(problem: &TransportProblem, g: GridSpec) -> Result<Vec<Vec<f64>>, CliError> {
    if problem.dim() != 2 {
        return Err(CliError::Usage("--oracle-grid needs a planar problem".into()));
    }
    let pos = problem.positions();
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in &pos {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let at = |k: usize, i: usize, n: usize| {
        if n == 1 {
            0.5 * (lo[k] + hi[k])
        } else {
            lo[k] + (hi[k] - lo[k]) * i as f64 / (n - 1) as f64
        }
    };
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(g.nx * g.ny);
    for i in 0..g.nx {
        for j in 0..g.ny {
            let p = vec![at(0, i, g.nx), at(1, j, g.ny)];
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
    }
    Ok(pts)
}

#[derive(Serialize)]
struct OracleReport {
    grid: GridSpec,
    cost: f64,
    gap: f64,
    tol: f64,
    ok: bool,
    network: Network,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub cost: f64,
    pub effective_steiner: usize,
    pub branched: bool,
}

#[derive(Serialize)]
struct SweepReport {
    sweep: Sweep,
    points: Vec<SweepPoint>,
    /// Bisected values where the branched flag flips.
    crossovers: Vec<f64>,
    tol: f64,
}

fn variant(p: &TransportProblem, var: SweepVar, v: f64) -> Result<TransportProblem, CliError> {
    let mut q = p.clone();
    match var {
        SweepVar::H => {
            for t in &mut q.targets {
                if let Some(y) = t.p.last_mut() {
                    *y = v;
                }
            }
        }
        SweepVar::Alpha => q.h = BranchingFunction::power(v)?,
    }
    q.check_data()?;
    Ok(q)
}

struct SweepRun<'a> {
    problem: &'a TransportProblem,
    budget: &'a Budget,
    var: SweepVar,
    exhausted: bool,
}

impl SweepRun<'_> {
    fn point(&mut self, v: f64) -> Result<SweepPoint, CliError> {
        let r = solve(&variant(self.problem, self.var, v)?, self.budget)?;
        self.exhausted |= r.budget_exhausted;
        let eff = r.best.effective_steiner();
        Ok(SweepPoint {
            value: v,
            cost: r.best.cost,
            effective_steiner: eff,
            branched: eff > 0,
        })
    }

    fn bisect(&mut self, a: &SweepPoint, b: &SweepPoint, tol: f64) -> Result<f64, CliError> {
        let (mut lo, mut hi) = (a.value, b.value);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.point(mid)?.branched == a.branched {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

fn run_sweep(problem: &TransportProblem, budget: &Budget, sweep: Sweep, tol: f64) -> Result<(SweepReport, bool), CliError> {
    let mut run = SweepRun {
        problem,
        budget,
        var: sweep.var,
        exhausted: false,
    };
    let points = sweep.values().into_iter().map(|v| run.point(v)).collect::<Result<Vec<_>, _>>()?;
    let mut crossovers = Vec::new();
    for w in points.windows(2) {
        if w[0].branched != w[1].branched {
            crossovers.push(run.bisect(&w[0], &w[1], tol)?);
        }
    }
    let exhausted = run.exhausted;
    Ok((
        SweepReport {
            sweep,
            points,
            crossovers,
            tol,
        },
        exhausted,
    ))
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    config: &'a RunConfig,
    problem: &'a TransportProblem,
    cost: f64,
    network: &'a Network,
    ties: &'a [Network],
    evaluated: usize,
    budget_exhausted: bool,
    warnings: &'a [String],
    verify: VerifyReport,
    oracle: Option<OracleReport>,
    sweep: Option<SweepReport>,
}

pub fn run_solve(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let problem: TransportProblem = read_json(&cfg.input)?;
    problem.check_data()?;
    let budget = budget(cfg);
    let result = solve(&problem, &budget)?;
    let best = &result.best;
    let verify = verify_network(best, &problem);

    let oracle_tol = cfg.tolerances.get("oracle");
    let oracle = match cfg.oracle_grid {
        Some(g) => {
            let net = brute_force_oracle(&problem, &oracle_points(&problem, g)?)?;
            Some(OracleReport {
                grid: g,
                cost: net.cost,
                gap: best.cost - net.cost,
                tol: oracle_tol,
                ok: best.cost <= net.cost + oracle_tol,
                network: net,
            })
        }
        None => None,
    };
    let mut exhausted = result.budget_exhausted;
    let sweep = match cfg.sweep {
        Some(s) => {
            let (rep, ex) = run_sweep(&problem, &budget, s, cfg.tolerances.get("crossover"))?;
            exhausted |= ex;
            Some(rep)
        }
        None => None,
    };

    let mut out = OutDir::create(&cfg.out)?;
    let diag = &best.diagnostics;
    out.write_csv(
        "metrics.csv",
        &[
            "cost",
            "n_steiner",
            "effective_steiner",
            "evaluated",
            "budget_exhausted",
            "mass",
            "mass_bound_c",
            "linf_bound_ok",
            "acyclic",
            "verified",
            "oracle_cost",
            "oracle_gap",
            "oracle_ok",
            "oracle_tol",
        ],
        &[vec![
            fmt_f64(best.cost),
            best.topology.n_steiner().to_string(),
            best.effective_steiner().to_string(),
            result.evaluated.to_string(),
            flag(result.budget_exhausted),
            fmt_f64(diag.mass),
            fmt_f64(diag.mass_bound_c),
            flag(diag.linf_bound_ok),
            flag(diag.acyclic),
            flag(verify.all_ok()),
            opt(oracle.as_ref().map(|o| o.cost)),
            opt(oracle.as_ref().map(|o| o.gap)),
            oracle.as_ref().map(|o| flag(o.ok)).unwrap_or_default(),
            fmt_f64(oracle_tol),
        ]],
    )?;
    if let Some(rep) = &sweep {
        let var = match rep.sweep.var {
            SweepVar::H => "h",
            SweepVar::Alpha => "alpha",
        };
        let mut rows: Vec<Vec<String>> = rep
            .points
            .iter()
            .map(|p| {
                vec![
                    "point".into(),
                    var.into(),
                    fmt_f64(p.value),
                    fmt_f64(p.cost),
                    p.effective_steiner.to_string(),
                    flag(p.branched),
                    fmt_f64(rep.tol),
                ]
            })
            .collect();
        for c in &rep.crossovers {
            rows.push(vec![
                "crossover".into(),
                var.into(),
                fmt_f64(*c),
                String::new(),
                String::new(),
                String::new(),
                fmt_f64(rep.tol),
            ]);
        }
        out.write_csv(
            "sweep.csv",
            &["row", "var", "value", "cost", "effective_steiner", "branched", "crossover_tol"],
            &rows,
        )?;
    }
    out.write_json(
        "network.json",
        &SolveOutput {
            config: cfg,
            problem: &problem,
            cost: best.cost,
            network: best,
            ties: &result.ties,
            evaluated: result.evaluated,
            budget_exhausted: exhausted,
            warnings: &result.warnings,
            verify,
            oracle,
            sweep,
        },
    )?;
    out.write_text("network.svg", &svg::render(best, &problem))?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    if exhausted {
        out.artifacts.status = exit::BUDGET;
    }
    Ok(out.artifacts)
}

// ---------------------------------------------------------------- igrep

#[derive(Serialize)]
struct DecomposeOutput {
    polygon: SymmetricPolygon,
    decomposition: PolygonDecomposition,
    measure: DirectionMeasure,
    weight_sum: f64,
    weight_bound: f64,
    max_reconstruction_error: f64,
    tol: f64,
    pass: bool,
}

pub fn run_ig_decompose(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let polygon: SymmetricPolygon = read_json(&cfg.input)?;
    let d = polygon_decompose(&polygon)?;
    let err = directions(SAMPLE_DIRECTIONS)
        .iter()
        .map(|u| (d.reconstruct(u) / polygon.gauge(u) - 1.0).abs())
        .fold(0.0, f64::max);
    let tol = cfg.tolerances.get("reconstruction");
    let (sum, bound) = (d.weight_sum(), d.weight_bound());
    let pass = err <= tol && sum <= bound + tol;
    let mut out = OutDir::create(&cfg.out)?;
    out.write_csv(
        "report.csv",
        &["edges", "weight_sum", "weight_bound", "max_reconstruction_error", "pass", "tol"],
        &[vec![
            polygon.half_len().to_string(),
            fmt_f64(sum),
            fmt_f64(bound),
            fmt_f64(err),
            flag(pass),
            fmt_f64(tol),
        ]],
    )?;
    out.write_json(
        "decomposition.json",
        &DecomposeOutput {
            measure: d.measure(),
            polygon,
            decomposition: d,
            weight_sum: sum,
            weight_bound: bound,
            max_reconstruction_error: err,
            tol,
            pass,
        },
    )?;
    Ok(out.artifacts)
}

#[derive(Deserialize)]
struct SigmaInput {
    sigma: Anisotropy,
}

#[derive(Serialize)]
struct ApproximateOutput<'a> {
    depth: usize,
    sigma: &'a Anisotropy,
    total_mass: f64,
    representation: Representation,
}

pub fn run_ig_approximate(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let SigmaInput { sigma } = read_json(&cfg.input)?;
    let tol = cfg.tolerances.get("reconstruction");
    // boundary points of the unit ball of sigma
    let boundary: Vec<Vec2> = directions(SAMPLE_DIRECTIONS).iter().map(|u| u / sigma.eval2(u)).collect();
    let mut rows = Vec::new();
    let mut last = None;
    for k in 2..=cfg.depth.max(2) {
        let rep = represent(&sigma, k)?;
        let contained = boundary.iter().all(|x| rep.polygon.gauge(x) <= 1.0 + tol);
        rows.push(vec![
            k.to_string(),
            fmt_f64(rep.uniform_error),
            fmt_f64(rep.measure.total_mass()),
            rep.polygon.vertices().len().to_string(),
            flag(contained),
            fmt_f64(tol),
        ]);
        last = Some(rep);
    }
    let rep = last.expect("at least one depth");
    let mut out = OutDir::create(&cfg.out)?;
    out.write_csv(
        "depths.csv",
        &["depth", "uniform_error", "total_mass", "vertices", "contained", "tol"],
        &rows,
    )?;
    out.write_json(
        "representation.json",
        &ApproximateOutput {
            depth: cfg.depth.max(2),
            sigma: &sigma,
            total_mass: rep.measure.total_mass(),
            representation: rep,
        },
    )?;
    Ok(out.artifacts)
}

#[derive(Serialize, Deserialize)]
struct HypermetricInput {
    norm: Anisotropy,
    max_points: usize,
    coeff_bound: i64,
    grid: PointGrid,
}

#[derive(Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
enum HypermetricOutput<'a> {
    ViolationFound {
        certificate: HypermetricCertificate,
        recomputed: f64,
    },
    NoneFoundWithinBudget {
        budget: &'a HypermetricInput,
        grid_points: usize,
    },
}

pub fn run_hypermetric(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let input: HypermetricInput = read_json(&cfg.input)?;
    let found = hypermetric_search(&input.norm, input.max_points, input.coeff_bound, &input.grid)?;
    let record = match found {
        Some(certificate) => HypermetricOutput::ViolationFound {
            recomputed: certificate.evaluate(&input.norm),
            certificate,
        },
        None => HypermetricOutput::NoneFoundWithinBudget {
            budget: &input,
            grid_points: input.grid.points().len(),
        },
    };
    let mut out = OutDir::create(&cfg.out)?;
    out.write_json("hypermetric.json", &record)?;
    Ok(out.artifacts)
}

// ---------------------------------------------------------------- currents

#[derive(Deserialize)]
struct SlicingInput {
    currents: Vec<PolyhedralOneCurrent>,
    sigma: Anisotropy,
    #[serde(rename = "H")]
    h: BranchingFunction,
    depth: Option<usize>,
}

pub fn run_verify_slicing(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let input: SlicingInput = read_json(&cfg.input)?;
    let rep = represent(&input.sigma, input.depth.unwrap_or(cfg.depth))?;
    let tol = cfg.tolerances.get("slicing");
    let mut rows = Vec::with_capacity(input.currents.len());
    for (i, cur) in input.currents.iter().enumerate() {
        let direct = h_mass(cur, &input.h, &input.sigma)?;
        let sliced = h_mass_via_slicing(cur, &input.h, &rep.measure)?;
        let diff = (direct - sliced).abs();
        let bound = rep.uniform_error * cur.weighted_length(&input.h) + tol * direct.abs();
        rows.push(vec![
            i.to_string(),
            fmt_f64(direct),
            fmt_f64(sliced),
            fmt_f64(diff),
            fmt_f64(bound),
            flag(diff <= bound),
            fmt_f64(tol),
        ]);
    }
    let mut out = OutDir::create(&cfg.out)?;
    out.write_csv(
        "report.csv",
        &["instance", "direct", "sliced", "diff", "bound", "pass", "tol"],
        &rows,
    )?;
    Ok(out.artifacts)
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Family {
    Staircase,
    ShrinkingOscillation,
}

#[derive(Deserialize)]
struct LscInput {
    family: Family,
    ks: Vec<usize>,
    sigma: Anisotropy,
    #[serde(rename = "H")]
    h: BranchingFunction,
}

/// `(S_k, D, mesh)`: the k-th member of the family, its limit and a mesh
/// carrying both.
fn family_member(f: Family, k: usize) -> Result<(PolyhedralOneCurrent, PolyhedralOneCurrent, TriMesh), CliError> {
    let kf = k as f64;
    Ok(match f {
        Family::Staircase => {
            let mut pts = vec![vec![0.0, 0.0]];
            for i in 0..k {
                pts.push(vec![(i + 1) as f64 / kf, i as f64 / kf]);
                pts.push(vec![(i + 1) as f64 / kf, (i + 1) as f64 / kf]);
            }
            let s = PolyhedralOneCurrent::path(&pts, 1.0)?;
            let d = PolyhedralOneCurrent::path(&[vec![0.0, 0.0], vec![1.0, 1.0]], 1.0)?;
            (s, d, TriMesh::grid([0.0, 0.0], [1.0, 1.0], k, k)?)
        }
        Family::ShrinkingOscillation => {
            let (n, amp) = (2 * k, 1.0 / (2.0 * kf));
            let pts: Vec<Vec<f64>> = (0..=n)
                .map(|j| vec![j as f64 / n as f64, if j % 2 == 0 { 0.0 } else { amp }])
                .collect();
            let s = PolyhedralOneCurrent::path(&pts, 1.0)?;
            let d = PolyhedralOneCurrent::path(&[vec![0.0, 0.0], vec![1.0, 0.0]], 1.0)?;
            let mesh = TriMesh::grid_with([0.0, 0.0], [1.0, amp], n, 1, |i, _| {
                if i % 2 == 0 {
                    Diagonal::Rising
                } else {
                    Diagonal::Falling
                }
            })?;
            (s, d, mesh)
        }
    })
}

pub fn run_lsc_experiment(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let input: LscInput = read_json(&cfg.input)?;
    if input.ks.is_empty() || input.ks.contains(&0) {
        return Err(Error::Domain("ks must be a non-empty list of positive integers".into()).into());
    }
    let tol = cfg.tolerances.get("lsc");
    let blank = String::new;
    let mut rows = Vec::new();
    let mut flats = Vec::new();
    let mut masses = Vec::new();
    let mut limit = None;
    for &k in &input.ks {
        let (s, d, mesh) = family_member(input.family, k)?;
        let flat = flat_distance_one_upper(&s, &d, &mesh)?;
        let ms = h_mass(&s, &input.h, &input.sigma)?;
        let md = h_mass(&d, &input.h, &input.sigma)?;
        rows.push(vec![
            "member".into(),
            k.to_string(),
            fmt_f64(flat),
            fmt_f64(ms),
            fmt_f64(md),
            blank(),
            blank(),
            fmt_f64(tol),
            blank(),
        ]);
        flats.push(flat);
        masses.push(ms);
        limit = Some((d, mesh, md));
    }
    let (d, mesh, md) = limit.expect("ks is non-empty");
    let min_mass = masses.iter().copied().fold(f64::INFINITY, f64::min);
    let decreasing = flats.windows(2).all(|w| w[1] < w[0]);
    rows.push(vec![
        "summary".into(),
        blank(),
        blank(),
        fmt_f64(min_mass),
        fmt_f64(md),
        flag(min_mass >= md - tol),
        flag(decreasing),
        fmt_f64(tol),
        "min over k of h_mass(S_k) against h_mass(D)".into(),
    ]);
    // the recovering sequence for a polyhedral limit is the limit itself
    let recovery_flat = flat_distance_one_upper(&d, &d, &mesh)?;
    rows.push(vec![
        "recovery".into(),
        blank(),
        fmt_f64(recovery_flat),
        fmt_f64(md),
        fmt_f64(md),
        flag(recovery_flat <= tol),
        blank(),
        fmt_f64(tol),
        "trivial: polyhedral D is recovered by P = D".into(),
    ]);
    let mut out = OutDir::create(&cfg.out)?;
    out.write_csv(
        "report.csv",
        &[
            "row",
            "k",
            "flat_upper",
            "h_mass_sk",
            "h_mass_d",
            "liminf_ok",
            "flat_decreasing",
            "tol",
            "note",
        ],
        &rows,
    )?;
    Ok(out.artifacts)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FlatInput {
    One {
        p: PolyhedralOneCurrent,
        q: PolyhedralOneCurrent,
        mesh: TriMesh,
    },
    Zero {
        s: ZeroCurrent,
        t: ZeroCurrent,
    },
}

#[derive(Serialize)]
struct FlatOutput {
    kind: &'static str,
    value: f64,
}

pub fn run_flatnorm(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let input: FlatInput = read_json(&cfg.input)?;
    let out_value = match &input {
        FlatInput::One { p, q, mesh } => FlatOutput {
            kind: "one_current_mesh_upper_bound",
            value: flat_distance_one_upper(p, q, mesh)?,
        },
        FlatInput::Zero { s, t } => FlatOutput {
            kind: "zero_current",
            value: flat_distance_zero(s, t)?,
        },
    };
    let mut out = OutDir::create(&cfg.out)?;
    out.write_json("flatnorm.json", &out_value)?;
    Ok(out.artifacts)
}
