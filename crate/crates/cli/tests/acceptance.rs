//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every check prints its own line; exits non-zero if any check fails.

use std::collections::HashMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use abot_core::sampling::{random_current, random_cyclic_current, random_grid_problem, random_polygon};
use abot_core::solver::Budget;
use abot_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: f64) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t.as_secs_f64() <= limit, || format!("took {:.2}s, limit {limit}s", t.as_secs_f64()))?;
    Ok(t)
}

fn sqrt_h() -> BranchingFunction {
    BranchingFunction::power(0.5).unwrap()
}

// ------------------------------------------------------------ oracles

/// Distance from the origin to the nearest edge line.
fn inradius(p: &SymmetricPolygon) -> f64 {
    let v = p.vertices();
    (0..v.len())
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            (a.x * b.y - a.y * b.x).abs() / (b - a).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy)]
enum Gauge {
    Euclid,
    Ell1,
}

impl Gauge {
    fn sigma(self) -> Anisotropy {
        match self {
            Gauge::Euclid => Anisotropy::euclidean(2),
            Gauge::Ell1 => Anisotropy::polygonal(SymmetricPolygon::diamond()),
        }
    }
    fn len(self, a: &[f64], b: &[f64]) -> f64 {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        match self {
            Gauge::Euclid => dx.hypot(dy),
            Gauge::Ell1 => dx.abs() + dy.abs(),
        }
    }
    fn cost(self, p: &PolyhedralOneCurrent, alpha: f64) -> f64 {
        p.edges().iter().map(|e| e.theta.abs().powf(alpha) * self.len(&e.a, &e.b)).sum()
    }
}

fn key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|x| (x + 0.0).to_bits()).collect()
}

/// Signed boundary `Σ θ (δ_b − δ_a)`, zero entries removed.
fn boundary_of(p: &PolyhedralOneCurrent) -> HashMap<Vec<u64>, f64> {
    let mut m: HashMap<Vec<u64>, f64> = HashMap::new();
    for e in p.edges() {
        *m.entry(key(&e.b)).or_default() += e.theta;
        *m.entry(key(&e.a)).or_default() -= e.theta;
    }
    m.retain(|_, w| *w != 0.0);
    m
}

/// Cycle detection on the support digraph by colouring DFS.
fn has_directed_cycle(p: &PolyhedralOneCurrent) -> bool {
    let mut ids: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut adj: Vec<Vec<usize>> = Vec::new();
    let mut id = |p: &[f64], adj: &mut Vec<Vec<usize>>| {
        let n = ids.len();
        *ids.entry(key(p)).or_insert_with(|| {
            adj.push(Vec::new());
            n
        })
    };
    for e in p.edges() {
        if e.theta == 0.0 {
            continue;
        }
        let (a, b) = (id(&e.a, &mut adj), id(&e.b, &mut adj));
        if e.theta > 0.0 {
            adj[a].push(b);
        } else {
            adj[b].push(a);
        }
    }
    fn visit(v: usize, adj: &[Vec<usize>], state: &mut [u8]) -> bool {
        state[v] = 1;
        for &w in &adj[v] {
            if state[w] == 1 || (state[w] == 0 && visit(w, adj, state)) {
                return true;
            }
        }
        state[v] = 2;
        false
    }
    let mut state = vec![0u8; adj.len()];
    (0..adj.len()).any(|v| state[v] == 0 && visit(v, &adj, &mut state))
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    while b - a > 1e-12 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    0.5 * (a + b)
}

/// Smallest target height at which the symmetric Y beats the V: the
/// best Steiner height on the axis moves off the target.
fn y_crossover_oracle() -> f64 {
    let argmin = |h: f64| {
        let f = |s: f64| 2.0 * (1.0 + s * s).sqrt() + 2f64.sqrt() * (h - s);
        golden_section(f, 0.0, h)
    };
    let (mut lo, mut hi) = (0.1, 3.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if argmin(mid) < mid - 1e-6 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

// ------------------------------------------------------------ cli helpers

fn cli(args: &[&str], single_thread: bool) -> i32 {
    let mut c = Command::new(env!("CARGO_BIN_EXE_abot"));
    c.args(args);
    if single_thread {
        c.env("RAYON_NUM_THREADS", "1");
    }
    c.output().expect("binary runs").status.code().unwrap_or(-1)
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path).unwrap().records().map(|r| r.unwrap()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn y_instance(h: f64) -> Value {
    json!({
        "sources": [{"p": [-1.0, 0.0], "m": 1.0}, {"p": [1.0, 0.0], "m": 1.0}],
        "targets": [{"p": [0.0, h], "m": 2.0}],
        "H": {"kind": "power", "alpha": 0.5},
        "sigma": {"kind": "constant", "c": 1.0}
    })
}

// ------------------------------------------------------------ criteria

fn reconstruction_corpus() -> Vec<SymmetricPolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    (0..100)
        .map(|_| {
            let half = rng.random_range(2..=50);
            random_polygon(&mut rng, half)
        })
        .collect()
}

fn c1_reconstruction() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut worst = 0.0f64;
    for poly in reconstruction_corpus() {
        let d = polygon_decompose(&poly).map_err(|e| e.to_string())?;
        let m = poly.vertices().len();
        for _ in 0..1000 {
            let x = poly.boundary_point(rng.random_range(0..m), rng.random_range(0.0..1.0));
            worst = worst.max((d.reconstruct(&x) - 1.0).abs());
        }
    }
    let t = within(start, 2.0)?;
    ensure(worst <= 1e-9, || format!("max error {worst:.3e}"))?;
    Ok(format!("max |reconstruction - 1| = {worst:.2e} in {:.2}s", t.as_secs_f64()))
}

fn c2_weight_bound() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for poly in reconstruction_corpus() {
        let d = polygon_decompose(&poly).map_err(|e| e.to_string())?;
        let slack = d.weight_sum() - 8.0 / inradius(&poly);
        worst = worst.max(slack);
    }
    ensure(worst <= 1e-9, || format!("weight sum exceeds 8/r by {worst:.3e}"))?;
    Ok(format!("max (sum - 8/r) = {worst:.3e}"))
}

fn c3_disc() -> Outcome {
    let start = Instant::now();
    let disc = Anisotropy::euclidean(2);
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let samples: Vec<Vec2> = (0..1000)
        .map(|_| {
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            Vec2::new(t.cos(), t.sin())
        })
        .collect();
    let dense: Vec<Vec2> = (0..20000)
        .map(|i| {
            let t = std::f64::consts::TAU * (i as f64 + 0.5) / 20000.0;
            Vec2::new(t.cos(), t.sin())
        })
        .collect();
    let mut deltas = Vec::new();
    let mut mass = 0.0;
    for k in 2..=12 {
        let rep = represent(&disc, k).map_err(|e| e.to_string())?;
        let outside = samples.iter().filter(|x| rep.polygon.gauge(x) > 1.0 + 1e-12).count();
        ensure(outside == 0, || format!("depth {k}: {outside} circle points outside P_k"))?;
        let delta = dense
            .iter()
            .chain(&samples)
            .map(|u| (rep.measure.reconstruct(u) - 1.0).abs())
            .fold(0.0, f64::max);
        deltas.push(delta);
        mass = rep.measure.total_mass();
    }
    let t = within(start, 5.0)?;
    ensure(deltas.windows(2).all(|w| w[1] <= w[0]), || format!("errors not monotone: {deltas:?}"))?;
    let d12 = *deltas.last().unwrap();
    ensure(d12 <= 1e-3, || format!("delta_12 = {d12:.3e}"))?;
    let target = std::f64::consts::FRAC_PI_2;
    ensure((mass - target).abs() <= 0.01 * target, || format!("total mass {mass} vs pi/2"))?;
    Ok(format!(
        "contained at depths 2..12, delta_12 = {d12:.2e}, mass = {mass:.6} (pi/2 = {target:.6}), {:.2}s",
        t.as_secs_f64()
    ))
}

fn c4_hypermetric() -> Outcome {
    let start = Instant::now();
    let cube3 = PointGrid::cube(3, &[-1.0, 0.0, 1.0]);
    let search = |norm: &Anisotropy, grid: &PointGrid| hypermetric_search(norm, 7, 2, grid).map_err(|e| e.to_string());
    let linf = Anisotropy::lp(3, f64::INFINITY).unwrap();
    let cert = search(&linf, &cube3)?.ok_or("no violation found for l-infinity")?;
    let v = cert.evaluate(&linf);
    ensure(v > 0.0 && cert.coefficients.iter().sum::<i64>() == 1, || "certificate does not check out".into())?;
    for (name, p) in [("l1", 1.0), ("l2", 2.0)] {
        let norm = Anisotropy::lp(3, p).unwrap();
        ensure(search(&norm, &cube3)?.is_none(), || format!("spurious violation for {name}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let cube2 = PointGrid::cube(2, &[-1.0, 0.0, 1.0]);
    for i in 0..5 {
        let half = rng.random_range(2..=6);
        let norm = Anisotropy::polygonal(random_polygon(&mut rng, half));
        ensure(search(&norm, &cube2)?.is_none(), || format!("spurious violation for planar norm {i}"))?;
    }
    let t = within(start, 60.0)?;
    Ok(format!(
        "l-inf violated (value {v:.3}, {} points); none for l1, l2, 5 polygons; {:.2}s",
        cert.points.len(),
        t.as_secs_f64()
    ))
}

fn c5_slicing() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let gauges: Vec<(Anisotropy, DirectionMeasure)> = (0..5)
        .map(|_| {
            let half = rng.random_range(2..=12);
            let p = random_polygon(&mut rng, half);
            let mu = polygon_decompose(&p).unwrap().measure();
            (Anisotropy::polygonal(p), mu)
        })
        .collect();
    let h = sqrt_h();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let cur = random_current(&mut rng, 20);
        for (sigma, mu) in &gauges {
            let direct = h_mass(&cur, &h, sigma).map_err(|e| e.to_string())?;
            let sliced = h_mass_via_slicing(&cur, &h, mu).map_err(|e| e.to_string())?;
            worst = worst.max((direct - sliced).abs() / direct.max(f64::MIN_POSITIVE));
        }
    }
    let t = within(start, 5.0)?;
    ensure(worst <= 1e-8, || format!("relative gap {worst:.3e}"))?;
    Ok(format!("max relative gap {worst:.2e} over 500 pairs, {:.2}s", t.as_secs_f64()))
}

fn c6_cycles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let h = sqrt_h();
    let mut best_drop = 0.0f64;
    for i in 0..50 {
        let c = random_cyclic_current(&mut rng);
        let out = remove_cycles(&c, &h).map_err(|e| e.to_string())?;
        ensure(boundary_of(&out) == boundary_of(&c), || format!("instance {i}: boundary changed"))?;
        ensure(!has_directed_cycle(&out), || format!("instance {i}: output has a cycle"))?;
        let (before, after) = (Gauge::Euclid.cost(&c, 0.5), Gauge::Euclid.cost(&out, 0.5));
        ensure(after <= before + 1e-12, || format!("instance {i}: cost rose {before} -> {after}"))?;
        best_drop = best_drop.max(before - after);
    }
    ensure(best_drop >= 1e-3, || format!("largest decrease only {best_drop:.3e}"))?;
    Ok(format!("50 instances, boundaries exact, all acyclic, largest decrease {best_drop:.3}"))
}

/// Solver outputs collected for the bound checks.
struct Corpus {
    items: Vec<(TransportProblem, Gauge, Network)>,
}

fn c7_bounds(corpus: &Corpus) -> Outcome {
    let mut violations = 0;
    for (p, g, net) in &corpus.items {
        let m_plus: f64 = p.targets.iter().map(|t| t.m).sum();
        // min over unit u of sigma is 1 for both gauges; y / sqrt(y) peaks at y = M
        let c = m_plus.sqrt();
        let mass: f64 = net.current.edges().iter().map(|e| e.theta.abs() * e.length()).sum();
        let cost = g.cost(&net.current, 0.5);
        let linf = net.current.edges().iter().all(|e| e.theta.abs() <= m_plus * (1.0 + 1e-12));
        if !linf || mass > c * cost * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok(format!("{} solver outputs, zero violations", corpus.items.len()))
}

fn c8_oracle(corpus: &mut Corpus) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let grid: Vec<Vec<f64>> = (0..5).flat_map(|i| (0..5).map(move |j| vec![i as f64, j as f64])).collect();
    let (mut worst_gap, mut worst_ratio) = (f64::NEG_INFINITY, 0.0f64);
    for i in 0..20 {
        let g = if i % 2 == 0 { Gauge::Euclid } else { Gauge::Ell1 };
        let p = random_grid_problem(&mut rng, 3..=4, 5, sqrt_h(), g.sigma());
        let oracle = brute_force_oracle(&p, &grid).map_err(|e| e.to_string())?;
        let ex = solve(&p, &Budget::exhaustive()).map_err(|e| e.to_string())?;
        let lo = solve(&p, &Budget::local(vec![i])).map_err(|e| e.to_string())?;
        let oracle_cost = g.cost(&oracle.current, 0.5);
        let ex_cost = g.cost(&ex.best.current, 0.5);
        let lo_cost = g.cost(&lo.best.current, 0.5);
        ensure(ex_cost <= oracle_cost + 1e-6, || format!("instance {i}: exhaustive {ex_cost} > oracle {oracle_cost}"))?;
        ensure(lo_cost <= 1.05 * ex_cost, || format!("instance {i}: local {lo_cost} > 1.05 x {ex_cost}"))?;
        worst_gap = worst_gap.max(ex_cost - oracle_cost);
        worst_ratio = worst_ratio.max(lo_cost / ex_cost);
        for net in std::iter::once(ex.best).chain(ex.ties).chain([lo.best, oracle]) {
            corpus.items.push((p.clone(), g, net));
        }
    }
    let t = within(start, 120.0)?;
    Ok(format!(
        "max (exhaustive - oracle) = {worst_gap:.3e}, max local/exhaustive = {worst_ratio:.6}, {:.2}s",
        t.as_secs_f64()
    ))
}

fn c9_crossover(corpus: &mut Corpus) -> Outcome {
    let oracle = y_crossover_oracle();
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "y.json", &y_instance(2.0));
    let mut found = Vec::new();
    for seed in ["1", "2"] {
        let out = dir.path().join(format!("seed{seed}"));
        let code = cli(
            &[
                "solve",
                "--input",
                input.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
                "--mode",
                "local",
                "--seed",
                seed,
                "--sweep",
                "h=0.1:3.0:0.1",
            ],
            false,
        );
        ensure(code == 0, || format!("seed {seed}: exit code {code}"))?;
        let cross: Vec<f64> = csv_rows(&out.join("sweep.csv"))
            .iter()
            .filter(|r| &r[0] == "crossover")
            .map(|r| num(&r[2]))
            .collect();
        ensure(cross.len() == 1, || format!("seed {seed}: crossovers {cross:?}"))?;
        found.push(cross[0]);
    }
    ensure((found[0] - found[1]).abs() <= 1e-3, || format!("seeds disagree: {found:?}"))?;
    ensure(found.iter().all(|c| (c - oracle).abs() <= 1e-3), || format!("{found:?} vs oracle {oracle}"))?;
    for h in [0.5, 1.5, 2.5] {
        let p: TransportProblem = serde_json::from_value(y_instance(h)).unwrap();
        let r = solve(&p, &Budget::local(vec![1])).map_err(|e| e.to_string())?;
        corpus.items.push((p, Gauge::Euclid, r.best));
    }
    Ok(format!("crossover {:.5} / {:.5} for two seeds, oracle {oracle:.5}", found[0], found[1]))
}

fn c10_staircase() -> Outcome {
    let dir = TempDir::new().unwrap();
    let input = write(
        dir.path(),
        "l.json",
        &json!({"family": "staircase", "ks": [1, 2, 4, 8, 16], "sigma": {"kind": "constant", "c": 1.0}, "H": {"kind": "power", "alpha": 0.5}}),
    );
    let out = dir.path().join("o");
    let code = cli(&["lsc-experiment", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()], false);
    ensure(code == 0, || format!("exit code {code}"))?;
    let rows = csv_rows(&out.join("report.csv"));
    let members: Vec<_> = rows.iter().filter(|r| &r[0] == "member").collect();
    ensure(members.len() == 5, || "missing rows".into())?;
    let mut flats = Vec::new();
    for r in &members {
        let k = num(&r[1]);
        let (flat, ms, md) = (num(&r[2]), num(&r[3]), num(&r[4]));
        ensure((ms - 2.0).abs() <= 1e-12, || format!("k = {k}: h_mass(S_k) = {ms}"))?;
        ensure((md - 2f64.sqrt()).abs() <= 1e-12, || format!("h_mass(D) = {md}"))?;
        // the triangles between the steps and the diagonal are one filling
        ensure(flat <= 0.5 / k + 1e-9, || format!("k = {k}: flat bound {flat} above 1/(2k)"))?;
        flats.push(flat);
    }
    ensure(flats.windows(2).all(|w| w[1] < w[0]), || format!("flat bounds not decreasing: {flats:?}"))?;
    let summary = rows.iter().find(|r| &r[0] == "summary").ok_or("no summary row")?;
    ensure(&summary[5] == "true", || "liminf check reported false".into())?;
    Ok(format!("h_mass(S_k) = 2, h_mass(D) = sqrt 2, flat bounds {flats:.4?}"))
}

fn c11_flat_zero() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x: Vec<f64> = vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let y: Vec<f64> = vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let expected = (x[0] - y[0]).hypot(x[1] - y[1]).min(2.0);
        let got = flat_distance_zero(
            &ZeroCurrent::dirac(x, 1.0).unwrap(),
            &ZeroCurrent::dirac(y, 1.0).unwrap(),
        )
        .map_err(|e| e.to_string())?;
        worst = worst.max((got - expected).abs());
    }
    ensure(worst <= 1e-9, || format!("max error {worst:.3e}"))?;
    Ok(format!("max |F - min(|x-y|, 2)| = {worst:.2e} on 100 pairs"))
}

/// Every command once into `out`.
fn full_suite(inputs: &Path, out: &Path, single_thread: bool) -> Result<(), String> {
    let runs: [(&str, &str, &[&str]); 9] = [
        ("solve", "quad.json", &["--mode", "local", "--seed", "5", "--oracle-grid", "5x5"]),
        ("solve", "quad.json", &["--mode", "exhaustive"]),
        ("solve", "y.json", &["--sweep", "h=0.5:1.5:0.25"]),
        ("ig-decompose", "poly.json", &[]),
        ("ig-approximate", "disc.json", &["--depth", "10"]),
        ("hypermetric", "linf.json", &[]),
        ("verify-slicing", "slice.json", &[]),
        ("lsc-experiment", "lsc.json", &[]),
        ("flatnorm", "flat.json", &[]),
    ];
    for (i, (cmd, file, extra)) in runs.iter().enumerate() {
        let input = inputs.join(file);
        let dest = out.join(format!("{i}-{cmd}"));
        let mut args = vec![*cmd, "--input", input.to_str().unwrap(), "--out", dest.to_str().unwrap()];
        args.extend_from_slice(extra);
        let code = cli(&args, single_thread);
        ensure(code == 0, || format!("{cmd} on {file} exited {code}"))?;
    }
    Ok(())
}

fn c12_determinism() -> Outcome {
    let dir = TempDir::new().unwrap();
    let inputs = dir.path().join("in");
    fs::create_dir(&inputs).unwrap();
    let sqrt = json!({"kind": "power", "alpha": 0.5});
    let diamond = json!({"kind": "polygonal", "vertices": [[1,0],[0,1],[-1,0],[0,-1]]});
    write(
        &inputs,
        "quad.json",
        &json!({
            "sources": [{"p": [0.0, 0.0], "m": 1.0}, {"p": [0.0, 4.0], "m": 2.0}],
            "targets": [{"p": [4.0, 1.0], "m": 1.5}, {"p": [3.0, 4.0], "m": 1.5}],
            "H": sqrt, "sigma": diamond
        }),
    );
    write(&inputs, "y.json", &y_instance(2.0));
    write(&inputs, "poly.json", &json!({"vertices": [[2,0],[1,1],[-0.5,1.2],[-2,0],[-1,-1],[0.5,-1.2]]}));
    write(&inputs, "disc.json", &json!({"sigma": {"kind": "constant", "c": 1.0}}));
    write(
        &inputs,
        "linf.json",
        &json!({"norm": {"kind": "linf", "dim": 3}, "max_points": 5, "coeff_bound": 2, "grid": {"kind": "cube", "dim": 3, "values": [-1.0, 0.0, 1.0]}}),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(112);
    let currents: Vec<Value> = (0..5).map(|_| serde_json::to_value(random_current(&mut rng, 10)).unwrap()).collect();
    write(&inputs, "slice.json", &json!({"currents": currents, "sigma": {"kind": "constant", "c": 1.0}, "H": sqrt, "depth": 10}));
    write(&inputs, "lsc.json", &json!({"family": "shrinking_oscillation", "ks": [1, 2, 4], "sigma": diamond, "H": sqrt}));
    write(
        &inputs,
        "flat.json",
        &json!({"s": {"atoms": [{"p": [0.0, 0.0], "w": 1.0}, {"p": [1.0, 1.0], "w": -0.5}]}, "t": {"atoms": [{"p": [2.0, 0.5], "w": 0.5}]}}),
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    full_suite(&inputs, &a, false)?;
    full_suite(&inputs, &b, true)?;
    let mut files = Vec::new();
    for run in fs::read_dir(&a).unwrap() {
        for f in fs::read_dir(run.unwrap().path()).unwrap() {
            let p = f.unwrap().path();
            if matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "csv")) {
                files.push(p);
            }
        }
    }
    files.sort();
    for p in &files {
        let twin = b.join(p.strip_prefix(&a).unwrap());
        let same = fs::read(p).ok() == fs::read(&twin).ok();
        ensure(same, || format!("{} differs between runs", p.strip_prefix(&a).unwrap().display()))?;
    }
    Ok(format!("{} JSON/CSV files byte-identical across two runs (second single-threaded)", files.len()))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let mut corpus = Corpus { items: Vec::new() };
    let early = [
        (1, "polygon-norm reconstruction", guarded(c1_reconstruction)),
        (2, "decomposition weight bound", guarded(c2_weight_bound)),
        (3, "disc approximation", guarded(c3_disc)),
        (4, "hypermetric examples", guarded(c4_hypermetric)),
        (5, "slicing identity", guarded(c5_slicing)),
        (6, "cycle removal", guarded(c6_cycles)),
    ];
    // 8 and 9 fill the corpus that 7 checks
    let r8 = guarded(|| c8_oracle(&mut corpus));
    let r9 = guarded(|| c9_crossover(&mut corpus));
    let mut results: Vec<(usize, &str, Outcome)> = early.into();
    results.extend([
        (7, "multiplicity and mass bounds", guarded(|| c7_bounds(&corpus))),
        (8, "solver vs grid oracle", r8),
        (9, "Y crossover", r9),
        (10, "staircase lower semicontinuity", guarded(c10_staircase)),
        (11, "flat distance of Diracs", guarded(c11_flat_zero)),
        (12, "determinism", guarded(c12_determinism)),
    ]);

    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
