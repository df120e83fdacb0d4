// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

use septimate::bench::parse_bench;
use septimate::core::engine::{analyze_circuit, monte_carlo_sep};
use septimate::core::masking::{
    gate_signal_probs, latching_probability, propagate_signal_probs, SignalProbs, PROB_TOLERANCE,
};
use septimate::core::netlist::{Circuit, CircuitBuilder, GateKind};
use septimate::core::statmath::Gaussian;
use septimate::core::techmodel::{
    default_gate_table, default_pulses, AgingConfig, AnalysisConfig, PulseClass, PvConfig, TechLibrary,
};
use septimate::runner;

const CIRCUITS: [&str; 10] = [
    "c432", "c499", "c880", "c1355", "c1908", "c2670", "c3540", "c5315", "c6288", "c7552",
];

/// Published (#gate, #PI, #PO, LvMax); c7552 is not listed there.
const PUBLISHED: [(&str, Option<(usize, usize, usize, u32)>); 10] = [
    ("c432", Some((120, 36, 7, 30))),
    ("c499", Some((162, 41, 32, 28))),
    ("c880", Some((320, 60, 26, 33))),
    ("c1355", Some((506, 41, 32, 30))),
    ("c1908", Some((603, 33, 25, 39))),
    ("c2670", Some((872, 233, 140, 38))),
    ("c3540", Some((1179, 50, 22, 52))),
    ("c5315", Some((1726, 178, 123, 41))),
    ("c6288", Some((2384, 32, 32, 122))),
    ("c7552", None),
];

/// Canonical interface of c7552.
const C7552_IO: (usize, usize) = (207, 108);

type Outcome = Result<String, String>;

fn bench_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../benchmarks/iscas85/{name}.bench"))
}

fn load(name: &str) -> Circuit {
    parse_bench(&std::fs::read_to_string(bench_path(name)).unwrap()).unwrap()
}

fn within_time(start: Instant, limit_s: f64, detail: String) -> Outcome {
    let t = start.elapsed().as_secs_f64();
    if t < limit_s {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {t:.1} s, limit {limit_s} s"))
    }
}

fn parser_fidelity() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut bad = Vec::new();
    for (name, row) in PUBLISHED {
        let text = std::fs::read_to_string(bench_path(name)).map_err(|e| format!("{name}: {e}"))?;
        let c = parse_bench(&text).map_err(|e| format!("{name}: {e}"))?;
        let io = (c.inputs().len(), c.outputs().len());
        let want = row.map_or(C7552_IO, |r| (r.1, r.2));
        if io != want {
            bad.push(format!("{name} PI/PO {io:?} != {want:?}"));
        }
        lines.push(match row {
            Some((gates, _, _, lv)) => format!(
                "    {name:<6} gates {:>5} (table {gates:>5}, {:+5})  LvMax {:>3} (table {lv:>3}, {:+4})",
                c.num_gates(),
                c.num_gates() as i64 - gates as i64,
                c.max_level(),
                c.max_level() as i64 - lv as i64
            ),
            None => format!(
                "    {name:<6} gates {:>5}  LvMax {:>3} (not tabulated)",
                c.num_gates(),
                c.max_level()
            ),
        });
    }
    let took = start.elapsed().as_secs_f64();
    println!("{}", lines.join("\n"));
    if !bad.is_empty() {
        return Err(bad.join("; "));
    }
    within_time(start, 1.0, format!("10 circuits, PI/PO exact, {:.0} ms", took * 1e3))
}

/// A value at two instants: before the strike and while the pulse is present.
const VALUES: [(bool, bool); 3] = [(false, false), (true, true), (false, true)];

fn enumerate(kind: GateKind, inputs: &[SignalProbs]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for code in 0..3usize.pow(inputs.len() as u32) {
        let mut c = code;
        let mut p = 1.0;
        let mut before = Vec::new();
        let mut during = Vec::new();
        for x in inputs {
            let v = c % 3;
            c /= 3;
            p *= [x.p0, x.p1, x.pa][v];
            before.push(VALUES[v].0);
            during.push(VALUES[v].1);
        }
        let b = kind.eval(before.iter().copied());
        let d = kind.eval(during.iter().copied());
        out[if b != d { 2 } else { b as usize }] += p;
    }
    out
}

fn rule_exactness() -> Outcome {
    let start = Instant::now();
    // Every triple on the simplex lattice with five levels (0, 1/4, ..., 1) per probability.
    let mut grid = Vec::new();
    for i in 0..=4 {
        for j in 0..=(4 - i) {
            let (p0, p1) = (i as f64 / 4.0, j as f64 / 4.0);
            grid.push(SignalProbs::new(p0, p1, 1.0 - p0 - p1).unwrap());
        }
    }
    let mut cases = 0usize;
    let mut worst = 0.0f64;
    for kind in GateKind::ALL {
        for arity in 1..=3usize {
            if !kind.accepts_arity(arity) {
                continue;
            }
            for code in 0..grid.len().pow(arity as u32) {
                let mut c = code;
                let inputs: Vec<_> = (0..arity)
                    .map(|_| {
                        let g = grid[c % grid.len()];
                        c /= grid.len();
                        g
                    })
                    .collect();
                let r = gate_signal_probs(kind, &inputs);
                let e = enumerate(kind, &inputs);
                worst = worst
                    .max((r.p0 - e[0]).abs())
                    .max((r.p1 - e[1]).abs())
                    .max((r.pa - e[2]).abs());
                cases += 1;
            }
        }
    }
    let detail = format!("{cases} cases, max deviation {worst:.1e}");
    if worst > 1e-12 || cases < 10_000 {
        return Err(detail);
    }
    within_time(start, 10.0, detail)
}

const DRAWS: usize = 1_000_000;

fn sampled(mut f: impl FnMut() -> f64) -> (f64, f64) {
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for _ in 0..DRAWS {
        let x = f();
        n += 1.0;
        let d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    (mean, (m2 / (n - 1.0)).sqrt())
}

fn normal(g: Gaussian) -> Normal<f64> {
    Normal::new(g.mean(), g.std_dev()).unwrap()
}

/// Worst relative mean and std errors of `model` against sampling.
fn rel_errors(model: Gaussian, (m, s): (f64, f64)) -> (f64, f64) {
    ((model.mean() - m).abs() / m.abs(), (model.std_dev() - s).abs() / s)
}

fn gaussian_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut params = StdRng::seed_from_u64(7);
    let points = 20;
    let mut worst = [(0.0f64, 0.0f64); 3];
    let mut failures = Vec::new();
    let mut note = |op: usize, label: String, e: (f64, f64), worst: &mut [(f64, f64); 3]| {
        worst[op] = (worst[op].0.max(e.0), worst[op].1.max(e.1));
        if e.0 > 0.03 || e.1 > 0.05 {
            failures.push(format!("{label}: mean {:.2}%, std {:.2}%", e.0 * 100.0, e.1 * 100.0));
        }
    };
    for _ in 0..points {
        let sign = if params.random_bool(0.3) { -1.0 } else { 1.0 };
        let mx: f64 = sign * params.random_range(0.5..50.0);
        let my: f64 = params.random_range(0.5..50.0);
        let x = Gaussian::from_std(mx, mx.abs() * params.random_range(0.02..0.5)).unwrap();
        let y = Gaussian::from_std(my, my * params.random_range(0.02..0.5)).unwrap();
        let (nx, ny) = (normal(x), normal(y));
        let s = sampled(|| nx.sample(&mut rng) * ny.sample(&mut rng));
        note(
            0,
            format!("product {x:?} {y:?}"),
            rel_errors(x.product(y), s),
            &mut worst,
        );
    }
    for _ in 0..points {
        let mx: f64 = params.random_range(-100.0..300.0);
        let x = Gaussian::from_std(mx, params.random_range(1.0..40.0)).unwrap();
        let my: f64 = params.random_range(10.0..80.0);
        // Denominator signal-to-noise ratio between 12.5 and 25.
        let y = Gaussian::from_std(my, my / params.random_range(12.5..25.0)).unwrap();
        let (nx, ny) = (normal(x), normal(y));
        let s = sampled(|| nx.sample(&mut rng) / ny.sample(&mut rng));
        let model = Gaussian::ratio_hinkley(x, y).map_err(|e| e.to_string())?;
        note(1, format!("ratio {x:?} {y:?}"), rel_errors(model, s), &mut worst);
    }
    for _ in 0..points {
        let sd: f64 = params.random_range(1.0..50.0);
        let x = Gaussian::from_std(sd * params.random_range(-1.5..3.0), sd).unwrap();
        let nx = normal(x);
        let s = sampled(|| nx.sample(&mut rng).max(0.0));
        note(
            2,
            format!("truncation {x:?}"),
            rel_errors(x.truncate_nonneg(), s),
            &mut worst,
        );
    }
    let detail = format!(
        "{} points x 10^6 draws; worst mean/std error: product {:.2}%/{:.2}%, ratio {:.2}%/{:.2}%, truncation {:.2}%/{:.2}%",
        3 * points,
        worst[0].0 * 100.0,
        worst[0].1 * 100.0,
        worst[1].0 * 100.0,
        worst[1].1 * 100.0,
        worst[2].0 * 100.0,
        worst[2].1 * 100.0
    );
    if !failures.is_empty() {
        return Err(format!("{detail}; {}", failures.join("; ")));
    }
    within_time(start, 60.0, detail)
}

/// Random fanout-free circuit: every net feeds at most one gate, so signal
/// independence holds exactly.
fn random_tree(rng: &mut StdRng, max_gates: usize) -> Circuit {
    let mut b = CircuitBuilder::new();
    let mut pool: Vec<String> = Vec::new();
    let mut n_pi = 0;
    let gates = rng.random_range(3..=max_gates);
    for g in 0..gates {
        let kind = GateKind::ALL[rng.random_range(0..GateKind::ALL.len())];
        let arity = if kind.accepts_arity(1) {
            1
        } else {
            rng.random_range(2..=3)
        };
        let mut ins = Vec::new();
        for _ in 0..arity {
            if !pool.is_empty() && rng.random_bool(0.6) {
                ins.push(pool.swap_remove(rng.random_range(0..pool.len())));
            } else {
                let name = format!("i{n_pi}");
                b.add_input(&name).unwrap();
                n_pi += 1;
                ins.push(name);
            }
        }
        let out = format!("g{g}");
        let refs: Vec<&str> = ins.iter().map(String::as_str).collect();
        b.add_gate(kind, &out, &refs).unwrap();
        pool.push(out);
    }
    for p in pool.iter().filter(|p| p.starts_with('g')) {
        b.add_output(p).unwrap();
    }
    b.build().unwrap()
}

fn degenerate_equivalence() -> Outcome {
    let start = Instant::now();
    let pulses = default_pulses()
        .into_iter()
        .map(|p| PulseClass {
            width_sigma_ps: 0.0,
            ..p
        })
        .collect();
    let analysis = AnalysisConfig {
        mc_samples: 100,
        mc_inner_samples: 1000,
        ..AnalysisConfig::default()
    };
    let lib = TechLibrary::new(&default_gate_table(), pulses, analysis, AgingConfig::FRESH).unwrap();
    let mut rng = StdRng::seed_from_u64(17);
    let mut circuits = vec![("c17".to_string(), load("c17"))];
    for i in 0..20 {
        circuits.push((format!("tree{i}"), random_tree(&mut rng, 20)));
    }
    let (mut gates, mut worst) = (0, 0.0f64);
    let mut failures = Vec::new();
    for (name, c) in &circuits {
        let an = analyze_circuit(c, &lib, PvConfig::NONE, AgingConfig::FRESH).map_err(|e| e.to_string())?;
        let mc = monte_carlo_sep(c, &lib, PvConfig::NONE, AgingConfig::FRESH).map_err(|e| e.to_string())?;
        for (a, m) in an.per_gate.iter().zip(&mc.per_gate) {
            gates += 1;
            let d = (a.best.mean() - m.mean).abs();
            let z = if m.std_error > 0.0 {
                d / m.std_error
            } else if d < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            };
            worst = worst.max(z);
            if z > 3.0 {
                failures.push(format!(
                    "{name} gate {}: {:.5} vs {:.5} (SE {:.1e})",
                    a.gate.0,
                    a.best.mean(),
                    m.mean,
                    m.std_error
                ));
            }
        }
    }
    let detail = format!(
        "{} circuits, {gates} gates, 10^5 samples each, worst deviation {worst:.2} SE",
        circuits.len()
    );
    if !failures.is_empty() {
        return Err(format!("{detail}; {}", failures.join("; ")));
    }
    within_time(start, 120.0, detail)
}

fn rel(a: f64, reference: f64) -> f64 {
    (a - reference).abs() / reference.abs()
}

fn desk_accuracy() -> Outcome {
    let start = Instant::now();
    let lib = TechLibrary::default();
    let pv = PvConfig::new(0.1).unwrap();
    let aging = lib.aging(3.0).unwrap();
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for name in ["c432", "c499", "c880"] {
        let c = load(name);
        let an = analyze_circuit(&c, &lib, pv, aging).map_err(|e| e.to_string())?;
        let mc = monte_carlo_sep(&c, &lib, pv, aging).map_err(|e| e.to_string())?;
        let (am, asd) = (an.circuit_sep.mean(), an.circuit_sep.std_dev());
        let (mm, msd) = (mc.circuit_sep.mean(), mc.circuit_sep.std_dev());
        let (dm, ds) = (rel(am, mm), rel(asd, msd));
        lines.push(format!(
            "    {name:<5} mc {mm:.5} +- {msd:.5}  analytical {am:.5} +- {asd:.5}  diff mu {:.2}% sigma {:.2}%",
            dm * 100.0,
            ds * 100.0
        ));
        if dm > 0.10 || ds > 0.15 {
            failures.push(format!("{name} mu {:.1}% sigma {:.1}%", dm * 100.0, ds * 100.0));
        }
    }
    println!("{}", lines.join("\n"));
    let detail = format!(
        "{}x{} MC samples",
        lib.analysis().mc_samples,
        lib.analysis().mc_inner_samples
    );
    if !failures.is_empty() {
        return Err(format!("{detail}; over tolerance: {}", failures.join(", ")));
    }
    within_time(start, 600.0, detail)
}

fn chain_ok(v: &[f64]) -> (bool, bool) {
    let weak = v.windows(2).all(|w| w[1] >= w[0]);
    let strict = v.windows(2).all(|w| w[1] > w[0]);
    (weak, strict)
}

fn monotonicity() -> Outcome {
    let lib = TechLibrary::default();
    let pvs = [0.05, 0.10, 0.20];
    let years = [3.0, 6.0, 9.0];
    let mut strict_circuits = 0;
    let mut violations = Vec::new();
    for name in CIRCUITS {
        let c = load(name);
        // grid[p][y]
        let mut grid = vec![vec![Gaussian::ZERO; years.len()]; pvs.len()];
        for (i, &p) in pvs.iter().enumerate() {
            for (j, &y) in years.iter().enumerate() {
                let r = analyze_circuit(&c, &lib, PvConfig::new(p).unwrap(), lib.aging(y).unwrap())
                    .map_err(|e| e.to_string())?;
                grid[i][j] = r.circuit_sep;
            }
        }
        let mut all_strict = true;
        for (i, row) in grid.iter().enumerate() {
            let (weak, strict) = chain_ok(&row.iter().map(|g| g.mean()).collect::<Vec<_>>());
            all_strict &= strict;
            if !weak {
                violations.push(format!("{name} mu over aging at pv {}", pvs[i]));
            }
        }
        for (j, &y) in years.iter().enumerate() {
            let (weak, strict) = chain_ok(&grid.iter().map(|row| row[j].std_dev()).collect::<Vec<_>>());
            all_strict &= strict;
            if !weak {
                violations.push(format!("{name} sigma over pv at {y} years"));
            }
        }
        println!(
            "    {name:<6} mu(3/6/9y @10%) {:.5} {:.5} {:.5}  sigma(5/10/20% @3y) {:.5} {:.5} {:.5}{}",
            grid[1][0].mean(),
            grid[1][1].mean(),
            grid[1][2].mean(),
            grid[0][0].std_dev(),
            grid[1][0].std_dev(),
            grid[2][0].std_dev(),
            if all_strict { "" } else { "  (not strict)" }
        );
        if all_strict {
            strict_circuits += 1;
        }
    }
    let detail = format!("{strict_circuits}/10 circuits strictly increasing");
    if !violations.is_empty() || strict_circuits < 8 {
        return Err(format!("{detail}; {}", violations.join(", ")));
    }
    Ok(detail)
}

fn runtime_advantage() -> Outcome {
    let lib = TechLibrary::default();
    let full = *lib.analysis();
    let reduced_outer = 128;
    let reduced = lib
        .clone()
        .with_analysis(AnalysisConfig {
            mc_samples: reduced_outer,
            ..full
        })
        .unwrap();
    let pv = PvConfig::new(0.1).unwrap();
    let aging = lib.aging(3.0).unwrap();
    let scale = full.mc_samples as f64 / reduced_outer as f64;
    println!("    circuit  gates  analytical_ms  mc_ms(>=)  mc_ms(est.)  ratio(<=)");
    let mut failures = Vec::new();
    let mut checked = 0;
    for name in CIRCUITS {
        let c = load(name);
        if c.num_gates() < 500 {
            continue;
        }
        checked += 1;
        let an = runner::analyze(&c, &lib, pv, aging, 1).map_err(|e| e.to_string())?;
        let mc = runner::monte_carlo(&c, &reduced, pv, aging, 1).map_err(|e| e.to_string())?;
        let ratio = an.wall_ms / mc.wall_ms;
        println!(
            "    {name:<7} {:>6} {:>14.1} {:>10.1} {:>12.0} {:>10.4}",
            c.num_gates(),
            an.wall_ms,
            mc.wall_ms,
            mc.wall_ms * scale,
            ratio
        );
        if ratio > 0.5 {
            failures.push(format!("{name} ratio {ratio:.3}"));
        }
    }
    // MC cost grows linearly with the outer sample count, so the reduced run
    // bounds the full-settings run from below.
    let detail = format!(
        "{checked} circuits >= 500 gates; MC timed at {reduced_outer}x{} as a lower bound for {}x{}",
        full.mc_inner_samples, full.mc_samples, full.mc_inner_samples
    );
    if !failures.is_empty() {
        return Err(format!("{detail}; {}", failures.join(", ")));
    }
    Ok(detail)
}

fn determinism() -> Outcome {
    let c17 = bench_path("c17").display().to_string();
    let c432 = bench_path("c432").display().to_string();
    let runs: [Vec<&str>; 4] = [
        vec![
            "compare",
            "--netlist",
            &c17,
            "--netlist",
            &c432,
            "--pv",
            "0.1",
            "--years",
            "3",
            "--samples",
            "256",
            "--inner",
            "50",
            "--seed",
            "9",
        ],
        vec![
            "compare",
            "--netlist",
            &c17,
            "--pv",
            "0.2",
            "--years",
            "6",
            "--samples",
            "256",
            "--inner",
            "50",
            "--format",
            "json",
        ],
        vec![
            "montecarlo",
            "--netlist",
            &c432,
            "--pv",
            "0.05",
            "--years",
            "9",
            "--samples",
            "128",
            "--inner",
            "50",
            "--format",
            "json",
        ],
        vec![
            "analyze",
            "--netlist",
            &c432,
            "--pv",
            "0.1",
            "--years",
            "3",
            "--format",
            "json",
        ],
    ];
    for args in &runs {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let o = Command::new(env!("CARGO_BIN_EXE_septimate"))
                .args(args)
                .env_remove("SEPTIMATE_TECH")
                .output()
                .map_err(|e| e.to_string())?;
            if !o.status.success() {
                return Err(format!("{} failed: {}", args[0], String::from_utf8_lossy(&o.stderr)));
            }
            outputs.push(o.stdout);
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{} {}: reports differ", args[0], args.join(" ")));
        }
    }
    Ok(format!(
        "{} report configurations byte-identical across two runs",
        runs.len()
    ))
}

type Recipe = (usize, Vec<(usize, [usize; 3], bool)>);

fn recipe() -> impl Strategy<Value = Recipe> {
    (
        1usize..8,
        prop::collection::vec((0usize..8, [any::<usize>(); 3], any::<bool>()), 1..=50),
    )
}

/// Acyclic by construction: each gate reads only primary inputs and earlier gates.
fn build(recipe: &Recipe) -> Circuit {
    let (n_pi, gates) = recipe;
    let mut b = CircuitBuilder::new();
    let mut nets: Vec<String> = (0..*n_pi).map(|i| format!("i{i}")).collect();
    for n in &nets {
        b.add_input(n).unwrap();
    }
    let mut used = vec![false; gates.len()];
    for (g, (k, sel, _)) in gates.iter().enumerate() {
        let kind = GateKind::ALL[*k];
        let arity = if kind.accepts_arity(1) { 1 } else { 2 + sel[0] % 2 };
        let ins: Vec<String> = (0..arity).map(|j| nets[sel[j] % nets.len()].clone()).collect();
        for name in &ins {
            if let Some(idx) = name.strip_prefix('g') {
                used[idx.parse::<usize>().unwrap()] = true;
            }
        }
        let refs: Vec<&str> = ins.iter().map(String::as_str).collect();
        b.add_gate(kind, &format!("g{g}"), &refs).unwrap();
        nets.push(format!("g{g}"));
    }
    for (g, (_, _, flag)) in gates.iter().enumerate() {
        if *flag || !used[g] {
            b.add_output(&format!("g{g}")).unwrap();
        }
    }
    b.build().unwrap()
}

fn triple() -> impl Strategy<Value = SignalProbs> {
    (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| {
        let p1 = (1.0 - a) * b;
        SignalProbs::new(a, p1, (1.0 - a - p1).max(0.0)).unwrap()
    })
}

fn invariants() -> Outcome {
    let start = Instant::now();
    let cases = 1000;
    let config = || Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let lib = TechLibrary::default();
    let run = |name: &str, result: Result<(), String>| result.map_err(|e| format!("{name}: {e}"));

    run(
        "probability conservation",
        TestRunner::new(config())
            .run(&(recipe(), prop::collection::vec(triple(), 8)), |(r, seed)| {
                let c = build(&r);
                let probs = propagate_signal_probs(&c, &seed[..c.inputs().len()]).unwrap();
                for p in probs {
                    prop_assert!((p.p0 + p.p1 + p.pa - 1.0).abs() <= PROB_TOLERANCE);
                    prop_assert!(p.p0 >= 0.0 && p.p1 >= 0.0 && p.pa >= 0.0);
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    run(
        "nonnegative variances",
        TestRunner::new(config())
            .run(&(recipe(), 0.0f64..0.3, 0.0f64..10.0), |(r, pv, years)| {
                let c = build(&r);
                let res = analyze_circuit(&c, &lib, PvConfig::new(pv).unwrap(), lib.aging(years).unwrap()).unwrap();
                prop_assert!(res.circuit_sep.variance() >= 0.0);
                prop_assert!((0.0..=1.0).contains(&res.circuit_sep.mean()));
                for g in &res.per_gate {
                    prop_assert!(g.best.variance() >= 0.0);
                    for o in &g.outputs {
                        prop_assert!(o.lp.variance() >= 0.0 && o.sep.variance() >= 0.0);
                        prop_assert!((0.0..=1.0).contains(&o.lp.mean()));
                    }
                }
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    run(
        "latching clamp",
        TestRunner::new(config())
            .run(
                &(-2000.0f64..5000.0, 0.0f64..1e5, 0.0f64..200.0, 100.0f64..2000.0),
                |(m, v, lw, tclk)| {
                    let lp = latching_probability(Gaussian::new(m, v).unwrap(), lw, tclk).unwrap();
                    prop_assert!((0.0..=1.0).contains(&lp.mean()));
                    prop_assert!(lp.variance() >= 0.0);
                    Ok(())
                },
            )
            .map_err(|e| e.to_string()),
    )?;

    run(
        "dead-pulse zero contribution",
        TestRunner::new(config())
            .run(&(recipe(), 0.5f64..8.0), |(r, width)| {
                let c = build(&r);
                let pulses = vec![PulseClass {
                    width_mean_ps: width,
                    width_sigma_ps: 0.0,
                    weight: 1.0,
                }];
                let narrow = TechLibrary::new(
                    &default_gate_table(),
                    pulses,
                    AnalysisConfig::default(),
                    AgingConfig::FRESH,
                )
                .unwrap();
                let res = analyze_circuit(&c, &narrow, PvConfig::NONE, AgingConfig::FRESH).unwrap();
                let cfg = narrow.analysis();
                let direct = (width + cfg.latching_window_ps) / cfg.tclk_ps;
                let mut expected = 0.0;
                for g in &res.per_gate {
                    let own = c.gate(g.gate).output;
                    for o in &g.outputs {
                        if o.output == own {
                            prop_assert!((o.sep.mean() - direct).abs() <= 1e-12);
                        } else {
                            prop_assert_eq!(o.sep, Gaussian::ZERO);
                        }
                    }
                    if c.is_output(own) {
                        expected += direct;
                    }
                }
                expected /= c.num_gates() as f64;
                prop_assert!((res.circuit_sep.mean() - expected).abs() <= 1e-12);
                Ok(())
            })
            .map_err(|e| e.to_string()),
    )?;

    within_time(
        start,
        300.0,
        format!("4 properties x {cases} random circuits/inputs (<= 50 gates)"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("parser fidelity", parser_fidelity),
        ("propagation-rule exactness", rule_exactness),
        ("Gaussian-algebra oracles", gaussian_oracles),
        ("degenerate equivalence", degenerate_equivalence),
        ("analytical vs MC accuracy", desk_accuracy),
        ("monotonicity sweeps", monotonicity),
        ("runtime advantage", runtime_advantage),
        ("determinism", determinism),
        ("invariant suite", invariants),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} ({name}): PASS [{t:.1} s] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL [{t:.1} s] {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
