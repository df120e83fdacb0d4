// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use septimate_core::engine::{compare, speedup};
use septimate_core::netlist::Circuit;
use septimate_core::techmodel::{AgingConfig, PvConfig, TechLibrary};

use crate::bench::parse_bench;
use crate::report::{self, CircuitReport, CompareRow, RuntimeRow};
use crate::runner;
use crate::techfile::{default_library, load_library_file};

/// Environment variable naming the technology file used when `--tech` is absent.
pub const TECH_ENV: &str = "SEPTIMATE_TECH";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "septimate",
    version,
    about = "Soft-error probability of combinational circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytical SEP of every gate and of the circuit.
    Analyze(AnalyzeArgs),
    /// Monte Carlo fault-injection SEP.
    Montecarlo(McArgs),
    /// Analytical and Monte Carlo SEP side by side.
    Compare(McArgs),
    /// Comparisons over every combination of process variation and aging.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// `.bench` netlist; repeat for several circuits.
    #[arg(long, required = true)]
    netlist: Vec<PathBuf>,
    /// Technology library (TOML). Falls back to $SEPTIMATE_TECH, then the built-in library.
    #[arg(long)]
    tech: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Report destination; standard output if absent. A directory for `sweep`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Where to write the (circuit, method, wall_ms) runtime table.
    #[arg(long)]
    runtime_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Sampling {
    /// Monte Carlo RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo outer (process/aging realization) samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Monte Carlo inner samples per realization.
    #[arg(long)]
    inner: Option<usize>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    /// Relative process-variation sigma, in [0, 0.5].
    #[arg(long, default_value_t = 0.0)]
    pv: f64,
    /// Aging time in years.
    #[arg(long, default_value_t = 0.0)]
    years: f64,
}

#[derive(Args, Debug)]
struct McArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    sampling: Sampling,
    /// Relative process-variation sigma, in [0, 0.5].
    #[arg(long, default_value_t = 0.0)]
    pv: f64,
    /// Aging time in years.
    #[arg(long, default_value_t = 0.0)]
    years: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    sampling: Sampling,
    /// Comma-separated process-variation sigmas.
    #[arg(long, value_delimiter = ',', required = true)]
    pv: Vec<f64>,
    /// Comma-separated aging times in years.
    #[arg(long, value_delimiter = ',', required = true)]
    years: Vec<f64>,
    /// Skip the Monte Carlo reference and report analytical values only.
    #[arg(long)]
    no_mc: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Parse(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Runtime(m) => m,
        }
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

struct Loaded {
    name: String,
    circuit: Circuit,
}

fn load_circuits(paths: &[PathBuf]) -> Result<Vec<Loaded>, CliError> {
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
            let circuit = parse_bench(&text).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?;
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string());
            Ok(Loaded { name, circuit })
        })
        .collect()
}

fn load_tech(common: &Common, sampling: Option<&Sampling>) -> Result<TechLibrary, CliError> {
    let path = common
        .tech
        .clone()
        .or_else(|| std::env::var_os(TECH_ENV).filter(|v| !v.is_empty()).map(PathBuf::from));
    let lib = match path {
        Some(p) => load_library_file(&p).map_err(|e| CliError::Parse(format!("{}: {e}", p.display())))?,
        None => default_library(),
    };
    let Some(s) = sampling else { return Ok(lib) };
    let mut analysis = *lib.analysis();
    if let Some(seed) = s.seed {
        analysis.rng_seed = seed;
    }
    if let Some(n) = s.samples {
        analysis.mc_samples = n;
    }
    if let Some(n) = s.inner {
        analysis.mc_inner_samples = n;
    }
    lib.with_analysis(analysis).map_err(|e| CliError::Usage(e.to_string()))
}

fn settings(lib: &TechLibrary, pv: f64, years: f64) -> Result<(PvConfig, AgingConfig), CliError> {
    let pv = PvConfig::new(pv).map_err(|e| CliError::Usage(e.to_string()))?;
    let aging = lib.aging(years).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((pv, aging))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(runtime),
    }
}

fn emit_runtime(common: &Common, rows: &[RuntimeRow]) -> Result<(), CliError> {
    match &common.runtime_out {
        Some(p) => emit(Some(p), &report::runtime_csv(rows)),
        None => Ok(()),
    }
}

fn circuit_reports(reports: &[CircuitReport], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => report::circuit_csv(reports),
        OutputFormat::Json => report::to_json(&reports),
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let lib = load_tech(&a.common, None)?;
    let (pv, aging) = settings(&lib, a.pv, a.years)?;
    let circuits = load_circuits(&a.common.netlist)?;
    let mut reports = Vec::new();
    let mut times = Vec::new();
    for c in &circuits {
        let r = runner::analyze(&c.circuit, &lib, pv, aging, a.common.jobs).map_err(runtime)?;
        reports.push(CircuitReport::analytical(&c.name, &c.circuit, &r.value));
        times.push(RuntimeRow {
            circuit: c.name.clone(),
            method: "analytical",
            wall_ms: r.wall_ms,
        });
    }
    emit(a.common.out.as_deref(), &circuit_reports(&reports, a.common.format))?;
    emit_runtime(&a.common, &times)
}

fn cmd_montecarlo(a: McArgs) -> Result<(), CliError> {
    let lib = load_tech(&a.common, Some(&a.sampling))?;
    let (pv, aging) = settings(&lib, a.pv, a.years)?;
    let circuits = load_circuits(&a.common.netlist)?;
    let mut reports = Vec::new();
    let mut times = Vec::new();
    for c in &circuits {
        let r = runner::monte_carlo(&c.circuit, &lib, pv, aging, a.common.jobs).map_err(runtime)?;
        reports.push(CircuitReport::monte_carlo(&c.name, &c.circuit, &r.value));
        times.push(RuntimeRow {
            circuit: c.name.clone(),
            method: "monte_carlo",
            wall_ms: r.wall_ms,
        });
    }
    emit(a.common.out.as_deref(), &circuit_reports(&reports, a.common.format))?;
    emit_runtime(&a.common, &times)
}

fn compare_rows(
    circuits: &[Loaded],
    lib: &TechLibrary,
    pv: PvConfig,
    aging: AgingConfig,
    jobs: usize,
    times: &mut Vec<RuntimeRow>,
) -> Result<Vec<CompareRow>, CliError> {
    let mut rows = Vec::new();
    for c in circuits {
        let an = runner::analyze(&c.circuit, lib, pv, aging, jobs).map_err(runtime)?;
        let mc = runner::monte_carlo(&c.circuit, lib, pv, aging, jobs).map_err(runtime)?;
        let cmp = compare(&an.value, &mc.value).map_err(runtime)?;
        rows.push(CompareRow::new(&c.name, &cmp));
        if let Some(x) = speedup(an.wall_ms, mc.wall_ms) {
            eprintln!(
                "{}: analytical {:.1} ms, monte carlo {:.1} ms, speedup {x:.2}x",
                c.name, an.wall_ms, mc.wall_ms
            );
        }
        times.push(RuntimeRow {
            circuit: c.name.clone(),
            method: "analytical",
            wall_ms: an.wall_ms,
        });
        times.push(RuntimeRow {
            circuit: c.name.clone(),
            method: "monte_carlo",
            wall_ms: mc.wall_ms,
        });
    }
    Ok(rows)
}

fn compare_table(rows: &[CompareRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => report::compare_csv(rows),
        OutputFormat::Json => report::to_json(&rows),
    }
}

fn cmd_compare(a: McArgs) -> Result<(), CliError> {
    let lib = load_tech(&a.common, Some(&a.sampling))?;
    let (pv, aging) = settings(&lib, a.pv, a.years)?;
    let circuits = load_circuits(&a.common.netlist)?;
    let mut times = Vec::new();
    let rows = compare_rows(&circuits, &lib, pv, aging, a.common.jobs, &mut times)?;
    emit(a.common.out.as_deref(), &compare_table(&rows, a.common.format))?;
    emit_runtime(&a.common, &times)
}

#[derive(Serialize)]
struct AnalyticalRow {
    circuit: String,
    prop_mu: f64,
    prop_sigma: f64,
}

fn analytical_table(rows: &[AnalyticalRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report::to_json(&rows),
        OutputFormat::Csv => {
            let mut s = String::from("circuit,prop_mu,prop_sigma\n");
            for r in rows {
                s.push_str(&format!("{},{:.6e},{:.6e}\n", r.circuit, r.prop_mu, r.prop_sigma));
            }
            s
        }
    }
}

fn cmd_sweep(a: SweepArgs) -> Result<(), CliError> {
    let lib = load_tech(&a.common, Some(&a.sampling))?;
    let combos =
        a.pv.iter()
            .flat_map(|&pv| a.years.iter().map(move |&y| (pv, y)))
            .map(|(pv, y)| settings(&lib, pv, y).map(|s| (pv, y, s)))
            .collect::<Result<Vec<_>, _>>()?;
    let circuits = load_circuits(&a.common.netlist)?;
    if let Some(dir) = &a.common.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    }
    let ext = match a.common.format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    let mut times = Vec::new();
    let mut stdout_text = String::new();
    for (pv_value, years, (pv, aging)) in combos {
        let table = if a.no_mc {
            let mut rows = Vec::new();
            for c in &circuits {
                let an = runner::analyze(&c.circuit, &lib, pv, aging, a.common.jobs).map_err(runtime)?;
                rows.push(AnalyticalRow {
                    circuit: c.name.clone(),
                    prop_mu: an.value.circuit_sep.mean(),
                    prop_sigma: an.value.circuit_sep.std_dev(),
                });
                times.push(RuntimeRow {
                    circuit: c.name.clone(),
                    method: "analytical",
                    wall_ms: an.wall_ms,
                });
            }
            analytical_table(&rows, a.common.format)
        } else {
            let rows = compare_rows(&circuits, &lib, pv, aging, a.common.jobs, &mut times)?;
            compare_table(&rows, a.common.format)
        };
        match &a.common.out {
            Some(dir) => emit(Some(&dir.join(format!("pv{pv_value}_years{years}.{ext}"))), &table)?,
            None => {
                if !stdout_text.is_empty() {
                    stdout_text.push('\n');
                }
                stdout_text.push_str(&format!("# pv={pv_value} years={years}\n"));
                stdout_text.push_str(&table);
            }
        }
    }
    if a.common.out.is_none() {
        emit(None, &stdout_text)?;
    }
    emit_runtime(&a.common, &times)
}

/// Runs the tool on `args` (including the program name) and returns the
/// process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Montecarlo(a) => cmd_montecarlo(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("septimate: {}", e.message());
            e.code()
        }
    }
}
