// SPDX-License-Identifier: Apache-2.0

//! TOML technology library files.
//!
//! ```toml
//! [gate.NAND]          # one section per gate kind, all eight required
//! delay_ps = 16.0
//! t_rise_ps = 22.0
//! t_fall_ps = 20.0
//!
//! [pulse.1]            # strike classes, ordered by their integer label
//! mean_ps = 100.0
//! sigma_ps = 10.0
//! weight = 0.5
//!
//! [analysis]           # optional; every key optional
//! tclk_ps = 1000.0
//! lw_ps = 50.0
//! vdd = 1.0
//! epsilon = 1e-6
//! edge_factor = 1.25
//! samples = 10000      # Monte Carlo outer samples
//! inner_samples = 100  # Monte Carlo inner samples per outer sample
//! seed = 42
//!
//! [aging]              # optional
//! alpha = 0.01
//! exponent = 0.2
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use septimate_core::netlist::GateKind;
use septimate_core::techmodel::{AgingConfig, AnalysisConfig, GateTechParams, PulseClass, TechError, TechLibrary};

/// The shipped default library.
pub const DEFAULT_TECH: &str = include_str!("../tech/default.toml");

#[derive(Debug, thiserror::Error)]
pub enum TechFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed technology file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("unknown gate kind `{0}` in technology file")]
    UnknownGate(String),
    #[error("pulse section label `{0}` is not an integer")]
    PulseLabel(String),
    #[error(transparent)]
    Tech(#[from] TechError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileGate {
    delay_ps: f64,
    t_rise_ps: f64,
    t_fall_ps: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePulse {
    mean_ps: f64,
    sigma_ps: f64,
    weight: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileAnalysis {
    tclk_ps: Option<f64>,
    lw_ps: Option<f64>,
    vdd: Option<f64>,
    epsilon: Option<f64>,
    edge_factor: Option<f64>,
    samples: Option<usize>,
    inner_samples: Option<usize>,
    seed: Option<u64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileAging {
    alpha: Option<f64>,
    exponent: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TechFile {
    #[serde(default)]
    gate: BTreeMap<String, FileGate>,
    #[serde(default)]
    pulse: BTreeMap<String, FilePulse>,
    #[serde(default)]
    analysis: FileAnalysis,
    #[serde(default)]
    aging: FileAging,
}

pub fn load_library(text: &str) -> Result<TechLibrary, TechFileError> {
    let file: TechFile = toml::from_str(text)?;
    let mut gates = Vec::with_capacity(file.gate.len());
    for (name, g) in &file.gate {
        let kind = GateKind::from_name(name).ok_or_else(|| TechFileError::UnknownGate(name.clone()))?;
        gates.push((
            kind,
            GateTechParams {
                delay_ps: g.delay_ps,
                t_rise_ps: g.t_rise_ps,
                t_fall_ps: g.t_fall_ps,
            },
        ));
    }
    let mut pulses = Vec::with_capacity(file.pulse.len());
    for (label, p) in &file.pulse {
        let n: i64 = label
            .trim()
            .parse()
            .map_err(|_| TechFileError::PulseLabel(label.clone()))?;
        pulses.push((n, p));
    }
    pulses.sort_by_key(|(n, _)| *n);
    let pulses = pulses
        .into_iter()
        .map(|(_, p)| PulseClass {
            width_mean_ps: p.mean_ps,
            width_sigma_ps: p.sigma_ps,
            weight: p.weight,
        })
        .collect();

    let d = AnalysisConfig::default();
    let a = &file.analysis;
    let analysis = AnalysisConfig {
        tclk_ps: a.tclk_ps.unwrap_or(d.tclk_ps),
        latching_window_ps: a.lw_ps.unwrap_or(d.latching_window_ps),
        vdd: a.vdd.unwrap_or(d.vdd),
        mask_epsilon: a.epsilon.unwrap_or(d.mask_epsilon),
        edge_factor: a.edge_factor.unwrap_or(d.edge_factor),
        mc_samples: a.samples.unwrap_or(d.mc_samples),
        mc_inner_samples: a.inner_samples.unwrap_or(d.mc_inner_samples),
        rng_seed: a.seed.unwrap_or(d.rng_seed),
    };
    let aging = AgingConfig::new(
        0.0,
        file.aging.alpha.unwrap_or(AgingConfig::DEFAULT_ALPHA),
        file.aging.exponent.unwrap_or(AgingConfig::DEFAULT_EXPONENT),
    )?;
    Ok(TechLibrary::new(&gates, pulses, analysis, aging)?)
}

pub fn load_library_file(path: &Path) -> Result<TechLibrary, TechFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| TechFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_library(&text)
}

pub fn default_library() -> TechLibrary {
    load_library(DEFAULT_TECH).expect("shipped library is valid")
}
