// SPDX-License-Identifier: Apache-2.0

//! Technology parameters under process variation and BTI aging.
//!
//! Every nominal parameter `p` turns into a Gaussian with mean
//! `p * (1 + alpha * years^exponent)` (aging shifts the mean) and standard
//! deviation `relative_sigma * aged_mean` (process variation sets the spread).

use alloc::vec::Vec;

use crate::netlist::GateKind;
use crate::statmath::Gaussian;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TechError {
    #[error("no technology entry for gate kind {0}")]
    MissingGate(GateKind),
    #[error("parameter `{name}` must be strictly positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("pulse weights sum to {0}, expected 1")]
    PulseWeights(f64),
    #[error("pulse library is empty")]
    NoPulses,
    #[error("pulse class index {index} out of range (library has {len})")]
    PulseIndex { index: usize, len: usize },
    #[error("invalid configuration: {0}")]
    Invalid(&'static str),
}

/// Nominal electrical characterization of one gate kind, in picoseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTechParams {
    pub delay_ps: f64,
    pub t_rise_ps: f64,
    pub t_fall_ps: f64,
}

impl GateTechParams {
    fn validate(&self) -> Result<(), TechError> {
        positive("delay_ps", self.delay_ps)?;
        positive("t_rise_ps", self.t_rise_ps)?;
        positive("t_fall_ps", self.t_fall_ps)
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), TechError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(TechError::NonPositive { name, value })
    }
}

/// One energy class of particle-strike pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseClass {
    pub width_mean_ps: f64,
    pub width_sigma_ps: f64,
    pub weight: f64,
}

/// Process variation: standard deviation of every parameter as a fraction of its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvConfig {
    relative_sigma: f64,
}

impl PvConfig {
    pub const NONE: PvConfig = PvConfig { relative_sigma: 0.0 };

    pub fn new(relative_sigma: f64) -> Result<Self, TechError> {
        if !(0.0..=0.5).contains(&relative_sigma) {
            return Err(TechError::Invalid("relative sigma must lie in [0, 0.5]"));
        }
        Ok(PvConfig { relative_sigma })
    }

    pub fn relative_sigma(&self) -> f64 {
        self.relative_sigma
    }
}

/// Power-law BTI degradation `delta_d / d = alpha * years^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgingConfig {
    years: f64,
    alpha: f64,
    exponent: f64,
}

impl AgingConfig {
    pub const DEFAULT_ALPHA: f64 = 0.01;
    pub const DEFAULT_EXPONENT: f64 = 0.2;

    pub const FRESH: AgingConfig = AgingConfig {
        years: 0.0,
        alpha: Self::DEFAULT_ALPHA,
        exponent: Self::DEFAULT_EXPONENT,
    };

    pub fn new(years: f64, alpha: f64, exponent: f64) -> Result<Self, TechError> {
        if !(years >= 0.0 && years.is_finite()) {
            return Err(TechError::Invalid("aging years must be >= 0"));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(TechError::Invalid("aging alpha must be >= 0"));
        }
        if !(exponent > 0.0 && exponent <= 1.0) {
            return Err(TechError::Invalid("aging exponent must lie in (0, 1]"));
        }
        Ok(AgingConfig { years, alpha, exponent })
    }

    pub fn with_years(self, years: f64) -> Result<Self, TechError> {
        Self::new(years, self.alpha, self.exponent)
    }

    pub fn years(&self) -> f64 {
        self.years
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Multiplicative mean shift `1 + alpha * years^exponent`.
    pub fn factor(&self) -> f64 {
        1.0 + self.alpha * libm::pow(self.years, self.exponent)
    }
}

/// Global analysis settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    /// Clock period.
    pub tclk_ps: f64,
    /// Latching window (setup + hold) of the capturing flip-flops.
    pub latching_window_ps: f64,
    pub vdd: f64,
    /// A pulse whose survival probability falls below this is electrically masked.
    pub mask_epsilon: f64,
    /// Pulse-width to rise/fall-time ratio above which a pulse swings rail to rail.
    pub edge_factor: f64,
    /// Monte Carlo outer (process/aging realization) sample count.
    pub mc_samples: usize,
    /// Monte Carlo inner (input vector and strike) samples per realization.
    pub mc_inner_samples: usize,
    pub rng_seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tclk_ps: 1000.0,
            latching_window_ps: 50.0,
            vdd: 1.0,
            mask_epsilon: 1e-6,
            edge_factor: 1.25,
            mc_samples: 10_000,
            mc_inner_samples: 100,
            rng_seed: 42,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), TechError> {
        positive("tclk_ps", self.tclk_ps)?;
        positive("vdd", self.vdd)?;
        positive("edge_factor", self.edge_factor)?;
        if !(self.latching_window_ps >= 0.0 && self.latching_window_ps < self.tclk_ps) {
            return Err(TechError::Invalid("latching window must satisfy 0 <= lw < tclk"));
        }
        if !(self.mask_epsilon > 0.0 && self.mask_epsilon <= 0.01) {
            return Err(TechError::Invalid("mask epsilon must lie in (0, 0.01]"));
        }
        if self.mc_samples < 100 {
            return Err(TechError::Invalid("Monte Carlo needs at least 100 outer samples"));
        }
        if self.mc_inner_samples < 2 {
            return Err(TechError::Invalid("Monte Carlo needs at least 2 inner samples"));
        }
        Ok(())
    }
}

/// A validated technology library: gate characterization, strike pulse
/// classes, analysis defaults and the aging-law coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TechLibrary {
    gates: [GateTechParams; 8],
    pulses: Vec<PulseClass>,
    analysis: AnalysisConfig,
    aging: AgingConfig,
}

impl TechLibrary {
    /// `gates` must cover every [`GateKind`]. `aging` supplies alpha and the
    /// exponent; its `years` is ignored.
    pub fn new(
        gates: &[(GateKind, GateTechParams)],
        pulses: Vec<PulseClass>,
        analysis: AnalysisConfig,
        aging: AgingConfig,
    ) -> Result<Self, TechError> {
        let mut table = [None; 8];
        for &(kind, params) in gates {
            params.validate()?;
            table[kind.index()] = Some(params);
        }
        let mut resolved = [GateTechParams {
            delay_ps: 0.0,
            t_rise_ps: 0.0,
            t_fall_ps: 0.0,
        }; 8];
        for kind in GateKind::ALL {
            resolved[kind.index()] = table[kind.index()].ok_or(TechError::MissingGate(kind))?;
        }
        if pulses.is_empty() {
            return Err(TechError::NoPulses);
        }
        let mut total = 0.0;
        for p in &pulses {
            positive("pulse mean_ps", p.width_mean_ps)?;
            if !(p.width_sigma_ps >= 0.0 && p.width_sigma_ps.is_finite()) {
                return Err(TechError::Invalid("pulse sigma_ps must be >= 0"));
            }
            if !(p.weight >= 0.0 && p.weight <= 1.0) {
                return Err(TechError::Invalid("pulse weight must lie in [0, 1]"));
            }
            total += p.weight;
        }
        if libm::fabs(total - 1.0) > 1e-9 {
            return Err(TechError::PulseWeights(total));
        }
        analysis.validate()?;
        Ok(TechLibrary {
            gates: resolved,
            pulses,
            analysis,
            aging: aging.with_years(0.0)?,
        })
    }

    pub fn gate_params(&self, kind: GateKind) -> &GateTechParams {
        &self.gates[kind.index()]
    }

    pub fn pulses(&self) -> &[PulseClass] {
        &self.pulses
    }

    pub fn analysis(&self) -> &AnalysisConfig {
        &self.analysis
    }

    /// Replaces the analysis settings after validating them.
    pub fn with_analysis(mut self, analysis: AnalysisConfig) -> Result<Self, TechError> {
        analysis.validate()?;
        self.analysis = analysis;
        Ok(self)
    }

    /// Aging law of the library evaluated at `years`.
    pub fn aging(&self, years: f64) -> Result<AgingConfig, TechError> {
        self.aging.with_years(years)
    }
}

/// Statistical electrical parameters of one gate instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateElectrical {
    /// Propagation delay of either pulse edge; the two edges vary independently.
    pub delay: Gaussian,
    pub t_rise: Gaussian,
    pub t_fall: Gaussian,
}

fn varied(nominal: f64, pv: PvConfig, aging: AgingConfig) -> Gaussian {
    let mean = nominal * aging.factor();
    let sd = pv.relative_sigma() * mean;
    Gaussian::raw(mean, sd * sd)
}

/// Delay and transition times of a gate kind after aging and process variation.
pub fn effective_delay(kind: GateKind, pv: PvConfig, aging: AgingConfig, library: &TechLibrary) -> GateElectrical {
    let p = library.gate_params(kind);
    GateElectrical {
        delay: varied(p.delay_ps, pv, aging),
        t_rise: varied(p.t_rise_ps, pv, aging),
        t_fall: varied(p.t_fall_ps, pv, aging),
    }
}

/// Initial strike pulse for one energy class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialPulse {
    /// Full width distribution: intra-class spread plus process variation.
    pub width: Gaussian,
    /// Width distribution across process realizations only (class spread removed).
    pub realization: Gaussian,
    pub weight: f64,
}

/// Pulse of class `class_index` at a struck gate. Aging weakens the restoring
/// current of the struck gate and widens its pulse by the same factor as the
/// gate delays; process variation adds `relative_sigma * mean` of spread.
pub fn initial_pulse(
    library: &TechLibrary,
    class_index: usize,
    pv: PvConfig,
    aging: AgingConfig,
) -> Result<InitialPulse, TechError> {
    let class = library.pulses.get(class_index).ok_or(TechError::PulseIndex {
        index: class_index,
        len: library.pulses.len(),
    })?;
    let mean = class.width_mean_ps * aging.factor();
    let pv_sd = pv.relative_sigma() * mean;
    let pv_var = pv_sd * pv_sd;
    let class_var = class.width_sigma_ps * class.width_sigma_ps;
    Ok(InitialPulse {
        width: Gaussian::raw(mean, class_var + pv_var),
        realization: Gaussian::raw(mean, pv_var),
        weight: class.weight,
    })
}

/// The library shipped with the tool (also embedded as `tech/default.toml` in
/// the command-line crate).
pub fn default_gate_table() -> [(GateKind, GateTechParams); 8] {
    let p = |d, r, f| GateTechParams {
        delay_ps: d,
        t_rise_ps: r,
        t_fall_ps: f,
    };
    [
        (GateKind::And, p(26.0, 20.0, 18.0)),
        (GateKind::Or, p(30.0, 22.0, 18.0)),
        (GateKind::Nand, p(16.0, 22.0, 20.0)),
        (GateKind::Nor, p(20.0, 28.0, 20.0)),
        (GateKind::Not, p(12.0, 18.0, 15.0)),
        (GateKind::Buf, p(20.0, 18.0, 16.0)),
        (GateKind::Xor, p(34.0, 28.0, 26.0)),
        (GateKind::Xnor, p(34.0, 28.0, 26.0)),
    ]
}

/// Three strike-energy classes used when no library file is given.
pub fn default_pulses() -> Vec<PulseClass> {
    [(100.0, 10.0, 0.5), (250.0, 25.0, 0.3), (400.0, 40.0, 0.2)]
        .into_iter()
        .map(|(m, s, w)| PulseClass {
            width_mean_ps: m,
            width_sigma_ps: s,
            weight: w,
        })
        .collect()
}

impl Default for TechLibrary {
    fn default() -> Self {
        TechLibrary::new(
            &default_gate_table(),
            default_pulses(),
            AnalysisConfig::default(),
            AgingConfig::FRESH,
        )
        .expect("built-in library is valid")
    }
}
