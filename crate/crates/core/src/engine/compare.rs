// SPDX-License-Identifier: Apache-2.0

use super::{CircuitSep, ConfigEcho, McResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompareError {
    #[error("results were computed under different settings: {analytical:?} vs {monte_carlo:?}")]
    ConfigMismatch {
        analytical: ConfigEcho,
        monte_carlo: ConfigEcho,
    },
}

/// Circuit-level agreement between the analytical and Monte Carlo engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub mc_mu: f64,
    pub mc_sigma: f64,
    pub prop_mu: f64,
    pub prop_sigma: f64,
    /// `|prop - mc| / prop * 100`; `None` when the analytical value is zero.
    pub diff_mu_pct: Option<f64>,
    pub diff_sigma_pct: Option<f64>,
}

/// Percentage difference relative to `reference`.
pub fn diff_pct(reference: f64, other: f64) -> Option<f64> {
    if reference == 0.0 {
        return if other == 0.0 { Some(0.0) } else { None };
    }
    Some(libm::fabs(reference - other) / libm::fabs(reference) * 100.0)
}

pub fn compare(analytical: &CircuitSep, mc: &McResult) -> Result<Comparison, CompareError> {
    if analytical.config != mc.config {
        return Err(CompareError::ConfigMismatch {
            analytical: analytical.config,
            monte_carlo: mc.config,
        });
    }
    let prop_mu = analytical.circuit_sep.mean();
    let prop_sigma = analytical.circuit_sep.std_dev();
    let mc_mu = mc.circuit_sep.mean();
    let mc_sigma = mc.circuit_sep.std_dev();
    Ok(Comparison {
        mc_mu,
        mc_sigma,
        prop_mu,
        prop_sigma,
        diff_mu_pct: diff_pct(prop_mu, mc_mu),
        diff_sigma_pct: diff_pct(prop_sigma, mc_sigma),
    })
}

/// How many times faster the analytical run was.
pub fn speedup(analytical_ms: f64, mc_ms: f64) -> Option<f64> {
    (analytical_ms > 0.0).then(|| mc_ms / analytical_ms)
}
