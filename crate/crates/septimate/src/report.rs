// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON renderings of analysis results. Reports never contain wall
//! times, so identical runs produce identical bytes; timings go to a separate
//! runtime table.

use serde::Serialize;

use septimate_core::engine::{CircuitSep, Comparison, McResult};
use septimate_core::netlist::Circuit;

/// Header of the comparison table.
pub const COMPARE_COLUMNS: [&str; 7] = [
    "circuit",
    "mc_mu",
    "mc_sigma",
    "prop_mu",
    "prop_sigma",
    "diff_mu_pct",
    "diff_sigma_pct",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn num(x: f64) -> String {
    format!("{x:.6e}")
}

fn pct(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.2}")).unwrap_or_default()
}

fn writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

fn finish(mut w: csv::Writer<&mut Vec<u8>>) {
    w.flush().expect("in-memory write");
}

fn into_string(buf: Vec<u8>) -> String {
    String::from_utf8(buf).expect("csv output is UTF-8")
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub circuit: String,
    pub mc_mu: f64,
    pub mc_sigma: f64,
    pub prop_mu: f64,
    pub prop_sigma: f64,
    pub diff_mu_pct: Option<f64>,
    pub diff_sigma_pct: Option<f64>,
}

impl CompareRow {
    pub fn new(circuit: &str, c: &Comparison) -> Self {
        CompareRow {
            circuit: circuit.to_string(),
            mc_mu: c.mc_mu,
            mc_sigma: c.mc_sigma,
            prop_mu: c.prop_mu,
            prop_sigma: c.prop_sigma,
            diff_mu_pct: c.diff_mu_pct,
            diff_sigma_pct: c.diff_sigma_pct,
        }
    }
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut buf = Vec::new();
    let mut w = writer(&mut buf);
    w.write_record(COMPARE_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.circuit.clone(),
            num(r.mc_mu),
            num(r.mc_sigma),
            num(r.prop_mu),
            num(r.prop_sigma),
            pct(r.diff_mu_pct),
            pct(r.diff_sigma_pct),
        ])
        .expect("in-memory write");
    }
    finish(w);
    into_string(buf)
}

#[derive(Debug, Clone, Serialize)]
pub struct RuntimeRow {
    pub circuit: String,
    pub method: &'static str,
    pub wall_ms: f64,
}

pub fn runtime_csv(rows: &[RuntimeRow]) -> String {
    let mut buf = Vec::new();
    let mut w = writer(&mut buf);
    w.write_record(["circuit", "method", "wall_ms"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([r.circuit.as_str(), r.method, &format!("{:.3}", r.wall_ms)])
            .expect("in-memory write");
    }
    finish(w);
    into_string(buf)
}

#[derive(Debug, Clone, Serialize)]
pub struct MuSigma {
    pub mu: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputEntry {
    pub output: String,
    pub pp: f64,
    pub lp: MuSigma,
    pub sep: MuSigma,
}

#[derive(Debug, Clone, Serialize)]
pub struct GateEntry {
    pub gate: u32,
    pub net: String,
    pub kind: &'static str,
    pub best_output: Option<String>,
    pub sep: MuSigma,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hinkley_violations: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitReport {
    pub circuit: String,
    pub method: &'static str,
    pub pv: f64,
    pub years: f64,
    pub gates: usize,
    pub circuit_sep: MuSigma,
    pub poisson_rate: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub class_breakdown: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<[usize; 2]>,
    pub per_gate: Vec<GateEntry>,
}

impl CircuitReport {
    pub fn analytical(name: &str, circuit: &Circuit, r: &CircuitSep) -> Self {
        let per_gate = r
            .per_gate
            .iter()
            .map(|g| {
                let gate = circuit.gate(g.gate);
                GateEntry {
                    gate: g.gate.0,
                    net: circuit.net_name(gate.output).to_string(),
                    kind: gate.kind.name(),
                    best_output: g.best_output.map(|n| circuit.net_name(n).to_string()),
                    sep: MuSigma {
                        mu: g.best.mean(),
                        sigma: g.best.std_dev(),
                    },
                    outputs: g
                        .outputs
                        .iter()
                        .map(|o| OutputEntry {
                            output: circuit.net_name(o.output).to_string(),
                            pp: o.pp,
                            lp: MuSigma {
                                mu: o.lp.mean(),
                                sigma: o.lp.std_dev(),
                            },
                            sep: MuSigma {
                                mu: o.sep.mean(),
                                sigma: o.sep.std_dev(),
                            },
                        })
                        .collect(),
                    hinkley_violations: Some(g.diagnostics.hinkley_violations),
                    std_error: None,
                }
            })
            .collect();
        CircuitReport {
            circuit: name.to_string(),
            method: "analytical",
            pv: r.config.pv_sigma,
            years: r.config.years,
            gates: r.config.num_gates,
            circuit_sep: MuSigma {
                mu: r.circuit_sep.mean(),
                sigma: r.circuit_sep.std_dev(),
            },
            poisson_rate: r.poisson_rate,
            class_breakdown: r.class_breakdown.clone(),
            samples: None,
            per_gate,
        }
    }

    pub fn monte_carlo(name: &str, circuit: &Circuit, r: &McResult) -> Self {
        let per_gate = r
            .per_gate
            .iter()
            .map(|g| {
                let gate = circuit.gate(g.gate);
                GateEntry {
                    gate: g.gate.0,
                    net: circuit.net_name(gate.output).to_string(),
                    kind: gate.kind.name(),
                    best_output: g.best_output.map(|n| circuit.net_name(n).to_string()),
                    sep: MuSigma {
                        mu: g.mean,
                        sigma: g.std,
                    },
                    outputs: Vec::new(),
                    hinkley_violations: None,
                    std_error: Some(g.std_error),
                }
            })
            .collect();
        CircuitReport {
            circuit: name.to_string(),
            method: "monte_carlo",
            pv: r.config.pv_sigma,
            years: r.config.years,
            gates: r.config.num_gates,
            circuit_sep: MuSigma {
                mu: r.circuit_sep.mean(),
                sigma: r.circuit_sep.std_dev(),
            },
            poisson_rate: r.poisson_rate,
            class_breakdown: Vec::new(),
            samples: Some([r.outer_samples, r.inner_samples]),
            per_gate,
        }
    }
}

/// One row per gate followed by a circuit-level row with gate `*`.
pub fn circuit_csv(reports: &[CircuitReport]) -> String {
    let mut buf = Vec::new();
    let mut w = writer(&mut buf);
    w.write_record([
        "circuit",
        "method",
        "pv",
        "years",
        "gate",
        "net",
        "kind",
        "best_output",
        "sep_mu",
        "sep_sigma",
    ])
    .expect("in-memory write");
    for r in reports {
        let pv = format!("{:.4}", r.pv);
        let years = format!("{:.4}", r.years);
        for g in &r.per_gate {
            w.write_record([
                r.circuit.as_str(),
                r.method,
                &pv,
                &years,
                &g.gate.to_string(),
                &g.net,
                g.kind,
                g.best_output.as_deref().unwrap_or(""),
                &num(g.sep.mu),
                &num(g.sep.sigma),
            ])
            .expect("in-memory write");
        }
        w.write_record([
            r.circuit.as_str(),
            r.method,
            &pv,
            &years,
            "*",
            "",
            "",
            "",
            &num(r.circuit_sep.mu),
            &num(r.circuit_sep.sigma),
        ])
        .expect("in-memory write");
    }
    finish(w);
    into_string(buf)
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
