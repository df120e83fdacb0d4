// SPDX-License-Identifier: Apache-2.0

//! SEP pipeline: strike every gate, propagate the transient through its
//! fanout cone and aggregate the per-gate results to one circuit figure.

mod compare;
mod montecarlo;

pub use compare::{compare, diff_pct, speedup, CompareError, Comparison};
pub use montecarlo::{monte_carlo_sep, McAccumulator, McGateResult, McPlan, McResult, MC_CHUNK};

use alloc::vec;
use alloc::vec::Vec;

use crate::masking::{
    electrical_step, gate_signal_probs, latching_probability, propagate_signal_probs, ElectricalModel, MaskingError,
    PulseState, SignalProbs,
};
use crate::netlist::{Circuit, Cone, GateId, NetId, NetlistError};
use crate::statmath::Gaussian;
use crate::techmodel::{
    effective_delay, initial_pulse, AgingConfig, GateElectrical, InitialPulse, PvConfig, TechError, TechLibrary,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Tech(#[from] TechError),
    #[error(transparent)]
    Masking(#[from] MaskingError),
    #[error("circuit has no gates")]
    EmptyCircuit,
}

/// Settings a result was computed under; results are only comparable when
/// these agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfigEcho {
    pub num_gates: usize,
    pub pv_sigma: f64,
    pub years: f64,
    pub aging_factor: f64,
    pub tclk_ps: f64,
    pub latching_window_ps: f64,
    pub vdd: f64,
    pub mask_epsilon: f64,
    pub edge_factor: f64,
}

/// SEP observed at one primary output for one strike site.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSep {
    pub output: NetId,
    /// Probability that the transient reaches this output logically.
    pub pp: f64,
    pub lp: Gaussian,
    pub sep: Gaussian,
    /// `sep` contribution of each pulse class before weighting.
    pub per_class: Vec<Gaussian>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateDiagnostics {
    /// Cone gates at which the ratio approximation left its validity regime.
    pub hinkley_violations: u32,
    /// Pulse classes electrically masked before reaching any output.
    pub masked_classes: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateSepResult {
    pub gate: GateId,
    pub outputs: Vec<OutputSep>,
    /// The output SEP with the largest mean; `N(0, 0)` if nothing is reachable.
    pub best: Gaussian,
    pub best_output: Option<NetId>,
    pub diagnostics: GateDiagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSep {
    pub per_gate: Vec<GateSepResult>,
    /// Circuit SEP for a strike at a uniformly random gate.
    pub circuit_sep: Gaussian,
    /// Expected number of erroneous latches if every gate is struck once.
    pub poisson_rate: f64,
    /// Mean circuit SEP contributed by each pulse class (weighted).
    pub class_breakdown: Vec<f64>,
    pub config: ConfigEcho,
}

/// Everything shared by the per-gate analyses of one circuit.
pub struct AnalysisContext<'a> {
    circuit: &'a Circuit,
    library: &'a TechLibrary,
    model: ElectricalModel,
    electrical: [GateElectrical; 8],
    pulses: Vec<InitialPulse>,
    fault_free: Vec<SignalProbs>,
    config: ConfigEcho,
}

impl<'a> AnalysisContext<'a> {
    pub fn new(
        circuit: &'a Circuit,
        library: &'a TechLibrary,
        pv: PvConfig,
        aging: AgingConfig,
    ) -> Result<Self, EngineError> {
        if circuit.num_gates() == 0 {
            return Err(EngineError::EmptyCircuit);
        }
        let cfg = library.analysis();
        let electrical = crate::netlist::GateKind::ALL.map(|k| effective_delay(k, pv, aging, library));
        let pulses = (0..library.pulses().len())
            .map(|k| initial_pulse(library, k, pv, aging))
            .collect::<Result<Vec<_>, _>>()?;
        let pi = vec![SignalProbs::UNIFORM; circuit.inputs().len()];
        let fault_free = propagate_signal_probs(circuit, &pi)?;
        Ok(AnalysisContext {
            circuit,
            library,
            model: ElectricalModel::from(cfg),
            electrical,
            pulses,
            fault_free,
            config: ConfigEcho {
                num_gates: circuit.num_gates(),
                pv_sigma: pv.relative_sigma(),
                years: aging.years(),
                aging_factor: aging.factor(),
                tclk_ps: cfg.tclk_ps,
                latching_window_ps: cfg.latching_window_ps,
                vdd: cfg.vdd,
                mask_epsilon: cfg.mask_epsilon,
                edge_factor: cfg.edge_factor,
            },
        })
    }

    pub fn circuit(&self) -> &Circuit {
        self.circuit
    }

    pub fn config(&self) -> &ConfigEcho {
        &self.config
    }

    /// Fault-free signal probabilities of every net.
    pub fn fault_free(&self) -> &[SignalProbs] {
        &self.fault_free
    }

    /// Strike `gate` with every pulse class and read the SEP at each output
    /// the transient can reach.
    pub fn analyze_gate(&self, gate: GateId) -> Result<GateSepResult, EngineError> {
        let cone = self.circuit.transitive_fanout(gate)?;
        Ok(self.analyze_cone(gate, &cone))
    }

    fn analyze_cone(&self, gate: GateId, cone: &Cone) -> GateSepResult {
        let circuit = self.circuit;
        let cfg = self.library.analysis();
        let n_out = cone.outputs.len();
        let n_class = self.pulses.len();
        let mut pp = vec![0.0; n_out];
        let mut lp_mean = vec![vec![0.0; n_class]; n_out];
        let mut lp_sd = vec![vec![0.0; n_class]; n_out];
        let mut diagnostics = GateDiagnostics::default();

        let mut probs = self.fault_free.clone();
        let mut pulse = vec![PulseState::DEAD; circuit.num_nets()];
        let mut inputs = Vec::new();
        let src = circuit.gate(gate).output;

        for (k, init) in self.pulses.iter().enumerate() {
            probs[src.index()] = SignalProbs::STRUCK;
            pulse[src.index()] = PulseState {
                pa: 1.0,
                width: init.width,
                realization: init.realization,
                alive: true,
            };
            for &g in &cone.gates {
                let gate = circuit.gate(g);
                let out = gate.output.index();
                let mut carried: Option<PulseState> = None;
                for n in &gate.fanin {
                    let p = pulse[n.index()];
                    if p.alive && carried.is_none_or(|c| p.width.mean() > c.width.mean()) {
                        carried = Some(p);
                    }
                }
                let Some(incoming) = carried else {
                    probs[out] = self.fault_free[out];
                    pulse[out] = PulseState::DEAD;
                    continue;
                };
                let elec = &self.electrical[gate.kind.index()];
                let step = electrical_step(incoming.width, elec, &self.model);
                if step.hinkley_violation {
                    diagnostics.hinkley_violations += 1;
                }
                if !step.alive {
                    probs[out] = self.fault_free[out];
                    pulse[out] = PulseState::DEAD;
                    continue;
                }
                let real = electrical_step(incoming.realization, elec, &self.model);
                let realization = if real.alive {
                    real.pw_out
                } else {
                    Gaussian::point(step.pw_out.mean())
                };
                inputs.clear();
                inputs.extend(gate.fanin.iter().map(|n| probs[n.index()]));
                let sp = gate_signal_probs(gate.kind, &inputs);
                probs[out] = sp;
                pulse[out] = PulseState {
                    pa: sp.pa,
                    width: step.pw_out,
                    realization,
                    alive: sp.pa > 0.0,
                };
            }

            let mut reached = false;
            for (slot, po) in cone.outputs.iter().enumerate() {
                let p = pulse[po.index()];
                if !p.alive {
                    continue;
                }
                reached = true;
                pp[slot] = p.pa;
                let lw = cfg.latching_window_ps;
                let tclk = cfg.tclk_ps;
                // Both calls succeed: the clock period was validated with the library.
                let lp = latching_probability(p.width, lw, tclk).unwrap_or(Gaussian::ZERO);
                let lp_r = latching_probability(p.realization, lw, tclk).unwrap_or(Gaussian::ZERO);
                lp_mean[slot][k] = lp.mean();
                lp_sd[slot][k] = lp_r.std_dev();
            }
            if !reached {
                diagnostics.masked_classes += 1;
            }

            probs[src.index()] = self.fault_free[src.index()];
            pulse[src.index()] = PulseState::DEAD;
            for &g in &cone.gates {
                let out = circuit.gate(g).output.index();
                probs[out] = self.fault_free[out];
                pulse[out] = PulseState::DEAD;
            }
        }

        let mut outputs = Vec::with_capacity(n_out);
        for (slot, &po) in cone.outputs.iter().enumerate() {
            let mut mean = 0.0;
            let mut sd = 0.0;
            let mut per_class = Vec::with_capacity(n_class);
            for (k, init) in self.pulses.iter().enumerate() {
                mean += init.weight * lp_mean[slot][k];
                sd += init.weight * lp_sd[slot][k];
                per_class.push(Gaussian::raw(
                    pp[slot] * lp_mean[slot][k],
                    (pp[slot] * lp_sd[slot][k]) * (pp[slot] * lp_sd[slot][k]),
                ));
            }
            let lp = Gaussian::raw(mean, sd * sd);
            outputs.push(OutputSep {
                output: po,
                pp: pp[slot],
                lp,
                sep: lp.scale(pp[slot]),
                per_class,
            });
        }
        let best_slot =
            outputs
                .iter()
                .enumerate()
                .filter(|(_, o)| o.sep.mean() > 0.0)
                .fold(None, |acc: Option<usize>, (i, o)| match acc {
                    Some(j) if outputs[j].sep.mean() >= o.sep.mean() => Some(j),
                    _ => Some(i),
                });
        GateSepResult {
            gate,
            best: best_slot.map_or(Gaussian::ZERO, |i| outputs[i].sep),
            best_output: best_slot.map(|i| outputs[i].output),
            outputs,
            diagnostics,
        }
    }

    /// Combines per-gate results (in gate-id order) into the circuit figure.
    pub fn aggregate(&self, mut per_gate: Vec<GateSepResult>) -> CircuitSep {
        per_gate.sort_by_key(|r| r.gate);
        let g = per_gate.len() as f64;
        let sum_mean: f64 = per_gate.iter().map(|r| r.best.mean()).sum();
        let sum_var: f64 = per_gate.iter().map(|r| r.best.variance()).sum();
        let mut class_breakdown = vec![0.0; self.pulses.len()];
        for r in &per_gate {
            if let Some(best) = r.best_output {
                let o = r.outputs.iter().find(|o| o.output == best);
                if let Some(o) = o {
                    for (k, s) in o.per_class.iter().enumerate() {
                        class_breakdown[k] += self.pulses[k].weight * s.mean() / g;
                    }
                }
            }
        }
        CircuitSep {
            circuit_sep: Gaussian::raw(sum_mean / g, sum_var / (g * g)).clamp_mean(0.0, 1.0),
            poisson_rate: sum_mean,
            class_breakdown,
            per_gate,
            config: self.config,
        }
    }
}

/// SEP of a single strike site.
pub fn analyze_gate(
    circuit: &Circuit,
    gate: GateId,
    library: &TechLibrary,
    pv: PvConfig,
    aging: AgingConfig,
) -> Result<GateSepResult, EngineError> {
    AnalysisContext::new(circuit, library, pv, aging)?.analyze_gate(gate)
}

/// SEP of every gate and the circuit aggregate, computed sequentially.
pub fn analyze_circuit(
    circuit: &Circuit,
    library: &TechLibrary,
    pv: PvConfig,
    aging: AgingConfig,
) -> Result<CircuitSep, EngineError> {
    let ctx = AnalysisContext::new(circuit, library, pv, aging)?;
    let per_gate = circuit
        .topological_order()
        .iter()
        .map(|&g| ctx.analyze_gate(g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ctx.aggregate(per_gate))
}
