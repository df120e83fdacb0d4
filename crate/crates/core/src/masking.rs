// SPDX-License-Identifier: Apache-2.0

//! Logical, electrical and timing masking of single-event transients.

use alloc::vec;
use alloc::vec::Vec;

use crate::netlist::{Circuit, GateKind};
use crate::statmath::{Gaussian, StatError};
use crate::techmodel::{AnalysisConfig, GateElectrical};

/// Tolerance on `p0 + p1 + pa = 1`.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// Branch weights below this are treated as exactly zero in the
/// attenuation mixture.
const NEGLIGIBLE_WEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MaskingError {
    #[error("invalid signal probability triple ({p0}, {p1}, {pa})")]
    InvalidProbs { p0: f64, p1: f64, pa: f64 },
    #[error("expected {expected} primary-input probabilities, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("clock period must be positive, got {0}")]
    ClockPeriod(f64),
}

/// Probability that a net is steady 0, steady 1, or carries the transient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalProbs {
    pub p0: f64,
    pub p1: f64,
    pub pa: f64,
}

impl SignalProbs {
    /// Uniformly random fault-free input.
    pub const UNIFORM: SignalProbs = SignalProbs {
        p0: 0.5,
        p1: 0.5,
        pa: 0.0,
    };

    /// The struck net: the transient is present with certainty.
    pub const STRUCK: SignalProbs = SignalProbs {
        p0: 0.0,
        p1: 0.0,
        pa: 1.0,
    };

    pub fn new(p0: f64, p1: f64, pa: f64) -> Result<Self, MaskingError> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(ok(p0) && ok(p1) && ok(pa)) || libm::fabs(p0 + p1 + pa - 1.0) > PROB_TOLERANCE {
            return Err(MaskingError::InvalidProbs { p0, p1, pa });
        }
        Ok(SignalProbs { p0, p1, pa })
    }

    /// Fault-free net with `P(1) = p1`.
    pub fn steady(p1: f64) -> Result<Self, MaskingError> {
        Self::new(1.0 - p1, p1, 0.0)
    }

    fn complement(self) -> Self {
        SignalProbs {
            p0: self.p1,
            p1: self.p0,
            pa: self.pa,
        }
    }

    fn from_controlled(p_steady_nc: f64, pa: f64, noncontrolling_is_one: bool) -> Self {
        let pa = pa.clamp(0.0, 1.0);
        let p_steady_c = (1.0 - p_steady_nc - pa).clamp(0.0, 1.0);
        if noncontrolling_is_one {
            SignalProbs {
                p0: p_steady_c,
                p1: p_steady_nc,
                pa,
            }
        } else {
            SignalProbs {
                p0: p_steady_nc,
                p1: p_steady_c,
                pa,
            }
        }
    }
}

/// Output probabilities of one gate from independent input probabilities.
///
/// AND: `P1 = prod P1(Xi)`, `Pa = prod [P1(Xi) + Pa(Xi)] - P1`.
/// OR: `P0 = prod P0(Xi)`, `Pa = prod [P0(Xi) + Pa(Xi)] - P0`.
/// NAND/NOR apply the base rule and complement; NOT swaps `P0`/`P1`.
/// XOR carries the transient iff an odd number of inputs carry it; its steady
/// value is the parity of the steady inputs.
pub fn gate_signal_probs(kind: GateKind, inputs: &[SignalProbs]) -> SignalProbs {
    match kind {
        GateKind::Buf => inputs[0],
        GateKind::Not => inputs[0].complement(),
        GateKind::And | GateKind::Nand => {
            let p1: f64 = inputs.iter().map(|x| x.p1).product();
            let pass: f64 = inputs.iter().map(|x| x.p1 + x.pa).product();
            let out = SignalProbs::from_controlled(p1, pass - p1, true);
            if kind == GateKind::Nand {
                out.complement()
            } else {
                out
            }
        }
        GateKind::Or | GateKind::Nor => {
            let p0: f64 = inputs.iter().map(|x| x.p0).product();
            let pass: f64 = inputs.iter().map(|x| x.p0 + x.pa).product();
            let out = SignalProbs::from_controlled(p0, pass - p0, false);
            if kind == GateKind::Nor {
                out.complement()
            } else {
                out
            }
        }
        GateKind::Xor | GateKind::Xnor => {
            // state[steady parity][transient parity]
            let mut state = [[1.0, 0.0], [0.0, 0.0]];
            for x in inputs {
                let mut next = [[0.0; 2]; 2];
                for (s, row) in state.iter().enumerate() {
                    for (t, &p) in row.iter().enumerate() {
                        next[s][t] += p * x.p0;
                        next[s ^ 1][t] += p * x.p1;
                        next[s][t ^ 1] += p * x.pa;
                    }
                }
                state = next;
            }
            let out = SignalProbs {
                p0: state[0][0],
                p1: state[1][0],
                pa: state[0][1] + state[1][1],
            };
            if kind == GateKind::Xnor {
                out.complement()
            } else {
                out
            }
        }
    }
}

/// Single forward pass over the circuit in topological order, assuming all
/// gate inputs are independent. `pi_probs` is aligned with
/// [`Circuit::inputs`]; the result is indexed by net.
pub fn propagate_signal_probs(circuit: &Circuit, pi_probs: &[SignalProbs]) -> Result<Vec<SignalProbs>, MaskingError> {
    if pi_probs.len() != circuit.inputs().len() {
        return Err(MaskingError::InputCount {
            expected: circuit.inputs().len(),
            got: pi_probs.len(),
        });
    }
    let mut probs = vec![SignalProbs::UNIFORM; circuit.num_nets()];
    for (&net, &p) in circuit.inputs().iter().zip(pi_probs) {
        SignalProbs::new(p.p0, p.p1, p.pa)?;
        probs[net.index()] = p;
    }
    let mut scratch = Vec::new();
    for &g in circuit.topological_order() {
        let gate = circuit.gate(g);
        scratch.clear();
        scratch.extend(gate.fanin.iter().map(|n| probs[n.index()]));
        probs[gate.output.index()] = gate_signal_probs(gate.kind, &scratch);
    }
    Ok(probs)
}

/// Electrical constants shared by every gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricalModel {
    pub vdd: f64,
    pub edge_factor: f64,
    pub mask_epsilon: f64,
}

impl From<&AnalysisConfig> for ElectricalModel {
    fn from(cfg: &AnalysisConfig) -> Self {
        ElectricalModel {
            vdd: cfg.vdd,
            edge_factor: cfg.edge_factor,
            mask_epsilon: cfg.mask_epsilon,
        }
    }
}

/// Output voltage extremes reached while a pulse passes a gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuationResult {
    pub v_omin: Gaussian,
    pub v_omax: Gaussian,
    /// Normalized output swing `(v_omax - v_omin) / vdd`, mean in `[0, 1]`.
    pub x_factor: Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricalStep {
    pub pw_out: Gaussian,
    pub attenuation: AttenuationResult,
    /// Probability that the output width is positive.
    pub survival: f64,
    pub alive: bool,
    /// The ratio approximation was outside its validity regime; the pulse is
    /// reported as masked.
    pub hinkley_violation: bool,
}

impl ElectricalStep {
    fn masked(hinkley_violation: bool) -> Self {
        ElectricalStep {
            pw_out: Gaussian::ZERO,
            attenuation: AttenuationResult {
                v_omin: Gaussian::ZERO,
                v_omax: Gaussian::ZERO,
                x_factor: Gaussian::ZERO,
            },
            survival: 0.0,
            alive: false,
            hinkley_violation,
        }
    }
}

/// Statistical pulse-width attenuation through one gate.
///
/// The output swing is attenuated only when the input pulse is shorter than
/// `edge_factor` times the output transition time. The output width is
/// `PW_o = (PW_i - d1) + X * d2`, with `d1`, `d2` the two edge delays and `X`
/// the normalized output swing; all operands are taken as independent.
pub fn electrical_step(pw_in: Gaussian, gate: &GateElectrical, model: &ElectricalModel) -> ElectricalStep {
    let fall_limit = gate.t_fall.scale(model.edge_factor);
    let rise_limit = gate.t_rise.scale(model.edge_factor);
    let q_fall = pw_in.sub_independent(fall_limit).cdf_below(0.0);
    let q_rise = pw_in.sub_independent(rise_limit).cdf_below(0.0);

    let ratio = |limit: Gaussian| -> Result<Gaussian, StatError> { Gaussian::ratio_hinkley(pw_in, limit) };

    // Each rail is reached unless the pulse is shorter than the edge allows:
    // v_omin = max(0, 1 - PW/limit_f) and v_omax = min(1, PW/limit_r),
    // i.e. the attenuating branch (weight P(PW < limit)) mixed with the rail.
    let one = Gaussian::point(1.0);
    let v_omin_norm = if q_fall > NEGLIGIBLE_WEIGHT {
        match ratio(fall_limit) {
            Ok(r) => one.sub_independent(r).truncate_nonneg(),
            Err(_) => return ElectricalStep::masked(true),
        }
    } else {
        Gaussian::ZERO
    };
    let v_omax_norm = if q_rise > NEGLIGIBLE_WEIGHT {
        match ratio(rise_limit) {
            Ok(r) => one.sub_independent(one.sub_independent(r).truncate_nonneg()),
            Err(_) => return ElectricalStep::masked(true),
        }
    } else {
        one
    };
    let v_omin = v_omin_norm.scale(model.vdd);
    let v_omax = v_omax_norm.scale(model.vdd);
    let x_factor = v_omax
        .sub_independent(v_omin)
        .scale(1.0 / model.vdd)
        .clamp_mean(0.0, 1.0);

    let second_edge = x_factor.product(gate.delay);
    let raw = pw_in.sub_independent(gate.delay).add(second_edge);
    let survival = 1.0 - raw.cdf_below(0.0);
    let pw_out = raw.truncate_nonneg();
    let alive = survival > model.mask_epsilon && pw_out.mean() > 0.0;
    ElectricalStep {
        pw_out: if alive { pw_out } else { Gaussian::ZERO },
        attenuation: AttenuationResult {
            v_omin,
            v_omax,
            x_factor,
        },
        survival,
        alive,
        hinkley_violation: false,
    }
}

/// Deterministic counterpart of [`electrical_step`] for one realization of a
/// gate. Returns the output width; values `<= 0` mean the pulse is gone.
pub fn electrical_step_pointwise(
    pw_in: f64,
    first_edge_delay: f64,
    second_edge_delay: f64,
    t_rise: f64,
    t_fall: f64,
    model: &ElectricalModel,
) -> f64 {
    let fall_limit = t_fall * model.edge_factor;
    let rise_limit = t_rise * model.edge_factor;
    let v_omin = if pw_in < fall_limit {
        1.0 - pw_in / fall_limit
    } else {
        0.0
    };
    let v_omax = if pw_in < rise_limit { pw_in / rise_limit } else { 1.0 };
    let x = (v_omax - v_omin).clamp(0.0, 1.0);
    pw_in - first_edge_delay + x * second_edge_delay
}

/// Probability that a pulse of width `pw` is captured: `(PW + LW) / Tclk`,
/// mean clamped into `[0, 1]`.
pub fn latching_probability(pw: Gaussian, lw: f64, tclk: f64) -> Result<Gaussian, MaskingError> {
    if !(tclk > 0.0) {
        return Err(MaskingError::ClockPeriod(tclk));
    }
    Ok(pw.add(Gaussian::point(lw)).scale(1.0 / tclk).clamp_mean(0.0, 1.0))
}

/// Transient state carried by a net while a strike is propagated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseState {
    /// Probability that the net carries the transient.
    pub pa: f64,
    /// Width distribution, including the intra-class spread of the strike.
    pub width: Gaussian,
    /// Width distribution across process/aging realizations only.
    pub realization: Gaussian,
    pub alive: bool,
}

impl PulseState {
    pub const DEAD: PulseState = PulseState {
        pa: 0.0,
        width: Gaussian::ZERO,
        realization: Gaussian::ZERO,
        alive: false,
    };
}
