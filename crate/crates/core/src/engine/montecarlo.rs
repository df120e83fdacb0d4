// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo fault injection.
//!
//! The outer loop draws one process/aging realization of every gate; the
//! inner loop simulates random input vectors and strikes 64 at a time, one
//! lane per bit of a machine word.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use super::{ConfigEcho, EngineError};
use crate::masking::{electrical_step_pointwise, ElectricalModel};
use crate::netlist::{Circuit, Cone, GateId, NetId};
use crate::statmath::Gaussian;
use crate::techmodel::{AgingConfig, PvConfig, TechLibrary};

/// Outer iterations per work unit. Results depend only on the seed, never on
/// how chunks are distributed over workers.
pub const MC_CHUNK: usize = 64;

const MIN_PARAM_PS: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
struct StrikeClass {
    mean: f64,
    sigma: f64,
    cumulative: f64,
}

#[derive(Debug, Clone, Copy)]
struct GateNominal {
    delay: f64,
    t_rise: f64,
    t_fall: f64,
}

/// Precomputed structure shared by all Monte Carlo work units of one run.
pub struct McPlan<'a> {
    circuit: &'a Circuit,
    cones: Vec<Cone>,
    /// Offset of each gate's (gate, output) accumulator slots.
    slot_start: Vec<usize>,
    nominal: Vec<GateNominal>,
    classes: Vec<StrikeClass>,
    model: ElectricalModel,
    pv: f64,
    outer: usize,
    inner: usize,
    seed: u64,
    tclk: f64,
    lw: f64,
    config: ConfigEcho,
}

/// Running sums over outer iterations for every (gate, reachable output).
#[derive(Debug, Clone, PartialEq)]
pub struct McAccumulator {
    outer: usize,
    sum_mean: Vec<f64>,
    sum_mean_sq: Vec<f64>,
    sum_within: Vec<f64>,
}

impl McAccumulator {
    fn zeros(slots: usize) -> Self {
        McAccumulator {
            outer: 0,
            sum_mean: vec![0.0; slots],
            sum_mean_sq: vec![0.0; slots],
            sum_within: vec![0.0; slots],
        }
    }

    /// Folds `other` into `self`. Merge chunks in index order for
    /// reproducible sums.
    pub fn merge(&mut self, other: &McAccumulator) {
        self.outer += other.outer;
        for (a, b) in self.sum_mean.iter_mut().zip(&other.sum_mean) {
            *a += b;
        }
        for (a, b) in self.sum_mean_sq.iter_mut().zip(&other.sum_mean_sq) {
            *a += b;
        }
        for (a, b) in self.sum_within.iter_mut().zip(&other.sum_within) {
            *a += b;
        }
    }

    pub fn outer(&self) -> usize {
        self.outer
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McGateResult {
    pub gate: GateId,
    /// Output whose pooled mean SEP is largest.
    pub best_output: Option<NetId>,
    pub mean: f64,
    /// Spread of the per-realization SEP with inner-sampling noise removed.
    pub std: f64,
    /// Spread of the per-realization sample means, noise included.
    pub raw_std: f64,
    /// Standard error of `mean`.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McResult {
    pub per_gate: Vec<McGateResult>,
    pub outer_samples: usize,
    pub inner_samples: usize,
    pub circuit_sep: Gaussian,
    pub poisson_rate: f64,
    pub config: ConfigEcho,
}

struct Scratch {
    good: Vec<u64>,
    pulsed: Vec<u64>,
    width: Vec<[f64; 64]>,
    inputs: Vec<u64>,
    d_rise: Vec<f64>,
    d_fall: Vec<f64>,
    t_rise: Vec<f64>,
    t_fall: Vec<f64>,
    strength: Vec<f64>,
    lane_sum: Vec<f64>,
    lane_sum_sq: Vec<f64>,
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

impl<'a> McPlan<'a> {
    pub fn new(
        circuit: &'a Circuit,
        library: &TechLibrary,
        pv: PvConfig,
        aging: AgingConfig,
    ) -> Result<Self, EngineError> {
        if circuit.num_gates() == 0 {
            return Err(EngineError::EmptyCircuit);
        }
        let cfg = library.analysis();
        cfg.validate()?;
        let age = aging.factor();
        let cones = (0..circuit.num_gates())
            .map(|g| circuit.transitive_fanout(GateId(g as u32)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut slot_start = Vec::with_capacity(cones.len() + 1);
        let mut total = 0;
        for c in &cones {
            slot_start.push(total);
            total += c.outputs.len();
        }
        slot_start.push(total);
        let nominal = circuit
            .gates()
            .iter()
            .map(|g| {
                let p = library.gate_params(g.kind);
                GateNominal {
                    delay: p.delay_ps * age,
                    t_rise: p.t_rise_ps * age,
                    t_fall: p.t_fall_ps * age,
                }
            })
            .collect();
        let mut cumulative = 0.0;
        let classes = library
            .pulses()
            .iter()
            .map(|p| {
                cumulative += p.weight;
                StrikeClass {
                    mean: p.width_mean_ps * age,
                    sigma: p.width_sigma_ps,
                    cumulative,
                }
            })
            .collect();
        let ctx = super::AnalysisContext::new(circuit, library, pv, aging)?;
        Ok(McPlan {
            circuit,
            cones,
            slot_start,
            nominal,
            classes,
            model: ElectricalModel::from(cfg),
            pv: pv.relative_sigma(),
            outer: cfg.mc_samples,
            inner: cfg.mc_inner_samples,
            seed: cfg.rng_seed,
            tclk: cfg.tclk_ps,
            lw: cfg.latching_window_ps,
            config: *ctx.config(),
        })
    }

    pub fn outer_samples(&self) -> usize {
        self.outer
    }

    pub fn inner_samples(&self) -> usize {
        self.inner
    }

    pub fn num_chunks(&self) -> usize {
        self.outer.div_ceil(MC_CHUNK)
    }

    /// An accumulator with no samples, the identity for [`McAccumulator::merge`].
    pub fn empty(&self) -> McAccumulator {
        McAccumulator::zeros(*self.slot_start.last().unwrap_or(&0))
    }

    fn scratch(&self) -> Scratch {
        let nets = self.circuit.num_nets();
        let g = self.circuit.num_gates();
        let slots = *self.slot_start.last().unwrap_or(&0);
        Scratch {
            good: vec![0; nets],
            pulsed: vec![0; nets],
            width: vec![[0.0; 64]; nets],
            inputs: Vec::new(),
            d_rise: vec![0.0; g],
            d_fall: vec![0.0; g],
            t_rise: vec![0.0; g],
            t_fall: vec![0.0; g],
            strength: vec![0.0; g],
            lane_sum: vec![0.0; slots],
            lane_sum_sq: vec![0.0; slots],
        }
    }

    /// Runs the outer iterations of chunk `index`.
    pub fn run_chunk(&self, index: usize) -> McAccumulator {
        let mut acc = self.empty();
        let mut s = self.scratch();
        let start = index * MC_CHUNK;
        let end = (start + MC_CHUNK).min(self.outer);
        for outer in start..end {
            self.run_outer(outer, &mut s, &mut acc);
        }
        acc
    }

    /// Runs every chunk in order on the calling thread.
    pub fn run_serial(&self) -> McAccumulator {
        let mut acc = self.empty();
        for c in 0..self.num_chunks() {
            acc.merge(&self.run_chunk(c));
        }
        acc
    }

    fn run_outer(&self, outer: usize, s: &mut Scratch, acc: &mut McAccumulator) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(outer as u64);
        let pv = self.pv;
        let vary = |rng: &mut ChaCha8Rng, nominal: f64| (nominal * (1.0 + pv * normal(rng))).max(MIN_PARAM_PS);
        for (g, nom) in self.nominal.iter().enumerate() {
            s.d_rise[g] = vary(&mut rng, nom.delay);
            s.d_fall[g] = vary(&mut rng, nom.delay);
            s.t_rise[g] = vary(&mut rng, nom.t_rise);
            s.t_fall[g] = vary(&mut rng, nom.t_fall);
            s.strength[g] = (1.0 + pv * normal(&mut rng)).max(0.0);
        }
        s.lane_sum.iter_mut().for_each(|x| *x = 0.0);
        s.lane_sum_sq.iter_mut().for_each(|x| *x = 0.0);

        let words = self.inner.div_ceil(64);
        for w in 0..words {
            let lanes = (self.inner - 64 * w).min(64);
            let lane_mask = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
            self.simulate_word(&mut rng, lane_mask, s);
        }

        let m = self.inner as f64;
        for slot in 0..s.lane_sum.len() {
            let mean = s.lane_sum[slot] / m;
            let var = ((s.lane_sum_sq[slot] - m * mean * mean) / (m - 1.0)).max(0.0);
            acc.sum_mean[slot] += mean;
            acc.sum_mean_sq[slot] += mean * mean;
            acc.sum_within[slot] += var / m;
        }
        acc.outer += 1;
    }

    fn simulate_word(&self, rng: &mut ChaCha8Rng, lane_mask: u64, s: &mut Scratch) {
        let c = self.circuit;
        for &pi in c.inputs() {
            s.good[pi.index()] = rng.next_u64();
        }
        for &g in c.topological_order() {
            let gate = c.gate(g);
            let v = gate.kind.eval_words(gate.fanin.iter().map(|n| s.good[n.index()]));
            s.good[gate.output.index()] = v;
        }

        for (g, cone) in self.cones.iter().enumerate() {
            let src = c.gates()[g].output.index();
            let factor = s.strength[g];
            for lane in 0..64 {
                if lane_mask >> lane & 1 == 0 {
                    continue;
                }
                let u = unit_f64(rng);
                let class = self
                    .classes
                    .iter()
                    .find(|k| u < k.cumulative)
                    .unwrap_or(&self.classes[self.classes.len() - 1]);
                s.width[src][lane] = class.mean * factor + class.sigma * normal(rng);
            }
            let mut alive = lane_mask;
            for lane in 0..64 {
                if alive >> lane & 1 == 1 && s.width[src][lane] <= 0.0 {
                    alive &= !(1u64 << lane);
                }
            }
            s.pulsed[src] = alive;

            for &h in &cone.gates {
                let gate = c.gate(h);
                let out = gate.output.index();
                let any = gate.fanin.iter().fold(0u64, |a, n| a | s.pulsed[n.index()]);
                if any == 0 {
                    s.pulsed[out] = 0;
                    continue;
                }
                s.inputs.clear();
                s.inputs
                    .extend(gate.fanin.iter().map(|n| s.good[n.index()] ^ s.pulsed[n.index()]));
                let faulty = gate.kind.eval_words(s.inputs.iter().copied());
                let good = s.good[out];
                let mut flip = (faulty ^ good) & any;
                let mut bits = flip;
                let hi = h.index();
                while bits != 0 {
                    let lane = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let mut w_in = 0.0f64;
                    for n in &gate.fanin {
                        if s.pulsed[n.index()] >> lane & 1 == 1 {
                            w_in = w_in.max(s.width[n.index()][lane]);
                        }
                    }
                    let (d1, d2) = if good >> lane & 1 == 0 {
                        (s.d_rise[hi], s.d_fall[hi])
                    } else {
                        (s.d_fall[hi], s.d_rise[hi])
                    };
                    let w_out = electrical_step_pointwise(w_in, d1, d2, s.t_rise[hi], s.t_fall[hi], &self.model);
                    if w_out > 0.0 {
                        s.width[out][lane] = w_out;
                    } else {
                        flip &= !(1u64 << lane);
                    }
                }
                s.pulsed[out] = flip;
            }

            let base = self.slot_start[g];
            for (k, po) in cone.outputs.iter().enumerate() {
                let mut bits = s.pulsed[po.index()];
                let mut sum = 0.0;
                let mut sum_sq = 0.0;
                while bits != 0 {
                    let lane = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let lp = ((s.width[po.index()][lane] + self.lw) / self.tclk).min(1.0);
                    sum += lp;
                    sum_sq += lp * lp;
                }
                s.lane_sum[base + k] += sum;
                s.lane_sum_sq[base + k] += sum_sq;
            }

            s.pulsed[src] = 0;
            for &h in &cone.gates {
                s.pulsed[c.gate(h).output.index()] = 0;
            }
        }
    }

    /// Per-gate statistics from the merged accumulator of all chunks.
    pub fn finish(&self, acc: &McAccumulator) -> McResult {
        let t = acc.outer as f64;
        let mut per_gate = Vec::with_capacity(self.cones.len());
        for (g, cone) in self.cones.iter().enumerate() {
            let mut best: Option<(usize, f64)> = None;
            for k in 0..cone.outputs.len() {
                let mean = acc.sum_mean[self.slot_start[g] + k] / t;
                if mean > 0.0 && best.is_none_or(|(_, m)| mean > m) {
                    best = Some((k, mean));
                }
            }
            let result = match best {
                None => McGateResult {
                    gate: GateId(g as u32),
                    best_output: None,
                    mean: 0.0,
                    std: 0.0,
                    raw_std: 0.0,
                    std_error: 0.0,
                },
                Some((k, mean)) => {
                    let slot = self.slot_start[g] + k;
                    let between = if acc.outer > 1 {
                        ((acc.sum_mean_sq[slot] - t * mean * mean) / (t - 1.0)).max(0.0)
                    } else {
                        0.0
                    };
                    let within = acc.sum_within[slot] / t;
                    McGateResult {
                        gate: GateId(g as u32),
                        best_output: Some(cone.outputs[k]),
                        mean,
                        std: libm::sqrt((between - within).max(0.0)),
                        raw_std: libm::sqrt(between),
                        std_error: libm::sqrt(acc.sum_within[slot]) / t,
                    }
                }
            };
            per_gate.push(result);
        }
        let g = per_gate.len() as f64;
        let sum_mean: f64 = per_gate.iter().map(|r| r.mean).sum();
        let sum_var: f64 = per_gate.iter().map(|r| r.std * r.std).sum();
        McResult {
            per_gate,
            outer_samples: acc.outer,
            inner_samples: self.inner,
            circuit_sep: Gaussian::raw(sum_mean / g, sum_var / (g * g)),
            poisson_rate: sum_mean,
            config: self.config,
        }
    }
}

/// Monte Carlo SEP of every gate, run sequentially. Sample counts and the
/// seed come from the library's analysis settings.
pub fn monte_carlo_sep(
    circuit: &Circuit,
    library: &TechLibrary,
    pv: PvConfig,
    aging: AgingConfig,
) -> Result<McResult, EngineError> {
    let plan = McPlan::new(circuit, library, pv, aging)?;
    let acc = plan.run_serial();
    Ok(plan.finish(&acc))
}
