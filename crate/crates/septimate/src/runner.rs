// SPDX-License-Identifier: Apache-2.0

//! Timed, multi-threaded drivers for the analytical and Monte Carlo engines.

use std::time::Instant;

use rayon::prelude::*;

use septimate_core::engine::{AnalysisContext, CircuitSep, EngineError, McPlan, McResult};
use septimate_core::netlist::Circuit;
use septimate_core::techmodel::{AgingConfig, PvConfig, TechLibrary};

#[derive(Debug, Clone)]
pub struct Timed<T> {
    pub value: T,
    pub wall_ms: f64,
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool")
}

/// Analytical SEP of every gate. `jobs = 0` uses all cores; `jobs = 1` stays
/// on the calling thread.
pub fn analyze(
    circuit: &Circuit,
    library: &TechLibrary,
    pv: PvConfig,
    aging: AgingConfig,
    jobs: usize,
) -> Result<Timed<CircuitSep>, EngineError> {
    let start = Instant::now();
    let ctx = AnalysisContext::new(circuit, library, pv, aging)?;
    let order = circuit.topological_order();
    let per_gate = if jobs == 1 {
        order
            .iter()
            .map(|&g| ctx.analyze_gate(g))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        pool(jobs).install(|| {
            order
                .par_iter()
                .map(|&g| ctx.analyze_gate(g))
                .collect::<Result<Vec<_>, _>>()
        })?
    };
    let value = ctx.aggregate(per_gate);
    Ok(Timed {
        value,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Monte Carlo SEP of every gate. The result is identical for every `jobs`.
pub fn monte_carlo(
    circuit: &Circuit,
    library: &TechLibrary,
    pv: PvConfig,
    aging: AgingConfig,
    jobs: usize,
) -> Result<Timed<McResult>, EngineError> {
    let start = Instant::now();
    let plan = McPlan::new(circuit, library, pv, aging)?;
    let acc = if jobs == 1 {
        plan.run_serial()
    } else {
        let pool = pool(jobs);
        let batch = pool.current_num_threads().max(1) * 2;
        let mut acc = plan.empty();
        let chunks: Vec<usize> = (0..plan.num_chunks()).collect();
        for group in chunks.chunks(batch) {
            let parts: Vec<_> = pool.install(|| group.par_iter().map(|&c| plan.run_chunk(c)).collect());
            for p in &parts {
                acc.merge(p);
            }
        }
        acc
    };
    let value = plan.finish(&acc);
    Ok(Timed {
        value,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
