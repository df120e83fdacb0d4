// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use septimate_core::netlist::{Circuit, CircuitBuilder, GateKind};

/// Raw random description of a circuit: input count and one entry per gate
/// (kind selector, three input selectors, output flag).
pub type Recipe = (usize, Vec<(usize, [usize; 3], bool)>);

pub fn recipe(max_gates: usize) -> impl Strategy<Value = Recipe> {
    (
        1usize..7,
        prop::collection::vec((0usize..8, [any::<usize>(); 3], any::<bool>()), 1..=max_gates),
    )
}

/// Builds an acyclic circuit: each gate reads only primary inputs and earlier gates.
pub fn build(recipe: &Recipe) -> Circuit {
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
        let out = format!("g{g}");
        b.add_gate(kind, &out, &refs).unwrap();
        nets.push(out);
    }
    for (g, (_, _, flag)) in gates.iter().enumerate() {
        if *flag || !used[g] {
            b.add_output(&format!("g{g}")).unwrap();
        }
    }
    b.build().unwrap()
}
