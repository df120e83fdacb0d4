// SPDX-License-Identifier: Apache-2.0

//! Statistical soft-error-probability analysis of combinational circuits.
//!
//! A strike at a gate produces a transient pulse whose width is a Gaussian.
//! The pulse is propagated through the gate's fanout cone under logical,
//! electrical and timing masking, with process variation and aging applied to
//! every gate. A bit-parallel Monte Carlo fault injector serves as reference.

#![no_std]

extern crate alloc;

pub mod engine;
pub mod masking;
pub mod netlist;
pub mod statmath;
pub mod techmodel;
