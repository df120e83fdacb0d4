// SPDX-License-Identifier: Apache-2.0

//! File formats, parallel runners and the command-line interface around
//! [`septimate_core`].

pub mod bench;
pub mod cli;
pub mod report;
pub mod runner;
pub mod techfile;

pub use septimate_core as core;
