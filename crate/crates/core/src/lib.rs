//! Agent runtime and benchmark for language-model agents that take expert
//! "additional opinions" into account.
//!
//! The crate bundles an Auto-GPT style step loop, pluggable model backends,
//! two deterministic text environments (a web shop and a household world),
//! expert policies that double as opinion sources, and a harness that runs
//! suites and reports success, reward, precision and agreement metrics.

pub mod agent;
pub mod backends;
pub mod env;
pub mod experts;
pub mod harness;
pub mod housesim;
pub mod opinions;
pub mod shopsim;
pub mod text;
