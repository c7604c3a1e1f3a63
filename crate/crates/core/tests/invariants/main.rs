//! Invariants, oracles and front-end behavior.

#[path = "../common/mod.rs"]
mod common;

mod cli;
mod moment;
mod simulator;
mod steering;
