//! Evolutionary test generation for functional BIST of sequential
//! arithmetic datapaths.

pub mod bits;
pub mod microarch;
pub mod sensitivity;
pub mod evo_ga;
pub mod rng;
pub mod signature;
pub mod netlist;
pub mod evo_gp;
pub mod harness;
