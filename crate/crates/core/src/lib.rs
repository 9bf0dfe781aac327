//! Binary (B₂-valued) measure theory over exact rationals.

pub mod b2;
pub mod carrier;
pub mod rational;
pub mod set_function;
pub mod set_ring;
pub mod interval;
pub mod step;
pub mod ls;
pub mod sample;
pub mod catalog;
pub mod literal;
pub mod derivable;
pub mod integration;
pub mod verify;
pub mod cli;
