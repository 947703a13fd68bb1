//! Integral polynomials, PET reductions, IP-set combinatorics and a
//! finite-window symbolic dynamics testbed.

pub mod cli;
pub mod dynamics;
pub mod gammapoly;
pub mod intpoly;
pub mod ipsets;
