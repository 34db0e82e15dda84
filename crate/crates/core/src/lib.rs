//! Exact verification of lower bounds for online hypercube and rectangle bin packing.

pub mod cli;
pub mod exactnum;
pub mod harmonic;
pub mod lp;
pub mod model;
pub mod packing;
pub mod patterns;
