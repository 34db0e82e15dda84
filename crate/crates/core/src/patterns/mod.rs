//! Dominance relations, type reduction and heaviest-pattern search.

mod dominance;
mod knapsack;
mod witness;

pub use dominance::{
    check_dominance, reduced_type_set, size_condition, substitute, weight_condition, DominanceClosure,
};
pub use knapsack::{
    heaviest_pattern, knapsack_report, verify_dominant_only, ClassReport, Heaviest, KnapsackConfig,
    KnapsackReport, Provenance,
};
pub use witness::{l_shell_layout, pinwheel_layout, PinwheelParams};

use std::fmt;

use thiserror::Error;

use crate::exactnum::NumError;
use crate::model::ModelError;
use crate::packing::PackingError;

/// `m1 × m2` items of the dominator type replace one item of the dominated type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DominanceRule {
    pub dominator: usize,
    pub dominated: usize,
    pub m1: u32,
    pub m2: u32,
}

impl fmt::Display for DominanceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m1 == self.m2 {
            if self.m1 > 1 {
                write!(f, "{}^2 ", self.m1)?;
            }
        } else {
            write!(f, "({}x{}) ", self.m1, self.m2)?;
        }
        write!(f, "s{} > s{}", self.dominator + 1, self.dominated + 1)
    }
}

#[derive(Debug, Error)]
pub enum PatternError {
    #[error("invalid rule {0}: {1}")]
    Rule(String, String),
    #[error("search budget exhausted on pattern {0}")]
    Budget(String),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Num(#[from] NumError),
}
