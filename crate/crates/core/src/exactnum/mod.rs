//! Exact rational and first-order-infinitesimal arithmetic.

pub mod perturbed;
pub mod rational;

pub use perturbed::{lex_compare, LexOrdering, PerturbedSize};
pub use rational::{floor_div, format_rational, int, parse_rational, rat, to_decimal, Rational};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("ambiguous comparison of mixed infinitesimals: {0}")]
    Ambiguous(String),
    #[error("domain error: {0}")]
    Domain(String),
}
