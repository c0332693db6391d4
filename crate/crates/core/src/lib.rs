//! Finite-domain monotone comparative statics.
//!
//! Orders and set orders ([`order`]), maximizers and dominance between
//! objectives ([`choice`]), Pareto optimal choice of groups ([`pareto`]),
//! fixed points of monotone correspondences ([`fixedpoint`]), games with weak
//! strategic complementarities ([`games`]) and matching with choice
//! correspondences ([`matching`]). All arithmetic is exact.

pub mod choice;
pub mod error;
pub mod fixedpoint;
pub mod games;
pub mod gen;
pub mod limits;
pub mod matching;
pub mod order;
pub mod pareto;

pub use error::{Error, Result};
pub use limits::Limits;
pub use order::{FinitePoset, SetOrder, SetOrderReport, Subset};

/// Exact rational number used for every payoff, price and weight.
pub type Q = num_rational::Rational64;
