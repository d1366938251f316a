//! Polynomial skew products `f(z,w) = (p(z), q(z,w))` near infinity.
//!
//! The pipeline runs newton polygon -> case classification -> invariant
//! region -> Boettcher coordinate, with the blow-up/covering transforms and
//! the classification at infinity hanging off the same plan.

pub mod bottcher;
pub mod classify;
pub mod cli;
pub mod error;
pub mod exact;
pub mod infinity;
pub mod newton;
pub mod poly;
pub mod precision;
pub mod region;
pub mod transforms;

pub use error::{Error, Result};
pub use exact::{ExtRational, Rational};
