//! Finite, dimension-truncated model constructions for type theory.

pub mod alg;
pub mod cat;
pub mod cobar;
pub mod cwf;
pub mod error;
pub mod fib;
pub mod lex;
pub mod psh;
pub mod repr;
pub mod report;

pub use error::{Error, Result};
pub use report::{Budget, Outcome, Report};
