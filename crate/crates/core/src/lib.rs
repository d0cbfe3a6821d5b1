//! Exact maximum robust flow, randomized network interdiction, and the
//! reductions between their variants.

pub mod error;
pub mod instances;
pub mod io;
pub mod limits;
pub mod lp;
pub mod oracles;
pub mod rational;
pub mod reductions;
pub mod solvers;

pub use error::{Error, Result};
pub use limits::Limits;
pub use rational::Rational;
