pub mod error;
pub mod geometry;
pub mod harness;
pub mod problems;
pub mod solver;
pub mod stochastic;

pub use error::{Error, Result};
