//! Numerical laboratory for Bourgain-type function spaces, paraboloid
//! interactions and a small-data Schrödinger map solver.

pub mod cli;
pub mod dyadic;
pub mod error;
pub mod lab;
pub mod norms;
pub mod regression;
pub mod report;
pub mod sample;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
