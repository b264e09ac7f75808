//! Bernstein-Durrmeyer type operators, the distribution of their kernel, and
//! the limits they approach at jump discontinuities.

pub mod error;
pub mod funcmodel;
pub mod kernel_dist;
pub mod limits;
pub mod operators;
pub mod quadrature;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
