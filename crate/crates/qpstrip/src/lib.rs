//! Numerics for one-frequency quasi-periodic Schrodinger operators, their long-range
//! (strip) duals, and the finite-volume objects used in localization and
//! almost-reducibility arguments.
//!
//! Everything is generic over the real field `T: Real` (`f32` or `f64`); the
//! aliases at the crate root fix `f64`.

pub mod arithmetic;
pub mod cocycles;
pub mod duality;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod localization;
pub mod operators;
pub mod random;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = linalg::ComplexMatrix<f64>;
pub type C64 = num_complex::Complex<f64>;
