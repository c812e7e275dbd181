//! Pointwise approximation by uniformly bounded polynomials on subsets of the
//! unit circle: weak-star testing, quotient distances to the disk algebra,
//! convex-combination steps and the end-to-end construction.

// Guards of the form `!(x > 0.0)` are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub type C64 = num_complex::Complex64;

pub mod circle;
pub mod driver;
pub mod error;
pub(crate) mod fft;
pub mod hardy;
pub mod io;
pub mod mazur;
pub mod nehari;
pub mod pipeline;
pub mod scenarios;
pub mod solver;
pub mod weakstar;

pub use error::{Error, Result};
