//! Generalized Pell equations N_d(x, y) = l, 2-power class group invariants of
//! real quadratic fields, and the random-matrix models predicting their
//! distribution.

pub mod arith;
pub mod error;
pub mod f2linalg;
pub mod model;
pub mod quadform;
pub mod redei;
pub mod scan;

pub use error::{Error, Result};
