//! Exact isotropy and u-invariant computations for quadratic and hermitian
//! forms over towers of complete discretely valued fields.

pub mod arith;
pub mod brauer;
pub mod error;
pub mod fields;
pub mod hermitian;
pub mod lab;
pub mod quadform;
pub mod uinv;
pub mod verify;

pub use error::{Error, Result};
