//! Complex error function and the Moshinsky shutter function built on it.

mod faddeeva;
mod moshinsky;

use num_complex::Complex64;
use thiserror::Error;

pub use faddeeva::{faddeeva, faddeeva_derivative};
pub use moshinsky::{moshinsky_m, moshinsky_m_dt, moshinsky_pair, MoshinskyArg};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum SpecialError {
    #[error("non-finite argument {0}")]
    NonFinite(Complex64),
    #[error("w({0}) overflows the double range")]
    Overflow(Complex64),
    #[error("time must be strictly positive (got {0} fs)")]
    NonPositiveTime(f64),
}
