//! Sparse arithmetic in `(Z/p^e)[x_0, ..., x_N]` with a weighted grading.

mod mul;
mod parse;
mod poly;
mod ring;

use thiserror::Error;

pub use parse::parse_poly;
pub use poly::{Monomial, Poly};
pub use ring::{gcd, is_prime, RingSpec, MAX_EXPONENT};

pub(crate) use poly::mul_mod;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("exponent or weighted degree exceeds 2^63 - 1")]
    ExponentOverflow,
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("expected {expected} exponents, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("coefficient not divisible by p in f^p - phi(f); input corrupted")]
    NotDivisible,
    #[error("{0}")]
    Precondition(String),
}
