use std::fmt;

use super::AlgebraError;

/// Largest exponent a monomial may carry. Everything above fails with
/// [`AlgebraError::ExponentOverflow`] instead of wrapping.
pub const MAX_EXPONENT: u64 = (1u64 << 63) - 1;

/// Ambient data of the graded ring `(Z/p^e)[x_0, ..., x_N]` with
/// `deg x_i = q_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingSpec {
    p: u64,
    precision: u32,
    weights: Vec<u64>,
    modulus: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut k = 3u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl RingSpec {
    pub fn new(p: u64, precision: u32, weights: Vec<u64>) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::InvalidRing(format!("{p} is not prime")));
        }
        if precision == 0 {
            return Err(AlgebraError::InvalidRing("precision must be at least 1".into()));
        }
        if weights.is_empty() {
            return Err(AlgebraError::InvalidRing("at least one variable is required".into()));
        }
        if let Some(i) = weights.iter().position(|&q| q == 0) {
            return Err(AlgebraError::InvalidRing(format!("weight q_{i} must be positive")));
        }
        let modulus = p
            .checked_pow(precision)
            .filter(|m| *m <= (1u64 << 62))
            .ok_or_else(|| AlgebraError::InvalidRing(format!("{p}^{precision} does not fit a machine word")))?;
        weights
            .iter()
            .try_fold(0u64, |acc, &q| acc.checked_add(q).filter(|s| *s <= MAX_EXPONENT))
            .ok_or_else(|| AlgebraError::InvalidRing("weight sum overflows".into()))?;
        Ok(RingSpec { p, precision, weights, modulus })
    }

    /// Standard grading, all weights one.
    pub fn standard(p: u64, precision: u32, nvars: usize) -> Result<Self, AlgebraError> {
        RingSpec::new(p, precision, vec![1; nvars])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^e`, the modulus of the coefficient ring.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// `Q = q_0 + ... + q_N`.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(1)
    }

    /// Same variables and weights, different coefficient precision.
    pub fn with_precision(&self, precision: u32) -> Result<Self, AlgebraError> {
        RingSpec::new(self.p, precision, self.weights.clone())
    }

    /// A weighted projective space is well formed when dropping any single
    /// weight leaves weights with gcd one. With a single variable the space
    /// is a point and only `q_0 = 1` is accepted.
    pub fn is_well_formed(&self) -> bool {
        if self.weights.len() == 1 {
            return self.weights[0] == 1;
        }
        (0..self.weights.len()).all(|skip| {
            self.weights.iter().enumerate().filter(|(i, _)| *i != skip).fold(0, |g, (_, &q)| gcd(g, q)) == 1
        })
    }

    /// `p^n` as an exponent bound, if representable.
    pub fn frobenius_bound(&self, level: u32) -> Result<u64, AlgebraError> {
        self.p.checked_pow(level).filter(|b| *b <= MAX_EXPONENT).ok_or(AlgebraError::ExponentOverflow)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weights.iter().map(|q| q.to_string()).collect();
        write!(f, "(Z/{}^{})[x0..x{}] weights ({})", self.p, self.precision, self.nvars() - 1, w.join(","))
    }
}
