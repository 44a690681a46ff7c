//! Splitting-order sequences.
//!
//! Level `n` asks for the largest `s ≤ p` with
//! `G(s) = L_{n-1}^p Δ(f)^{s_{n-1}} f^{p-s} ∈ m^{[p^n]}`, where `L_0 = 1`,
//! `s_0 = 0` and `L_n = G(s_n + 1)`. All level-`n` arithmetic is done mod `p`
//! and modulo `(x_i^{p^n})`, so membership is just "the truncation is zero".

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frobdelta::{delta, frobenius_power_truncated};
use crate::polyring::{AlgebraError, Poly, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{0}")]
    Precondition(String),
    #[error("the prefix already reached s_n = p; the recursion stops there")]
    Unbounded,
    #[error("level {level}: intermediate product has {terms} terms, above the cap of {cap}")]
    TooLarge { level: usize, terms: usize, cap: usize },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("no vanishing threshold unless Q > d")]
    NoThreshold,
    #[error("internal error: {0}")]
    Internal(String),
}

/// Resource limits for a splitting run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitLimits {
    /// Largest polynomial (in terms) any intermediate product may have.
    pub max_terms: usize,
}

impl Default for SplitLimits {
    fn default() -> Self {
        SplitLimits { max_terms: 20_000_000 }
    }
}

/// A computed prefix `(s_1, ..., s_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPrefix {
    pub s: Vec<u64>,
    /// `L_i` reduced mod `p` and mod `(x_j^{p^i})`, for each level with `s_i ≤ p - 1`.
    pub witnesses: Vec<Poly>,
    /// False once some `s_n = p`.
    pub bounded: bool,
    /// `Δ(f) mod p`.
    pub delta: Poly,
    /// `deg f`.
    pub degree: u64,
    /// Why the run stopped before the requested depth, if it did for a
    /// reason other than `s_n = p`.
    pub halted: Option<String>,
    limits: SplitLimits,
}

impl SplitPrefix {
    /// Level zero: `Δ(f)` computed, no `s_i` yet.
    pub fn start(f: &Poly, limits: SplitLimits) -> Result<Self, SplitError> {
        let degree = match f.weighted_degree_check() {
            (true, Some(d)) if d > 0 => d,
            (true, _) => return Err(SplitError::Precondition("f must be a nonconstant form".into())),
            (false, _) => return Err(SplitError::Precondition("f must be homogeneous".into())),
        };
        let dl = delta(f)?;
        Ok(SplitPrefix {
            s: Vec::new(),
            witnesses: Vec::new(),
            bounded: true,
            delta: dl.delta,
            degree,
            halted: None,
            limits,
        })
    }

    pub fn depth(&self) -> usize {
        self.s.len()
    }

    pub fn p(&self) -> u64 {
        self.delta.ring().p()
    }
}

fn check_size(g: &Poly, level: usize, limits: &SplitLimits) -> Result<(), SplitError> {
    if g.nterms() > limits.max_terms {
        return Err(SplitError::TooLarge { level, terms: g.nterms(), cap: limits.max_terms });
    }
    Ok(())
}

/// `L_{n-1}^p Δ^{s_{n-1}}` truncated at `p^n`, for `n = level`.
fn level_base(prefix: &SplitPrefix, level: usize, bound: u64) -> Result<Poly, SplitError> {
    let ring = prefix.delta.ring_arc().clone();
    if level == 1 {
        return Ok(Poly::one(ring).truncate(bound));
    }
    let prev = &prefix.witnesses[level - 2];
    let mut base = frobenius_power_truncated(prev, bound)?;
    check_size(&base, level, &prefix.limits)?;
    for _ in 0..prefix.s[level - 2] {
        if base.is_zero() {
            break;
        }
        base = base.mul_truncated(&prefix.delta, bound)?;
        check_size(&base, level, &prefix.limits)?;
    }
    Ok(base)
}

/// Computes `s_n` for the next level and appends it (and `L_n`) to `prefix`.
///
/// The scan starts at `s = p` with `G(p)` and multiplies by `f` on the way
/// down; the first member found is the maximum, by the down-set property.
pub fn next_split_order(prefix: &mut SplitPrefix, f: &Poly) -> Result<u64, SplitError> {
    if !prefix.bounded {
        return Err(SplitError::Unbounded);
    }
    let level = prefix.depth() + 1;
    let p = prefix.p();
    let fbar = f.reduce_mod_p();
    fbar.check_same_ring(&prefix.delta)?;
    let level_u32 = u32::try_from(level).map_err(|_| SplitError::Overflow)?;
    let bound = fbar.ring().frobenius_bound(level_u32)?;
    let mut g = level_base(prefix, level, bound)?;
    let mut prev: Option<Poly> = None;
    let mut s = p;
    while !g.is_zero() {
        if s == 0 {
            return Err(SplitError::Internal(format!("level {level}: G(0) is not a member")));
        }
        let next = g.mul_truncated(&fbar, bound)?;
        check_size(&next, level, &prefix.limits)?;
        prev = Some(std::mem::replace(&mut g, next));
        s -= 1;
    }
    prefix.s.push(s);
    match prev {
        Some(l) => prefix.witnesses.push(l),
        None => prefix.bounded = false,
    }
    Ok(s)
}

/// Runs the recursion to depth `n_max` or until `s_n = p`. Overflow or
/// resource exhaustion at some level ends the run early with `halted` set.
pub fn splitting_prefix(f: &Poly, n_max: usize, limits: SplitLimits) -> Result<SplitPrefix, SplitError> {
    if n_max == 0 {
        return Err(SplitError::Precondition("depth must be at least 1".into()));
    }
    let mut prefix = SplitPrefix::start(f, limits)?;
    while prefix.depth() < n_max && prefix.bounded {
        match next_split_order(&mut prefix, f) {
            Ok(_) => {}
            Err(
                e @ (SplitError::Algebra(AlgebraError::ExponentOverflow)
                | SplitError::TooLarge { .. }
                | SplitError::Overflow),
            ) => {
                prefix.halted = Some(format!("stopped at depth {}: {e}", prefix.depth()));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(prefix)
}

/// Whether `G(s) ∈ m^{[p^n]}` at `level = n`, recomputed from the stored
/// witnesses. Needs `s_1..s_{n-1}` already in `prefix`.
pub fn split_member(prefix: &SplitPrefix, f: &Poly, level: usize, s: u64) -> Result<bool, SplitError> {
    let p = prefix.p();
    if level == 0 || level > prefix.witnesses.len() + 1 || s > p {
        return Err(SplitError::Precondition(format!("level {level}, s = {s} is outside the computed prefix")));
    }
    let level_u32 = u32::try_from(level).map_err(|_| SplitError::Overflow)?;
    let fbar = f.reduce_mod_p();
    let bound = fbar.ring().frobenius_bound(level_u32)?;
    let base = level_base(prefix, level, bound)?;
    let g = base.mul_truncated(&fbar.pow_truncated(p - s, bound)?, bound)?;
    Ok(g.is_zero())
}

/// `L_n · (f, J(f)) ⊆ m^{[p^n]}` for the stored witness at `level = n`.
pub fn witness_kills_jacobian(prefix: &SplitPrefix, f: &Poly, level: usize) -> Result<bool, SplitError> {
    let l = prefix
        .witnesses
        .get(level.wrapping_sub(1))
        .ok_or_else(|| SplitError::Precondition(format!("no witness at level {level}")))?;
    let level_u32 = u32::try_from(level).map_err(|_| SplitError::Overflow)?;
    let fbar = f.reduce_mod_p();
    let bound = fbar.ring().frobenius_bound(level_u32)?;
    if !l.mul_truncated(&fbar, bound)?.is_zero() {
        return Ok(false);
    }
    for i in 0..fbar.ring().nvars() {
        if !l.mul_truncated(&fbar.derivative(i)?, bound)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rigorous enclosure `[lower, lower + width]` of `Σ (p - s_i - 1)/p^i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PptEnclosure {
    pub lower: Ratio<u128>,
    pub width: Ratio<u128>,
    pub depth: usize,
}

impl PptEnclosure {
    pub fn upper(&self) -> Ratio<u128> {
        self.lower + self.width
    }
}

pub fn ppt_enclosure(prefix: &SplitPrefix) -> Result<PptEnclosure, SplitError> {
    if !prefix.bounded {
        return Err(SplitError::Precondition("ppt enclosure needs every s_i ≤ p - 1".into()));
    }
    let p = prefix.p() as u128;
    let mut lower = Ratio::from_integer(0u128);
    let mut pw: u128 = 1;
    for &s in &prefix.s {
        pw = pw.checked_mul(p).ok_or(SplitError::Overflow)?;
        lower += Ratio::new(p - s as u128 - 1, pw);
    }
    Ok(PptEnclosure { lower, width: Ratio::new(1, pw), depth: prefix.depth() })
}

/// `(N_m)`: `d(p^m - p - 1) < p^m Q + Q - (N+1) d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NmCheck {
    pub m: u32,
    pub lhs: i128,
    pub rhs: i128,
    pub holds: bool,
}

fn pow_i128(p: u64, m: u32) -> Result<i128, SplitError> {
    (p as i128).checked_pow(m).ok_or(SplitError::Overflow)
}

pub fn check_nm(ring: &RingSpec, d: u64, m: u32) -> Result<NmCheck, SplitError> {
    let p = ring.p();
    let q = ring.total_weight() as i128;
    let d = d as i128;
    let n1 = ring.nvars() as i128;
    let pm = pow_i128(p, m)?;
    let lhs = pm.checked_sub(p as i128 + 1).and_then(|x| x.checked_mul(d)).ok_or(SplitError::Overflow)?;
    let rhs = pm
        .checked_mul(q)
        .and_then(|x| x.checked_add(q))
        .and_then(|x| x.checked_sub(n1.checked_mul(d)?))
        .ok_or(SplitError::Overflow)?;
    Ok(NmCheck { m, lhs, rhs, holds: lhs < rhs })
}

/// Smallest `n ≥ 1` with `d(p^n - 2) < p^n Q + Q - (N+1) d`, or with
/// `d(p^n - 2) < p^n Q - Q - k + 1` when `k` is given. Both inequalities
/// persist for all larger `n` once `Q > d`.
pub fn vanishing_threshold(ring: &RingSpec, d: u64, k: Option<u64>) -> Result<u32, SplitError> {
    let q = ring.total_weight() as i128;
    if q <= d as i128 {
        return Err(SplitError::NoThreshold);
    }
    let d = d as i128;
    let n1 = ring.nvars() as i128;
    let offset = match k {
        None => q - n1 * d,
        Some(k) => 1 - q - k as i128,
    };
    for n in 1u32.. {
        let pn = pow_i128(ring.p(), n)?;
        let lhs = pn.checked_sub(2).and_then(|x| x.checked_mul(d)).ok_or(SplitError::Overflow)?;
        let rhs = pn.checked_mul(q).and_then(|x| x.checked_add(offset)).ok_or(SplitError::Overflow)?;
        if lhs < rhs {
            return Ok(n);
        }
    }
    unreachable!()
}
