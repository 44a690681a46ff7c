//! Membership in Frobenius powers of the maximal ideal, Jacobian ideals, and
//! graded-piece linear algebra over `F_p`.
//!
//! Ideal questions are answered one graded piece at a time: the span of
//! `{M·g}` in degree `m` is row-reduced against the monomial basis of
//! `Ā_m`. No Gröbner bases are involved.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polyring::{mul_mod, AlgebraError, Poly, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("graded piece of degree {degree} has {count} monomials, above the cap of {cap}")]
    PieceTooLarge { degree: u64, count: u128, cap: usize },
    #[error("no conclusion below degree ceiling {ceiling}")]
    CeilingExceeded { ceiling: u64 },
}

/// Limits for graded-piece computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealLimits {
    /// Largest number of monomials allowed in one graded piece.
    pub piece_cap: usize,
    /// Highest degree the m-primary scan may visit.
    pub ceiling: u64,
}

impl Default for IdealLimits {
    fn default() -> Self {
        IdealLimits { piece_cap: 400_000, ceiling: u64::MAX }
    }
}

/// Homogeneous ideal of `Ā = F_p[x_0..x_N]` given by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedIdeal {
    ring: Arc<RingSpec>,
    generators: Vec<Poly>,
    degrees: Vec<u64>,
}

impl GradedIdeal {
    /// Generators are reduced mod `p`; zero generators are dropped.
    pub fn new(ring: &RingSpec, generators: impl IntoIterator<Item = Poly>) -> Result<Self, IdealError> {
        let ring = Arc::new(ring.with_precision(1)?);
        let mut gens = Vec::new();
        let mut degrees = Vec::new();
        for g in generators {
            if g.ring().p() != ring.p() || g.ring().weights() != ring.weights() {
                return Err(AlgebraError::RingMismatch.into());
            }
            let g = g.reduce_mod_p();
            match g.weighted_degree_check() {
                (true, None) => continue,
                (true, Some(d)) => {
                    gens.push(g);
                    degrees.push(d);
                }
                (false, _) => {
                    return Err(AlgebraError::Precondition("ideal generators must be homogeneous".into()).into())
                }
            }
        }
        Ok(GradedIdeal { ring, generators: gens, degrees })
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    /// The ideal with one more generator.
    pub fn with_generator(&self, g: Poly) -> Result<Self, IdealError> {
        GradedIdeal::new(&self.ring, self.generators.iter().cloned().chain(std::iter::once(g)))
    }
}

/// `h ∈ (p, x_0^{p^n}, ..., x_N^{p^n})`: after reducing mod `p`, every
/// surviving monomial must have some exponent at least `p^n`.
pub fn frob_power_member(h: &Poly, level: u32) -> Result<bool, AlgebraError> {
    let bound = h.ring().frobenius_bound(level)?;
    let p = h.ring().p();
    Ok(h.terms().all(|(e, c)| c % p == 0 || e.iter().any(|&x| x >= bound)))
}

/// `J(f) = (∂f/∂x_0, ..., ∂f/∂x_N)` reduced mod `p`.
pub fn jacobian(f: &Poly) -> Result<GradedIdeal, IdealError> {
    if !f.weighted_degree_check().0 {
        return Err(AlgebraError::Precondition("the Jacobian ideal needs a homogeneous polynomial".into()).into());
    }
    let f = f.reduce_mod_p();
    let parts = (0..f.ring().nvars()).map(|i| f.derivative(i)).collect::<Result<Vec<_>, _>>()?;
    GradedIdeal::new(f.ring(), parts)
}

/// `(f̄, J(f̄))`.
pub fn jacobian_with_f(f: &Poly) -> Result<GradedIdeal, IdealError> {
    jacobian(f)?.with_generator(f.reduce_mod_p())
}

/// Number of monomials of weighted degree `m`, saturating.
pub fn count_monomials(weights: &[u64], m: u64) -> u128 {
    // counts[j] = number of monomials in the first i variables of degree j
    let m = m as usize;
    let mut counts = vec![0u128; m + 1];
    counts[0] = 1;
    for &q in weights {
        let q = q as usize;
        for j in q..=m {
            counts[j] = counts[j].saturating_add(counts[j - q]);
        }
    }
    counts[m]
}

/// All monomials of weighted degree `m`, in descending lexicographic order.
pub fn monomials_of_degree(weights: &[u64], m: u64, cap: usize) -> Result<Vec<Vec<u64>>, IdealError> {
    let count = count_monomials(weights, m);
    if count > cap as u128 {
        return Err(IdealError::PieceTooLarge { degree: m, count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut cur = vec![0u64; weights.len()];
    fill(weights, 0, m, &mut cur, &mut out);
    Ok(out)
}

fn fill(weights: &[u64], i: usize, rest: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    let q = weights[i];
    if i + 1 == weights.len() {
        if rest.is_multiple_of(q) {
            cur[i] = rest / q;
            out.push(cur.clone());
        }
        return;
    }
    for e in (0..=rest / q).rev() {
        cur[i] = e;
        fill(weights, i + 1, rest - e * q, cur, out);
    }
}

/// Dimensions of `I_m`, `Ā_m` and `(Ā/I)_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceDims {
    pub ideal_dim: usize,
    pub full_dim: usize,
    pub quotient_dim: usize,
}

/// Row-reduced span of sparse vectors over `F_p`, pivoting on the first
/// nonzero column.
struct Echelon {
    p: u64,
    pivots: Vec<Option<Vec<(usize, u64)>>>,
    rank: usize,
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime: a^(p-2)
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

impl Echelon {
    fn new(p: u64, ncols: usize) -> Self {
        Echelon { p, pivots: vec![None; ncols], rank: 0 }
    }

    fn insert(&mut self, mut row: Vec<(usize, u64)>) {
        let p = self.p;
        while let Some(&(lead, val)) = row.first() {
            match &self.pivots[lead] {
                None => {
                    let inv = inv_mod(val, p);
                    for entry in row.iter_mut() {
                        entry.1 = mul_mod(entry.1, inv, p);
                    }
                    self.pivots[lead] = Some(row);
                    self.rank += 1;
                    return;
                }
                Some(piv) => {
                    // row -= val * piv; piv has leading coefficient one
                    let factor = p - val;
                    let mut merged = Vec::with_capacity(row.len() + piv.len());
                    let (mut i, mut j) = (0, 0);
                    while i < row.len() || j < piv.len() {
                        if j == piv.len() || (i < row.len() && row[i].0 < piv[j].0) {
                            merged.push(row[i]);
                            i += 1;
                        } else if i == row.len() || piv[j].0 < row[i].0 {
                            merged.push((piv[j].0, mul_mod(piv[j].1, factor, p)));
                            j += 1;
                        } else {
                            let v = (row[i].1 + mul_mod(piv[j].1, factor, p)) % p;
                            if v != 0 {
                                merged.push((row[i].0, v));
                            }
                            i += 1;
                            j += 1;
                        }
                    }
                    row = merged;
                }
            }
        }
    }
}

/// Rank of `I_m` inside `Ā_m`.
pub fn graded_piece_dim(ideal: &GradedIdeal, m: u64, limits: &IdealLimits) -> Result<PieceDims, IdealError> {
    let weights = ideal.ring.weights();
    let basis = monomials_of_degree(weights, m, limits.piece_cap)?;
    let full_dim = basis.len();
    if full_dim == 0 {
        return Ok(PieceDims { ideal_dim: 0, full_dim: 0, quotient_dim: 0 });
    }
    let index: HashMap<&[u64], usize> = basis.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
    let mut ech = Echelon::new(ideal.ring.p(), full_dim);
    let n = weights.len();
    let mut shifted = vec![0u64; n];
    'gens: for (g, &dg) in ideal.generators.iter().zip(&ideal.degrees) {
        if dg > m {
            continue;
        }
        for mult in monomials_of_degree(weights, m - dg, limits.piece_cap)? {
            let mut row: Vec<(usize, u64)> = g
                .terms()
                .map(|(e, c)| {
                    for i in 0..n {
                        shifted[i] = e[i] + mult[i];
                    }
                    (index[&shifted[..]], c)
                })
                .collect();
            row.sort_unstable_by_key(|t| t.0);
            ech.insert(row);
            if ech.rank == full_dim {
                break 'gens;
            }
        }
    }
    Ok(PieceDims { ideal_dim: ech.rank, full_dim, quotient_dim: full_dim - ech.rank })
}

/// Outcome of the m-primary test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryReport {
    pub is_m_primary: bool,
    /// Largest `m` with `(Ā/I)_m ≠ 0`, when the quotient is finite and nonzero.
    pub top_nonzero_degree: Option<u64>,
    /// Smallest `k` with `Ā_{≥k} ⊆ I`.
    pub k_bound: Option<u64>,
}

fn quotient_dim(ideal: &GradedIdeal, m: u64, limits: &IdealLimits) -> Result<usize, IdealError> {
    graded_piece_dim(ideal, m, limits).map(|d| d.quotient_dim)
}

/// Decides whether `Ā/I` has finite length.
///
/// Vanishing of `(Ā/I)_m` on `max q_i` consecutive degrees forces vanishing
/// above them, since every monomial of higher degree is a variable times
/// one of lower degree. Failure is certified either by a coordinate point
/// where all generators vanish or by a nonzero piece at or above
/// `(N+1)(D-1)+1`, `D` the largest generator degree, which every m-primary
/// ideal generated in degrees `≤ D` contains.
pub fn is_m_primary(ideal: &GradedIdeal, socle_hint: u64, limits: &IdealLimits) -> Result<PrimaryReport, IdealError> {
    let not_primary = PrimaryReport { is_m_primary: false, top_nonzero_degree: None, k_bound: None };
    if ideal.is_zero() {
        return Ok(not_primary);
    }
    let weights = ideal.ring.weights();
    let n = weights.len();
    if ideal.degrees.contains(&0) {
        return Ok(PrimaryReport { is_m_primary: true, top_nonzero_degree: None, k_bound: Some(0) });
    }
    // g(e_i) is the coefficient of the pure power of x_i in g
    for i in 0..n {
        let vanishes = ideal.generators.iter().zip(&ideal.degrees).all(|(g, &d)| {
            if d % weights[i] != 0 {
                return true;
            }
            let mut e = vec![0u64; n];
            e[i] = d / weights[i];
            g.coefficient(&e) == 0
        });
        if vanishes {
            return Ok(not_primary);
        }
    }
    let max_q = ideal.ring.max_weight();
    let top_gen = *ideal.degrees.iter().max().expect("nonzero ideal");
    let certified = (n as u64).saturating_mul(top_gen - 1).saturating_add(1);

    let window: Vec<u64> = (1..=max_q).filter_map(|j| socle_hint.checked_add(j)).collect();
    if window.iter().any(|&m| m > limits.ceiling) {
        return Err(IdealError::CeilingExceeded { ceiling: limits.ceiling });
    }
    let dims = window.par_iter().map(|&m| quotient_dim(ideal, m, limits)).collect::<Result<Vec<_>, _>>()?;

    let mut last_nonzero: Option<u64> = None;
    let mut run = 0u64;
    for (&m, &q) in window.iter().zip(&dims) {
        if q == 0 {
            run += 1;
        } else {
            run = 0;
            last_nonzero = Some(m);
        }
    }
    if let Some(m) = last_nonzero {
        if m >= certified {
            return Ok(not_primary);
        }
    }
    let mut m = socle_hint.saturating_add(max_q);
    while run < max_q {
        m = m.checked_add(1).ok_or(IdealError::CeilingExceeded { ceiling: u64::MAX })?;
        if m > limits.ceiling {
            return Err(IdealError::CeilingExceeded { ceiling: limits.ceiling });
        }
        if quotient_dim(ideal, m, limits)? == 0 {
            run += 1;
        } else {
            if m >= certified {
                return Ok(not_primary);
            }
            run = 0;
            last_nonzero = Some(m);
        }
    }
    let top = match last_nonzero {
        Some(m) => Some(m),
        None => {
            let mut found = None;
            for m in (0..=socle_hint).rev() {
                if quotient_dim(ideal, m, limits)? != 0 {
                    found = Some(m);
                    break;
                }
            }
            found
        }
    };
    Ok(PrimaryReport { is_m_primary: true, top_nonzero_degree: top, k_bound: Some(top.map_or(0, |t| t + 1)) })
}

/// `Ā_{≥k} ⊆ I`, checked on the window `[k, k + max q_i)`.
pub fn contains_degree_tail(ideal: &GradedIdeal, k: u64, limits: &IdealLimits) -> Result<bool, IdealError> {
    let max_q = ideal.ring.max_weight();
    for m in k..k.saturating_add(max_q) {
        if quotient_dim(ideal, m, limits)? != 0 {
            return Ok(false);
        }
    }
    Ok(true)
}
