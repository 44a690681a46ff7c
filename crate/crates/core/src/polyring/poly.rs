use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use super::ring::{RingSpec, MAX_EXPONENT};
use super::AlgebraError;

/// Exponent vector of a monomial `x_0^{a_0} ... x_N^{a_N}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u64>);

impl Monomial {
    pub fn new(exponents: Vec<u64>) -> Result<Self, AlgebraError> {
        if exponents.iter().any(|&e| e > MAX_EXPONENT) {
            return Err(AlgebraError::ExponentOverflow);
        }
        Ok(Monomial(exponents))
    }

    pub fn exponents(&self) -> &[u64] {
        &self.0
    }

    pub fn weighted_degree(&self, weights: &[u64]) -> Result<u64, AlgebraError> {
        weighted_degree(&self.0, weights)
    }
}

pub(crate) fn weighted_degree(exps: &[u64], weights: &[u64]) -> Result<u64, AlgebraError> {
    let deg: u128 = exps.iter().zip(weights).map(|(&e, &q)| e as u128 * q as u128).sum();
    if deg > MAX_EXPONENT as u128 {
        return Err(AlgebraError::ExponentOverflow);
    }
    Ok(deg as u64)
}

/// Sparse polynomial over `Z/p^e` in the variables of its [`RingSpec`].
///
/// Terms are stored flat, sorted by descending lexicographic order of the
/// exponent vectors, with every coefficient in `[1, p^e)`. Every stored
/// monomial has weighted degree at most [`MAX_EXPONENT`].
#[derive(Clone, Debug)]
pub struct Poly {
    ring: Arc<RingSpec>,
    exps: Vec<u64>,
    coeffs: Vec<u64>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.exps == other.exps && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

/// Reduces a signed integer into `[0, m)`.
pub(crate) fn reduce_signed(c: i128, m: u64) -> u64 {
    c.rem_euclid(m as i128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Unsorted term accumulator; `finish` canonicalizes.
pub(crate) struct TermBuf {
    nvars: usize,
    exps: Vec<u64>,
    coeffs: Vec<u64>,
}

impl TermBuf {
    pub(crate) fn new(nvars: usize) -> Self {
        TermBuf { nvars, exps: Vec::new(), coeffs: Vec::new() }
    }

    pub(crate) fn with_capacity(nvars: usize, terms: usize) -> Self {
        TermBuf { nvars, exps: Vec::with_capacity(terms * nvars), coeffs: Vec::with_capacity(terms) }
    }

    pub(crate) fn push(&mut self, exps: &[u64], coeff: u64) {
        debug_assert_eq!(exps.len(), self.nvars);
        self.exps.extend_from_slice(exps);
        self.coeffs.push(coeff);
    }

    /// Sorts, merges equal monomials, reduces modulo `p^e`, drops zeros.
    pub(crate) fn finish(self, ring: Arc<RingSpec>) -> Poly {
        let n = self.nvars;
        let m = ring.modulus();
        let mut order: Vec<usize> = (0..self.coeffs.len()).collect();
        let ex = &self.exps;
        let row = |i: usize| &ex[i * n..(i + 1) * n];
        order.sort_unstable_by(|&i, &j| row(j).cmp(row(i)));
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut coeffs: Vec<u64> = Vec::with_capacity(self.coeffs.len());
        let mut k = 0;
        while k < order.len() {
            let cur = row(order[k]);
            let mut acc = 0u64;
            while k < order.len() && row(order[k]) == cur {
                acc = ((acc as u128 + self.coeffs[order[k]] as u128) % m as u128) as u64;
                k += 1;
            }
            if acc != 0 {
                exps.extend_from_slice(cur);
                coeffs.push(acc);
            }
        }
        Poly { ring, exps, coeffs }
    }
}

impl Poly {
    pub fn zero(ring: impl Into<Arc<RingSpec>>) -> Self {
        Poly { ring: ring.into(), exps: Vec::new(), coeffs: Vec::new() }
    }

    pub fn one(ring: impl Into<Arc<RingSpec>>) -> Self {
        Poly::constant(ring, 1)
    }

    pub fn constant(ring: impl Into<Arc<RingSpec>>, c: i64) -> Self {
        let ring = ring.into();
        let c = reduce_signed(c as i128, ring.modulus());
        let n = ring.nvars();
        if c == 0 {
            return Poly::zero(ring);
        }
        Poly { ring, exps: vec![0; n], coeffs: vec![c] }
    }

    /// The variable `x_i`.
    pub fn variable(ring: impl Into<Arc<RingSpec>>, i: usize) -> Result<Self, AlgebraError> {
        let ring = ring.into();
        if i >= ring.nvars() {
            return Err(AlgebraError::VariableOutOfRange { index: i, nvars: ring.nvars() });
        }
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Poly::monomial(ring, e, 1)
    }

    pub fn monomial(ring: impl Into<Arc<RingSpec>>, exponents: Vec<u64>, c: i64) -> Result<Self, AlgebraError> {
        Poly::from_terms(ring, [(exponents, c)])
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs. Coefficients
    /// are reduced into `[0, p^e)`, duplicates merged, zeros dropped.
    pub fn from_terms<I>(ring: impl Into<Arc<RingSpec>>, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<u64>, i64)>,
    {
        let ring = ring.into();
        let n = ring.nvars();
        let m = ring.modulus();
        let mut buf = TermBuf::new(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(AlgebraError::ArityMismatch { expected: n, got: e.len() });
            }
            weighted_degree(&e, ring.weights())?;
            buf.push(&e, reduce_signed(c as i128, m));
        }
        Ok(buf.finish(ring))
    }

    pub(crate) fn from_sorted_parts(ring: Arc<RingSpec>, exps: Vec<u64>, coeffs: Vec<u64>) -> Self {
        debug_assert_eq!(exps.len(), coeffs.len() * ring.nvars());
        Poly { ring, exps, coeffs }
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn ring_arc(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    pub fn nterms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Terms in canonical (descending lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u64], u64)> + '_ {
        let n = self.ring.nvars();
        self.coeffs.iter().enumerate().map(move |(k, &c)| (&self.exps[k * n..(k + 1) * n], c))
    }

    /// Coefficient of the given monomial, zero when absent.
    pub fn coefficient(&self, exponents: &[u64]) -> u64 {
        let n = self.ring.nvars();
        if exponents.len() != n {
            return 0;
        }
        let (mut lo, mut hi) = (0usize, self.coeffs.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.exps[mid * n..(mid + 1) * n].cmp(exponents) {
                Ordering::Equal => return self.coeffs[mid],
                // descending storage
                Ordering::Greater => lo = mid + 1,
                Ordering::Less => hi = mid,
            }
        }
        0
    }

    pub fn check_same_ring(&self, other: &Poly) -> Result<(), AlgebraError> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(AlgebraError::RingMismatch)
        }
    }

    /// `(homogeneous, degree)`; the zero polynomial is homogeneous with no degree.
    pub fn weighted_degree_check(&self) -> (bool, Option<u64>) {
        let w = self.ring.weights();
        let mut degs = self.terms().map(|(e, _)| weighted_degree(e, w).expect("stored monomials have bounded degree"));
        let Some(first) = degs.next() else {
            return (true, None);
        };
        if degs.all(|d| d == first) {
            (true, Some(first))
        } else {
            (false, None)
        }
    }

    /// Degree when homogeneous and nonzero.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        match self.weighted_degree_check() {
            (true, Some(d)) => Some(d),
            _ => None,
        }
    }

    pub(crate) fn max_term_degree(&self) -> u64 {
        let w = self.ring.weights();
        self.terms().map(|(e, _)| weighted_degree(e, w).unwrap_or(MAX_EXPONENT)).max().unwrap_or(0)
    }

    /// Largest exponent of each variable over all terms.
    pub fn max_exponents(&self) -> Vec<u64> {
        let mut out = vec![0; self.ring.nvars()];
        for (e, _) in self.terms() {
            for (o, &x) in out.iter_mut().zip(e) {
                *o = (*o).max(x);
            }
        }
        out
    }

    fn combine(&self, other: &Poly, negate_other: bool) -> Result<Poly, AlgebraError> {
        self.check_same_ring(other)?;
        let m = self.ring.modulus();
        let n = self.ring.nvars();
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + other.coeffs.len());
        let (mut i, mut j) = (0, 0);
        let neg = |c: u64| if negate_other { (m - c) % m } else { c };
        while i < self.coeffs.len() || j < other.coeffs.len() {
            let ord = if i == self.coeffs.len() {
                Ordering::Less
            } else if j == other.coeffs.len() {
                Ordering::Greater
            } else {
                self.exps[i * n..(i + 1) * n].cmp(&other.exps[j * n..(j + 1) * n])
            };
            match ord {
                Ordering::Greater => {
                    exps.extend_from_slice(&self.exps[i * n..(i + 1) * n]);
                    coeffs.push(self.coeffs[i]);
                    i += 1;
                }
                Ordering::Less => {
                    exps.extend_from_slice(&other.exps[j * n..(j + 1) * n]);
                    coeffs.push(neg(other.coeffs[j]));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = (self.coeffs[i] + neg(other.coeffs[j])) % m;
                    if c != 0 {
                        exps.extend_from_slice(&self.exps[i * n..(i + 1) * n]);
                        coeffs.push(c);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(Poly { ring: self.ring.clone(), exps, coeffs })
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Poly {
        self.scale_signed(-1)
    }

    pub fn scale(&self, c: u64) -> Poly {
        let m = self.ring.modulus();
        let c = c % m;
        let mut buf_exps = Vec::with_capacity(self.exps.len());
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (e, a) in self.terms() {
            let v = mul_mod(a, c, m);
            if v != 0 {
                buf_exps.extend_from_slice(e);
                coeffs.push(v);
            }
        }
        Poly { ring: self.ring.clone(), exps: buf_exps, coeffs }
    }

    pub fn scale_signed(&self, c: i64) -> Poly {
        self.scale(reduce_signed(c as i128, self.ring.modulus()))
    }

    /// Exact product in `Z/p^e`.
    pub fn mul(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        super::mul::product(self, other, None)
    }

    /// Product with every monomial having some exponent `>= bound` dropped,
    /// i.e. the product computed modulo `(x_0^bound, ..., x_N^bound)`.
    pub fn mul_truncated(&self, other: &Poly, bound: u64) -> Result<Poly, AlgebraError> {
        super::mul::product(self, other, Some(bound))
    }

    /// `self^k` by binary exponentiation; `self^0 = 1`.
    pub fn pow(&self, k: u64) -> Result<Poly, AlgebraError> {
        self.pow_impl(k, None)
    }

    pub fn pow_truncated(&self, k: u64, bound: u64) -> Result<Poly, AlgebraError> {
        self.pow_impl(k, Some(bound))
    }

    fn pow_impl(&self, mut k: u64, bound: Option<u64>) -> Result<Poly, AlgebraError> {
        let mut result = Poly::one(self.ring.clone());
        if let Some(b) = bound {
            result = result.truncate(b);
        }
        let mut base = match bound {
            Some(b) => self.truncate(b),
            None => self.clone(),
        };
        while k > 0 {
            if k & 1 == 1 {
                result = super::mul::product(&result, &base, bound)?;
            }
            k >>= 1;
            if k > 0 {
                base = super::mul::product(&base, &base, bound)?;
            }
        }
        Ok(result)
    }

    /// Formal partial derivative `d/dx_i`, coefficients reduced mod `p^e`.
    pub fn derivative(&self, i: usize) -> Result<Poly, AlgebraError> {
        let n = self.ring.nvars();
        if i >= n {
            return Err(AlgebraError::VariableOutOfRange { index: i, nvars: n });
        }
        let m = self.ring.modulus();
        let mut buf = TermBuf::new(n);
        let mut scratch = vec![0u64; n];
        for (e, c) in self.terms() {
            if e[i] == 0 {
                continue;
            }
            let v = mul_mod(c, e[i] % m, m);
            if v == 0 {
                continue;
            }
            scratch.copy_from_slice(e);
            scratch[i] -= 1;
            buf.push(&scratch, v);
        }
        // lowering one exponent keeps descending order, but finish() is cheap
        // and keeps the invariant obviously true
        Ok(buf.finish(self.ring.clone()))
    }

    /// Drops every monomial with some exponent `>= bound`.
    pub fn truncate(&self, bound: u64) -> Poly {
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (e, c) in self.terms() {
            if e.iter().all(|&x| x < bound) {
                exps.extend_from_slice(e);
                coeffs.push(c);
            }
        }
        Poly { ring: self.ring.clone(), exps, coeffs }
    }

    /// Reduction modulo the monomial part `(x_0^{p^n}, ..., x_N^{p^n})` of
    /// the Frobenius power of the maximal ideal.
    pub fn truncate_frobenius(&self, level: u32) -> Result<Poly, AlgebraError> {
        let bound = self.ring.frobenius_bound(level)?;
        Ok(self.truncate(bound))
    }

    /// `f mod p`, as a polynomial over `F_p`.
    pub fn reduce_mod_p(&self) -> Poly {
        if self.ring.precision() == 1 {
            return self.clone();
        }
        let ring = Arc::new(self.ring.with_precision(1).expect("precision one is always valid"));
        let p = ring.p();
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (e, c) in self.terms() {
            if c % p != 0 {
                exps.extend_from_slice(e);
                coeffs.push(c % p);
            }
        }
        Poly { ring, exps, coeffs }
    }

    /// Moves to another precision: reduction when lowering, the canonical
    /// section `[0, p^e) ⊂ [0, p^{e'})` when raising.
    pub fn with_precision(&self, precision: u32) -> Result<Poly, AlgebraError> {
        if precision == self.ring.precision() {
            return Ok(self.clone());
        }
        let ring = Arc::new(self.ring.with_precision(precision)?);
        let m = ring.modulus();
        let mut exps = Vec::with_capacity(self.exps.len());
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (e, c) in self.terms() {
            if c % m != 0 {
                exps.extend_from_slice(e);
                coeffs.push(c % m);
            }
        }
        Ok(Poly { ring, exps, coeffs })
    }

    /// Multiplies every exponent vector by `k`, leaving coefficients alone.
    pub(crate) fn scale_exponents(&self, k: u64) -> Result<Poly, AlgebraError> {
        let w = self.ring.weights();
        let mut exps = Vec::with_capacity(self.exps.len());
        for (e, _) in self.terms() {
            for &x in e {
                let y = x.checked_mul(k).filter(|y| *y <= MAX_EXPONENT).ok_or(AlgebraError::ExponentOverflow)?;
                exps.push(y);
            }
            weighted_degree(&exps[exps.len() - e.len()..], w)?;
        }
        // scaling by k > 0 preserves lexicographic order
        debug_assert!(k > 0 || self.nterms() <= 1);
        Ok(Poly { ring: self.ring.clone(), exps, coeffs: self.coeffs.clone() })
    }

    /// Multiplication by a monomial.
    pub fn shift(&self, by: &[u64]) -> Result<Poly, AlgebraError> {
        let n = self.ring.nvars();
        if by.len() != n {
            return Err(AlgebraError::ArityMismatch { expected: n, got: by.len() });
        }
        let w = self.ring.weights();
        let mut exps = Vec::with_capacity(self.exps.len());
        for (e, _) in self.terms() {
            for (x, y) in e.iter().zip(by) {
                exps.push(x.checked_add(*y).ok_or(AlgebraError::ExponentOverflow)?);
            }
            weighted_degree(&exps[exps.len() - n..], w)?;
        }
        Ok(Poly { ring: self.ring.clone(), exps, coeffs: self.coeffs.clone() })
    }
}

impl fmt::Display for Poly {
    /// Canonical text: terms in descending lexicographic order, `c*` omitted
    /// for unit coefficients, `^1` omitted, `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => factors.push(format!("x{i}")),
                    _ => factors.push(format!("x{i}^{x}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{c}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
