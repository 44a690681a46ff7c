//! Brute-force reference arithmetic for cross-checking the fast path.
//!
//! Dense coefficient boxes, naive products and powers, no truncation and no
//! Frobenius shortcut. Only `RingSpec` and the conversion to and from
//! `Poly` are shared with the rest of the crate.

use std::sync::Arc;

use thiserror::Error;

use crate::polyring::{Poly, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("dense box with {cells} cells exceeds the oracle limit of {limit}")]
    TooLarge { cells: u128, limit: u128 },
    #[error("{0}")]
    Precondition(String),
}

const CELL_LIMIT: u128 = 1 << 25;

/// Coefficients on the box `[0, sides[0]) × ... × [0, sides[N])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePoly {
    ring: Arc<RingSpec>,
    modulus: u64,
    sides: Vec<usize>,
    coeffs: Vec<u64>,
}

impl DensePoly {
    pub fn zero(ring: Arc<RingSpec>, modulus: u64, sides: Vec<usize>) -> Result<Self, OracleError> {
        let cells = sides.iter().fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
        if cells > CELL_LIMIT {
            return Err(OracleError::TooLarge { cells, limit: CELL_LIMIT });
        }
        Ok(DensePoly { ring, modulus, sides, coeffs: vec![0; cells as usize] })
    }

    pub fn one(ring: Arc<RingSpec>, modulus: u64) -> Self {
        let n = ring.nvars();
        let mut d = DensePoly::zero(ring, modulus, vec![1; n]).expect("single cell");
        d.coeffs[0] = 1 % modulus;
        d
    }

    /// Copies `a` into the smallest box holding it, reducing coefficients
    /// modulo `modulus`. Coefficients are read as integers in `[0, p^e)`.
    pub fn from_poly(a: &Poly, modulus: u64) -> Result<Self, OracleError> {
        let n = a.ring().nvars();
        let mut sides = vec![1usize; n];
        for (e, _) in a.terms() {
            for i in 0..n {
                let need = usize::try_from(e[i])
                    .ok()
                    .and_then(|x| x.checked_add(1))
                    .ok_or(OracleError::TooLarge { cells: u128::MAX, limit: CELL_LIMIT })?;
                sides[i] = sides[i].max(need);
            }
        }
        let mut d = DensePoly::zero(a.ring_arc().clone(), modulus, sides)?;
        for (e, c) in a.terms() {
            let idx = d.index(e);
            d.coeffs[idx] = (d.coeffs[idx] + c % modulus) % modulus;
        }
        Ok(d)
    }

    pub fn sides(&self) -> &[usize] {
        &self.sides
    }

    fn index(&self, e: &[u64]) -> usize {
        e.iter().zip(&self.sides).fold(0usize, |acc, (&x, &s)| acc * s + x as usize)
    }

    fn coords(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.sides.len()];
        for i in (0..self.sides.len()).rev() {
            out[i] = (idx % self.sides[i]) as u64;
            idx /= self.sides[i];
        }
        out
    }

    fn nonzero(&self) -> Vec<(Vec<u64>, u64)> {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (self.coords(i), c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn mul(&self, other: &DensePoly) -> Result<DensePoly, OracleError> {
        let sides = self.sides.iter().zip(&other.sides).map(|(a, b)| a + b - 1).collect();
        let mut out = DensePoly::zero(self.ring.clone(), self.modulus, sides)?;
        let m = self.modulus as u128;
        let lb = other.nonzero();
        let mut e = vec![0u64; self.sides.len()];
        for (ea, ca) in self.nonzero() {
            for (eb, cb) in &lb {
                for i in 0..e.len() {
                    e[i] = ea[i] + eb[i];
                }
                let idx = out.index(&e);
                out.coeffs[idx] = ((out.coeffs[idx] as u128 + ca as u128 * *cb as u128) % m) as u64;
            }
        }
        Ok(out)
    }

    /// `a^k` by `k` successive products.
    pub fn pow(&self, k: u64) -> Result<DensePoly, OracleError> {
        let mut acc = DensePoly::one(self.ring.clone(), self.modulus);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn sub(&self, other: &DensePoly) -> Result<DensePoly, OracleError> {
        let sides: Vec<usize> = self.sides.iter().zip(&other.sides).map(|(a, b)| *a.max(b)).collect();
        let mut out = DensePoly::zero(self.ring.clone(), self.modulus, sides)?;
        for (e, c) in self.nonzero() {
            let idx = out.index(&e);
            out.coeffs[idx] = (out.coeffs[idx] + c) % self.modulus;
        }
        for (e, c) in other.nonzero() {
            let idx = out.index(&e);
            out.coeffs[idx] = (out.coeffs[idx] + self.modulus - c) % self.modulus;
        }
        Ok(out)
    }

    /// Substitutes `x_i -> x_i^p` cell by cell.
    fn substitute_powers(&self, p: u64) -> Result<DensePoly, OracleError> {
        let sides = self.sides.iter().map(|&s| (s - 1) * p as usize + 1).collect();
        let mut out = DensePoly::zero(self.ring.clone(), self.modulus, sides)?;
        for (e, c) in self.nonzero() {
            let scaled: Vec<u64> = e.iter().map(|&x| x * p).collect();
            let idx = out.index(&scaled);
            out.coeffs[idx] = c;
        }
        Ok(out)
    }

    /// Every coefficient divided by `p` (exactly) and the modulus lowered.
    fn divide_by_p(&self, p: u64) -> Result<DensePoly, OracleError> {
        if self.coeffs.iter().any(|&c| c % p != 0) {
            return Err(OracleError::Precondition("coefficient not divisible by p".into()));
        }
        Ok(DensePoly {
            ring: self.ring.clone(),
            modulus: self.modulus / p,
            sides: self.sides.clone(),
            coeffs: self.coeffs.iter().map(|&c| c / p).collect(),
        })
    }

    fn reduce(&self, modulus: u64) -> DensePoly {
        DensePoly {
            ring: self.ring.clone(),
            modulus,
            sides: self.sides.clone(),
            coeffs: self.coeffs.iter().map(|&c| c % modulus).collect(),
        }
    }

    /// Member of `(p, x_i^{p^n})`: every cell inside `[0, p^n)^{N+1}` is `0 mod p`.
    fn member(&self, p: u64, pn: u64) -> bool {
        self.coeffs.iter().enumerate().all(|(i, &c)| c % p == 0 || self.coords(i).iter().any(|&x| x >= pn))
    }

    /// Back to a sparse polynomial over the ring at the precision matching
    /// `modulus`.
    pub fn to_poly(&self) -> Result<Poly, OracleError> {
        let p = self.ring.p();
        let mut precision = 0u32;
        let mut m = 1u64;
        while m < self.modulus {
            m *= p;
            precision += 1;
        }
        if m != self.modulus || precision == 0 {
            return Err(OracleError::Precondition("modulus is not a positive power of p".into()));
        }
        let ring = Arc::new(self.ring.with_precision(precision).map_err(|e| OracleError::Precondition(e.to_string()))?);
        let terms = self.nonzero().into_iter().map(|(e, c)| (e, c as i64));
        Poly::from_terms(ring, terms).map_err(|e| OracleError::Precondition(e.to_string()))
    }
}

/// `h ∈ m^{[p^n]}` by scanning the dense box.
pub fn oracle_member(h: &Poly, level: u32) -> Result<bool, OracleError> {
    let p = h.ring().p();
    let pn = p.checked_pow(level).ok_or(OracleError::TooLarge { cells: u128::MAX, limit: CELL_LIMIT })?;
    let d = DensePoly::from_poly(h, h.ring().modulus())?;
    Ok(d.member(p, pn))
}

/// Reference splitting-order prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OraclePrefix {
    pub s: Vec<u64>,
    pub bounded: bool,
}

/// `Δ(f) mod p`, computed as `(f^p - φ(f))/p` on dense boxes mod `p^2`.
pub fn oracle_delta(f: &Poly) -> Result<DensePoly, OracleError> {
    let p = f.ring().p();
    let p2 = p * p;
    let f2 = DensePoly::from_poly(f, p2)?;
    let fp = f2.pow(p)?;
    let phi = f2.substitute_powers(p)?;
    Ok(fp.sub(&phi)?.divide_by_p(p)?.reduce(p))
}

/// The first `n_max ≤ 2` entries of the splitting-order sequence, every
/// membership evaluated separately at every `s ∈ [0, p]`.
pub fn oracle_prefix(f: &Poly, n_max: usize) -> Result<OraclePrefix, OracleError> {
    if n_max == 0 || n_max > 2 {
        return Err(OracleError::Precondition("the oracle only covers depths 1 and 2".into()));
    }
    let p = f.ring().p();
    let fbar = DensePoly::from_poly(f, p)?;
    let mut out = OraclePrefix { s: Vec::new(), bounded: true };

    let level_max = |base: &DensePoly, pn: u64| -> Result<u64, OracleError> {
        let mut best = None;
        for s in 0..=p {
            if base.mul(&fbar.pow(p - s)?)?.member(p, pn) {
                best = Some(s);
            }
        }
        best.ok_or_else(|| OracleError::Precondition("no member at s = 0".into()))
    };

    let one = DensePoly::one(f.ring_arc().clone(), p);
    let s1 = level_max(&one, p)?;
    out.s.push(s1);
    if s1 == p {
        out.bounded = false;
        return Ok(out);
    }
    if n_max == 1 {
        return Ok(out);
    }
    let l1 = fbar.pow(p - s1 - 1)?;
    let delta = oracle_delta(f)?;
    let base = l1.pow(p)?.mul(&delta.pow(s1)?)?;
    let s2 = level_max(&base, p * p)?;
    out.s.push(s2);
    out.bounded = s2 < p;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::parse_poly;

    fn ring(p: u64, e: u32, n: usize) -> Arc<RingSpec> {
        Arc::new(RingSpec::standard(p, e, n).unwrap())
    }

    #[test]
    fn member_examples() {
        let r = ring(3, 1, 2);
        assert!(oracle_member(&parse_poly("x0^9", r.clone()).unwrap(), 2).unwrap());
        assert!(!oracle_member(&Poly::one(r), 1).unwrap());
    }

    #[test]
    fn dense_round_trip() {
        let r = ring(5, 2, 3);
        let a = parse_poly("3*x0^2*x1 + 7*x2^3 + 24", r).unwrap();
        assert_eq!(DensePoly::from_poly(&a, 25).unwrap().to_poly().unwrap(), a);
    }

    #[test]
    fn linear_form() {
        let r = Arc::new(RingSpec::new(3, 2, vec![1]).unwrap());
        let pre = oracle_prefix(&parse_poly("x0", r).unwrap(), 2).unwrap();
        assert_eq!(pre, OraclePrefix { s: vec![0, 0], bounded: true });
    }

    #[test]
    fn delta_of_binomial() {
        let r = ring(2, 2, 2);
        let d = oracle_delta(&parse_poly("x0 + x1", r).unwrap()).unwrap();
        assert_eq!(d.to_poly().unwrap().to_string(), "x0*x1");
    }

    #[test]
    fn box_limit() {
        let r = ring(2, 1, 4);
        let a = parse_poly("x0^100*x1^100*x2^100*x3^100", r).unwrap();
        assert!(matches!(DensePoly::from_poly(&a, 2), Err(OracleError::TooLarge { .. })));
    }
}
