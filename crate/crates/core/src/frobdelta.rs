//! The Frobenius lift `x_i -> x_i^p` and the divided difference
//! `Δ(f) = (f^p - φ(f)) / p`.
//!
//! Coefficients live in `Z/p^e` with residue field `F_p`, so the lift acts
//! as the identity on coefficients.

use crate::polyring::{AlgebraError, Poly};

/// `Δ(f) mod p` with its degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaResult {
    pub delta: Poly,
    /// `p · deg f`
    pub degree: u64,
}

/// `φ(a)`: every exponent multiplied by `p`, coefficients unchanged.
pub fn frobenius_lift(a: &Poly) -> Result<Poly, AlgebraError> {
    a.scale_exponents(a.ring().p())
}

/// `a^p` for `a` over `F_p`, using `(Σ c m)^p = Σ c m^p` in characteristic `p`.
pub fn frobenius_power_mod_p(a: &Poly) -> Result<Poly, AlgebraError> {
    if a.ring().precision() != 1 {
        return Err(AlgebraError::Precondition("the Frobenius shortcut needs a polynomial over F_p".into()));
    }
    frobenius_lift(a)
}

/// Frobenius power followed by truncation at `bound`; terms whose image
/// would reach the bound are dropped before scaling, which also keeps huge
/// exponents from overflowing.
pub fn frobenius_power_truncated(a: &Poly, bound: u64) -> Result<Poly, AlgebraError> {
    let p = a.ring().p();
    // e*p >= bound  <=>  e >= ceil(bound / p)
    let pre = bound.div_ceil(p);
    frobenius_power_mod_p(&a.truncate(pre))
}

/// `Δ(f) mod p` for a homogeneous `f` given modulo `p^2` (or finer; only the
/// residue mod `p^2` matters). A precision-one `f` is lifted through the
/// canonical section `[0, p) ⊂ [0, p^2)`.
pub fn delta(f: &Poly) -> Result<DeltaResult, AlgebraError> {
    let d = match f.weighted_degree_check() {
        (true, Some(d)) => d,
        (true, None) => 0,
        (false, _) => return Err(AlgebraError::Precondition("Δ is only taken of homogeneous polynomials".into())),
    };
    let p = f.ring().p();
    let f2 = f.with_precision(2)?;
    let fp = f2.pow(p)?;
    let phi = frobenius_lift(&f2)?;
    let diff = fp.sub(&phi)?;
    let ring1 = std::sync::Arc::new(f.ring().with_precision(1)?);
    let mut terms = Vec::with_capacity(diff.nterms());
    for (e, c) in diff.terms() {
        if c % p != 0 {
            return Err(AlgebraError::NotDivisible);
        }
        terms.push((e.to_vec(), (c / p) as i64));
    }
    let delta = Poly::from_terms(ring1, terms)?;
    let degree = d.checked_mul(p).ok_or(AlgebraError::ExponentOverflow)?;
    Ok(DeltaResult { delta, degree })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::polyring::{parse_poly, RingSpec};

    fn ring(p: u64, e: u32, w: &[u64]) -> Arc<RingSpec> {
        Arc::new(RingSpec::new(p, e, w.to_vec()).unwrap())
    }

    #[test]
    fn lift_scales_exponents() {
        let r = ring(3, 2, &[1, 1]);
        let a = parse_poly("2*x0^2*x1", r.clone()).unwrap();
        assert_eq!(frobenius_lift(&a).unwrap(), parse_poly("2*x0^6*x1^3", r.clone()).unwrap());
        let c = Poly::constant(r, 7);
        assert_eq!(frobenius_lift(&c).unwrap(), c);
    }

    #[test]
    fn freshmans_dream() {
        let r = ring(5, 1, &[1, 1]);
        let a = parse_poly("x0 + x1", r.clone()).unwrap();
        assert_eq!(frobenius_power_mod_p(&a).unwrap(), parse_poly("x0^5 + x1^5", r.clone()).unwrap());
        assert_eq!(frobenius_power_mod_p(&Poly::constant(r, 3)).unwrap().to_string(), "3");
    }

    #[test]
    fn shortcut_rejects_higher_precision() {
        let r = ring(5, 2, &[1]);
        assert!(frobenius_power_mod_p(&Poly::one(r)).is_err());
    }

    #[test]
    fn truncated_frobenius_drops_large_terms_first() {
        let r = ring(3, 1, &[1, 1]);
        let a = Poly::from_terms(r.clone(), [(vec![1 << 62, 0], 1), (vec![1, 2], 1)]).unwrap();
        assert!(frobenius_power_mod_p(&a).is_err());
        assert_eq!(frobenius_power_truncated(&a, 9).unwrap(), parse_poly("x0^3*x1^6", r).unwrap());
    }

    #[test]
    fn delta_of_pure_power_vanishes() {
        let r = ring(7, 2, &[1, 1, 1]);
        let out = delta(&parse_poly("x1^4", r).unwrap()).unwrap();
        assert!(out.delta.is_zero());
        assert_eq!(out.degree, 28);
    }

    #[test]
    fn delta_of_linear_form_at_two() {
        let r = ring(2, 2, &[1, 1]);
        let out = delta(&parse_poly("x0 + x1", r).unwrap()).unwrap();
        assert_eq!(out.delta.to_string(), "x0*x1");
        assert_eq!(out.delta.ring().precision(), 1);
    }

    #[test]
    fn delta_depends_on_the_lift() {
        // x0 + 3*x1 and x0 + 3*x1 + 5*x0 agree mod 5 but their Δ differ
        let r = ring(5, 2, &[1, 1]);
        let a = delta(&parse_poly("x0 + 3*x1", r.clone()).unwrap()).unwrap();
        let b = delta(&parse_poly("6*x0 + 3*x1", r).unwrap()).unwrap();
        assert_ne!(a.delta, b.delta);
    }

    #[test]
    fn delta_rejects_inhomogeneous() {
        let r = ring(3, 2, &[1, 1]);
        assert!(delta(&parse_poly("x0 + x1^2", r).unwrap()).is_err());
    }

    fn arb_form(n: usize, d: u64) -> impl Strategy<Value = Vec<(Vec<u64>, i64)>> {
        prop::collection::vec((prop::collection::vec(0..=d, n - 1), -30i64..30), 1..8).prop_map(move |raw| {
            raw.into_iter()
                .filter_map(|(mut e, c)| {
                    let s: u64 = e.iter().sum();
                    (s <= d).then(|| {
                        e.push(d - s);
                        (e, c)
                    })
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn defining_identity(f in arb_form(3, 3), p in prop::sample::select(vec![2u64, 3, 5])) {
            let r = ring(p, 2, &[1, 1, 1]);
            let f = Poly::from_terms(r.clone(), f).unwrap();
            let dl = delta(&f).unwrap();
            // f^p ≡ φ(f) + p·Δ mod p^2, with Δ lifted canonically
            let lifted = dl.delta.with_precision(2).unwrap().scale(p);
            let rhs = frobenius_lift(&f).unwrap().add(&lifted).unwrap();
            prop_assert_eq!(f.pow(p).unwrap(), rhs);
            if !dl.delta.is_zero() {
                prop_assert_eq!(dl.delta.weighted_degree_check(), (true, Some(3 * p)));
            }
        }

        #[test]
        fn shortcut_equals_naive_power(a in prop::collection::vec((prop::collection::vec(0u64..4, 3), -9i64..9), 0..8), p in prop::sample::select(vec![2u64, 3, 5])) {
            let r = ring(p, 1, &[1, 1, 1]);
            let a = Poly::from_terms(r, a).unwrap();
            prop_assert_eq!(frobenius_power_mod_p(&a).unwrap(), a.pow(p).unwrap());
        }

        #[test]
        fn lift_is_multiplicative(a in arb_form(2, 2), b in arb_form(2, 3)) {
            let r = ring(3, 2, &[1, 1]);
            let a = Poly::from_terms(r.clone(), a).unwrap();
            let b = Poly::from_terms(r, b).unwrap();
            let lhs = frobenius_lift(&a.mul(&b).unwrap()).unwrap();
            let rhs = frobenius_lift(&a).unwrap().mul(&frobenius_lift(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
