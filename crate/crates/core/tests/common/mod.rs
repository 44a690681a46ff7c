//! Random instance generators and property suites shared by the
//! integration tests and the acceptance run.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use splitorder::frobdelta::{delta, frobenius_power_mod_p, frobenius_power_truncated};
use splitorder::ideals::{
    contains_degree_tail, frob_power_member, graded_piece_dim, is_m_primary, jacobian, monomials_of_degree, IdealLimits,
};
use splitorder::oracle::{oracle_member, oracle_prefix, OracleError};
use splitorder::polyring::{Poly, RingSpec};
use splitorder::splitting::{check_nm, split_member, splitting_prefix, SplitLimits, SplitPrefix};

pub const PRIMES: [u64; 3] = [2, 3, 5];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random ring with `p ∈ {2,3,5}`, at most four variables, standard
/// weights most of the time.
pub fn random_ring(r: &mut ChaCha8Rng, e: u32, max_vars: usize) -> Arc<RingSpec> {
    let p = *PRIMES.choose(r).unwrap();
    let n = r.gen_range(2..=max_vars);
    let weights = if r.gen_bool(0.7) { vec![1; n] } else { (0..n).map(|_| r.gen_range(1..=2)).collect() };
    Arc::new(RingSpec::new(p, e, weights).unwrap())
}

/// A random form of degree `d` with up to `max_terms` terms, nonzero mod `p`.
pub fn random_form(r: &mut ChaCha8Rng, ring: &Arc<RingSpec>, d: u64, max_terms: usize) -> Option<Poly> {
    let mons = monomials_of_degree(ring.weights(), d, 100_000).ok()?;
    if mons.is_empty() {
        return None;
    }
    let k = r.gen_range(1..=max_terms.min(mons.len()));
    let chosen: Vec<_> = mons.choose_multiple(r, k).cloned().collect();
    let m = ring.modulus() as i64;
    let terms = chosen.into_iter().map(|e| (e, r.gen_range(1..m)));
    let f = Poly::from_terms(ring.clone(), terms).ok()?;
    (!f.reduce_mod_p().is_zero()).then_some(f)
}

/// Keeps drawing until a form appears.
pub fn draw_form(r: &mut ChaCha8Rng, e: u32, max_vars: usize, max_d: u64, max_terms: usize) -> Poly {
    loop {
        let ring = random_ring(r, e, max_vars);
        let d = r.gen_range(1..=max_d);
        if let Some(f) = random_form(r, &ring, d, max_terms) {
            return f;
        }
    }
}

/// An arbitrary (not necessarily homogeneous) polynomial with exponents
/// below `max_exp`.
pub fn random_poly(r: &mut ChaCha8Rng, ring: &Arc<RingSpec>, max_terms: usize, max_exp: u64) -> Poly {
    let m = ring.modulus() as i64;
    let k = r.gen_range(0..=max_terms);
    let terms: Vec<_> = (0..k)
        .map(|_| ((0..ring.nvars()).map(|_| r.gen_range(0..max_exp)).collect::<Vec<u64>>(), r.gen_range(0..m)))
        .collect();
    Poly::from_terms(ring.clone(), terms).unwrap()
}

pub fn fermat(p: u64, e: u32, nvars: usize, d: u64) -> Poly {
    let ring = Arc::new(RingSpec::standard(p, e, nvars).unwrap());
    let terms = (0..nvars).map(|i| {
        let mut ex = vec![0; nvars];
        ex[i] = d;
        (ex, 1)
    });
    Poly::from_terms(ring, terms).unwrap()
}

/// `(N+1)d - 2Q`, the expected top degree of `Ā/J(f̄)`.
pub fn socle_degree(f: &Poly) -> i64 {
    let r = f.ring();
    r.nvars() as i64 * f.homogeneous_degree().unwrap() as i64 - 2 * r.total_weight() as i64
}

pub fn jacobian_is_primary(f: &Poly) -> bool {
    let j = jacobian(f).unwrap();
    let hint = socle_degree(f).max(0) as u64;
    is_m_primary(&j, hint, &IdealLimits::default()).map(|r| r.is_m_primary).unwrap_or(false)
}

type Outcome = Result<usize, String>;

pub type Suite = (&'static str, Box<dyn Fn() -> Outcome>);

/// `∂Δ(f)/∂x_i ≡ f^{p-1} f_i - x_i^{p-1} f_i^p (mod p)` for every `i`.
pub fn prop_delta_derivative(seed: u64, count: usize) -> Outcome {
    let mut r = rng(seed);
    for case in 0..count {
        let f = draw_form(&mut r, 2, 4, 4, 5);
        let p = f.ring().p();
        let dl = delta(&f).map_err(|e| e.to_string())?.delta;
        let fbar = f.reduce_mod_p();
        let fp1 = fbar.pow(p - 1).unwrap();
        for i in 0..f.ring().nvars() {
            let lhs = dl.derivative(i).unwrap();
            let fi = fbar.derivative(i).unwrap();
            let mut xe = vec![0; f.ring().nvars()];
            xe[i] = p - 1;
            let xi = Poly::monomial(fbar.ring_arc().clone(), xe, 1).unwrap();
            let rhs = fp1.mul(&fi).unwrap().sub(&xi.mul(&fi.pow(p).unwrap()).unwrap()).unwrap();
            if lhs != rhs {
                return Err(format!("case {case}: f = {f}, i = {i}: {lhs} != {rhs}"));
            }
        }
    }
    Ok(count)
}

/// `Σ q_i x_i f_i = d f` over `Z/p^e`.
pub fn prop_euler(seed: u64, count: usize) -> Outcome {
    let mut r = rng(seed);
    for case in 0..count {
        let f = draw_form(&mut r, 2, 4, 4, 6);
        let d = f.homogeneous_degree().unwrap();
        let mut sum = Poly::zero(f.ring_arc().clone());
        for (i, &q) in f.ring().weights().iter().enumerate() {
            let xi = Poly::variable(f.ring_arc().clone(), i).unwrap();
            sum = sum.add(&xi.mul(&f.derivative(i).unwrap()).unwrap().scale(q)).unwrap();
        }
        if sum != f.scale(d) {
            return Err(format!("case {case}: f = {f}"));
        }
    }
    Ok(count)
}

/// `a^p mod p` by exponent scaling equals the naive power, also after
/// truncation.
pub fn prop_frobenius_shortcut(seed: u64, count: usize) -> Outcome {
    let mut r = rng(seed);
    for case in 0..count {
        let ring = random_ring(&mut r, 1, 4);
        let p = ring.p();
        let a = random_poly(&mut r, &ring, 5, 4);
        let naive = a.pow(p).unwrap();
        if frobenius_power_mod_p(&a).unwrap() != naive {
            return Err(format!("case {case}: a = {a}"));
        }
        let bound = r.gen_range(1..=4 * p);
        if frobenius_power_truncated(&a, bound).unwrap() != naive.truncate(bound) {
            return Err(format!("case {case}: a = {a}, bound {bound}"));
        }
    }
    Ok(count)
}

fn prefix_of(f: &Poly, depth: usize) -> Option<SplitPrefix> {
    let pre = splitting_prefix(f, depth, SplitLimits::default()).ok()?;
    pre.halted.is_none().then_some(pre)
}

/// Depth 2 when the level-two box stays small, depth 1 otherwise.
fn depth_for(f: &Poly) -> usize {
    let p = f.ring().p();
    if p == 5 && f.ring().nvars() > 3 {
        1
    } else {
        2
    }
}

/// `G(s) ∈ m^{[p^n]}` exactly for `s ≤ s_n` at every computed level.
pub fn prop_down_set(seed: u64, count: usize) -> Outcome {
    let mut r = rng(seed);
    let mut done = 0;
    while done < count {
        let f = draw_form(&mut r, 2, 4, 4, 5);
        let Some(pre) = prefix_of(&f, depth_for(&f)) else { continue };
        let p = f.ring().p();
        for (lvl, &sn) in pre.s.iter().enumerate() {
            for s in 0..=p {
                let member = split_member(&pre, &f, lvl + 1, s).map_err(|e| e.to_string())?;
                if member != (s <= sn) {
                    return Err(format!("f = {f}, level {}, s = {s}, s_n = {sn}", lvl + 1));
                }
            }
        }
        done += 1;
    }
    Ok(done)
}

/// `L_n·(f, J(f)) ⊆ m^{[p^n]}` whenever `1 ≤ s_n ≤ p - 1`, on forms with
/// m-primary Jacobian, checked with untruncated products.
pub fn prop_witness_annihilates(seed: u64, count: usize) -> Outcome {
    let mut r = rng(seed);
    let mut done = 0;
    let mut guard = 0;
    while done < count {
        guard += 1;
        if guard > 50 * count {
            return Err(format!("only {done} instances with 1 ≤ s_n ≤ p-1 found"));
        }
        let f = draw_form(&mut r, 2, 4, 4, 6);
        if !jacobian_is_primary(&f) {
            continue;
        }
        let Some(pre) = prefix_of(&f, depth_for(&f)) else { continue };
        let p = f.ring().p();
        let fbar = f.reduce_mod_p();
        let mut gens = vec![fbar.clone()];
        gens.extend((0..fbar.ring().nvars()).map(|i| fbar.derivative(i).unwrap()));
        let mut any = false;
        for (lvl, w) in pre.witnesses.iter().enumerate() {
            let sn = pre.s[lvl];
            if !(1..p).contains(&sn) {
                continue;
            }
            any = true;
            for g in &gens {
                if !frob_power_member(&w.mul(g).unwrap(), lvl as u32 + 1).unwrap() {
                    return Err(format!("f = {f}, level {}, s_n = {sn}, generator {g}", lvl + 1));
                }
            }
        }
        done += any as usize;
    }
    Ok(done)
}

/// `Ā_{≥ (N+1)d-2Q+1} ⊆ J(f̄)` and the top nonzero degree of `Ā/J(f̄)` is
/// `(N+1)d - 2Q`, for random forms with m-primary Jacobian.
pub fn prop_socle(seed: u64, count: usize) -> Outcome {
    let mut r = rng(seed);
    let limits = IdealLimits::default();
    let mut done = 0;
    while done < count {
        let f = draw_form(&mut r, 1, 4, 4, 6);
        if !jacobian_is_primary(&f) {
            continue;
        }
        let j = jacobian(&f).unwrap();
        let soc = socle_degree(&f);
        let k = (soc + 1).max(0) as u64;
        if !contains_degree_tail(&j, k, &limits).unwrap() {
            return Err(format!("f = {f}: tail from {k} not contained"));
        }
        if soc >= 0 && graded_piece_dim(&j, soc as u64, &limits).unwrap().quotient_dim == 0 {
            return Err(format!("f = {f}: quotient vanishes at {soc}"));
        }
        done += 1;
    }
    Ok(done)
}

/// `(m^{[p]} : Ā_{≥k}) ⊆ m^{[p]} + Ā_{≥ pQ-Q-k+1}` by enumerating every
/// form in every degree, for three variables with weights in `{1, 2}`,
/// `p ∈ {2, 3}` and `k ≤ 4`.
pub fn prop_colon_exhaustive() -> Outcome {
    let mut checked = 0;
    for p in [2u64, 3] {
        for mask in 0..8u32 {
            let weights: Vec<u64> = (0..3).map(|i| 1 + ((mask >> i) & 1) as u64).collect();
            let ring = Arc::new(RingSpec::new(p, 1, weights.clone()).unwrap());
            let q: u64 = weights.iter().sum();
            let max_q = *weights.iter().max().unwrap();
            for k in 0..=4u64 {
                let gens: Vec<Poly> = (k..k + max_q)
                    .flat_map(|m| monomials_of_degree(&weights, m, 1000).unwrap())
                    .map(|e| Poly::monomial(ring.clone(), e, 1).unwrap())
                    .collect();
                for g in 0..=(p - 1) * q {
                    let basis: Vec<Vec<u64>> = monomials_of_degree(&weights, g, 1000)
                        .unwrap()
                        .into_iter()
                        .filter(|e| e.iter().all(|&x| x < p))
                        .collect();
                    let combos = (p as usize).pow(basis.len() as u32);
                    for code in 1..combos {
                        let mut c = code;
                        let terms: Vec<(Vec<u64>, i64)> = basis
                            .iter()
                            .map(|e| {
                                let coef = (c % p as usize) as i64;
                                c /= p as usize;
                                (e.clone(), coef)
                            })
                            .collect();
                        let big_g = Poly::from_terms(ring.clone(), terms).unwrap();
                        let in_colon = gens.iter().all(|m| frob_power_member(&big_g.mul(m).unwrap(), 1).unwrap());
                        let in_target = frob_power_member(&big_g, 1).unwrap() || g + k + q > p * q;
                        if in_colon && !in_target {
                            return Err(format!("p = {p}, weights {weights:?}, k = {k}, G = {big_g}"));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(checked)
}

/// Truncated fast path against the untruncated dense oracle: prefixes of
/// depth up to 2, memberships and truncated products.
pub fn prop_truncation_soundness(seed: u64, count: usize) -> Outcome {
    let mut r = rng(seed);
    let mut done = 0;
    let mut guard = 0;
    while done < count {
        guard += 1;
        if guard > 20 * count {
            return Err(format!("only {done} feasible instances"));
        }
        let f = draw_form(&mut r, 2, 3, 4, 4);
        let depth = if f.ring().p() == 5 && f.homogeneous_degree().unwrap() > 2 { 1 } else { 2 };
        let oracle = match oracle_prefix(&f, depth) {
            Ok(o) => o,
            Err(OracleError::TooLarge { .. }) => continue,
            Err(e) => return Err(format!("f = {f}: {e}")),
        };
        let fast = splitting_prefix(&f, depth, SplitLimits::default()).map_err(|e| e.to_string())?;
        if fast.s != oracle.s || fast.bounded != oracle.bounded {
            return Err(format!("f = {f}: fast {:?} vs oracle {:?}", fast.s, oracle.s));
        }

        let ring = Arc::new(f.ring().with_precision(1).unwrap());
        let a = random_poly(&mut r, &ring, 6, 6);
        let b = random_poly(&mut r, &ring, 6, 6);
        let bound = r.gen_range(1..=8);
        if a.mul_truncated(&b, bound).unwrap() != a.mul(&b).unwrap().truncate(bound) {
            return Err(format!("mul_truncated: {a} * {b} at {bound}"));
        }
        let k = r.gen_range(0..=4);
        if a.pow_truncated(k, bound).unwrap() != a.pow(k).unwrap().truncate(bound) {
            return Err(format!("pow_truncated: ({a})^{k} at {bound}"));
        }
        let level = r.gen_range(1..=2);
        let h = a.mul(&b).unwrap();
        if oracle_member(&h, level) != Ok(frob_power_member(&h, level).unwrap()) {
            return Err(format!("membership of {h} at level {level}"));
        }
        done += 1;
    }
    Ok(done)
}

/// Whenever `(N_2)` holds, `(N_m)` holds for every `m ≤ 20`.
pub fn prop_nm_monotone(seed: u64, count: usize) -> Outcome {
    let mut r = rng(seed);
    let primes: Vec<u64> = (2..60).filter(|&n| splitorder::polyring::is_prime(n)).collect();
    let mut with_n2 = 0;
    for case in 0..count {
        let p = *primes.choose(&mut r).unwrap();
        let nvars = r.gen_range(2..=7);
        let weights: Vec<u64> = (0..nvars).map(|_| r.gen_range(1..=4)).collect();
        let q: u64 = weights.iter().sum();
        let d = r.gen_range(1..=q);
        let ring = RingSpec::new(p, 1, weights).unwrap();
        if !check_nm(&ring, d, 2).map_err(|e| e.to_string())?.holds {
            continue;
        }
        with_n2 += 1;
        for m in 3..=20 {
            let c = check_nm(&ring, d, m).map_err(|e| e.to_string())?;
            if !c.holds {
                return Err(format!("case {case}: p = {p}, Q = {q}, d = {d}, N+1 = {nvars}: (N_{m}) fails"));
            }
        }
    }
    if with_n2 == 0 {
        return Err("no instance satisfied (N_2)".into());
    }
    Ok(count)
}

/// Every property suite of the acceptance run, with its instance count.
pub fn property_suites() -> Vec<Suite> {
    vec![
        ("derivative of Δ", Box::new(|| prop_delta_derivative(11, 120))),
        ("Euler identity", Box::new(|| prop_euler(12, 120))),
        ("Frobenius shortcut", Box::new(|| prop_frobenius_shortcut(13, 150))),
        ("membership down-set", Box::new(|| prop_down_set(14, 100))),
        ("witness annihilates (f, J)", Box::new(|| prop_witness_annihilates(15, 100))),
        ("socle tail containment", Box::new(|| prop_socle(16, 100))),
        ("colon estimate, exhaustive", Box::new(prop_colon_exhaustive)),
        ("truncation soundness", Box::new(|| prop_truncation_soundness(17, 100))),
    ]
}
