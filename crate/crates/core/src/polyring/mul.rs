//! Truncated multiplication.
//!
//! Homogeneous operands go through a dense accumulator indexed by the first
//! `N` exponents (the last one is fixed by the degree). Each axis is shifted
//! by the smallest exponent that occurs and compressed by the gcd of the
//! exponent differences, so Fermat-type inputs with exponents in `d·Z` and
//! Frobenius images with exponents in `p·Z` stay small. Everything else
//! falls back to a hash map.

use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::poly::{mul_mod, weighted_degree, Poly, TermBuf};
use super::ring::{gcd, MAX_EXPONENT};
use super::AlgebraError;

const DENSE_CELL_LIMIT: u128 = 1 << 23;

pub(crate) fn product(a: &Poly, b: &Poly, bound: Option<u64>) -> Result<Poly, AlgebraError> {
    a.check_same_ring(b)?;
    let ring = a.ring_arc().clone();
    if a.is_zero() || b.is_zero() {
        return Ok(Poly::zero(ring));
    }
    if let (Some(da), Some(db)) = (a.homogeneous_degree(), b.homogeneous_degree()) {
        let deg = da.checked_add(db).filter(|d| *d <= MAX_EXPONENT).ok_or(AlgebraError::ExponentOverflow)?;
        match DensePlan::choose(a, b, deg, bound) {
            Plan::Dense(plan) => return Ok(plan.run(a, b, ring)),
            Plan::Empty => return Ok(Poly::zero(ring)),
            Plan::Sparse => {}
        }
    }
    sparse_product(a, b, bound, ring)
}

enum Plan {
    Dense(DensePlan),
    Empty,
    Sparse,
}

struct DensePlan {
    /// number of axes indexed densely (all variables but the last)
    k: usize,
    lo: Vec<u64>,
    step: Vec<u64>,
    dim: Vec<u64>,
    stride: Vec<usize>,
    cells: usize,
    min_a: Vec<u64>,
    min_b: Vec<u64>,
    bound: u64,
    deg: u64,
}

fn axis_stats(p: &Poly, i: usize) -> (u64, u64, u64) {
    let (mut lo, mut hi) = (u64::MAX, 0u64);
    for (e, _) in p.terms() {
        lo = lo.min(e[i]);
        hi = hi.max(e[i]);
    }
    let g = p.terms().fold(0, |g, (e, _)| gcd(g, e[i] - lo));
    (lo, hi, g)
}

impl DensePlan {
    fn choose(a: &Poly, b: &Poly, deg: u64, bound: Option<u64>) -> Plan {
        let n = a.ring().nvars();
        let k = n - 1;
        let bound = bound.unwrap_or(u64::MAX);
        let (last_a, _, _) = axis_stats(a, k);
        let (last_b, _, _) = axis_stats(b, k);
        if last_a as u128 + last_b as u128 >= bound as u128 {
            return Plan::Empty;
        }
        let mut lo = Vec::with_capacity(k);
        let mut step = Vec::with_capacity(k);
        let mut dim = Vec::with_capacity(k);
        let mut min_a = Vec::with_capacity(k);
        let mut min_b = Vec::with_capacity(k);
        let mut cells: u128 = 1;
        for i in 0..k {
            let (la, ha, ga) = axis_stats(a, i);
            let (lb, hb, gb) = axis_stats(b, i);
            // exponent sums stay below 2^64 since each is at most 2^63 - 1
            let l = la + lb;
            if l >= bound {
                return Plan::Empty;
            }
            let h = (ha + hb).min(bound - 1);
            let g = match gcd(ga, gb) {
                0 => 1,
                g => g,
            };
            let d = (h - l) / g + 1;
            cells *= d as u128;
            if cells > DENSE_CELL_LIMIT {
                return Plan::Sparse;
            }
            lo.push(l);
            step.push(g);
            dim.push(d);
            min_a.push(la);
            min_b.push(lb);
        }
        let pairs = a.nterms() as u128 * b.nterms() as u128;
        if cells > 16 * pairs + 4096 {
            return Plan::Sparse;
        }
        let mut stride = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * dim[i + 1] as usize;
        }
        Plan::Dense(DensePlan { k, lo, step, dim, stride, cells: cells as usize, min_a, min_b, bound, deg })
    }

    /// Per-term axis coordinates, linear index, last exponent, coefficient.
    fn layout(&self, p: &Poly, mins: &[u64]) -> Layout {
        let k = self.k;
        p.terms()
            .map(|(e, c)| {
                let coords: Vec<u64> = (0..k).map(|i| (e[i] - mins[i]) / self.step[i]).collect();
                let idx = coords.iter().zip(&self.stride).map(|(&x, &s)| x as usize * s).sum();
                (coords, idx, e[k], c)
            })
            .collect()
    }

    fn run(&self, a: &Poly, b: &Poly, ring: Arc<super::RingSpec>) -> Poly {
        let k = self.k;
        let m = ring.modulus();
        let la = self.layout(a, &self.min_a);
        let mut lb = self.layout(b, &self.min_b);
        lb.sort_unstable_by(|x, y| x.0.cmp(&y.0));
        let groups = GroupIndex::new(&lb, k);
        let leaf: Vec<(u64, usize, u64, u64)> =
            lb.iter().map(|(c, ib, e, x)| (if k == 0 { 0 } else { c[k - 1] }, *ib, *e, *x)).collect();
        let mut acc = vec![0u64; self.cells];
        let fanin = a.nterms().min(b.nterms()) as u128;
        let raw = (m as u128 - 1) * (m as u128 - 1) * fanin <= u64::MAX as u128;
        let mut cap = vec![0u64; k];
        for (ca, ia, ea_last, xa) in &la {
            if *ea_last >= self.bound {
                continue;
            }
            let mut fits = true;
            for i in 0..k {
                if ca[i] >= self.dim[i] {
                    fits = false;
                    break;
                }
                cap[i] = self.dim[i] - 1 - ca[i];
            }
            if !fits {
                continue;
            }
            let visit =
                Visit { lb: &lb, leaf: &leaf, groups: &groups, cap: &cap, last_room: self.bound - ea_last, m, raw };
            visit.run(0, 0, lb.len(), *ia, *xa, &mut acc);
        }
        let n = k + 1;
        let weights = ring.weights();
        let q_last = weights[k];
        let mut exps = Vec::new();
        let mut coeffs = Vec::new();
        let mut e = vec![0u64; n];
        for idx in (0..self.cells).rev() {
            let c = acc[idx] % m;
            if c == 0 {
                continue;
            }
            let mut rest = idx;
            let mut partial: u128 = 0;
            for i in 0..k {
                let x = (rest / self.stride[i]) as u64;
                rest %= self.stride[i];
                e[i] = self.lo[i] + x * self.step[i];
                partial += e[i] as u128 * weights[i] as u128;
            }
            let remaining = self.deg as u128 - partial;
            debug_assert_eq!(remaining % q_last as u128, 0);
            e[k] = (remaining / q_last as u128) as u64;
            exps.extend_from_slice(&e);
            coeffs.push(c);
        }
        Poly::from_sorted_parts(ring, exps, coeffs)
    }
}

type Layout = Vec<(Vec<u64>, usize, u64, u64)>;

/// For terms sorted by their axis coordinates, `end[i][j]` is one past the
/// last term sharing coordinates `0..=i` with term `j`.
struct GroupIndex {
    end: Vec<Vec<usize>>,
}

impl GroupIndex {
    fn new(lb: &Layout, k: usize) -> Self {
        let len = lb.len();
        let mut end = vec![vec![len; len]; k];
        for (i, row) in end.iter_mut().enumerate() {
            for j in (0..len.saturating_sub(1)).rev() {
                row[j] = if lb[j].0[..=i] == lb[j + 1].0[..=i] { row[j + 1] } else { j + 1 };
            }
        }
        GroupIndex { end }
    }
}

/// Walks the `b` terms whose coordinates stay within `cap` on every axis,
/// skipping whole prefix groups as soon as one axis overflows.
struct Visit<'a> {
    lb: &'a Layout,
    /// (last axis coordinate, linear index, last exponent, coefficient)
    leaf: &'a [(u64, usize, u64, u64)],
    groups: &'a GroupIndex,
    cap: &'a [u64],
    last_room: u64,
    m: u64,
    raw: bool,
}

impl Visit<'_> {
    fn run(&self, axis: usize, start: usize, stop: usize, ia: usize, xa: u64, acc: &mut [u64]) {
        let k = self.cap.len();
        if k == 0 || axis + 1 == k {
            // within one prefix group the remaining coordinate is strictly increasing
            let cap = if k == 0 { u64::MAX } else { self.cap[axis] };
            let leaf = &self.leaf[start..stop];
            if self.raw {
                for &(c, ib, eb_last, xb) in leaf {
                    if c > cap {
                        break;
                    }
                    if eb_last < self.last_room {
                        acc[ia + ib] += xa * xb;
                    }
                }
            } else {
                for &(c, ib, eb_last, xb) in leaf {
                    if c > cap {
                        break;
                    }
                    if eb_last < self.last_room {
                        self.add(&mut acc[ia + ib], xa, xb);
                    }
                }
            }
            return;
        }
        let mut j = start;
        while j < stop {
            if self.lb[j].0[axis] > self.cap[axis] {
                break;
            }
            let group_end = self.groups.end[axis][j];
            self.run(axis + 1, j, group_end, ia, xa, acc);
            j = group_end;
        }
    }

    #[inline]
    fn add(&self, cell: &mut u64, xa: u64, xb: u64) {
        if self.raw {
            *cell += xa * xb;
        } else {
            *cell = ((*cell as u128 + xa as u128 * xb as u128) % self.m as u128) as u64;
        }
    }
}

fn sparse_product(a: &Poly, b: &Poly, bound: Option<u64>, ring: Arc<super::RingSpec>) -> Result<Poly, AlgebraError> {
    let n = ring.nvars();
    let m = ring.modulus();
    let weights = ring.weights().to_vec();
    let bound = bound.unwrap_or(u64::MAX);
    let degree_safe = (a.max_term_degree() as u128 + b.max_term_degree() as u128) <= MAX_EXPONENT as u128;
    let mut map: FxHashMap<Box<[u64]>, u64> = FxHashMap::default();
    let mut scratch = vec![0u64; n];
    for (ea, ca) in a.terms() {
        'inner: for (eb, cb) in b.terms() {
            for i in 0..n {
                let s = ea[i] + eb[i];
                if s >= bound {
                    continue 'inner;
                }
                scratch[i] = s;
            }
            if !degree_safe {
                weighted_degree(&scratch, &weights)?;
            }
            let v = mul_mod(ca, cb, m);
            match map.get_mut(&scratch[..]) {
                Some(slot) => *slot = (*slot + v) % m,
                None => {
                    map.insert(scratch.clone().into_boxed_slice(), v);
                }
            }
        }
    }
    let mut buf = TermBuf::with_capacity(n, map.len());
    for (e, c) in map {
        if c != 0 {
            buf.push(&e, c);
        }
    }
    Ok(buf.finish(ring))
}
