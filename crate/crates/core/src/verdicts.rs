//! Hypothesis checks and conclusions for Calabi–Yau and Fano hypersurfaces.
//!
//! Every report lists named checks, each passed, failed or inconclusive,
//! with the result it relies on. Conclusions are decided by small pure
//! functions over check statuses so the soundness rule (no positive
//! conclusion unless every check it rests on passed) can be tested
//! exhaustively.

use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::citations as cite;
use crate::ideals::{is_m_primary, jacobian, jacobian_with_f, IdealError, IdealLimits, PrimaryReport};
use crate::polyring::{AlgebraError, Poly};
use crate::splitting::{
    check_nm, ppt_enclosure, splitting_prefix, vanishing_threshold, witness_kills_jacobian, NmCheck, SplitError,
    SplitLimits, SplitPrefix,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerdictError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    CalabiYau,
    Fano,
    GeneralType,
}

/// A hypersurface equation together with its lift data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypersurfaceSpec {
    f: Poly,
    degree: u64,
    kind: Kind,
    lift_dependent: bool,
}

impl HypersurfaceSpec {
    /// `f` must be a nonconstant form, nonzero mod `p`. A precision-one equation is lifted
    /// through `[0, p) ⊂ [0, p^2)` and flagged lift-dependent.
    pub fn new(f: Poly) -> Result<Self, VerdictError> {
        let degree = match f.weighted_degree_check() {
            (true, Some(d)) if d > 0 => d,
            (true, _) => return Err(VerdictError::Input("the equation must be a nonconstant form".into())),
            (false, _) => return Err(VerdictError::Input("the equation is not weighted-homogeneous".into())),
        };
        if f.reduce_mod_p().is_zero() {
            return Err(VerdictError::Input(format!("the equation vanishes modulo {}", f.ring().p())));
        }
        let lift_dependent = f.ring().precision() == 1;
        let f = if lift_dependent { f.with_precision(2)? } else { f };
        let q = f.ring().total_weight();
        let kind = match q.cmp(&degree) {
            std::cmp::Ordering::Equal => Kind::CalabiYau,
            std::cmp::Ordering::Greater => Kind::Fano,
            std::cmp::Ordering::Less => Kind::GeneralType,
        };
        Ok(HypersurfaceSpec { f, degree, kind, lift_dependent })
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn lift_dependent(&self) -> bool {
        self.lift_dependent
    }

    /// `N - 1`; `-1` for a single variable.
    pub fn dim_x(&self) -> i64 {
        self.f.ring().nvars() as i64 - 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    fn of(b: bool) -> Self {
        if b {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub cite: String,
    /// Informational checks never enter a decision.
    #[serde(default)]
    pub informational: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conclusion {
    PerfectoidSplit,
    PerfectoidPure,
    GloballyPlusRegular,
    BCMRegular,
    Inconclusive,
    HypothesisViolation,
}

impl Conclusion {
    pub fn is_positive(self) -> bool {
        !matches!(self, Conclusion::Inconclusive | Conclusion::HypothesisViolation)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub p: u64,
    pub e: u32,
    pub weights: Vec<u64>,
    pub d: u64,
    pub f_canonical: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PptEvidence {
    /// Reported lower bound: the larger of the computed one and the
    /// theorem-backed one when the latter applies.
    pub lower_num: u128,
    pub lower_den: u128,
    pub depth: usize,
    pub enclosure_lower_num: u128,
    pub enclosure_lower_den: u128,
    pub enclosure_upper_num: u128,
    pub enclosure_upper_den: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem_num: Option<u128>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem_den: Option<u128>,
    /// True when the enclosure rests on the prefix alone, i.e. no theorem
    /// guarantees `s_n ≤ p - 1` beyond the computed depth.
    pub conditional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryEvidence {
    /// Which algebraic condition stands in for quasi-smoothness.
    pub surrogate: String,
    pub socle_hint: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobian: Option<PrimaryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jacobian_with_f: Option<PrimaryReport>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Smallest `n` with `d(p^n - 2) < p^n Q + Q - (N+1) d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vanishing_n0: Option<u32>,
    /// `k` with `Ā_{≥k} ⊆ (f̄, J(f̄))`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_k: Option<u64>,
    /// Smallest `n` with `d(p^n - 2) < p^n Q - Q - k + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_n0: Option<u32>,
    /// `(Q - d) p^2 + d p + Q - N d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<i128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub weights: Vec<u64>,
    pub degrees: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub prefix: Vec<u64>,
    pub bounded: bool,
    pub depth_requested: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halted: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppt: Option<PptEvidence>,
    pub primary: PrimaryEvidence,
    pub nm: Vec<NmCheck>,
    pub thresholds: Thresholds,
    pub lift_dependent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub problem: ProblemInfo,
    pub checks: Vec<Check>,
    pub evidence: Evidence,
    pub conclusion: Conclusion,
    pub basis: Vec<String>,
    pub version: String,
}

impl VerdictReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerdictOptions {
    pub n_max: usize,
    pub ideal: IdealLimits,
    pub split: SplitLimits,
}

impl VerdictOptions {
    pub fn with_depth(n_max: usize) -> Self {
        VerdictOptions { n_max, ideal: IdealLimits::default(), split: SplitLimits::default() }
    }
}

/// Outcome of a decision rule: the conclusion, the results it rests on,
/// and the checks that had to pass for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub conclusion: Conclusion,
    pub basis: Vec<&'static str>,
    pub requires: Vec<&'static str>,
}

pub mod names {
    pub const P_EXCEEDS_DIM: &str = "p_exceeds_dim";
    pub const P_COPRIME_TO_Q: &str = "p_coprime_to_Q";
    pub const JACOBIAN_PRIMARY: &str = "jacobian_m_primary";
    pub const F_JACOBIAN_PRIMARY: &str = "f_jacobian_m_primary";
    pub const WELL_FORMED: &str = "well_formed";
    pub const PREFIX_DIM_BOUND: &str = "prefix_within_dim_bound";
    pub const WITNESS: &str = "witness_annihilates_f_and_jacobian";
    pub const EULER: &str = "f_in_jacobian";
    pub const SOCLE: &str = "jacobian_socle_degree";
    pub const P_COPRIME_TO_D: &str = "p_coprime_to_d";
    pub const QUADRATIC: &str = "quadratic_inequality";
    pub const P_AT_LEAST_DIM: &str = "p_at_least_dim";
    pub const QUADRATIC_CROSS: &str = "quadratic_cross_check";
    pub const PREFIX_VANISHES: &str = "prefix_vanishes_past_threshold";
    pub const THREEFOLD_TABLE: &str = "threefold_table";
    pub const KIND: &str = "kind";
}

/// Statuses feeding the Calabi–Yau decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyStatuses {
    pub p_exceeds_dim: Status,
    pub p_coprime_to_q: Status,
    pub jacobian: Status,
    pub well_formed: Status,
    pub prefix: Status,
}

pub fn decide_cy(s: &CyStatuses) -> Decision {
    use names::*;
    let pass = |x: Status| x == Status::Pass;
    if pass(s.p_exceeds_dim) && pass(s.p_coprime_to_q) && pass(s.jacobian) && pass(s.well_formed) && pass(s.prefix) {
        return Decision {
            conclusion: Conclusion::PerfectoidSplit,
            basis: vec![cite::CY_SPLIT, cite::CY_PREFIX_BOUND],
            requires: vec![P_EXCEEDS_DIM, P_COPRIME_TO_Q, JACOBIAN_PRIMARY, WELL_FORMED, PREFIX_DIM_BOUND],
        };
    }
    if pass(s.p_exceeds_dim) && pass(s.jacobian) && pass(s.prefix) {
        return Decision {
            conclusion: Conclusion::PerfectoidPure,
            basis: vec![cite::CY_PREFIX_BOUND, cite::SN_BOUND_CY],
            requires: vec![P_EXCEEDS_DIM, JACOBIAN_PRIMARY, PREFIX_DIM_BOUND],
        };
    }
    let hypotheses = [s.p_exceeds_dim, s.p_coprime_to_q, s.jacobian, s.well_formed];
    let conclusion =
        if hypotheses.contains(&Status::Fail) { Conclusion::HypothesisViolation } else { Conclusion::Inconclusive };
    Decision { conclusion, basis: vec![], requires: vec![] }
}

/// Statuses feeding the Fano decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FanoStatuses {
    pub p_coprime_to_d: Status,
    pub quadratic: Status,
    pub jacobian: Status,
    pub f_jacobian: Status,
    pub well_formed: Status,
    pub prefix: Status,
}

pub fn decide_fano(s: &FanoStatuses) -> Decision {
    use names::*;
    let pass = |x: Status| x == Status::Pass;
    if pass(s.p_coprime_to_d) && pass(s.quadratic) && pass(s.jacobian) && pass(s.well_formed) && pass(s.prefix) {
        return Decision {
            conclusion: Conclusion::GloballyPlusRegular,
            basis: vec![cite::FANO_PLUS_REGULAR, cite::FANO_VANISHING],
            requires: vec![P_COPRIME_TO_D, QUADRATIC, JACOBIAN_PRIMARY, WELL_FORMED, PREFIX_VANISHES],
        };
    }
    if pass(s.quadratic) && pass(s.jacobian) && pass(s.prefix) {
        return Decision {
            conclusion: Conclusion::BCMRegular,
            basis: vec![cite::FANO_VANISHING],
            requires: vec![QUADRATIC, JACOBIAN_PRIMARY, PREFIX_VANISHES],
        };
    }
    if s.jacobian == Status::Fail && pass(s.f_jacobian) && pass(s.well_formed) {
        // the remaining route needs s_n ≤ p - 1 for every n, which no
        // finite prefix certifies
        return Decision { conclusion: Conclusion::Inconclusive, basis: vec![], requires: vec![] };
    }
    let hypotheses = [s.p_coprime_to_d, s.quadratic, s.jacobian, s.well_formed];
    let conclusion =
        if hypotheses.contains(&Status::Fail) { Conclusion::HypothesisViolation } else { Conclusion::Inconclusive };
    Decision { conclusion, basis: vec![], requires: vec![] }
}

const FANO_THREEFOLD_TABLE: [([u64; 5], &[u64]); 4] =
    [([1, 1, 1, 1, 1], &[1, 2, 3, 4]), ([1, 1, 1, 1, 2], &[4]), ([1, 1, 1, 1, 3], &[6]), ([1, 1, 1, 2, 3], &[6])];

/// The row of the smooth Fano threefold hypersurface table matching
/// `(weights, d)` up to reordering, if any.
pub fn classify_fano_threefold(weights: &[u64], d: u64) -> Result<Option<TableEntry>, VerdictError> {
    if weights.len() != 5 {
        return Err(VerdictError::Input(format!("threefold table needs 5 weights, got {}", weights.len())));
    }
    let mut sorted = weights.to_vec();
    sorted.sort_unstable();
    Ok(FANO_THREEFOLD_TABLE
        .iter()
        .find(|(w, degs)| w[..] == sorted[..] && degs.contains(&d))
        .map(|(w, degs)| TableEntry { weights: w.to_vec(), degrees: degs.to_vec() }))
}

fn check(name: &str, status: Status, cite: &str, detail: Option<String>) -> Check {
    Check { name: name.into(), status, cite: cite.into(), informational: false, detail }
}

fn info(name: &str, status: Status, cite: &str, detail: Option<String>) -> Check {
    Check { name: name.into(), status, cite: cite.into(), informational: true, detail }
}

fn socle_hint(spec: &HypersurfaceSpec) -> (i128, u64) {
    let r = spec.f.ring();
    let h = r.nvars() as i128 * spec.degree as i128 - 2 * r.total_weight() as i128;
    (h, h.max(0) as u64)
}

/// Runs the m-primary test; limits and ceilings give `Inconclusive`.
fn primary_status(
    ideal: Result<crate::ideals::GradedIdeal, IdealError>,
    hint: u64,
    limits: &IdealLimits,
) -> Result<(Status, Option<PrimaryReport>, Option<String>), VerdictError> {
    let ideal = match ideal {
        Ok(i) => i,
        Err(IdealError::Algebra(e)) => return Err(e.into()),
        Err(e) => return Ok((Status::Inconclusive, None, Some(e.to_string()))),
    };
    match is_m_primary(&ideal, hint, limits) {
        Ok(rep) => Ok((Status::of(rep.is_m_primary), Some(rep), None)),
        Err(IdealError::Algebra(e)) => Err(e.into()),
        Err(e) => Ok((Status::Inconclusive, None, Some(e.to_string()))),
    }
}

fn problem_info(spec: &HypersurfaceSpec) -> ProblemInfo {
    let r = spec.f.ring();
    ProblemInfo {
        p: r.p(),
        e: r.precision(),
        weights: r.weights().to_vec(),
        d: spec.degree,
        f_canonical: spec.f.to_string(),
    }
}

fn nm_list(spec: &HypersurfaceSpec, n_max: usize) -> Vec<NmCheck> {
    let top = n_max.max(2) as u32;
    (2..=top).filter_map(|m| check_nm(spec.f.ring(), spec.degree, m).ok()).collect()
}

fn witness_check(prefix: &SplitPrefix, spec: &HypersurfaceSpec) -> Result<Check, VerdictError> {
    let p = prefix.p();
    let mut checked = Vec::new();
    let mut ok = true;
    for (i, &s) in prefix.s.iter().enumerate() {
        if s >= 1 && s < p {
            checked.push(i + 1);
            ok &= witness_kills_jacobian(prefix, &spec.f, i + 1)?;
        }
    }
    let detail = if checked.is_empty() {
        "no level with 1 ≤ s_n ≤ p - 1".to_string()
    } else {
        format!("levels {checked:?}")
    };
    Ok(info(names::WITNESS, Status::of(ok), cite::SN_BOUND, Some(detail)))
}

fn ppt_evidence(prefix: &SplitPrefix, theorem: Option<Ratio<u128>>) -> Result<Option<PptEvidence>, VerdictError> {
    if !prefix.bounded || prefix.depth() == 0 {
        return Ok(None);
    }
    let enc = ppt_enclosure(prefix)?;
    let lower = match theorem {
        Some(t) if t > enc.lower => t,
        _ => enc.lower,
    };
    let upper = enc.upper();
    Ok(Some(PptEvidence {
        lower_num: *lower.numer(),
        lower_den: *lower.denom(),
        depth: enc.depth,
        enclosure_lower_num: *enc.lower.numer(),
        enclosure_lower_den: *enc.lower.denom(),
        enclosure_upper_num: *upper.numer(),
        enclosure_upper_den: *upper.denom(),
        theorem_num: theorem.map(|t| *t.numer()),
        theorem_den: theorem.map(|t| *t.denom()),
        conditional: theorem.is_none(),
    }))
}

/// Verdict for `Q = d`.
pub fn cy_verdict(spec: &HypersurfaceSpec, opts: &VerdictOptions) -> Result<VerdictReport, VerdictError> {
    use names::*;
    if spec.kind != Kind::CalabiYau {
        return Err(VerdictError::Input(format!("expected a Calabi–Yau equation (Q = d), got {:?}", spec.kind)));
    }
    let ring = spec.f.ring();
    let p = ring.p();
    let dim = spec.dim_x();
    let q = ring.total_weight();
    let mut checks = Vec::new();

    let s_dim = Status::of(p as i64 > dim);
    checks.push(check(P_EXCEEDS_DIM, s_dim, cite::CY_SPLIT, Some(format!("p = {p}, dim X = {dim}"))));
    let s_q = Status::of(!q.is_multiple_of(p));
    checks.push(check(P_COPRIME_TO_Q, s_q, cite::CY_SPLIT, Some(format!("Q = {q}"))));

    let (raw_hint, hint) = socle_hint(spec);
    let (s_jac, jac_rep, jac_note) = primary_status(jacobian(&spec.f), hint, &opts.ideal)?;
    checks.push(check(JACOBIAN_PRIMARY, s_jac, cite::CY_SPLIT, jac_note));
    let s_wf = Status::of(ring.is_well_formed());
    checks.push(check(WELL_FORMED, s_wf, cite::CY_SPLIT, None));

    let prefix = splitting_prefix(&spec.f, opts.n_max, opts.split)?;
    let cap = dim.max(0) as u64;
    let s_prefix = Status::of(prefix.s.iter().all(|&s| s <= cap));
    checks.push(check(
        PREFIX_DIM_BOUND,
        s_prefix,
        cite::CY_PREFIX_BOUND,
        Some(format!("s_n ≤ {cap} at depths 1..={}", prefix.depth())),
    ));

    checks.push(witness_check(&prefix, spec)?);
    if let Some(rep) = &jac_rep {
        if rep.is_m_primary {
            let expected = (raw_hint >= 0).then_some(raw_hint as u64);
            checks.push(info(
                SOCLE,
                Status::of(rep.top_nonzero_degree == expected),
                cite::SOCLE,
                Some(format!("top degree {:?}, expected {expected:?}", rep.top_nonzero_degree)),
            ));
        }
    }
    if !spec.degree.is_multiple_of(p) {
        checks.push(info(EULER, Status::of(euler_holds(spec)?), cite::CY_SPLIT, None));
    }

    let decision = decide_cy(&CyStatuses {
        p_exceeds_dim: s_dim,
        p_coprime_to_q: s_q,
        jacobian: s_jac,
        well_formed: s_wf,
        prefix: s_prefix,
    });
    let mut basis: Vec<String> = decision.basis.iter().map(|s| s.to_string()).collect();
    let weights_standard = ring.weights().iter().all(|&w| w == 1);
    if decision.conclusion == Conclusion::PerfectoidSplit && ring.nvars() == 4 && weights_standard && p > 2 {
        basis.push(cite::K3_SPLIT.into());
    }
    let theorem = decision.conclusion.is_positive().then(|| Ratio::new(p as u128 - 1 - cap as u128, p as u128 - 1));

    Ok(VerdictReport {
        problem: problem_info(spec),
        checks,
        evidence: Evidence {
            prefix: prefix.s.clone(),
            bounded: prefix.bounded,
            depth_requested: opts.n_max,
            halted: prefix.halted.clone(),
            ppt: ppt_evidence(&prefix, theorem)?,
            primary: PrimaryEvidence {
                surrogate: "J(f̄) is m-primary".into(),
                socle_hint: hint,
                jacobian: jac_rep,
                jacobian_with_f: None,
            },
            nm: nm_list(spec, opts.n_max),
            thresholds: Thresholds::default(),
            lift_dependent: spec.lift_dependent,
            classification: None,
        },
        conclusion: decision.conclusion,
        basis,
        version: VERSION.into(),
    })
}

/// `Σ q_i x_i ∂f/∂x_i = d f` mod `p`.
fn euler_holds(spec: &HypersurfaceSpec) -> Result<bool, VerdictError> {
    let f = spec.f.reduce_mod_p();
    let ring = f.ring_arc().clone();
    let mut lhs = Poly::zero(ring.clone());
    for (i, &q) in ring.weights().iter().enumerate() {
        let term = Poly::variable(ring.clone(), i)?.mul(&f.derivative(i)?)?.scale(q);
        lhs = lhs.add(&term)?;
    }
    Ok(lhs == f.scale(spec.degree))
}

/// Verdict for `Q > d`.
pub fn fano_verdict(spec: &HypersurfaceSpec, opts: &VerdictOptions) -> Result<VerdictReport, VerdictError> {
    use names::*;
    if spec.kind != Kind::Fano {
        return Err(VerdictError::Input(format!("expected a Fano equation (Q > d), got {:?}", spec.kind)));
    }
    let ring = spec.f.ring();
    let p = ring.p();
    let d = spec.degree;
    let dim = spec.dim_x();
    let q = ring.total_weight() as i128;
    let n = ring.nvars() as i128 - 1;
    let mut checks = Vec::new();
    let mut thresholds = Thresholds::default();

    let s_pd = Status::of(!d.is_multiple_of(p));
    checks.push(check(P_COPRIME_TO_D, s_pd, cite::FANO_PLUS_REGULAR, Some(format!("d = {d}"))));

    let (pi, di) = (p as i128, d as i128);
    let quad = (q - di)
        .checked_mul(pi.checked_mul(pi).ok_or(SplitError::Overflow)?)
        .and_then(|x| x.checked_add(di.checked_mul(pi)?))
        .and_then(|x| x.checked_add(q))
        .and_then(|x| x.checked_sub(n.checked_mul(di)?))
        .ok_or(SplitError::Overflow)?;
    thresholds.quadratic = Some(quad);
    let s_quad = Status::of(quad > 0);
    checks.push(check(QUADRATIC, s_quad, cite::FANO_PLUS_REGULAR, Some(format!("(Q-d)p^2 + dp + Q - Nd = {quad}"))));

    let p_ge_dim = p as i64 >= dim;
    checks.push(info(P_AT_LEAST_DIM, Status::of(p_ge_dim), cite::FANO_PLUS_REGULAR, None));
    if p_ge_dim && s_pd == Status::Pass {
        checks.push(info(QUADRATIC_CROSS, s_quad, cite::FANO_PLUS_REGULAR, None));
    }

    let (raw_hint, hint) = socle_hint(spec);
    let (s_jac, jac_rep, jac_note) = primary_status(jacobian(&spec.f), hint, &opts.ideal)?;
    checks.push(check(JACOBIAN_PRIMARY, s_jac, cite::FANO_VANISHING, jac_note));
    let (s_fjac, fjac_rep) = if s_jac == Status::Pass {
        (Status::Pass, None)
    } else {
        let (s, rep, note) = primary_status(jacobian_with_f(&spec.f), hint, &opts.ideal)?;
        checks.push(check(F_JACOBIAN_PRIMARY, s, cite::FANO_TAIL_VANISHING, note));
        (s, rep)
    };
    let s_wf = Status::of(ring.is_well_formed());
    checks.push(check(WELL_FORMED, s_wf, cite::FANO_PLUS_REGULAR, None));

    thresholds.vanishing_n0 = Some(vanishing_threshold(ring, d, None)?);
    if let Some(rep) = &fjac_rep {
        if let Some(k) = rep.k_bound {
            thresholds.tail_k = Some(k);
            thresholds.tail_n0 = Some(vanishing_threshold(ring, d, Some(k))?);
        }
    }

    let prefix = splitting_prefix(&spec.f, opts.n_max, opts.split)?;
    let n0 = if s_jac == Status::Pass { thresholds.vanishing_n0 } else { thresholds.tail_n0 };
    let s_prefix = match n0 {
        None => Status::Inconclusive,
        Some(n0) => {
            let late: Vec<u64> = prefix.s.iter().skip(n0 as usize - 1).copied().collect();
            Status::of(prefix.bounded && late.iter().all(|&s| s == 0))
        }
    };
    checks.push(check(
        PREFIX_VANISHES,
        s_prefix,
        cite::FANO_VANISHING,
        Some(format!("threshold {n0:?}, computed depth {}", prefix.depth())),
    ));
    checks.push(witness_check(&prefix, spec)?);
    if let Some(rep) = &jac_rep {
        if rep.is_m_primary {
            let expected = (raw_hint >= 0).then_some(raw_hint as u64);
            checks.push(info(SOCLE, Status::of(rep.top_nonzero_degree == expected), cite::SOCLE, None));
        }
    }

    let classification = if ring.nvars() == 5 { classify_fano_threefold(ring.weights(), d)? } else { None };
    if classification.is_some() && p > 3 {
        checks.push(info(
            THREEFOLD_TABLE,
            Status::Pass,
            cite::FANO_THREEFOLD,
            Some(format!("({}, {d}) is a table row and p > 3", fmt_weights(ring.weights()))),
        ));
    }

    let decision = decide_fano(&FanoStatuses {
        p_coprime_to_d: s_pd,
        quadratic: s_quad,
        jacobian: s_jac,
        f_jacobian: s_fjac,
        well_formed: s_wf,
        prefix: s_prefix,
    });
    let mut basis: Vec<String> = decision.basis.iter().map(|s| s.to_string()).collect();
    if decision.conclusion == Conclusion::Inconclusive && s_jac == Status::Fail && s_fjac == Status::Pass {
        basis.push(cite::FANO_TAIL_VANISHING.into());
        basis.push(cite::FANO_PREFIX_ROUTE.into());
    }

    Ok(VerdictReport {
        problem: problem_info(spec),
        checks,
        evidence: Evidence {
            prefix: prefix.s.clone(),
            bounded: prefix.bounded,
            depth_requested: opts.n_max,
            halted: prefix.halted.clone(),
            ppt: ppt_evidence(&prefix, None)?,
            primary: PrimaryEvidence {
                surrogate: if s_jac == Status::Pass { "J(f̄) is m-primary" } else { "(f̄, J(f̄)) is m-primary" }.into(),
                socle_hint: hint,
                jacobian: jac_rep,
                jacobian_with_f: fjac_rep,
            },
            nm: nm_list(spec, opts.n_max),
            thresholds,
            lift_dependent: spec.lift_dependent,
            classification,
        },
        conclusion: decision.conclusion,
        basis,
        version: VERSION.into(),
    })
}

fn fmt_weights(w: &[u64]) -> String {
    let parts: Vec<String> = w.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Report for `Q < d`, where none of the criteria apply.
pub fn general_type_report(spec: &HypersurfaceSpec, opts: &VerdictOptions) -> Result<VerdictReport, VerdictError> {
    let prefix = splitting_prefix(&spec.f, opts.n_max, opts.split)?;
    let r = spec.f.ring();
    Ok(VerdictReport {
        problem: problem_info(spec),
        checks: vec![check(
            names::KIND,
            Status::Fail,
            cite::NONE,
            Some(format!("Q = {} < d = {}: neither Calabi–Yau nor Fano", r.total_weight(), spec.degree)),
        )],
        evidence: Evidence {
            prefix: prefix.s.clone(),
            bounded: prefix.bounded,
            depth_requested: opts.n_max,
            halted: prefix.halted.clone(),
            ppt: ppt_evidence(&prefix, None)?,
            primary: PrimaryEvidence {
                surrogate: "not evaluated".into(),
                socle_hint: socle_hint(spec).1,
                jacobian: None,
                jacobian_with_f: None,
            },
            nm: nm_list(spec, opts.n_max),
            thresholds: Thresholds::default(),
            lift_dependent: spec.lift_dependent,
            classification: None,
        },
        conclusion: Conclusion::HypothesisViolation,
        basis: vec![],
        version: VERSION.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictMode {
    Auto,
    Cy,
    Fano,
}

/// Dispatches on the kind of `spec`, or on `mode` when forced.
pub fn verdict(
    spec: &HypersurfaceSpec,
    mode: VerdictMode,
    opts: &VerdictOptions,
) -> Result<VerdictReport, VerdictError> {
    match (mode, spec.kind) {
        (VerdictMode::Cy, _) => cy_verdict(spec, opts),
        (VerdictMode::Fano, _) => fano_verdict(spec, opts),
        (VerdictMode::Auto, Kind::CalabiYau) => cy_verdict(spec, opts),
        (VerdictMode::Auto, Kind::Fano) => fano_verdict(spec, opts),
        (VerdictMode::Auto, Kind::GeneralType) => general_type_report(spec, opts),
    }
}

/// Fermat-type equation `Σ x_i^{d/q_i}`; `None` if some `q_i ∤ d`.
pub fn fermat_type(ring: Arc<crate::polyring::RingSpec>, d: u64) -> Result<Option<Poly>, VerdictError> {
    let n = ring.nvars();
    let mut terms = Vec::with_capacity(n);
    for (i, &q) in ring.weights().iter().enumerate() {
        if !d.is_multiple_of(q) {
            return Ok(None);
        }
        let mut e = vec![0u64; n];
        e[i] = d / q;
        terms.push((e, 1i64));
    }
    Ok(Some(Poly::from_terms(ring, terms)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::RingSpec;

    fn fermat(p: u64, e: u32, weights: &[u64], d: u64) -> HypersurfaceSpec {
        let r = Arc::new(RingSpec::new(p, e, weights.to_vec()).unwrap());
        HypersurfaceSpec::new(fermat_type(r, d).unwrap().unwrap()).unwrap()
    }

    const ALL: [Status; 3] = [Status::Pass, Status::Fail, Status::Inconclusive];

    fn status_of(name: &str, checks: &[(&str, Status)]) -> Status {
        checks.iter().find(|(n, _)| *n == name).unwrap().1
    }

    #[test]
    fn cy_decision_is_sound() {
        use names::*;
        for a in ALL {
            for b in ALL {
                for c in ALL {
                    for d in ALL {
                        for e in ALL {
                            let s = CyStatuses {
                                p_exceeds_dim: a,
                                p_coprime_to_q: b,
                                jacobian: c,
                                well_formed: d,
                                prefix: e,
                            };
                            let named = [
                                (P_EXCEEDS_DIM, a),
                                (P_COPRIME_TO_Q, b),
                                (JACOBIAN_PRIMARY, c),
                                (WELL_FORMED, d),
                                (PREFIX_DIM_BOUND, e),
                            ];
                            let dec = decide_cy(&s);
                            if dec.conclusion.is_positive() {
                                assert!(!dec.requires.is_empty() && !dec.basis.is_empty());
                                for r in &dec.requires {
                                    assert_eq!(status_of(r, &named), Status::Pass, "{s:?}");
                                }
                            }
                            if dec.conclusion == Conclusion::HypothesisViolation {
                                assert!([a, b, c, d].contains(&Status::Fail));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fano_decision_is_sound() {
        use names::*;
        for a in ALL {
            for b in ALL {
                for c in ALL {
                    for d in ALL {
                        for e in ALL {
                            for g in ALL {
                                let s = FanoStatuses {
                                    p_coprime_to_d: a,
                                    quadratic: b,
                                    jacobian: c,
                                    f_jacobian: d,
                                    well_formed: e,
                                    prefix: g,
                                };
                                let named = [
                                    (P_COPRIME_TO_D, a),
                                    (QUADRATIC, b),
                                    (JACOBIAN_PRIMARY, c),
                                    (F_JACOBIAN_PRIMARY, d),
                                    (WELL_FORMED, e),
                                    (PREFIX_VANISHES, g),
                                ];
                                let dec = decide_fano(&s);
                                if dec.conclusion.is_positive() {
                                    for r in &dec.requires {
                                        assert_eq!(status_of(r, &named), Status::Pass, "{s:?}");
                                    }
                                }
                                if dec.conclusion == Conclusion::HypothesisViolation {
                                    assert!([a, b, c, e].contains(&Status::Fail));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn quintic_small_primes() {
        let opts = VerdictOptions::with_depth(1);
        for p in [2, 3, 5] {
            let rep = cy_verdict(&fermat(p, 2, &[1; 5], 5), &opts).unwrap();
            assert_eq!(rep.conclusion, Conclusion::HypothesisViolation, "p = {p}");
        }
        let rep = cy_verdict(&fermat(5, 2, &[1; 5], 5), &opts).unwrap();
        assert_eq!(rep.check(names::P_COPRIME_TO_Q).unwrap().status, Status::Fail);
    }

    #[test]
    fn quintic_at_seven() {
        let rep = cy_verdict(&fermat(7, 2, &[1; 5], 5), &VerdictOptions::with_depth(2)).unwrap();
        assert_eq!(rep.conclusion, Conclusion::PerfectoidSplit);
        let ppt = rep.evidence.ppt.unwrap();
        assert_eq!((ppt.theorem_num, ppt.theorem_den), (Some(1), Some(2)));
        assert!(Ratio::new(ppt.lower_num, ppt.lower_den) >= Ratio::new(1, 2));
        assert!(!rep.evidence.lift_dependent);
    }

    #[test]
    fn precision_one_input_is_flagged() {
        let rep = cy_verdict(&fermat(7, 1, &[1; 4], 4), &VerdictOptions::with_depth(1)).unwrap();
        assert!(rep.evidence.lift_dependent);
        assert_eq!(rep.problem.e, 2);
        assert!(rep.basis.iter().any(|b| b == cite::K3_SPLIT));
    }

    #[test]
    fn cubic_threefold() {
        let rep = fano_verdict(&fermat(5, 2, &[1; 5], 3), &VerdictOptions::with_depth(1)).unwrap();
        assert_eq!(rep.conclusion, Conclusion::GloballyPlusRegular);
        assert_eq!(rep.evidence.thresholds.quadratic, Some(58));
        assert_eq!(rep.evidence.thresholds.vanishing_n0, Some(1));
        assert_eq!(rep.evidence.prefix, vec![0]);
    }

    #[test]
    fn quartic_threefold() {
        let opts = VerdictOptions::with_depth(1);
        let rep = fano_verdict(&fermat(2, 2, &[1; 5], 4), &opts).unwrap();
        assert_eq!(rep.conclusion, Conclusion::HypothesisViolation);
        let rep = fano_verdict(&fermat(3, 2, &[1; 5], 4), &opts).unwrap();
        assert_eq!(rep.evidence.thresholds.quadratic, Some(10));
        assert_eq!(rep.conclusion, Conclusion::GloballyPlusRegular);
    }

    #[test]
    fn table() {
        let rows = [
            ([1, 1, 1, 1, 1], 1),
            ([1, 1, 1, 1, 1], 2),
            ([1, 1, 1, 1, 1], 3),
            ([1, 1, 1, 1, 1], 4),
            ([1, 1, 1, 1, 2], 4),
            ([1, 1, 1, 1, 3], 6),
            ([1, 1, 1, 2, 3], 6),
        ];
        for (w, d) in rows {
            assert!(classify_fano_threefold(&w, d).unwrap().is_some());
        }
        assert!(classify_fano_threefold(&[3, 2, 1, 1, 1], 6).unwrap().is_some());
        assert!(classify_fano_threefold(&[1, 1, 1, 1, 1], 5).unwrap().is_none());
        assert!(classify_fano_threefold(&[1, 1, 1, 1], 4).is_err());
    }

    #[test]
    fn general_type_and_forced_modes() {
        let spec = fermat(7, 2, &[1, 1, 1], 4);
        assert_eq!(spec.kind(), Kind::GeneralType);
        let opts = VerdictOptions::with_depth(1);
        let rep = verdict(&spec, VerdictMode::Auto, &opts).unwrap();
        assert_eq!(rep.conclusion, Conclusion::HypothesisViolation);
        assert!(verdict(&spec, VerdictMode::Cy, &opts).is_err());
        assert!(verdict(&spec, VerdictMode::Fano, &opts).is_err());
    }

    #[test]
    fn json_round_trip() {
        let rep = cy_verdict(&fermat(7, 2, &[1; 5], 5), &VerdictOptions::with_depth(1)).unwrap();
        let text = serde_json::to_string(&rep).unwrap();
        let back: VerdictReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
    }
}
