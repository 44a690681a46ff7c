//! Problem files, report rendering and multi-prime scans.
//!
//! A problem file is a list of `key = value` lines:
//!
//! ```text
//! # Fermat quintic threefold
//! p = 7
//! e = 2
//! weights = 1,1,1,1,1
//! d = 5
//! f = x0^5 + x1^5 + x2^5 + x3^5 + x4^5
//! n_max = 2
//! verdict = auto
//! ```
//!
//! Scans write one JSON record per line and flush after every record.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ideals::IdealLimits;
use crate::polyring::{is_prime, parse_poly, AlgebraError, RingSpec};
use crate::splitting::SplitLimits;
use crate::verdicts::{verdict, HypersurfaceSpec, VerdictError, VerdictMode, VerdictOptions, VerdictReport, VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    ProblemFile { line: usize, message: String },
    #[error("{0}")]
    Input(String),
    #[error("f: {0}")]
    Polynomial(AlgebraError),
    #[error(transparent)]
    Verdict(#[from] VerdictError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("log {path}, line {line}: {message}")]
    Log { path: String, line: usize, message: String },
}

impl CliError {
    /// Whether the failure lies in the user's input rather than the engine.
    pub fn is_input_error(&self) -> bool {
        match self {
            CliError::Verdict(VerdictError::Input(_)) => true,
            CliError::Verdict(_) | CliError::Io { .. } => false,
            _ => true,
        }
    }
}

/// Parsed problem file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub p: Option<u64>,
    pub primes: Option<(u64, u64)>,
    pub e: u32,
    pub weights: Vec<u64>,
    pub d: u64,
    pub f: String,
    pub n_max: Option<usize>,
    pub verdict: VerdictMode,
    pub ceiling: Option<u64>,
}

/// `A..B`, both ends included.
pub fn parse_prime_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a range A..B, got '{s}'"))?;
    let a = a.trim().parse::<u64>().map_err(|e| format!("range start: {e}"))?;
    let b = b.trim().trim_start_matches('=').parse::<u64>().map_err(|e| format!("range end: {e}"))?;
    Ok((a, b))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut p = None;
        let mut primes = None;
        let mut e = 2u32;
        let mut weights = None;
        let mut d = None;
        let mut f = None;
        let mut n_max = None;
        let mut mode = VerdictMode::Auto;
        let mut ceiling = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let err = |message: String| CliError::ProblemFile { line, message };
            let (key, value) = content.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let int = |v: &str| v.parse::<u64>().map_err(|e| err(format!("{key}: {e}")));
            match key {
                "p" => p = Some(int(value)?),
                "primes" => primes = Some(parse_prime_range(value).map_err(err)?),
                "e" => e = u32::try_from(int(value)?).map_err(|_| err("e is too large".into()))?,
                "weights" => {
                    weights = Some(value.split(',').map(|w| int(w.trim())).collect::<Result<Vec<_>, _>>()?);
                }
                "d" => d = Some(int(value)?),
                "f" => f = Some(value.to_string()),
                "n_max" => n_max = Some(int(value)? as usize),
                "verdict" => {
                    mode = match value {
                        "auto" => VerdictMode::Auto,
                        "cy" => VerdictMode::Cy,
                        "fano" => VerdictMode::Fano,
                        other => return Err(err(format!("verdict must be auto, cy or fano, got '{other}'"))),
                    }
                }
                "ceiling" => ceiling = Some(int(value)?),
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        let missing = |k: &str| CliError::ProblemFile { line: 0, message: format!("missing key '{k}'") };
        Ok(ProblemFile {
            p,
            primes,
            e,
            weights: weights.ok_or_else(|| missing("weights"))?,
            d: d.ok_or_else(|| missing("d"))?,
            f: f.ok_or_else(|| missing("f"))?,
            n_max,
            verdict: mode,
            ceiling,
        })
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Whitespace-free description of everything that determines a run
    /// except the prime.
    pub fn descriptor(&self, opts: &RunOptions) -> String {
        let f: String = self.f.chars().filter(|c| !c.is_whitespace()).collect();
        let w: Vec<String> = self.weights.iter().map(|x| x.to_string()).collect();
        format!(
            "e={};weights={};d={};f={};n_max={};verdict={:?};ceiling={:?};ill_formed_ok={};version={}",
            self.e,
            w.join(","),
            self.d,
            f,
            opts.n_max.or(self.n_max).unwrap_or_else(|| default_n_max(self.weights.len())),
            self.verdict,
            opts.ceiling.or(self.ceiling),
            opts.allow_ill_formed,
            VERSION
        )
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub n_max: Option<usize>,
    pub ceiling: Option<u64>,
    pub allow_ill_formed: bool,
}

/// Depth 4 for curves and surfaces, 2 from threefolds on.
pub fn default_n_max(nvars: usize) -> usize {
    if nvars <= 4 {
        4
    } else {
        2
    }
}

fn verdict_options(problem: &ProblemFile, opts: &RunOptions) -> VerdictOptions {
    let mut ideal = IdealLimits::default();
    if let Some(c) = opts.ceiling.or(problem.ceiling) {
        ideal.ceiling = c;
    }
    VerdictOptions {
        n_max: opts.n_max.or(problem.n_max).unwrap_or_else(|| default_n_max(problem.weights.len())),
        ideal,
        split: SplitLimits::default(),
    }
}

/// Builds the hypersurface over `p`, validating the ring and the degree.
pub fn build_spec(problem: &ProblemFile, p: u64, allow_ill_formed: bool) -> Result<HypersurfaceSpec, CliError> {
    let ring = RingSpec::new(p, problem.e, problem.weights.clone()).map_err(|e| CliError::Input(e.to_string()))?;
    if !allow_ill_formed && !ring.is_well_formed() {
        return Err(CliError::Input(format!(
            "weights {:?} are not well-formed; pass --allow-ill-formed to analyze anyway",
            problem.weights
        )));
    }
    let f = parse_poly(&problem.f, Arc::new(ring)).map_err(CliError::Polynomial)?;
    match f.weighted_degree_check() {
        (true, Some(d)) if d == problem.d => {}
        (true, Some(d)) => {
            return Err(CliError::Input(format!("f has weighted degree {d} but d = {}", problem.d)));
        }
        (true, None) => return Err(CliError::Input(format!("f vanishes modulo {p}^{}", problem.e))),
        (false, _) => return Err(CliError::Input("f is not weighted-homogeneous".into())),
    }
    HypersurfaceSpec::new(f).map_err(CliError::from)
}

/// Runs the verdict for the file's single prime.
pub fn cmd_analyze(problem: &ProblemFile, opts: &RunOptions) -> Result<VerdictReport, CliError> {
    let p = problem.p.ok_or_else(|| CliError::Input("analyze needs 'p' in the problem file".into()))?;
    let spec = build_spec(problem, p, opts.allow_ill_formed)?;
    Ok(verdict(&spec, problem.verdict, &verdict_options(problem, opts))?)
}

fn ratio(num: u128, den: u128) -> String {
    if den == 1 {
        num.to_string()
    } else {
        format!("{num}/{den}")
    }
}

/// Human-readable rendering of a report.
pub fn render_table(rep: &VerdictReport) -> String {
    let mut out = String::new();
    let pr = &rep.problem;
    let w: Vec<String> = pr.weights.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "problem     p={} e={} weights=({}) d={}", pr.p, pr.e, w.join(","), pr.d);
    let _ = writeln!(out, "f           {}", pr.f_canonical);
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<42} {:<13} cite", "check", "status");
    for c in &rep.checks {
        let status = match c.status {
            crate::verdicts::Status::Pass => "pass",
            crate::verdicts::Status::Fail => "FAIL",
            crate::verdicts::Status::Inconclusive => "inconclusive",
        };
        let name = if c.informational { format!("{} (info)", c.name) } else { c.name.clone() };
        let _ = write!(out, "{name:<42} {status:<13} {}", c.cite);
        if let Some(d) = &c.detail {
            let _ = write!(out, "  [{d}]");
        }
        let _ = writeln!(out);
    }
    let ev = &rep.evidence;
    let _ = writeln!(out);
    let s: Vec<String> = ev.prefix.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "prefix      ({}){}", s.join(", "), if ev.bounded { "" } else { "  s_n = p reached" });
    if let Some(h) = &ev.halted {
        let _ = writeln!(out, "halted      {h}");
    }
    if let Some(ppt) = &ev.ppt {
        let _ = writeln!(
            out,
            "ppt         ≥ {}  (enclosure [{}, {}] at depth {}{})",
            ratio(ppt.lower_num, ppt.lower_den),
            ratio(ppt.enclosure_lower_num, ppt.enclosure_lower_den),
            ratio(ppt.enclosure_upper_num, ppt.enclosure_upper_den),
            ppt.depth,
            if ppt.conditional { ", conditional" } else { "" }
        );
        if let (Some(n), Some(d)) = (ppt.theorem_num, ppt.theorem_den) {
            let _ = writeln!(out, "            ≥ {} from the dimension bound", ratio(n, d));
        }
    }
    let t = &ev.thresholds;
    if let Some(q) = t.quadratic {
        let _ = writeln!(out, "quadratic   {q}");
    }
    if let Some(n0) = t.vanishing_n0 {
        let _ = writeln!(out, "threshold   n0 = {n0}");
    }
    if let (Some(k), Some(n0)) = (t.tail_k, t.tail_n0) {
        let _ = writeln!(out, "tail        k = {k}, n0 = {n0}");
    }
    if ev.lift_dependent {
        let _ = writeln!(out, "note        equation given mod p; verdict is for the canonical lift");
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "conclusion  {:?}  [{}]", rep.conclusion, rep.basis.join(", "));
    out
}

/// One line of a scan log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    /// sha256 of the problem descriptor and the prime.
    pub key: String,
    /// sha256 of the problem descriptor alone.
    pub problem: String,
    pub prime: u64,
    pub conclusion: String,
    pub prefix: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppt: Option<ScanPpt>,
    pub wall_ms: u64,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanPpt {
    pub lower_num: u128,
    pub lower_den: u128,
    pub upper_num: u128,
    pub upper_den: u128,
    pub depth: usize,
}

fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

/// Primes in `[a, b]`.
pub fn primes_in(a: u64, b: u64) -> Vec<u64> {
    (a..=b).filter(|&n| is_prime(n)).collect()
}

/// Reads every record of a log; a missing file is an empty log.
pub fn read_log(path: &Path) -> Result<Vec<ScanRecord>, CliError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => return Err(CliError::Io { path: path.display().to_string(), source }),
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| CliError::Log {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// `(prime, conclusion)` rows for one problem, sorted by prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub problem: String,
    pub rows: Vec<(u64, String)>,
}

/// Summary of the records of `problem` in `log`, optionally restricted to
/// a prime range.
pub fn summarize(log: &[ScanRecord], problem: &str, range: Option<(u64, u64)>) -> ScanSummary {
    let mut rows: Vec<(u64, String)> = log
        .iter()
        .filter(|r| r.problem == problem)
        .filter(|r| range.is_none_or(|(a, b)| (a..=b).contains(&r.prime)))
        .map(|r| (r.prime, r.conclusion.clone()))
        .collect();
    rows.sort();
    rows.dedup_by_key(|r| r.0);
    ScanSummary { problem: problem.to_string(), rows }
}

pub fn render_summary(s: &ScanSummary) -> String {
    let mut out = format!("{:>8}  conclusion\n", "prime");
    for (p, c) in &s.rows {
        let _ = writeln!(out, "{p:>8}  {c}");
    }
    let _ = writeln!(out, "{} primes", s.rows.len());
    out
}

fn scan_one(problem: &ProblemFile, opts: &RunOptions, descriptor: &str, prime: u64) -> ScanRecord {
    let start = Instant::now();
    let result = build_spec(problem, prime, opts.allow_ill_formed)
        .and_then(|spec| Ok(verdict(&spec, problem.verdict, &verdict_options(problem, opts))?));
    let (conclusion, prefix, ppt, error) = match result {
        Ok(rep) => {
            let ppt = rep.evidence.ppt.as_ref().map(|p| ScanPpt {
                lower_num: p.lower_num,
                lower_den: p.lower_den,
                upper_num: p.enclosure_upper_num,
                upper_den: p.enclosure_upper_den,
                depth: p.depth,
            });
            (format!("{:?}", rep.conclusion), rep.evidence.prefix, ppt, None)
        }
        Err(e) => ("Error".to_string(), Vec::new(), None, Some(e.to_string())),
    };
    ScanRecord {
        key: sha256_hex(&format!("{descriptor};p={prime}")),
        problem: sha256_hex(descriptor),
        prime,
        conclusion,
        prefix,
        ppt,
        wall_ms: start.elapsed().as_millis() as u64,
        version: VERSION.into(),
        error,
    }
}

/// Runs every prime of `range` not already in the log at `out`, appending
/// one record per prime, and returns the summary recomputed from the log.
pub fn cmd_scan(
    problem: &ProblemFile,
    range: (u64, u64),
    out: &Path,
    opts: &RunOptions,
) -> Result<ScanSummary, CliError> {
    let io_err = |source| CliError::Io { path: out.display().to_string(), source };
    let descriptor = problem.descriptor(opts);
    let problem_key = sha256_hex(&descriptor);
    let done: HashSet<String> = read_log(out)?.into_iter().map(|r| r.key).collect();
    let file = OpenOptions::new().create(true).append(true).open(out).map_err(io_err)?;
    let writer = Mutex::new(file);
    let todo: Vec<u64> = primes_in(range.0, range.1)
        .into_iter()
        .filter(|&p| !done.contains(&sha256_hex(&format!("{descriptor};p={p}"))))
        .collect();
    todo.par_iter().try_for_each(|&p| {
        let rec = scan_one(problem, opts, &descriptor, p);
        let line = serde_json::to_string(&rec).expect("records serialize");
        let mut w = writer.lock().expect("log writer poisoned");
        writeln!(w, "{line}").and_then(|_| w.flush()).map_err(io_err)
    })?;
    Ok(summarize(&read_log(out)?, &problem_key, Some(range)))
}
