//! Exhaustive contract checks against brute-force oracles, length audits,
//! mutation sweeps and timing comparisons.

mod kernel_scan;
mod suites;
mod timing;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{BinStr, ParamSet, PolyBound};
use crate::error::{Error, Result};
use crate::problems::Budget;
use crate::reductions::PolyCompReduction;
use crate::schemes::{query_compiled, ClassClaim, CompilationScheme, CompiledArtifact, Prepared};

pub use kernel_scan::{scan_kernel, KernelScan};
pub use suites::{
    composed, reduction_budget, run_suite, scheme_budget, slice_report, BudgetLevel, CHAINS, SUITES,
};
pub use timing::{differential_speed, random_graphs, TimingReport, SEED};

/// Longest instance rendering kept in a failure record.
pub const MAX_FAILURE_BYTES: usize = 4096;
/// Failure records kept per report.
pub const MAX_RECORDED: usize = 10;
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum Status {
    PASS,
    FAIL,
    SCALE_EXCEEDED,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::PASS => "PASS",
            Status::FAIL => "FAIL",
            Status::SCALE_EXCEEDED => "SCALE_EXCEEDED",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Failure {
    pub instance: String,
    pub contract: String,
    pub expected: String,
    pub got: String,
}

impl Failure {
    pub fn new(instance: &BinStr, contract: &str, expected: impl ToString, got: impl ToString) -> Self {
        let mut s = instance.to_string();
        s.truncate(MAX_FAILURE_BYTES);
        Failure {
            instance: s,
            contract: contract.to_string(),
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub subject: String,
    pub budget: String,
    pub checked: u64,
    /// Total failures; only the first few are kept in `failures`.
    pub failed: u64,
    pub failures: Vec<Failure>,
    pub status: Status,
    /// Smallest `bound - length` seen by a length audit.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slack: Option<i64>,
    pub wall_ms: u64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::PASS
    }

    fn finish(subject: &str, budget: &str, started: Instant, outcome: Outcome) -> Self {
        let mut failures = outcome.failures;
        failures.sort();
        failures.truncate(MAX_RECORDED);
        let status = if outcome.scale {
            Status::SCALE_EXCEEDED
        } else if outcome.failed == 0 && outcome.checked > 0 {
            Status::PASS
        } else {
            Status::FAIL
        };
        VerificationReport {
            subject: subject.to_string(),
            budget: budget.to_string(),
            checked: outcome.checked,
            failed: outcome.failed,
            failures,
            status,
            slack: outcome.slack,
            wall_ms: started.elapsed().as_millis() as u64,
        }
    }

    /// A report with the timing field zeroed, for comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport {
            wall_ms: 0,
            ..self.clone()
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{}] checked={} failed={}",
            self.status, self.subject, self.budget, self.checked, self.failed
        )?;
        if let Some(s) = self.slack {
            write!(f, " slack={s}")?;
        }
        if let Some(first) = self.failures.first() {
            write!(
                f,
                " first: {} on {} (expected {}, got {})",
                first.contract, first.instance, first.expected, first.got
            )?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Outcome {
    checked: u64,
    failed: u64,
    failures: Vec<Failure>,
    scale: bool,
    slack: Option<i64>,
}

impl Outcome {
    fn record(&mut self, f: Failure) {
        self.failed += 1;
        if self.failures.len() < MAX_RECORDED * 4 {
            self.failures.push(f);
        }
    }
}

/// What one instance check produced.
#[derive(Default)]
pub struct Verdict {
    pub failures: Vec<Failure>,
    pub slack: Option<i64>,
    /// Instances outside the subject's scope are not counted.
    pub skipped: bool,
}

impl Verdict {
    fn fail(&mut self, f: Failure) {
        self.failures.push(f);
    }

    fn slack(&mut self, s: i64) {
        self.slack = Some(self.slack.map_or(s, |t| t.min(s)));
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Stop after the chunk in which the first failure appears.
    pub stop_at_first: bool,
}

fn is_scale(e: &Error) -> bool {
    matches!(e, Error::ScaleExceeded(_) | Error::OracleTimeout)
}

/// Runs `check` over `instances` in fixed-size chunks, in parallel within
/// a chunk and in order across chunks. Scale errors abort the run.
pub fn run_checks<I, F>(
    subject: &str,
    budget: &str,
    instances: I,
    opts: RunOptions,
    check: F,
) -> VerificationReport
where
    I: IntoIterator<Item = BinStr>,
    F: Fn(&BinStr) -> Result<Verdict> + Sync,
{
    let started = Instant::now();
    let mut out = Outcome::default();
    let mut it = instances.into_iter();
    loop {
        let chunk: Vec<BinStr> = it.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let verdicts: Vec<Result<Verdict>> = chunk.par_iter().map(&check).collect();
        for (x, v) in chunk.iter().zip(verdicts) {
            match v {
                Ok(v) => {
                    if v.skipped {
                        continue;
                    }
                    out.checked += 1;
                    if let Some(s) = v.slack {
                        out.slack = Some(out.slack.map_or(s, |t: i64| t.min(s)));
                    }
                    for f in v.failures {
                        out.record(f);
                    }
                }
                Err(e) if is_scale(&e) => {
                    out.scale = true;
                    out.record(Failure::new(x, "scale", "within caps", e));
                }
                Err(e) => {
                    out.checked += 1;
                    out.record(Failure::new(x, "evaluation", "a result", e));
                }
            }
        }
        if out.scale || (opts.stop_at_first && out.failed > 0) {
            break;
        }
    }
    VerificationReport::finish(subject, budget, started, out)
}

fn scale_report(subject: &str, budget: &str, e: Error) -> VerificationReport {
    let mut out = Outcome {
        scale: is_scale(&e),
        ..Outcome::default()
    };
    out.record(Failure::new(&BinStr::new(), "setup", "an instance stream", e));
    VerificationReport::finish(subject, budget, Instant::now(), out)
}

/// Lazily built per-parameter state, shared by the workers of a run.
struct PerParam<T> {
    cache: Mutex<HashMap<BinStr, Arc<T>>>,
}

impl<T> PerParam<T> {
    fn new() -> Self {
        PerParam {
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn get<F: FnOnce() -> Result<T>>(&self, k: &BinStr, build: F) -> Result<Arc<T>> {
        if let Some(v) = self.cache.lock().unwrap().get(k) {
            return Ok(v.clone());
        }
        let v = Arc::new(build()?);
        self.cache
            .lock()
            .unwrap()
            .entry(k.clone())
            .or_insert(v.clone());
        Ok(v)
    }
}

fn within(bound: &PolyBound, arg: usize, len: usize) -> (bool, i64) {
    let cap = bound.eval_saturating(arg as u64);
    (len as u64 <= cap, cap.min(i64::MAX as u64) as i64 - len as i64)
}

/// `|c(k)|` against the declared offline length, for the claim at hand.
fn offline_within(claim: Option<&ClassClaim>, bound: &PolyBound, k: &BinStr, d: &BinStr) -> bool {
    match claim {
        Some(ClassClaim::ExpComp(p)) => {
            let e = p.eval_saturating(k.len() as u64);
            e >= 63 || d.len() as u64 <= 1u64 << e
        }
        _ => within(bound, k.len(), d.len()).0,
    }
}

struct ReductionState {
    prepared: Prepared,
    s: ParamSet,
    k_failures: Vec<Failure>,
}

/// Both contracts on every instance, plus the offline and `s` length
/// audits once per parameter value.
pub fn verify_reduction_on<I>(
    r: &PolyCompReduction,
    budget: &str,
    instances: I,
    opts: RunOptions,
) -> VerificationReport
where
    I: IntoIterator<Item = BinStr>,
{
    let states = PerParam::new();
    let seen = Mutex::new(std::collections::HashSet::new());
    run_checks(&r.id, budget, instances, opts, |x| {
        let mut v = Verdict::default();
        let k = r.source.param.apply(x)?;
        let st = states.get(&k, || {
            let d = r.g.offline(&k)?;
            let s = r.s(&k)?;
            let mut k_failures = Vec::new();
            if !offline_within(None, &r.g.offline_len, &k, &d) {
                k_failures.push(Failure::new(&k, "offline-length", r.g.offline_len.to_string(), d.len()));
            }
            if !(s.encoded_len() <= r.s_len.eval_saturating(k.len() as u64)) {
                k_failures.push(Failure::new(&k, "s-length", r.s_len.to_string(), s.encoded_len()));
            }
            Ok(ReductionState {
                prepared: r.g.prepare(&d)?,
                s,
                k_failures,
            })
        })?;
        if !st.k_failures.is_empty() && seen.lock().unwrap().insert(k.clone()) {
            v.failures.extend(st.k_failures.iter().cloned());
        }
        let y = (st.prepared)(x)?;
        let expected = r.source.problem.decide(x)?;
        let got = r.target.problem.member(&y)?;
        if expected != got {
            v.fail(Failure::new(x, "A", expected, got));
        }
        if !crate::reductions::contract_b_holds(r, &st.s, &y) {
            let k2 = r.target.param.apply(&y).map(|k| k.to_string());
            v.fail(Failure::new(x, "B", "parameter in s(k)", format!("{k2:?}")));
        }
        Ok(v)
    })
}

pub fn verify_reduction(r: &PolyCompReduction, budget: &Budget) -> VerificationReport {
    match r.source.problem.enumerate(budget) {
        Ok(stream) => verify_reduction_on(r, &budget.to_string(), stream, RunOptions::default()),
        Err(e) => scale_report(&r.id, &budget.to_string(), e),
    }
}

struct SchemeState {
    prepared: Prepared,
    offline_ok: bool,
}

/// `x ∈ Q ⟺ g(x) ∈ Q′` on every instance, the chopped bound when claimed,
/// and the offline length once per parameter value.
pub fn verify_scheme_on<I>(
    w: &CompilationScheme,
    budget: &str,
    instances: I,
    opts: RunOptions,
) -> VerificationReport
where
    I: IntoIterator<Item = BinStr>,
{
    let states = PerParam::new();
    let seen = Mutex::new(std::collections::HashSet::new());
    run_checks(&w.id, budget, instances, opts, |x| {
        let mut v = Verdict::default();
        let k = w.param().apply(x)?;
        let st = states.get(&k, || {
            let d = w.map.offline(&k)?;
            Ok(SchemeState {
                offline_ok: offline_within(Some(&w.claim), &w.map.offline_len, &k, &d),
                prepared: w.map.prepare(&d)?,
            })
        })?;
        if !st.offline_ok && seen.lock().unwrap().insert(k.clone()) {
            v.fail(Failure::new(&k, "offline-length", w.map.offline_len.to_string(), "longer"));
        }
        let y = (st.prepared)(x)?;
        if let Some(bound) = w.chopped_bound() {
            let (ok, slack) = within(bound, k.len(), y.len());
            v.slack(slack);
            if !ok {
                v.fail(Failure::new(x, "chopped-length", bound.eval_saturating(k.len() as u64), y.len()));
            }
        }
        let expected = w.problem.decide(x)?;
        let got = w.target.member(&y)?;
        if expected != got {
            v.fail(Failure::new(x, "decision", expected, got));
        }
        Ok(v)
    })
}

pub fn verify_scheme(w: &CompilationScheme, budget: &Budget) -> VerificationReport {
    match w.problem.enumerate(budget) {
        Ok(stream) => verify_scheme_on(w, &budget.to_string(), stream, RunOptions::default()),
        Err(e) => scale_report(&w.id, &budget.to_string(), e),
    }
}

/// Compiled answers against the source oracle on every instance whose
/// parameter equals the artifact's; other instances are skipped.
pub fn verify_artifact<I>(
    artifact: &CompiledArtifact,
    w: &CompilationScheme,
    budget: &str,
    instances: I,
) -> VerificationReport
where
    I: IntoIterator<Item = BinStr>,
{
    let subject = format!("{}@{}", artifact.scheme_id, artifact.param_value);
    if !artifact.checksum_ok() {
        let mut out = Outcome::default();
        out.record(Failure::new(&artifact.param_value, "checksum", artifact.checksum, "mismatch"));
        return VerificationReport::finish(&subject, budget, Instant::now(), out);
    }
    run_checks(&subject, budget, instances, RunOptions::default(), |x| {
        let mut v = Verdict::default();
        if w.param().apply(x)? != artifact.param_value {
            v.skipped = true;
            return Ok(v);
        }
        let got = query_compiled(artifact, w, x)?;
        let expected = w.problem.decide(x)?;
        if expected != got {
            v.fail(Failure::new(x, "compiled-query", expected, got));
        }
        Ok(v)
    })
}

/// `|f(x)| ≤ bound(|x|)` on every input; the report carries the minimum
/// slack.
pub fn audit_lengths<I, F>(subject: &str, bound: &PolyBound, budget: &str, inputs: I, f: F) -> VerificationReport
where
    I: IntoIterator<Item = BinStr>,
    F: Fn(&BinStr) -> Result<BinStr> + Sync,
{
    run_checks(subject, budget, inputs, RunOptions::default(), |x| {
        let mut v = Verdict::default();
        let y = f(x)?;
        let (ok, slack) = within(bound, x.len(), y.len());
        v.slack(slack);
        if !ok {
            v.fail(Failure::new(x, "length", bound.eval_saturating(x.len() as u64), y.len()));
        }
        Ok(v)
    })
}

/// Decision agreement between two deciders over the same instances.
pub fn verify_agreement<I, A, B>(subject: &str, budget: &str, instances: I, expected: A, got: B) -> VerificationReport
where
    I: IntoIterator<Item = BinStr>,
    A: Fn(&BinStr) -> Result<bool> + Sync,
    B: Fn(&BinStr) -> Result<bool> + Sync,
{
    run_checks(subject, budget, instances, RunOptions::default(), |x| {
        let mut v = Verdict::default();
        let (e, g) = (expected(x)?, got(x)?);
        if e != g {
            v.fail(Failure::new(x, "decision", e, g));
        }
        Ok(v)
    })
}

/// Flips bit `i mod |y|` of every output (appends a bit to empty outputs).
pub fn flip_output(i: usize) -> impl Fn(BinStr) -> BinStr + Send + Sync + Clone {
    move |mut y: BinStr| {
        if y.is_empty() {
            y.push(true);
        } else {
            let at = i % y.len();
            y.flip(at);
        }
        y
    }
}

/// Mutants tried per subject by the sweep.
pub const MUTANT_POSITIONS: usize = 4;

/// Runs single-bit output mutants of `r`; the returned report passes iff at
/// least one mutant fails its contracts.
pub fn mutation_sweep_reduction(r: &PolyCompReduction, budget: &str, instances: &[BinStr]) -> VerificationReport {
    mutation_sweep(&format!("mutants of {}", r.id), budget, |i| {
        let m = r.with_map(format!("{}#flip{i}", r.id), r.g.map_output(flip_output(i)));
        verify_reduction_on(&m, budget, instances.iter().cloned(), RunOptions { stop_at_first: true })
    })
}

pub fn mutation_sweep_scheme(w: &CompilationScheme, budget: &str, instances: &[BinStr]) -> VerificationReport {
    mutation_sweep(&format!("mutants of {}", w.id), budget, |i| {
        let m = w.with_map(format!("{}#flip{i}", w.id), w.map.map_output(flip_output(i)));
        verify_scheme_on(&m, budget, instances.iter().cloned(), RunOptions { stop_at_first: true })
    })
}

/// Sweep over an arbitrary family of mutants, indexed by flip position.
pub fn mutation_sweep_with<F>(subject: &str, budget: &str, run: F) -> VerificationReport
where
    F: Fn(usize) -> VerificationReport,
{
    mutation_sweep(subject, budget, run)
}

fn mutation_sweep<F>(subject: &str, budget: &str, run: F) -> VerificationReport
where
    F: Fn(usize) -> VerificationReport,
{
    let started = Instant::now();
    let mut out = Outcome::default();
    let mut killed = 0;
    for i in 0..MUTANT_POSITIONS {
        let rep = run(i);
        out.checked += 1;
        if rep.status == Status::FAIL {
            killed += 1;
        }
    }
    if killed == 0 {
        out.record(Failure::new(&BinStr::new(), "mutation", "some mutant fails", "all mutants pass"));
    }
    out.slack = Some(killed);
    VerificationReport::finish(subject, budget, started, out)
}
