//! Range campaigns over p ≡ 1 (mod 10): evaluate every requested claim on
//! every instance in [lo, hi], tally verdicts, mine counterexamples, audit
//! the three factorization methods against each other, and measure the
//! monotonicity premise behind the step inequality.
//!
//! Determinism contract: a sweep's record stream depends only on its
//! configuration, never on the worker count. Work is split into fixed
//! chunks of 10⁴ values of p; chunks run in parallel and are merged in
//! chunk order, and every per-p evaluation is pure.
//!
//! Records are serialized one JSON object per line. All integers that can
//! appear in a record stay below 2⁵³ as long as sweeps respect
//! [`HARD_MAX_LIMIT`], so the JSON numbers are exact.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{
    check_cor_range, check_obs2, check_th1, check_th2, check_th2_interior, check_th3, check_th4,
    BoundCheck, ClaimId, Th2GateScope, Th2Options, Th2Pair, Th3Instance,
};
use crate::error::{Error, Result};
use crate::exact::Verdict;
use crate::factor::{
    all_representations, dsearch_representations, lambda_representations, oracle_representations,
    DiscriminantForm, NonConformity, RangeMode,
};
use crate::primes::is_prime;
use crate::repr::{Representation, ResidueCase};

/// Default ceiling for sweep ranges; overridable per config (CLI: the
/// `DCF_MAX_LIMIT` environment variable).
pub const DEFAULT_MAX_LIMIT: u64 = 1_000_000_000;

/// Absolute ceiling. Above ~4·10¹⁵ the derived quantities in witness
/// fields (s can reach ~1.17·p) would no longer fit the 2⁵³ window where
/// JSON numbers are exact.
pub const HARD_MAX_LIMIT: u64 = 4_000_000_000_000_000;

/// Values of p per work unit.
const CHUNK_P_VALUES: u64 = 10_000;

/// How far past p the consecutive-representable pairing probes for the next
/// representable value before declaring the instance non-pairable.
const NEXT_REPRESENTABLE_HORIZON: u64 = 10_000;

/// Violations kept verbatim in a monotonicity variant (totals are exact).
const VIOLATION_SAMPLE: usize = 20;

/// Witness half of a persisted record. The key set is fixed across all
/// claims; keys that do not apply hold null.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub a: Option<u64>,
    pub b: Option<u64>,
    pub p2: Option<u64>,
    pub a2: Option<u64>,
    pub b2: Option<u64>,
    pub d: Option<u64>,
    pub s: Option<u64>,
    pub form: Option<String>,
}

impl WitnessJson {
    fn for_rep(rep: &Representation) -> WitnessJson {
        WitnessJson {
            a: Some(rep.a()),
            b: Some(rep.b()),
            ..WitnessJson::default()
        }
    }
}

/// One persisted check outcome — the JSONL row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub claim: String,
    pub p: u64,
    pub case: String,
    pub applicable: bool,
    pub gate: String,
    pub verdict: String,
    pub lhs: String,
    pub mid: String,
    pub rhs: String,
    pub exact: bool,
    pub witness: WitnessJson,
}

impl CheckRecord {
    pub fn from_check(check: &BoundCheck, witness: WitnessJson) -> CheckRecord {
        CheckRecord {
            claim: check.claim.label().to_string(),
            p: check.p,
            case: check.case.label().to_string(),
            applicable: check.applicable,
            gate: check.gate_reason.clone(),
            verdict: check.verdict.label().to_string(),
            lhs: check.lhs.render(),
            mid: check.mid.render(),
            rhs: check.rhs.render(),
            exact: check.is_exact(),
            witness,
        }
    }

    /// An applicable Fail or Borderline — the definition of a
    /// counterexample record.
    pub fn is_counterexample(&self) -> bool {
        self.applicable && (self.verdict == "fail" || self.verdict == "borderline")
    }
}

/// How the step-inequality instances are formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Th2Pairing {
    /// Pair reps of p with reps of the literal p + 10.
    #[default]
    Literal10,
    /// Pair reps of p with reps of the next representable p' > p in the
    /// same case. The bound formula keeps the literal 10 unless
    /// `th2_gap_adjusted` is set.
    ConsecutiveRepresentable,
}

impl Th2Pairing {
    pub fn label(self) -> &'static str {
        match self {
            Th2Pairing::Literal10 => "literal",
            Th2Pairing::ConsecutiveRepresentable => "consecutive",
        }
    }
}

/// Which evaluated records a sweep persists. Counters always cover every
/// instance regardless of the filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RecordFilter {
    #[default]
    All,
    FailuresOnly,
}

/// Per-instance evaluation options, shared by sweeps and single-p
/// verification so both produce identical records.
#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub cases: Vec<ResidueCase>,
    pub claims: Vec<ClaimId>,
    pub th2_pairing: Th2Pairing,
    pub th2_gate_scope: Th2GateScope,
    pub th2_gap_adjusted: bool,
    pub dsearch_mode: RangeMode,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            cases: ResidueCase::ALL.to_vec(),
            claims: ClaimId::ALL.to_vec(),
            th2_pairing: Th2Pairing::default(),
            th2_gate_scope: Th2GateScope::default(),
            th2_gap_adjusted: false,
            dsearch_mode: RangeMode::SoundRange,
        }
    }
}

impl EvalOptions {
    fn th2_options(&self, scope: Th2GateScope) -> Th2Options {
        Th2Options {
            gate_scope: scope,
            gap_adjusted: self.th2_gap_adjusted,
        }
    }

    fn wants(&self, claim: ClaimId) -> bool {
        self.claims.contains(&claim)
    }
}

/// Verdict tallies for one claim. `total` counts every instance, including
/// the non-pairable ones that produce no record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClaimCounters {
    pub pass: u64,
    pub fail: u64,
    pub borderline: u64,
    pub not_applicable: u64,
    pub non_pairable: u64,
    pub total: u64,
}

impl ClaimCounters {
    fn add(&mut self, verdict: &Verdict) {
        match verdict {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::Borderline(_) => self.borderline += 1,
            Verdict::NotApplicable => self.not_applicable += 1,
        }
        self.total += 1;
    }

    fn add_non_pairable(&mut self) {
        self.non_pairable += 1;
        self.total += 1;
    }

    fn merge(&mut self, other: &ClaimCounters) {
        self.pass += other.pass;
        self.fail += other.fail;
        self.borderline += other.borderline;
        self.not_applicable += other.not_applicable;
        self.non_pairable += other.non_pairable;
        self.total += other.total;
    }

    /// Counters are consistent when the buckets account for every instance.
    pub fn is_consistent(&self) -> bool {
        self.pass + self.fail + self.borderline + self.not_applicable + self.non_pairable
            == self.total
    }
}

fn claim_index(claim: ClaimId) -> usize {
    ClaimId::ALL
        .iter()
        .position(|c| *c == claim)
        .expect("claim is one of the nine")
}

/// One counter slot per claim.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CounterSet {
    slots: [ClaimCounters; 9],
}

impl CounterSet {
    pub fn get(&self, claim: ClaimId) -> &ClaimCounters {
        &self.slots[claim_index(claim)]
    }

    fn get_mut(&mut self, claim: ClaimId) -> &mut ClaimCounters {
        &mut self.slots[claim_index(claim)]
    }

    fn merge(&mut self, other: &CounterSet) {
        for (mine, theirs) in self.slots.iter_mut().zip(other.slots.iter()) {
            mine.merge(theirs);
        }
    }

    /// The requested claims' counters keyed by claim label.
    pub fn to_map(&self, claims: &[ClaimId]) -> BTreeMap<String, ClaimCounters> {
        claims
            .iter()
            .map(|c| (c.label().to_string(), *self.get(*c)))
            .collect()
    }
}

/// Counts of discriminant-root classifications across d-search witnesses.
/// Field names mirror the nonconformity labels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FormTally {
    pub witnesses: u64,
    pub conforming: u64,
    pub zero_root: u64,
    pub missing_factor_5: u64,
    pub parity_mismatch: u64,
    pub extra_prime_factor: u64,
}

impl FormTally {
    pub fn add(&mut self, form: &DiscriminantForm) {
        self.witnesses += 1;
        match form {
            DiscriminantForm::PowerForm { .. } => self.conforming += 1,
            DiscriminantForm::NonConforming { reason } => match reason {
                NonConformity::ZeroRoot => self.zero_root += 1,
                NonConformity::MissingFive => self.missing_factor_5 += 1,
                NonConformity::ParityMismatch => self.parity_mismatch += 1,
                NonConformity::ExtraPrimeFactor => self.extra_prime_factor += 1,
            },
        }
    }

    fn merge(&mut self, other: &FormTally) {
        self.witnesses += other.witnesses;
        self.conforming += other.conforming;
        self.zero_root += other.zero_root;
        self.missing_factor_5 += other.missing_factor_5;
        self.parity_mismatch += other.parity_mismatch;
        self.extra_prime_factor += other.extra_prime_factor;
    }

    pub fn fraction_conforming(&self) -> f64 {
        if self.witnesses == 0 {
            1.0
        } else {
            self.conforming as f64 / self.witnesses as f64
        }
    }
}

/// Everything one p contributes: its records (in canonical order) plus the
/// tallies a sweep aggregates.
#[derive(Clone, Debug, Default)]
pub struct PEvaluation {
    pub records: Vec<CheckRecord>,
    pub counters: CounterSet,
    /// Step-pair tallies under both gate regimes, regardless of which one
    /// produced the records.
    pub th2_both_ends: ClaimCounters,
    pub th2_source_only: ClaimCounters,
    pub forms: FormTally,
}

struct CaseReps {
    by_case: [Vec<Representation>; 3],
}

impl CaseReps {
    fn of(p: u64) -> Result<CaseReps> {
        let mut by_case: [Vec<Representation>; 3] = Default::default();
        for rep in all_representations(p)? {
            let idx = ResidueCase::ALL
                .iter()
                .position(|c| *c == rep.case())
                .expect("known case");
            by_case[idx].push(rep);
        }
        Ok(CaseReps { by_case })
    }

    fn get(&self, case: ResidueCase) -> &[Representation] {
        let idx = ResidueCase::ALL
            .iter()
            .position(|c| *c == case)
            .expect("known case");
        &self.by_case[idx]
    }
}

/// The next case-representable value after p, with its representations;
/// gives up (None) past a fixed horizon.
fn next_representable(p: u64, case: ResidueCase) -> Result<Option<(u64, Vec<Representation>)>> {
    let mut q = p + 10;
    while q <= p + NEXT_REPRESENTABLE_HORIZON {
        let reps = oracle_representations(q, case)?;
        if !reps.is_empty() {
            return Ok(Some((q, reps)));
        }
        q += 10;
    }
    Ok(None)
}

/// Evaluate every requested claim on every instance at one p. Records come
/// out in canonical order (claim, then case, then representation/witness),
/// so a sweep's stream is reproducible instance by instance.
pub fn evaluate_p(p: u64, opts: &EvalOptions) -> Result<PEvaluation> {
    if p % 10 != 1 {
        return Err(Error::NotEndingInOne(p));
    }
    let reps = CaseReps::of(p)?;
    let mut ev = PEvaluation::default();

    let cases: Vec<ResidueCase> = ResidueCase::ALL
        .into_iter()
        .filter(|c| opts.cases.contains(c))
        .collect();

    for claim in ClaimId::ALL {
        if !opts.wants(claim) {
            continue;
        }
        match claim {
            ClaimId::Th1 => {
                for case in &cases {
                    for rep in reps.get(*case) {
                        push_rep_check(&mut ev, claim, check_th1(rep), rep);
                    }
                }
            }
            ClaimId::Obs2 => {
                for case in &cases {
                    for rep in reps.get(*case) {
                        push_rep_check(&mut ev, claim, check_obs2(rep), rep);
                    }
                }
            }
            ClaimId::Th2Final => {
                // One divisor scan of p + 10 serves all three cases.
                let far_literal = match opts.th2_pairing {
                    Th2Pairing::Literal10 => Some(CaseReps::of(p + 10)?),
                    Th2Pairing::ConsecutiveRepresentable => None,
                };
                for case in &cases {
                    let far = match &far_literal {
                        Some(far_reps) => {
                            let r = far_reps.get(*case);
                            (!r.is_empty()).then(|| (p + 10, r.to_vec()))
                        }
                        None => next_representable(p, *case)?,
                    };
                    evaluate_th2_case(reps.get(*case), far, opts, &mut ev)?;
                }
            }
            ClaimId::Th2Interior => {
                for case in &cases {
                    for rep in reps.get(*case) {
                        push_rep_check(&mut ev, claim, check_th2_interior(rep), rep);
                    }
                }
            }
            ClaimId::Th3Lower | ClaimId::Th3Ratio => {
                if !cases.contains(&ResidueCase::SevenThree) || !is_prime(p) {
                    continue;
                }
                for rep in oracle_representations(p + 10, ResidueCase::SevenThree)? {
                    let inst = Th3Instance::new(p, rep.a(), rep.b())?;
                    let [lower, ratio] = check_th3(&inst);
                    let check = if claim == ClaimId::Th3Lower {
                        lower
                    } else {
                        ratio
                    };
                    let witness = WitnessJson {
                        a: Some(rep.a()),
                        b: Some(rep.b()),
                        p2: Some(p + 10),
                        ..WitnessJson::default()
                    };
                    ev.counters.get_mut(claim).add(&check.verdict);
                    ev.records.push(CheckRecord::from_check(&check, witness));
                }
            }
            ClaimId::Th4A | ClaimId::Th4B => {
                if !cases.contains(&ResidueCase::SevenThree) {
                    continue;
                }
                for rep in reps.get(ResidueCase::SevenThree) {
                    let [a_check, b_check] = check_th4(rep)?;
                    let check = if claim == ClaimId::Th4A { a_check } else { b_check };
                    push_rep_check(&mut ev, claim, check, rep);
                }
            }
            ClaimId::CorRange => {
                for case in &cases {
                    for w in dsearch_representations(p, *case, opts.dsearch_mode)? {
                        let check = check_cor_range(&w);
                        let witness = WitnessJson {
                            a: Some(w.rep.a()),
                            b: Some(w.rep.b()),
                            d: Some(w.d),
                            s: Some(w.s),
                            form: Some(w.form.to_string()),
                            ..WitnessJson::default()
                        };
                        ev.counters.get_mut(claim).add(&check.verdict);
                        ev.forms.add(&w.form);
                        ev.records.push(CheckRecord::from_check(&check, witness));
                    }
                }
            }
        }
    }
    Ok(ev)
}

fn push_rep_check(ev: &mut PEvaluation, claim: ClaimId, check: BoundCheck, rep: &Representation) {
    ev.counters.get_mut(claim).add(&check.verdict);
    ev.records
        .push(CheckRecord::from_check(&check, WitnessJson::for_rep(rep)));
}

fn evaluate_th2_case(
    source_reps: &[Representation],
    far: Option<(u64, Vec<Representation>)>,
    opts: &EvalOptions,
    ev: &mut PEvaluation,
) -> Result<()> {
    if source_reps.is_empty() {
        return Ok(());
    }
    let Some((p2, far_reps)) = far else {
        for _ in source_reps {
            ev.counters.get_mut(ClaimId::Th2Final).add_non_pairable();
            ev.th2_both_ends.add_non_pairable();
            ev.th2_source_only.add_non_pairable();
        }
        return Ok(());
    };
    for rep in source_reps {
        for far_rep in &far_reps {
            let pair = Th2Pair::new(*rep, *far_rep)?;
            let both = check_th2(&pair, opts.th2_options(Th2GateScope::BothEnds));
            let source = check_th2(&pair, opts.th2_options(Th2GateScope::SourceOnly));
            ev.th2_both_ends.add(&both.verdict);
            ev.th2_source_only.add(&source.verdict);
            let primary = match opts.th2_gate_scope {
                Th2GateScope::BothEnds => both,
                Th2GateScope::SourceOnly => source,
            };
            ev.counters.get_mut(ClaimId::Th2Final).add(&primary.verdict);
            let witness = WitnessJson {
                a: Some(rep.a()),
                b: Some(rep.b()),
                p2: Some(p2),
                a2: Some(far_rep.a()),
                b2: Some(far_rep.b()),
                ..WitnessJson::default()
            };
            ev.records.push(CheckRecord::from_check(&primary, witness));
        }
    }
    Ok(())
}

/// One factorization-method disagreement (a bug or a deliberately
/// truncated d-range).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MethodDisagreement {
    pub p: u64,
    pub case: String,
    pub detail: String,
}

/// Cross-method audit outcome.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MethodEquivalence {
    /// (p, case) pairs where at least one method found a representation.
    pub checked: u64,
    pub agree: u64,
    pub disagree: Vec<MethodDisagreement>,
}

impl MethodEquivalence {
    fn merge(&mut self, mut other: MethodEquivalence) {
        self.checked += other.checked;
        self.agree += other.agree;
        self.disagree.append(&mut other.disagree);
    }
}

fn rep_pairs(reps: &[Representation]) -> Vec<(u64, u64)> {
    let mut pairs: Vec<(u64, u64)> = reps.iter().map(|r| (r.a(), r.b())).collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Compare the oracle, the d-search, and (73 class) the λ-search on one p.
pub fn audit_methods_for_p(
    p: u64,
    cases: &[ResidueCase],
    mode: RangeMode,
) -> Result<MethodEquivalence> {
    let mut out = MethodEquivalence::default();
    let lambda_reps: Option<Vec<(u64, u64)>> = if cases.contains(&ResidueCase::SevenThree) {
        let reps: Vec<Representation> = lambda_representations(p)?
            .into_iter()
            .map(|w| w.rep)
            .collect();
        Some(rep_pairs(&reps))
    } else {
        None
    };
    for case in ResidueCase::ALL {
        if !cases.contains(&case) {
            continue;
        }
        let oracle = rep_pairs(&oracle_representations(p, case)?);
        let dsearch_reps: Vec<Representation> = dsearch_representations(p, case, mode)?
            .into_iter()
            .map(|w| w.rep)
            .collect();
        let dsearch = rep_pairs(&dsearch_reps);
        let lambda = match (case, &lambda_reps) {
            (ResidueCase::SevenThree, Some(l)) => Some(l),
            _ => None,
        };
        let any_found =
            !oracle.is_empty() || !dsearch.is_empty() || lambda.is_some_and(|l| !l.is_empty());
        if !any_found {
            continue;
        }
        out.checked += 1;
        let lambda_ok = lambda.map(|l| *l == oracle).unwrap_or(true);
        if oracle == dsearch && lambda_ok {
            out.agree += 1;
        } else {
            let mut detail = format!("oracle {oracle:?} vs dsearch {dsearch:?}");
            if let Some(l) = lambda {
                detail.push_str(&format!(" vs lambda {l:?}"));
            }
            out.disagree.push(MethodDisagreement {
                p,
                case: case.label().to_string(),
                detail,
            });
        }
    }
    Ok(out)
}

/// Full sweep configuration. `eval` carries the per-instance options so a
/// sweep and a single-p verification share one evaluation path.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub lo: u64,
    pub hi: u64,
    pub eval: EvalOptions,
    /// 0 = use the global thread pool; otherwise a dedicated pool.
    pub workers: usize,
    pub output_path: Option<PathBuf>,
    pub record_filter: RecordFilter,
    /// Cross-check oracle/d-search/λ on every p. Off for large ranges: the
    /// sound d-search costs Θ(p) per value.
    pub audit_methods: bool,
    pub max_limit: u64,
}

impl SweepConfig {
    pub fn new(lo: u64, hi: u64) -> SweepConfig {
        SweepConfig {
            lo,
            hi,
            eval: EvalOptions::default(),
            workers: 0,
            output_path: None,
            record_filter: RecordFilter::default(),
            audit_methods: true,
            max_limit: DEFAULT_MAX_LIMIT,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::InvalidConfig(format!(
                "empty range: lo {} > hi {}",
                self.lo, self.hi
            )));
        }
        if self.max_limit > HARD_MAX_LIMIT {
            return Err(Error::InvalidConfig(format!(
                "max limit {} exceeds the hard ceiling {HARD_MAX_LIMIT}",
                self.max_limit
            )));
        }
        if self.hi > self.max_limit {
            return Err(Error::LimitExceeded {
                limit: self.hi,
                max: self.max_limit,
            });
        }
        if self.eval.cases.is_empty() {
            return Err(Error::InvalidConfig("no cases selected".to_string()));
        }
        if self.eval.claims.is_empty() {
            return Err(Error::InvalidConfig("no claims selected".to_string()));
        }
        Ok(())
    }
}

/// Step-pair tallies under both gate regimes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Th2Regimes {
    pub both_ends: ClaimCounters,
    pub source_only: ClaimCounters,
}

/// Witness-form tallies plus the headline conformance fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FormReport {
    #[serde(flatten)]
    pub counts: FormTally,
    pub fraction_conforming: f64,
}

/// Sweep outcome: per-claim tallies, the counterexample list, method
/// equivalence, both step-gate regimes, per-case monotonicity, and where
/// the full record stream went.
#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    /// First value actually evaluated (lo rounded up to ≡ 1 mod 10).
    pub lo: u64,
    pub hi: u64,
    pub cases: Vec<String>,
    pub claims: Vec<String>,
    pub th2_pairing: String,
    pub th2_gate_scope: String,
    pub dsearch_mode: String,
    pub counters: BTreeMap<String, ClaimCounters>,
    pub counterexamples: Vec<CheckRecord>,
    pub method_equivalence: Option<MethodEquivalence>,
    pub th2_regimes: Option<Th2Regimes>,
    pub monotonicity: Option<Vec<MonotonicityReport>>,
    pub forms: Option<FormReport>,
    pub records_written: u64,
    pub output_path: Option<String>,
    pub elapsed_seconds: f64,
}

#[derive(Default)]
struct ChunkOutcome {
    records: Vec<CheckRecord>,
    counterexamples: Vec<CheckRecord>,
    counters: CounterSet,
    th2_both_ends: ClaimCounters,
    th2_source_only: ClaimCounters,
    forms: FormTally,
    method: MethodEquivalence,
}

fn first_value_at_or_above(lo: u64) -> u64 {
    let lo = lo.max(1);
    match lo % 10 {
        0 => lo + 1,
        1 => lo,
        r => lo + 11 - r,
    }
}

fn process_chunk(start: u64, count: u64, cfg: &SweepConfig) -> Result<ChunkOutcome> {
    let mut chunk = ChunkOutcome::default();
    for i in 0..count {
        let p = start + i * 10;
        let ev = evaluate_p(p, &cfg.eval)?;
        chunk.counters.merge(&ev.counters);
        chunk.th2_both_ends.merge(&ev.th2_both_ends);
        chunk.th2_source_only.merge(&ev.th2_source_only);
        chunk.forms.merge(&ev.forms);
        for rec in ev.records {
            let is_cex = rec.is_counterexample();
            if is_cex {
                chunk.counterexamples.push(rec.clone());
            }
            match cfg.record_filter {
                RecordFilter::All => chunk.records.push(rec),
                RecordFilter::FailuresOnly => {
                    if is_cex {
                        chunk.records.push(rec);
                    }
                }
            }
        }
        if cfg.audit_methods {
            chunk
                .method
                .merge(audit_methods_for_p(p, &cfg.eval.cases, cfg.eval.dsearch_mode)?);
        }
    }
    Ok(chunk)
}

/// Run a full range campaign. Deterministic for a fixed config: the record
/// stream and every tally are independent of `workers`.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let started = Instant::now();
    let first = first_value_at_or_above(cfg.lo);
    let total_values = if first > cfg.hi {
        0
    } else {
        (cfg.hi - first) / 10 + 1
    };
    let n_chunks = total_values.div_ceil(CHUNK_P_VALUES);

    let run = || -> Result<Vec<ChunkOutcome>> {
        (0..n_chunks)
            .into_par_iter()
            .map(|k| {
                let start = first + k * CHUNK_P_VALUES * 10;
                let count = CHUNK_P_VALUES.min(total_values - k * CHUNK_P_VALUES);
                process_chunk(start, count, cfg)
            })
            .collect()
    };
    let chunks = if cfg.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
        pool.install(run)?
    } else {
        run()?
    };

    let mut records: Vec<CheckRecord> = Vec::new();
    let mut counterexamples: Vec<CheckRecord> = Vec::new();
    let mut counters = CounterSet::default();
    let mut th2_both = ClaimCounters::default();
    let mut th2_source = ClaimCounters::default();
    let mut forms = FormTally::default();
    let mut method = MethodEquivalence::default();
    for chunk in chunks {
        records.extend(chunk.records);
        counterexamples.extend(chunk.counterexamples);
        counters.merge(&chunk.counters);
        th2_both.merge(&chunk.th2_both_ends);
        th2_source.merge(&chunk.th2_source_only);
        forms.merge(&chunk.forms);
        method.merge(chunk.method);
    }

    let records_written = if let Some(path) = &cfg.output_path {
        write_jsonl(path, &records)?;
        records.len() as u64
    } else {
        0
    };

    let th2_requested = cfg.eval.wants(ClaimId::Th2Final);
    let monotonicity = if (th2_requested || cfg.eval.wants(ClaimId::Th2Interior)) && cfg.hi >= 100 {
        let mut reports = Vec::new();
        for case in ResidueCase::ALL {
            if cfg.eval.cases.contains(&case) {
                reports.push(monotonicity_study(case, cfg.hi)?);
            }
        }
        Some(reports)
    } else {
        None
    };

    Ok(SweepReport {
        lo: first,
        hi: cfg.hi,
        cases: cfg.eval.cases.iter().map(|c| c.label().to_string()).collect(),
        claims: cfg.eval.claims.iter().map(|c| c.label().to_string()).collect(),
        th2_pairing: cfg.eval.th2_pairing.label().to_string(),
        th2_gate_scope: cfg.eval.th2_gate_scope.label().to_string(),
        dsearch_mode: cfg.eval.dsearch_mode.label().to_string(),
        counters: counters.to_map(&cfg.eval.claims),
        counterexamples,
        method_equivalence: cfg.audit_methods.then_some(method),
        th2_regimes: th2_requested.then_some(Th2Regimes {
            both_ends: th2_both,
            source_only: th2_source,
        }),
        monotonicity,
        forms: cfg.eval.wants(ClaimId::CorRange).then(|| FormReport {
            counts: forms,
            fraction_conforming: forms.fraction_conforming(),
        }),
        records_written,
        output_path: cfg
            .output_path
            .as_ref()
            .map(|p| p.display().to_string()),
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Adjacent-step statistics for one product sequence.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MonotonicityVariant {
    pub pairs: u64,
    pub increases: u64,
    pub ties: u64,
    pub decreases: u64,
    pub fraction_increasing: f64,
    pub fraction_nondecreasing: f64,
    /// Exact count of decreases; `violations` keeps only the first few.
    pub violations_total: u64,
    pub violations: Vec<MonotonicityViolation>,
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub p_prev: u64,
    pub ab_prev: u64,
    pub p_next: u64,
    pub ab_next: u64,
}

/// Does the shifted product AB grow with p? Measured three ways: the
/// per-p maximum, the per-p minimum, and the raw per-representation
/// sequence ordered by (p, AB).
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct MonotonicityReport {
    pub case: String,
    pub limit: u64,
    pub representable: u64,
    pub max_ab: MonotonicityVariant,
    pub min_ab: MonotonicityVariant,
    pub per_representation: MonotonicityVariant,
}

/// Every (p, AB) instance with p ≤ limit, by direct product enumeration —
/// an enumeration path independent of the per-p oracle. Sorted by (p, AB).
fn generate_instances(case: ResidueCase, limit: u64) -> Vec<(u64, u64)> {
    let m = case.m();
    let n = case.n();
    let mut out: Vec<(u64, u64)> = Vec::new();
    let mut f1 = m;
    loop {
        let f2_start = if case.is_symmetric() { f1 } else { n };
        if f1 * f2_start > limit {
            break;
        }
        let mut f2 = f2_start;
        while f1 * f2 <= limit {
            let ab = ((f1 - m) / 10 + 1) * ((f2 - n) / 10 + 1);
            out.push((f1 * f2, ab));
            f2 += 10;
        }
        f1 += 10;
    }
    out.sort_unstable();
    out
}

fn variant_over(seq: &[(u64, u64)]) -> MonotonicityVariant {
    let mut v = MonotonicityVariant {
        pairs: 0,
        increases: 0,
        ties: 0,
        decreases: 0,
        fraction_increasing: 1.0,
        fraction_nondecreasing: 1.0,
        violations_total: 0,
        violations: Vec::new(),
    };
    for w in seq.windows(2) {
        let (p_prev, ab_prev) = w[0];
        let (p_next, ab_next) = w[1];
        v.pairs += 1;
        match ab_next.cmp(&ab_prev) {
            std::cmp::Ordering::Greater => v.increases += 1,
            std::cmp::Ordering::Equal => v.ties += 1,
            std::cmp::Ordering::Less => {
                v.decreases += 1;
                if v.violations.len() < VIOLATION_SAMPLE {
                    v.violations.push(MonotonicityViolation {
                        p_prev,
                        ab_prev,
                        p_next,
                        ab_next,
                    });
                }
            }
        }
    }
    v.violations_total = v.decreases;
    if v.pairs > 0 {
        v.fraction_increasing = v.increases as f64 / v.pairs as f64;
        v.fraction_nondecreasing = (v.increases + v.ties) as f64 / v.pairs as f64;
    }
    v
}

/// Audit the premise that the shifted products form an increasing sequence
/// over representable p.
pub fn monotonicity_study(case: ResidueCase, limit: u64) -> Result<MonotonicityReport> {
    if limit < 100 {
        return Err(Error::InvalidConfig(format!(
            "monotonicity study needs limit ≥ 100, got {limit}"
        )));
    }
    let instances = generate_instances(case, limit);
    let mut max_seq: Vec<(u64, u64)> = Vec::new();
    let mut min_seq: Vec<(u64, u64)> = Vec::new();
    for &(p, ab) in &instances {
        match max_seq.last_mut() {
            Some((last_p, last_ab)) if *last_p == p => {
                // instances are (p, AB)-sorted: the run's last AB is the max
                *last_ab = ab;
            }
            _ => {
                max_seq.push((p, ab));
                min_seq.push((p, ab));
            }
        }
    }
    Ok(MonotonicityReport {
        case: case.label().to_string(),
        limit,
        representable: max_seq.len() as u64,
        max_ab: variant_over(&max_seq),
        min_ab: variant_over(&min_seq),
        per_representation: variant_over(&instances),
    })
}

/// Serialize records one JSON object per line.
pub fn write_jsonl(path: &Path, records: &[CheckRecord]) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    for rec in records {
        let line = serde_json::to_string(rec)
            .map_err(|e| io_err(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))?;
        w.write_all(line.as_bytes()).map_err(io_err)?;
        w.write_all(b"\n").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Parse a record-per-line file; blank lines are ignored, anything else
/// malformed is reported with its 1-based line number.
pub fn read_jsonl(path: &Path) -> Result<Vec<CheckRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: CheckRecord = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        records.push(rec);
    }
    Ok(records)
}

/// Outcome of re-running a persisted record's check.
#[derive(Clone, Debug)]
pub struct Reverified {
    pub matches: bool,
    /// First differing field, when any.
    pub mismatch: Option<String>,
    pub recomputed: CheckRecord,
}

fn witness_field(rec: &CheckRecord, name: &str, value: Option<u64>) -> Result<u64> {
    value.ok_or_else(|| {
        Error::InvalidInstance(format!(
            "{} record for p = {} is missing witness field {name}",
            rec.claim, rec.p
        ))
    })
}

fn first_difference(old: &CheckRecord, new: &CheckRecord) -> Option<String> {
    let fields = [
        ("applicable", old.applicable.to_string(), new.applicable.to_string()),
        ("gate", old.gate.clone(), new.gate.clone()),
        ("verdict", old.verdict.clone(), new.verdict.clone()),
        ("lhs", old.lhs.clone(), new.lhs.clone()),
        ("mid", old.mid.clone(), new.mid.clone()),
        ("rhs", old.rhs.clone(), new.rhs.clone()),
        ("exact", old.exact.to_string(), new.exact.to_string()),
    ];
    for (name, was, now) in fields {
        if was != now {
            return Some(format!("{name}: recorded {was:?}, recomputed {now:?}"));
        }
    }
    if old.witness != new.witness {
        return Some(format!(
            "witness: recorded {:?}, recomputed {:?}",
            old.witness, new.witness
        ));
    }
    None
}

/// Re-run the check a record came from and compare everything but the
/// claim/p/case identity. `th2` must match the original run's step-pair
/// options for step records to reproduce.
pub fn reverify_record(rec: &CheckRecord, th2: Th2Options) -> Result<Reverified> {
    let claim = ClaimId::from_label(&rec.claim)
        .ok_or_else(|| Error::InvalidInstance(format!("unknown claim label {:?}", rec.claim)))?;
    let case = ResidueCase::from_label(&rec.case)
        .ok_or_else(|| Error::InvalidInstance(format!("unknown case label {:?}", rec.case)))?;
    let w = &rec.witness;
    let a = witness_field(rec, "a", w.a)?;
    let b = witness_field(rec, "b", w.b)?;

    let recomputed = match claim {
        ClaimId::Th1 | ClaimId::Obs2 | ClaimId::Th2Interior | ClaimId::Th4A | ClaimId::Th4B => {
            let rep = Representation::new(case, rec.p, a, b)?;
            let check = match claim {
                ClaimId::Th1 => check_th1(&rep),
                ClaimId::Obs2 => check_obs2(&rep),
                ClaimId::Th2Interior => check_th2_interior(&rep),
                ClaimId::Th4A => check_th4(&rep)?[0].clone(),
                _ => check_th4(&rep)?[1].clone(),
            };
            CheckRecord::from_check(&check, w.clone())
        }
        ClaimId::Th2Final => {
            let p2 = witness_field(rec, "p2", w.p2)?;
            let a2 = witness_field(rec, "a2", w.a2)?;
            let b2 = witness_field(rec, "b2", w.b2)?;
            let pair = Th2Pair::new(
                Representation::new(case, rec.p, a, b)?,
                Representation::new(case, p2, a2, b2)?,
            )?;
            CheckRecord::from_check(&check_th2(&pair, th2), w.clone())
        }
        ClaimId::Th3Lower | ClaimId::Th3Ratio => {
            let inst = Th3Instance::new(rec.p, a, b)?;
            let [lower, ratio] = check_th3(&inst);
            let check = if claim == ClaimId::Th3Lower { lower } else { ratio };
            CheckRecord::from_check(&check, w.clone())
        }
        ClaimId::CorRange => {
            let rep = Representation::new(case, rec.p, a, b)?;
            let witness = crate::factor::DSearchWitness::from_representation(&rep);
            let mut recomputed_w = w.clone();
            recomputed_w.d = Some(witness.d);
            recomputed_w.s = Some(witness.s);
            recomputed_w.form = Some(witness.form.to_string());
            CheckRecord::from_check(&check_cor_range(&witness), recomputed_w)
        }
    };

    let mismatch = first_difference(rec, &recomputed);
    Ok(Reverified {
        matches: mismatch.is_none(),
        mismatch,
        recomputed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn case_only(case: ResidueCase) -> EvalOptions {
        EvalOptions {
            cases: vec![case],
            ..EvalOptions::default()
        }
    }

    #[test]
    fn record_json_schema_is_frozen() {
        let rep = Representation::new(ResidueCase::SevenThree, 2701, 3, 7).unwrap();
        let rec = CheckRecord::from_check(&check_th1(&rep), WitnessJson::for_rep(&rep));
        let json = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            json,
            "{\"claim\":\"th1\",\"p\":2701,\"case\":\"73\",\"applicable\":true,\
             \"gate\":\"\",\"verdict\":\"pass\",\"lhs\":\"2701/100\",\"mid\":\"32\",\
             \"rhs\":\"326821/10000\",\"exact\":true,\"witness\":{\"a\":3,\"b\":7,\
             \"p2\":null,\"a2\":null,\"b2\":null,\"d\":null,\"s\":null,\"form\":null}}"
        );
        let back: CheckRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn evaluate_smallest_value() {
        let ev = evaluate_p(21, &case_only(ResidueCase::SevenThree)).unwrap();
        let c = |claim| *ev.counters.get(claim);
        assert_eq!(c(ClaimId::Th1).not_applicable, 1);
        assert_eq!(c(ClaimId::Obs2).pass, 1);
        // 31 is prime: the step pair cannot be formed.
        assert_eq!(c(ClaimId::Th2Final).non_pairable, 1);
        assert_eq!(c(ClaimId::Th2Interior).not_applicable, 1);
        // 21 is not prime: no shifted-root instances.
        assert_eq!(c(ClaimId::Th3Lower).total, 0);
        assert_eq!(c(ClaimId::Th4A).not_applicable, 1);
        assert_eq!(c(ClaimId::Th4B).not_applicable, 1);
        assert_eq!(c(ClaimId::CorRange).not_applicable, 1);
        // th1, obs2, th2i, th4a, th4b, cor — one record each; th2 none.
        assert_eq!(ev.records.len(), 6);
        assert!(ev.records.iter().all(|r| !r.is_counterexample()));
        // The d = 0 witness root s = 20 conforms (one 5, two 2s).
        assert_eq!(ev.forms.witnesses, 1);
        assert_eq!(ev.forms.conforming, 1);
        for claim in ClaimId::ALL {
            assert!(c(claim).is_consistent(), "{claim}");
        }
    }

    #[test]
    fn evaluate_shifted_root_instances() {
        let ev = evaluate_p(41, &case_only(ResidueCase::SevenThree)).unwrap();
        let th3: Vec<&CheckRecord> = ev
            .records
            .iter()
            .filter(|r| r.claim == "th3l" || r.claim == "th3r")
            .collect();
        assert_eq!(th3.len(), 2);
        for rec in th3 {
            assert_eq!(rec.witness.p2, Some(51));
            assert_eq!(rec.witness.a, Some(1));
            assert_eq!(rec.witness.b, Some(0));
            assert_eq!(rec.verdict, "na");
        }
    }

    #[test]
    fn evaluate_rejects_wrong_ending() {
        assert!(matches!(
            evaluate_p(42, &EvalOptions::default()),
            Err(Error::NotEndingInOne(42))
        ));
    }

    #[test]
    fn sweep_smallest_value_matches_expected_counts() {
        let mut cfg = SweepConfig::new(21, 21);
        cfg.eval.cases = vec![ResidueCase::SevenThree];
        let report = sweep(&cfg).unwrap();
        assert_eq!(report.counters["th1"].not_applicable, 1);
        assert_eq!(report.counters["obs2"].pass, 1);
        assert_eq!(report.counters["th2"].non_pairable, 1);
        assert!(report.counterexamples.is_empty());
        let meq = report.method_equivalence.as_ref().unwrap();
        assert_eq!((meq.checked, meq.agree), (1, 1));
        assert!(meq.disagree.is_empty());
        let regimes = report.th2_regimes.unwrap();
        assert_eq!(regimes.both_ends.non_pairable, 1);
        assert_eq!(regimes.source_only.non_pairable, 1);
        // hi < 100: the monotonicity study is skipped.
        assert!(report.monotonicity.is_none());
        let forms = report.forms.unwrap();
        assert_eq!(forms.counts.witnesses, 1);
        assert_eq!(forms.fraction_conforming, 1.0);
    }

    #[test]
    fn sweep_step_pair_gate_regimes() {
        // 215821 = 307·703 = 37·5833 → reps (30, 70) and (3, 583);
        // 215831 = 7·30833 = 77·2803 → reps (0, 3083) and (7, 280).
        // Only (30, 70) meets the source thresholds, and no far rep does:
        // under both-ends gating everything is NA; under source-only
        // gating the two (30, 70) pairs are applicable and both fail.
        let mut cfg = SweepConfig::new(215_821, 215_821);
        cfg.eval.cases = vec![ResidueCase::SevenThree];
        cfg.eval.claims = vec![ClaimId::Th2Final];
        cfg.eval.th2_gate_scope = Th2GateScope::SourceOnly;
        cfg.audit_methods = false;
        let report = sweep(&cfg).unwrap();
        let regimes = report.th2_regimes.unwrap();
        assert_eq!(regimes.both_ends.not_applicable, 4);
        assert_eq!(regimes.both_ends.fail, 0);
        assert_eq!(regimes.source_only.fail, 2);
        assert_eq!(regimes.source_only.not_applicable, 2);
        assert_eq!(report.counters["th2"], regimes.source_only);
        assert_eq!(report.counterexamples.len(), 2);
        let mids: Vec<&str> = report
            .counterexamples
            .iter()
            .map(|r| r.mid.as_str())
            .collect();
        assert_eq!(mids, ["3084/2201", "2248/2201"]);
    }

    #[test]
    fn sweep_records_filtered_to_failures() {
        let mut cfg = SweepConfig::new(215_821, 215_821);
        cfg.eval.cases = vec![ResidueCase::SevenThree];
        cfg.eval.claims = vec![ClaimId::Th2Final];
        cfg.eval.th2_gate_scope = Th2GateScope::SourceOnly;
        cfg.audit_methods = false;
        cfg.record_filter = RecordFilter::FailuresOnly;
        let dir = tempdir().unwrap();
        let path = dir.path().join("fails.jsonl");
        cfg.output_path = Some(path.clone());
        let report = sweep(&cfg).unwrap();
        assert_eq!(report.records_written, 2);
        let records = read_jsonl(&path).unwrap();
        assert_eq!(records, report.counterexamples);
    }

    #[test]
    fn sweep_is_deterministic_across_worker_counts() {
        let dir = tempdir().unwrap();
        let mut outputs = Vec::new();
        for workers in [1usize, 3] {
            let mut cfg = SweepConfig::new(1, 250_001);
            cfg.eval.claims = vec![ClaimId::Th1, ClaimId::Obs2];
            cfg.audit_methods = false;
            cfg.workers = workers;
            let path = dir.path().join(format!("w{workers}.jsonl"));
            cfg.output_path = Some(path.clone());
            let report = sweep(&cfg).unwrap();
            assert!(report.counterexamples.is_empty());
            outputs.push(fs::read(&path).unwrap());
        }
        assert!(!outputs[0].is_empty());
        assert_eq!(outputs[0], outputs[1]);
    }

    #[test]
    fn sweep_non_pairable_dominates_at_small_scale() {
        let mut cfg = SweepConfig::new(1, 20_001);
        cfg.eval.cases = vec![ResidueCase::SevenThree];
        cfg.eval.claims = vec![ClaimId::Th2Final];
        cfg.audit_methods = false;
        let report = sweep(&cfg).unwrap();
        let counters = report.counters["th2"];
        assert!(counters.non_pairable > 0);
        assert!(counters.is_consistent());
    }

    #[test]
    fn sweep_counters_stay_consistent() {
        let mut cfg = SweepConfig::new(1, 10_001);
        cfg.audit_methods = true;
        let report = sweep(&cfg).unwrap();
        for (claim, counters) in &report.counters {
            assert!(counters.is_consistent(), "{claim}: {counters:?}");
        }
        assert_eq!(report.counters["th1"].fail, 0);
        assert_eq!(report.counters["obs2"].fail, 0);
        assert_eq!(report.counters["th4a"].fail, 0);
        let meq = report.method_equivalence.as_ref().unwrap();
        assert!(meq.disagree.is_empty());
        assert_eq!(meq.checked, meq.agree);
        // Monotonicity attached: step claims were swept and hi ≥ 100.
        assert_eq!(report.monotonicity.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn method_audit_multi_representation_value() {
        let meq =
            audit_methods_for_p(1001, &ResidueCase::ALL, RangeMode::SoundRange).unwrap();
        // 1001 = 7·143 = 77·13 (73 class) and 11·91 (11 class).
        assert_eq!(meq.checked, 2);
        assert_eq!(meq.agree, 2);
        assert!(meq.disagree.is_empty());
    }

    #[test]
    fn method_audit_flags_truncated_range() {
        // The printed interval for 1311 excludes its true d values, so the
        // paper-mode d-search finds nothing where the oracle finds two reps.
        let meq =
            audit_methods_for_p(1311, &[ResidueCase::SevenThree], RangeMode::PaperRange).unwrap();
        assert_eq!(meq.checked, 1);
        assert_eq!(meq.agree, 0);
        assert_eq!(meq.disagree.len(), 1);
        assert!(meq.disagree[0].detail.contains("oracle"));
    }

    #[test]
    fn monotonicity_enumeration_matches_oracle() {
        for case in ResidueCase::ALL {
            let generated = generate_instances(case, 20_001);
            let mut expected: Vec<(u64, u64)> = Vec::new();
            for p in (1u64..=20_001).step_by(10) {
                for rep in oracle_representations(p, case).unwrap() {
                    expected.push((p, rep.cap_a() * rep.cap_b()));
                }
            }
            expected.sort_unstable();
            assert_eq!(generated, expected, "{case:?}");
        }
    }

    #[test]
    fn monotonicity_study_basics() {
        let report = monotonicity_study(ResidueCase::SevenThree, 2000).unwrap();
        // 21·11 = 231 = 7·33 → rep (0, 3) with AB = 4.
        assert!(generate_instances(ResidueCase::SevenThree, 2000).contains(&(231, 4)));
        assert!(report.representable > 10);
        assert_eq!(
            report.max_ab.increases + report.max_ab.ties + report.max_ab.decreases,
            report.max_ab.pairs
        );

        // The 11 class covers every p ≡ 1 (mod 10) via the (0, ·) rep, whose
        // product (p+9)/10 dominates — so the max sequence is strictly
        // increasing, while the min and raw sequences drop at every p with
        // a balanced split (e.g. 111 → 121 = 11² goes 12 → 4).
        let report = monotonicity_study(ResidueCase::OneOne, 100_000).unwrap();
        assert_eq!(report.representable, 10_000);
        assert_eq!(report.max_ab.decreases, 0);
        assert_eq!(report.max_ab.fraction_increasing, 1.0);
        assert!(report.min_ab.fraction_increasing < 1.0);
        assert!(report.min_ab.violations_total > 0);
        assert!(!report.min_ab.violations.is_empty());
        assert!(report.per_representation.fraction_increasing < 1.0);
    }

    #[test]
    fn monotonicity_study_vacuous_and_invalid() {
        // Only 81 = 9·9 is 99-class representable below 100.
        let report = monotonicity_study(ResidueCase::NineNine, 100).unwrap();
        assert_eq!(report.representable, 1);
        assert_eq!(report.max_ab.pairs, 0);
        assert_eq!(report.max_ab.fraction_increasing, 1.0);
        assert!(monotonicity_study(ResidueCase::NineNine, 99).is_err());
    }

    #[test]
    fn jsonl_round_trips() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("records.jsonl");

        write_jsonl(&path, &[]).unwrap();
        assert!(read_jsonl(&path).unwrap().is_empty());

        let mut records = Vec::new();
        for p in [21u64, 41, 1001, 2701, 25471] {
            records.extend(evaluate_p(p, &EvalOptions::default()).unwrap().records);
        }
        write_jsonl(&path, &records).unwrap();
        assert_eq!(read_jsonl(&path).unwrap(), records);
    }

    #[test]
    fn jsonl_reports_malformed_line() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        let rec = &evaluate_p(21, &case_only(ResidueCase::SevenThree)).unwrap().records[0];
        let good = serde_json::to_string(rec).unwrap();
        fs::write(&path, format!("{good}\n{{\"claim\": oops\n{good}\n")).unwrap();
        match read_jsonl(&path) {
            Err(Error::MalformedRecord { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed-record error, got {other:?}"),
        }
    }

    #[test]
    fn records_reverify() {
        for p in [21u64, 41, 1001, 2701, 25471, 215_821] {
            let ev = evaluate_p(p, &EvalOptions::default()).unwrap();
            for rec in &ev.records {
                let outcome = reverify_record(rec, Th2Options::default()).unwrap();
                assert!(
                    outcome.matches,
                    "p={p} {}: {:?}",
                    rec.claim, outcome.mismatch
                );
            }
        }
    }

    #[test]
    fn reverify_detects_tampering() {
        let ev = evaluate_p(2701, &case_only(ResidueCase::SevenThree)).unwrap();
        let mut rec = ev.records[0].clone();
        assert_eq!(rec.claim, "th1");
        rec.mid = "33".to_string();
        let outcome = reverify_record(&rec, Th2Options::default()).unwrap();
        assert!(!outcome.matches);
        assert!(outcome.mismatch.unwrap().contains("mid"));
    }

    #[test]
    fn reverify_needs_witness_fields() {
        let ev = evaluate_p(2701, &case_only(ResidueCase::SevenThree)).unwrap();
        let mut rec = ev.records[0].clone();
        rec.witness.a = None;
        assert!(reverify_record(&rec, Th2Options::default()).is_err());
    }

    #[test]
    fn step_pair_records_use_source_scope_consistently() {
        // A source-only sweep's failure records must reverify under the
        // same gate scope.
        let mut cfg = SweepConfig::new(215_821, 215_821);
        cfg.eval.cases = vec![ResidueCase::SevenThree];
        cfg.eval.claims = vec![ClaimId::Th2Final];
        cfg.eval.th2_gate_scope = Th2GateScope::SourceOnly;
        cfg.audit_methods = false;
        let report = sweep(&cfg).unwrap();
        let th2 = Th2Options {
            gate_scope: Th2GateScope::SourceOnly,
            gap_adjusted: false,
        };
        for rec in &report.counterexamples {
            assert!(reverify_record(rec, th2).unwrap().matches);
        }
        // Under the other scope the gate differs, so the reverify mismatches.
        let other = reverify_record(&report.counterexamples[0], Th2Options::default()).unwrap();
        assert!(!other.matches);
    }
}
