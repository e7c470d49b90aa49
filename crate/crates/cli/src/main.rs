//! `dcf` — factor naturals ending in 1 into digit-class forms, verify the
//! product/step/shift bounds on single values, sweep ranges for
//! counterexamples, and tally consecutive-prime last-digit statistics.
//!
//! Results go to standard output as JSON (or CSV for record streams); a
//! human-readable summary goes to standard error. Exit codes: 0 when every
//! verdict is Pass or NotApplicable, 1 when any Fail or Borderline was
//! produced, 2 on usage or i/o errors.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dcf_core::checks::{ClaimId, Th2GateScope};
use dcf_core::factor::{
    dsearch_representations, lambda_representations, oracle_representations, RangeMode,
};
use dcf_core::harness::{
    evaluate_p, sweep, CheckRecord, ClaimCounters, EvalOptions, RecordFilter, SweepConfig,
    Th2Pairing, DEFAULT_MAX_LIMIT, HARD_MAX_LIMIT,
};
use dcf_core::primes::{transition_matrix, transition_matrix_below, SieveOptions, TransitionMatrix};
use dcf_core::repr::ResidueCase;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "dcf",
    version,
    about = "Digit-class factorization and bound audits for naturals ending in 1"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor p into digit-class forms by one or all methods.
    Factor {
        /// Value to factor; must end in 1.
        p: u64,
        #[arg(long, value_enum, default_value_t = CaseArg::All)]
        case: CaseArg,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        /// d-search interval: the printed interval or the provably
        /// complete one.
        #[arg(long = "dsearch-range", value_enum, default_value_t = RangeArg::Sound)]
        dsearch_range: RangeArg,
    },
    /// Evaluate one claim group on a single value.
    Verify {
        /// Value to check; must end in 1.
        p: u64,
        #[arg(long, value_enum)]
        claim: ClaimArg,
        #[arg(long, value_enum, default_value_t = CaseArg::All)]
        case: CaseArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[command(flatten)]
        knobs: EvalKnobs,
    },
    /// Evaluate claims over a whole range and report counters,
    /// counterexamples, and audits.
    Sweep {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: u64,
        /// Comma-separated claim groups.
        #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
        claims: Vec<ClaimArg>,
        #[arg(long, value_enum, default_value_t = CaseArg::All)]
        case: CaseArg,
        /// Worker threads (default: one per CPU).
        #[arg(long)]
        jobs: Option<usize>,
        /// Stream every evaluated record to this JSONL file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep only Fail/Borderline records in --out.
        #[arg(long = "failures-only")]
        failures_only: bool,
        /// Cross-check oracle, d-search, and λ methods on every value
        /// (costly: the sound d-interval grows linearly with p).
        #[arg(long = "audit-methods")]
        audit_methods: bool,
        /// json: full report to stdout; csv: counterexample records only.
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
        #[command(flatten)]
        knobs: EvalKnobs,
    },
    /// Prime statistics.
    Stats {
        /// Tally the 4×4 last-digit transition matrix of consecutive primes.
        #[arg(long, required = true)]
        transition: bool,
        /// Use the first N primes greater than 5.
        #[arg(long, conflicts_with = "limit")]
        primes: Option<u64>,
        /// Use all primes up to this bound.
        #[arg(long)]
        limit: Option<u64>,
    },
}

/// Evaluation knobs shared by verify and sweep.
#[derive(Args)]
struct EvalKnobs {
    #[arg(long = "dsearch-range", value_enum, default_value_t = RangeArg::Sound)]
    dsearch_range: RangeArg,
    /// Step-pair selection: the literal p+10, or the next representable
    /// value in the same case.
    #[arg(long = "th2-pairing", value_enum, default_value_t = PairingArg::Literal)]
    th2_pairing: PairingArg,
    /// Step-pair gating: thresholds on both ends, or on the source only.
    #[arg(long = "th2-gate", value_enum, default_value_t = GateArg::Both)]
    th2_gate: GateArg,
    /// With consecutive pairing, replace the literal 10 in the bound's
    /// (1 + 10/p) factor by the actual gap.
    #[arg(long = "th2-gap-adjusted")]
    th2_gap_adjusted: bool,
}

impl EvalKnobs {
    fn apply(&self, opts: &mut EvalOptions) {
        opts.dsearch_mode = self.dsearch_range.into();
        opts.th2_pairing = match self.th2_pairing {
            PairingArg::Literal => Th2Pairing::Literal10,
            PairingArg::Consecutive => Th2Pairing::ConsecutiveRepresentable,
        };
        opts.th2_gate_scope = match self.th2_gate {
            GateArg::Both => Th2GateScope::BothEnds,
            GateArg::Source => Th2GateScope::SourceOnly,
        };
        opts.th2_gap_adjusted = self.th2_gap_adjusted;
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CaseArg {
    #[value(name = "73")]
    SevenThree,
    #[value(name = "99")]
    NineNine,
    #[value(name = "11")]
    OneOne,
    All,
}

impl CaseArg {
    fn cases(self) -> Vec<ResidueCase> {
        match self {
            CaseArg::SevenThree => vec![ResidueCase::SevenThree],
            CaseArg::NineNine => vec![ResidueCase::NineNine],
            CaseArg::OneOne => vec![ResidueCase::OneOne],
            CaseArg::All => ResidueCase::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Oracle,
    Dsearch,
    Lambda,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClaimArg {
    Th1,
    Obs2,
    Th2,
    Th2i,
    Th3,
    Th4,
    Cor,
    All,
}

impl ClaimArg {
    fn ids(self) -> &'static [ClaimId] {
        match self {
            ClaimArg::Th1 => &[ClaimId::Th1],
            ClaimArg::Obs2 => &[ClaimId::Obs2],
            ClaimArg::Th2 => &[ClaimId::Th2Final],
            ClaimArg::Th2i => &[ClaimId::Th2Interior],
            ClaimArg::Th3 => &[ClaimId::Th3Lower, ClaimId::Th3Ratio],
            ClaimArg::Th4 => &[ClaimId::Th4A, ClaimId::Th4B],
            ClaimArg::Cor => &[ClaimId::CorRange],
            ClaimArg::All => &ClaimId::ALL,
        }
    }
}

fn claim_ids(args: &[ClaimArg]) -> Vec<ClaimId> {
    let mut wanted: Vec<ClaimId> = args.iter().flat_map(|a| a.ids().iter().copied()).collect();
    wanted.sort_by_key(|c| ClaimId::ALL.iter().position(|x| x == c));
    wanted.dedup();
    wanted
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RangeArg {
    Paper,
    Sound,
}

impl From<RangeArg> for RangeMode {
    fn from(arg: RangeArg) -> RangeMode {
        match arg {
            RangeArg::Paper => RangeMode::PaperRange,
            RangeArg::Sound => RangeMode::SoundRange,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairingArg {
    Literal,
    Consecutive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GateArg {
    Both,
    Source,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(1),
        Ok(false) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether any Fail/Borderline verdict was produced.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let max_limit = max_limit_from_env()?;
    match cli.command {
        Command::Factor {
            p,
            case,
            method,
            dsearch_range,
        } => {
            ensure_in_range(p, max_limit)?;
            cmd_factor(p, case, method, dsearch_range.into())
        }
        Command::Verify {
            p,
            claim,
            case,
            format,
            knobs,
        } => {
            ensure_in_range(p, max_limit)?;
            cmd_verify(p, claim, case, format, &knobs)
        }
        Command::Sweep {
            from,
            to,
            claims,
            case,
            jobs,
            out,
            failures_only,
            audit_methods,
            format,
            knobs,
        } => {
            let mut cfg = SweepConfig::new(from, to);
            cfg.eval.cases = case.cases();
            cfg.eval.claims = claim_ids(&claims);
            knobs.apply(&mut cfg.eval);
            cfg.workers = jobs.unwrap_or(0);
            cfg.output_path = out;
            cfg.record_filter = if failures_only {
                RecordFilter::FailuresOnly
            } else {
                RecordFilter::All
            };
            cfg.audit_methods = audit_methods;
            cfg.max_limit = max_limit;
            cmd_sweep(&cfg, format)
        }
        Command::Stats {
            transition: _,
            primes,
            limit,
        } => cmd_stats(primes, limit, max_limit),
    }
}

/// The sweep/sieve ceiling: 10⁹ unless DCF_MAX_LIMIT overrides it (hard
/// cap where record integers would stop being exact in JSON).
fn max_limit_from_env() -> anyhow::Result<u64> {
    let Some(raw) = std::env::var_os("DCF_MAX_LIMIT") else {
        return Ok(DEFAULT_MAX_LIMIT);
    };
    let text = raw.to_string_lossy();
    let value: u64 = text
        .parse()
        .with_context(|| format!("DCF_MAX_LIMIT must be an integer, got {text:?}"))?;
    if value == 0 || value > HARD_MAX_LIMIT {
        bail!("DCF_MAX_LIMIT must be in [1, {HARD_MAX_LIMIT}], got {value}");
    }
    Ok(value)
}

fn ensure_in_range(p: u64, max_limit: u64) -> anyhow::Result<()> {
    if p > max_limit {
        bail!("p = {p} exceeds the configured maximum {max_limit} (set DCF_MAX_LIMIT to raise it)");
    }
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)?;
    stdout.write_all(b"\n")?;
    Ok(())
}

#[derive(Serialize)]
struct RepJson {
    a: u64,
    b: u64,
    factor1: u64,
    factor2: u64,
}

#[derive(Serialize)]
struct DsearchJson {
    d: u64,
    s: u64,
    form: String,
    a: u64,
    b: u64,
}

#[derive(Serialize)]
struct LambdaJson {
    lambda: u64,
    form: u8,
    a: u64,
    b: u64,
}

#[derive(Serialize)]
struct CaseFactors {
    case: String,
    oracle: Vec<RepJson>,
    dsearch: Vec<DsearchJson>,
    lambda: Vec<LambdaJson>,
    /// Requested methods found identical representation sets.
    agreement: bool,
}

#[derive(Serialize)]
struct FactorOutput {
    p: u64,
    methods: Vec<String>,
    dsearch_range: String,
    cases: Vec<CaseFactors>,
    agreement: bool,
}

fn cmd_factor(p: u64, case: CaseArg, method: MethodArg, mode: RangeMode) -> anyhow::Result<bool> {
    let want = |m: MethodArg| method == m || method == MethodArg::All;
    let mut out = FactorOutput {
        p,
        methods: [
            want(MethodArg::Oracle).then_some("oracle"),
            want(MethodArg::Dsearch).then_some("dsearch"),
            want(MethodArg::Lambda).then_some("lambda"),
        ]
        .into_iter()
        .flatten()
        .map(String::from)
        .collect(),
        dsearch_range: mode.label().to_string(),
        cases: Vec::new(),
        agreement: true,
    };
    for residue in case.cases() {
        let mut entry = CaseFactors {
            case: residue.label().to_string(),
            oracle: Vec::new(),
            dsearch: Vec::new(),
            lambda: Vec::new(),
            agreement: true,
        };
        if want(MethodArg::Oracle) {
            entry.oracle = oracle_representations(p, residue)?
                .iter()
                .map(|r| RepJson {
                    a: r.a(),
                    b: r.b(),
                    factor1: r.factor1(),
                    factor2: r.factor2(),
                })
                .collect();
        }
        if want(MethodArg::Dsearch) {
            entry.dsearch = dsearch_representations(p, residue, mode)?
                .iter()
                .map(|w| DsearchJson {
                    d: w.d,
                    s: w.s,
                    form: w.form.to_string(),
                    a: w.rep.a(),
                    b: w.rep.b(),
                })
                .collect();
        }
        if want(MethodArg::Lambda) && residue == ResidueCase::SevenThree {
            entry.lambda = lambda_representations(p)?
                .iter()
                .map(|w| LambdaJson {
                    lambda: w.lambda,
                    form: w.form_index,
                    a: w.rep.a(),
                    b: w.rep.b(),
                })
                .collect();
        }

        let mut sets: Vec<Vec<(u64, u64)>> = Vec::new();
        if want(MethodArg::Oracle) {
            sets.push(rep_set(entry.oracle.iter().map(|r| (r.a, r.b))));
        }
        if want(MethodArg::Dsearch) {
            sets.push(rep_set(entry.dsearch.iter().map(|w| (w.a, w.b))));
        }
        if want(MethodArg::Lambda) && residue == ResidueCase::SevenThree {
            sets.push(rep_set(entry.lambda.iter().map(|w| (w.a, w.b))));
        }
        entry.agreement = sets.windows(2).all(|w| w[0] == w[1]);
        out.agreement &= entry.agreement;

        eprintln!(
            "case {}: {} representation(s){}",
            entry.case,
            sets.first().map(|s| s.len()).unwrap_or(0),
            if entry.agreement { "" } else { " — METHODS DISAGREE" }
        );
        for (a, b) in sets.first().cloned().unwrap_or_default() {
            let m = residue.m();
            let n = residue.n();
            eprintln!("  {p} = {} × {} (a = {a}, b = {b})", 10 * a + m, 10 * b + n);
        }
        out.cases.push(entry);
    }
    print_json(&out)?;
    // Method disagreement is a finding, not a failed verdict.
    Ok(false)
}

fn rep_set(pairs: impl Iterator<Item = (u64, u64)>) -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> = pairs.collect();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Serialize)]
struct VerifyOutput {
    p: u64,
    claim: String,
    records: Vec<CheckRecord>,
    counters: BTreeMap<String, ClaimCounters>,
}

fn cmd_verify(
    p: u64,
    claim: ClaimArg,
    case: CaseArg,
    format: FormatArg,
    knobs: &EvalKnobs,
) -> anyhow::Result<bool> {
    let mut opts = EvalOptions {
        cases: case.cases(),
        claims: claim_ids(&[claim]),
        ..EvalOptions::default()
    };
    knobs.apply(&mut opts);
    let ev = evaluate_p(p, &opts)?;
    let counters = ev.counters.to_map(&opts.claims);
    let mut failures = 0u64;
    for c in counters.values() {
        failures += c.fail + c.borderline;
    }
    for rec in &ev.records {
        let note = if rec.gate.is_empty() {
            String::new()
        } else {
            format!(" [{}]", rec.gate)
        };
        eprintln!(
            "{} case {} p={}: {}{note}",
            rec.claim, rec.case, rec.p, rec.verdict
        );
    }
    let non_pairable: u64 = counters.values().map(|c| c.non_pairable).sum();
    if non_pairable > 0 {
        eprintln!("non-pairable step instances: {non_pairable}");
    }
    eprintln!(
        "{} record(s), {failures} failure(s)",
        ev.records.len()
    );
    match format {
        FormatArg::Json => print_json(&VerifyOutput {
            p,
            claim: claim_label(claim).to_string(),
            records: ev.records,
            counters,
        })?,
        FormatArg::Csv => write_csv(&ev.records)?,
    }
    Ok(failures > 0)
}

fn claim_label(claim: ClaimArg) -> &'static str {
    match claim {
        ClaimArg::Th1 => "th1",
        ClaimArg::Obs2 => "obs2",
        ClaimArg::Th2 => "th2",
        ClaimArg::Th2i => "th2i",
        ClaimArg::Th3 => "th3",
        ClaimArg::Th4 => "th4",
        ClaimArg::Cor => "cor",
        ClaimArg::All => "all",
    }
}

fn cmd_sweep(cfg: &SweepConfig, format: FormatArg) -> anyhow::Result<bool> {
    let report = sweep(cfg)?;
    let mut failures = 0u64;
    for (claim, counters) in &report.counters {
        failures += counters.fail + counters.borderline;
        eprintln!(
            "{claim}: pass {} fail {} borderline {} na {} non-pairable {} (total {})",
            counters.pass,
            counters.fail,
            counters.borderline,
            counters.not_applicable,
            counters.non_pairable,
            counters.total
        );
    }
    if let Some(meq) = &report.method_equivalence {
        eprintln!(
            "method audit: {} checked, {} disagreement(s)",
            meq.checked,
            meq.disagree.len()
        );
    }
    if let Some(path) = &report.output_path {
        eprintln!("{} record(s) -> {path}", report.records_written);
    }
    eprintln!(
        "swept [{}, {}] with {} counterexample(s) in {:.2}s",
        report.lo,
        report.hi,
        report.counterexamples.len(),
        report.elapsed_seconds
    );
    match format {
        FormatArg::Json => print_json(&report)?,
        FormatArg::Csv => write_csv(&report.counterexamples)?,
    }
    Ok(failures > 0)
}

/// Flatten records to CSV with columns in JSON key order; witness fields
/// are prefixed and empty when null.
fn write_csv(records: &[CheckRecord]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout().lock());
    w.write_record([
        "claim",
        "p",
        "case",
        "applicable",
        "gate",
        "verdict",
        "lhs",
        "mid",
        "rhs",
        "exact",
        "witness_a",
        "witness_b",
        "witness_p2",
        "witness_a2",
        "witness_b2",
        "witness_d",
        "witness_s",
        "witness_form",
    ])?;
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        w.write_record([
            r.claim.clone(),
            r.p.to_string(),
            r.case.clone(),
            r.applicable.to_string(),
            r.gate.clone(),
            r.verdict.clone(),
            r.lhs.clone(),
            r.mid.clone(),
            r.rhs.clone(),
            r.exact.to_string(),
            opt(r.witness.a),
            opt(r.witness.b),
            opt(r.witness.p2),
            opt(r.witness.a2),
            opt(r.witness.b2),
            opt(r.witness.d),
            opt(r.witness.s),
            r.witness.form.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct StatsOutput {
    primes: Option<u64>,
    limit: Option<u64>,
    digits: [u8; 4],
    matrix: TransitionMatrix,
    fractions: [[f64; 4]; 4],
}

fn cmd_stats(primes: Option<u64>, limit: Option<u64>, max_limit: u64) -> anyhow::Result<bool> {
    let opts = SieveOptions {
        max_limit,
        ..SieveOptions::default()
    };
    let matrix = match (primes, limit) {
        (Some(n), None) => transition_matrix(n, opts)?,
        (None, Some(bound)) => transition_matrix_below(bound, opts)?,
        _ => bail!("pass exactly one of --primes N or --limit N"),
    };
    let digits = TransitionMatrix::DIGITS;
    let mut fractions = [[0.0f64; 4]; 4];
    for (i, &from) in digits.iter().enumerate() {
        for (j, &to) in digits.iter().enumerate() {
            fractions[i][j] = matrix.fraction(from, to);
        }
    }
    eprintln!(
        "{} transition(s) among primes ≤ {}; repeat-digit fractions: 1→1 {:.4}, 3→3 {:.4}, 7→7 {:.4}, 9→9 {:.4}",
        matrix.total,
        matrix.last_prime,
        matrix.fraction(1, 1),
        matrix.fraction(3, 3),
        matrix.fraction(7, 7),
        matrix.fraction(9, 9),
    );
    print_json(&StatsOutput {
        primes,
        limit,
        digits,
        matrix,
        fractions,
    })?;
    Ok(false)
}
