//! Digit-class factorization toolkit for naturals ending in 1.
//!
//! A number p ≡ 1 (mod 10) with a nontrivial odd factorization splits, by
//! last digits, into one of three shapes: (10a+7)(10b+3), (10a+9)(10b+9),
//! or (10a+1)(10b+1). This crate factors into those shapes by three
//! independent methods (divisor scan, discriminant d-search, λ
//! parametrization), checks a family of product and ratio bounds on the
//! shifted factors A = a+1 and B = b+1 with exact rational arithmetic and
//! certified log-domain comparison, sweeps ranges for counterexamples with
//! deterministic worker-count-independent output, and tallies last-digit
//! transition statistics of consecutive primes.

pub mod checks;
pub mod error;
pub mod exact;
pub mod factor;
pub mod harness;
pub mod primes;
pub mod repr;

pub use checks::{
    check_cor_range, check_obs2, check_th1, check_th2, check_th2_interior, check_th3, check_th4,
    BoundCheck, ClaimId, SideValue, Th2GateScope, Th2Options, Th2Pair, Th3Instance,
};
pub use error::{Error, Result};
pub use exact::{compare_log_bound, ExactRatio, LogExpr, LogTerm, Verdict};
pub use factor::{
    all_representations, dsearch_representations, lambda_representations, oracle_representations,
    d_bounds, DRange, DSearchWitness, DiscriminantForm, LambdaWitness, NonConformity, RangeMode,
};
pub use harness::{
    audit_methods_for_p, evaluate_p, monotonicity_study, read_jsonl, reverify_record, sweep,
    write_jsonl, CheckRecord, ClaimCounters, CounterSet, EvalOptions, MonotonicityReport,
    PEvaluation, RecordFilter, Reverified, SweepConfig, SweepReport, Th2Pairing, WitnessJson,
    DEFAULT_MAX_LIMIT, HARD_MAX_LIMIT,
};
pub use primes::{
    is_prime, scan_primes_until, scan_primes_with, sieve_primes, transition_matrix,
    transition_matrix_below, SieveOptions, TransitionMatrix,
};
pub use repr::{Representation, ResidueCase};
