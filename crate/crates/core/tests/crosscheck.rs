//! Independent cross-checks: the library's oracle, sieve, and exact
//! verdicts are re-derived here with deliberately naive reference code and
//! arbitrary-precision rationals.

mod support;

use std::cmp::Ordering;

use dcf_core::harness::{evaluate_p, EvalOptions};
use dcf_core::primes::{is_prime, sieve_primes, transition_matrix_below, SieveOptions};
use dcf_core::factor::oracle_representations;
use dcf_core::repr::ResidueCase;
use num::BigRational;
use support::{brute_case_reps, naive_primes, parse_ratio};

#[test]
fn oracle_matches_literal_divisor_scan() {
    for p in (1u64..=30_001).step_by(10) {
        for case in ResidueCase::ALL {
            let ours: Vec<(u64, u64)> = oracle_representations(p, case)
                .unwrap()
                .iter()
                .map(|r| (r.a(), r.b()))
                .collect();
            assert_eq!(ours, brute_case_reps(p, case), "p = {p}, {case:?}");
        }
    }
}

#[test]
fn segmented_sieve_matches_trial_division() {
    let limit = 100_000;
    assert_eq!(sieve_primes(limit).unwrap(), naive_primes(limit));

    // Tiny segments force many segment boundaries through the same range.
    let opts = SieveOptions {
        segment_odds: 64,
        ..SieveOptions::default()
    };
    assert_eq!(
        dcf_core::primes::sieve_primes_with(7919, opts).unwrap(),
        naive_primes(7919)
    );
}

#[test]
fn millerrabin_agrees_with_trial_division() {
    for n in 0..2_000u64 {
        let reference = n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0);
        assert_eq!(is_prime(n), reference, "n = {n}");
    }
    // Strong-pseudoprime bait for weak witness sets.
    for n in [3_215_031_751u64, 3_474_749_660_383, 341_550_071_728_321] {
        assert!(!is_prime(n), "{n} is composite");
    }
}

#[test]
fn transition_counts_match_naive_recount() {
    let limit = 50_000;
    let matrix = transition_matrix_below(limit, SieveOptions::default()).unwrap();
    let primes: Vec<u64> = naive_primes(limit).into_iter().filter(|&p| p > 5).collect();
    let idx = |p: u64| match p % 10 {
        1 => 0usize,
        3 => 1,
        7 => 2,
        9 => 3,
        _ => unreachable!("primes > 5"),
    };
    let mut counts = [[0u64; 4]; 4];
    for w in primes.windows(2) {
        counts[idx(w[0])][idx(w[1])] += 1;
    }
    assert_eq!(matrix.counts, counts);
    assert_eq!(matrix.total, (primes.len() - 1) as u64);
    assert_eq!(matrix.last_prime, *primes.last().unwrap());
}

#[test]
fn exact_verdicts_match_bigint_rationals() {
    let big = |pair: (i128, i128)| BigRational::new(pair.0.into(), pair.1.into());
    let mut audited = 0;
    for p in [21u64, 441, 1311, 2701, 8281, 215_821, 793_881, 811_801] {
        for rec in evaluate_p(p, &EvalOptions::default()).unwrap().records {
            // Only fully exact three-sided comparisons can be re-decided here.
            if !rec.exact || !rec.applicable {
                continue;
            }
            let lhs = big(parse_ratio(&rec.lhs));
            let mid = big(parse_ratio(&rec.mid));
            let rhs = big(parse_ratio(&rec.rhs));
            let holds = lhs <= mid && mid <= rhs;
            match rec.verdict.as_str() {
                "pass" => assert!(holds, "{} p={p}: {rec:?}", rec.claim),
                "fail" => assert!(!holds, "{} p={p}: {rec:?}", rec.claim),
                other => panic!("exact applicable record with verdict {other}"),
            }
            audited += 1;
        }
    }
    assert!(audited > 10, "audited only {audited} records");
}

#[test]
fn rendered_sides_parse_and_order_sanely() {
    for p in (1u64..=5_001).step_by(10) {
        for rec in evaluate_p(p, &EvalOptions::default()).unwrap().records {
            if !rec.exact {
                continue;
            }
            let lhs = parse_ratio(&rec.lhs);
            let rhs = parse_ratio(&rec.rhs);
            // Exact claims here all have nonnegative sides and a
            // lower bound that never exceeds the upper bound.
            assert!(lhs.0 >= 0 && rhs.0 >= 0, "{rec:?}");
            if rec.verdict == "pass" {
                assert_ne!(
                    support::ratio_cmp(lhs, rhs),
                    Ordering::Greater,
                    "{rec:?}"
                );
            }
        }
    }
}
