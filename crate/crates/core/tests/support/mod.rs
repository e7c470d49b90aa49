//! Shared helpers for the integration suites: independent brute-force
//! reference implementations and rational parsing for persisted records.
//!
//! Each suite compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use std::cmp::Ordering;

use dcf_core::repr::ResidueCase;

/// Parse a rendered exact side ("num/den" or plain "num").
pub fn parse_ratio(s: &str) -> (i128, i128) {
    match s.split_once('/') {
        Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
        None => (s.parse().unwrap(), 1),
    }
}

/// Compare two parsed ratios with positive denominators.
pub fn ratio_cmp(a: (i128, i128), b: (i128, i128)) -> Ordering {
    assert!(a.1 > 0 && b.1 > 0);
    (a.0 * b.1).cmp(&(b.0 * a.1))
}

/// Literal reference factorizer: scan every a with 10a + m ≤ p, no square
/// root cutoff, no shared code with the library oracle.
pub fn brute_case_reps(p: u64, case: ResidueCase) -> Vec<(u64, u64)> {
    let (m, n) = (case.m(), case.n());
    let mut out = Vec::new();
    let mut f1 = m;
    while f1 <= p {
        if p % f1 == 0 {
            let f2 = p / f1;
            if f2 % 10 == n {
                let (mut a, mut b) = ((f1 - m) / 10, (f2 - n) / 10);
                if case.is_symmetric() && a > b {
                    std::mem::swap(&mut a, &mut b);
                }
                out.push((a, b));
            }
        }
        f1 += 10;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Trial-division prime list, independent of the segmented sieve.
pub fn naive_primes(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    'next: for n in 2..=limit {
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                continue 'next;
            }
            d += 1;
        }
        out.push(n);
    }
    out
}
