//! Prime generation and the last-digit transition statistic.
//!
//! The sieve is a segmented odd-only Eratosthenes: memory stays bounded by
//! the segment size regardless of the limit, so scans to 1e9 are cheap on
//! memory. Primality of individual values uses deterministic Miller–Rabin
//! witnesses, valid for all u64.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// Tuning knobs for the segmented sieve.
#[derive(Clone, Copy, Debug)]
pub struct SieveOptions {
    /// Odd numbers per segment; each segment costs `segment_odds` bytes.
    pub segment_odds: usize,
    /// Hard cap on the sieve ceiling, to catch runaway requests early.
    pub max_limit: u64,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            segment_odds: 1 << 20,
            max_limit: 1_000_000_000,
        }
    }
}

/// All primes ≤ `limit`, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>> {
    sieve_primes_with(limit, SieveOptions::default())
}

pub fn sieve_primes_with(limit: u64, opts: SieveOptions) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    scan_primes_with(limit, opts, |p| out.push(p))?;
    Ok(out)
}

/// Stream primes ≤ `limit` into `visit`, ascending, without storing them.
pub fn scan_primes_with(limit: u64, opts: SieveOptions, mut visit: impl FnMut(u64)) -> Result<()> {
    scan_primes_until(limit, opts, |p| {
        visit(p);
        ControlFlow::Continue(())
    })
}

/// Like [`scan_primes_with`], but the visitor may stop the scan early.
pub fn scan_primes_until(
    limit: u64,
    opts: SieveOptions,
    mut visit: impl FnMut(u64) -> ControlFlow<()>,
) -> Result<()> {
    if limit > opts.max_limit {
        return Err(Error::LimitExceeded {
            limit,
            max: opts.max_limit,
        });
    }
    if limit < 2 {
        return Ok(());
    }
    if visit(2).is_break() || limit < 3 {
        return Ok(());
    }

    // Base primes up to √limit by a plain odd-only sieve.
    let root = limit.isqrt() as usize;
    let base_odds = root / 2 + 1; // flags for 1, 3, 5, …, covering all odds ≤ root
    let mut base = vec![true; base_odds];
    base[0] = false; // 1
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= root {
        if base[i] {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < base_odds {
                base[j] = false;
                j += p;
            }
        }
        i += 1;
    }
    let base_primes: Vec<usize> = (1..base_odds)
        .filter(|&i| base[i])
        .map(|i| 2 * i + 1)
        .collect();

    let seg_odds = opts.segment_odds.max(1 << 10);
    let mut seg = vec![true; seg_odds];
    // Each segment covers the odd values in [low, high).
    let mut low: u64 = 3;
    while low <= limit {
        let high = low
            .saturating_add(2 * seg_odds as u64)
            .min(limit.saturating_add(2));
        let span = ((high - low) / 2) as usize;
        let flags = &mut seg[..span];
        flags.fill(true);
        for &p in &base_primes {
            let p64 = p as u64;
            let mut start = p64 * p64;
            if start >= high {
                break;
            }
            if start < low {
                let rem = low % p64;
                start = if rem == 0 { low } else { low + p64 - rem };
                if start % 2 == 0 {
                    start += p64;
                }
            }
            let mut j = ((start - low) / 2) as usize;
            while j < span {
                flags[j] = false;
                j += p;
            }
        }
        for (j, &alive) in flags.iter().enumerate() {
            if alive {
                let value = low + 2 * j as u64;
                if value <= limit && visit(value).is_break() {
                    return Ok(());
                }
            }
        }
        low = high;
    }
    Ok(())
}

/// Deterministic primality for any u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // These twelve witnesses are deterministic for all n < 3.3·10²⁴ ⊇ u64.
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Counts of consecutive-prime last-digit transitions among primes > 5.
///
/// Primes beyond 5 end in 1, 3, 7, or 9; `counts[i][j]` counts consecutive
/// pairs whose last digits are `DIGITS[i]` then `DIGITS[j]`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct TransitionMatrix {
    pub counts: [[u64; 4]; 4],
    /// Number of consecutive pairs tallied (sum of all 16 counts).
    pub total: u64,
    /// The largest prime visited (0 when none).
    pub last_prime: u64,
}

impl TransitionMatrix {
    pub const DIGITS: [u8; 4] = [1, 3, 7, 9];

    fn digit_index(p: u64) -> Option<usize> {
        match p % 10 {
            1 => Some(0),
            3 => Some(1),
            7 => Some(2),
            9 => Some(3),
            _ => None,
        }
    }

    fn require_index(digit: u8) -> usize {
        Self::DIGITS
            .iter()
            .position(|&d| d == digit)
            .expect("digit in {1,3,7,9}")
    }

    pub fn count(&self, from: u8, to: u8) -> u64 {
        self.counts[Self::require_index(from)][Self::require_index(to)]
    }

    /// Fraction of transitions out of `from` that land on `to`.
    pub fn fraction(&self, from: u8, to: u8) -> f64 {
        let row: u64 = self.counts[Self::require_index(from)].iter().sum();
        if row == 0 {
            return 0.0;
        }
        self.count(from, to) as f64 / row as f64
    }
}

struct TransitionTally {
    counts: [[u64; 4]; 4],
    total: u64,
    prev: Option<usize>,
    last_prime: u64,
    seen: u64,
}

impl TransitionTally {
    fn new() -> Self {
        TransitionTally {
            counts: [[0; 4]; 4],
            total: 0,
            prev: None,
            last_prime: 0,
            seen: 0,
        }
    }

    fn push(&mut self, p: u64) {
        if p <= 5 {
            return;
        }
        let idx = TransitionMatrix::digit_index(p).expect("primes > 5 end in 1, 3, 7, or 9");
        if let Some(prev_idx) = self.prev {
            self.counts[prev_idx][idx] += 1;
            self.total += 1;
        }
        self.prev = Some(idx);
        self.last_prime = p;
        self.seen += 1;
    }

    fn finish(self) -> TransitionMatrix {
        TransitionMatrix {
            counts: self.counts,
            total: self.total,
            last_prime: self.last_prime,
        }
    }
}

/// Tally last-digit transitions over the first `prime_count` primes
/// greater than 5.
///
/// The sieve ceiling is estimated from the usual `n(ln n + ln ln n)` bound
/// on the nth prime; the scan stops as soon as enough primes were seen.
pub fn transition_matrix(prime_count: u64, opts: SieveOptions) -> Result<TransitionMatrix> {
    if prime_count < 2 {
        return Err(Error::InvalidConfig(format!(
            "transition statistic needs at least 2 primes, got {prime_count}"
        )));
    }
    // +3 skips 2, 3, 5, which fall outside the four digit classes.
    let limit = nth_prime_upper_bound(prime_count + 3);
    let mut tally = TransitionTally::new();
    scan_primes_until(limit, opts, |p| {
        tally.push(p);
        if tally.seen >= prime_count {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    debug_assert_eq!(tally.seen, prime_count, "upper bound must cover the range");
    Ok(tally.finish())
}

/// Tally last-digit transitions over all consecutive primes in (5, limit].
pub fn transition_matrix_below(limit: u64, opts: SieveOptions) -> Result<TransitionMatrix> {
    let mut tally = TransitionTally::new();
    scan_primes_with(limit, opts, |p| tally.push(p))?;
    Ok(tally.finish())
}

/// Upper bound on the nth prime (1-indexed), from the standard
/// `n(ln n + ln ln n)` estimate, valid for n ≥ 6; small n are table lookups.
pub fn nth_prime_upper_bound(n: u64) -> u64 {
    const SMALL: [u64; 6] = [0, 2, 3, 5, 7, 11];
    if n < 6 {
        return SMALL[n as usize];
    }
    let nf = n as f64;
    (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 1
}
