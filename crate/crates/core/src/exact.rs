//! Exact integer and rational primitives.
//!
//! Everything a verdict depends on is computed without rounding: integer
//! square roots and perfect-square detection are pure integer algorithms,
//! and [`ExactRatio`] comparisons cross-multiply into 256 bits so they can
//! never overflow. The one place real analysis is unavoidable — bounds of
//! the shape `e^c · q^c'` — is handled by [`compare_log_bound`], which works
//! in the log domain with double-double (~31 significant digits) arithmetic
//! and refuses to pick a side when the difference is within a certified
//! margin, returning [`Verdict::Borderline`] instead.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Absolute log-domain margin below which a comparison is not decided.
///
/// The double-double evaluation error for the expressions used here is below
/// 1e-25 (a few hundred operations on magnitudes under 1e3, ~1e-31 relative
/// error each), so any difference larger than this margin is decided
/// correctly with room to spare.
pub const LOG_MARGIN: f64 = 1e-12;

/// Floor of the square root.
#[inline]
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

/// `Some(r)` with `r*r == n` when `n` is a perfect square.
#[inline]
pub fn is_perfect_square(n: u64) -> Option<u64> {
    if !square_residue_mod64(n) {
        return None;
    }
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// Quick rejection filter: squares only land on 12 of the 64 residues mod 64.
#[inline]
pub(crate) fn square_residue_mod64(n: u64) -> bool {
    const MASK: u64 = {
        let mut m = 0u64;
        let mut i = 0u64;
        while i < 64 {
            m |= 1 << ((i * i) & 63);
            i += 1;
        }
        m
    };
    MASK >> (n & 63) & 1 == 1
}

pub(crate) fn is_perfect_square_u128(n: u128) -> Option<u128> {
    if !square_residue_mod64(n as u64) {
        return None;
    }
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// A rational number in lowest terms with a positive denominator.
///
/// Arithmetic is checked `i128`; comparison widens to 256 bits, so ordering
/// is exact for any representable operands.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactRatio {
    num: i128,
    den: i128,
}

impl ExactRatio {
    pub const ONE: ExactRatio = ExactRatio { num: 1, den: 1 };
    pub const ZERO: ExactRatio = ExactRatio { num: 0, den: 1 };

    /// Reduced ratio `num/den`. Panics if `den == 0`.
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den != 0, "ExactRatio denominator must be nonzero");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs());
        if g <= 1 {
            return ExactRatio { num, den };
        }
        ExactRatio {
            num: num / g as i128,
            den: den / g as i128,
        }
    }

    pub fn from_int(n: i128) -> Self {
        ExactRatio { num: n, den: 1 }
    }

    pub fn from_u64(n: u64) -> Self {
        ExactRatio::from_int(n as i128)
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn add(&self, other: &ExactRatio) -> ExactRatio {
        let num = self
            .num
            .checked_mul(other.den)
            .and_then(|l| other.num.checked_mul(self.den).and_then(|r| l.checked_add(r)))
            .expect("ratio addition overflow");
        ExactRatio::new(num, self.den.checked_mul(other.den).expect("ratio addition overflow"))
    }

    pub fn sub(&self, other: &ExactRatio) -> ExactRatio {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &ExactRatio) -> ExactRatio {
        // Cross-reduce first so intermediate products stay small.
        let g1 = gcd_u128(self.num.unsigned_abs(), other.den.unsigned_abs()).max(1) as i128;
        let g2 = gcd_u128(other.num.unsigned_abs(), self.den.unsigned_abs()).max(1) as i128;
        let num = (self.num / g1)
            .checked_mul(other.num / g2)
            .expect("ratio multiplication overflow");
        let den = (self.den / g2)
            .checked_mul(other.den / g1)
            .expect("ratio multiplication overflow");
        ExactRatio::new(num, den)
    }

    pub fn neg(&self) -> ExactRatio {
        ExactRatio {
            num: -self.num,
            den: self.den,
        }
    }

    /// Nearest-double approximation; only used for rendering, never verdicts.
    pub fn to_f64(&self) -> f64 {
        dd::from_i128(self.num).div(dd::from_i128(self.den)).to_f64()
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactRatio({self})")
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        // Compare num1·den2 with num2·den1 in 256-bit magnitude space.
        let sign1 = self.num.signum();
        let sign2 = other.num.signum();
        if sign1 != sign2 {
            return sign1.cmp(&sign2);
        }
        if sign1 == 0 {
            return Ordering::Equal;
        }
        let lhs = mul_wide(self.num.unsigned_abs(), other.den.unsigned_abs());
        let rhs = mul_wide(other.num.unsigned_abs(), self.den.unsigned_abs());
        if sign1 > 0 {
            lhs.cmp(&rhs)
        } else {
            rhs.cmp(&lhs)
        }
    }
}

/// Exact three-way comparison of two ratios.
#[inline]
pub fn compare_exact(lhs: &ExactRatio, rhs: &ExactRatio) -> Ordering {
    lhs.cmp(rhs)
}

/// Full 256-bit product of two u128s as `(high, low)`.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = (1 << 64) - 1;
    let (a1, a0) = (a >> 64, a & MASK);
    let (b1, b0) = (b >> 64, b & MASK);
    let ll = a0 * b0;
    let lh = a0 * b1;
    let hl = a1 * b0;
    let hh = a1 * b1;
    let carry = ((ll >> 64) + (lh & MASK) + (hl & MASK)) >> 64;
    let low = ll.wrapping_add(lh << 64).wrapping_add(hl << 64);
    let high = hh + (lh >> 64) + (hl >> 64) + carry;
    (high, low)
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Outcome of a bound check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    /// The log-domain difference was within [`LOG_MARGIN`]; the payload is
    /// the estimated |difference|.
    Borderline(f64),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "na",
            Verdict::Borderline(_) => "borderline",
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Fail | Verdict::Borderline(_))
    }
}

/// One addend of a log-domain bound expression.
#[derive(Clone, Debug, PartialEq)]
pub enum LogTerm {
    /// The rational constant `c`.
    Const(ExactRatio),
    /// `coeff · ln(arg)`, `arg > 0`.
    Ln { coeff: ExactRatio, arg: ExactRatio },
    /// `coeff · √radicand / radicand`.
    SqrtOver { coeff: ExactRatio, radicand: u64 },
}

/// A finite sum of [`LogTerm`]s, evaluated in double-double precision.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LogExpr {
    pub terms: Vec<LogTerm>,
}

impl LogExpr {
    pub fn new(terms: Vec<LogTerm>) -> Self {
        LogExpr { terms }
    }

    fn eval_dd(&self) -> dd::Dd {
        let mut acc = dd::Dd::ZERO;
        for term in &self.terms {
            let v = match term {
                LogTerm::Const(c) => dd::from_ratio(c.num, c.den),
                LogTerm::Ln { coeff, arg } => {
                    assert!(arg.is_positive(), "ln argument must be positive");
                    dd::from_ratio(coeff.num, coeff.den).mul(dd::ln_ratio(arg.num, arg.den))
                }
                LogTerm::SqrtOver { coeff, radicand } => dd::from_ratio(coeff.num, coeff.den)
                    .mul(dd::sqrt_u64(*radicand))
                    .div(dd::from_i128(*radicand as i128)),
            };
            acc = acc.add(v);
        }
        acc
    }

    /// Double approximation of the sum (for rendering).
    pub fn approx(&self) -> f64 {
        self.eval_dd().to_f64()
    }

    /// Double approximation of `e^(sum)` (for rendering linear-domain sides).
    pub fn exp_approx(&self) -> f64 {
        self.approx().exp()
    }
}

/// Decide `lhs ≤ e^(rhs_log)` in the log domain.
///
/// Computes `ln(lhs) − rhs_log` in double-double precision. Differences with
/// magnitude above [`LOG_MARGIN`] give `Pass`/`Fail`; anything closer is
/// reported as `Borderline` rather than silently rounded into a verdict.
/// Errors if `lhs ≤ 0`.
pub fn compare_log_bound(lhs: &ExactRatio, rhs_log: &LogExpr) -> Result<Verdict> {
    if !lhs.is_positive() {
        return Err(Error::NonPositiveLhs(lhs.to_string()));
    }
    let diff = dd::ln_ratio(lhs.num, lhs.den).sub(rhs_log.eval_dd());
    Ok(if diff.hi() < -LOG_MARGIN {
        Verdict::Pass
    } else if diff.hi() > LOG_MARGIN {
        Verdict::Fail
    } else {
        Verdict::Borderline(diff.to_f64().abs())
    })
}

/// Double-double arithmetic: an unevaluated sum `hi + lo` of two doubles,
/// giving ~106 bits of significand. The algorithms are the classic
/// error-free transformations (TwoSum, TwoProd via FMA) plus accurate
/// add/mul/div compositions.
pub(crate) mod dd {
    #[derive(Clone, Copy, Debug)]
    pub struct Dd {
        hi: f64,
        lo: f64,
    }

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    /// Requires |a| >= |b|.
    #[inline]
    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    #[inline]
    fn two_prod(a: f64, b: f64) -> (f64, f64) {
        let p = a * b;
        (p, a.mul_add(b, -p))
    }

    impl Dd {
        pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
        pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
        /// ln(2) split into two doubles.
        const LN2: Dd = Dd {
            hi: 0.6931471805599453,
            lo: 2.3190468138462996e-17,
        };

        pub fn hi(self) -> f64 {
            self.hi
        }

        pub fn to_f64(self) -> f64 {
            self.hi + self.lo
        }

        pub fn from_f64(x: f64) -> Dd {
            Dd { hi: x, lo: 0.0 }
        }

        pub fn add(self, o: Dd) -> Dd {
            let (s1, s2) = two_sum(self.hi, o.hi);
            let (t1, t2) = two_sum(self.lo, o.lo);
            let (s1, s2) = quick_two_sum(s1, s2 + t1);
            let (hi, lo) = quick_two_sum(s1, s2 + t2);
            Dd { hi, lo }
        }

        pub fn sub(self, o: Dd) -> Dd {
            self.add(Dd {
                hi: -o.hi,
                lo: -o.lo,
            })
        }

        pub fn mul(self, o: Dd) -> Dd {
            let (p1, p2) = two_prod(self.hi, o.hi);
            let (hi, lo) = quick_two_sum(p1, p2 + self.hi * o.lo + self.lo * o.hi);
            Dd { hi, lo }
        }

        pub fn div(self, o: Dd) -> Dd {
            let q1 = self.hi / o.hi;
            let r = self.sub(o.mul(Dd::from_f64(q1)));
            let q2 = r.hi / o.hi;
            let r = r.sub(o.mul(Dd::from_f64(q2)));
            let q3 = r.hi / o.hi;
            let (hi, lo) = quick_two_sum(q1, q2);
            Dd { hi, lo }.add(Dd::from_f64(q3))
        }

        /// Exact scaling by a power of two.
        fn mul_pow2(self, f: f64) -> Dd {
            Dd {
                hi: self.hi * f,
                lo: self.lo * f,
            }
        }

        /// Natural log of a positive normal value.
        pub fn ln(self) -> Dd {
            debug_assert!(self.hi > 0.0 && self.hi.is_normal());
            // Scale to m = self·2^(−e) with m.hi in [1, 2), then fold the top
            // half of the interval down so |z| ≤ √2 − 1 and the atanh series
            // converges in ~25 terms.
            let mut e = ((self.hi.to_bits() >> 52) & 0x7ff) as i32 - 1023;
            let mut m = self.mul_pow2(2f64.powi(-e));
            if m.hi >= std::f64::consts::SQRT_2 {
                m = m.mul_pow2(0.5);
                e += 1;
            }
            let z = m.sub(Dd::ONE).div(m.add(Dd::ONE));
            let z2 = z.mul(z);
            let mut term = z;
            let mut sum = z;
            let mut k = 3u32;
            loop {
                term = term.mul(z2);
                let contrib = term.div(Dd::from_f64(k as f64));
                sum = sum.add(contrib);
                if contrib.hi.abs() < 1e-35 || k > 199 {
                    break;
                }
                k += 2;
            }
            sum.mul_pow2(2.0).add(Dd::LN2.mul(Dd::from_f64(e as f64)))
        }
    }

    /// Exact-to-dd conversion for i128 magnitudes below ~2^106.
    pub fn from_i128(x: i128) -> Dd {
        let hi = x as f64;
        let rem = x - hi as i128;
        let lo = rem as f64;
        let (h, l) = quick_two_sum(hi, lo);
        Dd { hi: h, lo: l }
    }

    pub fn from_ratio(num: i128, den: i128) -> Dd {
        from_i128(num).div(from_i128(den))
    }

    /// ln(num/den) for positive num, den.
    pub fn ln_ratio(num: i128, den: i128) -> Dd {
        debug_assert!(num > 0 && den > 0);
        from_ratio(num, den).ln()
    }

    /// √n to double-double accuracy (two Newton refinements of the f64 seed).
    pub fn sqrt_u64(n: u64) -> Dd {
        if n == 0 {
            return Dd::ZERO;
        }
        let nd = from_i128(n as i128);
        let mut x = Dd::from_f64((n as f64).sqrt());
        for _ in 0..2 {
            let residue = nd.sub(x.mul(x));
            x = x.add(residue.div(x.mul_pow2(2.0)));
        }
        x
    }
}
