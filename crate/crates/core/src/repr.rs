//! Digit classes and validated factorizations.
//!
//! A natural ending in 1 factors as a product of two naturals whose last
//! digits are (7, 3), (9, 9), or (1, 1) — these are the only last-digit
//! pairs multiplying to a trailing 1. [`Representation`] stores such a
//! factorization by the tens parts `(a, b)` and never exists unless
//! `(10a + m)(10b + n) = p` actually holds.

use std::fmt;

use crate::error::{Error, Result};

/// The last-digit class of a factorization of a number ending in 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum ResidueCase {
    /// Factors ending in 7 and 3: `(10a + 7)(10b + 3)`.
    SevenThree,
    /// Both factors ending in 9: `(10a + 9)(10b + 9)`.
    NineNine,
    /// Both factors ending in 1: `(10a + 1)(10b + 1)`.
    OneOne,
}

impl ResidueCase {
    pub const ALL: [ResidueCase; 3] = [
        ResidueCase::SevenThree,
        ResidueCase::NineNine,
        ResidueCase::OneOne,
    ];

    /// Last digit of the first factor.
    pub fn m(self) -> u64 {
        match self {
            ResidueCase::SevenThree => 7,
            ResidueCase::NineNine => 9,
            ResidueCase::OneOne => 1,
        }
    }

    /// Last digit of the second factor.
    pub fn n(self) -> u64 {
        match self {
            ResidueCase::SevenThree => 3,
            ResidueCase::NineNine => 9,
            ResidueCase::OneOne => 1,
        }
    }

    /// Whether the two factor shapes coincide (so (a, b) and (b, a) describe
    /// the same factorization).
    pub fn is_symmetric(self) -> bool {
        !matches!(self, ResidueCase::SevenThree)
    }

    /// Digit-pair label used across the CLI: "73", "99", or "11".
    pub fn label(self) -> &'static str {
        match self {
            ResidueCase::SevenThree => "73",
            ResidueCase::NineNine => "99",
            ResidueCase::OneOne => "11",
        }
    }

    pub fn from_label(label: &str) -> Option<ResidueCase> {
        match label {
            "73" => Some(ResidueCase::SevenThree),
            "99" => Some(ResidueCase::NineNine),
            "11" => Some(ResidueCase::OneOne),
            _ => None,
        }
    }

    /// In the distance search for this class, the square to test is
    /// `(5d + shift)² − scale·p`.
    pub fn disc_shift(self) -> u64 {
        match self {
            ResidueCase::SevenThree => 29,
            ResidueCase::NineNine => 9,
            ResidueCase::OneOne => 1,
        }
    }

    pub fn disc_scale(self) -> u64 {
        match self {
            ResidueCase::SevenThree => 21,
            _ => 1,
        }
    }
}

impl fmt::Display for ResidueCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A verified factorization `p = (10a + m)(10b + n)` in a given class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Representation {
    case: ResidueCase,
    p: u64,
    a: u64,
    b: u64,
}

impl Representation {
    /// Validates the product identity; symmetric classes are normalized to
    /// `a ≤ b`.
    pub fn new(case: ResidueCase, p: u64, a: u64, b: u64) -> Result<Representation> {
        if p % 10 != 1 {
            return Err(Error::NotEndingInOne(p));
        }
        let (a, b) = if case.is_symmetric() && a > b {
            (b, a)
        } else {
            (a, b)
        };
        let f1 = 10 * a as u128 + case.m() as u128;
        let f2 = 10 * b as u128 + case.n() as u128;
        if f1 * f2 != p as u128 {
            return Err(Error::InvalidInstance(format!(
                "({f1})({f2}) = {} ≠ {p}",
                f1 * f2
            )));
        }
        Ok(Representation { case, p, a, b })
    }

    pub fn case(&self) -> ResidueCase {
        self.case
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// First factor, `10a + m`.
    pub fn factor1(&self) -> u64 {
        10 * self.a + self.case.m()
    }

    /// Second factor, `10b + n`.
    pub fn factor2(&self) -> u64 {
        10 * self.b + self.case.n()
    }

    /// `A = a + 1`.
    pub fn cap_a(&self) -> u64 {
        self.a + 1
    }

    /// `B = b + 1`.
    pub fn cap_b(&self) -> u64 {
        self.b + 1
    }

    /// The distance parameter: `7a + 3b` for the 73 class, `a + b` otherwise.
    pub fn d(&self) -> u64 {
        match self.case {
            ResidueCase::SevenThree => 7 * self.a + 3 * self.b,
            _ => self.a + self.b,
        }
    }

    /// The (always-integer) square root of `(5d + shift)² − scale·p`:
    /// `5|7a − 3b + 4|` in the 73 class, `5|a − b|` otherwise.
    pub fn disc_root(&self) -> u64 {
        match self.case {
            ResidueCase::SevenThree => {
                let inner = 7 * self.a as i128 - 3 * self.b as i128 + 4;
                5 * inner.unsigned_abs() as u64
            }
            _ => 5 * self.a.abs_diff(self.b),
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = ({})({}) [case {}, a={}, b={}]",
            self.p,
            self.factor1(),
            self.factor2(),
            self.case,
            self.a,
            self.b
        )
    }
}
