//! One checker per audited claim.
//!
//! Each checker grades one instance and returns a [`BoundCheck`]: whether
//! the claim's side conditions hold (`applicable`, with the failed condition
//! spelled out when they don't), the verdict, and the three comparison
//! sides. Sides are exact rationals wherever the inequality is rational;
//! only genuinely transcendental sides (e^x bounds, √p exponents, the
//! irrational end of a d-interval) are rendered approximately — and even
//! then the verdict itself comes from the certified log-domain comparator
//! or from exact squared comparisons, never from bare floats.
//!
//! Gated instances still carry their raw sides, so a reader can see when a
//! bound would have failed without its gate.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{compare_log_bound, ExactRatio, LogExpr, LogTerm, Verdict};
use crate::factor::DSearchWitness;
use crate::primes::is_prime;
use crate::repr::{Representation, ResidueCase};

/// Identifier of one audited inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClaimId {
    Th1,
    Obs2,
    Th2Final,
    Th2Interior,
    Th3Lower,
    Th3Ratio,
    Th4A,
    Th4B,
    CorRange,
}

impl ClaimId {
    pub const ALL: [ClaimId; 9] = [
        ClaimId::Th1,
        ClaimId::Obs2,
        ClaimId::Th2Final,
        ClaimId::Th2Interior,
        ClaimId::Th3Lower,
        ClaimId::Th3Ratio,
        ClaimId::Th4A,
        ClaimId::Th4B,
        ClaimId::CorRange,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ClaimId::Th1 => "th1",
            ClaimId::Obs2 => "obs2",
            ClaimId::Th2Final => "th2",
            ClaimId::Th2Interior => "th2i",
            ClaimId::Th3Lower => "th3l",
            ClaimId::Th3Ratio => "th3r",
            ClaimId::Th4A => "th4a",
            ClaimId::Th4B => "th4b",
            ClaimId::CorRange => "cor",
        }
    }

    pub fn from_label(label: &str) -> Option<ClaimId> {
        ClaimId::ALL.into_iter().find(|c| c.label() == label)
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One side of a comparison: exact rational, approximate decimal, or absent
/// (a non-pairable instance has no sides at all).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SideValue {
    Exact(ExactRatio),
    Approx(f64),
    Absent,
}

impl SideValue {
    pub fn is_exact(&self) -> bool {
        matches!(self, SideValue::Exact(_))
    }

    pub fn render(&self) -> String {
        match self {
            SideValue::Exact(r) => r.to_string(),
            SideValue::Approx(x) => format!("{x}"),
            SideValue::Absent => String::new(),
        }
    }

    pub fn as_exact(&self) -> Option<ExactRatio> {
        match self {
            SideValue::Exact(r) => Some(*r),
            _ => None,
        }
    }
}

/// Outcome of one claim check on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundCheck {
    pub claim: ClaimId,
    pub p: u64,
    pub case: ResidueCase,
    pub applicable: bool,
    /// Names the failed side condition; empty when applicable.
    pub gate_reason: String,
    pub verdict: Verdict,
    pub lhs: SideValue,
    pub mid: SideValue,
    pub rhs: SideValue,
}

impl BoundCheck {
    /// True when every side is an exact rational (the verdict was decided by
    /// exact comparison alone).
    pub fn is_exact(&self) -> bool {
        self.lhs.is_exact() && self.mid.is_exact() && self.rhs.is_exact()
    }

    fn build(
        claim: ClaimId,
        p: u64,
        case: ResidueCase,
        gate: Option<String>,
        raw_verdict: Verdict,
        lhs: SideValue,
        mid: SideValue,
        rhs: SideValue,
    ) -> BoundCheck {
        let (applicable, gate_reason, verdict) = match gate {
            Some(reason) => (false, reason, Verdict::NotApplicable),
            None => (true, String::new(), raw_verdict),
        };
        BoundCheck {
            claim,
            p,
            case,
            applicable,
            gate_reason,
            verdict,
            lhs,
            mid,
            rhs,
        }
    }
}

fn pass_if(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// A ≥ / B ≥ thresholds, with the first failing condition reported.
fn gate_ab(cap_a: u64, cap_b: u64, amin: u64, bmin: u64, a_name: &str, b_name: &str) -> Option<String> {
    if cap_a < amin {
        Some(format!("{a_name} = {cap_a} < {amin}"))
    } else if cap_b < bmin {
        Some(format!("{b_name} = {cap_b} < {bmin}"))
    } else {
        None
    }
}

fn th1_thresholds(case: ResidueCase) -> (u64, u64) {
    match case {
        ResidueCase::SevenThree => (4, 8),
        ResidueCase::NineNine => (2, 2),
        ResidueCase::OneOne => (10, 10),
    }
}

fn th2_thresholds(case: ResidueCase) -> (u64, u64) {
    match case {
        ResidueCase::SevenThree => (31, 71),
        ResidueCase::NineNine => (11, 11),
        ResidueCase::OneOne => (91, 91),
    }
}

/// p/100 ≤ AB ≤ 121p/10⁴, gated at A ≥ 4, B ≥ 8 / A, B ≥ 2 / A, B ≥ 10
/// per case.
pub fn check_th1(rep: &Representation) -> BoundCheck {
    let p = rep.p();
    let (amin, bmin) = th1_thresholds(rep.case());
    let gate = gate_ab(rep.cap_a(), rep.cap_b(), amin, bmin, "A", "B");
    let lhs = ExactRatio::new(p as i128, 100);
    let mid = ExactRatio::from_int(rep.cap_a() as i128 * rep.cap_b() as i128);
    let rhs = ExactRatio::new(121 * p as i128, 10_000);
    let verdict = pass_if(lhs <= mid && mid <= rhs);
    BoundCheck::build(
        ClaimId::Th1,
        p,
        rep.case(),
        gate,
        verdict,
        SideValue::Exact(lhs),
        SideValue::Exact(mid),
        SideValue::Exact(rhs),
    )
}

/// 100ab ≤ p ≤ 100AB, unconditioned.
pub fn check_obs2(rep: &Representation) -> BoundCheck {
    let p = rep.p();
    let lhs = ExactRatio::from_int(100 * rep.a() as i128 * rep.b() as i128);
    let mid = ExactRatio::from_u64(p);
    let rhs = ExactRatio::from_int(100 * rep.cap_a() as i128 * rep.cap_b() as i128);
    let verdict = pass_if(lhs <= mid && mid <= rhs);
    BoundCheck::build(
        ClaimId::Obs2,
        p,
        rep.case(),
        None,
        verdict,
        SideValue::Exact(lhs),
        SideValue::Exact(mid),
        SideValue::Exact(rhs),
    )
}

/// A step pair: a representation of p together with one of a later value.
/// The literal pairing uses p + 10; the consecutive-representable pairing
/// admits any larger representable value in the same case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Th2Pair {
    rep_p: Representation,
    rep_next: Representation,
}

impl Th2Pair {
    pub fn new(rep_p: Representation, rep_next: Representation) -> Result<Th2Pair> {
        if rep_p.case() != rep_next.case() {
            return Err(Error::InvalidInstance(format!(
                "pair mixes cases {} and {}",
                rep_p.case(),
                rep_next.case()
            )));
        }
        if rep_next.p() <= rep_p.p() {
            return Err(Error::InvalidInstance(format!(
                "pair is not increasing: {} then {}",
                rep_p.p(),
                rep_next.p()
            )));
        }
        Ok(Th2Pair { rep_p, rep_next })
    }

    pub fn rep_p(&self) -> &Representation {
        &self.rep_p
    }

    pub fn rep_next(&self) -> &Representation {
        &self.rep_next
    }

    pub fn gap(&self) -> u64 {
        self.rep_next.p() - self.rep_p.p()
    }
}

/// Which end(s) of a step pair the A/B thresholds are applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Th2GateScope {
    /// Thresholds on the source representation only (the conditions as
    /// written name only A(p), B(p)).
    SourceOnly,
    /// Thresholds on both ends (default: the step inequality compares both).
    #[default]
    BothEnds,
}

impl Th2GateScope {
    pub fn label(self) -> &'static str {
        match self {
            Th2GateScope::SourceOnly => "source",
            Th2GateScope::BothEnds => "both",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Th2Options {
    pub gate_scope: Th2GateScope,
    /// Replace the literal 10 in the (1 + 10/p) factor by the pair's actual
    /// gap. Off by default: the formula is audited as written.
    pub gap_adjusted: bool,
}

/// Step inequality, audited in the 100th-power domain so the middle term
/// stays exact: 1 ≤ A'B'/(AB) ≤ e^0.0201 · (1 + 10/p)^1.0201, thresholds
/// A ≥ 31, B ≥ 71 / 11, 11 / 91, 91 per case.
pub fn check_th2(pair: &Th2Pair, opts: Th2Options) -> BoundCheck {
    let rep = pair.rep_p();
    let next = pair.rep_next();
    let p = rep.p();
    let (amin, bmin) = th2_thresholds(rep.case());
    let far = if pair.gap() == 10 { "p+10" } else { "p'" };
    let gate = gate_ab(rep.cap_a(), rep.cap_b(), amin, bmin, "A(p)", "B(p)").or_else(|| {
        match opts.gate_scope {
            Th2GateScope::SourceOnly => None,
            Th2GateScope::BothEnds => gate_ab(
                next.cap_a(),
                next.cap_b(),
                amin,
                bmin,
                &format!("A({far})"),
                &format!("B({far})"),
            ),
        }
    });
    let ab = rep.cap_a() as i128 * rep.cap_b() as i128;
    let ab_next = next.cap_a() as i128 * next.cap_b() as i128;
    let ratio = ExactRatio::new(ab_next, ab);
    let step = if opts.gap_adjusted { pair.gap() } else { 10 };
    let bound = LogExpr::new(vec![
        LogTerm::Const(ExactRatio::new(201, 10_000)),
        LogTerm::Ln {
            coeff: ExactRatio::new(10_201, 10_000),
            arg: ExactRatio::new(p as i128 + step as i128, p as i128),
        },
    ]);
    let upper = compare_log_bound(&ratio, &bound).expect("ratio of positive products");
    let verdict = if ratio < ExactRatio::ONE {
        Verdict::Fail
    } else {
        upper
    };
    BoundCheck::build(
        ClaimId::Th2Final,
        p,
        rep.case(),
        gate,
        verdict,
        SideValue::Exact(ExactRatio::ONE),
        SideValue::Exact(ratio),
        SideValue::Approx(bound.exp_approx()),
    )
}

/// Interior step bound: p/100 ≤ AB ≤ 10201p/10⁶ under the step thresholds.
pub fn check_th2_interior(rep: &Representation) -> BoundCheck {
    let p = rep.p();
    let (amin, bmin) = th2_thresholds(rep.case());
    let gate = gate_ab(rep.cap_a(), rep.cap_b(), amin, bmin, "A", "B");
    let lhs = ExactRatio::new(p as i128, 100);
    let mid = ExactRatio::from_int(rep.cap_a() as i128 * rep.cap_b() as i128);
    let rhs = ExactRatio::new(10_201 * p as i128, 1_000_000);
    let verdict = pass_if(lhs <= mid && mid <= rhs);
    BoundCheck::build(
        ClaimId::Th2Interior,
        p,
        rep.case(),
        gate,
        verdict,
        SideValue::Exact(lhs),
        SideValue::Exact(mid),
        SideValue::Exact(rhs),
    )
}

/// A prime p ending in 1 whose successor p + 10 factors as
/// (10a + 7)(10b + 3), together with the rational root
/// x₀ = (p/(10b+3) − 7)/10 of the shifted equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Th3Instance {
    p: u64,
    a: u64,
    b: u64,
    x0: ExactRatio,
    cap_x0: ExactRatio,
}

impl Th3Instance {
    pub fn new(p: u64, a: u64, b: u64) -> Result<Th3Instance> {
        if p % 10 != 1 {
            return Err(Error::NotEndingInOne(p));
        }
        if !is_prime(p) {
            return Err(Error::InvalidInstance(format!("p = {p} is not prime")));
        }
        let f1 = 10 * a as u128 + 7;
        let f2 = 10 * b as u128 + 3;
        if f1 * f2 != p as u128 + 10 {
            return Err(Error::InvalidInstance(format!(
                "({f1})({f2}) = {} ≠ p + 10 = {}",
                f1 * f2,
                p + 10
            )));
        }
        // x0 = (p − 7(10b+3)) / (10(10b+3)); may be negative when a = 0.
        let den = 10 * (10 * b as i128 + 3);
        let x0 = ExactRatio::new(p as i128 - 7 * (10 * b as i128 + 3), den);
        let cap_x0 = x0.add(&ExactRatio::ONE);
        Ok(Th3Instance {
            p,
            a,
            b,
            x0,
            cap_x0,
        })
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

    pub fn cap_a(&self) -> u64 {
        self.a + 1
    }

    pub fn x0(&self) -> ExactRatio {
        self.x0
    }

    pub fn cap_x0(&self) -> ExactRatio {
        self.cap_x0
    }

    /// A/X₀ as an exact ratio: A(100b + 30) / (p + 30b + 9).
    pub fn ratio(&self) -> ExactRatio {
        ExactRatio::new(
            self.cap_a() as i128 * (100 * self.b as i128 + 30),
            self.p as i128 + 30 * self.b as i128 + 9,
        )
    }
}

/// Both shifted-root bounds: [0] is 1 < A/X₀ < 101(p+10)/(100p) gated at
/// A ≥ 31; [1] is 10(p+10)/(11p) < A/X₀ < 101(p+10)/(100p) gated at
/// X₀ ≥ 33/10. All comparisons exact and strict.
pub fn check_th3(inst: &Th3Instance) -> [BoundCheck; 2] {
    let p = inst.p();
    let case = ResidueCase::SevenThree;
    let mid = inst.ratio();
    let upper = ExactRatio::new(101 * (p as i128 + 10), 100 * p as i128);
    let lower_ratio = ExactRatio::new(10 * (p as i128 + 10), 11 * p as i128);

    let gate_a = (inst.cap_a() < 31).then(|| format!("A = {} < 31", inst.cap_a()));
    let strict = ExactRatio::ONE < mid && mid < upper;
    let lower_check = BoundCheck::build(
        ClaimId::Th3Lower,
        p,
        case,
        gate_a,
        pass_if(strict),
        SideValue::Exact(ExactRatio::ONE),
        SideValue::Exact(mid),
        SideValue::Exact(upper),
    );

    let threshold = ExactRatio::new(33, 10);
    let gate_x0 = (inst.cap_x0() < threshold).then(|| format!("X0 = {} < 33/10", inst.cap_x0()));
    let strict = lower_ratio < mid && mid < upper;
    let ratio_check = BoundCheck::build(
        ClaimId::Th3Ratio,
        p,
        case,
        gate_x0,
        pass_if(strict),
        SideValue::Exact(lower_ratio),
        SideValue::Exact(mid),
        SideValue::Exact(upper),
    );

    [lower_check, ratio_check]
}

/// Both deviation bounds for the 73 class; errors on other cases.
///
/// A-branch: 1 ≤ (p + 70A − 21)/(p + 259) ≤ e^((7√p − 259)/p), gated at
/// 4 ≤ A and (10A − 3)² ≤ p. B-branch: same shape with
/// (p + 30B − 21)/(p + 219), e^((3√p − 3)/p), 8 ≤ B, (10B − 7)² ≤ p.
/// Equality is exact at the lower gates (A = 4, B = 8).
pub fn check_th4(rep: &Representation) -> Result<[BoundCheck; 2]> {
    if rep.case() != ResidueCase::SevenThree {
        return Err(Error::WrongCase(rep.case().label().to_string()));
    }
    let p = rep.p();

    // One branch is (coeff, sub, offset, const_num) = (7, 3, 259, 259):
    // mid = (p + 70A − 21)/(p + 259) against e^((7√p − 259)/p) under
    // (10A − 3)² ≤ p. The other is (3, 7, 219, 3) with B.
    let branch = |claim: ClaimId,
                  cap: u64,
                  cap_name: &str,
                  cap_min: u64,
                  sub: u64,
                  offset: u64,
                  coeff: i128,
                  const_num: i128|
     -> BoundCheck {
        let factor = (10 * cap - sub) as u128;
        let gate = if cap < cap_min {
            Some(format!("{cap_name} = {cap} < {cap_min}"))
        } else if factor * factor > p as u128 {
            Some(format!(
                "(10{cap_name} - {sub})^2 = {} > {p}",
                factor * factor
            ))
        } else {
            None
        };
        let mid = ExactRatio::new(
            p as i128 + 10 * coeff * cap as i128 - 21,
            p as i128 + offset as i128,
        );
        let bound = LogExpr::new(vec![
            LogTerm::SqrtOver {
                coeff: ExactRatio::from_int(coeff),
                radicand: p,
            },
            LogTerm::Const(ExactRatio::new(-const_num, p as i128)),
        ]);
        let upper = compare_log_bound(&mid, &bound).expect("deviation ratio is positive");
        let verdict = if mid < ExactRatio::ONE {
            Verdict::Fail
        } else {
            upper
        };
        BoundCheck::build(
            claim,
            p,
            ResidueCase::SevenThree,
            gate,
            verdict,
            SideValue::Exact(ExactRatio::ONE),
            SideValue::Exact(mid),
            SideValue::Approx(bound.exp_approx()),
        )
    };

    let a_check = branch(ClaimId::Th4A, rep.cap_a(), "A", 4, 3, 259, 7, 259);
    let b_check = branch(ClaimId::Th4B, rep.cap_b(), "B", 8, 7, 219, 3, 3);
    Ok([a_check, b_check])
}

fn cor_region(case: ResidueCase) -> (u64, u64) {
    match case {
        ResidueCase::SevenThree => (3, 7),
        ResidueCase::NineNine => (2, 2),
        ResidueCase::OneOne => (9, 9),
    }
}

/// Membership of a witness's d in the printed interval, applicable only
/// inside the stated (x, y) region: x ≥ 3, y ≥ 7 / x, y ≥ 2 / x, y ≥ 9.
/// The irrational lower end is decided by exact squared comparison.
pub fn check_cor_range(witness: &DSearchWitness) -> BoundCheck {
    let rep = &witness.rep;
    let case = rep.case();
    let p = rep.p();
    let d = witness.d;
    let (xmin, ymin) = cor_region(case);
    let gate = if rep.a() < xmin {
        Some(format!("x = {} < {xmin}", rep.a()))
    } else if rep.b() < ymin {
        Some(format!("y = {} < {ymin}", rep.b()))
    } else {
        None
    };
    // Lower: (√(scale·p) − shift)/5 ≤ d  ⟺  scale·p ≤ (5d + shift)².
    let sp = case.disc_scale() as u128 * p as u128;
    let v = 5 * d as u128 + case.disc_shift() as u128;
    let lower_ok = sp <= v * v;
    let (upper, upper_ok) = match case {
        ResidueCase::SevenThree => {
            let upper = ExactRatio::new(21 * p as i128 - 7900, 1000);
            (upper, ExactRatio::from_u64(d) <= upper)
        }
        ResidueCase::NineNine => {
            let upper = ExactRatio::new(p as i128 - 81, 90);
            (upper, ExactRatio::from_u64(d) <= upper)
        }
        ResidueCase::OneOne => {
            let upper = ExactRatio::new(p as i128 - 1, 10);
            (upper, ExactRatio::from_u64(d) <= upper)
        }
    };
    let lower_approx =
        ((case.disc_scale() as f64 * p as f64).sqrt() - case.disc_shift() as f64) / 5.0;
    BoundCheck::build(
        ClaimId::CorRange,
        p,
        case,
        gate,
        pass_if(lower_ok && upper_ok),
        SideValue::Approx(lower_approx),
        SideValue::Exact(ExactRatio::from_u64(d)),
        SideValue::Exact(upper),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::{dsearch_representations, oracle_representations, RangeMode};

    fn rep(case: ResidueCase, p: u64, a: u64, b: u64) -> Representation {
        Representation::new(case, p, a, b).unwrap()
    }

    fn ratio(n: i128, d: i128) -> ExactRatio {
        ExactRatio::new(n, d)
    }

    #[test]
    fn th1_pass_instances() {
        let c = check_th1(&rep(ResidueCase::SevenThree, 2701, 3, 7));
        assert!(c.applicable);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.lhs, SideValue::Exact(ratio(2701, 100)));
        assert_eq!(c.mid, SideValue::Exact(ratio(32, 1)));
        assert_eq!(c.rhs, SideValue::Exact(ratio(326821, 10_000)));
        assert!(c.is_exact());

        let c = check_th1(&rep(ResidueCase::NineNine, 361, 1, 1));
        assert!(c.applicable);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.mid, SideValue::Exact(ratio(4, 1)));

        let c = check_th1(&rep(ResidueCase::OneOne, 8281, 9, 9));
        assert!(c.applicable);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.rhs, SideValue::Exact(ratio(1_002_001, 10_000)));
    }

    #[test]
    fn th1_gate_on_1311() {
        let c = check_th1(&rep(ResidueCase::SevenThree, 1311, 5, 2));
        assert!(!c.applicable);
        assert_eq!(c.gate_reason, "B = 3 < 8");
        assert_eq!(c.verdict, Verdict::NotApplicable);
        // The raw sides show the gate is necessary: AB = 18 > 121p/10⁴.
        assert_eq!(c.mid, SideValue::Exact(ratio(18, 1)));
        assert_eq!(c.rhs, SideValue::Exact(ratio(158631, 10_000)));
        assert!(c.mid.as_exact().unwrap() > c.rhs.as_exact().unwrap());
    }

    #[test]
    fn th1_gate_reports_a_first() {
        let c = check_th1(&rep(ResidueCase::OneOne, 1311, 0, 131));
        assert_eq!(c.gate_reason, "A = 1 < 10");
    }

    #[test]
    fn obs2_instances() {
        let c = check_obs2(&rep(ResidueCase::SevenThree, 21, 0, 0));
        assert!(c.applicable);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.lhs, SideValue::Exact(ExactRatio::ZERO));
        assert_eq!(c.rhs, SideValue::Exact(ratio(100, 1)));

        let c = check_obs2(&rep(ResidueCase::SevenThree, 2701, 3, 7));
        assert_eq!(c.lhs, SideValue::Exact(ratio(2100, 1)));
        assert_eq!(c.rhs, SideValue::Exact(ratio(3200, 1)));
        assert_eq!(c.verdict, Verdict::Pass);

        // No gate even where th1 is gated.
        let c = check_obs2(&rep(ResidueCase::SevenThree, 1311, 5, 2));
        assert!(c.applicable);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.lhs, SideValue::Exact(ratio(1000, 1)));
        assert_eq!(c.rhs, SideValue::Exact(ratio(1800, 1)));
    }

    #[test]
    fn th2_gated_pair_731() {
        // 731 = 17·43 → (1, 4); 741 = 57·13 → (5, 1).
        let pair = Th2Pair::new(
            rep(ResidueCase::SevenThree, 731, 1, 4),
            rep(ResidueCase::SevenThree, 741, 5, 1),
        )
        .unwrap();
        let c = check_th2(&pair, Th2Options::default());
        assert!(!c.applicable);
        assert_eq!(c.gate_reason, "A(p) = 2 < 31");
        assert_eq!(c.verdict, Verdict::NotApplicable);
        // Raw evaluation demonstrates the gate matters: the ratio 12/10
        // breaches the step bound.
        assert_eq!(c.mid, SideValue::Exact(ratio(6, 5)));
        let bound = LogExpr::new(vec![
            LogTerm::Const(ratio(201, 10_000)),
            LogTerm::Ln {
                coeff: ratio(10_201, 10_000),
                arg: ratio(741, 731),
            },
        ]);
        assert_eq!(
            compare_log_bound(&ratio(6, 5), &bound).unwrap(),
            Verdict::Fail
        );
        // Same gate under source-only scope: the source side already fails.
        let c = check_th2(
            &pair,
            Th2Options {
                gate_scope: Th2GateScope::SourceOnly,
                ..Th2Options::default()
            },
        );
        assert_eq!(c.gate_reason, "A(p) = 2 < 31");
    }

    #[test]
    fn th2_source_only_admits_far_side_failures() {
        // 215821 = 307·703 → (30, 70) meets the source thresholds exactly;
        // 215831 = 7·30833 → (0, 3083) is far below them.
        let pair = Th2Pair::new(
            rep(ResidueCase::SevenThree, 215821, 30, 70),
            rep(ResidueCase::SevenThree, 215831, 0, 3083),
        )
        .unwrap();
        let both = check_th2(&pair, Th2Options::default());
        assert!(!both.applicable);
        assert_eq!(both.gate_reason, "A(p+10) = 1 < 31");

        let source = check_th2(
            &pair,
            Th2Options {
                gate_scope: Th2GateScope::SourceOnly,
                ..Th2Options::default()
            },
        );
        assert!(source.applicable);
        assert_eq!(source.verdict, Verdict::Fail);
        assert_eq!(source.mid, SideValue::Exact(ratio(3084, 2201)));
    }

    #[test]
    fn th2_first_pair_applicable_under_both_end_gates() {
        // Scanning upward from 307·703 (the least p whose source factors can
        // clear the thresholds), the first pair applicable under both-ends
        // gating is 254541 = 357·713 stepping to 254551 = 317·803. The
        // shifted products 36·72 and 32·81 both equal 2592, so the ratio is
        // exactly 1 and the check passes at its lower edge.
        let pair = Th2Pair::new(
            rep(ResidueCase::SevenThree, 254_541, 35, 71),
            rep(ResidueCase::SevenThree, 254_551, 31, 80),
        )
        .unwrap();
        let c = check_th2(&pair, Th2Options::default());
        assert!(c.applicable);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.mid, SideValue::Exact(ExactRatio::ONE));
        // The bound side is a log-domain approximation, so the record as a
        // whole is not flagged exact.
        assert!(!c.is_exact());
    }

    #[test]
    fn th2_interior_instances() {
        let c = check_th2_interior(&rep(ResidueCase::SevenThree, 215821, 30, 70));
        assert!(c.applicable);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.lhs, SideValue::Exact(ratio(215821, 100)));
        assert_eq!(c.mid, SideValue::Exact(ratio(2201, 1)));
        assert_eq!(c.rhs, SideValue::Exact(ratio(2201590021, 1_000_000)));

        let c = check_th2_interior(&rep(ResidueCase::SevenThree, 2701, 3, 7));
        assert!(!c.applicable);
        assert_eq!(c.gate_reason, "A = 4 < 31");

        // 11-class boundary: 901² slips under the interior bound…
        let c = check_th2_interior(&rep(ResidueCase::OneOne, 811801, 90, 90));
        assert!(c.applicable);
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.mid, SideValue::Exact(ratio(8281, 1)));
        assert_eq!(c.rhs, SideValue::Exact(ratio(8281182001, 1_000_000)));
        // …while 891², one step below the thresholds, would breach it: the
        // gate is carrying weight here.
        let c = check_th2_interior(&rep(ResidueCase::OneOne, 793881, 89, 89));
        assert!(!c.applicable);
        assert_eq!(c.gate_reason, "A = 90 < 91");
        assert!(c.mid.as_exact().unwrap() > c.rhs.as_exact().unwrap());
    }

    #[test]
    fn th3_instance_validation() {
        assert!(Th3Instance::new(41, 1, 0).is_ok());
        // Not ending in 1 / not prime / wrong product.
        assert!(Th3Instance::new(43, 1, 0).is_err());
        assert!(Th3Instance::new(51, 1, 0).is_err());
        assert!(Th3Instance::new(41, 0, 1).is_err());
    }

    #[test]
    fn th3_small_instance_gates() {
        // p = 41: p + 10 = 51 = 17·3, a = 1, b = 0.
        let inst = Th3Instance::new(41, 1, 0).unwrap();
        assert_eq!(inst.x0(), ratio(2, 3));
        assert_eq!(inst.cap_x0(), ratio(5, 3));
        assert_eq!(inst.ratio(), ratio(6, 5));
        let [lower, ratio_check] = check_th3(&inst);
        assert!(!lower.applicable);
        assert_eq!(lower.gate_reason, "A = 2 < 31");
        assert!(!ratio_check.applicable);
        assert_eq!(ratio_check.gate_reason, "X0 = 5/3 < 33/10");
        // Raw sides still carried: the strict lower bound holds ungated.
        assert!(lower.mid.as_exact().unwrap() > ExactRatio::ONE);
    }

    #[test]
    fn th3_fully_applicable_instance() {
        // p = 25471 is prime; 25481 = 307·83 → a = 30, b = 8.
        let inst = Th3Instance::new(25471, 30, 8).unwrap();
        assert_eq!(inst.cap_x0(), ratio(2572, 83));
        assert_eq!(inst.ratio(), ratio(2573, 2572));
        let [lower, ratio_check] = check_th3(&inst);
        assert!(lower.applicable && ratio_check.applicable);
        assert_eq!(lower.verdict, Verdict::Pass);
        assert_eq!(ratio_check.verdict, Verdict::Pass);
        assert_eq!(lower.rhs, SideValue::Exact(ratio(101 * 25481, 100 * 25471)));
        assert_eq!(
            ratio_check.lhs,
            SideValue::Exact(ratio(10 * 25481, 11 * 25471))
        );
        assert!(lower.is_exact() && ratio_check.is_exact());
    }

    #[test]
    fn th3_negative_x0_instance() {
        // p = 571: 581 = 7·83 → a = 0, b = 8; x0 = −1/83 yet A/X₀ > 1.
        let inst = Th3Instance::new(571, 0, 8).unwrap();
        assert_eq!(inst.x0(), ratio(-1, 83));
        assert_eq!(inst.ratio(), ratio(83, 82));
        let [lower, _] = check_th3(&inst);
        assert!(!lower.applicable);
        assert!(lower.mid.as_exact().unwrap() > ExactRatio::ONE);
    }

    #[test]
    fn th4_equality_at_lower_gates() {
        let [a_check, b_check] = check_th4(&rep(ResidueCase::SevenThree, 2701, 3, 7)).unwrap();
        // A = 4: 70A − 21 = 259 forces mid = 1 exactly.
        assert!(a_check.applicable);
        assert_eq!(a_check.mid, SideValue::Exact(ExactRatio::ONE));
        assert_eq!(a_check.verdict, Verdict::Pass);
        // B = 8 but 73² = 5329 > 2701.
        assert!(!b_check.applicable);
        assert_eq!(b_check.gate_reason, "(10B - 7)^2 = 5329 > 2701");

        // 5621 = 77·73 → (7, 7): B-branch equality, A-branch square gate.
        let [a_check, b_check] = check_th4(&rep(ResidueCase::SevenThree, 5621, 7, 7)).unwrap();
        assert!(!a_check.applicable);
        assert_eq!(a_check.gate_reason, "(10A - 3)^2 = 5929 > 5621");
        assert!(b_check.applicable);
        assert_eq!(b_check.mid, SideValue::Exact(ExactRatio::ONE));
        assert_eq!(b_check.verdict, Verdict::Pass);
    }

    #[test]
    fn th4_gate_thresholds() {
        let [a_check, b_check] = check_th4(&rep(ResidueCase::SevenThree, 21, 0, 0)).unwrap();
        assert_eq!(a_check.gate_reason, "A = 1 < 4");
        assert_eq!(b_check.gate_reason, "B = 1 < 8");
        assert!(check_th4(&rep(ResidueCase::NineNine, 361, 1, 1)).is_err());
    }

    #[test]
    fn th4_applicable_pass_sweep_small() {
        for p in (1u64..100_000).filter(|p| p % 10 == 1) {
            for r in oracle_representations(p, ResidueCase::SevenThree).unwrap() {
                let [a_check, b_check] = check_th4(&r).unwrap();
                for c in [a_check, b_check] {
                    if c.applicable {
                        assert_eq!(
                            c.verdict,
                            Verdict::Pass,
                            "p={p} rep ({}, {})",
                            r.a(),
                            r.b()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cor_range_instances() {
        let c = ResidueCase::SevenThree;
        let ws = dsearch_representations(2701, c, RangeMode::SoundRange).unwrap();
        let check = check_cor_range(&ws[0]);
        assert!(check.applicable);
        assert_eq!(check.verdict, Verdict::Pass);
        assert_eq!(check.mid, SideValue::Exact(ratio(42, 1)));
        assert_eq!(check.rhs, SideValue::Exact(ratio(48821, 1000)));
        assert!(!check.is_exact()); // irrational lower end is approximate

        // 1311 rep (5, 2), d = 41: outside the stated region.
        let w = DSearchWitness::from_representation(&rep(c, 1311, 5, 2));
        let check = check_cor_range(&w);
        assert!(!check.applicable);
        assert_eq!(check.gate_reason, "y = 2 < 7");

        // 99-class square 361 = 19²: x = y = 1 sits below the printed
        // region threshold even though the step thresholds would admit it.
        let w = DSearchWitness::from_representation(&rep(ResidueCase::NineNine, 361, 1, 1));
        let check = check_cor_range(&w);
        assert!(!check.applicable);
        assert_eq!(check.gate_reason, "x = 1 < 2");
        // Raw interval membership holds: d = 2 ∈ [2, 280/90].
        assert_eq!(check.mid, SideValue::Exact(ratio(2, 1)));

        // 11-class square at the region boundary: applicable and at the
        // interval's lower end exactly.
        let w = DSearchWitness::from_representation(&rep(ResidueCase::OneOne, 8281, 9, 9));
        let check = check_cor_range(&w);
        assert!(check.applicable);
        assert_eq!(check.verdict, Verdict::Pass);
        assert_eq!(check.mid, SideValue::Exact(ratio(18, 1)));
    }

    #[test]
    fn cor_range_4161_nonconforming_witness_passes_range() {
        // The d = 56 witness is range-conforming but form-nonconforming.
        let ws =
            dsearch_representations(4161, ResidueCase::SevenThree, RangeMode::SoundRange).unwrap();
        assert_eq!(ws[0].s, 90);
        let check = check_cor_range(&ws[0]);
        assert!(check.applicable);
        assert_eq!(check.verdict, Verdict::Pass);
        // The stranded second witness (d = 966) is outside the region.
        let check = check_cor_range(&ws[1]);
        assert!(!check.applicable);
        assert_eq!(check.gate_reason, "y = 0 < 7");
    }

    #[test]
    fn side_rendering() {
        assert_eq!(SideValue::Exact(ratio(2573, 2572)).render(), "2573/2572");
        assert_eq!(SideValue::Exact(ratio(18, 1)).render(), "18");
        assert_eq!(SideValue::Approx(1.25).render(), "1.25");
        assert_eq!(SideValue::Absent.render(), "");
    }

    #[test]
    fn claim_labels_round_trip() {
        for claim in ClaimId::ALL {
            assert_eq!(ClaimId::from_label(claim.label()), Some(claim));
        }
        assert_eq!(ClaimId::from_label("th5"), None);
    }
}
