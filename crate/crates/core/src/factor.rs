//! Three independent routes to the digit-class factorizations of a number
//! ending in 1.
//!
//! * [`oracle_representations`] — trial division over divisor pairs; the
//!   ground truth the other two methods are audited against.
//! * [`dsearch_representations`] — a Fermat-style scan over the distance
//!   parameter `d`, accepting any `d` whose discriminant is a perfect
//!   square. Runs over either the printed interval ([`RangeMode::PaperRange`])
//!   or the provably complete one ([`RangeMode::SoundRange`]).
//! * [`lambda_representations`] — the λ-parametrization of the 73 class,
//!   searched by inversion from candidate divisors.
//!
//! [`form_classify`] grades each discriminant root against the claimed
//! `5^k·2^j` / `5^k·τ^j` power forms; the search itself never filters on
//! conformance (a conforming-only search would miss factorizations, e.g.
//! p = 4161 at d = 56 has s = 90 = 2·3²·5).

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{is_perfect_square, is_perfect_square_u128};
use crate::repr::{Representation, ResidueCase};

fn ensure_ends_in_one(p: u64) -> Result<()> {
    if p % 10 == 1 {
        Ok(())
    } else {
        Err(Error::NotEndingInOne(p))
    }
}

/// Visit every divisor pair (f, p/f) with f ≤ √p. p must be odd.
fn scan_divisor_pairs(p: u64, mut visit: impl FnMut(u64, u64)) {
    debug_assert!(p % 2 == 1);
    let mut f = 1u64;
    while f * f <= p {
        if p % f == 0 {
            visit(f, p / f);
        }
        f += 2;
    }
}

fn push_if_case_pair(
    case: ResidueCase,
    p: u64,
    f1: u64,
    f2: u64,
    out: &mut Vec<Representation>,
) {
    if f1 % 10 == case.m() && f2 % 10 == case.n() {
        let rep = Representation::new(case, p, (f1 - case.m()) / 10, (f2 - case.n()) / 10)
            .expect("divisor pair satisfies the product identity");
        out.push(rep);
    }
}

/// All representations of `p` in one residue case, by trial division.
///
/// Complete by construction: every divisor pair of `p` is inspected. Ordered
/// pairs for the 73 class, `a ≤ b` for the symmetric classes.
pub fn oracle_representations(p: u64, case: ResidueCase) -> Result<Vec<Representation>> {
    ensure_ends_in_one(p)?;
    let mut reps = Vec::new();
    scan_divisor_pairs(p, |f, g| {
        push_if_case_pair(case, p, f, g, &mut reps);
        if f != g {
            push_if_case_pair(case, p, g, f, &mut reps);
        }
    });
    reps.sort();
    reps.dedup();
    Ok(reps)
}

/// All representations of `p` across all three residue cases in one divisor
/// scan, sorted by (case, a, b).
pub fn all_representations(p: u64) -> Result<Vec<Representation>> {
    ensure_ends_in_one(p)?;
    let mut reps = Vec::new();
    scan_divisor_pairs(p, |f, g| {
        for case in ResidueCase::ALL {
            push_if_case_pair(case, p, f, g, &mut reps);
            if f != g {
                push_if_case_pair(case, p, g, f, &mut reps);
            }
        }
    });
    reps.sort();
    reps.dedup();
    Ok(reps)
}

/// Which d-interval the distance search scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RangeMode {
    /// The printed interval — complete only inside the stated (a, b) region.
    PaperRange,
    /// Lower end from discriminant nonnegativity, upper end from a, b ≥ 0 —
    /// complete for every representation.
    SoundRange,
}

impl RangeMode {
    pub fn label(self) -> &'static str {
        match self {
            RangeMode::PaperRange => "paper",
            RangeMode::SoundRange => "sound",
        }
    }
}

/// A closed integer interval of d values; `lo > hi` means empty. Ends are
/// kept as computed (possibly negative) so the printed interval can be
/// reported verbatim; iteration clamps to d ≥ 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DRange {
    pub lo: i64,
    pub hi: i64,
}

impl DRange {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    /// The clamped iteration bounds, or None when nothing is scannable.
    fn iter_bounds(&self) -> Option<(u64, u64)> {
        if self.hi < 0 || self.is_empty() {
            return None;
        }
        Some((self.lo.max(0) as u64, self.hi as u64))
    }
}

impl fmt::Display for DRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

fn floor_div(n: i128, d: i128) -> i64 {
    n.div_euclid(d) as i64
}

fn ceil_div(n: i128, d: i128) -> i64 {
    -((-n).div_euclid(d)) as i64
}

/// The closed d-interval scanned for `p` in a residue case.
///
/// Lower end (both modes): least d with (5d + shift)² ≥ scale·p, i.e. the
/// inward rounding of (√(scale·p) − shift)/5. Upper ends: 73 class paper
/// (21p − 7900)/1000, sound (7p − 147)/30; 99 class (p − 81)/90; 11 class
/// (p − 1)/10 — the latter two are already sound.
pub fn d_bounds(p: u64, case: ResidueCase, mode: RangeMode) -> Result<DRange> {
    ensure_ends_in_one(p)?;
    let sp = case.disc_scale() as u128 * p as u128;
    let root = sp.isqrt();
    let t = if root * root == sp { root } else { root + 1 }; // ceil √sp
    let lo = ceil_div(t as i128 - case.disc_shift() as i128, 5);
    let p = p as i128;
    let hi = match (case, mode) {
        (ResidueCase::SevenThree, RangeMode::PaperRange) => floor_div(21 * p - 7900, 1000),
        (ResidueCase::SevenThree, RangeMode::SoundRange) => floor_div(7 * p - 147, 30),
        (ResidueCase::NineNine, _) => floor_div(p - 81, 90),
        (ResidueCase::OneOne, _) => floor_div(p - 1, 10),
    };
    Ok(DRange { lo, hi })
}

/// Even/odd tag for the distance parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(d: u64) -> Parity {
        if d % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Why a discriminant root falls outside the claimed power forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonConformity {
    /// s = 0 — the symmetric / zero-discriminant case.
    ZeroRoot,
    /// No factor of 5 at all (k would be 0).
    MissingFive,
    /// The 5-free part has the wrong parity for the d-parity family.
    ParityMismatch,
    /// Even-d family: the 5-free part is even but not a power of two.
    ExtraPrimeFactor,
}

impl NonConformity {
    pub fn label(&self) -> &'static str {
        match self {
            NonConformity::ZeroRoot => "zero_root",
            NonConformity::MissingFive => "missing_factor_5",
            NonConformity::ParityMismatch => "parity_mismatch",
            NonConformity::ExtraPrimeFactor => "extra_prime_factor",
        }
    }
}

/// Classification of a discriminant root s against the claimed forms
/// s = 5ᵏ·2ʲ (d even) and s = 5ᵏ·τʲ with τ odd (d odd).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscriminantForm {
    /// `tau` is absent for the even-d family (the base is 2).
    PowerForm { k: u32, j: u32, tau: Option<u64> },
    NonConforming { reason: NonConformity },
}

impl DiscriminantForm {
    pub fn is_conforming(&self) -> bool {
        matches!(self, DiscriminantForm::PowerForm { .. })
    }
}

impl fmt::Display for DiscriminantForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscriminantForm::PowerForm { k, j, tau: None } => write!(f, "5^{k}*2^{j}"),
            DiscriminantForm::PowerForm {
                k,
                j,
                tau: Some(tau),
            } => write!(f, "5^{k}*{tau}^{j}"),
            DiscriminantForm::NonConforming { reason } => {
                write!(f, "nonconforming:{}", reason.label())
            }
        }
    }
}

/// Largest exact root: Some(r) with r^j = n, for n ≥ 1, j ≥ 1.
fn exact_nth_root(n: u64, j: u32) -> Option<u64> {
    if j == 1 {
        return Some(n);
    }
    let seed = (n as f64).powf(1.0 / j as f64).round() as u64;
    for r in seed.saturating_sub(2)..=seed + 2 {
        match checked_pow_cmp(r, j, n) {
            std::cmp::Ordering::Equal => return Some(r),
            std::cmp::Ordering::Greater => break,
            std::cmp::Ordering::Less => {}
        }
    }
    None
}

/// Compare r^j with n without overflowing.
fn checked_pow_cmp(r: u64, j: u32, n: u64) -> std::cmp::Ordering {
    let mut acc = 1u128;
    for _ in 0..j {
        acc *= r as u128;
        if acc > n as u128 {
            return std::cmp::Ordering::Greater;
        }
    }
    acc.cmp(&(n as u128))
}

/// Grade a discriminant root against the claimed power form for its
/// d-parity. This audits the claim; search never filters on it.
pub fn form_classify(s: u64, d_parity: Parity) -> DiscriminantForm {
    if s == 0 {
        return DiscriminantForm::NonConforming {
            reason: NonConformity::ZeroRoot,
        };
    }
    let mut rest = s;
    let mut k = 0u32;
    while rest % 5 == 0 {
        rest /= 5;
        k += 1;
    }
    if k == 0 {
        return DiscriminantForm::NonConforming {
            reason: NonConformity::MissingFive,
        };
    }
    match d_parity {
        Parity::Even => {
            if rest % 2 != 0 {
                // Includes rest = 1 (s a pure power of 5): j ≥ 1 is required.
                DiscriminantForm::NonConforming {
                    reason: NonConformity::ParityMismatch,
                }
            } else if rest.is_power_of_two() {
                DiscriminantForm::PowerForm {
                    k,
                    j: rest.trailing_zeros(),
                    tau: None,
                }
            } else {
                DiscriminantForm::NonConforming {
                    reason: NonConformity::ExtraPrimeFactor,
                }
            }
        }
        Parity::Odd => {
            if rest % 2 == 0 {
                return DiscriminantForm::NonConforming {
                    reason: NonConformity::ParityMismatch,
                };
            }
            if rest == 1 {
                // s = 5^k exactly; canonicalized as τ = 1, j = 1.
                return DiscriminantForm::PowerForm {
                    k,
                    j: 1,
                    tau: Some(1),
                };
            }
            // Canonical decomposition: maximal j (so τ is not itself a
            // perfect power). Minimal τ is 3, bounding j by log₃ rest.
            let j_max = (rest as f64).log(3.0).floor() as u32 + 1;
            for j in (2..=j_max.max(2)).rev() {
                if let Some(tau) = exact_nth_root(rest, j) {
                    if tau > 1 {
                        return DiscriminantForm::PowerForm { k, j, tau: Some(tau) };
                    }
                }
            }
            DiscriminantForm::PowerForm {
                k,
                j: 1,
                tau: Some(rest),
            }
        }
    }
}

/// One hit of the distance search: the d where the discriminant became a
/// square, its root, the reconstructed representation, and the root's
/// power-form grade.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DSearchWitness {
    pub d: u64,
    pub s: u64,
    pub rep: Representation,
    pub form: DiscriminantForm,
}

impl DSearchWitness {
    /// The witness a known representation must produce — d and s follow
    /// algebraically from (a, b).
    pub fn from_representation(rep: &Representation) -> DSearchWitness {
        let d = rep.d();
        let s = rep.disc_root();
        DSearchWitness {
            d,
            s,
            rep: *rep,
            form: form_classify(s, Parity::of(d)),
        }
    }
}

/// Scan d over the case's interval and keep every d whose discriminant
/// (5d + shift)² − scale·p is a perfect square, reconstructing (a, b) from
/// the ± branches and validating the product exactly.
pub fn dsearch_representations(
    p: u64,
    case: ResidueCase,
    mode: RangeMode,
) -> Result<Vec<DSearchWitness>> {
    let range = d_bounds(p, case, mode)?;
    let mut out = Vec::new();
    let Some((lo, hi)) = range.iter_bounds() else {
        return Ok(out);
    };
    let shift = case.disc_shift();
    let sp = case.disc_scale() as u128 * p as u128;
    let v_end = 5 * hi as u128 + shift as u128;
    if let Ok(sp64) = u64::try_from(sp) {
        if v_end.checked_mul(v_end).is_some_and(|sq| sq <= u64::MAX as u128) {
            // Fast path: everything fits in u64 (covers p beyond 10⁹).
            for d in lo..=hi {
                let v = 5 * d + shift;
                if let Some(s) = is_perfect_square(v * v - sp64) {
                    emit_branches(p, case, d, s, &mut out);
                }
            }
            out.sort_by_key(|w| (w.d, w.rep.a()));
            return Ok(out);
        }
    }
    for d in lo..=hi {
        let v = 5 * d as u128 + shift as u128;
        if let Some(s) = is_perfect_square_u128(v * v - sp) {
            emit_branches(p, case, d, s as u64, &mut out);
        }
    }
    out.sort_by_key(|w| (w.d, w.rep.a()));
    Ok(out)
}

fn emit_branches(p: u64, case: ResidueCase, d: u64, s: u64, out: &mut Vec<DSearchWitness>) {
    let form = form_classify(s, Parity::of(d));
    let mut push = |a: u64, b: u64| {
        let rep = Representation::new(case, p, a, b)
            .expect("discriminant branch yields an exact factorization");
        out.push(DSearchWitness { d, s, rep, form });
    };
    match case {
        ResidueCase::SevenThree => {
            // a = (5(d − 4) ± s)/70, b = (d − 7a)/3; the branches can carry
            // two distinct ordered solutions at the same d.
            for num in [5 * d as i128 - 20 + s as i128, 5 * d as i128 - 20 - s as i128] {
                if num >= 0 && num % 70 == 0 {
                    let a = (num / 70) as u64;
                    let rest = d as i128 - 7 * a as i128;
                    if rest >= 0 && rest % 3 == 0 {
                        push(a, (rest / 3) as u64);
                    }
                }
                if s == 0 {
                    break; // both branches coincide
                }
            }
        }
        _ => {
            // a = (5d + s)/10 picks the larger element; the minus branch is
            // always the same unordered pair, so one branch suffices.
            let num = 5 * d + s;
            if num % 10 == 0 {
                let a = num / 10;
                if a <= d {
                    push(a, d - a);
                }
            }
        }
    }
}

/// One λ-form witness for the 73 class.
///
/// Form 1: a = (p − 21 − 10λ)/30 and b = 3λ/(p − 10λ) are exact naturals.
/// Form 2: a = 7λ/(p − 10λ) and b = (p − 21 − 10λ)/70 are exact naturals.
/// Either pair of exact quotients forces (10a+7)(10b+3) = p identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LambdaWitness {
    pub lambda: u64,
    pub form_index: u8,
    pub rep: Representation,
}

/// Every λ (both forms) whose component formulas evaluate to exact
/// naturals, found by inversion from candidate divisors: a divisor ≡ 3
/// (mod 10) fixes b and form 1's λ = b·(p/f); a divisor ≡ 7 fixes a and
/// form 2's λ = a·(p/f). λ = 0 (the 7·3 pair with a = b = 0) is admitted.
pub fn lambda_representations(p: u64) -> Result<Vec<LambdaWitness>> {
    ensure_ends_in_one(p)?;
    let mut out = Vec::new();
    let mut consider = |f: u64| {
        let g = p / f;
        match f % 10 {
            3 => {
                let b = (f - 3) / 10;
                let lambda = b * g;
                if let Some(w) = verify_lambda(p, lambda, 1) {
                    out.push(w);
                }
            }
            7 => {
                let a = (f - 7) / 10;
                let lambda = a * g;
                if let Some(w) = verify_lambda(p, lambda, 2) {
                    out.push(w);
                }
            }
            _ => {}
        }
    };
    scan_divisor_pairs(p, |f, g| {
        consider(f);
        if f != g {
            consider(g);
        }
    });
    out.sort_by_key(|w| (w.form_index, w.lambda, w.rep.a()));
    out.dedup();
    Ok(out)
}

/// Check both component formulas of one λ-form exactly; build the witness
/// only when both quotients are exact naturals.
fn verify_lambda(p: u64, lambda: u64, form_index: u8) -> Option<LambdaWitness> {
    let ten_lambda = 10 * lambda;
    if ten_lambda + 21 > p {
        return None;
    }
    let linear = p - 21 - ten_lambda; // numerator of the linear component
    let den = p - ten_lambda; // divisor of the rational component, ≥ 21
    let (a, b) = match form_index {
        1 => {
            if linear % 30 != 0 || (3 * lambda) % den != 0 {
                return None;
            }
            (linear / 30, 3 * lambda / den)
        }
        2 => {
            if linear % 70 != 0 || (7 * lambda) % den != 0 {
                return None;
            }
            (7 * lambda / den, linear / 70)
        }
        _ => unreachable!("form index is 1 or 2"),
    };
    let rep = Representation::new(ResidueCase::SevenThree, p, a, b)
        .expect("exact lambda quotients force the product identity");
    Some(LambdaWitness {
        lambda,
        form_index,
        rep,
    })
}
