//! Decision procedures for the q-expansion principles, read off truncated
//! expansions.
//!
//! Every answer is relative to what the truncation determines. A verdict of
//! [`Verdict::Unknown`] means the stored data is consistent with both answers,
//! and a `note` records coefficients that vanished only modulo `p^abs_prec`.

use std::collections::BTreeMap;
use std::fmt;

use crate::coeff::CycloCoeff;
use crate::error::{Error, Result};
use crate::series::{Exponent, FamilySeries, FracSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    /// `no` dominates `unknown`, which dominates `yes`.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
            (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
            _ => Verdict::Yes,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Yes => 0,
            Verdict::No => 1,
            Verdict::Unknown => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown-at-precision",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrincipleVerdict {
    pub verdict: Verdict,
    /// Present whenever `verdict` is `No`.
    pub witness: Option<(Exponent, CycloCoeff)>,
    pub note: Option<String>,
}

impl PrincipleVerdict {
    fn yes() -> Self {
        PrincipleVerdict {
            verdict: Verdict::Yes,
            witness: None,
            note: None,
        }
    }

    fn no(e: &Exponent, c: &CycloCoeff) -> Self {
        PrincipleVerdict {
            verdict: Verdict::No,
            witness: Some((*e, c.clone())),
            note: None,
        }
    }

    fn unknown(note: String) -> Self {
        PrincipleVerdict {
            verdict: Verdict::Unknown,
            witness: None,
            note: Some(note),
        }
    }

    fn with_note(mut self, note: Option<String>) -> Self {
        if self.note.is_none() {
            self.note = note;
        }
        self
    }
}

fn vanished_note(f: &FracSeries, filter: impl Fn(&Exponent) -> bool) -> Option<String> {
    let p = f.p();
    let hits: Vec<String> = f.vanished().iter().filter(|e| filter(e)).map(|e| e.to_text(p)).collect();
    (!hits.is_empty()).then(|| {
        format!(
            "coefficients at {} vanish only modulo p^{}",
            hits.join(", "),
            f.abs_prec()
        )
    })
}

/// Whether the expansion has no pole at the cusp.
///
/// The witness is the most negative exponent with a nonzero coefficient. When
/// the degree bound itself is negative, the coefficients in
/// `(deg_bound, 0)` are unknown and so is the answer.
pub fn extends_to_cusp(f: &FracSeries) -> PrincipleVerdict {
    let note = vanished_note(f, Exponent::is_negative);
    if let Some((e, c)) = f.terms().next() {
        if e.is_negative() {
            return PrincipleVerdict::no(e, c);
        }
    }
    if f.deg_bound().is_negative() {
        return PrincipleVerdict::unknown(format!(
            "no coefficients known above q^{}",
            f.deg_bound().to_text(f.p())
        ));
    }
    PrincipleVerdict::yes().with_note(note)
}

/// The least `n` with every stored exponent in `(1/p^n)Z`.
pub fn detect_level(f: &FracSeries) -> Result<u32> {
    if f.is_laurent() {
        return Err(Error::LaurentInput("detect_level"));
    }
    Ok(f.max_depth())
}

/// Whether every coefficient lies in `O_L`.
///
/// Undecidable when the series is only known modulo a negative power of `p`.
pub fn is_integral(f: &FracSeries) -> Result<PrincipleVerdict> {
    if f.is_laurent() {
        return Err(Error::LaurentInput("is_integral"));
    }
    // Normalized coefficients have val_p < 0 exactly when the shift is negative.
    if let Some((e, c)) = f.terms().find(|(_, c)| c.shift() < 0) {
        return Ok(PrincipleVerdict::no(e, c));
    }
    if f.abs_prec() < 0 {
        return Ok(PrincipleVerdict::unknown(format!(
            "coefficients known only modulo p^{}",
            f.abs_prec()
        )));
    }
    Ok(PrincipleVerdict::yes())
}

/// Whether every coefficient is zero at the working precision.
///
/// A coefficient that cancelled only modulo `p^abs_prec` still counts as zero;
/// the note lists where that happened.
pub fn zero_test(f: &FracSeries) -> PrincipleVerdict {
    match f.terms().next() {
        Some((e, c)) => PrincipleVerdict::no(e, c),
        None => PrincipleVerdict::yes().with_note(vanished_note(f, |_| true)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decider {
    Extends,
    Level,
    Integral,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Verdict(PrincipleVerdict),
    Level(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyReport {
    pub members: BTreeMap<u64, Outcome>,
    pub aggregate: Outcome,
    /// Residue class responsible for the aggregate: the first `no` (or
    /// `unknown`) member, or the first member of maximal level.
    pub witness_class: Option<u64>,
}

/// Runs a decider on every member of a family and aggregates.
pub fn family_decide(family: &FamilySeries, which: Decider) -> Result<FamilyReport> {
    let mut members = BTreeMap::new();
    for (a, f) in family.iter() {
        let out = match which {
            Decider::Extends => Outcome::Verdict(extends_to_cusp(f)),
            Decider::Integral => Outcome::Verdict(is_integral(f)?),
            Decider::Level => Outcome::Level(detect_level(f)?),
        };
        members.insert(a, out);
    }
    let (aggregate, witness_class) = match which {
        Decider::Level => {
            let mut best: Option<(u32, u64)> = None;
            for (a, out) in &members {
                if let Outcome::Level(n) = out {
                    if best.is_none_or(|(m, _)| *n > m) {
                        best = Some((*n, *a));
                    }
                }
            }
            let (n, a) = best.unwrap_or((0, 0));
            (Outcome::Level(n), best.map(|_| a))
        }
        _ => {
            let mut agg = PrincipleVerdict::yes();
            let mut class = None;
            for (a, out) in &members {
                if let Outcome::Verdict(v) = out {
                    let combined = agg.verdict.and(v.verdict);
                    if combined != agg.verdict {
                        agg = v.clone();
                        class = Some(*a);
                    }
                }
            }
            (Outcome::Verdict(agg), class)
        }
    };
    Ok(FamilyReport {
        members,
        aggregate,
        witness_class,
    })
}
