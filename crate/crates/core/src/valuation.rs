//! Rank-two valuations on Laurent q-expansions.
//!
//! Values live in `R_{>0} × γ^Z` with `γ` infinitesimally below 1. They are
//! stored additively as `(v, g)` for the absolute value `p^{-v}·γ^g`, so the
//! derived order on `Rank2Value` is the additive one: larger means smaller
//! absolute value. [`Rank2Value::abs_cmp`] compares absolute values.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;

use crate::coeff::Valuation;
use crate::error::{Error, Result};
use crate::series::FracSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rank2Value {
    pub v: Valuation,
    pub g: i64,
}

impl Rank2Value {
    pub fn new(v: Valuation, g: i64) -> Self {
        Rank2Value { v, g }
    }

    pub fn finite(v: i64, g: i64) -> Self {
        Rank2Value {
            v: Valuation::integer(v),
            g,
        }
    }

    /// The value of `1`.
    pub fn one() -> Self {
        Self::finite(0, 0)
    }

    /// The value of `0`.
    pub fn zero() -> Self {
        Rank2Value {
            v: Valuation::Infinite,
            g: 0,
        }
    }

    /// Compares absolute values: `|x| > |y|` iff `v_x < v_y`, or `v_x = v_y`
    /// and `g_x < g_y`.
    pub fn abs_cmp(&self, other: &Self) -> Ordering {
        other.cmp(self)
    }
}

impl std::ops::Add for Rank2Value {
    type Output = Rank2Value;

    /// Value of a product.
    fn add(self, rhs: Rank2Value) -> Rank2Value {
        let v = match (self.v, rhs.v) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => return Rank2Value::zero(),
        };
        Rank2Value { v, g: self.g + rhs.g }
    }
}

impl fmt::Display for Rank2Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.v, self.g)
    }
}

/// `Σ a_n q^n ↦ max_n |a_n| γ^n`, in additive form the least `(val_p(a_n), n)`.
pub fn v1minus(f: &FracSeries) -> Result<Rank2Value> {
    let mut best = Rank2Value::zero();
    for (e, c) in f.terms() {
        if !e.is_integer() {
            return Err(Error::FractionalExponent(e.to_text(f.p())));
        }
        best = best.min(Rank2Value::new(c.val_p(), e.numer()));
    }
    Ok(best)
}

/// The rank-one generisation: forget the `γ` component.
pub fn generise(val: &Rank2Value) -> Valuation {
    val.v
}

/// Membership in the valuation ring of `v1minus`: `|f| ≤ 1`.
pub fn in_fplus(f: &FracSeries) -> Result<bool> {
    Ok(v1minus(f)? >= Rank2Value::one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointType {
    /// `|j| ≤ 1`.
    A,
    /// `|j| > 1` with `|j|^-1` cofinal: the real part exceeds 1.
    B,
    /// `|j|` infinitesimally above 1.
    C,
}

impl fmt::Display for PointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointType::A => "a",
            PointType::B => "b",
            PointType::C => "c",
        })
    }
}

/// Type of a point from the value of `j` there.
pub fn classify_point(jv: &Rank2Value) -> PointType {
    let zero = Valuation::Finite(Ratio::from_integer(0));
    if *jv >= Rank2Value::one() {
        PointType::A
    } else if jv.v < zero {
        PointType::B
    } else {
        debug_assert!(jv.v == zero && jv.g < 0);
        PointType::C
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CycloCoeff, RingCtx};
    use crate::modular::j_series;
    use crate::series::Exponent;

    #[test]
    fn value_examples() {
        let ctx = RingCtx::new(5, 6, 0).unwrap();
        let mono = |n: i64, c: CycloCoeff| {
            FracSeries::from_terms(&ctx, [(Exponent::integer(n), c)], Exponent::integer(4), 0, true).unwrap()
        };
        let one = CycloCoeff::one(&ctx);
        let q = mono(1, one.clone());
        assert_eq!(v1minus(&q).unwrap(), Rank2Value::finite(0, 1));
        assert_eq!(v1minus(&q).unwrap().abs_cmp(&Rank2Value::one()), Ordering::Less);

        let f = &mono(-1, one.mul_p_power(1)) + &mono(0, one.clone());
        assert_eq!(v1minus(&f).unwrap(), Rank2Value::one());
        assert!(in_fplus(&mono(-1, one.mul_p_power(1))).unwrap());
        assert!(!in_fplus(&mono(-1, one.clone())).unwrap());
        let g = &mono(0, CycloCoeff::from_int(&ctx, 744)) + &q;
        assert!(in_fplus(&g).unwrap());

        for e in 1..=3 {
            let j = j_series(&ctx, 4).unwrap().rescale(e).unwrap();
            let v = v1minus(&j).unwrap();
            assert_eq!(v, Rank2Value::finite(0, -e));
            assert_eq!(generise(&v), Valuation::integer(0));
            assert_eq!(classify_point(&v), PointType::C);
        }
    }

    #[test]
    fn classification() {
        assert_eq!(classify_point(&Rank2Value::finite(1, 0)), PointType::A);
        assert_eq!(classify_point(&Rank2Value::finite(-2, 5)), PointType::B);
        assert_eq!(classify_point(&Rank2Value::zero()), PointType::A);
        assert_eq!(classify_point(&Rank2Value::finite(0, 0)), PointType::A);
        assert_eq!(generise(&Rank2Value::finite(3, -7)), Valuation::integer(3));
        assert_eq!(generise(&Rank2Value::zero()), Valuation::Infinite);
    }
}
