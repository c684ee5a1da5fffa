//! The j-invariant, its compositional inverse, and Tate parameters.
//!
//! Coefficients are generated over the integers with [`BigInt`] and only
//! then reduced into a coefficient ring. `j` is computed as `E_4^3 / Δ` with
//! `Δ = q ∏ (1 - q^n)^24` and `E_4 = 1 + 240 Σ σ_3(n) q^n`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::coeff::{Ctx, CycloCoeff, Valuation};
use crate::error::{Error, Result};
use crate::series::{Exponent, FracSeries};

fn sigma(n: u64, power: u32) -> BigInt {
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .map(|d| BigInt::from(d).pow(power))
        .sum()
}

fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Power series quotient `a / b` over `Z`; `b[0]` must be `±1`.
fn div_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    assert!(b[0] == BigInt::one() || b[0] == -BigInt::one());
    let mut out = vec![BigInt::zero(); len];
    for n in 0..len {
        let mut acc = a.get(n).cloned().unwrap_or_default();
        for i in 1..=n.min(b.len() - 1) {
            acc -= &b[i] * &out[n - i];
        }
        out[n] = acc * &b[0];
    }
    out
}

/// `1 + 240 Σ σ_3(n) q^n`, coefficients of `q^0 .. q^(len-1)`.
pub fn e4_coefficients(len: usize) -> Vec<BigInt> {
    (0..len as u64)
        .map(|n| if n == 0 { BigInt::one() } else { sigma(n, 3) * 240 })
        .collect()
}

/// `∏_{n>=1} (1 - q^n)^24`, coefficients of `q^0 .. q^(len-1)`.
fn eta24_coefficients(len: usize) -> Vec<BigInt> {
    let mut prod = vec![BigInt::zero(); len];
    prod[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..24 {
            for i in (n..len).rev() {
                let t = prod[i - n].clone();
                prod[i] -= t;
            }
        }
    }
    prod
}

/// `Δ = q ∏ (1 - q^n)^24`, coefficients of `q^0 .. q^(len-1)`.
pub fn delta_coefficients(len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero()];
    out.extend(eta24_coefficients(len.saturating_sub(1)));
    out.truncate(len);
    out
}

/// `q · j(q) = E_4^3 / ∏(1 - q^n)^24`, coefficients of `q^0 .. q^(len-1)`.
fn qj_coefficients(len: usize) -> Vec<BigInt> {
    let e4 = e4_coefficients(len);
    let e4_cubed = mul_trunc(&mul_trunc(&e4, &e4, len), &e4, len);
    div_trunc(&e4_cubed, &eta24_coefficients(len), len)
}

/// Coefficients of `q^-1, q^0, …, q^n_terms` of `j`.
pub fn j_coefficients(n_terms: usize) -> Vec<BigInt> {
    qj_coefficients(n_terms + 2)
}

/// Coefficients of `w^1 .. w^n_terms` of `q(w)`, where `w = 1/j`, by Lagrange
/// inversion: `[w^n] q = (1/n) [q^(n-1)] (q·j(q))^n`.
pub fn j_inverse_coefficients(n_terms: usize) -> Vec<BigInt> {
    let a = qj_coefficients(n_terms.max(1));
    let mut power = vec![BigInt::one()];
    power.resize(n_terms.max(1), BigInt::zero());
    (1..=n_terms)
        .map(|n| {
            power = mul_trunc(&power, &a, n_terms);
            let (q, r) = power[n - 1].div_rem(&BigInt::from(n));
            debug_assert!(r.is_zero());
            q
        })
        .collect()
}

fn integer_series(
    ctx: &Ctx,
    first_exponent: i64,
    coeffs: &[BigInt],
    deg_bound: i64,
    laurent: bool,
) -> Result<FracSeries> {
    let terms = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (Exponent::integer(first_exponent + i as i64), CycloCoeff::from_bigint(ctx, c)));
    FracSeries::from_terms(ctx, terms, Exponent::integer(deg_bound), 0, laurent)
}

/// `j = q^-1 + 744 + 196884 q + …`, known through `q^n_terms`.
pub fn j_series(ctx: &Ctx, n_terms: usize) -> Result<FracSeries> {
    if n_terms < 1 {
        return Err(Error::Precondition("j_series needs at least one term".into()));
    }
    integer_series(ctx, -1, &j_coefficients(n_terms), n_terms as i64, true)
}

/// `Δ`, known through `q^n_terms`.
pub fn delta_series(ctx: &Ctx, n_terms: usize) -> Result<FracSeries> {
    integer_series(ctx, 0, &delta_coefficients(n_terms + 1), n_terms as i64, false)
}

/// `E_4`, known through `q^n_terms`.
pub fn e4_series(ctx: &Ctx, n_terms: usize) -> Result<FracSeries> {
    integer_series(ctx, 0, &e4_coefficients(n_terms + 1), n_terms as i64, false)
}

/// `q(w) = w + 744 w^2 + 750420 w^3 + …` with `w = 1/j`, known through `w^n_terms`.
///
/// Obtained by reverting the series `1/j = q - 744 q^2 + …` in the ring.
pub fn j_inverse_series(ctx: &Ctx, n_terms: usize) -> Result<FracSeries> {
    if n_terms < 1 {
        return Err(Error::Precondition("j_inverse_series needs at least one term".into()));
    }
    let j = j_series(ctx, n_terms)?;
    let reciprocal = j.inverse()?;
    // 1/j is known through q^(n_terms + 2); only n_terms are requested.
    let reciprocal = FracSeries::from_terms(
        ctx,
        reciprocal
            .terms()
            .filter(|(e, _)| e.numer() <= n_terms as i64)
            .map(|(e, c)| (*e, c.clone())),
        Exponent::integer(n_terms as i64),
        0,
        false,
    )?;
    reciprocal.revert()
}

/// The Tate parameter `q_E` with `j(q_E) = jval`, for `val_p(jval) < 0`.
///
/// Evaluates `q(1/j)` p-adically, summing until the terms fall below the
/// precision of `1/j`.
pub fn tate_parameter_from_j(jval: &CycloCoeff) -> Result<CycloCoeff> {
    let v = jval.val_p();
    if v >= Valuation::integer(0) {
        return Err(Error::NotNilpotent(v.to_string()));
    }
    let ctx = jval.ctx();
    let w = jval.inv()?;
    let step = w.shift();
    debug_assert!(step > 0);
    let rel = w.precision() as i64;
    let target = step + rel;
    // Terms w^n with n·step >= target vanish.
    let n_max = ((target - 1) / step) as usize;
    let coeffs = j_inverse_coefficients(n_max);
    let mut acc = CycloCoeff::zero(ctx);
    let mut power = CycloCoeff::one(ctx);
    for c in &coeffs {
        power = &power * &w;
        acc = &acc + &(&CycloCoeff::from_bigint(ctx, c) * &power);
    }
    Ok(acc.truncate_abs(target))
}
