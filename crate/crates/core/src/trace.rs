//! Normalized Tate traces.
//!
//! On q-expansions the normalized trace `tr_n` from infinite level down to
//! `Γ_0(p^n)` keeps the terms whose exponent lies in `(1/p^n)Z` and forgets
//! the rest. [`tate_trace`] is that projection. [`galois_average`] computes
//! the same thing the long way, as `p^-(k-n)` times the sum of the
//! `p^(k-n)` twists `q^{1/p^k} ↦ ζ^{d p^n} q^{1/p^k}`, and serves as an
//! independent check; it costs `k - n` digits of p-adic precision.

use crate::coeff::CycloCoeff;
use crate::error::{Error, Result};
use crate::series::FracSeries;

/// `tr_n`: keep exactly the terms of depth at most `n`.
pub fn tate_trace(f: &FracSeries, n: u32) -> Result<FracSeries> {
    if f.is_laurent() {
        return Err(Error::LaurentInput("tate_trace"));
    }
    Ok(f.project_depth(n))
}

/// `p^-(k-n) · Σ_{d mod p^(k-n)} twist(f, d·p^n, e)`.
pub fn galois_average(f: &FracSeries, k: u32, n: u32, e: i64) -> Result<FracSeries> {
    if f.is_laurent() {
        return Err(Error::LaurentInput("galois_average"));
    }
    let ctx = f.ctx();
    if ctx.s() < k {
        return Err(Error::InsufficientDepth {
            needed: k,
            available: ctx.s(),
        });
    }
    if n > k {
        return Err(Error::Precondition(format!("target level {n} above source level {k}")));
    }
    if f.max_depth() > k {
        return Err(Error::Precondition(format!(
            "series has depth {} above the source level {k}",
            f.max_depth()
        )));
    }
    let p = ctx.p() as i64;
    let drop = k - n;
    let step = p.pow(n);
    let mut acc = FracSeries::zero(ctx, f.deg_bound(), f.depth_bound(), false);
    for d in 0..p.pow(drop) {
        acc = acc.checked_add(&f.twist(d * step, e)?)?;
    }
    acc.scale(&CycloCoeff::one(ctx).mul_p_power(-(drop as i64)))
}
