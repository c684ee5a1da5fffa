//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcusp::action::Mat2;
use qcusp::tiltperf::CharPSeries;
use qcusp::{Ctx, CycloCoeff, Exponent, FracSeries};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero coefficient `p^shift · u` with `shift` drawn from `shifts`.
pub fn coeff(rng: &mut ChaCha8Rng, ctx: &Ctx, shifts: std::ops::RangeInclusive<i64>) -> CycloCoeff {
    let m = ctx.modulus();
    loop {
        let poly: Vec<BigInt> = (0..ctx.degree()).map(|_| BigInt::from(rng.gen_range(0..m))).collect();
        let c = CycloCoeff::from_poly(ctx, rng.gen_range(shifts.clone()), &poly);
        if !c.is_zero() {
            return c;
        }
    }
}

pub fn exponent(rng: &mut ChaCha8Rng, p: u64, max_depth: u32, lo: i64, hi: i64) -> Exponent {
    let r = rng.gen_range(0..=max_depth);
    let pr = (p as i64).pow(r);
    Exponent::new(rng.gen_range(lo * pr..=hi * pr), r, p)
}

/// Random non-Laurent series with exponents in `[0, deg]` of depth at most
/// `max_depth` and integral coefficients.
pub fn series(rng: &mut ChaCha8Rng, ctx: &Ctx, max_depth: u32, deg: i64, max_terms: usize) -> FracSeries {
    let p = ctx.p();
    let n = rng.gen_range(1..=max_terms);
    let mut terms = std::collections::BTreeMap::new();
    for _ in 0..n {
        terms.insert(exponent(rng, p, max_depth, 0, deg), coeff(rng, ctx, 0..=2));
    }
    FracSeries::from_terms(ctx, terms, Exponent::integer(deg), max_depth, false).unwrap()
}

/// Random Laurent series with integer exponents in `[lo, hi]`.
pub fn laurent(
    rng: &mut ChaCha8Rng,
    ctx: &Ctx,
    lo: i64,
    hi: i64,
    max_terms: usize,
    shifts: std::ops::RangeInclusive<i64>,
) -> FracSeries {
    let n = rng.gen_range(1..=max_terms);
    let mut terms = std::collections::BTreeMap::new();
    for _ in 0..n {
        terms.insert(Exponent::integer(rng.gen_range(lo..=hi)), coeff(rng, ctx, shifts.clone()));
    }
    FracSeries::from_terms(ctx, terms, Exponent::integer(hi), 0, true).unwrap()
}

pub fn charp(rng: &mut ChaCha8Rng, p: u64, max_depth: u32, deg: i64, max_terms: usize) -> CharPSeries {
    let n = rng.gen_range(1..=max_terms);
    let mut terms = std::collections::BTreeMap::new();
    for _ in 0..n {
        terms.insert(exponent(rng, p, max_depth, 0, deg), rng.gen_range(1..p));
    }
    CharPSeries::new(p, terms, Exponent::integer(deg), max_depth, false).unwrap()
}

pub fn unit(rng: &mut ChaCha8Rng, p: u64, m: u32) -> i64 {
    let n = p.pow(m);
    loop {
        let a = rng.gen_range(0..n);
        if a % p != 0 {
            return a as i64;
        }
    }
}

/// Random element of `Γ_0(p)` modulo `p^m`.
pub fn gamma0(rng: &mut ChaCha8Rng, p: u64, m: u32) -> Mat2 {
    let n = p.pow(m) as i64;
    let (a, d) = (unit(rng, p, m), unit(rng, p, m));
    let b = rng.gen_range(0..n);
    let c = p as i64 * rng.gen_range(0..n / p as i64);
    Mat2::new(p, m, a, b, c, d).unwrap()
}

/// Random upper triangular element of `GL_2(Z/p^m)`.
pub fn upper(rng: &mut ChaCha8Rng, p: u64, m: u32) -> Mat2 {
    let n = p.pow(m) as i64;
    Mat2::new(p, m, unit(rng, p, m), rng.gen_range(0..n), 0, unit(rng, p, m)).unwrap()
}

/// Shuffles the term lines of a series file, keeping the header in place.
pub fn shuffle_terms(text: &str, rng: &mut ChaCha8Rng) -> String {
    let (mut head, mut body): (Vec<&str>, Vec<&str>) = (Vec::new(), Vec::new());
    for line in text.lines() {
        if line.contains(':') {
            body.push(line);
        } else {
            head.push(line);
        }
    }
    body.shuffle(rng);
    let mut out = head.join("\n");
    out.push('\n');
    for line in body {
        out.push_str(line);
        out.push('\n');
    }
    out
}
