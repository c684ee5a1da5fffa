//! Truncated cyclotomic p-adic coefficients.
//!
//! A [`RingCtx`] fixes a prime `p`, a precision `k` and a cyclotomic depth
//! `s`, and stands for `Z[x]/(Φ_{p^s}(x), p^k)`: the ring `Z_p[ζ_{p^s}]`
//! truncated modulo `p^k`, with `x` playing the role of `ζ_{p^s}`.
//!
//! A [`CycloCoeff`] is an element `p^t · u` of the fraction field, where the
//! unit part `u` is a residue in the truncated ring that is not divisible by
//! `p`. Each element carries a relative precision: `u` is known modulo
//! `p^prec`, so the element is known modulo `p^(t + prec)`. Additions align
//! the absolute precisions of their operands and renormalize, so carries
//! and cancellations are tracked rather than silently lost.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{self, add_mod, inv_mod, mul_mod, sub_mod};
use crate::error::{Error, Result};

/// Largest supported cyclotomic depth.
pub const MAX_DEPTH: u32 = 4;

/// Shared handle to a coefficient ring.
pub type Ctx = Arc<RingCtx>;

/// The ring `Z[x]/(Φ_{p^s}(x), p^k)`.
#[derive(Debug)]
pub struct RingCtx {
    p: u64,
    k: u32,
    s: u32,
    /// `pows[i] = p^i` for `0 <= i <= k`.
    pows: Vec<u64>,
    degree: usize,
    order: usize,
    cyclotomic: Vec<i64>,
    /// Nonzero lower coefficients of the cyclotomic polynomial.
    reducer: Vec<(usize, i64)>,
}

impl PartialEq for RingCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.s == other.s
    }
}

impl Eq for RingCtx {}

impl RingCtx {
    /// Builds `Z[x]/(Φ_{p^s}, p^k)`. With `s = 0` this is `Z/p^k`.
    pub fn new(p: u64, k: u32, s: u32) -> Result<Ctx> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 1 {
            return Err(Error::InvalidPrecision(format!("k = {k} must be at least 1")));
        }
        if s > MAX_DEPTH {
            return Err(Error::InvalidPrecision(format!(
                "cyclotomic depth {s} exceeds {MAX_DEPTH}"
            )));
        }
        let modulus = arith::checked_pow(p, k)
            .filter(|&m| m < (1u64 << 62))
            .ok_or_else(|| Error::InvalidPrecision(format!("p^k = {p}^{k} does not fit")))?;
        let order = arith::checked_pow(p, s)
            .filter(|&n| n <= 1 << 16)
            .ok_or_else(|| Error::InvalidPrecision(format!("p^s = {p}^{s} is too large")))?
            as usize;
        let pows: Vec<u64> = (0..=k).map(|i| p.pow(i)).collect();
        debug_assert_eq!(pows[k as usize], modulus);

        let cyclotomic = cyclotomic_prime_power(p, s);
        let degree = cyclotomic.len() - 1;
        let reducer = cyclotomic[..degree]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        Ok(Arc::new(RingCtx {
            p,
            k,
            s,
            pows,
            degree,
            order,
            cyclotomic,
            reducer,
        }))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// `p^k`.
    pub fn modulus(&self) -> u64 {
        self.pows[self.k as usize]
    }

    /// Degree of `Φ_{p^s}`, i.e. `φ(p^s)`; 1 when `s = 0`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients of `Φ_{p^s}`, constant term first.
    pub fn cyclotomic(&self) -> &[i64] {
        &self.cyclotomic
    }

    pub(crate) fn pow_p(&self, e: u32) -> u64 {
        self.pows[e as usize]
    }

    /// Reduces a coefficient vector of any length modulo `Φ_{p^s}` and `m`.
    fn reduce_poly(&self, mut v: Vec<u64>, m: u64) -> Vec<u64> {
        let n = self.degree;
        for top in (n..v.len()).rev() {
            let c = v[top] % m;
            if c == 0 {
                continue;
            }
            for &(i, phi) in &self.reducer {
                let idx = top - n + i;
                let t = mul_mod(c, arith::reduce_i128(phi as i128, m), m);
                v[idx] = sub_mod(v[idx], t, m);
            }
        }
        v.truncate(n);
        v.resize(n, 0);
        v.iter_mut().for_each(|c| *c %= m);
        v
    }

    fn poly_mul(&self, a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
        let n = self.degree;
        let mut acc = vec![0u128; 2 * n - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    acc[i + j] += (ai as u128 * bj as u128) % m as u128;
                }
            }
        }
        let v = acc.into_iter().map(|c| (c % m as u128) as u64).collect();
        self.reduce_poly(v, m)
    }

    /// Reduction of an integral residue polynomial modulo the maximal ideal:
    /// `ζ ↦ 1`, landing in the residue field `F_p`.
    fn residue_at_one(&self, unit: &[u64]) -> u64 {
        unit.iter().fold(0, |acc, &c| (acc + c % self.p) % self.p)
    }

    /// `π`-adic valuation of a residue polynomial not divisible by `p`,
    /// where `π = ζ_{p^s} - 1`. Always `< φ(p^s)`.
    fn pi_valuation(&self, unit: &[u64]) -> u32 {
        if self.s == 0 {
            return 0;
        }
        let p = self.p;
        // Taylor shift x = y + 1 over F_p via Horner.
        let mut shifted = vec![0u64; self.degree];
        for &c in unit.iter().rev() {
            for j in (1..shifted.len()).rev() {
                shifted[j] = (shifted[j] + shifted[j - 1]) % p;
            }
            shifted[0] = (shifted[0] + c % p) % p;
        }
        shifted
            .iter()
            .position(|&c| c != 0)
            .expect("unit part is not divisible by p") as u32
    }
}

/// `Φ_{p^s} = (x^{p^s} - 1) / (x^{p^{s-1}} - 1)`, by exact division.
fn cyclotomic_prime_power(p: u64, s: u32) -> Vec<i64> {
    if s == 0 {
        return vec![-1, 1];
    }
    let big = p.pow(s) as usize;
    let small = p.pow(s - 1) as usize;
    let mut num = vec![0i64; big + 1];
    num[0] = -1;
    num[big] = 1;
    let mut quot = vec![0i64; big - small + 1];
    // Divisor x^small - 1 is monic.
    for top in (small..=big).rev() {
        let c = num[top];
        if c == 0 {
            continue;
        }
        quot[top - small] = c;
        num[top] -= c;
        num[top - small] += c;
    }
    debug_assert!(num.iter().all(|&c| c == 0));
    quot
}

/// A p-adic valuation: rational, or `+∞` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(Ratio<i64>),
    Infinite,
}

impl Valuation {
    pub fn integer(v: i64) -> Self {
        Valuation::Finite(Ratio::from_integer(v))
    }

    pub fn finite(&self) -> Option<Ratio<i64>> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Infinite => write!(f, "inf"),
            Valuation::Finite(v) if *v.denom() == 1 => write!(f, "{}", v.numer()),
            Valuation::Finite(v) => write!(f, "{}/{}", v.numer(), v.denom()),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    /// Zero modulo `p^abs`; `None` is an exact zero.
    Zero { abs: Option<i64> },
    /// `p^shift · unit`, with `unit` known modulo `p^prec` and not divisible by `p`.
    Nonzero {
        shift: i64,
        unit: Vec<u64>,
        prec: u32,
    },
}

/// An element `p^t · u` of `Q_p(ζ_{p^s})`, truncated.
#[derive(Clone, Debug)]
pub struct CycloCoeff {
    ctx: Ctx,
    repr: Repr,
}

impl CycloCoeff {
    pub fn zero(ctx: &Ctx) -> Self {
        CycloCoeff {
            ctx: ctx.clone(),
            repr: Repr::Zero { abs: None },
        }
    }

    /// Zero known only modulo `p^abs`.
    pub fn zero_mod(ctx: &Ctx, abs: i64) -> Self {
        CycloCoeff {
            ctx: ctx.clone(),
            repr: Repr::Zero { abs: Some(abs) },
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        Self::from_int(ctx, 1)
    }

    /// An exact integer, stored with full relative precision `k`.
    pub fn from_int(ctx: &Ctx, n: i64) -> Self {
        Self::from_poly(ctx, 0, &[BigInt::from(n)])
    }

    pub fn from_bigint(ctx: &Ctx, n: &BigInt) -> Self {
        Self::from_poly(ctx, 0, std::slice::from_ref(n))
    }

    /// `p^shift · Σ c_i x^i` for exact integers `c_i`, at full relative precision.
    pub fn from_poly(ctx: &Ctx, shift: i64, coeffs: &[BigInt]) -> Self {
        // Exact reduction modulo Φ over Z first, so the p-part is exact.
        let n = ctx.degree;
        let mut v: Vec<BigInt> = coeffs.to_vec();
        for top in (n..v.len()).rev() {
            let c = std::mem::take(&mut v[top]);
            if c.is_zero() {
                continue;
            }
            for &(i, phi) in &ctx.reducer {
                v[top - n + i] -= &c * phi;
            }
        }
        v.resize(n, BigInt::zero());
        let p = BigInt::from(ctx.p);
        let mut extra = 0i64;
        if v.iter().all(|c| c.is_zero()) {
            return Self::zero(ctx);
        }
        while v.iter().all(|c| c.is_multiple_of(&p)) {
            v.iter_mut().for_each(|c| *c /= &p);
            extra += 1;
        }
        let m = BigInt::from(ctx.modulus());
        let unit = v
            .iter()
            .map(|c| c.mod_floor(&m).to_u64().expect("reduced below modulus"))
            .collect();
        CycloCoeff {
            ctx: ctx.clone(),
            repr: Repr::Nonzero {
                shift: shift + extra,
                unit,
                prec: ctx.k,
            },
        }
    }

    /// Primitive `p^n`-th root of unity `ζ_{p^n} = x^{p^(s-n)}`.
    pub fn zeta(ctx: &Ctx, n: u32) -> Result<Self> {
        if n > ctx.s {
            return Err(Error::InsufficientDepth {
                needed: n,
                available: ctx.s,
            });
        }
        let e = ctx.p.pow(ctx.s - n) as usize;
        Ok(Self::one(ctx).mul_root_power(e as i64))
    }

    /// Normalizes `p^shift · residues` where the residues are known mod `p^prec`.
    fn from_residues(ctx: &Ctx, shift: i64, mut residues: Vec<u64>, prec: u32) -> Self {
        if prec == 0 {
            return Self::zero_mod(ctx, shift);
        }
        let m = ctx.pow_p(prec);
        residues.iter_mut().for_each(|c| *c %= m);
        let v = residues
            .iter()
            .map(|&c| if c == 0 { prec } else { arith::val_p_i128(c as i128, ctx.p).unwrap() })
            .min()
            .unwrap_or(prec);
        if v >= prec {
            return Self::zero_mod(ctx, shift + prec as i64);
        }
        let d = ctx.pow_p(v);
        let new_prec = prec - v;
        let nm = ctx.pow_p(new_prec);
        let unit = residues.into_iter().map(|c| (c / d) % nm).collect();
        CycloCoeff {
            ctx: ctx.clone(),
            repr: Repr::Nonzero {
                shift: shift + v as i64,
                unit,
                prec: new_prec,
            },
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// True for exact zeros and zeros modulo a power of `p`.
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: None })
    }

    /// The exponent `t` in `p^t · u`; zero for zero.
    pub fn shift(&self) -> i64 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Nonzero { shift, .. } => *shift,
        }
    }

    /// Residues of the unit part, `φ(p^s)` entries; empty for zero.
    pub fn unit_part(&self) -> &[u64] {
        match &self.repr {
            Repr::Zero { .. } => &[],
            Repr::Nonzero { unit, .. } => unit,
        }
    }

    /// Relative precision of the unit part; zero for zero.
    pub fn precision(&self) -> u32 {
        match &self.repr {
            Repr::Zero { .. } => 0,
            Repr::Nonzero { prec, .. } => *prec,
        }
    }

    /// The element is known modulo `p^abs`; `None` for an exact zero.
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.repr {
            Repr::Zero { abs } => *abs,
            Repr::Nonzero { shift, prec, .. } => Some(shift + *prec as i64),
        }
    }

    /// Forgets everything beyond absolute precision `p^abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match &self.repr {
            Repr::Zero { abs: a } => {
                let a = a.map_or(abs, |a| a.min(abs));
                Self::zero_mod(&self.ctx, a)
            }
            Repr::Nonzero { shift, unit, prec } => {
                let cur = shift + *prec as i64;
                if abs >= cur {
                    self.clone()
                } else if abs <= *shift {
                    Self::zero_mod(&self.ctx, abs)
                } else {
                    Self::from_residues(&self.ctx, *shift, unit.clone(), (abs - shift) as u32)
                }
            }
        }
    }

    /// `val_p`, normalized so that `val_p(p) = 1`.
    pub fn val_p(&self) -> Valuation {
        match &self.repr {
            Repr::Zero { .. } => Valuation::Infinite,
            Repr::Nonzero { shift, unit, .. } => {
                let v_pi = self.ctx.pi_valuation(unit) as i64;
                Valuation::Finite(
                    Ratio::from_integer(*shift) + Ratio::new(v_pi, self.ctx.degree as i64),
                )
            }
        }
    }

    /// Image in the residue field `F_p` (`ζ ↦ 1`), or `None` when `val_p < 0`.
    pub fn residue(&self) -> Option<u64> {
        match &self.repr {
            Repr::Zero { .. } => Some(0),
            Repr::Nonzero { shift, unit, .. } => match shift.cmp(&0) {
                Ordering::Less => None,
                Ordering::Greater => Some(0),
                Ordering::Equal => Some(self.ctx.residue_at_one(unit)),
            },
        }
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let ctx = &self.ctx;
        let (a, b) = match (&self.repr, &other.repr) {
            (Repr::Zero { abs: None }, _) => return Ok(other.clone()),
            (_, Repr::Zero { abs: None }) => return Ok(self.clone()),
            (Repr::Zero { abs: Some(x) }, _) => return Ok(other.truncate_abs(*x)),
            (_, Repr::Zero { abs: Some(y) }) => return Ok(self.truncate_abs(*y)),
            (
                Repr::Nonzero {
                    shift: ta,
                    unit: ua,
                    prec: pa,
                },
                Repr::Nonzero {
                    shift: tb,
                    unit: ub,
                    prec: pb,
                },
            ) => ((*ta, ua, *pa), (*tb, ub, *pb)),
        };
        let abs = (a.0 + a.2 as i64).min(b.0 + b.2 as i64);
        let t = a.0.min(b.0);
        let rel = abs - t;
        if rel <= 0 {
            return Ok(Self::zero_mod(ctx, abs));
        }
        let rel = rel as u32;
        let m = ctx.pow_p(rel);
        let mut sum = vec![0u64; ctx.degree];
        for (shift, unit) in [(a.0, a.1), (b.0, b.1)] {
            let lift = (shift - t) as u32;
            if lift >= rel {
                continue;
            }
            let scale = ctx.pow_p(lift);
            for (acc, &c) in sum.iter_mut().zip(unit) {
                *acc = add_mod(*acc, mul_mod(c, scale, m), m);
            }
        }
        Ok(Self::from_residues(ctx, t, sum, rel))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let ctx = &self.ctx;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Zero { abs: None }, _) | (_, Repr::Zero { abs: None }) => Self::zero(ctx),
            (Repr::Zero { abs: Some(x) }, Repr::Zero { abs: Some(y) }) => {
                Self::zero_mod(ctx, x + y)
            }
            (Repr::Zero { abs: Some(x) }, Repr::Nonzero { shift, .. })
            | (Repr::Nonzero { shift, .. }, Repr::Zero { abs: Some(x) }) => {
                Self::zero_mod(ctx, x + shift)
            }
            (
                Repr::Nonzero {
                    shift: ta,
                    unit: ua,
                    prec: pa,
                },
                Repr::Nonzero {
                    shift: tb,
                    unit: ub,
                    prec: pb,
                },
            ) => {
                let prec = (*pa).min(*pb);
                let m = ctx.pow_p(prec);
                let prod = ctx.poly_mul(ua, ub, m);
                Self::from_residues(ctx, ta + tb, prod, prec)
            }
        })
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { shift, unit, prec } => {
                let m = self.ctx.pow_p(*prec);
                CycloCoeff {
                    ctx: self.ctx.clone(),
                    repr: Repr::Nonzero {
                        shift: *shift,
                        unit: unit.iter().map(|&c| (m - c) % m).collect(),
                        prec: *prec,
                    },
                }
            }
        }
    }

    /// Multiplies by `p^t` exactly.
    pub fn mul_p_power(&self, t: i64) -> Self {
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Zero { abs: Some(a) } => *a += t,
            Repr::Zero { abs: None } => {}
            Repr::Nonzero { shift, .. } => *shift += t,
        }
        out
    }

    /// Multiplies by `x^e = ζ_{p^s}^e`; `e` is read modulo `p^s`.
    pub fn mul_root_power(&self, e: i64) -> Self {
        let ctx = &self.ctx;
        match &self.repr {
            Repr::Zero { .. } => self.clone(),
            Repr::Nonzero { .. } if ctx.s == 0 => self.clone(),
            Repr::Nonzero { shift, unit, prec } => {
                let order = ctx.order;
                let e = e.rem_euclid(order as i64) as usize;
                let mut buf = vec![0u64; order];
                for (i, &c) in unit.iter().enumerate() {
                    buf[(i + e) % order] = c;
                }
                let m = ctx.pow_p(*prec);
                CycloCoeff {
                    ctx: ctx.clone(),
                    repr: Repr::Nonzero {
                        shift: *shift,
                        unit: ctx.reduce_poly(buf, m),
                        prec: *prec,
                    },
                }
            }
        }
    }

    /// Multiplicative inverse. The unit part must be a unit of `Z_p[ζ]`.
    pub fn inv(&self) -> Result<Self> {
        let ctx = &self.ctx;
        let (shift, unit, prec) = match &self.repr {
            Repr::Zero { .. } => return Err(Error::NotInvertible("zero".into())),
            Repr::Nonzero { shift, unit, prec } => (*shift, unit, *prec),
        };
        let r = ctx.residue_at_one(unit);
        if r == 0 {
            return Err(Error::NotInvertible(format!(
                "unit part of {} is not a unit",
                self.to_text()
            )));
        }
        let m = ctx.pow_p(prec);
        let r_inv = inv_mod(r, ctx.p).expect("nonzero residue mod a prime");
        let mut w = vec![0u64; ctx.degree];
        w[0] = r_inv % m;
        // Newton iteration w <- w(2 - uw); the error term squares each step.
        let mut one = vec![0u64; ctx.degree];
        one[0] = 1 % m;
        for _ in 0..128 {
            let uw = ctx.poly_mul(unit, &w, m);
            if uw == one {
                return Ok(CycloCoeff {
                    ctx: ctx.clone(),
                    repr: Repr::Nonzero {
                        shift: -shift,
                        unit: w,
                        prec,
                    },
                });
            }
            let mut correction: Vec<u64> = uw.iter().map(|&c| (m - c) % m).collect();
            correction[0] = add_mod(correction[0], 2, m);
            w = ctx.poly_mul(&w, &correction, m);
        }
        Err(Error::NotInvertible("Newton iteration did not converge".into()))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Canonical text form `p^t*(c0 + c1*z + ...)`.
    pub fn to_text(&self) -> String {
        match &self.repr {
            Repr::Zero { .. } => "0".to_string(),
            Repr::Nonzero { shift, unit, .. } => {
                let terms: Vec<String> = unit
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| match i {
                        0 => c.to_string(),
                        1 => format!("{c}*z"),
                        _ => format!("{c}*z^{i}"),
                    })
                    .collect();
                let constant_only = terms.len() == 1 && unit[0] != 0;
                let body = terms.join(" + ");
                match (*shift, constant_only) {
                    (0, true) => body,
                    (0, false) => format!("({body})"),
                    (t, _) => format!("p^{t}*({body})"),
                }
            }
        }
    }

    /// Parses the text form. Coefficients are exact integers; `z` is `ζ_{p^s}`.
    /// On failure returns the byte offset of the problem and a message.
    pub fn parse(ctx: &Ctx, text: &str) -> std::result::Result<Self, (usize, String)> {
        let trimmed_start = text.len() - text.trim_start().len();
        let mut rest = text.trim();
        let mut offset = trimmed_start;
        let mut shift = 0i64;
        if let Some(after) = rest.strip_prefix("p^") {
            let star = after
                .find('*')
                .ok_or((offset, "expected '*' after p-power".to_string()))?;
            shift = after[..star]
                .trim()
                .parse()
                .map_err(|_| (offset + 2, format!("bad p-power exponent '{}'", &after[..star])))?;
            offset += 2 + star + 1;
            let tail = &after[star + 1..];
            offset += tail.len() - tail.trim_start().len();
            rest = tail.trim();
        }
        if let Some(inner) = rest.strip_prefix('(') {
            let inner = inner
                .strip_suffix(')')
                .ok_or((offset + rest.len(), "unbalanced parenthesis".to_string()))?;
            offset += 1;
            rest = inner;
        }
        let coeffs = parse_poly(rest).map_err(|(o, msg)| (offset + o, msg))?;
        Ok(Self::from_poly(ctx, shift, &coeffs))
    }
}

/// Parses `c0 + c1*z + c2*z^2 - z^3 ...` into dense exact coefficients.
fn parse_poly(text: &str) -> std::result::Result<Vec<BigInt>, (usize, String)> {
    let mut coeffs: Vec<BigInt> = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut first = true;
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        if i >= bytes.len() {
            if first {
                return Err((i, "empty coefficient".into()));
            }
            break;
        }
        let mut negative = false;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            negative = bytes[i] == b'-';
            i += 1;
            skip_ws(&mut i);
        } else if !first {
            return Err((i, "expected '+' or '-'".into()));
        }
        first = false;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut c: BigInt = if i > start {
            text[start..i].parse().expect("digits")
        } else {
            BigInt::from(1)
        };
        skip_ws(&mut i);
        let mut power = 0usize;
        let has_star = i < bytes.len() && bytes[i] == b'*';
        if has_star {
            i += 1;
            skip_ws(&mut i);
        }
        if i < bytes.len() && bytes[i] == b'z' {
            if !has_star && i > start {
                return Err((i, "expected '*' before z".into()));
            }
            i += 1;
            power = 1;
            skip_ws(&mut i);
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                skip_ws(&mut i);
                let ps = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                power = text[ps..i]
                    .parse()
                    .map_err(|_| (ps, "expected exponent of z".to_string()))?;
                if power > 1 << 16 {
                    return Err((ps, "exponent of z too large".into()));
                }
            }
        } else if has_star || i == start {
            return Err((i, "expected a coefficient or z".into()));
        }
        if negative {
            c = -c;
        }
        if coeffs.len() <= power {
            coeffs.resize(power + 1, BigInt::zero());
        }
        coeffs[power] += c;
    }
    Ok(coeffs)
}

impl PartialEq for CycloCoeff {
    /// Equality of normalized forms at the precision both sides share.
    fn eq(&self, other: &Self) -> bool {
        match self.checked_sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl fmt::Display for CycloCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&CycloCoeff> for &CycloCoeff {
            type Output = CycloCoeff;

            /// Panics when the operands live in different rings.
            fn $method(self, rhs: &CycloCoeff) -> CycloCoeff {
                self.$checked(rhs).expect("coefficient ring mismatch")
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl std::ops::Neg for &CycloCoeff {
    type Output = CycloCoeff;

    fn neg(self) -> CycloCoeff {
        CycloCoeff::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, k: u32, s: u32) -> Ctx {
        RingCtx::new(p, k, s).unwrap()
    }

    #[test]
    fn ring_construction() {
        assert_eq!(ctx(2, 8, 0).modulus(), 256);
        assert_eq!(ctx(2, 8, 0).degree(), 1);
        assert_eq!(ctx(3, 5, 1).cyclotomic(), &[1, 1, 1]);
        assert_eq!(ctx(3, 5, 1).modulus(), 243);
        assert_eq!(ctx(2, 6, 2).cyclotomic(), &[1, 0, 1]);
        assert_eq!(ctx(5, 2, 2).degree(), 20);
        assert_eq!(RingCtx::new(4, 3, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(RingCtx::new(3, 0, 1), Err(Error::InvalidPrecision(_))));
    }

    #[test]
    fn zeta_relations() {
        let r = ctx(2, 6, 2);
        let z1 = CycloCoeff::zeta(&r, 1).unwrap();
        assert_eq!(z1, CycloCoeff::from_int(&r, -1));
        let z2 = CycloCoeff::zeta(&r, 2).unwrap();
        assert_eq!(z2.unit_part(), &[0, 1]);
        assert_eq!(z2.pow(2), CycloCoeff::from_int(&r, -1));
        assert_eq!(z2.pow(4), CycloCoeff::one(&r));

        let r3 = ctx(3, 5, 1);
        let x = CycloCoeff::zeta(&r3, 1).unwrap();
        assert_eq!(x.pow(3), CycloCoeff::one(&r3));
        assert_ne!(x, CycloCoeff::one(&r3));
        assert_eq!(CycloCoeff::zeta(&r3, 0).unwrap(), CycloCoeff::one(&r3));
        assert_eq!(
            CycloCoeff::zeta(&r3, 2).unwrap_err(),
            Error::InsufficientDepth {
                needed: 2,
                available: 1
            }
        );
    }

    #[test]
    fn zeta_powers_descend() {
        for (p, s) in [(2, 4), (3, 3), (5, 2)] {
            let r = ctx(p, 4, s);
            for n in 0..=s {
                let z = CycloCoeff::zeta(&r, n).unwrap();
                for j in 0..=n {
                    assert_eq!(z.pow(p.pow(j)), CycloCoeff::zeta(&r, n - j).unwrap());
                }
                if n >= 1 {
                    assert_ne!(z.pow(p.pow(n - 1)), CycloCoeff::one(&r));
                }
            }
        }
    }

    #[test]
    fn carry_normalization() {
        let r = ctx(3, 5, 0);
        let a = CycloCoeff::from_int(&r, 3);
        let b = CycloCoeff::from_int(&r, 6);
        // 3 + 6 = 9: shift 1 + 1, relative precision drops by one.
        let c = &a + &b;
        assert_eq!(c.shift(), 2);
        assert_eq!(c.precision(), 4);
        assert_eq!(c.unit_part(), &[1]);
    }

    #[test]
    fn shift_addition_in_products() {
        let r = ctx(5, 4, 1);
        let u = CycloCoeff::from_poly(&r, -1, &[BigInt::from(2), BigInt::from(1)]);
        let v = CycloCoeff::from_poly(&r, 1, &[BigInt::from(3)]);
        let w = &u * &v;
        assert_eq!(w.shift(), 0);
        assert_eq!(w, CycloCoeff::from_poly(&r, 0, &[BigInt::from(6), BigInt::from(3)]));
    }

    #[test]
    fn geometric_sum_vanishes() {
        let r = ctx(3, 5, 1);
        let z = CycloCoeff::zeta(&r, 1).unwrap();
        let sum = &(&CycloCoeff::one(&r) + &z) + &z.pow(2);
        assert!(sum.is_zero());
        assert_eq!(sum.abs_precision(), Some(5));
    }

    #[test]
    fn inverses() {
        let r = ctx(2, 6, 0);
        let three = CycloCoeff::from_int(&r, 3);
        assert_eq!(three.inv().unwrap().unit_part(), &[43]);
        assert_eq!(CycloCoeff::one(&r).inv().unwrap(), CycloCoeff::one(&r));

        let r = ctx(3, 4, 2);
        let z = CycloCoeff::zeta(&r, 2).unwrap();
        assert_eq!(z.inv().unwrap(), z.pow(8));
        let pi = &z - &CycloCoeff::one(&r);
        assert!(matches!(pi.inv(), Err(Error::NotInvertible(_))));
        assert!(matches!(CycloCoeff::zero(&r).inv(), Err(Error::NotInvertible(_))));

        let a = CycloCoeff::from_poly(&r, -2, &[BigInt::from(4), BigInt::from(7), BigInt::from(2)]);
        let prod = &a * &a.inv().unwrap();
        assert_eq!(prod, CycloCoeff::one(&r));
        assert_eq!(a.inv().unwrap().shift(), 2);
    }

    #[test]
    fn valuations() {
        let r = ctx(3, 5, 1);
        assert_eq!(CycloCoeff::from_int(&r, 3).val_p(), Valuation::integer(1));
        assert_eq!(CycloCoeff::zero(&r).val_p(), Valuation::Infinite);
        let pi = &CycloCoeff::zeta(&r, 1).unwrap() - &CycloCoeff::one(&r);
        assert_eq!(pi.val_p(), Valuation::Finite(Ratio::new(1, 2)));
        // (ζ - 1)^(p-1) / p is a unit.
        let q = pi.pow(2).mul_p_power(-1);
        assert_eq!(q.val_p(), Valuation::integer(0));
        assert!(q.inv().is_ok());

        let r = ctx(2, 8, 3);
        let pi = &CycloCoeff::zeta(&r, 3).unwrap() - &CycloCoeff::one(&r);
        assert_eq!(pi.val_p(), Valuation::Finite(Ratio::new(1, 4)));
        let pi1 = &CycloCoeff::zeta(&r, 1).unwrap() - &CycloCoeff::one(&r);
        assert_eq!(pi1.val_p(), Valuation::integer(1));
    }

    #[test]
    fn text_round_trip() {
        let r = ctx(3, 4, 2);
        for text in ["74", "p^-1*(1)", "(1 + 2*z + 80*z^5)", "p^2*(5*z)"] {
            let c = CycloCoeff::parse(&r, text).unwrap();
            assert_eq!(c.to_text(), text);
        }
        let c = CycloCoeff::parse(&r, "p^1*(3 - z)").unwrap();
        assert_eq!(c.to_text(), "p^1*(3 + 80*z)");
        assert_eq!(CycloCoeff::parse(&r, "9").unwrap().to_text(), "p^2*(1)");
        assert!(CycloCoeff::parse(&r, "3 +").is_err());
        assert!(CycloCoeff::parse(&r, "(1 + z").is_err());
        assert!(CycloCoeff::parse(&r, "2z").is_err());
    }

    #[test]
    fn mismatched_rings() {
        let a = CycloCoeff::one(&ctx(3, 4, 1));
        let b = CycloCoeff::one(&ctx(3, 5, 1));
        assert_eq!(a.checked_add(&b).unwrap_err(), Error::ContextMismatch);
    }
}
