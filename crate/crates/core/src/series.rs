//! Sparse series in `q` with exponents in `Z[1/p]`.
//!
//! A [`FracSeries`] is truncated in three directions at once:
//!
//! * **q-degree**: terms with exponent above `deg_bound` are unknown;
//! * **depth**: every stored exponent has denominator dividing `p^depth_bound`;
//! * **p-adic**: every coefficient is known modulo `p^abs_prec`.
//!
//! "Unknown beyond the bound" is never conflated with zero: every operation
//! shrinks the bounds of its result to what its inputs determine. A
//! coefficient that vanishes only modulo `p^abs_prec` is dropped from the
//! term map but its exponent is remembered as *vanished*, so the deciders
//! can report that a verdict rests on p-adic precision.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Add;

use num_rational::Ratio;
use num_traits::Signed;

use crate::arith::{self, inv_mod};
use crate::coeff::{CycloCoeff, Ctx};
use crate::error::{Error, Result};

/// An exponent `num / p^r` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Ratio<i64>);

impl Exponent {
    pub fn new(num: i64, depth: u32, p: u64) -> Self {
        Exponent(Ratio::new(num, (p as i64).pow(depth)))
    }

    pub fn integer(n: i64) -> Self {
        Exponent(Ratio::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    /// Wraps a rational; its denominator must be a power of `p`.
    pub fn from_ratio(r: Ratio<i64>, p: u64) -> Result<Self> {
        arith::log_p_exact(*r.denom() as u64, p)
            .map(|_| Exponent(r))
            .ok_or_else(|| Error::Precondition(format!("denominator of {r} is not a power of {p}")))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// The `r` with denominator `p^r`.
    pub fn depth(&self, p: u64) -> u32 {
        arith::log_p_exact(self.denom() as u64, p).expect("denominator is a power of p")
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Largest integer not above the exponent.
    pub fn floor(&self) -> i64 {
        self.0.floor().to_integer()
    }

    pub fn scale(&self, j: i64) -> Self {
        Exponent(self.0 * j)
    }

    pub fn div_int(&self, j: i64) -> Self {
        Exponent(self.0 / j)
    }

    /// Text form: `num` for integers, `num/p^r` otherwise.
    pub fn to_text(&self, p: u64) -> String {
        match self.depth(p) {
            0 => self.numer().to_string(),
            r => format!("{}/p^{}", self.numer(), r),
        }
    }

    /// Parses `num`, `num/p^r` or `num/<power of p>`; the result is normalized.
    pub fn parse(text: &str, p: u64) -> std::result::Result<Self, (usize, String)> {
        let text_trim = text.trim();
        let lead = text.len() - text.trim_start().len();
        let (num_text, den_text) = match text_trim.split_once('/') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (text_trim, None),
        };
        let num: i64 = num_text
            .parse()
            .map_err(|_| (lead, format!("bad exponent numerator '{num_text}'")))?;
        let depth = match den_text {
            None => 0,
            Some(d) => {
                let col = lead + text_trim.find('/').unwrap() + 1;
                if let Some(r) = d.strip_prefix("p^") {
                    r.parse::<u32>()
                        .map_err(|_| (col, format!("bad exponent depth '{r}'")))?
                } else {
                    let den: u64 = d
                        .parse()
                        .map_err(|_| (col, format!("bad exponent denominator '{d}'")))?;
                    arith::log_p_exact(den, p)
                        .ok_or((col, format!("denominator {den} is not a power of p")))?
                }
            }
        };
        if depth > 40 || (p as i64).checked_pow(depth).is_none() {
            return Err((lead, "exponent depth too large".into()));
        }
        Ok(Exponent::new(num, depth, p))
    }
}

impl Add for Exponent {
    type Output = Exponent;

    fn add(self, rhs: Exponent) -> Exponent {
        Exponent(self.0 + rhs.0)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

/// A truncated element of `O_L((q^{1/p^∞}))[1/p]`.
#[derive(Clone, Debug)]
pub struct FracSeries {
    ctx: Ctx,
    terms: BTreeMap<Exponent, CycloCoeff>,
    deg_bound: Exponent,
    depth_bound: u32,
    laurent: bool,
    abs_prec: i64,
    vanished: BTreeSet<Exponent>,
}

impl PartialEq for FracSeries {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx
            && self.deg_bound == other.deg_bound
            && self.depth_bound == other.depth_bound
            && self.laurent == other.laurent
            && self.abs_prec == other.abs_prec
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((e1, c1), (e2, c2))| e1 == e2 && c1 == c2)
    }
}

impl FracSeries {
    /// Builds a normalized series from `(exponent, coefficient)` pairs.
    pub fn from_terms(
        ctx: &Ctx,
        terms: impl IntoIterator<Item = (Exponent, CycloCoeff)>,
        deg_bound: Exponent,
        depth_bound: u32,
        laurent: bool,
    ) -> Result<Self> {
        let p = ctx.p();
        let mut map = BTreeMap::new();
        let mut abs_prec = ctx.k() as i64;
        for (e, c) in terms {
            if c.ctx() != ctx {
                return Err(Error::ContextMismatch);
            }
            let depth = e.depth(p);
            if depth > depth_bound {
                return Err(Error::DepthExceedsBound {
                    exponent: e.to_text(p),
                    depth,
                    bound: depth_bound,
                });
            }
            if e.is_negative() && !laurent {
                return Err(Error::NegativeExponent(e.to_text(p)));
            }
            if e > deg_bound {
                return Err(Error::BeyondDegreeBound {
                    exponent: e.to_text(p),
                    bound: deg_bound.to_text(p),
                });
            }
            if let Some(a) = c.abs_precision() {
                abs_prec = abs_prec.min(a);
            }
            if map.insert(e, c).is_some() {
                return Err(Error::DuplicateExponent(e.to_text(p)));
            }
        }
        Ok(Self::assemble(
            ctx,
            map,
            deg_bound,
            depth_bound,
            laurent,
            abs_prec,
            BTreeSet::new(),
        ))
    }

    pub fn zero(ctx: &Ctx, deg_bound: Exponent, depth_bound: u32, laurent: bool) -> Self {
        Self::assemble(
            ctx,
            BTreeMap::new(),
            deg_bound,
            depth_bound,
            laurent,
            ctx.k() as i64,
            BTreeSet::new(),
        )
    }

    /// `c · q^e`, known up to `deg_bound`.
    pub fn monomial(ctx: &Ctx, e: Exponent, c: CycloCoeff, deg_bound: Exponent) -> Result<Self> {
        let depth = e.depth(ctx.p());
        Self::from_terms(ctx, [(e, c)], deg_bound, depth, e.is_negative())
    }

    /// Truncates coefficients to `abs_prec`, drops zeros and out-of-range terms.
    fn assemble(
        ctx: &Ctx,
        terms: BTreeMap<Exponent, CycloCoeff>,
        deg_bound: Exponent,
        depth_bound: u32,
        laurent: bool,
        abs_prec: i64,
        mut vanished: BTreeSet<Exponent>,
    ) -> Self {
        let mut kept = BTreeMap::new();
        for (e, c) in terms {
            if e > deg_bound {
                continue;
            }
            let c = c.truncate_abs(abs_prec);
            if c.is_zero() {
                if !c.is_exact_zero() {
                    vanished.insert(e);
                }
            } else {
                kept.insert(e, c);
            }
        }
        vanished.retain(|e| *e <= deg_bound && !kept.contains_key(e));
        debug_assert!(kept.keys().all(|e| e.depth(ctx.p()) <= depth_bound));
        FracSeries {
            ctx: ctx.clone(),
            terms: kept,
            deg_bound,
            depth_bound,
            laurent,
            abs_prec,
            vanished,
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn p(&self) -> u64 {
        self.ctx.p()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &CycloCoeff)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> Option<&CycloCoeff> {
        self.terms.get(e)
    }

    /// Coefficient of `q^n` for an integer exponent, zero when absent.
    pub fn coeff_at(&self, n: i64) -> CycloCoeff {
        self.terms
            .get(&Exponent::integer(n))
            .cloned()
            .unwrap_or_else(|| CycloCoeff::zero(&self.ctx))
    }

    pub fn deg_bound(&self) -> Exponent {
        self.deg_bound
    }

    pub fn depth_bound(&self) -> u32 {
        self.depth_bound
    }

    pub fn is_laurent(&self) -> bool {
        self.laurent
    }

    /// Coefficients are known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> i64 {
        self.abs_prec
    }

    /// Exponents whose coefficient vanished only modulo `p^abs_prec`.
    pub fn vanished(&self) -> &BTreeSet<Exponent> {
        &self.vanished
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<Exponent> {
        self.terms.keys().next().copied()
    }

    /// Largest depth among stored exponents.
    pub fn max_depth(&self) -> u32 {
        let p = self.p();
        self.terms.keys().map(|e| e.depth(p)).max().unwrap_or(0)
    }

    /// Lower bound on exponents, counting unknown terms beyond the degree bound.
    fn order_bound(&self) -> Exponent {
        self.min_exponent().unwrap_or(self.deg_bound)
    }

    /// Lower bound on coefficient shifts.
    fn shift_bound(&self) -> i64 {
        self.terms
            .values()
            .map(CycloCoeff::shift)
            .min()
            .unwrap_or(self.abs_prec)
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Lowers the degree bound, forgetting terms above it.
    pub fn truncate_deg(&self, d: Exponent) -> Self {
        let d = d.min(self.deg_bound);
        Self::assemble(
            &self.ctx,
            self.terms.clone(),
            d,
            self.depth_bound,
            self.laurent,
            self.abs_prec,
            self.vanished.clone(),
        )
    }

    /// Lowers the p-adic precision to `p^n`.
    pub fn truncate_abs(&self, n: i64) -> Self {
        Self::assemble(
            &self.ctx,
            self.terms.clone(),
            self.deg_bound,
            self.depth_bound,
            self.laurent,
            self.abs_prec.min(n),
            self.vanished.clone(),
        )
    }

    /// Replaces the depth bound; it may not drop below a stored depth.
    pub fn with_depth_bound(&self, n: u32) -> Result<Self> {
        let depth = self.max_depth();
        if depth > n {
            return Err(Error::DepthOverflow {
                needed: depth,
                bound: n,
            });
        }
        let mut out = self.clone();
        out.depth_bound = n;
        Ok(out)
    }

    /// Keeps the terms of depth at most `n`; the depth bound drops to `n` if larger.
    pub(crate) fn project_depth(&self, n: u32) -> Self {
        let p = self.p();
        let keep = |e: &Exponent| e.depth(p) <= n;
        Self::assemble(
            &self.ctx,
            self.terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
            self.deg_bound,
            n.min(self.depth_bound),
            self.laurent,
            self.abs_prec,
            self.vanished.iter().copied().filter(keep).collect(),
        )
    }

    pub fn as_laurent(&self) -> Self {
        let mut out = self.clone();
        out.laurent = true;
        out
    }

    /// Equality after truncating both sides to their common bounds.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        if self.ctx != other.ctx {
            return false;
        }
        let d = self.deg_bound.min(other.deg_bound);
        let n = self.abs_prec.min(other.abs_prec);
        let a = self.truncate_deg(d).truncate_abs(n);
        let b = other.truncate_deg(d).truncate_abs(n);
        a.terms.len() == b.terms.len()
            && a.terms
                .iter()
                .zip(&b.terms)
                .all(|((e1, c1), (e2, c2))| e1 == e2 && c1 == c2)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            terms
                .entry(*e)
                .and_modify(|a| *a = &*a + c)
                .or_insert_with(|| c.clone());
        }
        let vanished = self.vanished.union(&other.vanished).copied().collect();
        Ok(Self::assemble(
            &self.ctx,
            terms,
            self.deg_bound.min(other.deg_bound),
            self.depth_bound.max(other.depth_bound),
            self.laurent || other.laurent,
            self.abs_prec.min(other.abs_prec),
            vanished,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c = c.neg());
        out
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let deg_bound =
            (self.deg_bound + other.order_bound()).min(other.deg_bound + self.order_bound());
        let abs_prec = (self.abs_prec + other.shift_bound()).min(other.abs_prec + self.shift_bound());
        let mut terms: BTreeMap<Exponent, CycloCoeff> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = *e1 + *e2;
                if e > deg_bound {
                    // Exponents of `other` are increasing.
                    break;
                }
                let prod = c1 * c2;
                terms
                    .entry(e)
                    .and_modify(|a| *a = &*a + &prod)
                    .or_insert(prod);
            }
        }
        Ok(Self::assemble(
            &self.ctx,
            terms,
            deg_bound,
            self.depth_bound.max(other.depth_bound),
            self.laurent || other.laurent,
            abs_prec,
            BTreeSet::new(),
        ))
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &CycloCoeff) -> Result<Self> {
        if c.ctx() != &self.ctx {
            return Err(Error::ContextMismatch);
        }
        let abs_prec = match c.abs_precision() {
            Some(a) => (self.abs_prec + c.shift()).min(a + self.shift_bound()),
            None => self.abs_prec,
        };
        let terms = self.terms.iter().map(|(e, a)| (*e, a * c)).collect();
        Ok(Self::assemble(
            &self.ctx,
            terms,
            self.deg_bound,
            self.depth_bound,
            self.laurent,
            abs_prec,
            self.vanished.clone(),
        ))
    }

    /// Multiplies by the monomial `q^delta` exactly.
    pub fn shift_exponents(&self, delta: Exponent) -> Self {
        let p = self.p();
        let terms: BTreeMap<_, _> = self.terms.iter().map(|(e, c)| (*e + delta, c.clone())).collect();
        let depth_bound = self.depth_bound.max(delta.depth(p));
        let laurent = self.laurent || terms.keys().next().is_some_and(Exponent::is_negative);
        let vanished = self.vanished.iter().map(|e| *e + delta).collect();
        Self::assemble(
            &self.ctx,
            terms,
            self.deg_bound + delta,
            depth_bound,
            laurent,
            self.abs_prec,
            vanished,
        )
    }

    /// The substitution `q ↦ q^j` for any integer `j >= 1`.
    pub fn rescale(&self, j: i64) -> Result<Self> {
        if j < 1 {
            return Err(Error::Precondition(format!("rescaling factor {j} must be positive")));
        }
        let drop = arith::val_p_i128(j as i128, self.p()).unwrap();
        let terms = self.terms.iter().map(|(e, c)| (e.scale(j), c.clone())).collect();
        let vanished = self.vanished.iter().map(|e| e.scale(j)).collect();
        Ok(Self::assemble(
            &self.ctx,
            terms,
            self.deg_bound.scale(j),
            self.depth_bound.saturating_sub(drop),
            self.laurent,
            self.abs_prec,
            vanished,
        ))
    }

    /// The substitution `q ↦ q^j` for `j` a power of `p`.
    pub fn substitute_power(&self, j: i64) -> Result<Self> {
        if j < 1 || arith::log_p_exact(j as u64, self.p()).is_none() {
            return Err(Error::NotPowerOfP(j));
        }
        self.rescale(j)
    }

    /// The automorphism `q^{1/p^r} ↦ ζ_{p^r}^{h/e} q^{1/p^r}`.
    ///
    /// The coefficient at `j/p^r` (lowest terms) is multiplied by
    /// `ζ_{p^r}^{(h/e)·j}`. Only `h mod p^r` matters for such a term.
    pub fn twist(&self, h: i64, e: i64) -> Result<Self> {
        let p = self.p();
        let s = self.ctx.s();
        let depth = self.max_depth();
        if depth > s {
            return Err(Error::InsufficientDepth {
                needed: depth,
                available: s,
            });
        }
        if e.rem_euclid(p as i64) == 0 {
            return Err(Error::Precondition(format!("twist index e = {e} is divisible by p")));
        }
        let order = p.pow(s) as i64;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let r = m.depth(p);
                if r == 0 {
                    return (*m, c.clone());
                }
                let pr = p.pow(r);
                let e_inv = inv_mod(arith::reduce_i128(e as i128, pr), pr).expect("e prime to p");
                let hr = arith::reduce_i128(h as i128, pr);
                let j = arith::reduce_i128(m.numer() as i128, pr);
                let t = arith::mul_mod(arith::mul_mod(hr, e_inv, pr), j, pr);
                let root = (t as i64) * (order / pr as i64);
                (*m, c.mul_root_power(root))
            })
            .collect();
        Ok(Self::assemble(
            &self.ctx,
            terms,
            self.deg_bound,
            self.depth_bound,
            self.laurent,
            self.abs_prec,
            self.vanished.clone(),
        ))
    }

    /// Multiplicative inverse of a series whose lowest coefficient is a unit
    /// (up to a power of `p`).
    pub fn inverse(&self) -> Result<Self> {
        let (m, lead) = self
            .terms
            .iter()
            .next()
            .map(|(e, c)| (*e, c.clone()))
            .ok_or_else(|| Error::NotInvertible("zero series".into()))?;
        let lead_inv = lead.inv()?;
        let zero = Exponent::zero();
        // f = lead · q^m · (1 + h) with h of positive order.
        let normalized = self.shift_exponents(Exponent(-m.0)).scale(&lead_inv)?;
        let one = Self::monomial(&self.ctx, zero, CycloCoeff::one(&self.ctx), normalized.deg_bound)?;
        let h = normalized.checked_sub(&one)?;
        let mut acc = one.clone();
        if let Some(v) = h.min_exponent() {
            let neg_h = h.neg();
            let mut power = one;
            let bound = normalized.deg_bound;
            let mut i = 1i64;
            while v.scale(i) <= bound {
                power = power.checked_mul(&neg_h)?;
                acc = acc.checked_add(&power)?;
                i += 1;
            }
        }
        let mut out = acc.scale(&lead_inv)?.shift_exponents(Exponent(-m.0));
        out.depth_bound = out.depth_bound.max(self.depth_bound);
        out.laurent = self.laurent || out.min_exponent().is_some_and(|e| e.is_negative());
        Ok(out)
    }

    /// Composition `f(g)` for `f` with integer exponents and `g` with
    /// strictly positive integer exponents.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.check_ctx(g)?;
        let p = self.p();
        for e in self.terms.keys().chain(g.terms.keys()) {
            if !e.is_integer() {
                return Err(Error::FractionalExponent(e.to_text(p)));
            }
        }
        if let Some(e) = g.terms.keys().find(|e| !e.is_positive()) {
            return Err(Error::Precondition(format!(
                "inner series has a term of exponent {} (must be positive)",
                e.to_text(p)
            )));
        }
        let v = g
            .min_exponent()
            .ok_or_else(|| Error::Precondition("inner series is zero".into()))?;
        // Unknown terms of f start at exponent floor(D_f) + 1.
        let unknown = Exponent::integer((self.deg_bound.floor() + 1) * v.numer() - 1);
        let mut acc = Self::zero(&self.ctx, unknown, 0, self.laurent);
        let one = Self::monomial(&self.ctx, Exponent::zero(), CycloCoeff::one(&self.ctx), g.deg_bound)?;
        let mut pos_powers = vec![one];
        let mut neg_powers: Vec<Self> = Vec::new();
        for (e, c) in &self.terms {
            let n = e.numer();
            let power = if n >= 0 {
                while pos_powers.len() <= n as usize {
                    let next = pos_powers.last().unwrap().checked_mul(g)?;
                    pos_powers.push(next);
                }
                &pos_powers[n as usize]
            } else {
                if neg_powers.is_empty() {
                    neg_powers.push(g.inverse()?);
                }
                while neg_powers.len() < (-n) as usize {
                    let next = neg_powers.last().unwrap().checked_mul(&neg_powers[0])?;
                    neg_powers.push(next);
                }
                &neg_powers[(-n) as usize - 1]
            };
            acc = acc.checked_add(&power.scale(c)?)?;
        }
        acc.laurent = self.laurent && acc.min_exponent().is_some_and(|e| e.is_negative());
        Ok(acc)
    }

    /// Compositional inverse of `c_1 q + c_2 q^2 + …` with `c_1` a unit,
    /// by back-substitution one coefficient at a time.
    pub fn revert(&self) -> Result<Self> {
        let p = self.p();
        if let Some(e) = self.terms.keys().find(|e| !e.is_integer()) {
            return Err(Error::FractionalExponent(e.to_text(p)));
        }
        if let Some(e) = self.terms.keys().find(|e| e.numer() < 1) {
            return Err(Error::Precondition(format!(
                "series to revert has a term of exponent {} (need order 1)",
                e.to_text(p)
            )));
        }
        let c1 = self.coeff_at(1);
        if c1.is_zero() || c1.shift() != 0 {
            return Err(Error::NotInvertible(format!("linear coefficient {c1} is not a unit")));
        }
        let c1_inv = c1.inv()?;
        let d = self.deg_bound.floor();
        let ctx = &self.ctx;
        let mut coeffs: BTreeMap<Exponent, CycloCoeff> = BTreeMap::new();
        coeffs.insert(Exponent::integer(1), c1_inv.clone());
        for n in 2..=d {
            let partial = Self::from_terms(ctx, coeffs.clone(), Exponent::integer(n), 0, false)?;
            let composed = self.compose(&partial)?;
            let target = composed.coeff_at(n);
            let b = (&target * &c1_inv).neg();
            if !b.is_zero() {
                coeffs.insert(Exponent::integer(n), b);
            }
        }
        Self::from_terms(ctx, coeffs, Exponent::integer(d.max(1)), 0, false)
    }

    /// Canonical one-line rendering, lowest exponent first.
    pub fn to_text(&self) -> String {
        let p = self.p();
        if self.terms.is_empty() {
            return format!("O(q^{})", self.deg_bound.to_text(p));
        }
        let body: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{}*q^{}", c.to_text(), e.to_text(p)))
            .collect();
        format!("{} + O(q^{})", body.join(" + "), self.deg_bound.to_text(p))
    }
}

impl fmt::Display for FracSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

macro_rules! series_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&FracSeries> for &FracSeries {
            type Output = FracSeries;

            /// Panics when the operands live in different rings.
            fn $method(self, rhs: &FracSeries) -> FracSeries {
                self.$checked(rhs).expect("coefficient ring mismatch")
            }
        }
    };
}

series_binop!(Add, add, checked_add);
series_binop!(Sub, sub, checked_sub);
series_binop!(Mul, mul, checked_mul);

/// A function `(Z/p^m)^× → series`: the componentwise model of
/// `Map_cts(Z_p^×, O_L[[q^{1/p^∞}]])` at finite level.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySeries {
    level: u32,
    p: u64,
    values: BTreeMap<u64, FracSeries>,
}

impl FamilySeries {
    /// Every unit residue mod `p^level` must be present, and all members must
    /// share a ring and bounds.
    pub fn new(level: u32, values: BTreeMap<u64, FracSeries>) -> Result<Self> {
        let first = values
            .values()
            .next()
            .ok_or_else(|| Error::Precondition("empty family".into()))?;
        let p = first.p();
        let modulus = p.pow(level);
        let units: Vec<u64> = units_mod(p, level);
        if values.keys().copied().collect::<Vec<_>>() != units {
            return Err(Error::Precondition(format!(
                "family must be indexed by the units mod {modulus}"
            )));
        }
        for f in values.values() {
            if f.ctx != first.ctx {
                return Err(Error::ContextMismatch);
            }
            if f.deg_bound != first.deg_bound || f.depth_bound != first.depth_bound {
                return Err(Error::Precondition("family members have different bounds".into()));
            }
        }
        Ok(FamilySeries { level, p, values })
    }

    pub fn constant(level: u32, f: &FracSeries) -> Self {
        let values = units_mod(f.p(), level).into_iter().map(|a| (a, f.clone())).collect();
        FamilySeries {
            level,
            p: f.p(),
            values,
        }
    }

    pub fn from_fn(level: u32, p: u64, mut f: impl FnMut(u64) -> Result<FracSeries>) -> Result<Self> {
        let values = units_mod(p, level)
            .into_iter()
            .map(|a| Ok((a, f(a)?)))
            .collect::<Result<_>>()?;
        Self::new(level, values)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn get(&self, a: u64) -> Option<&FracSeries> {
        self.values.get(&(a % self.p.pow(self.level)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &FracSeries)> + '_ {
        self.values.iter().map(|(a, f)| (*a, f))
    }

    /// Translation by a unit: `(u · F)(a) = F(a·u)`.
    pub fn translate(&self, u: u64) -> Result<Self> {
        let modulus = self.p.pow(self.level);
        if u.is_multiple_of(self.p) && modulus > 1 {
            return Err(Error::Precondition(format!("{u} is not a unit mod {modulus}")));
        }
        let values = self
            .values
            .keys()
            .map(|&a| (a, self.values[&((a as u128 * u as u128 % modulus as u128) as u64)].clone()))
            .collect();
        Ok(FamilySeries {
            level: self.level,
            p: self.p,
            values,
        })
    }
}

/// Units of `Z/p^m`, in increasing order; `[0]` when `m = 0`.
pub(crate) fn units_mod(p: u64, m: u32) -> Vec<u64> {
    let n = p.pow(m);
    (0..n).filter(|a| n == 1 || a % p != 0).collect()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::RingCtx;

    fn int_coeff(ctx: &Ctx, n: i64) -> CycloCoeff {
        CycloCoeff::from_int(ctx, n)
    }

    fn ctx(p: u64, k: u32, s: u32) -> Ctx {
        RingCtx::new(p, k, s).unwrap()
    }

    fn ex(num: i64, depth: u32, p: u64) -> Exponent {
        Exponent::new(num, depth, p)
    }

    fn int_series(ctx: &Ctx, coeffs: &[(i64, i64)], deg: i64, laurent: bool) -> FracSeries {
        FracSeries::from_terms(
            ctx,
            coeffs.iter().map(|&(e, c)| (Exponent::integer(e), int_coeff(ctx, c))),
            Exponent::integer(deg),
            0,
            laurent,
        )
        .unwrap()
    }

    #[test]
    fn construction() {
        let r = ctx(2, 8, 2);
        let zero = FracSeries::from_terms(&r, [], Exponent::integer(5), 0, false).unwrap();
        assert!(zero.is_zero());

        let f = FracSeries::from_terms(&r, [(ex(1, 1, 2), int_coeff(&r, 1))], Exponent::integer(3), 1, false)
            .unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.max_depth(), 1);

        let g = FracSeries::from_terms(&r, [(ex(2, 2, 2), int_coeff(&r, 5))], Exponent::integer(3), 2, false)
            .unwrap();
        assert_eq!(g.min_exponent(), Some(ex(1, 1, 2)));

        let dup = FracSeries::from_terms(
            &r,
            [(ex(1, 1, 2), int_coeff(&r, 1)), (ex(2, 2, 2), int_coeff(&r, 1))],
            Exponent::integer(3),
            2,
            false,
        );
        assert!(matches!(dup, Err(Error::DuplicateExponent(_))));
        let deep = FracSeries::from_terms(&r, [(ex(1, 2, 2), int_coeff(&r, 1))], Exponent::integer(3), 1, false);
        assert!(matches!(deep, Err(Error::DepthExceedsBound { .. })));
        let neg = FracSeries::from_terms(&r, [(ex(-1, 0, 2), int_coeff(&r, 1))], Exponent::integer(3), 0, false);
        assert!(matches!(neg, Err(Error::NegativeExponent(_))));
        let far = FracSeries::from_terms(&r, [(ex(4, 0, 2), int_coeff(&r, 1))], Exponent::integer(3), 0, false);
        assert!(matches!(far, Err(Error::BeyondDegreeBound { .. })));
    }

    #[test]
    fn exponent_text() {
        assert_eq!(Exponent::parse("2/p^2", 2).unwrap(), ex(1, 1, 2));
        assert_eq!(Exponent::parse(" -3/9", 3).unwrap(), ex(-1, 1, 3));
        assert_eq!(Exponent::parse("7", 5).unwrap().to_text(5), "7");
        assert_eq!(ex(1, 2, 3).to_text(3), "1/p^2");
        assert!(Exponent::parse("1/6", 3).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let r = ctx(2, 8, 1);
        let half = FracSeries::monomial(&r, ex(1, 1, 2), int_coeff(&r, 1), Exponent::integer(4)).unwrap();
        let sq = &half * &half;
        assert_eq!(sq.terms().count(), 1);
        assert_eq!(sq.coeff(&Exponent::integer(1)), Some(&int_coeff(&r, 1)));

        let j = int_series(&r, &[(-1, 1), (0, 744)], 3, true);
        let c = int_series(&r, &[(0, -744)], 3, false);
        let sum = &j + &c;
        assert_eq!(sum.len(), 1);
        assert_eq!(sum.coeff_at(-1), int_coeff(&r, 1));

        let one_minus_q = int_series(&r, &[(0, 1), (1, -1)], 6, false);
        let geom = int_series(&r, &(0..=6).map(|i| (i, 1)).collect::<Vec<_>>(), 6, false);
        let prod = &one_minus_q * &geom;
        assert_eq!(prod.deg_bound(), Exponent::integer(6));
        assert_eq!(prod, int_series(&r, &[(0, 1)], 6, false));
    }

    #[test]
    fn truncation_is_sound() {
        let r = ctx(3, 4, 0);
        let f = int_series(&r, &[(1, 1)], 5, false);
        let g = int_series(&r, &[(2, 1)], 3, false);
        // f·g: unknown terms of g (beyond 3) times q give exponents beyond 4.
        assert_eq!((&f * &g).deg_bound(), Exponent::integer(4));
        // p-adic: p^-1 · O(p^4) is O(p^3).
        let h = FracSeries::monomial(&r, Exponent::integer(0), CycloCoeff::from_int(&r, 1).mul_p_power(-1), Exponent::integer(3)).unwrap();
        assert_eq!((&f * &h).abs_prec(), 3);
    }

    #[test]
    fn substitution() {
        let r = ctx(3, 4, 2);
        let f = FracSeries::monomial(&r, ex(1, 1, 3), int_coeff(&r, 2), Exponent::integer(2)).unwrap();
        let g = f.substitute_power(3).unwrap();
        assert_eq!(g.min_exponent(), Some(Exponent::integer(1)));
        assert_eq!(g.deg_bound(), Exponent::integer(6));
        assert_eq!(g.depth_bound(), 0);
        assert!(matches!(f.substitute_power(2), Err(Error::NotPowerOfP(2))));
        let z = FracSeries::zero(&r, Exponent::integer(2), 0, false);
        assert!(z.substitute_power(9).unwrap().is_zero());
    }

    #[test]
    fn twist_examples() {
        let r = ctx(3, 4, 2);
        let q = int_series(&r, &[(1, 1)], 4, false);
        assert_eq!(q.twist(5, 1).unwrap(), q);
        let root = FracSeries::monomial(&r, ex(1, 1, 3), int_coeff(&r, 1), Exponent::integer(4)).unwrap();
        let t = root.twist(1, 1).unwrap();
        let zeta = CycloCoeff::zeta(&r, 1).unwrap();
        assert_eq!(t.coeff(&ex(1, 1, 3)), Some(&zeta));
        assert_eq!(root.twist(0, 2).unwrap(), root);
        assert_eq!(t.twist(-1, 1).unwrap(), root);
        let deep = FracSeries::monomial(&r, ex(1, 3, 3), int_coeff(&r, 1), Exponent::integer(4)).unwrap();
        assert!(matches!(deep.twist(1, 1), Err(Error::InsufficientDepth { .. })));
        assert!(root.twist(1, 3).is_err());
    }

    #[test]
    fn reversion() {
        let r = ctx(5, 6, 0);
        let q = int_series(&r, &[(1, 1)], 8, false);
        assert_eq!(q.revert().unwrap(), q);

        let f = int_series(&r, &[(1, 1), (2, 1)], 8, false);
        let g = f.revert().unwrap();
        let catalan = [1, -1, 2, -5, 14, -42, 132, -429];
        for (n, c) in catalan.iter().enumerate() {
            assert_eq!(g.coeff_at(n as i64 + 1), int_coeff(&r, *c), "coefficient {}", n + 1);
        }
        assert_eq!(f.compose(&g).unwrap(), q);
        assert_eq!(g.compose(&f).unwrap(), q);

        let bad = int_series(&r, &[(1, 5), (2, 1)], 8, false);
        assert!(matches!(bad.revert(), Err(Error::NotInvertible(_))));
        let sq = int_series(&r, &[(2, 1)], 8, false);
        let shifted = int_series(&r, &[(0, 1), (1, 1)], 8, false);
        assert!(matches!(sq.compose(&shifted), Err(Error::Precondition(_))));
    }

    #[test]
    fn laurent_inverse() {
        let r = ctx(7, 5, 0);
        let f = int_series(&r, &[(-1, 1), (0, 744), (1, 196884), (2, 21493760)], 2, true);
        let inv = f.inverse().unwrap();
        assert_eq!(inv.coeff_at(1), int_coeff(&r, 1));
        assert_eq!(inv.coeff_at(2), int_coeff(&r, -744));
        let prod = &f * &inv;
        assert_eq!(prod, int_series(&r, &[(0, 1)], prod.deg_bound().floor(), true));
    }

    #[test]
    fn families() {
        let r = ctx(3, 4, 1);
        let f = int_series(&r, &[(1, 1)], 3, false);
        let fam = FamilySeries::constant(1, &f);
        assert_eq!(fam.iter().count(), 2);
        let varying = FamilySeries::from_fn(2, 3, |a| Ok(int_series(&r, &[(1, a as i64)], 3, false))).unwrap();
        let moved = varying.translate(2).unwrap();
        assert_eq!(moved.get(1).unwrap().coeff_at(1), int_coeff(&r, 2));
        assert_eq!(moved.get(5).unwrap().coeff_at(1), int_coeff(&r, 1));
        let mut missing = BTreeMap::new();
        missing.insert(1, f);
        assert!(FamilySeries::new(1, missing).is_err());
    }
}
