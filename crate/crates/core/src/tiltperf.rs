//! Series over `F_p`, Frobenius, and finite-depth tilt towers.
//!
//! A [`TiltTower`] of depth `T` is a compatible sequence `(f_0, …, f_{T-1})`
//! of mod-p series with `f_{i+1}^p = f_i`. In characteristic `p` the p-th power
//! is the Frobenius `q^a ↦ q^{pa}` (coefficients in `F_p` are fixed), and it is
//! additive, so the limit formula for addition stabilizes at the first step.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::{add_mod, mul_mod};
use crate::error::{Error, Result};
use crate::series::{Exponent, FracSeries};

/// Largest depth a char-p series may reach: `p^depth` stays below `2^40`.
pub fn depth_cap(p: u64) -> u32 {
    let mut r = 0;
    let mut n: u64 = 1;
    while n.saturating_mul(p) <= 1 << 40 {
        n *= p;
        r += 1;
    }
    r
}

/// A truncated element of `F_p((q^{1/p^∞}))`.
///
/// Equality ignores `depth_bound`, which is only an upper bound.
#[derive(Clone, Debug)]
pub struct CharPSeries {
    p: u64,
    terms: BTreeMap<Exponent, u64>,
    deg_bound: Exponent,
    depth_bound: u32,
    laurent: bool,
}

impl PartialEq for CharPSeries {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.terms == other.terms
            && self.deg_bound == other.deg_bound
            && self.laurent == other.laurent
    }
}

impl CharPSeries {
    pub fn new(
        p: u64,
        terms: impl IntoIterator<Item = (Exponent, u64)>,
        deg_bound: Exponent,
        depth_bound: u32,
        laurent: bool,
    ) -> Result<Self> {
        if !crate::arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if depth_bound > depth_cap(p) {
            return Err(Error::DepthOverflow {
                needed: depth_bound,
                bound: depth_cap(p),
            });
        }
        let mut map = BTreeMap::new();
        for (e, c) in terms {
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
            if map.insert(e, c % p).is_some() {
                return Err(Error::DuplicateExponent(e.to_text(p)));
            }
        }
        map.retain(|_, c| *c != 0);
        Ok(CharPSeries {
            p,
            terms: map,
            deg_bound,
            depth_bound,
            laurent,
        })
    }

    pub fn zero(p: u64, deg_bound: Exponent, depth_bound: u32) -> Result<Self> {
        Self::new(p, [], deg_bound, depth_bound, false)
    }

    pub fn one(p: u64, deg_bound: Exponent, depth_bound: u32) -> Result<Self> {
        Self::new(p, [(Exponent::zero(), 1)], deg_bound, depth_bound, false)
    }

    /// Reduction modulo the maximal ideal, `ζ ↦ 1`.
    pub fn from_frac(f: &FracSeries) -> Result<Self> {
        let p = f.p();
        if f.abs_prec() < 1 {
            return Err(Error::Precondition(format!(
                "series known only modulo p^{}",
                f.abs_prec()
            )));
        }
        let mut terms = Vec::new();
        for (e, c) in f.terms() {
            let r = c
                .residue()
                .ok_or_else(|| Error::Precondition(format!("coefficient at {} is not integral", e.to_text(p))))?;
            terms.push((*e, r));
        }
        Self::new(p, terms, f.deg_bound(), f.depth_bound(), f.is_laurent())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &u64)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> u64 {
        self.terms.get(e).copied().unwrap_or(0)
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_depth(&self) -> u32 {
        self.terms.keys().map(|e| e.depth(self.p)).max().unwrap_or(0)
    }

    fn order_bound(&self) -> Exponent {
        self.terms.keys().next().copied().unwrap_or(self.deg_bound)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let deg = self.deg_bound.min(other.deg_bound);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(*e).or_insert(0);
            *slot = add_mod(*slot, *c, self.p);
        }
        terms.retain(|e, c| *c != 0 && *e <= deg);
        Ok(CharPSeries {
            p: self.p,
            terms,
            deg_bound: deg,
            depth_bound: self.depth_bound.max(other.depth_bound),
            laurent: self.laurent || other.laurent,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let deg = (self.deg_bound + other.order_bound()).min(other.deg_bound + self.order_bound());
        let mut terms: BTreeMap<Exponent, u64> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = *e1 + *e2;
                if e > deg {
                    continue;
                }
                let slot = terms.entry(e).or_insert(0);
                *slot = add_mod(*slot, mul_mod(*c1, *c2, self.p), self.p);
            }
        }
        terms.retain(|_, c| *c != 0);
        Ok(CharPSeries {
            p: self.p,
            terms,
            deg_bound: deg,
            depth_bound: self.depth_bound.max(other.depth_bound),
            laurent: self.laurent || other.laurent,
        })
    }

    /// `q^a ↦ q^{pa}`.
    pub fn frobenius(&self) -> Self {
        let p = self.p as i64;
        CharPSeries {
            p: self.p,
            terms: self.terms.iter().map(|(e, c)| (e.scale(p), *c)).collect(),
            deg_bound: self.deg_bound.scale(p),
            depth_bound: self.depth_bound.saturating_sub(1),
            laurent: self.laurent,
        }
    }

    /// `q^a ↦ q^{a/p}`; raises the depth bound by one.
    pub fn frobenius_inv(&self) -> Result<Self> {
        let bound = self.depth_bound + 1;
        if bound > depth_cap(self.p) {
            return Err(Error::DepthOverflow {
                needed: bound,
                bound: depth_cap(self.p),
            });
        }
        let p = self.p as i64;
        Ok(CharPSeries {
            p: self.p,
            terms: self.terms.iter().map(|(e, c)| (e.div_int(p), *c)).collect(),
            deg_bound: self.deg_bound.div_int(p),
            depth_bound: bound,
            laurent: self.laurent,
        })
    }

    /// Same terms, read below a lower degree bound.
    pub fn truncate_deg(&self, d: Exponent) -> Self {
        let d = d.min(self.deg_bound);
        let mut out = self.clone();
        out.terms.retain(|e, _| *e <= d);
        out.deg_bound = d;
        out
    }

    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return format!("O(q^{})", self.deg_bound.to_text(self.p));
        }
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{c}*q^{}", e.to_text(self.p)))
            .collect();
        parts.push(format!("O(q^{})", self.deg_bound.to_text(self.p)));
        parts.join(" + ")
    }
}

impl fmt::Display for CharPSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// A compatible sequence `(f_0, …, f_{T-1})` with `f_{i+1}^p = f_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TiltTower {
    components: Vec<CharPSeries>,
    effective_depth: usize,
}

/// First exponent where two series differ below their common degree bound.
fn first_difference(a: &CharPSeries, b: &CharPSeries) -> Option<(Exponent, u64, u64)> {
    let d = a.deg_bound.min(b.deg_bound);
    let keys: std::collections::BTreeSet<&Exponent> = a.terms.keys().chain(b.terms.keys()).filter(|e| **e <= d).collect();
    keys.into_iter()
        .map(|e| (*e, a.coeff(e), b.coeff(e)))
        .find(|(_, x, y)| x != y)
}

impl TiltTower {
    /// Validates `f_{i+1}^p = f_i` for each consecutive pair, compared below
    /// the smaller of the two degree bounds.
    pub fn new(components: Vec<CharPSeries>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Precondition("a tower needs at least one component".into()));
        }
        let p = components[0].p;
        for (i, pair) in components.windows(2).enumerate() {
            pair[0].check(&pair[1])?;
            if let Some((e, lhs, rhs)) = first_difference(&pair[1].frobenius(), &pair[0]) {
                return Err(Error::TowerIncompatible {
                    index: i,
                    detail: format!(
                        "coefficient of q^{} is {lhs} in f_{}^p but {rhs} in f_{i}",
                        e.to_text(p),
                        i + 1
                    ),
                });
            }
        }
        let effective_depth = components.len();
        Ok(TiltTower {
            components,
            effective_depth,
        })
    }

    pub fn depth(&self) -> usize {
        self.components.len()
    }

    /// Number of leading components known to be exact limits.
    pub fn effective_depth(&self) -> usize {
        self.effective_depth
    }

    pub fn components(&self) -> &[CharPSeries] {
        &self.components
    }

    pub fn p(&self) -> u64 {
        self.components[0].p
    }

    /// Drops `f_0` and reindexes.
    pub fn shift(&self) -> Result<Self> {
        if self.depth() < 2 {
            return Err(Error::Precondition("cannot shift a tower of depth 1".into()));
        }
        Ok(TiltTower {
            components: self.components[1..].to_vec(),
            effective_depth: self.effective_depth.saturating_sub(1).max(1),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("tower {}\n", self.depth());
        for (i, f) in self.components.iter().enumerate() {
            out.push_str(&format!("f{i} = {f}\n"));
        }
        out
    }
}

fn check_depths(x: &TiltTower, y: &TiltTower) -> Result<()> {
    if x.depth() != y.depth() {
        return Err(Error::TowerIncompatible {
            index: x.depth().min(y.depth()),
            detail: format!("depth {} against depth {}", x.depth(), y.depth()),
        });
    }
    Ok(())
}

/// Componentwise product.
pub fn tower_mul(x: &TiltTower, y: &TiltTower) -> Result<TiltTower> {
    check_depths(x, y)?;
    let components = x
        .components
        .iter()
        .zip(&y.components)
        .map(|(a, b)| a.checked_mul(b))
        .collect::<Result<_>>()?;
    Ok(TiltTower {
        components,
        effective_depth: x.effective_depth.min(y.effective_depth),
    })
}

/// Component `i` is `lim_j (x_{i+j} + y_{i+j})^{p^j}`.
///
/// Each limit is evaluated at every available `j` and the first stable value
/// kept; components whose limit has not stabilized within the tower are
/// excluded from the effective depth.
pub fn tower_add(x: &TiltTower, y: &TiltTower) -> Result<TiltTower> {
    check_depths(x, y)?;
    let t = x.depth();
    let mut components = Vec::with_capacity(t);
    let mut effective = x.effective_depth.min(y.effective_depth);
    for i in 0..t {
        let mut prev: Option<CharPSeries> = None;
        let mut stable = false;
        for j in 0..t - i {
            let mut s = x.components[i + j].checked_add(&y.components[i + j])?;
            for _ in 0..j {
                s = s.frobenius();
            }
            if let Some(pv) = &prev {
                let d = pv.deg_bound.min(s.deg_bound);
                if pv.truncate_deg(d) == s.truncate_deg(d) {
                    stable = true;
                    break;
                }
            }
            prev = Some(s);
        }
        // The last component has a single approximant; additivity of Frobenius
        // makes j = 0 already exact.
        if !stable && i + 1 < t {
            effective = effective.min(i);
        }
        components.push(prev.expect("at least one approximant"));
    }
    Ok(TiltTower {
        components,
        effective_depth: effective,
    })
}

/// `x ↦ x^♯` modulo `p`: the 0-th component.
pub fn sharp(x: &TiltTower) -> &CharPSeries {
    &x.components[0]
}

/// `g ↦ (g, g^{1/p}, …, g^{1/p^{T-1}})`.
pub fn tower_from_charp(g: &CharPSeries, depth: usize) -> Result<TiltTower> {
    if depth == 0 {
        return Err(Error::Precondition("tower depth must be positive".into()));
    }
    let mut components = vec![g.clone()];
    for _ in 1..depth {
        let next = components.last().expect("nonempty").frobenius_inv()?;
        components.push(next);
    }
    Ok(TiltTower {
        components,
        effective_depth: depth,
    })
}

/// Inverse of [`tower_from_charp`].
pub fn charp_from_tower(x: &TiltTower) -> CharPSeries {
    x.components[0].clone()
}

/// The distinguished tower `q' = (q, q^{1/p}, q^{1/p^2}, …)`.
pub fn q_prime(p: u64, depth: usize, deg_bound: i64) -> Result<TiltTower> {
    let q = CharPSeries::new(p, [(Exponent::integer(1), 1)], Exponent::integer(deg_bound), 0, false)?;
    tower_from_charp(&q, depth)
}
