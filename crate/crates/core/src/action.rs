//! Matrices over `Z/p^m`, cusp points of the anticanonical tower and the
//! Hodge–Tate period map on them.
//!
//! A cusp point is a pair `(γ, f)` with `γ` upper triangular and `f` the
//! q-expansion at that cusp. A general representative `(γ, f)` with `γ`
//! in the anticanonical chart (lower-right entry a unit) is brought to this
//! form by writing `γ = U·(1 0; h 1)` and twisting `f` by `-h`; the action of
//! `Γ_0(p)` is left multiplication followed by that normalization.

use std::fmt;

use crate::arith::{inv_mod, is_prime, reduce_i128};
use crate::error::{Error, Result};
use crate::series::FracSeries;

/// `(a b; c d)` with entries in `Z/p^m` and unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    p: u64,
    m: u32,
    a: u64,
    b: u64,
    c: u64,
    d: u64,
}

fn modulus(p: u64, m: u32) -> Result<u64> {
    p.checked_pow(m)
        .filter(|&n| n < 1 << 62)
        .ok_or_else(|| Error::InvalidPrecision(format!("{p}^{m} is too large")))
}

impl Mat2 {
    pub fn new(p: u64, m: u32, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidPrecision("matrix precision must be positive".into()));
        }
        let n = modulus(p, m)?;
        let r = |x: i64| reduce_i128(x as i128, n);
        let g = Mat2 {
            p,
            m,
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        };
        if g.det().is_multiple_of(p) {
            return Err(Error::NotInvertible(format!("determinant of {g} is not a unit")));
        }
        Ok(g)
    }

    pub fn identity(p: u64, m: u32) -> Result<Self> {
        Self::new(p, m, 1, 0, 0, 1)
    }

    fn with_entries(&self, a: i128, b: i128, c: i128, d: i128) -> Self {
        let n = self.modulus();
        Mat2 {
            p: self.p,
            m: self.m,
            a: reduce_i128(a, n),
            b: reduce_i128(b, n),
            c: reduce_i128(c, n),
            d: reduce_i128(d, n),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.m)
    }

    /// Entries `[a, b, c, d]`, each in `[0, p^m)`.
    pub fn entries(&self) -> [u64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> u64 {
        let [a, b, c, d] = self.entries().map(|x| x as i128);
        reduce_i128(a * d - b * c, self.modulus())
    }

    pub fn is_upper(&self) -> bool {
        self.c == 0
    }

    pub fn inverse(&self) -> Self {
        let n = self.modulus();
        let inv = inv_mod(self.det(), n).expect("determinant is a unit") as i128;
        let [a, b, c, d] = self.entries().map(|x| x as i128);
        self.with_entries(d * inv % n as i128, -b * inv % n as i128, -c * inv % n as i128, a * inv % n as i128)
    }

    /// `γ^∨ = det(γ)·γ^-1`.
    pub fn dual(&self) -> Self {
        let [a, b, c, d] = self.entries().map(|x| x as i128);
        self.with_entries(d, -b, -c, a)
    }

    /// Parses `a,b,c,d`.
    pub fn parse(p: u64, m: u32, text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Usage(format!("expected four comma-separated entries, got {text:?}")));
        }
        let mut e = [0i64; 4];
        for (slot, s) in e.iter_mut().zip(&parts) {
            *slot = s
                .parse()
                .map_err(|_| Error::Usage(format!("matrix entry {s:?} is not an integer")))?;
        }
        Self::new(p, m, e[0], e[1], e[2], e[3])
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// Exact product modulo `p^m`.
pub fn mat_mul(x: &Mat2, y: &Mat2) -> Result<Mat2> {
    if x.p != y.p {
        return Err(Error::ContextMismatch);
    }
    if x.m != y.m {
        return Err(Error::PrecisionMismatch(x.m, y.m));
    }
    let n = x.modulus() as i128;
    let [a1, b1, c1, d1] = x.entries().map(|v| v as i128);
    let [a2, b2, c2, d2] = y.entries().map(|v| v as i128);
    Ok(x.with_entries(
        (a1 * a2 + b1 * c2) % n,
        (a1 * b2 + b1 * d2) % n,
        (c1 * a2 + d1 * c2) % n,
        (c1 * b2 + d1 * d2) % n,
    ))
}

impl std::ops::Mul for &Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: &Mat2) -> Mat2 {
        mat_mul(self, rhs).expect("matrices over different rings")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// `c ≡ 0 mod p^n`.
    Gamma0(u32),
    /// Upper triangular at the working precision.
    Gamma0Infinity,
    /// `(Z_p Z_p; Z_p Z_p^×)`.
    Anticanonical,
    /// `(Z_p Z_p^×; Z_p^× pZ_p)`.
    Canonical,
}

/// Membership, decided from the entries modulo `p^m`.
pub fn subgroup_test(g: &Mat2, which: Subgroup) -> Result<bool> {
    let p = g.p;
    Ok(match which {
        Subgroup::Gamma0(n) => {
            if n > g.m {
                return Err(Error::Precondition(format!(
                    "Gamma0(p^{n}) is not decidable at matrix precision {}",
                    g.m
                )));
            }
            g.c.is_multiple_of(p.pow(n))
        }
        Subgroup::Gamma0Infinity => g.c == 0,
        Subgroup::Anticanonical => !g.d.is_multiple_of(p),
        Subgroup::Canonical => !g.b.is_multiple_of(p) && !g.c.is_multiple_of(p) && g.d.is_multiple_of(p),
    })
}

/// `γ = (det/d, b; 0, d)·(1 0; h 1)` with `h = c/d`.
pub fn decompose_gamma(g: &Mat2) -> Result<(Mat2, u64)> {
    let n = g.modulus();
    let d_inv = inv_mod(g.d, n).ok_or(Error::DecompositionUndefined(g.d))? as i128;
    let upper = g.with_entries(g.det() as i128 * d_inv % n as i128, g.b as i128, 0, g.d as i128);
    let h = reduce_i128(g.c as i128 * d_inv, n);
    Ok((upper, h))
}

/// `(1 0; h 1)`.
pub fn lower_unipotent(p: u64, m: u32, h: i64) -> Result<Mat2> {
    Mat2::new(p, m, 1, 0, h, 1)
}

/// A point `(x : y)` of `P^1(Z/p^m)` in normal form: `(x/y : 1)` when `y` is a
/// unit, `(1 : y/x)` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    p: u64,
    m: u32,
    x: u64,
    y: u64,
}

impl ProjPoint {
    pub fn new(p: u64, m: u32, x: i64, y: i64) -> Result<Self> {
        let n = modulus(p, m)?;
        Self::normalize(p, m, reduce_i128(x as i128, n), reduce_i128(y as i128, n))
    }

    fn normalize(p: u64, m: u32, x: u64, y: u64) -> Result<Self> {
        let n = p.pow(m);
        let (x, y) = if let Some(inv) = inv_mod(y, n) {
            (reduce_i128(x as i128 * inv as i128, n), 1)
        } else if let Some(inv) = inv_mod(x, n) {
            (1, reduce_i128(y as i128 * inv as i128, n))
        } else {
            return Err(Error::Precondition(format!("({x} : {y}) vanishes modulo {p}")));
        };
        Ok(ProjPoint { p, m, x, y })
    }

    pub fn coords(&self) -> (u64, u64) {
        (self.x, self.y)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {})", self.x, self.y)
    }
}

/// `γ·(x; y)`, renormalized.
pub fn proj_action(g: &Mat2, pt: &ProjPoint) -> Result<ProjPoint> {
    if g.p != pt.p || g.m != pt.m {
        return Err(Error::PrecisionMismatch(g.m, pt.m));
    }
    let n = g.modulus();
    let [a, b, c, d] = g.entries().map(|v| v as i128);
    let (x, y) = (pt.x as i128, pt.y as i128);
    ProjPoint::normalize(g.p, g.m, reduce_i128(a * x + b * y, n), reduce_i128(c * x + d * y, n))
}

/// The formal element `q^{r/p^∞}·ζ^s_{p^∞}` of the Tate module, written
/// additively.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TateSymbol {
    p: u64,
    m: u32,
    r: u64,
    s: u64,
}

impl TateSymbol {
    pub fn new(p: u64, m: u32, r: i64, s: i64) -> Result<Self> {
        let n = modulus(p, m)?;
        Ok(TateSymbol {
            p,
            m,
            r: reduce_i128(r as i128, n),
            s: reduce_i128(s as i128, n),
        })
    }

    pub fn parts(&self) -> (u64, u64) {
        (self.r, self.s)
    }

    pub fn scale(&self, k: i64) -> Self {
        let n = self.p.pow(self.m);
        TateSymbol {
            r: reduce_i128(self.r as i128 * k as i128, n),
            s: reduce_i128(self.s as i128 * k as i128, n),
            ..*self
        }
    }

    /// On the canonical line `⟨ζ_{p^∞}⟩`.
    pub fn is_canonical(&self) -> bool {
        self.r == 0
    }
}

impl std::ops::Add for TateSymbol {
    type Output = TateSymbol;

    fn add(self, rhs: TateSymbol) -> TateSymbol {
        let n = self.p.pow(self.m);
        TateSymbol {
            r: (self.r + rhs.r) % n,
            s: (self.s + rhs.s) % n,
            ..self
        }
    }
}

fn require_upper(g: &Mat2) -> Result<()> {
    if g.is_upper() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{g} is not upper triangular")))
    }
}

/// The ordered basis `(q^{d/p^∞}, ζ^a q^{-b/p^∞})` attached to `(a b; 0 d)`.
pub fn tate_basis(g: &Mat2) -> Result<(TateSymbol, TateSymbol)> {
    require_upper(g)?;
    let [a, b, _, d] = g.entries().map(|v| v as i64);
    Ok((TateSymbol::new(g.p, g.m, d, 0)?, TateSymbol::new(g.p, g.m, -b, a)?))
}

/// The line `(x : y)` with `x·e1 + y·e2` canonical, found by solving
/// `x·d - y·b = 0` from the Tate basis.
pub fn canonical_line(g: &Mat2) -> Result<ProjPoint> {
    let (e1, e2) = tate_basis(g)?;
    let n = g.modulus();
    // r-components: x·r1 + y·r2 = 0. Pivot on whichever coefficient is a unit.
    let (r1, r2) = (e1.r, e2.r);
    let (x, y) = if let Some(inv) = inv_mod(r1, n) {
        (reduce_i128(-(r2 as i128) * inv as i128, n), 1)
    } else {
        let inv = inv_mod(r2, n).ok_or_else(|| Error::Precondition(format!("{g} has a non-unit determinant")))?;
        (1, reduce_i128(-(r1 as i128) * inv as i128, n))
    };
    debug_assert!((e1.scale(x as i64) + e2.scale(y as i64)).is_canonical());
    ProjPoint::normalize(g.p, g.m, x, y)
}

/// `a ↦ diag(a, a^-1)`.
pub fn splitting_section(p: u64, m: u32, a: i64) -> Result<Mat2> {
    let n = modulus(p, m)?;
    let a = reduce_i128(a as i128, n);
    let inv = inv_mod(a, n).ok_or_else(|| Error::NotInvertible(format!("{a} modulo {p}^{m}")))?;
    Mat2::new(p, m, a as i64, 0, 0, inv as i64)
}

/// A point of `Γ_0(p^∞) × D_∞`: an upper triangular matrix, the expansion of a
/// function at the corresponding cusp, and the renormalization index `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspPoint {
    gamma: Mat2,
    series: FracSeries,
    e: i64,
    label: String,
}

impl CuspPoint {
    pub fn new(gamma: Mat2, series: FracSeries, e: i64, label: impl Into<String>) -> Result<Self> {
        require_upper(&gamma)?;
        Self::check(&gamma, &series, e)?;
        Ok(CuspPoint {
            gamma,
            series,
            e,
            label: label.into(),
        })
    }

    fn check(gamma: &Mat2, series: &FracSeries, e: i64) -> Result<()> {
        if series.p() != gamma.p {
            return Err(Error::ContextMismatch);
        }
        if e.rem_euclid(gamma.p as i64) == 0 {
            return Err(Error::NotInvertible(format!("ramification index {e}")));
        }
        let need = series.depth_bound();
        let have = series.ctx().s().min(gamma.m);
        if need > have {
            return Err(Error::InsufficientDepth { needed: need, available: have });
        }
        Ok(())
    }

    /// Normalizes an arbitrary anticanonical representative `(γ, f)`: with
    /// `γ = U·(1 0; h 1)` the point is `(U, twist(f, -h))`.
    pub fn from_representative(gamma: Mat2, series: FracSeries, e: i64, label: impl Into<String>) -> Result<Self> {
        Self::check(&gamma, &series, e)?;
        let (upper, h) = decompose_gamma(&gamma)?;
        let series = series.twist(-(h as i64), e)?;
        Ok(CuspPoint {
            gamma: upper,
            series,
            e,
            label: label.into(),
        })
    }

    pub fn gamma(&self) -> &Mat2 {
        &self.gamma
    }

    pub fn series(&self) -> &FracSeries {
        &self.series
    }

    pub fn e(&self) -> i64 {
        self.e
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Left action of `γ ∈ Γ_0(p)`: `(γ·x.gamma, x.series)`, renormalized.
pub fn act_cusp(g: &Mat2, x: &CuspPoint) -> Result<CuspPoint> {
    if !subgroup_test(g, Subgroup::Gamma0(1))? {
        return Err(Error::Precondition(format!("{g} is not in Gamma0(p)")));
    }
    let g3 = mat_mul(g, &x.gamma)?;
    CuspPoint::from_representative(g3, x.series.clone(), x.e, x.label.clone())
}

/// `π_HT(γ, q) = (b : d)`; the series plays no role.
pub fn ht(x: &CuspPoint) -> ProjPoint {
    let g = &x.gamma;
    ProjPoint::normalize(g.p, g.m, g.b, g.d).expect("d is a unit on the anticanonical chart")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{CycloCoeff, RingCtx};
    use crate::series::Exponent;

    fn m(p: u64, e: [i64; 4]) -> Mat2 {
        Mat2::new(p, 2, e[0], e[1], e[2], e[3]).unwrap()
    }

    fn root_series(p: u64, depth: u32) -> FracSeries {
        let ctx = RingCtx::new(p, 4, depth).unwrap();
        FracSeries::monomial(&ctx, Exponent::new(1, depth, p), CycloCoeff::one(&ctx), Exponent::integer(3))
            .unwrap()
    }

    #[test]
    fn products_and_blocks() {
        let p = 5;
        assert_eq!(&m(p, [1, 0, p as i64, 1]) * &m(p, [1, 0, p as i64, 1]), m(p, [1, 0, 2 * p as i64, 1]));
        assert!(subgroup_test(&m(p, [1, 1, 0, 1]), Subgroup::Gamma0Infinity).unwrap());
        let w = m(p, [0, 1, 1, 0]);
        assert!(!subgroup_test(&w, Subgroup::Anticanonical).unwrap());
        assert!(subgroup_test(&w, Subgroup::Canonical).unwrap());
        assert!(subgroup_test(&m(p, [1, 0, 5, 1]), Subgroup::Gamma0(1)).unwrap());
        assert!(!subgroup_test(&m(p, [1, 0, 5, 1]), Subgroup::Gamma0(2)).unwrap());
        assert!(subgroup_test(&w, Subgroup::Gamma0(3)).is_err());
        assert!(matches!(
            mat_mul(&w, &Mat2::identity(p, 3).unwrap()),
            Err(Error::PrecisionMismatch(2, 3))
        ));
        assert!(Mat2::new(p, 2, 5, 0, 0, 1).is_err());
        assert_eq!(&w.dual() * &w, Mat2::new(p, 2, w.det() as i64, 0, 0, w.det() as i64).unwrap());
        assert_eq!(&w.inverse() * &w, Mat2::identity(p, 2).unwrap());
    }

    #[test]
    fn decompositions() {
        let p = 5;
        let up = m(p, [2, 3, 0, 4]);
        assert_eq!(decompose_gamma(&up).unwrap(), (up, 0));
        let (u, h) = decompose_gamma(&m(p, [1, 0, 5, 1])).unwrap();
        assert_eq!((u, h), (Mat2::identity(p, 2).unwrap(), 5));

        let g = m(p, [2, 1, 5, 1]);
        let (u, h) = decompose_gamma(&g).unwrap();
        assert_eq!(u, m(p, [2 - 5, 1, 0, 1]));
        assert_eq!(&u * &lower_unipotent(p, 2, h as i64).unwrap(), g);
        assert!(matches!(decompose_gamma(&m(p, [0, 1, 1, 0])), Err(Error::DecompositionUndefined(0))));
    }

    #[test]
    fn action_examples() {
        let p = 3;
        let f = root_series(p, 2);
        let id = m(p, [1, 0, 0, 1]);
        let x = CuspPoint::new(id, f.clone(), 1, "inf").unwrap();
        assert_eq!(act_cusp(&id, &x).unwrap(), x);

        let y = act_cusp(&m(p, [1, 0, 3, 1]), &x).unwrap();
        assert_eq!(*y.gamma(), id);
        let ctx = f.ctx();
        let z = CycloCoeff::zeta(ctx, 2).unwrap().pow(9 - 3);
        assert_eq!(y.series().coeff(&Exponent::new(1, 2, p)), Some(&z));

        let up = m(p, [2, 1, 0, 4]);
        let w = act_cusp(&up, &x).unwrap();
        assert_eq!((*w.gamma(), w.series()), (up, &f));
        assert!(act_cusp(&m(p, [1, 0, 1, 1]), &x).is_err());
    }

    #[test]
    fn period_map() {
        let p = 5;
        let f = root_series(p, 1);
        let id = Mat2::identity(p, 2).unwrap();
        assert_eq!(ht(&CuspPoint::new(id, f.clone(), 1, "").unwrap()).coords(), (0, 1));
        let g = m(p, [1, 7, 0, 3]);
        let x = CuspPoint::new(g, f.clone(), 1, "").unwrap();
        assert_eq!(ht(&x), ProjPoint::new(p, 2, 7, 3).unwrap());
        let lower = m(p, [1, 0, 5, 1]);
        assert_eq!(ht(&act_cusp(&lower, &x).unwrap()), ProjPoint::new(p, 2, 7, 5 * 7 + 3).unwrap());
        assert_eq!(canonical_line(&g).unwrap(), ht(&x));
        assert_eq!(canonical_line(&id).unwrap().coords(), (0, 1));

        let (e1, e2) = tate_basis(&g).unwrap();
        let sum = e1.scale(7) + e2.scale(3);
        assert_eq!(sum.parts(), (0, 3));
        assert_eq!(proj_action(&m(p, [0, 1, 1, 0]), &ProjPoint::new(p, 2, 2, 1).unwrap()).unwrap().coords(), (13, 1));
    }

    #[test]
    fn splitting() {
        let p = 3;
        assert_eq!(splitting_section(p, 2, 1).unwrap(), Mat2::identity(p, 2).unwrap());
        let s = splitting_section(p, 2, 2).unwrap();
        assert_eq!(s.entries(), [2, 0, 0, 5]);
        let x = CuspPoint::new(s, root_series(p, 1), 1, "").unwrap();
        assert_eq!(ht(&x).coords(), (0, 1));
        let moved = act_cusp(&m(p, [4, 2, 0, 1]), &x).unwrap();
        assert_eq!(moved.gamma().entries()[2], 0);
        assert!(splitting_section(p, 2, 3).is_err());
    }
}
