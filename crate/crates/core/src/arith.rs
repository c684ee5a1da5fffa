//! Small integer helpers shared by the coefficient and matrix code.

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    add_mod(a, m - b % m, m)
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub(crate) fn reduce_i128(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub(crate) fn val_p_i128(mut a: i128, p: u64) -> Option<u32> {
    if a == 0 {
        return None;
    }
    let p = p as i128;
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    Some(v)
}

/// Returns `Some(r)` when `n = p^r`.
pub(crate) fn log_p_exact(mut n: u64, p: u64) -> Option<u32> {
    if n == 0 {
        return None;
    }
    let mut r = 0;
    while n.is_multiple_of(p) {
        n /= p;
        r += 1;
    }
    (n == 1).then_some(r)
}

pub(crate) fn checked_pow(p: u64, e: u32) -> Option<u64> {
    p.checked_pow(e)
}
