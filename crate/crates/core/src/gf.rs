//! Exact arithmetic in GF(p^h).
//!
//! An element is stored as its canonical code in `[0, q)`: the base-p digits of
//! the code, least significant first, are the coefficients `c_0, c_1, ...` of a
//! polynomial in `x` reduced modulo the field's irreducible modulus.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default guard on the field order.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 20;

/// Fields up to this order carry log/antilog tables.
const LOG_TABLE_LIMIT: u32 = 1 << 16;
/// Odd-characteristic extension fields up to this order carry an addition table.
const ADD_TABLE_LIMIT: u32 = 256;

/// A field element, identified by its canonical code.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    /// Element with the given code; the caller guarantees `code < q`.
    #[inline]
    pub(crate) const fn from_code(code: u32) -> Fe {
        Fe(code)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    /// `exp[i] = g^i` for `i` in `[0, 2(q-1))`, doubled so products need no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    p: u32,
    h: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
    add_table: Option<Vec<u32>>,
}

/// The field GF(p^h) together with its reduction polynomial.
///
/// Cloning is cheap; the arithmetic tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("h", &self.inner.h)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.inner.p == other.inner.p && self.inner.modulus == other.inner.modulus
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u64) -> bool {
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

fn checked_order(p: u64, h: u32, max: u64) -> Result<u32> {
    let q = (p as u128).checked_pow(h).filter(|&q| q <= max as u128 && q <= u32::MAX as u128);
    match q {
        Some(q) => Ok(q as u32),
        None => Err(Error::FieldTooLarge { p, h, max }),
    }
}

// Polynomials over F_p as coefficient vectors, low degree first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r[r.len() - 1] as u64;
        let shift = r.len() - 1 - dm;
        for (i, &mc) in m.iter().enumerate() {
            let sub = (lead * mc as u64) % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - sub) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn digits(mut code: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % p);
        code /= p;
    }
    out
}

fn undigits(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

/// Monic polynomial of degree `deg` whose lower coefficients are the digits of `code`.
fn monic_from_code(code: u32, p: u32, deg: usize) -> Vec<u32> {
    let mut f = digits(code, p, deg);
    f.push(1);
    f
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let g = monic_from_code(code as u32, p, d);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// GF(p^h) with the default order guard.
    pub fn new(p: u64, h: u32) -> Result<Self> {
        Self::with_limit(p, h, DEFAULT_MAX_ORDER)
    }

    /// GF(p^h) with the lexicographically smallest monic irreducible modulus.
    pub fn with_limit(p: u64, h: u32, max_order: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if h < 1 {
            return Err(Error::ZeroDegree);
        }
        checked_order(p, h, max_order)?;
        let p32 = p as u32;
        let deg = h as usize;
        let count = p32.pow(h);
        let modulus = (0..count)
            .map(|code| monic_from_code(code, p32, deg))
            .find(|f| is_irreducible(f, p32))
            .expect("an irreducible polynomial of every degree exists");
        Ok(Self::build(p32, h, modulus))
    }

    /// GF(p^h) with an explicit modulus (coefficients low degree first, monic).
    pub fn with_modulus(p: u64, modulus: &[u32], max_order: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if modulus.len() < 2 {
            return Err(Error::ZeroDegree);
        }
        let h = (modulus.len() - 1) as u32;
        checked_order(p, h, max_order)?;
        let p32 = p as u32;
        if modulus.last() != Some(&1) {
            return Err(Error::InvalidModulus("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p32) {
            return Err(Error::InvalidModulus(format!("coefficients must be below {p}")));
        }
        if !is_irreducible(modulus, p32) {
            return Err(Error::InvalidModulus(format!("{modulus:?} is reducible over F_{p}")));
        }
        Ok(Self::build(p32, h, modulus.to_vec()))
    }

    fn build(p: u32, h: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(h);
        let mut inner = Inner { p, h, q, modulus, tables: None, add_table: None };
        if p != 2 && h > 1 && q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = slow_add(&inner, a, b);
                }
            }
            inner.add_table = Some(table);
        }
        if q <= LOG_TABLE_LIMIT {
            inner.tables = Some(build_tables(&inner));
        }
        FieldSpec { inner: Arc::new(inner) }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn h(&self) -> u32 {
        self.inner.h
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Reduction polynomial, low degree first, monic of degree h.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.h == 1
    }

    pub fn elem(&self, code: u64) -> Result<Fe> {
        if code >= self.inner.q as u64 {
            return Err(Error::ElementOutOfRange { code, q: self.inner.q });
        }
        Ok(Fe(code as u32))
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.inner.q).map(Fe)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// `-1` if `odd`, else `1`.
    #[inline]
    pub fn sign(&self, odd: bool) -> Fe {
        if odd {
            self.neg(Fe::ONE)
        } else {
            Fe::ONE
        }
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let inner = &*self.inner;
        if inner.p == 2 {
            Fe(a.0 ^ b.0)
        } else if inner.h == 1 {
            let s = a.0 + b.0;
            Fe(if s >= inner.p { s - inner.p } else { s })
        } else if let Some(t) = &inner.add_table {
            Fe(t[(a.0 * inner.q + b.0) as usize])
        } else {
            Fe(slow_add(inner, a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        let inner = &*self.inner;
        if inner.p == 2 || a.0 == 0 {
            a
        } else if inner.h == 1 {
            Fe(inner.p - a.0)
        } else {
            let p = inner.p;
            let mut out = 0u32;
            let mut scale = 1u32;
            let mut code = a.0;
            for _ in 0..inner.h {
                let c = code % p;
                code /= p;
                out += ((p - c) % p) * scale;
                scale *= p;
            }
            Fe(out)
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let inner = &*self.inner;
        if let Some(t) = &inner.tables {
            let i = t.log[a.0 as usize] + t.log[b.0 as usize];
            Fe(t.exp[i as usize])
        } else if inner.h == 1 {
            Fe(((a.0 as u64 * b.0 as u64) % inner.p as u64) as u32)
        } else {
            Fe(slow_mul(inner, a.0, b.0))
        }
    }

    /// Multiplicative inverse; `inv(0)` is an error.
    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero { q: self.inner.q });
        }
        let inner = &*self.inner;
        if let Some(t) = &inner.tables {
            let order = inner.q - 1;
            let l = t.log[a.0 as usize];
            Ok(Fe(t.exp[((order - l) % order) as usize]))
        } else {
            Ok(self.pow(a, inner.q as u64 - 2))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square-and-multiply; `pow(a, 0) = 1` for every `a`.
    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Product of a sequence of elements.
    pub fn product<I: IntoIterator<Item = Fe>>(&self, items: I) -> Fe {
        items.into_iter().fold(Fe::ONE, |acc, x| self.mul(acc, x))
    }

    /// Sum of a sequence of elements.
    pub fn sum<I: IntoIterator<Item = Fe>>(&self, items: I) -> Fe {
        items.into_iter().fold(Fe::ZERO, |acc, x| self.add(acc, x))
    }

    /// Coefficients of the polynomial representing `a`, low degree first.
    pub fn coefficients(&self, a: Fe) -> Vec<u32> {
        digits(a.0, self.inner.p, self.inner.h as usize)
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<Fe> {
        let reduced = poly_rem(
            &coeffs.iter().map(|&c| c % self.inner.p).collect::<Vec<_>>(),
            &self.inner.modulus,
            self.inner.p,
        );
        Ok(Fe(undigits(&reduced, self.inner.p)))
    }
}

fn slow_add(inner: &Inner, a: u32, b: u32) -> u32 {
    let p = inner.p;
    let (mut a, mut b) = (a, b);
    let mut out = 0u32;
    let mut scale = 1u32;
    for _ in 0..inner.h {
        out += ((a % p + b % p) % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

fn slow_mul(inner: &Inner, a: u32, b: u32) -> u32 {
    let p = inner.p as u64;
    let h = inner.h as usize;
    let da = digits(a, inner.p, h);
    let db = digits(b, inner.p, h);
    let mut prod = vec![0u32; 2 * h - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p) as u32;
        }
    }
    undigits(&poly_rem(&prod, &inner.modulus, inner.p), inner.p)
}

fn raw_mul(inner: &Inner, a: u32, b: u32) -> u32 {
    if inner.h == 1 {
        ((a as u64 * b as u64) % inner.p as u64) as u32
    } else {
        slow_mul(inner, a, b)
    }
}

fn build_tables(inner: &Inner) -> Tables {
    let q = inner.q;
    let order = q - 1;
    // Smallest-code primitive element.
    let generator = (1..q)
        .find(|&g| {
            let mut x = g;
            let mut k = 1u32;
            while x != 1 {
                x = raw_mul(inner, x, g);
                k += 1;
                if k > order {
                    return false;
                }
            }
            k == order
        })
        .expect("the multiplicative group of a finite field is cyclic");
    let mut exp = vec![0u32; 2 * order as usize];
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for i in 0..order {
        exp[i as usize] = x;
        log[x as usize] = i;
        x = raw_mul(inner, x, generator);
    }
    for i in order..2 * order {
        exp[i as usize] = exp[(i - order) as usize];
    }
    Tables { exp, log }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_has_trivial_modulus() {
        let f = FieldSpec::new(2, 1).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn gf4_modulus_is_x2_x_1() {
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn gf9_modulus_matches_enumeration() {
        // Monic quadratics over F_3 in code order; the first without a root is x^2 + 1.
        let first_rootless = (0..9u32)
            .map(|c| (c % 3, c / 3))
            .find(|&(c0, c1)| (0..3u32).all(|x| (x * x + c1 * x + c0) % 3 != 0))
            .unwrap();
        assert_eq!(first_rootless, (1, 0));
        let f = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn gf8_modulus_is_x3_x_1() {
        let f = FieldSpec::new(2, 3).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn gf4_square_of_x() {
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.mul(Fe(2), Fe(2)), Fe(3));
    }

    #[test]
    fn gf5_addition() {
        let f = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f.add(Fe(3), Fe(4)), Fe(2));
    }

    #[test]
    fn inverse_of_one_and_zero() {
        for (p, h) in [(2, 1), (3, 2), (7, 1), (2, 4)] {
            let f = FieldSpec::new(p, h).unwrap();
            assert_eq!(f.inv(Fe::ONE).unwrap(), Fe::ONE);
            assert!(matches!(f.inv(Fe::ZERO), Err(Error::DivisionByZero { .. })));
        }
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(FieldSpec::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldSpec::new(3, 0).unwrap_err(), Error::ZeroDegree);
        assert!(matches!(FieldSpec::new(2, 21), Err(Error::FieldTooLarge { .. })));
        assert!(FieldSpec::with_limit(2, 21, 1 << 21).is_ok());
    }

    #[test]
    fn explicit_modulus_is_validated() {
        assert!(FieldSpec::with_modulus(2, &[1, 0, 1], DEFAULT_MAX_ORDER).is_err());
        assert!(FieldSpec::with_modulus(3, &[1, 0, 2], DEFAULT_MAX_ORDER).is_err());
        assert!(FieldSpec::with_modulus(3, &[2, 1, 1], DEFAULT_MAX_ORDER).is_ok());
        let f = FieldSpec::with_modulus(2, &[1, 0, 1, 1], DEFAULT_MAX_ORDER).unwrap();
        // x * x^2 = x^3 = x^2 + 1 under x^3 + x^2 + 1.
        assert_eq!(f.mul(Fe(2), Fe(4)), Fe(5));
    }

    #[test]
    fn tables_agree_with_polynomial_multiplication() {
        for (p, h) in [(2, 4), (3, 3), (5, 2), (7, 2)] {
            let f = FieldSpec::new(p, h).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let slow = if a.is_zero() || b.is_zero() {
                        0
                    } else {
                        slow_mul(&f.inner, a.0, b.0)
                    };
                    assert_eq!(f.mul(a, b).0, slow);
                }
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = FieldSpec::new(2, 17).unwrap();
        assert!(f.inner.tables.is_none());
        let a = Fe(12345);
        let ai = f.inv(a).unwrap();
        assert_eq!(f.mul(a, ai), Fe::ONE);
        assert_eq!(f.pow(a, f.q() as u64 - 1), Fe::ONE);
    }

    #[test]
    fn characteristic_and_negation() {
        for (p, h) in [(2, 3), (3, 2), (5, 1), (7, 2)] {
            let f = FieldSpec::new(p, h).unwrap();
            let s = f.sum(std::iter::repeat_n(Fe::ONE, p as usize));
            assert_eq!(s, Fe::ZERO);
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                if p == 2 {
                    assert_eq!(f.neg(a), a);
                }
            }
        }
    }

    #[test]
    fn coefficient_codec_round_trip() {
        let f = FieldSpec::new(3, 3).unwrap();
        for a in f.elements() {
            assert_eq!(f.from_coefficients(&f.coefficients(a)).unwrap(), a);
        }
        assert!(f.elem(27).is_err());
    }
}
