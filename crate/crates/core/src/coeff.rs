//! Coefficient rings: finite fields `F_q` and their truncated unramified
//! lifts, the Galois rings `GR(p^m, f) = (Z/p^m)[x]/(P(x))`.
//!
//! A finite field is the `m = 1` case. Both use the same defining
//! polynomial (a Conway polynomial from a fixed table), lifted
//! coefficient-wise, so reduction mod `p` is just reduction of coordinates.

use crate::error::{Error, Result};
use crate::ring::Ring;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use std::sync::Arc;

/// Largest supported extension degree `f`.
pub const MAX_DEGREE: usize = 4;

/// Conway polynomials, coefficients listed from the constant term upward.
const CONWAY: &[(u64, &[u64])] = &[
    (2, &[1, 1]),
    (2, &[1, 1, 1]),
    (2, &[1, 1, 0, 1]),
    (2, &[1, 1, 0, 0, 1]),
    (3, &[1, 1]),
    (3, &[2, 2, 1]),
    (3, &[1, 2, 0, 1]),
    (3, &[2, 0, 0, 2, 1]),
    (5, &[3, 1]),
    (5, &[2, 4, 1]),
    (5, &[3, 3, 0, 1]),
    (5, &[2, 4, 4, 0, 1]),
    (7, &[4, 1]),
    (7, &[3, 6, 1]),
    (7, &[4, 0, 6, 1]),
    (7, &[3, 4, 5, 0, 1]),
];

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// The defining polynomial shipped for `F_{p^f}`, if any.
pub fn conway_polynomial(p: u64, f: usize) -> Option<&'static [u64]> {
    CONWAY
        .iter()
        .find(|(q, c)| *q == p && c.len() == f + 1)
        .map(|(_, c)| *c)
}

/// An element of a Galois ring: coordinates on `1, x, …, x^{f-1}`.
/// Coordinates past the ring's degree are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Coeff(pub(crate) [u64; MAX_DEGREE]);

impl Coeff {
    pub fn coords(&self) -> &[u64; MAX_DEGREE] {
        &self.0
    }
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.0.iter().rposition(|&c| c != 0).unwrap_or(0);
        if last == 0 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "{:?}", &self.0[..=last])
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
struct Inner {
    p: u64,
    m: u32,
    f: usize,
    modulus: u64,
    /// Monic defining polynomial, lifted to `Z/p^m`, length `f + 1`.
    poly: Vec<u64>,
}

/// `GR(p^m, f)`; `m = 1` gives the finite field `F_{p^f}`.
#[derive(Clone, PartialEq, Eq)]
pub struct GaloisRing(Arc<Inner>);

impl fmt::Debug for GaloisRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.m == 1 {
            write!(f, "F_{}^{}", self.0.p, self.0.f)
        } else {
            write!(f, "GR({}^{}, {})", self.0.p, self.0.m, self.0.f)
        }
    }
}

impl GaloisRing {
    pub fn new(p: u64, m: u32, f: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Unsupported(format!("{p} is not prime")));
        }
        if m == 0 || f == 0 {
            return Err(Error::Unsupported("precision and degree must be positive".into()));
        }
        let poly = conway_polynomial(p, f)
            .ok_or_else(|| Error::Unsupported(format!("no defining polynomial for F_{p}^{f}")))?
            .to_vec();
        let modulus = p
            .checked_pow(m)
            .filter(|&q| q < (1u64 << 31))
            .ok_or_else(|| Error::Unsupported(format!("{p}^{m} too large")))?;
        Ok(GaloisRing(Arc::new(Inner { p, m, f, modulus, poly })))
    }

    pub fn field(p: u64, f: usize) -> Result<Self> {
        Self::new(p, 1, f)
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::new(p, 1, 1)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn m(&self) -> u32 {
        self.0.m
    }
    pub fn degree(&self) -> usize {
        self.0.f
    }
    pub fn modulus(&self) -> u64 {
        self.0.modulus
    }
    pub fn is_field(&self) -> bool {
        self.0.m == 1
    }
    /// Size of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.0.p.pow(self.0.f as u32)
    }

    /// Same `(p, f)` with a different precision exponent.
    pub fn with_precision(&self, m: u32) -> Result<Self> {
        Self::new(self.0.p, m, self.0.f)
    }

    pub fn residue_field(&self) -> GaloisRing {
        self.with_precision(1).expect("residue field of a valid ring")
    }

    pub fn check_same(&self, other: &GaloisRing) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!("{self:?} vs {other:?}")))
        }
    }

    pub fn elem(&self, coords: &[i64]) -> Coeff {
        let mut c = [0u64; MAX_DEGREE];
        let q = self.0.modulus as i64;
        for (i, &x) in coords.iter().enumerate() {
            if i < self.0.f {
                c[i] = x.rem_euclid(q) as u64;
            } else {
                // fold higher powers of x through the defining relation
                let mut mono = vec![0i64; i + 1];
                mono[i] = x;
                let red = self.reduce_wide(&mono.iter().map(|v| v.rem_euclid(q) as u64).collect::<Vec<_>>());
                for k in 0..self.0.f {
                    c[k] = (c[k] + red[k]) % self.0.modulus;
                }
            }
        }
        Coeff(c)
    }

    pub fn scalar(&self, n: i64) -> Coeff {
        self.elem(&[n])
    }

    /// The class of `x` in `(Z/p^m)[x]/(P)`; a generator of `F_q^×` when `m = 1`.
    pub fn generator(&self) -> Coeff {
        if self.0.f == 1 {
            // root of the linear Conway polynomial x + c
            self.scalar(-(self.0.poly[0] as i64))
        } else {
            self.elem(&[0, 1])
        }
    }

    /// Every element of the residue field, in a fixed order.
    pub fn enumerate_field(&self) -> Vec<Coeff> {
        let p = self.0.p;
        let f = self.0.f;
        let q = self.residue_size();
        (0..q)
            .map(|mut k| {
                let mut c = [0u64; MAX_DEGREE];
                for slot in c.iter_mut().take(f) {
                    *slot = k % p;
                    k /= p;
                }
                Coeff(c)
            })
            .collect()
    }

    /// Reduce a coordinate vector of arbitrary length modulo the defining
    /// polynomial (coordinates already reduced mod `p^m`).
    pub(crate) fn reduce_wide(&self, wide: &[u64]) -> [u64; MAX_DEGREE] {
        let f = self.0.f;
        let q = self.0.modulus;
        let mut w: Vec<u64> = wide.iter().map(|x| x % q).collect();
        let poly = &self.0.poly;
        for top in (f..w.len()).rev() {
            let c = w[top];
            if c == 0 {
                continue;
            }
            w[top] = 0;
            // x^top = -sum poly[k] x^{top-f+k}
            for k in 0..f {
                let idx = top - f + k;
                w[idx] = (w[idx] + q - (c * poly[k]) % q) % q;
            }
        }
        let mut out = [0u64; MAX_DEGREE];
        for (k, slot) in out.iter_mut().enumerate().take(f.min(w.len())) {
            *slot = w[k];
        }
        out
    }

    #[inline]
    pub fn add_c(&self, a: &Coeff, b: &Coeff) -> Coeff {
        let q = self.0.modulus;
        let mut c = [0u64; MAX_DEGREE];
        for k in 0..self.0.f {
            let s = a.0[k] + b.0[k];
            c[k] = if s >= q { s - q } else { s };
        }
        Coeff(c)
    }

    #[inline]
    pub fn sub_c(&self, a: &Coeff, b: &Coeff) -> Coeff {
        let q = self.0.modulus;
        let mut c = [0u64; MAX_DEGREE];
        for k in 0..self.0.f {
            c[k] = if a.0[k] >= b.0[k] { a.0[k] - b.0[k] } else { a.0[k] + q - b.0[k] };
        }
        Coeff(c)
    }

    #[inline]
    pub fn neg_c(&self, a: &Coeff) -> Coeff {
        self.sub_c(&Coeff::default(), a)
    }

    #[inline]
    pub fn mul_c(&self, a: &Coeff, b: &Coeff) -> Coeff {
        let q = self.0.modulus;
        let f = self.0.f;
        if f == 1 {
            let mut c = [0u64; MAX_DEGREE];
            c[0] = a.0[0] * b.0[0] % q;
            return Coeff(c);
        }
        let mut wide = [0u64; 2 * MAX_DEGREE];
        for i in 0..f {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..f {
                wide[i + j] = (wide[i + j] + a.0[i] * b.0[j]) % q;
            }
        }
        Coeff(self.reduce_wide(&wide[..2 * f - 1]))
    }

    pub fn scale_c(&self, a: &Coeff, n: i64) -> Coeff {
        self.mul_c(a, &self.scalar(n))
    }

    pub fn is_zero_c(&self, a: &Coeff) -> bool {
        a.0.iter().all(|&x| x == 0)
    }

    pub fn one_c(&self) -> Coeff {
        self.scalar(1)
    }

    pub fn pow_c(&self, a: &Coeff, mut e: u64) -> Coeff {
        let mut base = *a;
        let mut acc = self.one_c();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_c(&acc, &base);
            }
            e >>= 1;
            base = self.mul_c(&base, &base);
        }
        acc
    }

    /// A coefficient is a unit iff its reduction mod `p` is nonzero.
    pub fn is_unit(&self, a: &Coeff) -> bool {
        a.0.iter().take(self.0.f).any(|&x| x % self.0.p != 0)
    }

    pub fn inv_c(&self, a: &Coeff) -> Result<Coeff> {
        if !self.is_unit(a) {
            return Err(Error::DivisionByZero);
        }
        let q = self.residue_size();
        // inverse in the residue field, then Newton x <- x(2 - a x)
        let res = self.residue_field();
        let a0 = res.reduce_coords(a);
        let mut x = res.pow_c(&a0, q - 2);
        let mut prec = 1;
        while prec < self.0.m {
            let ax = self.mul_c(a, &x);
            let two_minus = self.sub_c(&self.scalar(2), &ax);
            x = self.mul_c(&x, &two_minus);
            prec *= 2;
        }
        Ok(x)
    }

    pub fn div_c(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        Ok(self.mul_c(a, &self.inv_c(b)?))
    }

    fn reduce_coords(&self, a: &Coeff) -> Coeff {
        let mut c = [0u64; MAX_DEGREE];
        for k in 0..self.0.f {
            c[k] = a.0[k] % self.0.modulus;
        }
        Coeff(c)
    }

    /// The unique `p`-th root in a finite field: `a^{p^{f-1}}`.
    pub fn pth_root(&self, a: &Coeff) -> Result<Coeff> {
        if !self.is_field() {
            return Err(Error::Unsupported("p-th roots are only taken in finite fields".into()));
        }
        Ok(self.pow_c(a, self.0.p.pow(self.0.f as u32 - 1)))
    }

    /// Frobenius `a ↦ a^p`.
    pub fn frobenius(&self, a: &Coeff) -> Coeff {
        self.pow_c(a, self.0.p)
    }

    /// Some `r`-th root of `a` in the residue field, by exhaustive search.
    pub fn field_root(&self, a: &Coeff, r: u64) -> Option<Coeff> {
        debug_assert!(self.is_field());
        self.enumerate_field().into_iter().find(|x| self.pow_c(x, r) == *a)
    }

    /// Coordinate-wise lift into `GR(p^m, f)` (the representatives in `[0, p)`
    /// are kept). A fixed section, not multiplicative.
    pub fn lift(&self, a: &Coeff, target: &GaloisRing) -> Result<Coeff> {
        if target.0.p != self.0.p || target.0.f != self.0.f {
            return Err(Error::RingMismatch(format!("cannot lift {self:?} to {target:?}")));
        }
        Ok(target.reduce_coords(a))
    }

    /// Reduction to the residue field.
    pub fn reduce(&self, a: &Coeff) -> Coeff {
        let mut c = [0u64; MAX_DEGREE];
        for k in 0..self.0.f {
            c[k] = a.0[k] % self.0.p;
        }
        Coeff(c)
    }

    /// Reduction to a smaller precision `GR(p^k, f)`, `k ≤ m`.
    pub fn reduce_to(&self, a: &Coeff, target: &GaloisRing) -> Coeff {
        target.reduce_coords(a)
    }

    /// `a / p^k` when every coordinate is divisible by `p^k`; the result is
    /// the representative in `[0, p^{m-k})`.
    pub fn div_p_pow(&self, a: &Coeff, k: u32) -> Option<Coeff> {
        let d = self.0.p.pow(k);
        let mut c = [0u64; MAX_DEGREE];
        for i in 0..self.0.f {
            if a.0[i] % d != 0 {
                return None;
            }
            c[i] = a.0[i] / d;
        }
        Some(Coeff(c))
    }

    pub fn from_bigint_c(&self, n: &BigInt) -> Coeff {
        let q = BigInt::from(self.0.modulus);
        let r = n.mod_floor(&q).to_i64().expect("reduced below modulus");
        self.scalar(r)
    }

    /// Integer lift of a prime-field element, for display.
    pub fn as_int(&self, a: &Coeff) -> u64 {
        a.0[0]
    }

    pub fn to_coords(&self, a: &Coeff) -> Vec<u64> {
        a.0[..self.0.f].to_vec()
    }
}

impl Ring for GaloisRing {
    type Elem = Coeff;

    fn zero(&self) -> Coeff {
        Coeff::default()
    }
    fn one(&self) -> Coeff {
        self.one_c()
    }
    fn from_int(&self, n: &BigInt) -> Coeff {
        if n.is_zero() {
            return Coeff::default();
        }
        self.from_bigint_c(n)
    }
    fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.add_c(a, b)
    }
    fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.sub_c(a, b)
    }
    fn neg(&self, a: &Coeff) -> Coeff {
        self.neg_c(a)
    }
    fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.mul_c(a, b)
    }
    fn is_zero(&self, a: &Coeff) -> bool {
        self.is_zero_c(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characteristic_two() {
        let f2 = GaloisRing::prime_field(2).unwrap();
        let one = f2.one_c();
        assert!(f2.is_zero_c(&f2.add_c(&one, &one)));
    }

    #[test]
    fn f4_generator_squares_to_x_plus_one() {
        let f4 = GaloisRing::field(2, 2).unwrap();
        let x = f4.generator();
        assert_eq!(f4.mul_c(&x, &x), f4.elem(&[1, 1]));
    }

    #[test]
    fn f3_inverse_of_two() {
        let f3 = GaloisRing::prime_field(3).unwrap();
        assert_eq!(f3.inv_c(&f3.scalar(2)).unwrap(), f3.scalar(2));
        assert_eq!(f3.inv_c(&f3.scalar(0)), Err(Error::DivisionByZero));
    }

    #[test]
    fn pth_roots() {
        let f2 = GaloisRing::prime_field(2).unwrap();
        assert_eq!(f2.pth_root(&f2.one_c()).unwrap(), f2.one_c());
        let f7 = GaloisRing::prime_field(7).unwrap();
        for a in f7.enumerate_field() {
            assert_eq!(f7.pth_root(&a).unwrap(), a);
        }
        // F_9: the cube root of the generator, found by exhaustive search,
        // is g^3
        let f9 = GaloisRing::field(3, 2).unwrap();
        let g = f9.generator();
        let found: Vec<_> =
            f9.enumerate_field().into_iter().filter(|x| f9.pow_c(x, 3) == g).collect();
        assert_eq!(found, vec![f9.pow_c(&g, 3)]);
        assert_eq!(f9.pth_root(&g).unwrap(), f9.pow_c(&g, 3));
    }

    #[test]
    fn conway_polynomials_are_primitive() {
        for &(p, c) in CONWAY {
            let f = c.len() - 1;
            let k = GaloisRing::field(p, f).unwrap();
            let q = k.residue_size();
            let g = k.generator();
            let mut x = g;
            let mut order = 1;
            while x != k.one_c() {
                x = k.mul_c(&x, &g);
                order += 1;
                assert!(order <= q, "p={p} f={f}");
            }
            assert_eq!(order, q - 1, "p={p} f={f}");
        }
    }

    #[test]
    fn lift_and_reduce() {
        let f2 = GaloisRing::prime_field(2).unwrap();
        let z8 = GaloisRing::new(2, 3, 1).unwrap();
        let one = f2.lift(&f2.one_c(), &z8).unwrap();
        assert_eq!(one, z8.scalar(1));
        assert_eq!(z8.reduce(&one), f2.one_c());
        let f3 = GaloisRing::prime_field(3).unwrap();
        let z9 = GaloisRing::new(3, 2, 1).unwrap();
        assert_eq!(f3.lift(&f3.scalar(2), &z9).unwrap(), z9.scalar(2));
        assert!(z9.is_zero_c(&z9.reduce(&z9.scalar(3))));
    }

    #[test]
    fn galois_ring_inverse() {
        let r = GaloisRing::new(3, 4, 2).unwrap();
        for a in r.residue_field().enumerate_field().into_iter().skip(1) {
            let b = r.add_c(&a, &r.scalar(3));
            let inv = r.inv_c(&b).unwrap();
            assert_eq!(r.mul_c(&b, &inv), r.one_c());
        }
        assert!(r.inv_c(&r.scalar(9)).is_err());
    }
}
