//! The minimal commutative-ring interface shared by coefficient rings,
//! truncated Laurent series and multivariate polynomials.
//!
//! Rings are context objects: an element on its own does not know its ring,
//! every operation goes through the descriptor. This is what lets Witt
//! vectors be evaluated over any of them with the same code.

use num_bigint::BigInt;
use std::fmt::Debug;

pub trait Ring: Clone + Debug {
    type Elem: Clone + Debug + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_int(&self, n: &BigInt) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    fn from_i64(&self, n: i64) -> Self::Elem {
        self.from_int(&BigInt::from(n))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Frobenius-style endomorphism used by `F` on Witt vectors. Defaults to
    /// `x ↦ x^p`; rings where that is not the right lift override it.
    fn pth_power(&self, a: &Self::Elem, p: u64) -> Self::Elem {
        self.pow(a, p)
    }
}
