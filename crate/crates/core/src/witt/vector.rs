use super::table::WittTable;
use crate::error::{Error, Result};
use crate::poly::eval_many;
use crate::ring::Ring;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq)]
pub struct WittVector<E> {
    pub comps: Vec<E>,
}

impl<E> WittVector<E> {
    pub fn new(comps: Vec<E>) -> Self {
        WittVector { comps }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
}

/// Witt-vector arithmetic over a coefficient ring, evaluated through the
/// universal tables. Vectors may be shorter than the table.
#[derive(Clone, Debug)]
pub struct Witt<R: Ring> {
    ring: R,
    table: Arc<WittTable>,
}

impl<R: Ring> Witt<R> {
    pub fn new(ring: R, table: Arc<WittTable>) -> Self {
        Witt { ring, table }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn table(&self) -> &WittTable {
        &self.table
    }

    pub fn p(&self) -> u64 {
        self.table.p()
    }

    pub fn zero(&self, len: usize) -> WittVector<R::Elem> {
        WittVector::new(vec![self.ring.zero(); len])
    }

    /// `(x, 0, …, 0)`.
    pub fn teichmuller(&self, x: R::Elem, len: usize) -> WittVector<R::Elem> {
        let mut v = self.zero(len);
        v.comps[0] = x;
        v
    }

    fn check_len(&self, a: &WittVector<R::Elem>, b: Option<&WittVector<R::Elem>>) -> Result<usize> {
        let len = a.len();
        if len > self.table.len() {
            return Err(Error::RingMismatch(format!(
                "vector of length {len} exceeds table length {}",
                self.table.len()
            )));
        }
        if let Some(b) = b {
            if b.len() != len {
                return Err(Error::RingMismatch(format!("lengths {len} and {}", b.len())));
            }
        }
        Ok(len)
    }

    fn padded(&self, v: &WittVector<R::Elem>) -> Vec<R::Elem> {
        let mut out = v.comps.clone();
        out.resize(self.table.len(), self.ring.zero());
        out
    }

    fn binary(&self, polys: &[crate::poly::Poly], a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        let len = self.check_len(a, Some(b))?;
        let mut args = self.padded(a);
        args.extend(self.padded(b));
        Ok(WittVector::new(eval_many(&self.ring, &polys[..len], &args)))
    }

    pub fn add(&self, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.binary(self.table.sums(), a, b)
    }

    pub fn mul(&self, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.binary(self.table.products(), a, b)
    }

    pub fn neg(&self, a: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        let len = self.check_len(a, None)?;
        Ok(WittVector::new(eval_many(&self.ring, &self.table.negs()[..len], &self.padded(a))))
    }

    pub fn sub(&self, a: &WittVector<R::Elem>, b: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.add(a, &self.neg(b)?)
    }

    /// Ghost components `Φ_0(a), …, Φ_{len-1}(a)`.
    pub fn ghost(&self, a: &WittVector<R::Elem>) -> Result<Vec<R::Elem>> {
        let len = self.check_len(a, None)?;
        Ok(eval_many(&self.ring, &self.table.ghosts()[..len], &self.padded(a)))
    }

    /// Entry-wise `p`-th power (the ring's Frobenius hook).
    pub fn frobenius(&self, a: &WittVector<R::Elem>) -> WittVector<R::Elem> {
        let p = self.p();
        WittVector::new(a.comps.iter().map(|x| self.ring.pth_power(x, p)).collect())
    }

    /// Shift right by one, keeping the length.
    pub fn verschiebung(&self, a: &WittVector<R::Elem>) -> WittVector<R::Elem> {
        let mut comps = vec![self.ring.zero()];
        comps.extend(a.comps.iter().take(a.len().saturating_sub(1)).cloned());
        WittVector::new(comps)
    }

    /// The Artin–Schreier–Witt map `F(a) − a`.
    pub fn asw(&self, a: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.add(&self.frobenius(a), &self.neg(a)?)
    }

    /// `k·a` by double-and-add.
    pub fn mul_int(&self, a: &WittVector<R::Elem>, k: u64) -> Result<WittVector<R::Elem>> {
        let mut acc = self.zero(a.len());
        let mut base = a.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.add(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// The image of the integer `k` under `Z → W(R)`, i.e. `k·(1, 0, …, 0)`.
    pub fn integer(&self, k: u64, len: usize) -> Result<WittVector<R::Elem>> {
        self.mul_int(&self.teichmuller(self.ring.one(), len), k)
    }
}
