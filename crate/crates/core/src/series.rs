//! Truncated Laurent series over a [`GaloisRing`].
//!
//! A series knows its coefficients for exponents in `[start, prec)`; stored
//! coefficients start at the (certified nonzero) leading term and anything
//! between the last stored coefficient and `prec` is known to be zero. A
//! precision of [`EXACT`] marks a series that is known completely (a Laurent
//! polynomial). "Exactly zero" and "zero within the window" are therefore
//! different states: the former has no terms and infinite precision, the
//! latter has no terms and a finite precision `N`, meaning only
//! `valuation ≥ N` is known.
//!
//! Arithmetic never invents coefficients: every result carries the precision
//! that can be justified from its inputs.

use crate::coeff::{Coeff, GaloisRing};
use crate::error::{Error, Result};
use crate::ring::Ring;
use num_bigint::BigInt;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Precision sentinel for series known exactly.
pub const EXACT: i64 = i64::MAX / 4;

fn padd(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        a + b
    }
}

fn pmul(a: i64, k: i64) -> i64 {
    if a >= EXACT {
        EXACT
    } else {
        a * k
    }
}

#[derive(Clone, PartialEq)]
pub struct Series {
    ring: GaloisRing,
    start: i64,
    coeffs: Vec<Coeff>,
    prec: i64,
}

impl Series {
    fn raw(ring: GaloisRing, start: i64, coeffs: Vec<Coeff>, prec: i64) -> Self {
        Series { ring, start, coeffs, prec }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.prec < EXACT {
            let keep = (self.prec - self.start).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| !self.ring.is_zero_c(c));
        match lead {
            None => {
                self.coeffs.clear();
                self.start = 0;
            }
            Some(k) => {
                if k > 0 {
                    self.coeffs.drain(..k);
                    self.start += k as i64;
                }
                while self.coeffs.last().map_or(false, |c| self.ring.is_zero_c(c)) {
                    self.coeffs.pop();
                }
            }
        }
        self
    }

    pub fn zero(ring: &GaloisRing) -> Self {
        Series { ring: ring.clone(), start: 0, coeffs: vec![], prec: EXACT }
    }

    /// `O(t^prec)`: nothing known except that the valuation is at least `prec`.
    pub fn zero_window(ring: &GaloisRing, prec: i64) -> Self {
        Series { ring: ring.clone(), start: 0, coeffs: vec![], prec }
    }

    pub fn one(ring: &GaloisRing) -> Self {
        Self::monomial(ring, ring.one_c(), 0)
    }

    pub fn constant(ring: &GaloisRing, c: Coeff) -> Self {
        Self::monomial(ring, c, 0)
    }

    pub fn monomial(ring: &GaloisRing, c: Coeff, exp: i64) -> Self {
        Self::raw(ring.clone(), exp, vec![c], EXACT)
    }

    /// The variable `t`.
    pub fn var(ring: &GaloisRing) -> Self {
        Self::monomial(ring, ring.one_c(), 1)
    }

    /// Build from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms(ring: &GaloisRing, terms: &[(i64, Coeff)], prec: i64) -> Self {
        if terms.is_empty() {
            return Self::zero_window(ring, prec);
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Coeff::default(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = ring.add_c(slot, c);
        }
        Self::raw(ring.clone(), lo, coeffs, prec)
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_ints(ring: &GaloisRing, terms: &[(i64, i64)], prec: i64) -> Self {
        let t: Vec<_> = terms.iter().map(|&(e, c)| (e, ring.scalar(c))).collect();
        Self::from_terms(ring, &t, prec)
    }

    /// Dense coefficients starting at exponent `start`.
    pub fn from_dense(ring: &GaloisRing, start: i64, coeffs: Vec<Coeff>, prec: i64) -> Self {
        Self::raw(ring.clone(), start, coeffs, prec)
    }

    pub fn ring(&self) -> &GaloisRing {
        &self.ring
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.is_exact()
    }

    /// No nonzero coefficient is known (exact zero or zero within the window).
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Valuation of the leading known term; `None` if no nonzero term is known.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start)
        }
    }

    pub fn certified_valuation(&self) -> Result<i64> {
        match self.valuation() {
            Some(v) => Ok(v),
            None if self.is_exact() => Err(Error::DivisionByZero),
            None => Err(Error::precision(format!(
                "series vanishes within its window O(t^{})",
                self.prec
            ))),
        }
    }

    /// Number of known coefficients past the leading one.
    pub fn relative_precision(&self) -> Option<i64> {
        self.valuation().map(|v| if self.is_exact() { EXACT } else { self.prec - v })
    }

    pub fn leading(&self) -> Option<Coeff> {
        self.coeffs.first().copied()
    }

    /// Coefficient of `t^k`; errors if `k` is outside the known window.
    pub fn coeff(&self, k: i64) -> Result<Coeff> {
        if k >= self.prec {
            return Err(Error::precision(format!("coefficient of t^{k} beyond O(t^{})", self.prec)));
        }
        Ok(self.coeff_unchecked(k))
    }

    pub(crate) fn coeff_unchecked(&self, k: i64) -> Coeff {
        if k < self.start || k >= self.start + self.coeffs.len() as i64 {
            Coeff::default()
        } else {
            self.coeffs[(k - self.start) as usize]
        }
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Coeff)> + '_ {
        let ring = &self.ring;
        self.coeffs
            .iter()
            .enumerate()
            .filter(move |(_, c)| !ring.is_zero_c(c))
            .map(move |(i, c)| (self.start + i as i64, *c))
    }

    /// Highest exponent with a stored nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.start + self.coeffs.len() as i64 - 1)
        }
    }

    /// Forget everything at exponents `≥ prec`.
    pub fn truncate(&self, prec: i64) -> Series {
        if prec >= self.prec {
            return self.clone();
        }
        Self::raw(self.ring.clone(), self.start, self.coeffs.clone(), prec)
    }

    /// Keep at most `rel` coefficients past the leading term.
    pub fn truncate_rel(&self, rel: i64) -> Series {
        match self.valuation() {
            Some(v) => self.truncate(padd(v, rel)),
            None => self.clone(),
        }
    }

    /// Declare more precision than the arithmetic can justify. Only for
    /// iterations (Newton) whose convergence guarantees the claim.
    pub(crate) fn assume_precision(&self, prec: i64) -> Series {
        Self::raw(self.ring.clone(), self.start, self.coeffs.clone(), prec)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Series {
        Series {
            ring: self.ring.clone(),
            start: if self.coeffs.is_empty() { 0 } else { self.start + k },
            coeffs: self.coeffs.clone(),
            prec: padd(self.prec, k),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Series {
        let coeffs = self.coeffs.iter().map(|x| self.ring.mul_c(x, c)).collect();
        Self::raw(self.ring.clone(), self.start, coeffs, self.prec)
    }

    pub fn scale_int(&self, n: i64) -> Series {
        self.scale(&self.ring.scalar(n))
    }

    fn check_ring(&self, other: &Series) {
        assert!(self.ring == other.ring, "series over {:?} and {:?}", self.ring, other.ring);
    }

    fn combine(&self, other: &Series, negate_other: bool) -> Series {
        self.check_ring(other);
        let prec = self.prec.min(other.prec);
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            return Self::zero_window(&self.ring, prec);
        }
        let lo = match (self.valuation(), other.valuation()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => unreachable!(),
        };
        let hi = self.degree().into_iter().chain(other.degree()).max().unwrap();
        let hi = hi.min(prec - 1);
        if hi < lo {
            return Self::zero_window(&self.ring, prec);
        }
        let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
        for k in lo..=hi {
            let a = self.coeff_unchecked(k);
            let b = other.coeff_unchecked(k);
            coeffs.push(if negate_other { self.ring.sub_c(&a, &b) } else { self.ring.add_c(&a, &b) });
        }
        Self::raw(self.ring.clone(), lo, coeffs, prec)
    }

    pub fn add(&self, other: &Series) -> Series {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.combine(other, true)
    }

    pub fn neg(&self) -> Series {
        let coeffs = self.coeffs.iter().map(|c| self.ring.neg_c(c)).collect();
        Series { ring: self.ring.clone(), start: self.start, coeffs, prec: self.prec }
    }

    pub fn mul(&self, other: &Series) -> Series {
        self.check_ring(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero(&self.ring);
        }
        let va = self.valuation().unwrap_or(self.prec);
        let vb = other.valuation().unwrap_or(other.prec);
        let prec = padd(self.prec, vb).min(padd(other.prec, va));
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero_window(&self.ring, prec);
        }
        let start = va + vb;
        let full = self.coeffs.len() + other.coeffs.len() - 1;
        let out_len = if prec >= EXACT { full } else { full.min((prec - start).max(0) as usize) };
        let coeffs = convolve(&self.ring, &self.coeffs, &other.coeffs, out_len);
        Self::raw(self.ring.clone(), start, coeffs, prec)
    }

    pub fn square(&self) -> Series {
        self.mul(self)
    }

    /// Multiplicative inverse. The leading coefficient must be a unit and a
    /// finite window is required unless the series is a single monomial.
    pub fn inv(&self) -> Result<Series> {
        let v = self.certified_valuation()?;
        let lead = self.coeffs[0];
        let lead_inv = self.ring.inv_c(&lead).map_err(|_| Error::DivisionByZero)?;
        if self.coeffs.len() == 1 && self.is_exact() {
            return Ok(Self::monomial(&self.ring, lead_inv, -v));
        }
        if self.is_exact() {
            return Err(Error::precision("inverse of an exact non-monomial series needs a window"));
        }
        let rel = self.prec - v;
        let unit = self.shift(-v);
        let mut x = Self::constant(&self.ring, lead_inv).truncate(1);
        let mut p = 1;
        let one = Self::one(&self.ring);
        while p < rel {
            p = (2 * p).min(rel);
            let ux = unit.truncate(p).mul(&x.assume_precision(p));
            let corr = x.assume_precision(p).mul(&one.sub(&ux));
            x = x.assume_precision(p).add(&corr).truncate(p);
        }
        Ok(x.shift(-v))
    }

    pub fn div(&self, other: &Series) -> Result<Series> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, k: i64) -> Result<Series> {
        if k < 0 {
            return self.inv()?.pow(-k);
        }
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        Ok(acc)
    }

    /// `f^p` over a finite field: `Σ a_k^p t^{pk}` with precision `p·N`.
    pub fn frobenius(&self) -> Series {
        assert!(self.ring.is_field(), "Frobenius on series needs a field of coefficients");
        let p = self.ring.p() as i64;
        let terms: Vec<_> = self.terms().map(|(k, c)| (k * p, self.ring.frobenius(&c))).collect();
        let prec = pmul(self.prec, p);
        if terms.is_empty() {
            return if self.is_exact() { Self::zero(&self.ring) } else { Self::zero_window(&self.ring, prec) };
        }
        Self::from_terms(&self.ring, &terms, prec)
    }

    pub fn derivative(&self) -> Series {
        let coeffs: Vec<_> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| self.ring.scale_c(c, self.start + i as i64))
            .collect();
        let prec = if self.is_exact() { EXACT } else { self.prec - 1 };
        if coeffs.is_empty() {
            return if self.is_exact() { Self::zero(&self.ring) } else { Self::zero_window(&self.ring, prec) };
        }
        Self::raw(self.ring.clone(), self.start - 1, coeffs, prec)
    }

    /// Coefficient of `t^{-1}`.
    pub fn residue(&self) -> Result<Coeff> {
        self.coeff(-1)
    }

    /// Substitute `g` for the variable: `f(g)`.
    pub fn compose(&self, g: &Series) -> Result<Series> {
        self.check_ring(g);
        if self.is_exact_zero() {
            return Ok(Self::zero(&self.ring));
        }
        let vg = match g.valuation() {
            Some(v) => v,
            None => {
                return Err(Error::InvalidComposition("inner series has no certified leading term".into()))
            }
        };
        // substitution of an exact monomial c·t^k
        if g.is_exact() && g.coeffs.len() == 1 && vg >= 1 {
            let c = g.coeffs[0];
            let cinv = self.ring.inv_c(&c).ok();
            let mut terms = Vec::new();
            for (k, a) in self.terms() {
                let ck = if k >= 0 {
                    self.ring.pow_c(&c, k as u64)
                } else {
                    self.ring.pow_c(&cinv.ok_or(Error::DivisionByZero)?, (-k) as u64)
                };
                terms.push((k * vg, self.ring.mul_c(&a, &ck)));
            }
            let prec = pmul(self.prec, vg);
            return Ok(Self::from_terms(&self.ring, &terms, prec));
        }
        let vf = self.valuation();
        if vg <= 0 {
            let polynomial = self.is_exact() && vf.map_or(true, |v| v >= 0);
            if vg < 0 || !polynomial {
                return Err(Error::InvalidComposition(format!(
                    "inner valuation {vg} needs an exact polynomial outer series"
                )));
            }
            return Ok(self.horner_exact(g));
        }
        if self.is_exact() && g.is_exact() {
            if vf.map_or(true, |v| v >= 0) {
                return Ok(self.horner_exact(g));
            }
            return Err(Error::precision("exact composition with a pole has no finite expansion"));
        }
        let rel_g = g.relative_precision().unwrap();
        let vf0 = vf.unwrap_or(self.prec);
        let bound = padd(pmul(self.prec, vg), 0).min(padd(vg * vf0, rel_g));
        let rel = bound - vg * vf0;
        Composer::new(g, rel)?.apply(self)
    }

    fn horner_exact(&self, g: &Series) -> Series {
        let mut acc = Self::zero(&self.ring);
        let Some(deg) = self.degree() else { return acc };
        for k in (0..=deg).rev() {
            acc = acc.mul(g).add(&Self::constant(&self.ring, self.coeff_unchecked(k)));
        }
        acc
    }

    /// An `r`-th root for `r` prime to `p`, by Hensel iteration from a root of
    /// the leading coefficient.
    pub fn nth_root(&self, r: u64) -> Result<Series> {
        let p = self.ring.p();
        if r == 0 || r % p == 0 {
            return Err(Error::NoRoot(format!("root index {r} is not prime to p = {p}")));
        }
        let v = self.certified_valuation()?;
        if v.rem_euclid(r as i64) != 0 {
            return Err(Error::NoRoot(format!("{r} does not divide the valuation {v}")));
        }
        let lead = self.coeffs[0];
        let res = self.ring.residue_field();
        let root0 = res
            .field_root(&self.ring.reduce(&lead), r)
            .ok_or_else(|| Error::NoRoot(format!("leading coefficient {lead:?} has no {r}-th root")))?;
        // Hensel lift of the coefficient root
        let mut c = res.lift(&root0, &self.ring)?;
        for _ in 0..6 {
            let num = self.ring.sub_c(&self.ring.pow_c(&c, r), &lead);
            let den = self.ring.scale_c(&self.ring.pow_c(&c, r - 1), r as i64);
            c = self.ring.sub_c(&c, &self.ring.div_c(&num, &den)?);
        }
        if self.coeffs.len() == 1 && self.is_exact() {
            return Ok(Self::monomial(&self.ring, c, v / r as i64));
        }
        if self.is_exact() {
            return Err(Error::precision("root of an exact non-monomial series needs a window"));
        }
        let rel = self.prec - v;
        let unit = self.shift(-v);
        let mut x = Self::constant(&self.ring, c).truncate(1);
        let mut prec = 1;
        while prec < rel {
            prec = (2 * prec).min(rel);
            let xp = x.assume_precision(prec);
            let num = xp.pow(r as i64)?.sub(&unit.truncate(prec));
            let den = xp.pow(r as i64 - 1)?.scale_int(r as i64);
            x = xp.sub(&num.div(&den)?).truncate(prec);
        }
        Ok(x.shift(v / r as i64))
    }

    /// Split `f = g^p + h` with `g^p` collecting every term whose exponent is
    /// divisible by `p`; every exponent of `h` is prime to `p`.
    pub fn pth_power_decompose(&self) -> Result<(Series, Series)> {
        if !self.ring.is_field() {
            return Err(Error::Unsupported("p-th power decomposition needs field coefficients".into()));
        }
        if self.is_zero() && !self.is_exact() {
            return Err(Error::precision("cannot decompose a series that vanishes within its window"));
        }
        let p = self.ring.p() as i64;
        let mut g_terms = Vec::new();
        let mut h_terms = Vec::new();
        for (k, c) in self.terms() {
            if k.rem_euclid(p) == 0 {
                g_terms.push((k / p, self.ring.pth_root(&c)?));
            } else {
                h_terms.push((k, c));
            }
        }
        let gprec = if self.is_exact() { EXACT } else { self.prec.div_euclid(p) + (self.prec.rem_euclid(p) != 0) as i64 };
        let g = if g_terms.is_empty() {
            if self.is_exact() { Self::zero(&self.ring) } else { Self::zero_window(&self.ring, gprec) }
        } else {
            Self::from_terms(&self.ring, &g_terms, gprec)
        };
        let h = if h_terms.is_empty() {
            if self.is_exact() { Self::zero(&self.ring) } else { Self::zero_window(&self.ring, self.prec) }
        } else {
            Self::from_terms(&self.ring, &h_terms, self.prec)
        };
        Ok((g, h))
    }

    /// Coefficient-wise image in another ring with the same `(p, f)`:
    /// lifting (fixed section) or reduction.
    pub fn change_ring(&self, target: &GaloisRing) -> Result<Series> {
        if target.p() != self.ring.p() || target.degree() != self.ring.degree() {
            return Err(Error::RingMismatch(format!("{:?} -> {:?}", self.ring, target)));
        }
        let coeffs = self.coeffs.iter().map(|c| self.ring.reduce_to(c, target)).collect();
        Ok(Self::raw(target.clone(), self.start, coeffs, self.prec))
    }

    pub fn map_coeffs(&self, f: impl FnMut(&Coeff) -> Coeff) -> Series {
        let coeffs = self.coeffs.iter().map(f).collect();
        Self::raw(self.ring.clone(), self.start, coeffs, self.prec)
    }

    /// Equality of all coefficients both series know.
    pub fn agrees_with(&self, other: &Series) -> bool {
        self.sub(other).is_zero()
    }
}

/// Dense truncated product of two coefficient arrays.
fn convolve(ring: &GaloisRing, a: &[Coeff], b: &[Coeff], out_len: usize) -> Vec<Coeff> {
    let q = ring.modulus();
    if out_len == 0 {
        return vec![];
    }
    if ring.degree() == 1 {
        let av: Vec<u64> = a.iter().take(out_len).map(|c| c.0[0]).collect();
        let bv: Vec<u64> = b.iter().take(out_len).map(|c| c.0[0]).collect();
        let acc = convolve_u64(&av, &bv, out_len, q);
        return acc
            .into_iter()
            .map(|x| {
                let mut c = Coeff::default();
                c.0[0] = x;
                c
            })
            .collect();
    }
    let f = ring.degree();
    // coordinate-wise convolution into 2f-1 unreduced slots
    let wide = 2 * f - 1;
    let mut acc: Vec<Vec<u64>> = vec![vec![0; out_len]; wide];
    for u in 0..f {
        let av: Vec<u64> = a.iter().take(out_len).map(|c| c.0[u]).collect();
        if av.iter().all(|&x| x == 0) {
            continue;
        }
        for v in 0..f {
            let bv: Vec<u64> = b.iter().take(out_len).map(|c| c.0[v]).collect();
            if bv.iter().all(|&x| x == 0) {
                continue;
            }
            let part = convolve_u64(&av, &bv, out_len, q);
            for (slot, x) in acc[u + v].iter_mut().zip(part) {
                *slot = (*slot + x) % q;
            }
        }
    }
    (0..out_len)
        .map(|k| {
            let w: Vec<u64> = (0..wide).map(|j| acc[j][k]).collect();
            Coeff(ring.reduce_wide(&w))
        })
        .collect()
}

const KARATSUBA_CUTOFF: usize = 48;

fn convolve_u64(a: &[u64], b: &[u64], out_len: usize, q: u64) -> Vec<u64> {
    let a = &a[..a.len().min(out_len)];
    let b = &b[..b.len().min(out_len)];
    if a.is_empty() || b.is_empty() {
        return vec![0; out_len];
    }
    let mut out = if a.len().min(b.len()) >= KARATSUBA_CUTOFF {
        let n = a.len().max(b.len());
        let mut ap = a.to_vec();
        ap.resize(n, 0);
        let mut bp = b.to_vec();
        bp.resize(n, 0);
        karatsuba(&ap, &bp, q)
    } else {
        schoolbook(a, b, q)
    };
    out.resize(out_len, 0);
    out.truncate(out_len);
    out
}

fn schoolbook(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut acc = vec![0u64; a.len() + b.len() - 1];
    let sq = (q - 1).max(1) * (q - 1).max(1);
    let batch = ((u64::MAX - q) / sq).max(1) as usize;
    let mut count = 0usize;
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (slot, &y) in acc[i..i + b.len()].iter_mut().zip(b) {
            *slot += x * y;
        }
        count += 1;
        if count >= batch {
            acc.iter_mut().for_each(|v| *v %= q);
            count = 0;
        }
    }
    acc.iter_mut().for_each(|v| *v %= q);
    acc
}

/// Karatsuba on equal-length inputs; result has length `2n - 1`.
fn karatsuba(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let n = a.len();
    if n < KARATSUBA_CUTOFF {
        return schoolbook(a, b, q);
    }
    let h = n / 2;
    let (a0, a1) = a.split_at(h);
    let (b0, b1) = b.split_at(h);
    let z0 = karatsuba(a0, b0, q);
    let mut a1p = a1.to_vec();
    let mut b1p = b1.to_vec();
    // a1, b1 have length n - h >= h
    let z2 = karatsuba(&a1p, &b1p, q);
    for i in 0..h {
        a1p[i] = (a1p[i] + a0[i]) % q;
        b1p[i] = (b1p[i] + b0[i]) % q;
    }
    let z1 = karatsuba(&a1p, &b1p, q);
    let mut out = vec![0u64; 2 * n - 1];
    for (i, &x) in z0.iter().enumerate() {
        out[i] = (out[i] + x) % q;
    }
    for (i, &x) in z2.iter().enumerate() {
        out[i + 2 * h] = (out[i + 2 * h] + x) % q;
    }
    for i in 0..z1.len() {
        let mid = (z1[i] + 2 * q - z0.get(i).copied().unwrap_or(0) - z2.get(i).copied().unwrap_or(0)) % q;
        out[i + h] = (out[i + h] + mid) % q;
    }
    out
}

/// Reusable substitution `f ↦ f(g)` for a fixed inner series `g` with
/// positive valuation: powers of `g` are computed once (baby-step /
/// giant-step) and shared by every outer series.
#[derive(Clone, Debug)]
pub struct Composer {
    g: Series,
    vg: i64,
    rel_g: i64,
    rel_target: i64,
    block: usize,
    baby: Vec<Series>,
    giant: Series,
    ginv: Option<Series>,
}

impl Composer {
    /// `rel_target` caps the relative precision of every result.
    pub fn new(g: &Series, rel_target: i64) -> Result<Self> {
        let vg = g.certified_valuation()?;
        if vg < 1 {
            return Err(Error::InvalidComposition(format!("inner valuation {vg} < 1")));
        }
        let rel_g = g.relative_precision().unwrap();
        let rel_target = rel_target.min(rel_g).max(0);
        if rel_target >= EXACT {
            return Err(Error::precision("composition needs a finite target window"));
        }
        let terms = (rel_target + vg - 1) / vg;
        let block = ((terms as f64).sqrt().ceil() as usize).max(1);
        let one = Series::one(&g.ring).truncate(rel_target);
        let mut baby = vec![one];
        let gt = g.truncate(rel_target);
        for i in 1..block {
            let next = baby[i - 1].mul(&gt).truncate(rel_target);
            baby.push(next);
        }
        let giant = baby[block - 1].mul(&gt).truncate(rel_target);
        Ok(Composer { g: g.clone(), vg, rel_g, rel_target, block, baby, giant, ginv: None })
    }

    pub fn inner(&self) -> &Series {
        &self.g
    }

    pub fn apply(&self, f: &Series) -> Result<Series> {
        let ring = &self.g.ring;
        if f.is_exact_zero() {
            return Ok(Series::zero(ring));
        }
        let Some(vf) = f.valuation() else {
            return Ok(Series::zero_window(ring, pmul(f.prec, self.vg)));
        };
        let cap_tail = pmul(f.prec, self.vg);
        let rel = self.rel_target.min(self.rel_g);
        let bound = cap_tail.min(self.vg * vf + rel);
        let need = bound - self.vg * vf;
        if need <= 0 {
            return Ok(Series::zero_window(ring, bound));
        }
        // F = f / t^vf, a power series with nonzero constant term
        let nterms = ((need + self.vg - 1) / self.vg) as usize;
        let fco: Vec<Coeff> = (0..nterms).map(|k| f.coeff_unchecked(vf + k as i64)).collect();
        let nblocks = (nterms + self.block - 1) / self.block;
        let mut acc = Series::zero(ring);
        for j in (0..nblocks).rev() {
            let mut blk = Series::zero(ring);
            for l in 0..self.block {
                let k = j * self.block + l;
                if k >= nterms {
                    break;
                }
                if ring.is_zero_c(&fco[k]) {
                    continue;
                }
                blk = blk.add(&self.baby[l].scale(&fco[k]));
            }
            acc = acc.mul(&self.giant).add(&blk).truncate(need);
        }
        let acc = acc.truncate(need);
        let gpow = self.power(vf)?;
        Ok(gpow.mul(&acc).truncate(bound))
    }

    fn power(&self, k: i64) -> Result<Series> {
        let rel = self.rel_target.min(self.rel_g);
        if k >= 0 {
            return Ok(self.g.truncate_rel(rel).pow(k)?.truncate_rel(rel));
        }
        let inv = match &self.ginv {
            Some(i) => i.clone(),
            None => self.g.truncate_rel(rel).inv()?,
        };
        Ok(inv.pow(-k)?.truncate_rel(rel))
    }

    /// Cache the inverse of the inner series (used for poles).
    pub fn with_inverse(mut self) -> Result<Self> {
        let rel = self.rel_target.min(self.rel_g);
        self.ginv = Some(self.g.truncate_rel(rel).inv()?);
        Ok(self)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c:?}")?,
                1 => write!(f, "{c:?}*t")?,
                _ => write!(f, "{c:?}*t^{k}")?,
            }
        }
        if !self.is_exact() {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(t^{})", self.prec)?;
        } else if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series::add(self, rhs)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series::sub(self, rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(self)
    }
}

/// Laurent series over a fixed coefficient ring, as a [`Ring`] context.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRing {
    pub coeff: GaloisRing,
}

impl SeriesRing {
    pub fn new(coeff: &GaloisRing) -> Self {
        SeriesRing { coeff: coeff.clone() }
    }
}

impl Ring for SeriesRing {
    type Elem = Series;

    fn zero(&self) -> Series {
        Series::zero(&self.coeff)
    }
    fn one(&self) -> Series {
        Series::one(&self.coeff)
    }
    fn from_int(&self, n: &BigInt) -> Series {
        Series::constant(&self.coeff, self.coeff.from_int(n))
    }
    fn add(&self, a: &Series, b: &Series) -> Series {
        a.add(b)
    }
    fn sub(&self, a: &Series, b: &Series) -> Series {
        a.sub(b)
    }
    fn neg(&self, a: &Series) -> Series {
        a.neg()
    }
    fn mul(&self, a: &Series, b: &Series) -> Series {
        a.mul(b)
    }
    fn is_zero(&self, a: &Series) -> bool {
        a.is_exact_zero()
    }
    fn pth_power(&self, a: &Series, p: u64) -> Series {
        if self.coeff.is_field() && self.coeff.p() == p {
            a.frobenius()
        } else {
            self.pow(a, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> GaloisRing {
        GaloisRing::prime_field(p).unwrap()
    }

    #[test]
    fn laurent_times_monomial() {
        let k = f(5);
        let a = Series::from_ints(&k, &[(-1, 1), (0, 1)], EXACT);
        let t = Series::var(&k);
        assert_eq!(a.mul(&t), Series::from_ints(&k, &[(0, 1), (1, 1)], EXACT));
    }

    #[test]
    fn frobenius_square_in_char_two() {
        let k = f(2);
        let a = Series::from_ints(&k, &[(0, 1), (1, 1)], EXACT);
        let sq = a.square();
        assert_eq!(sq, Series::from_ints(&k, &[(0, 1), (2, 1)], EXACT));
        assert_eq!(a.frobenius(), sq);
    }

    #[test]
    fn cancellation_exact_and_windowed() {
        let k = f(2);
        let a = Series::from_ints(&k, &[(-3, 1)], EXACT);
        assert!(a.add(&a).is_exact_zero());
        let b = Series::from_ints(&k, &[(-3, 1), (2, 1)], 5);
        let c = Series::from_ints(&k, &[(-3, 1)], 4);
        let s = b.add(&c);
        assert_eq!(s.valuation(), Some(2));
        assert_eq!(s.precision(), 4);
        let z = c.add(&c);
        assert!(z.is_zero() && !z.is_exact());
        assert!(matches!(z.certified_valuation(), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn mul_precision_rule() {
        let k = f(3);
        let a = Series::from_ints(&k, &[(-2, 1), (0, 2)], 3);
        let b = Series::from_ints(&k, &[(1, 1), (2, 1)], 6);
        let c = a.mul(&b);
        // min(N_a + v_b, N_b + v_a) = min(4, 4)
        assert_eq!(c.precision(), 4);
        assert_eq!(c.valuation(), Some(-1));
    }

    #[test]
    fn inverse_round_trip() {
        let k = f(7);
        let a = Series::from_ints(&k, &[(-2, 3), (0, 1), (1, 5)], 20);
        let inv = a.inv().unwrap();
        let prod = a.mul(&inv);
        assert!(prod.sub(&Series::one(&k)).is_zero());
        assert_eq!(prod.precision(), 22);
    }

    #[test]
    fn compose_pole_into_series() {
        // s^{-2} at s = t^3 (1 + t) over F_2, checked against direct division
        let k = f(2);
        let fs = Series::from_ints(&k, &[(-2, 1)], EXACT);
        let g = Series::from_ints(&k, &[(3, 1), (4, 1)], 30);
        let lhs = fs.compose(&g).unwrap();
        let rhs = Series::one(&k).div(&g.square()).unwrap();
        assert!(lhs.agrees_with(&rhs));
        assert_eq!(lhs.valuation(), Some(-6));
        assert_eq!(lhs.coeff(-6).unwrap(), k.one_c());
        assert_eq!(lhs.coeff(-5).unwrap(), k.scalar(0));
        assert_eq!(lhs.coeff(-4).unwrap(), k.one_c());
    }

    #[test]
    fn compose_identities() {
        let k = f(3);
        let s = Series::var(&k);
        let g = Series::from_ints(&k, &[(1, 2), (3, 1)], 12);
        assert!(s.compose(&g).unwrap().agrees_with(&g));
        let one_plus = Series::from_ints(&k, &[(0, 1), (1, 1)], EXACT);
        let t = Series::var(&k);
        assert_eq!(one_plus.compose(&t).unwrap(), one_plus);
    }

    #[test]
    fn compose_matches_horner() {
        let k = f(5);
        let fser = Series::from_ints(&k, &[(-3, 2), (-1, 1), (0, 4), (2, 3), (7, 1)], 40);
        let g = Series::from_ints(&k, &[(2, 1), (3, 3), (5, 2)], 50);
        let fast = fser.compose(&g).unwrap();
        // direct sum of f_k g^k
        let mut slow = Series::zero(&k);
        for (e, c) in fser.terms() {
            slow = slow.add(&g.pow(e).unwrap().scale(&c));
        }
        let slow = slow.truncate(fast.precision());
        assert!(fast.agrees_with(&slow));
        assert_eq!(fast.precision(), 2 * -3 + 48);
    }

    #[test]
    fn derivative_and_residue() {
        let k = f(5);
        let a = Series::from_ints(&k, &[(-1, 3), (0, 2)], EXACT);
        assert_eq!(a.residue().unwrap(), k.scalar(3));
        let tp = Series::from_ints(&k, &[(5, 1)], EXACT);
        assert!(tp.derivative().is_exact_zero());
        let short = Series::from_ints(&k, &[(-5, 1)], -2);
        assert!(short.residue().is_err());
    }

    #[test]
    fn residue_of_log_derivative_over_z9() {
        // t^{-2} d(1 - t^2) / (1 - t^2) = -2 t^{-1} (1 + t^2 + ...)
        let r = GaloisRing::new(3, 2, 1).unwrap();
        let u = Series::from_ints(&r, &[(0, 1), (2, -1)], EXACT).truncate(20);
        let dlog = u.derivative().div(&u).unwrap();
        let res = Series::from_ints(&r, &[(-2, 1)], EXACT).mul(&dlog).residue().unwrap();
        assert_eq!(res, r.scalar(7));
    }

    #[test]
    fn roots() {
        let k = f(5);
        let t2 = Series::from_ints(&k, &[(2, 1)], EXACT);
        assert_eq!(t2.nth_root(2).unwrap(), Series::var(&k));
        let k7 = f(7);
        let a = Series::from_ints(&k7, &[(2, 4)], EXACT);
        let r = a.nth_root(2).unwrap();
        assert_eq!(r.pow(2).unwrap(), a);
        let k2 = f(2);
        let b = Series::from_ints(&k2, &[(3, 1), (4, 1)], 30);
        let c = b.nth_root(3).unwrap();
        assert_eq!(c.valuation(), Some(1));
        assert!(c.pow(3).unwrap().agrees_with(&b));
        assert!(b.nth_root(2).is_err());
    }

    #[test]
    fn pth_power_split() {
        let k = f(2);
        let a = Series::from_ints(&k, &[(0, 1), (3, 1)], EXACT);
        let (g, h) = a.pth_power_decompose().unwrap();
        assert_eq!(g, Series::one(&k));
        assert_eq!(h, Series::from_ints(&k, &[(3, 1)], EXACT));
        let (g, h) = Series::from_ints(&k, &[(2, 1)], EXACT).pth_power_decompose().unwrap();
        assert_eq!(g, Series::var(&k));
        assert!(h.is_exact_zero());
        let (g, h) = Series::from_ints(&k, &[(-4, 1), (-1, 1)], EXACT).pth_power_decompose().unwrap();
        assert_eq!(g, Series::from_ints(&k, &[(-2, 1)], EXACT));
        assert_eq!(h, Series::from_ints(&k, &[(-1, 1)], EXACT));
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let q = 7;
        let a: Vec<u64> = (0..203).map(|i| (i * i + 3) % q).collect();
        let b: Vec<u64> = (0..177).map(|i| (5 * i + 1) % q).collect();
        let mut bp = b.clone();
        bp.resize(203, 0);
        let k = karatsuba(&a, &bp, q);
        let s = schoolbook(&a, &b, q);
        assert_eq!(&k[..s.len()], &s[..]);
    }
}
