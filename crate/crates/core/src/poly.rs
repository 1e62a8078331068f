//! Sparse multivariate polynomials with big-integer coefficients.
//!
//! Monomials are exponent vectors over a fixed number of variables and terms
//! live in a `BTreeMap`, so two equal polynomials are structurally equal.

use crate::ring::Ring;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

pub type Mono = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Mono, BigInt>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(nvars);
        let c = c.into();
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, &[(i, 1)], BigInt::one())
    }

    pub fn monomial(nvars: usize, powers: &[(usize, u32)], c: BigInt) -> Self {
        let mut m = vec![0; nvars];
        for &(i, e) in powers {
            m[i] += e;
        }
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Mono, BigInt)>) -> Self {
        let mut acc: BTreeMap<Mono, BigInt> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.len(), nvars);
            *acc.entry(m).or_insert_with(BigInt::zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { nvars, terms: acc }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
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

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            *r.terms.entry(m.clone()).or_insert_with(BigInt::zero) += c;
        }
        r.terms.retain(|_, c| !c.is_zero());
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Poly {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        assert_eq!(self.nvars, o.nvars);
        let mut acc: HashMap<Mono, BigInt> = HashMap::with_capacity((self.len() * o.len()).min(1 << 16));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m: Mono = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                *acc.entry(m).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Poly { nvars: self.nvars, terms }
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `self / k`, or `None` if some coefficient is not divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<Poly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            terms.insert(m.clone(), q);
        }
        Some(Poly { nvars: self.nvars, terms })
    }

    /// Coefficients reduced into `[0, modulus)`.
    pub fn reduce_mod(&self, modulus: &BigInt) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.mod_floor(modulus)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    /// Re-index variables into a polynomial ring with `nvars` variables;
    /// variable `i` becomes `map[i]`.
    pub fn rename(&self, nvars: usize, map: &[usize]) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut nm = vec![0; nvars];
            for (i, &e) in m.iter().enumerate() {
                nm[map[i]] += e;
            }
            (nm, c.clone())
        });
        Self::from_terms(nvars, terms)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m[var]).max()
    }

    pub fn is_free_of(&self, var: usize) -> bool {
        self.terms.keys().all(|m| m[var] == 0)
    }

    /// The coefficient of `var^k`, as a polynomial free of `var`.
    pub fn coeff_in(&self, var: usize, k: u32) -> Poly {
        let terms = self.terms.iter().filter(|(m, _)| m[var] == k).map(|(m, c)| {
            let mut nm = m.clone();
            nm[var] = 0;
            (nm, c.clone())
        });
        Self::from_terms(self.nvars, terms)
    }

    /// The common weight of all monomials, if every monomial has the same
    /// weight under `weights`; `Some(None)` for the zero polynomial.
    pub fn isobaric_weight(&self, weights: &[u64]) -> Option<Option<u64>> {
        let mut w = None;
        for m in self.terms.keys() {
            let mw: u64 = m.iter().zip(weights).map(|(&e, &wt)| e as u64 * wt).sum();
            match w {
                None => w = Some(mw),
                Some(x) if x != mw => return None,
                _ => {}
            }
        }
        Some(w)
    }

    /// Evaluate at ring elements, one per variable.
    pub fn eval<R: Ring>(&self, ring: &R, args: &[R::Elem]) -> R::Elem {
        eval_many(ring, std::slice::from_ref(self), args).pop().unwrap()
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<String> = m
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { names[i].clone() } else { format!("{}^{}", names[i], e) })
                .collect();
            if vars.is_empty() {
                out.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    out.push_str(&a.to_string());
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.fmt_with(&names))
    }
}

/// Evaluate several polynomials at the same arguments, sharing the powers of
/// every argument. Monomials touching a zero argument are skipped.
pub fn eval_many<R: Ring>(ring: &R, polys: &[Poly], args: &[R::Elem]) -> Vec<R::Elem> {
    let nvars = args.len();
    let mut maxdeg = vec![0u32; nvars];
    for p in polys {
        assert_eq!(p.nvars, nvars, "argument count");
        for m in p.terms.keys() {
            for (d, &e) in maxdeg.iter_mut().zip(m) {
                *d = (*d).max(e);
            }
        }
    }
    let zero_arg: Vec<bool> = args.iter().map(|a| ring.is_zero(a)).collect();
    let mut powers: Vec<Vec<R::Elem>> = Vec::with_capacity(nvars);
    for (i, a) in args.iter().enumerate() {
        let mut v = vec![ring.one()];
        if !zero_arg[i] {
            for k in 1..=maxdeg[i] as usize {
                let next = ring.mul(&v[k - 1], a);
                v.push(next);
            }
        }
        powers.push(v);
    }
    polys
        .iter()
        .map(|p| {
            let mut acc = ring.zero();
            for (m, c) in &p.terms {
                if m.iter().enumerate().any(|(i, &e)| e > 0 && zero_arg[i]) {
                    continue;
                }
                let mut term = ring.from_int(c);
                for (i, &e) in m.iter().enumerate() {
                    if e > 0 {
                        term = ring.mul(&term, &powers[i][e as usize]);
                    }
                }
                acc = ring.add(&acc, &term);
            }
            acc
        })
        .collect()
}

/// Polynomials in a fixed number of variables, optionally with coefficients
/// reduced modulo an integer (e.g. `F_p[X]` for modulus `p`).
#[derive(Clone, Debug, PartialEq)]
pub struct PolyRing {
    pub nvars: usize,
    pub modulus: Option<BigInt>,
}

impl PolyRing {
    pub fn integers(nvars: usize) -> Self {
        PolyRing { nvars, modulus: None }
    }

    pub fn mod_p(nvars: usize, p: u64) -> Self {
        PolyRing { nvars, modulus: Some(BigInt::from(p)) }
    }

    fn norm(&self, a: Poly) -> Poly {
        match &self.modulus {
            Some(m) => a.reduce_mod(m),
            None => a,
        }
    }

    pub fn var(&self, i: usize) -> Poly {
        Poly::var(self.nvars, i)
    }
}

impl Ring for PolyRing {
    type Elem = Poly;

    fn zero(&self) -> Poly {
        Poly::zero(self.nvars)
    }
    fn one(&self) -> Poly {
        self.norm(Poly::one(self.nvars))
    }
    fn from_int(&self, n: &BigInt) -> Poly {
        self.norm(Poly::constant(self.nvars, n.clone()))
    }
    fn add(&self, a: &Poly, b: &Poly) -> Poly {
        self.norm(a.add(b))
    }
    fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.norm(a.sub(b))
    }
    fn neg(&self, a: &Poly) -> Poly {
        self.norm(a.neg())
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.norm(a.mul(b))
    }
    fn is_zero(&self, a: &Poly) -> bool {
        a.is_zero()
    }
    fn pth_power(&self, a: &Poly, p: u64) -> Poly {
        // in F_p[X] the p-th power is the monomial-wise Frobenius
        if self.modulus.as_ref() == Some(&BigInt::from(p)) {
            let terms = a.terms.iter().map(|(m, c)| (m.iter().map(|e| e * p as u32).collect(), c.clone()));
            return Poly::from_terms(self.nvars, terms);
        }
        self.pow(a, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_square() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let s = x.add(&y).pow(2);
        assert_eq!(s.coefficient(&[1, 1]), BigInt::from(2));
        assert_eq!(s.len(), 3);
        let r = PolyRing::mod_p(2, 2);
        assert_eq!(r.pth_power(&x.add(&y), 2), r.mul(&x.add(&y), &x.add(&y)));
    }

    #[test]
    fn coeff_extraction_and_weights() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let f = x.pow(2).mul(&y).add(&y.pow(3).scale(&BigInt::from(5)));
        assert_eq!(f.coeff_in(0, 2), y);
        assert_eq!(f.degree_in(0), Some(2));
        assert_eq!(f.isobaric_weight(&[1, 1]), Some(Some(3)));
        assert_eq!(f.isobaric_weight(&[1, 2]), None);
        assert_eq!(f.div_exact(&BigInt::from(5)), None);
    }

    #[test]
    fn eval_matches_direct() {
        let r = PolyRing::integers(1);
        let t = r.var(0);
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let f = x.mul(&y).sub(&y.pow(2));
        let val = f.eval(&r, &[t.add(&Poly::one(1)), t.clone()]);
        assert_eq!(val, t);
    }
}
