//! Combinatorial shadow of the compactification `W̄_n`: the weighted ring
//! `H = F_p[T, Y_0, Y_1, …]` with `deg T = 1`, `deg Y_i = p^i`, the action
//! and cover on its graded pieces, and the Chow ring
//! `Z[x_1..x_n] / (x_1², x_i² − p x_i x_{i−1})`.

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};
use crate::ring::Ring;
use crate::tower::{CoverDatum, Tower};
use crate::witt::{nth_component_identity_check, table, Witt, WittVector};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Weights `[1, 1, p, …, p^k]` of `T, Y_0, …, Y_k`.
pub fn weights(p: u64, k: usize) -> Vec<u64> {
    std::iter::once(1).chain((0..=k).map(|i| p.pow(i as u32))).collect()
}

pub fn names(k: usize) -> Vec<String> {
    std::iter::once("T".to_string()).chain((0..=k).map(|i| format!("Y{i}"))).collect()
}

/// Homogeneous element of `H` in `T, Y_0..Y_k` over `F_p`.
#[derive(Clone, PartialEq)]
pub struct GradedPolynomial {
    pub p: u64,
    pub k: usize,
    pub poly: Poly,
    pub weight: u64,
}

impl GradedPolynomial {
    /// Reduces mod `p` and certifies homogeneity. The zero polynomial gets
    /// `weight` as declared.
    pub fn new(p: u64, k: usize, poly: Poly, weight: u64) -> Result<Self> {
        let poly = poly.reduce_mod(&BigInt::from(p));
        if poly.nvars() != k + 2 {
            return Err(Error::RingMismatch(format!("{} variables, expected {}", poly.nvars(), k + 2)));
        }
        match poly.isobaric_weight(&weights(p, k)) {
            None => Err(Error::Consistency("polynomial is not homogeneous".into())),
            Some(Some(w)) if w != weight => {
                Err(Error::Consistency(format!("homogeneous of weight {w}, declared {weight}")))
            }
            _ => Ok(GradedPolynomial { p, k, poly, weight }),
        }
    }

    pub fn ring(&self) -> PolyRing {
        PolyRing::mod_p(self.k + 2, self.p)
    }

    /// Set `T = 1`; the result keeps the `T` slot.
    pub fn dehomogenize(&self) -> Poly {
        let ring = self.ring();
        let mut args: Vec<Poly> = (0..self.k + 2).map(|i| ring.var(i)).collect();
        args[0] = ring.one();
        self.poly.eval(&ring, &args)
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly.fmt_with(&names(self.k)))
    }
}

impl fmt::Debug for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.weight, self)
    }
}

/// `dim H_{m p^{n−1}}` in the variables `T, Y_0, …, Y_{n−1}`.
pub fn section_dim(p: u64, n: usize, m: u64) -> u64 {
    assert!(n >= 1, "n ≥ 1");
    let d = (m * p.pow(n as u32 - 1)) as usize;
    let mut ways = vec![0u64; d + 1];
    ways[0] = 1;
    for w in weights(p, n - 1) {
        for s in w as usize..=d {
            ways[s] += ways[s - w as usize];
        }
    }
    ways[d]
}

/// Monomial basis of `H_{m p^{n−1}}` as exponent vectors over `T, Y_0..Y_{n−1}`.
pub fn section_basis(p: u64, n: usize, m: u64) -> Vec<Vec<u32>> {
    let w = weights(p, n - 1);
    let d = m * p.pow(n as u32 - 1);
    let mut out = vec![];
    fn rec(w: &[u64], k: usize, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            cur[0] = left as u32;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left / w[k]).rev() {
            cur[k] = e as u32;
            rec(w, k - 1, left - e * w[k], cur, out);
        }
        cur[k] = 0;
    }
    let mut cur = vec![0; w.len()];
    rec(&w, w.len() - 1, d, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PushforwardCheck {
    pub p: u64,
    pub n: usize,
    /// `dim H^0(W̄_{n+1}, O(1))`.
    pub total: u64,
    /// `dim H^0(W̄_n, O)`.
    pub trivial_part: u64,
    /// `dim H^0(W̄_n, O(p))`.
    pub twisted_part: u64,
    pub holds: bool,
}

pub fn pushforward_recursion_check(p: u64, n: usize) -> PushforwardCheck {
    let total = section_dim(p, n + 1, 1);
    let trivial_part = section_dim(p, n, 0);
    let twisted_part = section_dim(p, n, p);
    PushforwardCheck { p, n, total, trivial_part, twisted_part, holds: total == trivial_part + twisted_part }
}

/// Images `a·Y_j = T^{p^j} S_j(Y/T; a)` for `j = 0..=k`, computed as
/// `S_j(Y; a_0 T, a_1 T^p, …)`. Entries of `a` are polynomials in the same
/// variables (constants for points of `W(F_p)`).
pub fn action_images(p: u64, a: &[Poly]) -> Result<Vec<Poly>> {
    let k = a.len().checked_sub(1).ok_or_else(|| Error::Hypothesis("empty Witt vector".into()))?;
    let ring = PolyRing::mod_p(k + 2, p);
    let t = table(p, k + 1)?;
    let tvar = ring.var(0);
    let mut args: Vec<Poly> = (0..=k).map(|i| ring.var(1 + i)).collect();
    for (i, ai) in a.iter().enumerate() {
        args.push(ring.mul(ai, &ring.pow(&tvar, p.pow(i as u32))));
    }
    Ok(t.sums().iter().map(|s| s.eval(&ring, &args)).collect())
}

/// `f(a·Y)`; the result is certified homogeneous of the weight of `f`.
pub fn group_action_on_sections(a: &[Poly], f: &GradedPolynomial) -> Result<GradedPolynomial> {
    if a.len() != f.k + 1 {
        return Err(Error::Hypothesis(format!("Witt vector of length {} acting on Y_0..Y_{}", a.len(), f.k)));
    }
    let ring = f.ring();
    let mut args = vec![ring.var(0)];
    args.extend(action_images(f.p, a)?);
    GradedPolynomial::new(f.p, f.k, f.poly.eval(&ring, &args), f.weight)
}

/// Constant polynomials for a point of `W_{k+1}(F_p)`.
pub fn constant_vector(p: u64, k: usize, a: &[u64]) -> Vec<Poly> {
    a.iter().map(|&x| Poly::constant(k + 2, BigInt::from(x % p))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiSection {
    pub p: u64,
    pub n: usize,
    pub image: String,
    /// `Y_n^p − Y_n T^{p^n(p−1)} + T^{p^{n+1}} c_n(Y^p/T^p; −Y/T)` with the
    /// second argument negated componentwise.
    pub literal: String,
    pub literal_holds: bool,
    pub homogeneous: bool,
    pub dehomogenization_holds: bool,
    pub equivariant: bool,
    #[serde(skip)]
    pub graded: GradedPolynomial,
}

/// Image of `X_n`: `T^{p^{n+1}} S_n(Y^p / T^{p·w}; −(Y / T^w))`, computed
/// as `S_n(Y_0^p, …, Y_n^p; T^{p−1} I_0(Y), …, T^{(p−1)p^n} I_n(Y))`.
pub fn psi_on_sections(p: u64, n: usize) -> Result<PsiSection> {
    let ring = PolyRing::mod_p(n + 2, p);
    let t = table(p, n + 1)?;
    let tvar = ring.var(0);
    let ys: Vec<Poly> = (0..=n).map(|i| ring.var(1 + i)).collect();
    let xs: Vec<Poly> = ys.iter().map(|y| ring.pth_power(y, p)).collect();
    let tw = |i: usize| ring.pow(&tvar, (p - 1) * p.pow(i as u32));
    let zs: Vec<Poly> = (0..=n).map(|i| ring.mul(&tw(i), &t.neg(i).eval(&ring, &ys))).collect();
    let args: Vec<Poly> = xs.iter().chain(&zs).cloned().collect();
    let image = t.sum(n).eval(&ring, &args);
    let weight = p.pow(n as u32 + 1);
    let homogeneous = image.isobaric_weight(&weights(p, n)) == Some(Some(weight));
    let graded = GradedPolynomial { p, k: n, poly: image.reduce_mod(&BigInt::from(p)), weight };

    let naive: Vec<Poly> = (0..=n).map(|i| ring.neg(&ring.mul(&tw(i), &ys[i]))).collect();
    let args: Vec<Poly> = xs.iter().chain(&naive).cloned().collect();
    let literal = ring.add(
        &ring.sub(&xs[n], &ring.mul(&ys[n], &ring.pow(&tvar, p.pow(n as u32) * (p - 1)))),
        &t.carry(n).eval(&ring, &args),
    );

    let component = nth_component_identity_check(p, n)?.lhs_poly;
    let map: Vec<usize> = (0..=n).map(|i| i + 1).collect();
    let dehomogenization_holds = graded.dehomogenize() == component.rename(n + 2, &map);

    let mut v = vec![0u64; n + 1];
    v[n] = 1;
    let moved = group_action_on_sections(&constant_vector(p, n, &v), &graded)?;
    let equivariant = moved.poly == graded.poly;

    Ok(PsiSection {
        p,
        n,
        image: graded.to_string(),
        literal: literal.fmt_with(&names(n)),
        literal_holds: literal == graded.poly,
        homogeneous,
        dehomogenization_holds,
        equivariant,
        graded,
    })
}

/// Compare `(a+b)·f` with `a·(b·f)` for points of `W_{k+1}(F_p)`.
pub fn action_composition_holds(a: &[u64], b: &[u64], f: &GradedPolynomial) -> Result<bool> {
    let p = f.p;
    let fp = crate::coeff::GaloisRing::prime_field(p)?;
    let w = Witt::new(fp.clone(), table(p, a.len())?);
    let lift = |x: &[u64]| WittVector::new(x.iter().map(|&c| fp.scalar(c as i64)).collect());
    let sum = w.add(&lift(a), &lift(b))?;
    let sum: Vec<u64> = sum.comps.iter().map(|c| fp.as_int(c)).collect();
    let lhs = group_action_on_sections(&constant_vector(p, f.k, &sum), f)?;
    let inner = group_action_on_sections(&constant_vector(p, f.k, b), f)?;
    let rhs = group_action_on_sections(&constant_vector(p, f.k, a), &inner)?;
    Ok(lhs == rhs)
}

/// Class in `A*(W̄_n)` over the square-free monomials in `x_1..x_n`;
/// bit `i−1` of a key stands for `x_i`.
#[derive(Clone, PartialEq, Eq)]
pub struct ChowClass {
    pub n: usize,
    pub p: u64,
    pub terms: BTreeMap<u32, BigInt>,
}

impl ChowClass {
    pub fn zero(n: usize, p: u64) -> Self {
        ChowClass { n, p, terms: BTreeMap::new() }
    }

    pub fn one(n: usize, p: u64) -> Self {
        Self::monomial(n, p, 0, BigInt::one())
    }

    pub fn monomial(n: usize, p: u64, mask: u32, c: BigInt) -> Self {
        let mut z = Self::zero(n, p);
        z.push(mask, c);
        z
    }

    /// `x_i`; `x_0` is zero.
    pub fn x(n: usize, p: u64, i: usize) -> Self {
        assert!(i <= n, "x_{i} beyond x_{n}");
        if i == 0 {
            Self::zero(n, p)
        } else {
            Self::monomial(n, p, 1 << (i - 1), BigInt::one())
        }
    }

    fn push(&mut self, mask: u32, c: BigInt) {
        let e = self.terms.entry(mask).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&mask);
        }
    }

    fn check(&self, o: &ChowClass) -> Result<()> {
        if (self.n, self.p) != (o.n, o.p) {
            return Err(Error::RingMismatch(format!("A*(W̄_{}) vs A*(W̄_{})", self.n, o.n)));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &ChowClass) -> Result<ChowClass> {
        self.check(o)?;
        let mut r = self.clone();
        for (&m, c) in &o.terms {
            r.push(m, c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &ChowClass) -> Result<ChowClass> {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, k: &BigInt) -> ChowClass {
        let mut r = Self::zero(self.n, self.p);
        for (&m, c) in &self.terms {
            r.push(m, c * k);
        }
        r
    }

    /// Components of codimension `c`.
    pub fn codim_part(&self, c: u32) -> ChowClass {
        let mut r = Self::zero(self.n, self.p);
        for (&m, v) in &self.terms {
            if m.count_ones() == c {
                r.push(m, v.clone());
            }
        }
        r
    }
}

/// Reduce `∏ x_i^{e_i}` to `c · (square-free monomial)`, or zero.
fn reduce_monomial(p: u64, mut exps: Vec<u32>) -> Option<(BigInt, u32)> {
    let mut c = BigInt::one();
    while let Some(i) = (0..exps.len()).rev().find(|&i| exps[i] >= 2) {
        if i == 0 {
            return None;
        }
        exps[i] -= 1;
        exps[i - 1] += 1;
        c *= p;
    }
    let mask = exps.iter().enumerate().fold(0u32, |m, (i, &e)| m | (e << i));
    Some((c, mask))
}

pub fn chow_mul(a: &ChowClass, b: &ChowClass) -> Result<ChowClass> {
    a.check(b)?;
    let mut r = ChowClass::zero(a.n, a.p);
    for (&ma, ca) in &a.terms {
        for (&mb, cb) in &b.terms {
            let exps: Vec<u32> = (0..a.n).map(|i| ((ma >> i) & 1) + ((mb >> i) & 1)).collect();
            if let Some((c, m)) = reduce_monomial(a.p, exps) {
                r.push(m, c * ca * cb);
            }
        }
    }
    Ok(r)
}

/// The ring map `x_i ↦ p x_i`.
pub fn psi_pullback(a: &ChowClass) -> Result<ChowClass> {
    let mut r = ChowClass::zero(a.n, a.p);
    for (&m, c) in &a.terms {
        let mut img = ChowClass::monomial(a.n, a.p, 0, c.clone());
        for i in 0..a.n {
            if (m >> i) & 1 == 1 {
                img = chow_mul(&img, &ChowClass::x(a.n, a.p, i + 1).scale(&BigInt::from(a.p)))?;
            }
        }
        r = r.add(&img)?;
    }
    Ok(r)
}

impl fmt::Display for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&m, c)| {
                let vars: Vec<String> = (0..self.n).filter(|i| (m >> i) & 1 == 1).map(|i| format!("x{}", i + 1)).collect();
                match (vars.is_empty(), c.is_one()) {
                    (true, _) => c.to_string(),
                    (false, true) => vars.join("*"),
                    (false, false) => format!("{c}*{}", vars.join("*")),
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ChowClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryComponent {
    pub i: usize,
    pub multiplicity: u64,
    pub class: ChowClass,
    /// Order of the inertia group of `Z/p^n` along `B_{n,i}`.
    pub inertia_order: u64,
    /// `p^{n−i}`, the stated order, kept for comparison.
    pub stated_inertia_order: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorLedger {
    pub p: u64,
    pub n: usize,
    pub zero_sections: Vec<ChowClass>,
    pub infinity_sections: Vec<ChowClass>,
    pub boundary: ChowClass,
    pub components: Vec<BoundaryComponent>,
    pub checks: Vec<(String, bool)>,
}

impl DivisorLedger {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }
}

/// `[Σ_i] = x_i − p x_{i−1}` pulled back to `W̄_n`, and `[B_n] = Σ p^{n−i} [B_{n,i}]`.
pub fn divisor_ledger(p: u64, n: usize) -> Result<DivisorLedger> {
    if n == 0 {
        return Err(Error::Hypothesis("n ≥ 1".into()));
    }
    let pb = BigInt::from(p);
    let x = |i: usize| ChowClass::x(n, p, i);
    let zero_sections: Vec<ChowClass> = (1..=n).map(x).collect();
    let infinity_sections: Vec<ChowClass> =
        (1..=n).map(|i| x(i).sub(&x(i - 1).scale(&pb))).collect::<Result<_>>()?;
    let mut boundary = ChowClass::zero(n, p);
    let mut components = vec![];
    for i in 1..=n {
        let mult = p.pow((n - i) as u32);
        boundary = boundary.add(&infinity_sections[i - 1].scale(&BigInt::from(mult)))?;
        components.push(BoundaryComponent {
            i,
            multiplicity: mult,
            class: infinity_sections[i - 1].clone(),
            inertia_order: p.pow((n - i + 1) as u32),
            stated_inertia_order: mult,
        });
    }
    let mut checks = vec![(format!("[B_{n}] = x_{n}"), boundary == x(n))];
    // [B_k] = [Σ_k] + p [B_{k−1}], each equal to [Z_k]
    let mut b_prev = ChowClass::zero(n, p);
    let mut rec_ok = true;
    for k in 1..=n {
        let b_k = infinity_sections[k - 1].add(&b_prev.scale(&pb))?;
        rec_ok &= b_k == zero_sections[k - 1];
        b_prev = b_k;
    }
    checks.push(("[B_k] = [Σ_k] + p[B_{k−1}] = [Z_k]".into(), rec_ok));
    let mut disjoint = true;
    for k in 1..=n {
        disjoint &= chow_mul(&zero_sections[k - 1], &infinity_sections[k - 1])?.is_zero();
    }
    checks.push(("[Z_k]·[Σ_k] = 0".into(), disjoint));
    Ok(DivisorLedger { p, n, zero_sections, infinity_sections, boundary, components, checks })
}

/// The datum `V^{i−1}(w)` with `w` of length `n − i + 1` maps the closed
/// point into `B_{n,i}`; its inertia is the ramified part `|G_0|` of the
/// tower of `w`.
pub fn inertia_from_tower(p: u64, n: usize, i: usize) -> Result<u64> {
    if i == 0 || i > n {
        return Err(Error::Hypothesis(format!("component {i} of B_{n}")));
    }
    let datum = CoverDatum::monomial(p, &vec![1; n - i + 1])?;
    let tower = Tower::build(&datum, None)?;
    Ok(tower.filtration(n - i + 1)?.group_order(0))
}
