use crate::error::{Error, Result};
use crate::poly::Poly;
use num_bigint::BigInt;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Universal Witt polynomials of length `n` for the prime `p`.
///
/// Binary operations (`S`, `c`, `P`) live in `2n` variables with `X_i = i`
/// and `Y_i = n + i`; ghost and negation polynomials in `n` variables.
#[derive(Debug)]
pub struct WittTable {
    p: u64,
    n: usize,
    phi: Vec<Poly>,
    sum: Vec<Poly>,
    carry: Vec<Poly>,
    neg: Vec<Poly>,
    prod: OnceLock<Vec<Poly>>,
}

fn pbig(p: u64, e: usize) -> BigInt {
    BigInt::from(p).pow(e as u32)
}

/// Ghost polynomial `Φ_j = Σ_h p^h V_{off+h}^{p^{j-h}}`.
fn ghost_poly(p: u64, j: usize, nvars: usize, off: usize) -> Poly {
    let mut acc = Poly::zero(nvars);
    for h in 0..=j {
        let e = p.pow((j - h) as u32) as u32;
        acc = acc.add(&Poly::monomial(nvars, &[(off + h, e)], pbig(p, h)));
    }
    acc
}

/// Solve `Σ_{h≤j} p^h W_h^{p^{j-h}} = target_j` for integer polynomials `W`.
pub(crate) fn solve_ghost(p: u64, targets: &[Poly]) -> Result<Vec<Poly>> {
    let mut w: Vec<Poly> = Vec::with_capacity(targets.len());
    let mut pows: Vec<Poly> = Vec::with_capacity(targets.len());
    for (j, target) in targets.iter().enumerate() {
        for pw in pows.iter_mut() {
            *pw = pw.pow(p);
        }
        let mut rest = target.clone();
        for (h, pw) in pows.iter().enumerate() {
            rest = rest.sub(&pw.scale(&pbig(p, h)));
        }
        let wj = rest
            .div_exact(&pbig(p, j))
            .ok_or_else(|| Error::Integrality(format!("p = {p}, component {j} not divisible by p^{j}")))?;
        pows.push(wj.clone());
        w.push(wj);
    }
    Ok(w)
}

impl WittTable {
    pub fn build(p: u64, n: usize) -> Result<Self> {
        if !crate::coeff::is_prime(p) {
            return Err(Error::Unsupported(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::Unsupported("Witt vectors of length 0".into()));
        }
        let phi: Vec<Poly> = (0..n).map(|j| ghost_poly(p, j, n, 0)).collect();
        let two = 2 * n;
        let sum_targets: Vec<Poly> =
            (0..n).map(|j| ghost_poly(p, j, two, 0).add(&ghost_poly(p, j, two, n))).collect();
        let sum = solve_ghost(p, &sum_targets)?;
        let carry = sum
            .iter()
            .enumerate()
            .map(|(j, s)| s.sub(&Poly::var(two, j)).sub(&Poly::var(two, n + j)))
            .collect();
        let neg_targets: Vec<Poly> = phi.iter().map(|f| f.neg()).collect();
        let neg = solve_ghost(p, &neg_targets)?;
        let table = WittTable { p, n, phi, sum, carry, neg, prod: OnceLock::new() };
        table.certify()?;
        Ok(table)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ghost(&self, j: usize) -> &Poly {
        &self.phi[j]
    }

    pub fn sum(&self, j: usize) -> &Poly {
        &self.sum[j]
    }

    pub fn sums(&self) -> &[Poly] {
        &self.sum
    }

    pub fn carry(&self, j: usize) -> &Poly {
        &self.carry[j]
    }

    pub fn neg(&self, j: usize) -> &Poly {
        &self.neg[j]
    }

    pub fn negs(&self) -> &[Poly] {
        &self.neg
    }

    pub fn ghosts(&self) -> &[Poly] {
        &self.phi
    }

    /// Product polynomials, built on first use.
    pub fn products(&self) -> &[Poly] {
        self.prod.get_or_init(|| {
            let two = 2 * self.n;
            let targets: Vec<Poly> = (0..self.n)
                .map(|j| ghost_poly(self.p, j, two, 0).mul(&ghost_poly(self.p, j, two, self.n)))
                .collect();
            let prod = solve_ghost(self.p, &targets).expect("product polynomials are integral");
            for (j, pj) in prod.iter().enumerate() {
                let w = self.p.pow(j as u32);
                assert_eq!(pj.isobaric_weight(&self.weights2()), Some(Some(2 * w)), "weight of P_{j}");
            }
            prod
        })
    }

    /// Weight `2p^j` of every product polynomial `P_j`.
    pub fn certify_products(&self) -> Result<()> {
        for (j, pj) in self.products().iter().enumerate() {
            let w = 2 * self.p.pow(j as u32);
            if pj.isobaric_weight(&self.weights2()) != Some(Some(w)) {
                return Err(Error::Integrality(format!("P_{j} is not isobaric of weight {w}")));
            }
        }
        Ok(())
    }

    pub fn product(&self, j: usize) -> &Poly {
        &self.products()[j]
    }

    /// Weights `p^i` of `X_0..X_{n-1}, Y_0..Y_{n-1}`.
    pub fn weights2(&self) -> Vec<u64> {
        let w: Vec<u64> = (0..self.n).map(|i| self.p.pow(i as u32)).collect();
        w.iter().chain(w.iter()).copied().collect()
    }

    pub fn weights1(&self) -> Vec<u64> {
        (0..self.n).map(|i| self.p.pow(i as u32)).collect()
    }

    pub fn names2(&self) -> Vec<String> {
        (0..self.n).map(|i| format!("X{i}")).chain((0..self.n).map(|i| format!("Y{i}"))).collect()
    }

    pub fn names1(&self) -> Vec<String> {
        (0..self.n).map(|i| format!("Y{i}")).collect()
    }

    /// Isobaric weights and the shape `S_i = X_i + Y_i + c_i` with `c_i`
    /// free of `X_i, Y_i`.
    pub fn certify(&self) -> Result<()> {
        let w2 = self.weights2();
        let w1 = self.weights1();
        for j in 0..self.n {
            let w = self.p.pow(j as u32);
            let ok = |poly: &Poly, weights: &[u64]| match poly.isobaric_weight(weights) {
                Some(Some(x)) => x == w,
                Some(None) => true,
                None => false,
            };
            if !ok(&self.sum[j], &w2) || !ok(&self.carry[j], &w2) || !ok(&self.neg[j], &w1) {
                return Err(Error::Integrality(format!("component {j} is not isobaric of weight {w}")));
            }
            if !self.carry[j].is_free_of(j) || !self.carry[j].is_free_of(self.n + j) {
                return Err(Error::Integrality(format!("c_{j} involves X_{j} or Y_{j}")));
            }
        }
        Ok(())
    }

    /// Re-derive every ghost identity as an exact polynomial identity.
    pub fn verify_ghost_identities(&self) -> Result<()> {
        let two = 2 * self.n;
        let xs: Vec<Poly> = (0..self.n).map(|i| Poly::var(two, i)).collect();
        let ys: Vec<Poly> = (0..self.n).map(|i| Poly::var(two, self.n + i)).collect();
        let ring = crate::poly::PolyRing::integers(two);
        let ghost_of = |v: &[Poly], j: usize| {
            let args: Vec<Poly> = v.iter().take(self.n).cloned().collect();
            self.phi[j].eval(&ring, &args)
        };
        let neg_y: Vec<Poly> = {
            let map: Vec<usize> = (0..self.n).map(|i| self.n + i).collect();
            self.neg.iter().map(|q| q.rename(two, &map)).collect()
        };
        let prods = self.products();
        for j in 0..self.n {
            let gx = ghost_of(&xs, j);
            let gy = ghost_of(&ys, j);
            if ghost_of(&self.sum, j) != gx.add(&gy) {
                return Err(Error::Integrality(format!("ghost identity for S_{j}")));
            }
            if ghost_of(prods, j) != gx.mul(&gy) {
                return Err(Error::Integrality(format!("ghost identity for P_{j}")));
            }
            if ghost_of(&neg_y, j) != gy.neg() {
                return Err(Error::Integrality(format!("ghost identity for I_{j}")));
            }
        }
        Ok(())
    }
}

/// Cached table for `(p, n)`; tables are immutable once built.
pub fn table(p: u64, n: usize) -> Result<Arc<WittTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<WittTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(p, n)) {
        return Ok(t.clone());
    }
    let t = Arc::new(WittTable::build(p, n)?);
    cache.lock().unwrap().entry((p, n)).or_insert_with(|| t.clone());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(n: usize, i: usize, j: usize) -> Poly {
        Poly::var(2 * n, i).mul(&Poly::var(2 * n, n + j))
    }

    #[test]
    fn first_carries() {
        let t = table(2, 2).unwrap();
        assert!(t.carry(0).is_zero());
        assert_eq!(t.sum(0), &Poly::var(4, 0).add(&Poly::var(4, 2)));
        assert_eq!(t.carry(1), &xy(2, 0, 0).neg());
        let t3 = table(3, 2).unwrap();
        let x0 = Poly::var(4, 0);
        let y0 = Poly::var(4, 2);
        let expect = x0.pow(2).mul(&y0).add(&x0.mul(&y0.pow(2))).neg();
        assert_eq!(t3.carry(1), &expect);
    }

    #[test]
    fn negation_in_char_two() {
        let t = table(2, 2).unwrap();
        let y0 = Poly::var(2, 0);
        let y1 = Poly::var(2, 1);
        assert_eq!(t.neg(1), &y1.neg().sub(&y0.pow(2)));
        let t3 = table(3, 3).unwrap();
        for j in 0..3 {
            assert_eq!(t3.neg(j), &Poly::var(3, j).neg());
        }
    }

    #[test]
    fn ghost_identities_hold() {
        for (p, n) in [(2, 3), (3, 2), (5, 2)] {
            table(p, n).unwrap().verify_ghost_identities().unwrap();
        }
    }

    #[test]
    fn non_prime_rejected() {
        assert!(WittTable::build(4, 2).is_err());
    }
}
