//! Residue vectors `(u, α)_∞ ∈ W_n(k)` computed over a lift to
//! characteristic zero: the ghost components are `Res(Φ_j(ũ) dα̃/α̃)`.

use crate::coeff::{Coeff, GaloisRing};
use crate::error::{Error, Result};
use crate::series::Series;
use crate::witt::{table, Witt, WittVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LiftChoice {
    /// Coordinates lifted to their representatives in `[0, p)`.
    Canonical,
    /// Canonical lift plus `p·(random)` on every coefficient in the window.
    Randomized(u64),
}

#[derive(Clone, Debug)]
pub struct LocalSymbolInput {
    pub u: Vec<Series>,
    pub alpha: Series,
    /// Lift precision `m` (coefficients in `Z/p^m`); `None` means `2n + 2`.
    pub m: Option<u32>,
    pub lift: LiftChoice,
}

impl LocalSymbolInput {
    pub fn new(u: Vec<Series>, alpha: Series) -> Self {
        LocalSymbolInput { u, alpha, m: None, lift: LiftChoice::Canonical }
    }
}

pub fn default_lift_precision(n: usize) -> u32 {
    2 * n as u32 + 2
}

#[derive(Clone, Debug)]
pub struct LocalSymbol {
    pub lift_ring: GaloisRing,
    /// `r_j = Res(Φ_j(ũ) dα̃/α̃)` in the lift ring.
    pub residues: Vec<Coeff>,
    /// Ghost preimage of the residues before reduction.
    pub lifted: Vec<Coeff>,
    pub symbol: WittVector<Coeff>,
}

impl LocalSymbol {
    pub fn is_zero(&self, field: &GaloisRing) -> bool {
        self.symbol.comps.iter().all(|c| field.is_zero_c(c))
    }
}

fn random_coeff(ring: &GaloisRing, rng: &mut ChaCha8Rng) -> Coeff {
    let q = ring.modulus() as i64;
    let coords: Vec<i64> = (0..ring.degree()).map(|_| rng.gen_range(0..q)).collect();
    ring.elem(&coords)
}

/// Lift `x` to `ring` on the window `[lo, prec)`, perturbing by multiples of `p`.
fn lift_series(x: &Series, ring: &GaloisRing, lo: i64, prec: i64, rng: Option<&mut ChaCha8Rng>) -> Result<Series> {
    let base = x.truncate(prec).change_ring(ring)?;
    let Some(rng) = rng else { return Ok(base) };
    let p = ring.p() as i64;
    let terms: Vec<(i64, Coeff)> = (lo..base.precision())
        .map(|k| {
            let noise = ring.scale_c(&random_coeff(ring, rng), p);
            (k, ring.add_c(&base.coeff_unchecked(k), &noise))
        })
        .collect();
    Ok(Series::from_terms(ring, &terms, base.precision()))
}

/// Full computation with intermediate values.
pub fn local_symbol(inp: &LocalSymbolInput) -> Result<LocalSymbol> {
    let n = inp.u.len();
    if n == 0 {
        return Err(Error::Hypothesis("empty Witt vector".into()));
    }
    let field = inp.alpha.ring().clone();
    if !field.is_field() {
        return Err(Error::Unsupported("local symbols are defined over a finite field".into()));
    }
    for ui in &inp.u {
        field.check_same(ui.ring())?;
    }
    if inp.alpha.certified_valuation()? != 0 {
        return Err(Error::Hypothesis("α must be a unit power series".into()));
    }
    let p = field.p();
    let m = inp.m.unwrap_or_else(|| default_lift_precision(n));
    if (m as usize) < n + 1 {
        return Err(Error::Unsupported(format!("lift precision {m} too small for length {n}")));
    }
    let ring = field.with_precision(m)?;
    let mut rng = match inp.lift {
        LiftChoice::Canonical => None,
        LiftChoice::Randomized(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };

    // pole orders; Φ_j only matters below s^0
    let poles: Vec<i64> = inp.u.iter().map(|x| x.valuation().map_or(0, |v| (-v).max(0))).collect();
    let pole_max = (0..n).map(|h| p.pow((n - 1 - h) as u32) as i64 * poles[h]).max().unwrap_or(0);
    let mut lifted_u = Vec::with_capacity(n);
    for (h, x) in inp.u.iter().enumerate() {
        let prec = (p.pow((n - 1 - h) as u32) as i64 * poles[h]).max(1);
        lifted_u.push(lift_series(x, &ring, -poles[h], prec, rng.as_mut())?);
    }
    let alpha = lift_series(&inp.alpha, &ring, 0, pole_max + 1, rng.as_mut())?;
    let dlog = alpha.derivative().mul(&alpha.inv()?);

    let mut residues = Vec::with_capacity(n);
    for j in 0..n {
        let mut phi = Series::zero(&ring);
        for (h, x) in lifted_u.iter().enumerate().take(j + 1) {
            let term = x.pow(p.pow((j - h) as u32) as i64)?.scale_int(p.pow(h as u32) as i64);
            phi = phi.add(&term);
        }
        residues.push(phi.truncate(0).mul(&dlog).residue()?);
    }

    let mut lifted: Vec<Coeff> = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = residues[j];
        for (h, w) in lifted.iter().enumerate() {
            let t = ring.scale_c(&ring.pow_c(w, p.pow((j - h) as u32)), p.pow(h as u32) as i64);
            acc = ring.sub_c(&acc, &t);
        }
        let w = ring.div_p_pow(&acc, j as u32).ok_or_else(|| {
            Error::GhostInversion(format!("residue {j} is not divisible by p^{j} in {ring:?}"))
        })?;
        lifted.push(w);
    }
    let symbol = WittVector::new(lifted.iter().map(|w| ring.reduce_to(w, &field)).collect());
    Ok(LocalSymbol { lift_ring: ring, residues, lifted, symbol })
}

pub fn residue_vector(inp: &LocalSymbolInput) -> Result<WittVector<Coeff>> {
    Ok(local_symbol(inp)?.symbol)
}

/// Ghost components of the unreduced preimage equal the residues exactly,
/// and those of the coordinate-wise lift of the symbol agree with `r_j`
/// modulo `p^{j+1}`.
pub fn ghost_consistency(sym: &LocalSymbol, field: &GaloisRing) -> Result<bool> {
    let ring = &sym.lift_ring;
    let p = ring.p();
    let ghost = |w: &[Coeff], j: usize| {
        (0..=j).fold(Coeff::default(), |acc, h| {
            let t = ring.scale_c(&ring.pow_c(&w[h], p.pow((j - h) as u32)), p.pow(h as u32) as i64);
            ring.add_c(&acc, &t)
        })
    };
    let relifted: Vec<Coeff> =
        sym.symbol.comps.iter().map(|c| field.lift(c, ring)).collect::<Result<_>>()?;
    for (j, r) in sym.residues.iter().enumerate() {
        if ghost(&sym.lifted, j) != *r {
            return Ok(false);
        }
        let diff = ring.sub_c(&ghost(&relifted, j), r);
        if ring.div_p_pow(&diff, (j as u32 + 1).min(ring.m())).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `1 + s^order · (unit with random coefficients)`, known to `O(s^prec)`.
pub fn random_one_unit(field: &GaloisRing, order: i64, prec: i64, rng: &mut ChaCha8Rng) -> Series {
    let mut terms = vec![(0, field.one_c())];
    let mut lead = random_coeff(field, rng);
    while field.is_zero_c(&lead) {
        lead = random_coeff(field, rng);
    }
    terms.push((order, lead));
    for k in order + 1..prec {
        terms.push((k, random_coeff(field, rng)));
    }
    Series::from_terms(field, &terms, prec)
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    /// `α = 1 + Σ c_k s^{M+k}` as coordinate lists.
    pub alpha_terms: Vec<(i64, Vec<u64>)>,
    pub symbol: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    pub modulus: i64,
    pub trials: usize,
    pub zero_trials: usize,
    pub searched: usize,
    pub witness: Option<Witness>,
}

/// Random `α ≡ 1 mod s^{M+1}` must give a zero symbol; then look for `α`
/// with `1 − α` of order exactly `M` and nonzero symbol, trying at most
/// `search_cap` polynomials in increasing lexicographic order.
pub fn modulus_vanishing_test(
    u: &[Series],
    modulus: i64,
    trials: usize,
    search_cap: usize,
    seed: u64,
) -> Result<VanishingReport> {
    let field = u.first().ok_or_else(|| Error::Hypothesis("empty Witt vector".into()))?.ring().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prec = modulus + 4;
    let mut zero_trials = 0;
    for _ in 0..trials {
        let alpha = random_one_unit(&field, modulus + 1, prec, &mut rng);
        let sym = local_symbol(&LocalSymbolInput::new(u.to_vec(), alpha))?;
        if !sym.is_zero(&field) {
            return Err(Error::Vanishing(format!(
                "nonzero symbol {:?} for 1 − α of order ≥ {}",
                sym.symbol.comps,
                modulus + 1
            )));
        }
        zero_trials += 1;
    }

    let elems = field.enumerate_field();
    let q = elems.len();
    let mut searched = 0;
    let mut witness = None;
    // patterns c_0 + c_1 s + … with c_0 ≠ 0, shortest first
    'outer: for len in 1..=3usize {
        let count = (q - 1) * q.pow(len as u32 - 1);
        for idx in 0..count {
            if searched >= search_cap {
                break 'outer;
            }
            let mut digits = vec![1 + idx % (q - 1)];
            let mut rest = idx / (q - 1);
            for _ in 1..len {
                digits.push(rest % q);
                rest /= q;
            }
            let mut terms = vec![(0, field.one_c())];
            terms.extend(digits.iter().enumerate().map(|(k, &d)| (modulus + k as i64, elems[d])));
            let alpha = Series::from_terms(&field, &terms, prec);
            searched += 1;
            let sym = local_symbol(&LocalSymbolInput::new(u.to_vec(), alpha))?;
            if !sym.is_zero(&field) {
                witness = Some(Witness {
                    alpha_terms: terms[1..].iter().map(|(k, c)| (*k, field.to_coords(c))).collect(),
                    symbol: sym.symbol.comps.iter().map(|c| field.to_coords(c)).collect(),
                });
                break 'outer;
            }
        }
    }
    Ok(VanishingReport { modulus, trials, zero_trials, searched, witness })
}

/// Witt sum in `W_n(k)`.
pub fn symbol_add(field: &GaloisRing, a: &WittVector<Coeff>, b: &WittVector<Coeff>) -> Result<WittVector<Coeff>> {
    let w = Witt::new(field.clone(), table(field.p(), a.len())?);
    w.add(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::EXACT;

    fn f4() -> GaloisRing {
        GaloisRing::field(2, 2).unwrap()
    }

    #[test]
    fn degree_one_residue() {
        let k = GaloisRing::field(3, 2).unwrap();
        let a = k.generator();
        let c = k.add_c(&a, &k.one_c());
        let u0 = Series::monomial(&k, a, -1);
        let alpha = Series::from_terms(&k, &[(0, k.one_c()), (1, k.neg_c(&c))], EXACT);
        let r = residue_vector(&LocalSymbolInput::new(vec![u0.clone()], alpha)).unwrap();
        assert_eq!(r.comps, vec![k.neg_c(&k.mul_c(&a, &c))]);
        let alpha2 = Series::from_terms(&k, &[(0, k.one_c()), (2, k.neg_c(&c))], EXACT);
        let r = residue_vector(&LocalSymbolInput::new(vec![u0.clone()], alpha2)).unwrap();
        assert!(k.is_zero_c(&r.comps[0]));
        let r = residue_vector(&LocalSymbolInput::new(vec![u0], Series::one(&k))).unwrap();
        assert!(k.is_zero_c(&r.comps[0]));
    }

    #[test]
    fn pole_three_modulus() {
        let k = GaloisRing::prime_field(2).unwrap();
        let u = vec![Series::monomial(&k, k.one_c(), -3)];
        let rep = modulus_vanishing_test(&u, 3, 20, 10, 7).unwrap();
        assert_eq!(rep.zero_trials, 20);
        let w = rep.witness.unwrap();
        assert_eq!(w.alpha_terms, vec![(3, vec![1])]);
    }

    #[test]
    fn zero_vector() {
        let k = f4();
        let u = vec![Series::zero(&k), Series::zero(&k)];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let alpha = random_one_unit(&k, 1, 10, &mut rng);
        let s = local_symbol(&LocalSymbolInput::new(u, alpha)).unwrap();
        assert!(s.is_zero(&k));
    }

    #[test]
    fn lift_independence_and_ghosts() {
        let k = f4();
        let g = k.generator();
        let u = vec![
            Series::from_terms(&k, &[(-3, g), (-1, k.one_c())], EXACT),
            Series::from_terms(&k, &[(-5, k.one_c()), (-2, g)], EXACT),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..5 {
            let alpha = random_one_unit(&k, 1, 14, &mut rng);
            let base = LocalSymbolInput::new(u.clone(), alpha);
            let a = local_symbol(&base).unwrap();
            assert!(ghost_consistency(&a, &k).unwrap());
            let b = residue_vector(&LocalSymbolInput { lift: LiftChoice::Randomized(seed), ..base.clone() }).unwrap();
            assert_eq!(a.symbol, b);
            let c = residue_vector(&LocalSymbolInput { m: Some(9), ..base }).unwrap();
            assert_eq!(a.symbol, c);
        }
    }
}
