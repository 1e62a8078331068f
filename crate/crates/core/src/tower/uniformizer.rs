//! A uniformizer of the degree-`p` extension `y^p − y = z̃(t)` with pole
//! order `e` prime to `p`.
//!
//! With `−a e + b p = 1` put `τ = y^a t^b`. Writing `t = τ^p B(τ)`,
//! `y = τ^{−e} A(τ)` and `z̃ = t^{−e} U(t)`, the units `A, B` solve
//!
//! ```text
//! G1 = A^a B^b − 1 = 0
//! G2 = A^p − τ^{e(p−1)} A − B^{−e} U(τ^p B) = 0
//! ```
//!
//! whose Jacobian is invertible at `τ = 0`, so Newton iteration doubles the
//! number of correct terms per step.

use crate::error::{Error, Result};
use crate::series::{Composer, Series, EXACT};

/// Bezout exponents `(a, b)` with `−a e + b p = 1` and `a` minimal in `[1, p−1]`.
pub fn bezout(e: i64, p: i64) -> (i64, i64) {
    let a = (1..p).find(|a| (a * e + 1).rem_euclid(p) == 0).expect("e prime to p");
    (a, (1 + a * e) / p)
}

pub struct Uniformized {
    /// `t` as a series in `τ`.
    pub t: Series,
    /// `y` as a series in `τ`.
    pub y: Series,
    pub a: i64,
    pub b: i64,
}

/// Solve for `t(τ)` and `y(τ)` with at most `target` terms of relative
/// precision.
pub fn uniformize(z_tilde: &Series, target: i64) -> Result<Uniformized> {
    let ring = z_tilde.ring().clone();
    let p = ring.p() as i64;
    let e = -z_tilde.certified_valuation()?;
    if e <= 0 || e % p == 0 {
        return Err(Error::Hypothesis(format!("pole order {e} is not positive and prime to p")));
    }
    let (a, b) = bezout(e, p);
    let u = z_tilde.shift(e);
    let du = u.derivative();
    let k_eff = if u.is_exact() { target } else { target.min(p.saturating_mul(u.precision())) };
    if k_eff < 1 {
        return Err(Error::precision("reduced datum known to too few terms"));
    }
    let c0 = u.leading().unwrap();
    let b0 = ring.pow_c(&ring.inv_c(&c0)?, a as u64);
    let a0 = ring.pow_c(&c0, b as u64);
    let tau_p = Series::monomial(&ring, ring.one_c(), p);
    let tau_pe = Series::monomial(&ring, ring.one_c(), e * (p - 1));
    let one = Series::one(&ring);
    let mut big_a = Series::constant(&ring, a0).truncate(1);
    let mut big_b = Series::constant(&ring, b0).truncate(1);
    let mut prec = 1;
    while prec < k_eff {
        prec = (2 * prec).min(k_eff);
        let ap = big_a.assume_precision(prec);
        let bp = big_b.assume_precision(prec);
        let g = tau_p.mul(&bp);
        let comp = Composer::new(&g, prec)?;
        let ug = comp.apply(&u)?;
        let dug = comp.apply(&du)?;
        let binv = bp.inv()?;
        let b_me = binv.pow(e)?;
        let a_pow = ap.pow(a - 1)?;
        let b_pow = bp.pow(b - 1)?;
        let ab = a_pow.mul(&ap).mul(&b_pow).mul(&bp);
        let g1 = ab.sub(&one);
        let g2 = ap.frobenius().sub(&tau_pe.mul(&ap)).sub(&b_me.mul(&ug));
        let j11 = a_pow.mul(&b_pow).mul(&bp).scale_int(a);
        let j12 = a_pow.mul(&ap).mul(&b_pow).scale_int(b);
        let j21 = tau_pe.neg();
        let j22 = b_me.mul(&binv).mul(&ug).scale_int(e).sub(&b_me.mul(&tau_p).mul(&dug));
        let det_inv = j11.mul(&j22).sub(&j12.mul(&j21)).inv()?;
        let da = g1.mul(&j22).sub(&j12.mul(&g2)).mul(&det_inv);
        let db = j11.mul(&g2).sub(&j21.mul(&g1)).mul(&det_inv);
        big_a = ap.sub(&da).truncate(prec);
        big_b = bp.sub(&db).truncate(prec);
        if big_a.valuation() != Some(0) || big_b.valuation() != Some(0) {
            return Err(Error::precision("uniformizer iteration lost its leading terms"));
        }
    }
    let t = tau_p.mul(&big_b);
    let y = big_a.shift(-e);
    verify(z_tilde, &t, &y, a, b)?;
    Ok(Uniformized { t, y, a, b })
}

/// The two defining relations, checked within the known window.
fn verify(z_tilde: &Series, t: &Series, y: &Series, a: i64, b: i64) -> Result<()> {
    let ring = z_tilde.ring();
    let tau = Series::var(ring);
    let prod = y.pow(a)?.mul(&t.pow(b)?);
    if !prod.sub(&tau).is_zero() {
        return Err(Error::Consistency("y^a t^b differs from the new uniformizer".into()));
    }
    let rel = t.relative_precision().unwrap_or(EXACT);
    let zt = Composer::new(t, rel)?.apply(z_tilde)?;
    if !y.frobenius().sub(y).sub(&zt).is_zero() {
        return Err(Error::Consistency("Artin–Schreier relation fails for the new uniformizer".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::GaloisRing;

    #[test]
    fn bezout_minimal() {
        assert_eq!(bezout(3, 2), (1, 2));
        assert_eq!(bezout(1, 2), (1, 1));
        assert_eq!(bezout(2, 3), (1, 1));
        assert_eq!(bezout(7, 3), (2, 5));
        for (e, p) in [(4, 5), (9, 7), (1, 5)] {
            let (a, b) = bezout(e, p);
            assert_eq!(-a * e + b * p, 1);
        }
    }

    #[test]
    fn artin_schreier_pole_three() {
        let k = GaloisRing::prime_field(2).unwrap();
        let z = Series::from_ints(&k, &[(-3, 1)], EXACT);
        let r = uniformize(&z, 40).unwrap();
        assert_eq!(r.t.valuation(), Some(2));
        assert_eq!(r.y.valuation(), Some(-3));
        assert_eq!(r.t.precision(), 42);
    }

    #[test]
    fn pole_one_and_extension_field() {
        let k = GaloisRing::prime_field(2).unwrap();
        let z = Series::from_ints(&k, &[(-1, 1)], EXACT);
        let r = uniformize(&z, 30).unwrap();
        assert_eq!(r.y.valuation(), Some(-1));
        let k9 = GaloisRing::field(3, 2).unwrap();
        let g = k9.generator();
        let z = Series::from_terms(&k9, &[(-4, g), (-2, k9.one_c()), (1, g)], EXACT);
        let r = uniformize(&z, 50).unwrap();
        assert_eq!(r.t.valuation(), Some(3));
        assert_eq!(r.y.valuation(), Some(-4));
    }
}
