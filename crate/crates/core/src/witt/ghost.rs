//! Witt arithmetic on vectors of Laurent series over `F_q` through ghost
//! components: lift to `GR(p^len, f)`, work linearly, invert the ghost map.
//! Far cheaper than table evaluation for long series and used by the tower.

use crate::coeff::GaloisRing;
use crate::error::{Error, Result};
use crate::series::Series;

pub fn lift_ring(field: &GaloisRing, len: usize) -> Result<GaloisRing> {
    field.with_precision(len as u32)
}

/// `Φ_j(a)` for `j < a.len()`, over the ring of the entries.
pub fn ghost_components(a: &[Series]) -> Result<Vec<Series>> {
    let Some(first) = a.first() else { return Ok(vec![]) };
    let ring = first.ring().clone();
    let p = ring.p() as i64;
    let mut pows: Vec<Series> = Vec::with_capacity(a.len());
    let mut out = Vec::with_capacity(a.len());
    for (j, aj) in a.iter().enumerate() {
        for pw in pows.iter_mut() {
            *pw = pw.pow(p)?;
        }
        pows.push(aj.clone());
        let mut acc = Series::zero(&ring);
        for (h, pw) in pows.iter().enumerate() {
            acc = acc.add(&pw.scale_int(p.pow(h as u32)));
        }
        out.push(acc);
        debug_assert_eq!(out.len(), j + 1);
    }
    Ok(out)
}

/// Witt components with the given ghost components, as representatives in
/// the same ring (component `j` is only meaningful modulo `p^{m-j}`).
pub fn ghost_inverse(g: &[Series]) -> Result<Vec<Series>> {
    let Some(first) = g.first() else { return Ok(vec![]) };
    let ring = first.ring().clone();
    let p = ring.p() as i64;
    let mut w: Vec<Series> = Vec::with_capacity(g.len());
    let mut pows: Vec<Series> = Vec::with_capacity(g.len());
    for (j, gj) in g.iter().enumerate() {
        for pw in pows.iter_mut() {
            *pw = pw.pow(p)?;
        }
        let mut rest = gj.clone();
        for (h, pw) in pows.iter().enumerate() {
            rest = rest.sub(&pw.scale_int(p.pow(h as u32)));
        }
        let mut failed = None;
        let wj = rest.map_coeffs(|c| match ring.div_p_pow(c, j as u32) {
            Some(q) => q,
            None => {
                failed = Some(*c);
                *c
            }
        });
        if let Some(c) = failed {
            return Err(Error::GhostInversion(format!("component {j}: coefficient {c:?} not divisible by p^{j}")));
        }
        pows.push(wj.clone());
        w.push(wj);
    }
    Ok(w)
}

/// `Σ k_i · v_i` in `W_len` of Laurent series over the field `field`.
pub fn series_combine(field: &GaloisRing, terms: &[(i64, &[Series])]) -> Result<Vec<Series>> {
    let len = terms.first().map_or(0, |t| t.1.len());
    if terms.iter().any(|t| t.1.len() != len) {
        return Err(Error::RingMismatch("Witt vectors of different lengths".into()));
    }
    if len == 0 {
        return Ok(vec![]);
    }
    let lift = lift_ring(field, len)?;
    let mut ghost: Option<Vec<Series>> = None;
    for (k, v) in terms {
        let lifted: Vec<Series> = v.iter().map(|s| s.change_ring(&lift)).collect::<Result<_>>()?;
        let gh = ghost_components(&lifted)?;
        let gh: Vec<Series> = gh.iter().map(|s| s.scale_int(*k)).collect();
        ghost = Some(match ghost {
            None => gh,
            Some(acc) => acc.iter().zip(&gh).map(|(a, b)| a.add(b)).collect(),
        });
    }
    ghost_inverse(&ghost.unwrap())?.iter().map(|s| s.change_ring(field)).collect()
}

/// Witt vectors of Laurent series over `F_q`, via ghost components.
#[derive(Clone, Debug)]
pub struct WittSeries {
    field: GaloisRing,
}

impl WittSeries {
    pub fn new(field: &GaloisRing) -> Result<Self> {
        if !field.is_field() {
            return Err(Error::Unsupported("the ghost route needs a residue field".into()));
        }
        Ok(WittSeries { field: field.clone() })
    }

    pub fn add(&self, a: &[Series], b: &[Series]) -> Result<Vec<Series>> {
        series_combine(&self.field, &[(1, a), (1, b)])
    }

    pub fn sub(&self, a: &[Series], b: &[Series]) -> Result<Vec<Series>> {
        series_combine(&self.field, &[(1, a), (-1, b)])
    }

    pub fn neg(&self, a: &[Series]) -> Result<Vec<Series>> {
        series_combine(&self.field, &[(-1, a)])
    }

    pub fn frobenius(&self, a: &[Series]) -> Vec<Series> {
        a.iter().map(|s| s.frobenius()).collect()
    }

    /// `F(a) − a`.
    pub fn asw(&self, a: &[Series]) -> Result<Vec<Series>> {
        let fa = self.frobenius(a);
        series_combine(&self.field, &[(1, &fa), (-1, a)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{SeriesRing, EXACT};
    use crate::witt::{table, Witt, WittVector};

    #[test]
    fn ghost_route_matches_tables() {
        let k = GaloisRing::prime_field(3).unwrap();
        let a = vec![
            Series::from_ints(&k, &[(-2, 1), (0, 2), (3, 1)], 12),
            Series::from_ints(&k, &[(-1, 2), (1, 1)], 10),
            Series::from_ints(&k, &[(-4, 1)], 9),
        ];
        let b = vec![
            Series::from_ints(&k, &[(-1, 2), (2, 2)], 11),
            Series::from_ints(&k, &[(-5, 1), (0, 1)], 8),
            Series::from_ints(&k, &[(0, 1)], EXACT),
        ];
        let ws = WittSeries::new(&k).unwrap();
        let w = Witt::new(SeriesRing::new(&k), table(3, 3).unwrap());
        let (va, vb) = (WittVector::new(a.clone()), WittVector::new(b.clone()));
        let fast = ws.add(&a, &b).unwrap();
        let slow = w.add(&va, &vb).unwrap();
        for (x, y) in fast.iter().zip(&slow.comps) {
            assert!(x.agrees_with(y), "{x} vs {y}");
            assert_eq!(x.precision(), y.precision());
        }
        let fast = ws.asw(&a).unwrap();
        let slow = w.asw(&va).unwrap();
        for (x, y) in fast.iter().zip(&slow.comps) {
            assert!(x.agrees_with(y));
        }
    }

    #[test]
    fn char_two_negation() {
        let k = GaloisRing::prime_field(2).unwrap();
        let y = vec![Series::from_ints(&k, &[(-3, 1)], EXACT), Series::zero(&k)];
        let ws = WittSeries::new(&k).unwrap();
        let n = ws.neg(&y).unwrap();
        assert_eq!(n[0], y[0]);
        assert_eq!(n[1], Series::from_ints(&k, &[(-6, 1)], EXACT));
    }
}
