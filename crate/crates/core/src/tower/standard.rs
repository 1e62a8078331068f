use crate::error::{Error, Result};
use crate::series::Series;

/// Reduce `z` modulo `℘(h) = h^p − h` until its pole order is prime to `p`:
/// returns `(z̃, h)` with `z = z̃ + h^p − h`.
pub fn standard_form_reduce(z: &Series) -> Result<(Series, Series)> {
    let ring = z.ring().clone();
    let p = ring.p() as i64;
    let mut zt = z.clone();
    let mut h = Series::zero(&ring);
    loop {
        if zt.is_exact_zero() {
            return Err(Error::NonTotallyRamified("datum reduces to zero".into()));
        }
        let v = zt.certified_valuation()?;
        if v >= 0 {
            return Err(Error::NonTotallyRamified(format!("reduced datum has valuation {v} ≥ 0")));
        }
        if v % p != 0 {
            return Ok((zt, h));
        }
        let c = ring.pth_root(&zt.leading().unwrap())?;
        let term = Series::monomial(&ring, c, v / p);
        zt = zt.sub(&term.frobenius()).add(&term);
        h = h.add(&term);
    }
}

/// `h^p − h`.
pub fn wp(h: &Series) -> Series {
    h.frobenius().sub(h)
}
