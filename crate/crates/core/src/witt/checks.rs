use super::table::{solve_ghost, table};
use crate::error::Result;
use crate::poly::{Poly, PolyRing};
use crate::ring::Ring;
use num_bigint::BigInt;
use serde::Serialize;

/// Component `n` of `F(Y) − Y` over `F_p[Y_0..Y_n]`, against two closed
/// forms: the literal `Y_n^p − Y_n + c_n(F(Y), −Y)` and the general
/// `Y_n^p + I_n(Y) + c_n(F(Y), I(Y))`. They agree for odd `p`.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentIdentity {
    pub p: u64,
    pub n: usize,
    pub lhs: String,
    pub literal_rhs: String,
    pub general_rhs: String,
    pub literal_holds: bool,
    pub holds: bool,
    #[serde(skip)]
    pub lhs_poly: Poly,
}

pub fn nth_component_identity_check(p: u64, n: usize) -> Result<ComponentIdentity> {
    let len = n + 1;
    let t = table(p, len)?;
    let ring = PolyRing::mod_p(len, p);
    let ys: Vec<Poly> = (0..len).map(|i| Poly::var(len, i)).collect();
    let fy: Vec<Poly> = ys.iter().map(|y| ring.pth_power(y, p)).collect();

    // independent route: ghost components over Z, inverted symbolically
    let targets: Vec<Poly> = (0..len)
        .map(|j| {
            let ring_z = PolyRing::integers(len);
            t.ghost(j).eval(&ring_z, &fy).sub(&t.ghost(j).eval(&ring_z, &ys))
        })
        .collect();
    let lhs = solve_ghost(p, &targets)?[n].reduce_mod(&BigInt::from(p));

    let carry_at = |x: &[Poly], y: &[Poly]| {
        let mut args = x.to_vec();
        args.extend_from_slice(y);
        t.carry(n).eval(&ring, &args)
    };
    let neg_y: Vec<Poly> = ys.iter().map(|y| ring.neg(y)).collect();
    let i_y: Vec<Poly> = (0..len).map(|j| t.neg(j).eval(&ring, &ys)).collect();
    let literal = ring.add(&ring.sub(&fy[n], &ys[n]), &carry_at(&fy, &neg_y));
    let general = ring.add(&ring.add(&fy[n], &i_y[n]), &carry_at(&fy, &i_y));
    let names: Vec<String> = (0..len).map(|i| format!("Y{i}")).collect();
    Ok(ComponentIdentity {
        p,
        n,
        lhs: lhs.fmt_with(&names),
        literal_rhs: literal.fmt_with(&names),
        general_rhs: general.fmt_with(&names),
        literal_holds: lhs == literal,
        holds: lhs == general,
        lhs_poly: lhs,
    })
}

/// Coefficient of `X_i^{p^{n-i}-1}` in `c_n`, compared with `−(Y_i + c_i)`,
/// and the bound on the remaining `X_i`-degrees.
#[derive(Clone, Debug, Serialize)]
pub struct LeadingTerm {
    pub p: u64,
    pub n: usize,
    pub i: usize,
    pub exponent: u32,
    pub coefficient: String,
    pub expected: String,
    pub matches: bool,
    pub max_other_degree: Option<u32>,
    pub degree_bound_holds: bool,
}

pub fn cn_leading_term_check(p: u64, n: usize, i: usize) -> Result<LeadingTerm> {
    assert!(i < n, "need i < n");
    let len = n + 1;
    let t = table(p, len)?;
    let two = 2 * len;
    let exponent = (p.pow((n - i) as u32) - 1) as u32;
    let cn = t.carry(n);
    let coefficient = cn.coeff_in(i, exponent);
    let expected = Poly::var(two, len + i).add(t.carry(i)).neg();
    let max_other = (0..exponent).rev().find(|&k| !cn.coeff_in(i, k).is_zero());
    let top = cn.degree_in(i).unwrap_or(0);
    let names = t.names2();
    Ok(LeadingTerm {
        p,
        n,
        i,
        exponent,
        coefficient: coefficient.fmt_with(&names),
        expected: expected.fmt_with(&names),
        matches: coefficient == expected,
        max_other_degree: max_other,
        degree_bound_holds: top <= exponent,
    })
}
