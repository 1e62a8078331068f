//! Cyclic Artin–Schreier–Witt towers `C_n → … → C_1 → D = Spec k[[s]]`
//! defined by `F(y) − y = u`, and their ramification computed from the
//! Galois action on an explicit uniformizer of each level.

mod filtration;
mod invariants;
mod standard;
mod uniformizer;

pub use filtration::{RamificationFiltration, Segment};
pub use invariants::{adjust_decompose, AdjustReport, Check, LevelInvariants, TowerReport};
pub use standard::{standard_form_reduce, wp};
pub use uniformizer::{bezout, uniformize, Uniformized};

use crate::coeff::GaloisRing;
use crate::error::{Error, Result};
use crate::series::{Composer, Series};
use crate::witt::{ghost_components, ghost_inverse, lift_ring, series_combine, table, Witt, WittSeries};

/// `F(Y) − Y = u` over `k((s))`.
#[derive(Clone, Debug)]
pub struct CoverDatum {
    pub p: u64,
    pub field: GaloisRing,
    pub u: Vec<Series>,
    pub nu: Vec<i64>,
}

impl CoverDatum {
    /// Validate pole orders: every `ν_i = −v(u_i)` positive and prime to `p`.
    pub fn new(field: &GaloisRing, u: Vec<Series>) -> Result<Self> {
        if !field.is_field() {
            return Err(Error::Unsupported("base coefficients must form a field".into()));
        }
        if u.is_empty() {
            return Err(Error::Hypothesis("empty datum".into()));
        }
        let p = field.p();
        let mut nu = Vec::with_capacity(u.len());
        for (i, ui) in u.iter().enumerate() {
            if ui.ring() != field {
                return Err(Error::RingMismatch(format!("u_{i} over {:?}", ui.ring())));
            }
            let v = ui.certified_valuation()?;
            if v >= 0 {
                return Err(Error::Hypothesis(format!("u_{i} has no pole (valuation {v})")));
            }
            if (-v) % p as i64 == 0 {
                return Err(Error::Hypothesis(format!("pole order ν_{i} = {} is divisible by p = {p}", -v)));
            }
            nu.push(-v);
        }
        Ok(CoverDatum { p, field: field.clone(), u, nu })
    }

    /// `u_i = s^{−ν_i}` over `F_p`.
    pub fn monomial(p: u64, nu: &[i64]) -> Result<Self> {
        let k = GaloisRing::prime_field(p)?;
        let u = nu.iter().map(|&v| Series::monomial(&k, k.one_c(), -v)).collect();
        Self::new(&k, u)
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// Leading sub-datum `(u_0, …, u_{len-1})`.
    pub fn truncated(&self, len: usize) -> CoverDatum {
        CoverDatum { p: self.p, field: self.field.clone(), u: self.u[..len].to_vec(), nu: self.nu[..len].to_vec() }
    }
}

/// The step from level `i` to `i + 1`, expressed in `t_i`.
#[derive(Clone, Debug)]
pub struct Step {
    pub level: usize,
    /// `u_i(s(t_i))`.
    pub u_pulled: Series,
    /// `component_i(F(y') − y')` with `y' = (y_0, …, y_{i−1}, 0)`.
    pub correction: Series,
    /// `c_i(y^p, −y)` evaluated entry-wise.
    pub carry: Series,
    pub z: Series,
    pub z_tilde: Series,
    /// Exact Laurent polynomial in `t_i` with `z = z̃ + h^p − h`.
    pub h: Series,
    /// Pole order of `z̃`, the break of this degree-`p` step.
    pub break_e: i64,
    pub a: i64,
    pub b: i64,
}

/// Everything known at level `i`, as series in the uniformizer `t_i`.
#[derive(Clone, Debug)]
pub struct Stage {
    pub level: usize,
    pub s: Series,
    /// True solutions `y_j`, `j < level`.
    pub y: Vec<Series>,
    /// Adjusted solutions `ỹ_j = y_j − h_j(t_j)`.
    pub y_tilde: Vec<Series>,
    /// `t_j` for `j ≤ level` (the last one is the variable).
    pub t: Vec<Series>,
}

#[derive(Clone, Debug)]
pub struct Tower {
    pub datum: CoverDatum,
    pub budget: i64,
    pub stages: Vec<Stage>,
    pub steps: Vec<Step>,
}

/// Window budget covering the top different, with `e` and `μ` estimated
/// from the closed formulas.
pub fn default_budget(datum: &CoverDatum) -> i64 {
    let p = datum.p as i64;
    let n = datum.n();
    let mut m_prev = 0;
    let mut e = 0;
    for i in 1..=n {
        let m = crate::conductor::theorem_conductor_unchecked(datum.p, &datum.nu[..i]);
        e += p.pow(i as u32 - 1) * (m - m_prev);
        m_prev = m;
    }
    let pn = p.pow(n as u32);
    let mu = pn * m_prev - e;
    (mu + 2 * e + 2 * pn).max(4 * (e + pn))
}

const MAX_RETRIES: usize = 3;

impl Tower {
    /// Build with the given window budget, doubling it on precision failures
    /// (at most three times).
    pub fn build(datum: &CoverDatum, budget: Option<i64>) -> Result<Tower> {
        let mut w = budget.unwrap_or_else(|| default_budget(datum));
        let mut last = None;
        for _ in 0..=MAX_RETRIES {
            match Self::build_exact_budget(datum, w) {
                Err(Error::InsufficientPrecision(m)) => {
                    last = Some(m);
                    w *= 2;
                }
                other => return other,
            }
        }
        Err(Error::InsufficientPrecision(last.unwrap_or_default()))
    }

    /// Build without retrying.
    pub fn build_exact_budget(datum: &CoverDatum, w: i64) -> Result<Tower> {
        let k = &datum.field;
        let s = Series::var(k);
        let mut stages = vec![Stage { level: 0, s: s.clone(), y: vec![], y_tilde: vec![], t: vec![s] }];
        let mut steps = Vec::new();
        for i in 0..datum.n() {
            let (step, next) = extend(&stages[i], datum, w)?;
            steps.push(step);
            stages.push(next);
        }
        Ok(Tower { datum: datum.clone(), budget: w, stages, steps })
    }

    pub fn p(&self) -> u64 {
        self.datum.p
    }

    pub fn n(&self) -> usize {
        self.datum.n()
    }

    pub fn top(&self) -> &Stage {
        self.stages.last().unwrap()
    }

    /// Conjugation data for level `level`.
    pub fn conjugator(&self, level: usize) -> Result<Conjugator<'_>> {
        Conjugator::new(self, level)
    }

    /// `σ_g(t_n)` as a series in `t_n`.
    pub fn galois_conjugate(&self, g: u64) -> Result<Series> {
        self.conjugator(self.n())?.conjugate(g)
    }

    /// Lower-numbering filtration of `C_level / D`.
    pub fn filtration(&self, level: usize) -> Result<RamificationFiltration> {
        let conj = self.conjugator(level)?;
        let p = self.p();
        let order = p.pow(level as u32);
        let vp = |mut g: u64| {
            let mut k = 0u32;
            while g % p == 0 {
                g /= p;
                k += 1;
            }
            k
        };
        let mut values = Vec::with_capacity(order as usize - 1);
        if order <= FULL_SWEEP_LIMIT {
            for g in 1..order {
                values.push((g, conj.ramification_index(g)?));
            }
        } else {
            // i(g) only depends on the subgroup generated by g
            let reps: Vec<i64> =
                (0..level as u32).map(|k| conj.ramification_index(p.pow(k))).collect::<Result<_>>()?;
            for g in 1..order {
                values.push((g, reps[vp(g) as usize]));
            }
        }
        RamificationFiltration::from_values(p, level, values)
    }
}

/// Groups up to this order are swept element by element; larger ones use
/// one representative per subgroup.
pub const FULL_SWEEP_LIMIT: u64 = 27;

fn extend(stage: &Stage, datum: &CoverDatum, w: i64) -> Result<(Step, Stage)> {
    let i = stage.level;
    let k = &datum.field;
    let p = datum.p as i64;
    let s_comp = Composer::new(&stage.s, w)?.with_inverse()?;
    let u_pulled = s_comp.apply(&datum.u[i])?.truncate_rel(w);

    let (correction, carry) = if i == 0 {
        (Series::zero(k), Series::zero(k))
    } else {
        let mut yp = stage.y.clone();
        yp.push(Series::zero(k));
        let ws = WittSeries::new(k)?;
        let correction = ws.asw(&yp)?[i].clone();
        let fy = ws.frobenius(&yp);
        let negy: Vec<Series> = yp.iter().map(|s| s.neg()).collect();
        let carry = series_combine(k, &[(1, &fy), (1, &negy)])?[i].clone();
        (correction, carry)
    };
    let z = u_pulled.sub(&correction);
    let (z_tilde, h) = standard_form_reduce(&z)?;
    let e = -z_tilde.certified_valuation()?;

    let un = uniformize(&z_tilde, w)?;
    let comp = Composer::new(&un.t, w)?.with_inverse()?;
    let re = |x: &Series| -> Result<Series> { Ok(comp.apply(x)?.truncate_rel(w)) };
    let s = re(&stage.s)?;
    let mut y: Vec<Series> = stage.y.iter().map(&re).collect::<Result<_>>()?;
    let mut y_tilde: Vec<Series> = stage.y_tilde.iter().map(&re).collect::<Result<_>>()?;
    let mut t: Vec<Series> = stage.t[..i].iter().map(&re).collect::<Result<_>>()?;
    t.push(un.t.clone());
    t.push(Series::var(k));
    let h_new = if h.is_exact_zero() { Series::zero(k) } else { re(&h)? };
    y.push(un.y.add(&h_new).truncate_rel(w));
    y_tilde.push(un.y.clone());
    if s.valuation() != Some(p.pow(i as u32 + 1)) {
        return Err(Error::Consistency(format!("v(s) at level {} is {:?}", i + 1, s.valuation())));
    }
    let step = Step { level: i, u_pulled, correction, carry, z, z_tilde, h, break_e: e, a: un.a, b: un.b };
    Ok((step, Stage { level: i + 1, s, y, y_tilde, t }))
}

/// Galois action on the uniformizer of one level: `y ↦ y + [g]`, then the
/// uniformizer is rebuilt from the conjugated solutions.
pub struct Conjugator<'a> {
    tower: &'a Tower,
    level: usize,
    ghost_y: Vec<Series>,
}

impl<'a> Conjugator<'a> {
    fn new(tower: &'a Tower, level: usize) -> Result<Self> {
        if level == 0 || level > tower.n() {
            return Err(Error::Hypothesis(format!("level {level} outside 1..={}", tower.n())));
        }
        let stage = &tower.stages[level];
        let lift = lift_ring(&tower.datum.field, level)?;
        let lifted: Vec<Series> = stage.y.iter().map(|s| s.change_ring(&lift)).collect::<Result<_>>()?;
        Ok(Conjugator { tower, level, ghost_y: ghost_components(&lifted)? })
    }

    /// `σ_g(y)` for `y = (y_0, …, y_{level−1})`.
    pub fn conjugate_solutions(&self, g: u64) -> Result<Vec<Series>> {
        let k = &self.tower.datum.field;
        let lift = self.ghost_y[0].ring().clone();
        // ghost components of the integer g are all equal to g
        let gc = lift.scalar(g as i64);
        let shifted: Vec<Series> =
            self.ghost_y.iter().map(|s| s.add(&Series::constant(&lift, gc))).collect();
        ghost_inverse(&shifted)?.iter().map(|s| s.change_ring(k)).collect()
    }

    /// `σ_g(t_level)` as a series in `t_level`.
    pub fn conjugate(&self, g: u64) -> Result<Series> {
        let stage = &self.tower.stages[self.level];
        if g % self.tower.p().pow(self.level as u32) == 0 {
            return Ok(stage.t[self.level].clone());
        }
        let sy = self.conjugate_solutions(g)?;
        let mut st = stage.s.clone();
        for j in 0..self.level {
            let step = &self.tower.steps[j];
            let hj = if step.h.is_exact_zero() {
                Series::zero(&self.tower.datum.field)
            } else {
                step.h.compose(&st)?
            };
            let yt = sy[j].sub(&hj);
            st = yt.pow(step.a)?.mul(&st.pow(step.b)?);
        }
        Ok(st)
    }

    /// `i(g) = v(σ_g(t) − t)`.
    pub fn ramification_index(&self, g: u64) -> Result<i64> {
        let stage = &self.tower.stages[self.level];
        let d = self.conjugate(g)?.sub(&stage.t[self.level]);
        if d.is_exact_zero() {
            return Err(Error::Consistency(format!("σ_{g} fixes the uniformizer")));
        }
        d.certified_valuation()
    }
}

/// The Witt vector of the integer `g` in `W_len(F_p)`, for display.
pub fn witt_integer(p: u64, len: usize, g: u64) -> Result<Vec<u64>> {
    let k = GaloisRing::prime_field(p)?;
    let w = Witt::new(k.clone(), table(p, len)?);
    Ok(w.integer(g, len)?.comps.iter().map(|c| k.as_int(c)).collect())
}
