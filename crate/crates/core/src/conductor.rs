//! Closed-form conductor and the exhaustive lattice problems behind it.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConductorFormula {
    /// `M = max_i p^{n−1−i} ν_i`.
    pub m: i64,
    pub conductor: i64,
    /// Indices attaining the maximum.
    pub argmax: Vec<usize>,
    pub unique: bool,
}

fn check_hypotheses(p: u64, nu: &[i64]) -> Result<()> {
    if !crate::coeff::is_prime(p) {
        return Err(Error::Hypothesis(format!("{p} is not prime")));
    }
    if nu.is_empty() {
        return Err(Error::Hypothesis("empty pole-order list".into()));
    }
    for (i, &v) in nu.iter().enumerate() {
        if v <= 0 || v % p as i64 == 0 {
            return Err(Error::Hypothesis(format!("ν_{i} = {v} must be positive and prime to {p}")));
        }
    }
    Ok(())
}

pub fn theorem_conductor(p: u64, nu: &[i64]) -> Result<ConductorFormula> {
    check_hypotheses(p, nu)?;
    let m = theorem_conductor_unchecked(p, nu);
    let n = nu.len();
    let argmax: Vec<usize> =
        (0..n).filter(|&i| (p as i64).pow((n - 1 - i) as u32) * nu[i] == m).collect();
    Ok(ConductorFormula { m, conductor: m + 1, unique: argmax.len() == 1, argmax })
}

pub(crate) fn theorem_conductor_unchecked(p: u64, nu: &[i64]) -> i64 {
    let n = nu.len();
    (0..n).map(|i| (p as i64).pow((n - 1 - i) as u32) * nu[i]).max().unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Min,
    Max,
}

/// Optimize `c·x` subject to `a·x = rhs` and `lo ≤ x ≤ hi`, over integers.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeProblem {
    pub objective: Vec<i64>,
    pub constraint: Vec<i64>,
    pub rhs: i64,
    pub bounds: Vec<(i64, i64)>,
    pub sense: Sense,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeOptimum {
    pub value: i64,
    pub argopt: Vec<Vec<i64>>,
    pub feasible_points: u64,
}

/// Exhaustive enumeration with pruning on the reachable constraint range.
pub fn lp_optimize(prob: &LatticeProblem) -> Result<LatticeOptimum> {
    let d = prob.objective.len();
    if prob.constraint.len() != d || prob.bounds.len() != d {
        return Err(Error::Parse("lattice problem dimensions disagree".into()));
    }
    if prob.bounds.iter().any(|(lo, hi)| lo > hi) {
        return Err(Error::Infeasible);
    }
    // reachable range of the constraint over coordinates k..d
    let mut reach = vec![(0i64, 0i64); d + 1];
    for k in (0..d).rev() {
        let (lo, hi) = prob.bounds[k];
        let c = prob.constraint[k];
        let (a, b) = (c * lo, c * hi);
        reach[k] = (reach[k + 1].0 + a.min(b), reach[k + 1].1 + a.max(b));
    }
    let mut best: Option<LatticeOptimum> = None;
    let mut x = vec![0i64; d];
    let mut count = 0u64;
    fn rec(
        k: usize,
        partial: i64,
        value: i64,
        x: &mut Vec<i64>,
        prob: &LatticeProblem,
        reach: &[(i64, i64)],
        best: &mut Option<LatticeOptimum>,
        count: &mut u64,
    ) {
        let need = prob.rhs - partial;
        if need < reach[k].0 || need > reach[k].1 {
            return;
        }
        if k == x.len() {
            *count += 1;
            match best {
                None => *best = Some(LatticeOptimum { value, argopt: vec![x.clone()], feasible_points: 0 }),
                Some(b) => {
                    let better = match prob.sense {
                        Sense::Min => value < b.value,
                        Sense::Max => value > b.value,
                    };
                    if better {
                        *b = LatticeOptimum { value, argopt: vec![x.clone()], feasible_points: 0 };
                    } else if value == b.value {
                        b.argopt.push(x.clone());
                    }
                }
            }
            return;
        }
        let (lo, hi) = prob.bounds[k];
        for v in lo..=hi {
            x[k] = v;
            rec(k + 1, partial + prob.constraint[k] * v, value + prob.objective[k] * v, x, prob, reach, best, count);
        }
        x[k] = 0;
    }
    rec(0, 0, 0, &mut x, prob, &reach, &mut best, &mut count);
    let mut best = best.ok_or(Error::Infeasible)?;
    best.feasible_points = count;
    Ok(best)
}

pub fn lp_minimize(prob: &LatticeProblem) -> Result<LatticeOptimum> {
    lp_optimize(&LatticeProblem { sense: Sense::Min, ..prob.clone() })
}

/// `max Σ i_h ν_h` over `0 ≤ i_h ≤ p^{n−1−h}`, `Σ p^h i_h = p^{n−1}`.
pub fn section_degree_oracle(p: u64, nu: &[i64]) -> Result<LatticeOptimum> {
    check_hypotheses(p, nu)?;
    let n = nu.len();
    let p = p as i64;
    let prob = LatticeProblem {
        objective: nu.to_vec(),
        constraint: (0..n).map(|h| p.pow(h as u32)).collect(),
        rhs: p.pow(n as u32 - 1),
        bounds: (0..n).map(|h| (0, p.pow((n - 1 - h) as u32))).collect(),
        sense: Sense::Max,
    };
    lp_optimize(&prob)
}

/// First formulation: variables `(a_0, b_0, a_1, b_1, …)`, minimize
/// `Σ w_i (p a_i + b_i)` under `Σ p^i (a_i + b_i) = p^n`.
pub fn lp1(p: u64, w: &[i64]) -> LatticeProblem {
    let n = w.len() as u32;
    let p = p as i64;
    let mut objective = vec![];
    let mut constraint = vec![];
    let mut bounds = vec![];
    for (i, &wi) in w.iter().enumerate() {
        let i = i as u32;
        objective.extend([wi * p, wi]);
        constraint.extend([p.pow(i), p.pow(i)]);
        bounds.extend([(0, p.pow(n - i) - 1), (0, p.pow(n - i))]);
    }
    LatticeProblem { objective, constraint, rhs: p.pow(n), bounds, sense: Sense::Min }
}

/// Second formulation: variables `(α_0, b_0, α_1, b_1, …)`, minimize
/// `Σ w_i α_i` under `Σ p^i α_i + Σ (p^{i+1} − p^i) b_i = p^{n+1}`.
pub fn lp2(p: u64, w: &[i64]) -> LatticeProblem {
    let n = w.len() as u32;
    let p = p as i64;
    let mut objective = vec![];
    let mut constraint = vec![];
    let mut bounds = vec![];
    for (i, &wi) in w.iter().enumerate() {
        let i = i as u32;
        objective.extend([wi, 0]);
        constraint.extend([p.pow(i), p.pow(i + 1) - p.pow(i)]);
        bounds.extend([(0, p.pow(n - i + 1) - p + 1), (0, p.pow(n - i))]);
    }
    LatticeProblem { objective, constraint, rhs: p.pow(n + 1), bounds, sense: Sense::Min }
}

/// The vertex bound `min_i (p^{n−i+1} − p + 1) w_i`.
pub fn lp_vertex_bound(p: u64, w: &[i64]) -> i64 {
    let n = w.len() as u32;
    let p = p as i64;
    w.iter().enumerate().map(|(i, &wi)| (p.pow(n - i as u32 + 1) - p + 1) * wi).min().unwrap_or(0)
}

/// Valuation bounds on a built tower: at every level `k`,
/// `v_k(c_k(y^p, −y)) ≥ −(p^{k+1} − p + 1) m_k` and
/// `v_{k+1}(y_k) ≥ −p^k m_{k+1}`, with equality iff `ν_k = m_{k+1}`.
#[derive(Clone, Debug, Serialize)]
pub struct SortBound {
    pub level: usize,
    pub carry_valuation: Option<i64>,
    pub carry_bound: i64,
    pub y_valuation: i64,
    pub y_bound: i64,
    pub equality_expected: bool,
    pub holds: bool,
}

pub fn sort_bound_check(tower: &crate::tower::Tower) -> Result<Vec<SortBound>> {
    let p = tower.p() as i64;
    let nu = &tower.datum.nu;
    let mut out = vec![];
    for k in 0..tower.n() {
        let m_k = if k == 0 { 0 } else { theorem_conductor_unchecked(p as u64, &nu[..k]) };
        let m_k1 = theorem_conductor_unchecked(p as u64, &nu[..=k]);
        let carry = &tower.steps[k].carry;
        let carry_valuation = if carry.is_exact_zero() { None } else { Some(carry.certified_valuation()?) };
        let carry_bound = -(p.pow(k as u32 + 1) - p + 1) * m_k;
        let y_valuation = tower.stages[k + 1].y[k].certified_valuation()?;
        let y_bound = -p.pow(k as u32) * m_k1;
        let equality_expected = nu[k] == m_k1;
        let holds = carry_valuation.map_or(true, |v| v >= carry_bound)
            && y_valuation >= y_bound
            && (y_valuation == y_bound) == equality_expected;
        out.push(SortBound { level: k, carry_valuation, carry_bound, y_valuation, y_bound, equality_expected, holds });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        assert_eq!(theorem_conductor(2, &[3, 1]).unwrap().m, 6);
        assert_eq!(theorem_conductor(2, &[3, 1]).unwrap().conductor, 7);
        assert_eq!(theorem_conductor(5, &[7]).unwrap().m, 7);
        assert_eq!(theorem_conductor(3, &[2, 1, 25]).unwrap().m, 25);
        assert!(theorem_conductor(2, &[4]).is_err());
    }

    #[test]
    fn oracle_examples() {
        let r = section_degree_oracle(2, &[3, 1]).unwrap();
        assert_eq!(r.value, 6);
        assert_eq!(r.feasible_points, 2);
        assert_eq!(section_degree_oracle(2, &[1, 5]).unwrap().value, 5);
        assert_eq!(section_degree_oracle(3, &[4]).unwrap().value, 4);
    }

    #[test]
    fn lp_examples() {
        let r = lp_minimize(&lp2(2, &[-3])).unwrap();
        assert_eq!(r.value, -9);
        assert_eq!(r.argopt, vec![vec![3, 1]]);
        assert_eq!(lp_minimize(&lp1(2, &[-3])).unwrap().value, -9);
        let trivial = LatticeProblem {
            objective: vec![5, -2],
            constraint: vec![1, 1],
            rhs: 0,
            bounds: vec![(0, 0), (0, 0)],
            sense: Sense::Min,
        };
        assert_eq!(lp_minimize(&trivial).unwrap().value, 0);
        let infeasible = LatticeProblem { rhs: 1, ..trivial };
        assert_eq!(lp_minimize(&infeasible), Err(Error::Infeasible));
    }
}
