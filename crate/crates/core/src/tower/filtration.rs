use crate::error::{Error, Result};
use num_rational::Ratio;
use serde::Serialize;

/// Lower-numbering filtration of a cyclic group of order `p^level`, from the
/// values `i(g) = v(σ_g(t) − t)` of its non-identity elements.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamificationFiltration {
    pub p: u64,
    pub level: usize,
    /// `(g, i(g))` for `g = 1 .. p^level − 1`.
    pub values: Vec<(u64, i64)>,
    /// Maximal index ranges `[a, b]` on which `|G_i|` is constant.
    pub segments: Vec<Segment>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub from: i64,
    pub to: i64,
    pub order: u64,
}

impl RamificationFiltration {
    pub fn from_values(p: u64, level: usize, values: Vec<(u64, i64)>) -> Result<Self> {
        let order = p.pow(level as u32);
        if values.len() as u64 != order - 1 {
            return Err(Error::Consistency(format!("{} values for a group of order {order}", values.len())));
        }
        if let Some(&(g, v)) = values.iter().find(|(_, v)| *v < 1) {
            return Err(Error::NonTotallyRamified(format!("i({g}) = {v} < 1")));
        }
        let mut breaks: Vec<i64> = values.iter().map(|(_, v)| v - 1).collect();
        breaks.sort_unstable();
        breaks.dedup();
        let mut segments = Vec::new();
        let mut from = 0;
        for &b in &breaks {
            let ord = 1 + values.iter().filter(|(_, v)| *v >= b + 1).count() as u64;
            segments.push(Segment { from, to: b, order: ord });
            from = b + 1;
        }
        let f = RamificationFiltration { p, level, values, segments };
        f.check_subgroups()?;
        Ok(f)
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.level as u32)
    }

    /// `|G_i|`.
    pub fn group_order(&self, i: i64) -> u64 {
        1 + self.values.iter().filter(|(_, v)| *v >= i + 1).count() as u64
    }

    /// Lower breaks, increasing.
    pub fn lower_breaks(&self) -> Vec<i64> {
        self.segments.iter().map(|s| s.to).collect()
    }

    /// The last index with a nontrivial group.
    pub fn last_break(&self) -> i64 {
        self.segments.last().map_or(-1, |s| s.to)
    }

    /// `Σ_{i≥0} (|G_i| − 1)`.
    pub fn different(&self) -> i64 {
        self.segments.iter().map(|s| (s.to - s.from + 1) * (s.order as i64 - 1)).sum()
    }

    /// `Σ_{g≠1} i(g)`, which must equal [`Self::different`].
    pub fn different_by_elements(&self) -> i64 {
        self.values.iter().map(|(_, v)| v).sum()
    }

    /// Herbrand `φ(u) = ∫_0^u dt / (G_0 : G_t)` at a rational point.
    pub fn phi(&self, u: Ratio<i64>) -> Ratio<i64> {
        let g0 = self.group_order(0) as i64;
        let mut acc = Ratio::from_integer(0);
        let mut k = 1i64;
        while Ratio::from_integer(k - 1) < u {
            let left = Ratio::from_integer(k - 1);
            let right = Ratio::from_integer(k).min(u);
            acc += (right - left) * Ratio::new(self.group_order(k) as i64, g0);
            k += 1;
        }
        acc
    }

    /// Upper breaks `φ(b)` for every lower break `b`.
    pub fn upper_breaks(&self) -> Vec<Ratio<i64>> {
        self.lower_breaks().into_iter().map(|b| self.phi(Ratio::from_integer(b))).collect()
    }

    /// `m = φ(e)` for the last break `e`; errors if some upper break is not
    /// an integer.
    pub fn conductor_exponent(&self) -> Result<i64> {
        let ups = self.upper_breaks();
        for (b, u) in self.lower_breaks().iter().zip(&ups) {
            if !u.is_integer() {
                return Err(Error::HasseArf(format!("lower break {b} has upper break {u}")));
            }
        }
        Ok(ups.last().map_or(0, |u| u.to_integer()))
    }

    pub fn conductor(&self) -> Result<i64> {
        Ok(self.conductor_exponent()? + 1)
    }

    /// Each `G_i` must be the subgroup `p^k Z / p^level`: `i(g)` depends only
    /// on `v_p(g)` and grows with it.
    fn check_subgroups(&self) -> Result<()> {
        let vp = |mut g: u64| {
            let mut k = 0;
            while g % self.p == 0 {
                g /= self.p;
                k += 1;
            }
            k
        };
        let mut by_k: Vec<Option<i64>> = vec![None; self.level];
        for &(g, v) in &self.values {
            let k = vp(g);
            match by_k[k] {
                None => by_k[k] = Some(v),
                Some(w) if w != v => {
                    return Err(Error::Consistency(format!("i({g}) = {v} but another element of valuation {k} has {w}")))
                }
                _ => {}
            }
        }
        let known: Vec<i64> = by_k.into_iter().flatten().collect();
        if known.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Consistency("ramification groups are not nested subgroups".into()));
        }
        Ok(())
    }
}
