//! Datum documents and the batch grid shared by the command-line tool and
//! the acceptance tests.

use crate::coeff::{Coeff, GaloisRing};
use crate::conductor::{section_degree_oracle, theorem_conductor};
use crate::error::{Error, Result};
use crate::series::{Series, EXACT};
use crate::tower::{default_budget, CoverDatum, Tower, TowerReport};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// A coefficient: an integer, or coordinates over the power basis of `F_q`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum CoeffLit {
    Int(i64),
    Coords(Vec<i64>),
}

/// JSON datum document. Either `nu` (monomials `s^{−ν_i}`) or `u` (each
/// series a list of `[exponent, coefficient]` pairs) must be present.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumDoc {
    pub p: u64,
    pub n: Option<usize>,
    pub nu: Option<Vec<i64>>,
    pub u: Option<Vec<Vec<(i64, CoeffLit)>>>,
    /// Degree `f` of `F_q = F_{p^f}`.
    #[serde(default = "one")]
    pub field_degree: usize,
    pub precision: Option<i64>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug)]
pub struct ParsedDatum {
    pub datum: CoverDatum,
    pub precision: Option<i64>,
}

fn coeff(field: &GaloisRing, c: &CoeffLit) -> Result<Coeff> {
    match c {
        CoeffLit::Int(k) => Ok(field.scalar(*k)),
        CoeffLit::Coords(v) if v.len() <= field.degree() => Ok(field.elem(v)),
        CoeffLit::Coords(v) => Err(Error::Parse(format!("{} coordinates over a degree-{} field", v.len(), field.degree()))),
    }
}

impl DatumDoc {
    pub fn into_datum(self) -> Result<ParsedDatum> {
        let field = GaloisRing::field(self.p, self.field_degree).map_err(|e| match e {
            Error::Unsupported(m) => Error::Hypothesis(m),
            other => other,
        })?;
        let u: Vec<Series> = match (&self.nu, &self.u) {
            (Some(nu), None) => nu.iter().map(|&v| Series::monomial(&field, field.one_c(), -v)).collect(),
            (None, Some(u)) => u
                .iter()
                .map(|terms| {
                    let t: Vec<(i64, Coeff)> =
                        terms.iter().map(|(k, c)| Ok((*k, coeff(&field, c)?))).collect::<Result<_>>()?;
                    Ok(Series::from_terms(&field, &t, EXACT))
                })
                .collect::<Result<_>>()?,
            _ => return Err(Error::Parse("exactly one of `nu` and `u` is required".into())),
        };
        if let Some(n) = self.n {
            if n != u.len() {
                return Err(Error::Parse(format!("n = {n} but {} components given", u.len())));
            }
        }
        if u.is_empty() {
            return Err(Error::Parse("n must be at least 1".into()));
        }
        Ok(ParsedDatum { datum: CoverDatum::new(&field, u)?, precision: self.precision })
    }
}

pub fn parse_datum_str(text: &str) -> Result<ParsedDatum> {
    let doc: DatumDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.into_datum()
}

pub fn parse_datum(path: &std::path::Path) -> Result<ParsedDatum> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_datum_str(&text)
}

/// Comma-separated integers.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("bad list entry `{x}`"))))
        .collect()
}

/// All `ν ∈ {1..nu_max}^n` with every entry prime to `p`, lexicographic.
pub fn admissible_nus(p: u64, n: usize, nu_max: i64) -> Vec<Vec<i64>> {
    let vals: Vec<i64> = (1..=nu_max).filter(|v| v % p as i64 != 0).collect();
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |&v| {
                    let mut x = prefix.clone();
                    x.push(v);
                    x
                })
            })
            .collect();
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GridCase {
    pub p: u64,
    pub nu: Vec<i64>,
    pub formula: i64,
    pub oracle: i64,
    pub tower: Option<i64>,
    pub checks_hold: bool,
    pub failures: Vec<String>,
    pub upper_breaks_integral: bool,
    pub budget: i64,
    pub fingerprint: Vec<i64>,
    pub error: Option<String>,
    pub millis: u128,
}

impl GridCase {
    pub fn agrees(&self) -> bool {
        self.error.is_none()
            && self.formula == self.oracle
            && self.tower.map_or(true, |t| t == self.formula)
            && self.checks_hold
            && self.upper_breaks_integral
    }
}

/// Formula, lattice oracle and (optionally) the full tower report for one
/// datum; `budget_scale` multiplies the default window budget.
pub fn run_case(p: u64, nu: &[i64], with_tower: bool, budget_scale: i64) -> GridCase {
    let start = Instant::now();
    let mut case = GridCase {
        p,
        nu: nu.to_vec(),
        formula: 0,
        oracle: 0,
        tower: None,
        checks_hold: true,
        failures: vec![],
        upper_breaks_integral: true,
        budget: 0,
        fingerprint: vec![],
        error: None,
        millis: 0,
    };
    let outcome = (|| -> Result<Option<TowerReport>> {
        case.formula = theorem_conductor(p, nu)?.conductor;
        case.oracle = section_degree_oracle(p, nu)?.value + 1;
        if !with_tower {
            return Ok(None);
        }
        let datum = CoverDatum::monomial(p, nu)?;
        Tower::analyze(&datum, Some(default_budget(&datum) * budget_scale)).map(Some)
    })();
    match outcome {
        Ok(Some(r)) => {
            case.tower = Some(r.conductor);
            case.checks_hold = r.all_hold();
            case.failures = r.failures().iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
            case.upper_breaks_integral = r.levels.iter().all(|l| l.filtration.upper_breaks().iter().all(|u| u.is_integer()));
            case.budget = r.budget;
            case.fingerprint = r.fingerprint();
        }
        Ok(None) => {}
        Err(e) => {
            case.upper_breaks_integral = !matches!(e, Error::HasseArf(_));
            case.error = Some(format!("{}: {e}", e.code()));
        }
    }
    case.millis = start.elapsed().as_millis();
    case
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSummary {
    pub cases: Vec<GridCase>,
    pub agreeing: usize,
}

impl GridSummary {
    pub fn all_agree(&self) -> bool {
        self.agreeing == self.cases.len()
    }
}

pub fn run_grid(ps: &[u64], ns: &[usize], nu_max: i64, with_tower: bool, budget_scale: i64) -> GridSummary {
    let mut cases = vec![];
    for &p in ps {
        for &n in ns {
            for nu in admissible_nus(p, n, nu_max) {
                cases.push(run_case(p, &nu, with_tower, budget_scale));
            }
        }
    }
    let agreeing = cases.iter().filter(|c| c.agrees()).count();
    GridSummary { cases, agreeing }
}
