use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use wittram::cli::{parse_datum, parse_list, run_grid, ParsedDatum};
use wittram::coeff::GaloisRing;
use wittram::conductor::{lp1, lp2, lp_minimize, lp_vertex_bound, section_degree_oracle, theorem_conductor};
use wittram::error::{Error, Result};
use wittram::localsym::{local_symbol, modulus_vanishing_test, LiftChoice, LocalSymbolInput};
use wittram::series::{Series, EXACT};
use wittram::tower::{CoverDatum, Tower};
use wittram::wbar::{
    chow_mul, divisor_ledger, psi_on_sections, psi_pullback, pushforward_recursion_check, section_basis, section_dim,
    ChowClass,
};
use wittram::witt::{table, Witt, WittVector};

#[derive(Parser)]
#[command(name = "wittram", version, about = "Witt vectors and ramification of cyclic Artin-Schreier-Witt covers")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomized trial.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DatumArgs {
    /// JSON datum file, e.g. {"p":2,"n":2,"nu":[3,1]}.
    #[arg(long, conflicts_with_all = ["p", "nu"])]
    datum: Option<PathBuf>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Pole orders, comma separated.
    #[arg(long)]
    nu: Option<String>,
}

impl DatumArgs {
    fn load(&self) -> Result<ParsedDatum> {
        if let Some(path) = &self.datum {
            return parse_datum(path);
        }
        let p = self.p.ok_or_else(|| Error::Parse("--p or --datum is required".into()))?;
        let nu: Vec<i64> = parse_list(self.nu.as_deref().ok_or_else(|| Error::Parse("--nu is required".into()))?)?;
        if let Some(n) = self.n {
            if n != nu.len() {
                return Err(Error::Parse(format!("--n {n} but {} pole orders", nu.len())));
            }
        }
        let datum = CoverDatum::monomial(p, &nu).map_err(|e| match e {
            Error::Unsupported(m) => Error::Hypothesis(m),
            other => other,
        })?;
        Ok(ParsedDatum { datum, precision: None })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed formula and lattice oracle.
    Conductor(DatumArgs),
    /// The section-degree lattice problem with its optimal points.
    Lattice(DatumArgs),
    /// Both weight-minimization formulations for weights `w`.
    Lp {
        #[arg(long)]
        p: u64,
        /// Weights, comma separated (negative allowed).
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Build the tower and report its ramification.
    Tower {
        #[command(flatten)]
        datum: DatumArgs,
        /// Window budget in coefficients.
        #[arg(long, env = "WITTRAM_PRECISION")]
        budget: Option<i64>,
    },
    /// Residue vectors and the modulus test.
    LocalSymbol {
        #[command(flatten)]
        datum: DatumArgs,
        /// `1 + Σ c_k s^k` given as `k:c,k:c`; without it run the modulus test.
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 64)]
        search_cap: usize,
        /// Lift precision exponent.
        #[arg(long)]
        m: Option<u32>,
        /// Perturb the lift with the global seed.
        #[arg(long)]
        random_lift: bool,
    },
    /// Witt polynomial tables and arithmetic over F_p.
    Witt {
        #[command(subcommand)]
        op: WittOp,
    },
    /// Sections, Chow ring and boundary ledger of the compactification.
    Wbar {
        #[command(subcommand)]
        op: WbarOp,
    },
    /// Cross-validate formula, lattice oracle and towers on a grid.
    Grid {
        #[arg(long, default_value = "2,3")]
        p: String,
        #[arg(long, default_value = "1,2")]
        n: String,
        #[arg(long, default_value_t = 7)]
        nu_max: i64,
        /// Skip tower construction.
        #[arg(long)]
        no_tower: bool,
        /// Multiply every default budget by this factor.
        #[arg(long, default_value_t = 1)]
        budget_scale: i64,
    },
}

#[derive(Subcommand)]
enum WittOp {
    /// Print S, c, I (and optionally P) polynomials.
    Table {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        products: bool,
    },
    /// Evaluate an operation on vectors over F_p.
    Eval {
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = ["add", "sub", "mul", "neg", "ghost", "asw"])]
        op: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: Option<String>,
    },
}

#[derive(Subcommand)]
enum WbarOp {
    /// Monomial basis of H^0(O(m)).
    Sections {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        m: u64,
    },
    /// Image of the top variable under the cover.
    Psi {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Products of divisor classes and their pullbacks.
    Chow {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Boundary divisor classes and inertia orders.
    Ledger {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
}

struct Outcome {
    text: String,
    json: serde_json::Value,
    ok: bool,
}

fn out(text: String, json: impl Serialize, ok: bool) -> Result<Outcome> {
    Ok(Outcome { text, json: serde_json::to_value(json).map_err(|e| Error::Io(e.to_string()))?, ok })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Conductor(d) => {
            let datum = d.load()?.datum;
            let f = theorem_conductor(datum.p, &datum.nu)?;
            let oracle = section_degree_oracle(datum.p, &datum.nu)?;
            let ok = oracle.value == f.m;
            let text = format!(
                "p = {}, nu = {:?}\nM = {} (argmax {:?}), conductor = {}\nlattice oracle: {} over {} feasible points [{}]",
                datum.p,
                datum.nu,
                f.m,
                f.argmax,
                f.conductor,
                oracle.value,
                oracle.feasible_points,
                if ok { "agree" } else { "DISAGREE" }
            );
            out(text, serde_json::json!({"formula": f, "oracle": oracle, "agree": ok}), ok)
        }
        Command::Lattice(d) => {
            let datum = d.load()?.datum;
            let oracle = section_degree_oracle(datum.p, &datum.nu)?;
            let text = format!(
                "max = {} over {} feasible points\noptimal: {:?}",
                oracle.value, oracle.feasible_points, oracle.argopt
            );
            out(text, &oracle, true)
        }
        Command::Lp { p, w } => {
            let w: Vec<i64> = parse_list(w)?;
            let a = lp_minimize(&lp1(*p, &w))?;
            let b = lp_minimize(&lp2(*p, &w))?;
            let v = lp_vertex_bound(*p, &w);
            let ok = b.value <= a.value;
            let text = format!(
                "first form: {} at {:?}\nsecond form: {} at {:?}\nvertex bound: {v}",
                a.value, a.argopt, b.value, b.argopt
            );
            out(text, serde_json::json!({"lp1": a, "lp2": b, "vertex_bound": v}), ok)
        }
        Command::Tower { datum, budget } => {
            let parsed = datum.load()?;
            let r = Tower::analyze(&parsed.datum, budget.or(parsed.precision))?;
            let mut text = format!(
                "p = {}, nu = {:?}, budget = {}\nconductor = {}, different = {}, lower breaks = {:?}\n",
                r.p, r.nu, r.budget, r.conductor, r.different, r.lower_breaks
            );
            for l in &r.levels {
                text += &format!(
                    "level {}: m = {}, e = {}, mu = {}, different = {}, upper breaks = [{}]\n",
                    l.level,
                    l.m,
                    l.e,
                    l.mu,
                    l.different,
                    l.upper_breaks.join(", ")
                );
            }
            text += &format!("formula M = {}\n", r.theorem_m);
            for c in &r.checks {
                text += &format!("  [{}] {} ({})\n", if c.holds { "ok" } else { "FAIL" }, c.name, c.detail);
            }
            for w in &r.warnings {
                text += &format!("  warning: {w}\n");
            }
            let ok = r.all_hold();
            out(text, &r, ok)
        }
        Command::LocalSymbol { datum, alpha, trials, search_cap, m, random_lift } => {
            let d = datum.load()?.datum;
            let k = &d.field;
            match alpha {
                Some(spec) => {
                    let mut terms = vec![(0i64, k.one_c())];
                    for part in spec.split(',').filter(|x| !x.is_empty()) {
                        let (e, c) = part.split_once(':').ok_or_else(|| Error::Parse(format!("bad term `{part}`")))?;
                        let e: i64 = e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent `{e}`")))?;
                        let c: i64 = c.trim().parse().map_err(|_| Error::Parse(format!("bad coefficient `{c}`")))?;
                        if e <= 0 {
                            return Err(Error::Parse("α terms must have positive exponents".into()));
                        }
                        terms.push((e, k.scalar(c)));
                    }
                    let lift = if *random_lift { LiftChoice::Randomized(cli.seed) } else { LiftChoice::Canonical };
                    let inp = LocalSymbolInput {
                        u: d.u.clone(),
                        alpha: Series::from_terms(k, &terms, EXACT),
                        m: *m,
                        lift,
                    };
                    let s = local_symbol(&inp)?;
                    let comps: Vec<Vec<u64>> = s.symbol.comps.iter().map(|c| k.to_coords(c)).collect();
                    out(format!("(u, α) = {comps:?} (lift ring {:?})", s.lift_ring), &comps, true)
                }
                None => {
                    let mm = theorem_conductor(d.p, &d.nu)?.m;
                    let r = modulus_vanishing_test(&d.u, mm, *trials, *search_cap, cli.seed)?;
                    let text = format!(
                        "M = {mm}: {}/{} random α ≡ 1 mod s^{} gave zero symbols\nwitness at order {mm}: {}",
                        r.zero_trials,
                        r.trials,
                        mm + 1,
                        match &r.witness {
                            Some(w) => format!("found after {} candidates, α − 1 = {:?}, symbol {:?}", r.searched, w.alpha_terms, w.symbol),
                            None => format!("none among {} candidates", r.searched),
                        }
                    );
                    out(text, &r, true)
                }
            }
        }
        Command::Witt { op } => run_witt(op),
        Command::Wbar { op } => run_wbar(op, cli.seed),
        Command::Grid { p, n, nu_max, no_tower, budget_scale } => {
            let ps: Vec<u64> = parse_list(p)?;
            let ns: Vec<usize> = parse_list(n)?;
            let s = run_grid(&ps, &ns, *nu_max, !no_tower, *budget_scale);
            let mut text = format!("{:>3} {:<16} {:>8} {:>7} {:>6} {:>7} {:>8}\n", "p", "nu", "formula", "oracle", "tower", "checks", "ms");
            for c in &s.cases {
                text += &format!(
                    "{:>3} {:<16} {:>8} {:>7} {:>6} {:>7} {:>8}\n",
                    c.p,
                    format!("{:?}", c.nu),
                    c.formula,
                    c.oracle,
                    c.tower.map_or("-".into(), |t| t.to_string()),
                    if c.agrees() { "ok" } else { "FAIL" },
                    c.millis
                );
                if let Some(e) = &c.error {
                    text += &format!("    error: {e}\n");
                }
                for f in &c.failures {
                    text += &format!("    failed: {f}\n");
                }
            }
            let what = if *no_tower { "formula = lattice oracle" } else { "formula = lattice oracle = brute force" };
            if s.all_agree() {
                text += &format!("all {} cases: {what}", s.cases.len());
            } else {
                text += &format!("{} of {} cases agree", s.agreeing, s.cases.len());
            }
            let ok = s.all_agree();
            out(text, &s, ok)
        }
    }
}

fn run_witt(op: &WittOp) -> Result<Outcome> {
    match op {
        WittOp::Table { p, n, products } => {
            let t = table(*p, *n)?;
            let names2 = t.names2();
            let names1 = t.names1();
            let mut text = String::new();
            let mut json = serde_json::Map::new();
            let mut put = |label: String, s: String, text: &mut String| {
                *text += &format!("{label} = {s}\n");
                json.insert(label, serde_json::Value::String(s));
            };
            for j in 0..*n {
                put(format!("S{j}"), t.sum(j).fmt_with(&names2), &mut text);
                put(format!("c{j}"), t.carry(j).fmt_with(&names2), &mut text);
                put(format!("I{j}"), t.neg(j).fmt_with(&names1), &mut text);
                if *products {
                    put(format!("P{j}"), t.product(j).fmt_with(&names2), &mut text);
                }
            }
            out(text, serde_json::Value::Object(json), true)
        }
        WittOp::Eval { p, op, a, b } => {
            let k = GaloisRing::prime_field(*p)?;
            let vec = |s: &str| -> Result<WittVector<_>> {
                Ok(WittVector::new(parse_list::<i64>(s)?.into_iter().map(|x| k.scalar(x)).collect()))
            };
            let a = vec(a)?;
            let w = Witt::new(k.clone(), table(*p, a.len())?);
            let need_b = || -> Result<WittVector<_>> {
                let b = vec(b.as_deref().ok_or_else(|| Error::Parse(format!("{op} needs --b")))?)?;
                if b.len() != a.len() {
                    return Err(Error::Parse("vectors of different lengths".into()));
                }
                Ok(b)
            };
            let r = match op.as_str() {
                "add" => w.add(&a, &need_b()?)?,
                "sub" => w.sub(&a, &need_b()?)?,
                "mul" => w.mul(&a, &need_b()?)?,
                "neg" => w.neg(&a)?,
                "ghost" => WittVector::new(w.ghost(&a)?),
                _ => w.asw(&a)?,
            };
            let comps: Vec<u64> = r.comps.iter().map(|c| k.as_int(c)).collect();
            out(format!("{comps:?}"), &comps, true)
        }
    }
}

fn run_wbar(op: &WbarOp, seed: u64) -> Result<Outcome> {
    match op {
        WbarOp::Sections { p, n, m } => {
            if *n == 0 {
                return Err(Error::Hypothesis("n ≥ 1".into()));
            }
            let names = wittram::wbar::names(n - 1);
            let basis: Vec<String> = section_basis(*p, *n, *m)
                .iter()
                .map(|e| {
                    let mono: Vec<String> = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| x > 0)
                        .map(|(i, &x)| if x == 1 { names[i].clone() } else { format!("{}^{x}", names[i]) })
                        .collect();
                    if mono.is_empty() { "1".into() } else { mono.join("*") }
                })
                .collect();
            let dim = section_dim(*p, *n, *m);
            let rec = pushforward_recursion_check(*p, *n);
            let ok = dim == basis.len() as u64 && rec.holds;
            let text = format!(
                "dim = {dim}\n{}\npushforward: {} = {} + {} [{}]",
                basis.join(", "),
                rec.total,
                rec.trivial_part,
                rec.twisted_part,
                if rec.holds { "ok" } else { "FAIL" }
            );
            out(text, serde_json::json!({"dim": dim, "basis": basis, "pushforward": rec}), ok)
        }
        WbarOp::Psi { p, n } => {
            let r = psi_on_sections(*p, *n)?;
            let ok = r.homogeneous && r.dehomogenization_holds && r.equivariant;
            let text = format!(
                "X{n} -> {}\nliteral expansion: {} [{}]\nhomogeneous: {}, T=1 gives component {n} of F(Y)-Y: {}, invariant under V^{n}(1): {}",
                r.image,
                r.literal,
                if r.literal_holds { "equal" } else { "differs" },
                r.homogeneous,
                r.dehomogenization_holds,
                r.equivariant
            );
            out(text, &r, ok)
        }
        WbarOp::Chow { p, n } => {
            let mut text = String::new();
            let mut ok = true;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 1..=*n {
                for j in i..=*n {
                    let prod = chow_mul(&ChowClass::x(*n, *p, i), &ChowClass::x(*n, *p, j))?;
                    text += &format!("x{i}*x{j} = {prod}\n");
                }
            }
            for mask in 0u32..(1 << n) {
                let c = mask.count_ones();
                let mono = ChowClass::monomial(*n, *p, mask, BigInt::from(1));
                let img = psi_pullback(&mono)?;
                ok &= img == mono.scale(&BigInt::from(*p).pow(c));
            }
            let random = ChowClass::monomial(*n, *p, rng.gen_range(0..1 << n), BigInt::from(rng.gen_range(1..10)));
            text += &format!("pullback is p^codim on all {} basis monomials: {ok}\nexample: {random} -> {}", 1 << n, psi_pullback(&random)?);
            out(text, serde_json::json!({"pullback_scalar": ok}), ok)
        }
        WbarOp::Ledger { p, n } => {
            let l = divisor_ledger(*p, *n)?;
            let mut text = format!("[B_{n}] = {}\n", l.boundary);
            for c in &l.components {
                text += &format!(
                    "B_{n},{} = {} with multiplicity {}, inertia order {} (stated {})\n",
                    c.i, c.class, c.multiplicity, c.inertia_order, c.stated_inertia_order
                );
            }
            for (name, holds) in &l.checks {
                text += &format!("  [{}] {name}\n", if *holds { "ok" } else { "FAIL" });
            }
            let ok = l.all_hold();
            out(text, &l, ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            let body = if cli.json {
                serde_json::to_string_pretty(&o.json).unwrap_or_default()
            } else {
                o.text.trim_end().to_string()
            };
            let _ = writeln!(std::io::stdout().lock(), "{body}");
            if o.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({"error": e.code(), "message": e.to_string()}));
            } else {
                eprintln!("error [{}]: {e}", e.code());
            }
            ExitCode::from(2)
        }
    }
}
