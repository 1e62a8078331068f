//! Acceptance suite. Each test prints one PASS/FAIL line to stderr; all
//! comparisons are exact (tolerance 0). Set `WITTRAM_ACCEPTANCE_FULL=1` to run
//! the tower criteria over the whole grid instead of the default scope.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;
use wittram::cli::admissible_nus;
use wittram::coeff::GaloisRing;
use wittram::conductor::{section_degree_oracle, theorem_conductor};
use wittram::localsym::*;
use wittram::poly::Poly;
use wittram::series::{Series, EXACT};
use wittram::tower::{default_budget, CoverDatum, Tower, TowerReport};
use wittram::wbar::*;
use wittram::witt::{cn_leading_term_check, table, Witt, WittSeries, WittVector};

const PRIMES: [u64; 3] = [2, 3, 5];
const MAX_N: usize = 3;
const NU_MAX: i64 = 9;
const MIN_GRID_CASES: usize = 60;
/// Informational only; see the decisions ledger.
const EXPECTED_MS_PER_CASE: u128 = 10_000;

const GHOST_VECTORS: usize = 1000;
const GHOST_LIFT_M: u32 = 4;
const AXIOM_TRIPLES: usize = 40;

const SYMBOL_DATA_MIN: usize = 20;
const ALPHAS_PER_DATUM: usize = 50;
const WITNESS_CAP: usize = 64;
const TRIPLES: usize = 200;

const ACTION_PAIRS: usize = 120;

fn emit(id: u32, title: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "acceptance {id} [{tag}] {title}: {detail}");
}

fn full_scope() -> bool {
    std::env::var("WITTRAM_ACCEPTANCE_FULL").is_ok_and(|v| v == "1")
}

/// Default scope: every case with p = 2, or n ≤ 2; every 27th case of
/// p = 3, n = 3; two light cases of p = 5, n = 3.
fn grid_data() -> Vec<(u64, Vec<i64>)> {
    let mut out = vec![];
    for p in PRIMES {
        for n in 1..=MAX_N {
            let all = admissible_nus(p, n, NU_MAX);
            if full_scope() || p == 2 || n <= 2 {
                out.extend(all.into_iter().map(|nu| (p, nu)));
            } else if p == 3 {
                out.extend(all.into_iter().step_by(27).map(|nu| (p, nu)));
            } else {
                out.extend([vec![1, 1, 1], vec![1, 2, 3]].into_iter().map(|nu| (p, nu)));
            }
        }
    }
    out
}

struct GridRun {
    p: u64,
    nu: Vec<i64>,
    conductor: i64,
    report: Result<TowerReport, String>,
    millis: u128,
}

fn grid() -> &'static [GridRun] {
    static GRID: OnceLock<Vec<GridRun>> = OnceLock::new();
    GRID.get_or_init(|| {
        grid_data()
            .into_iter()
            .map(|(p, nu)| {
                let start = Instant::now();
                let conductor = theorem_conductor(p, &nu).unwrap().conductor;
                let report = CoverDatum::monomial(p, &nu)
                    .and_then(|d| Tower::analyze(&d, None))
                    .map_err(|e| format!("{}: {e}", e.code()));
                GridRun { p, nu, conductor, report, millis: start.elapsed().as_millis() }
            })
            .collect()
    })
}

fn scope_label() -> &'static str {
    if full_scope() {
        "full grid"
    } else {
        "default scope"
    }
}

/// Checks whose names start with one of `prefixes`: (count, failures).
fn checks_with(prefixes: &[&str]) -> (usize, Vec<String>) {
    let mut count = 0;
    let mut bad = vec![];
    for g in grid() {
        match &g.report {
            Ok(r) => {
                for c in r.checks.iter().filter(|c| prefixes.iter().any(|p| c.name.starts_with(p))) {
                    count += 1;
                    if !c.holds {
                        bad.push(format!("p={} ν={:?} {}: {}", g.p, g.nu, c.name, c.detail));
                    }
                }
            }
            Err(e) => bad.push(format!("p={} ν={:?}: {e}", g.p, g.nu)),
        }
    }
    (count, bad)
}

fn first(bad: &[String]) -> String {
    bad.first().cloned().unwrap_or_default()
}

#[test]
fn c1_conductor_from_filtration() {
    let g = grid();
    let mut bad = vec![];
    let (mut last_dominant, mut earlier_dominant) = (0, 0);
    for c in g {
        let f = theorem_conductor(c.p, &c.nu).unwrap();
        if f.argmax.contains(&(c.nu.len() - 1)) {
            last_dominant += 1;
        } else {
            earlier_dominant += 1;
        }
        match &c.report {
            Ok(r) if r.conductor == c.conductor && r.failures().iter().all(|x| !x.name.starts_with("conductor_formula")) => {}
            Ok(r) => bad.push(format!("p={} ν={:?}: filtration {} vs formula {}", c.p, c.nu, r.conductor, c.conductor)),
            Err(e) => bad.push(format!("p={} ν={:?}: {e}", c.p, c.nu)),
        }
    }
    let max_ms = g.iter().map(|c| c.millis).max().unwrap_or(0);
    let total: u128 = g.iter().map(|c| c.millis).sum();
    let pass = bad.is_empty() && g.len() >= MIN_GRID_CASES && last_dominant > 0 && earlier_dominant > 0;
    emit(
        1,
        "conductor from filtration = max p^(n-1-i) nu_i + 1",
        pass,
        format!(
            "{} cases ({}), {} nu_n-dominant, {} p*m-dominant, {} mismatches {}; max {} ms/case (expected < {} ms), total {:.1} s",
            g.len(),
            scope_label(),
            last_dominant,
            earlier_dominant,
            bad.len(),
            first(&bad),
            max_ms,
            EXPECTED_MS_PER_CASE,
            total as f64 / 1000.0
        ),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn c2_lattice_identity() {
    // the oracle needs no tower, so it always runs on every admissible datum
    let mut cases = 0;
    let mut bad = vec![];
    for p in PRIMES {
        for n in 1..=MAX_N {
            for nu in admissible_nus(p, n, NU_MAX) {
                cases += 1;
                let f = theorem_conductor(p, &nu).unwrap();
                let o = section_degree_oracle(p, &nu).unwrap();
                if o.value != f.m {
                    bad.push(format!("p={p} ν={nu:?}: oracle {} vs formula {}", o.value, f.m));
                }
            }
        }
    }
    let pass = bad.is_empty();
    emit(2, "section-degree oracle = closed formula", pass, format!("{cases} cases, {} mismatches {}", bad.len(), first(&bad)));
    assert!(pass, "{bad:?}");
}

#[test]
fn c3_hasse_arf() {
    let mut breaks = 0;
    let mut bad = vec![];
    for c in grid() {
        match &c.report {
            Ok(r) => {
                for l in &r.levels {
                    for u in l.filtration.upper_breaks() {
                        breaks += 1;
                        if !u.is_integer() {
                            bad.push(format!("p={} ν={:?} level {}: {u}", c.p, c.nu, l.level));
                        }
                    }
                }
            }
            Err(e) => bad.push(format!("p={} ν={:?}: {e}", c.p, c.nu)),
        }
    }
    let pass = bad.is_empty() && breaks > 0;
    emit(3, "upper breaks are integers", pass, format!("{breaks} upper breaks, {} non-integral {}", bad.len(), first(&bad)));
    assert!(pass, "{bad:?}");
}

#[test]
fn c4_tower_identities() {
    let names = ["mu_from_e[", "e_sum[", "mu_sum[", "mu_over_sum[", "mu_over_base", "different["];
    let (count, bad) = checks_with(&names);
    let pass = bad.is_empty() && count > 0;
    emit(
        4,
        "mu = p^n m - e, telescoping e and mu, different = mu + p^n - 1",
        pass,
        format!("{count} identities on {} towers, {} failures {}", grid().len(), bad.len(), first(&bad)),
    );
    assert!(pass, "{bad:?}");
}

fn random_vec(r: &GaloisRing, n: usize, rng: &mut ChaCha8Rng) -> WittVector<wittram::coeff::Coeff> {
    let q = r.modulus() as i64;
    WittVector::new((0..n).map(|_| r.elem(&(0..r.degree()).map(|_| rng.gen_range(0..q)).collect::<Vec<_>>())).collect())
}

#[test]
fn c5_witt_layer() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bad = vec![];
    let mut pairs = 0;
    let mut scopes = vec![];
    for (p, max_n) in [(2u64, 4usize), (3, 4), (5, 4), (7, 3)] {
        scopes.push(format!("p={p} n<={max_n}"));
        for n in 1..=max_n {
            let t = table(p, n).unwrap();
            if let Err(e) = t.certify().and_then(|_| t.certify_products()) {
                bad.push(format!("weights p={p} n={n}: {e}"));
            }
            let r = GaloisRing::new(p, GHOST_LIFT_M, 1).unwrap();
            let w = Witt::new(r.clone(), t);
            for _ in 0..GHOST_VECTORS {
                let (a, b) = (random_vec(&r, n, &mut rng), random_vec(&r, n, &mut rng));
                let (ga, gb) = (w.ghost(&a).unwrap(), w.ghost(&b).unwrap());
                let gs = w.ghost(&w.add(&a, &b).unwrap()).unwrap();
                let gm = w.ghost(&w.mul(&a, &b).unwrap()).unwrap();
                let gn = w.ghost(&w.neg(&a).unwrap()).unwrap();
                pairs += 1;
                let ok = (0..n).all(|j| {
                    gs[j] == r.add_c(&ga[j], &gb[j]) && gm[j] == r.mul_c(&ga[j], &gb[j]) && gn[j] == r.neg_c(&ga[j])
                });
                if !ok {
                    bad.push(format!("ghost p={p} n={n} a={a:?} b={b:?}"));
                }
            }
        }
    }

    let mut axioms = 0;
    for (p, f) in [(2u64, 1usize), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)] {
        let k = GaloisRing::field(p, f).unwrap();
        for n in 1..=3 {
            let w = Witt::new(k.clone(), table(p, n).unwrap());
            for _ in 0..AXIOM_TRIPLES {
                let (a, b, c) = (random_vec(&k, n, &mut rng), random_vec(&k, n, &mut rng), random_vec(&k, n, &mut rng));
                let add = |x: &_, y: &_| w.add(x, y).unwrap();
                let mul = |x: &_, y: &_| w.mul(x, y).unwrap();
                let ok = add(&a, &b) == add(&b, &a)
                    && add(&add(&a, &b), &c) == add(&a, &add(&b, &c))
                    && mul(&a, &b) == mul(&b, &a)
                    && mul(&mul(&a, &b), &c) == mul(&a, &mul(&b, &c))
                    && mul(&a, &add(&b, &c)) == add(&mul(&a, &b), &mul(&a, &c))
                    && add(&a, &w.neg(&a).unwrap()) == w.zero(n)
                    && mul(&a, &w.integer(1, n).unwrap()) == a;
                axioms += 1;
                if !ok {
                    bad.push(format!("axioms over F_{}^{f} n={n}", p));
                }
            }
        }
    }

    let mut leading = 0;
    for p in [2u64, 3] {
        for n in 1..=3 {
            for i in 0..n {
                let l = cn_leading_term_check(p, n, i).unwrap();
                leading += 1;
                if !(l.matches && l.degree_bound_holds) {
                    bad.push(format!("leading term p={p} n={n} i={i}: {} vs {}", l.coefficient, l.expected));
                }
            }
        }
    }
    let pass = bad.is_empty();
    emit(
        5,
        "Witt layer",
        pass,
        format!(
            "{pairs} ghost-homomorphism pairs over Z/p^{GHOST_LIFT_M} ({GHOST_VECTORS} per (p,n); {}), {axioms} ring-axiom triples over F_q, tables weight-certified, {leading} c_n leading terms; {} failures {}",
            scopes.join(", "),
            bad.len(),
            first(&bad)
        ),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn c6_standard_form() {
    let (reductions, bad_std) = checks_with(&["standard_form["]);
    let (poles, bad_pole) = checks_with(&["reduced_pole["]);
    let tied: usize = grid().iter().filter(|c| !theorem_conductor(c.p, &c.nu).unwrap().unique).count();
    let pass = bad_std.is_empty() && bad_pole.is_empty() && reductions > 0 && poles > 0;
    emit(
        6,
        "z - z~ = h^p - h and -v(z~_k) = p^k M - mu_k",
        pass,
        format!(
            "{reductions} reductions, {} failures {}; {poles} pole orders (tied maxima: {tied}), {} failures {}",
            bad_std.len(),
            first(&bad_std),
            bad_pole.len(),
            first(&bad_pole)
        ),
    );
    assert!(pass, "{bad_std:?} {bad_pole:?}");
}

fn symbol_data() -> Vec<(u64, Vec<i64>)> {
    let mut d = vec![];
    for nu in [vec![1], vec![3], vec![5], vec![7], vec![9], vec![1, 1], vec![3, 1], vec![1, 3], vec![5, 7], vec![9, 9]] {
        d.push((2, nu));
    }
    d.extend([vec![1, 1, 1], vec![3, 5, 7]].into_iter().map(|nu| (2, nu)));
    for nu in [vec![1], vec![2], vec![4], vec![8], vec![1, 1], vec![2, 5], vec![7, 4]] {
        d.push((3, nu));
    }
    for nu in [vec![1], vec![3], vec![2, 4], vec![4, 1]] {
        d.push((5, nu));
    }
    d
}

fn random_u(k: &GaloisRing, n: usize, rng: &mut ChaCha8Rng) -> Vec<Series> {
    let q = k.modulus() as i64;
    (0..n)
        .map(|_| {
            let terms: Vec<(i64, wittram::coeff::Coeff)> = (1..=rng.gen_range(1..=7i64))
                .map(|e| (-e, k.elem(&(0..k.degree()).map(|_| rng.gen_range(0..q)).collect::<Vec<_>>())))
                .collect();
            Series::from_terms(k, &terms, EXACT)
        })
        .collect()
}

#[test]
fn c7_local_symbols() {
    let mut bad = vec![];
    let data = symbol_data();
    let mut alphas = 0;
    let mut witnesses = 0;
    for (i, (p, nu)) in data.iter().enumerate() {
        let m = theorem_conductor(*p, nu).unwrap().m;
        let u = CoverDatum::monomial(*p, nu).unwrap().u;
        match modulus_vanishing_test(&u, m, ALPHAS_PER_DATUM, WITNESS_CAP, 1000 + i as u64) {
            Ok(r) => {
                alphas += r.zero_trials;
                witnesses += usize::from(r.witness.is_some());
            }
            Err(e) => bad.push(format!("p={p} ν={nu:?}: {e}")),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x10ca1);
    let fields = [(2u64, 1usize), (2, 2), (3, 1), (3, 2), (5, 1)];
    for t in 0..TRIPLES {
        let (p, f) = fields[t % fields.len()];
        let k = GaloisRing::field(p, f).unwrap();
        let n = 1 + t % 2;
        let (u, u2) = (random_u(&k, n, &mut rng), random_u(&k, n, &mut rng));
        let a = random_one_unit(&k, 1, 60, &mut rng);
        let b = random_one_unit(&k, 1, 60, &mut rng);
        let seed = rng.gen();
        let sym = |u: &[Series], x: &Series, lift, m| {
            local_symbol(&LocalSymbolInput { u: u.to_vec(), alpha: x.clone(), m, lift }).unwrap_or_else(|e| panic!("{e} u={u:?} x={x:?} {lift:?} {m:?}"))
        };
        let base = sym(&u, &a, LiftChoice::Canonical, None);
        let sum_u = WittSeries::new(&k).unwrap().add(&u, &u2).unwrap();
        let alpha_slot = sym(&u, &a.mul(&b), LiftChoice::Canonical, None).symbol
            == symbol_add(&k, &base.symbol, &sym(&u, &b, LiftChoice::Canonical, None).symbol).unwrap();
        let u_slot = sym(&sum_u, &a, LiftChoice::Canonical, None).symbol
            == symbol_add(&k, &base.symbol, &sym(&u2, &a, LiftChoice::Canonical, None).symbol).unwrap();
        let lifts = sym(&u, &a, LiftChoice::Randomized(seed), None).symbol == base.symbol
            && sym(&u, &a, LiftChoice::Randomized(seed), Some(default_lift_precision(n) + 3)).symbol == base.symbol;
        let ghosts = ghost_consistency(&base, &k).unwrap();
        if !(alpha_slot && u_slot && lifts && ghosts) {
            bad.push(format!("triple {t} over F_{p}^{f}: α-slot {alpha_slot}, u-slot {u_slot}, lifts {lifts}, ghosts {ghosts}"));
        }
    }
    let pass = bad.is_empty() && data.len() >= SYMBOL_DATA_MIN && alphas == data.len() * ALPHAS_PER_DATUM;
    emit(
        7,
        "local symbols",
        pass,
        format!(
            "{} data x {ALPHAS_PER_DATUM} alphas with 1-alpha of order >= M+1: {alphas} zero symbols; witness at order M found for {witnesses}/{} (search cap {WITNESS_CAP}); {TRIPLES} bilinearity/lift triples; {} failures {}",
            data.len(),
            data.len(),
            bad.len(),
            first(&bad)
        ),
    );
    assert!(pass, "{bad:?}");
}

#[test]
fn c8_compactification() {
    let mut bad = vec![];
    let mut recursions = 0;
    for p in [2u64, 3] {
        for n in 1..=4 {
            let c = pushforward_recursion_check(p, n);
            recursions += 1;
            if !c.holds {
                bad.push(format!("sections p={p} n={n}: {} != {} + {}", c.total, c.trivial_part, c.twisted_part));
            }
        }
    }
    let mut monomials = 0;
    let mut ledgers = 0;
    for p in [2u64, 3, 5] {
        for n in 1..=5 {
            for mask in 0u32..(1 << n) {
                let x = ChowClass::monomial(n, p, mask, BigInt::from(1));
                monomials += 1;
                let expected = x.scale(&BigInt::from(p).pow(mask.count_ones()));
                if psi_pullback(&x).unwrap() != expected {
                    bad.push(format!("pullback p={p} n={n} mask={mask:b}"));
                }
            }
            let l = divisor_ledger(p, n).unwrap();
            ledgers += 1;
            if !l.all_hold() {
                bad.push(format!("ledger p={p} n={n}: {:?}", l.checks));
            }
        }
    }
    let mut psis = 0;
    for p in [2u64, 3] {
        for n in 0..=2 {
            let r = psi_on_sections(p, n).unwrap();
            psis += 1;
            if !(r.homogeneous && r.dehomogenization_holds && r.equivariant) {
                bad.push(format!("psi p={p} n={n}: {}", r.image));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xac7);
    for t in 0..ACTION_PAIRS {
        let p = [2u64, 3][t % 2];
        let k = t % 3;
        let basis = section_basis(p, k + 1, 1 + (t as u64 % 2));
        let weight = (1 + t as u64 % 2) * p.pow(k as u32);
        let f = (0..3).fold(Poly::zero(k + 2), |acc, _| {
            let e = &basis[rng.gen_range(0..basis.len())];
            acc.add(&Poly::from_terms(k + 2, [(e.clone(), BigInt::from(rng.gen_range(1..p)))]))
        });
        let f = GradedPolynomial::new(p, k, f, weight).unwrap();
        let a: Vec<u64> = (0..=k).map(|_| rng.gen_range(0..p)).collect();
        let b: Vec<u64> = (0..=k).map(|_| rng.gen_range(0..p)).collect();
        if !action_composition_holds(&a, &b, &f).unwrap() {
            bad.push(format!("action p={p} a={a:?} b={b:?} f={f}"));
        }
    }
    let pass = bad.is_empty();
    emit(
        8,
        "compactification layer",
        pass,
        format!(
            "{recursions} section recursions, {monomials} pullback monomials, {ledgers} divisor ledgers, {psis} psi sections, {ACTION_PAIRS} action pairs; {} failures {}",
            bad.len(),
            first(&bad)
        ),
    );
    assert!(pass, "{bad:?}");
}

fn invariants(r: &TowerReport) -> (Vec<i64>, Vec<Vec<String>>, Vec<(String, bool)>) {
    (
        r.fingerprint(),
        r.levels.iter().map(|l| l.upper_breaks.clone()).collect(),
        r.checks.iter().map(|c| (c.name.clone(), c.holds)).collect(),
    )
}

#[test]
fn c9_precision_stability() {
    let mut bad = vec![];
    for c in grid() {
        let Ok(r) = &c.report else {
            bad.push(format!("p={} ν={:?}: no baseline", c.p, c.nu));
            continue;
        };
        let d = CoverDatum::monomial(c.p, &c.nu).unwrap();
        match Tower::analyze(&d, Some(2 * default_budget(&d))) {
            Ok(r2) if invariants(&r2) == invariants(r) => {}
            Ok(_) => bad.push(format!("p={} ν={:?}: invariants moved", c.p, c.nu)),
            Err(e) => bad.push(format!("p={} ν={:?}: {e}", c.p, c.nu)),
        }
    }
    let pass = bad.is_empty();
    emit(
        9,
        "doubled budget changes no invariant",
        pass,
        format!("{} cases ({}), {} changed {}", grid().len(), scope_label(), bad.len(), first(&bad)),
    );
    assert!(pass, "{bad:?}");
}
