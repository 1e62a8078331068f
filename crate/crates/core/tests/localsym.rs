use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wittram::coeff::GaloisRing;
use wittram::conductor::theorem_conductor;
use wittram::localsym::*;
use wittram::series::{Series, EXACT};
use wittram::witt::WittSeries;

fn monomial_u(k: &GaloisRing, nu: &[i64]) -> Vec<Series> {
    nu.iter().map(|&v| Series::monomial(k, k.one_c(), -v)).collect()
}

#[test]
fn vanishing_beyond_modulus() {
    for (p, nu) in [(2u64, vec![3i64, 1]), (2, vec![1, 5]), (3, vec![2, 7]), (2, vec![1, 1, 3]), (5, vec![2, 3])] {
        let k = GaloisRing::prime_field(p).unwrap();
        let m = theorem_conductor(p, &nu).unwrap().m;
        let rep = modulus_vanishing_test(&monomial_u(&k, &nu), m, 10, 50, 11).unwrap();
        assert_eq!(rep.zero_trials, 10);
        assert!(rep.witness.is_some(), "p={p} nu={nu:?}: {rep:?}");
    }
}

#[test]
fn bilinear_in_both_slots() {
    let k = GaloisRing::field(3, 2).unwrap();
    let g = k.generator();
    let u = vec![
        Series::from_terms(&k, &[(-4, g), (-1, k.one_c())], EXACT),
        Series::from_terms(&k, &[(-2, k.one_c()), (-1, g)], EXACT),
    ];
    let u2 = vec![Series::monomial(&k, g, -5), Series::from_terms(&k, &[(-7, k.one_c())], EXACT)];
    let ws = WittSeries::new(&k).unwrap();
    let sum_u = ws.add(&u, &u2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let a = random_one_unit(&k, 1, 40, &mut rng);
        let b = random_one_unit(&k, 2, 40, &mut rng);
        let sym = |u: &[Series], x: &Series| residue_vector(&LocalSymbolInput::new(u.to_vec(), x.clone())).unwrap();
        let lhs = sym(&u, &a.mul(&b));
        let rhs = symbol_add(&k, &sym(&u, &a), &sym(&u, &b)).unwrap();
        assert_eq!(lhs, rhs);
        let lhs = sym(&sum_u, &a);
        let rhs = symbol_add(&k, &sym(&u, &a), &sym(&u2, &a)).unwrap();
        assert_eq!(lhs, rhs);
    }
}
