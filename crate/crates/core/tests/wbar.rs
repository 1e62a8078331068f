use num_bigint::BigInt;
use wittram::poly::Poly;
use wittram::wbar::*;

#[test]
fn psi_levels_two() {
    for p in [2, 3] {
        for n in 0..=2 {
            let r = psi_on_sections(p, n).unwrap();
            assert!(r.homogeneous && r.dehomogenization_holds && r.equivariant, "{r:?}");
            assert_eq!(r.literal_holds, p != 2 || n == 0, "p={p} n={n}");
        }
    }
}

#[test]
fn action_composes() {
    // f = Y_2 + T Y_0^3 + Y_1^2 in weight 4 over F_2
    let f = Poly::var(4, 3).add(&Poly::monomial(4, &[(0, 1), (1, 3)], BigInt::from(1))).add(&Poly::var(4, 2).pow(2));
    let f = GradedPolynomial::new(2, 2, f, 4).unwrap();
    for a in 0..8u64 {
        for b in 0..8u64 {
            let va = [a & 1, (a >> 1) & 1, (a >> 2) & 1];
            let vb = [b & 1, (b >> 1) & 1, (b >> 2) & 1];
            assert!(action_composition_holds(&va, &vb, &f).unwrap());
        }
    }
}

#[test]
fn inertia_matches_towers() {
    for (p, n) in [(2u64, 3usize), (3, 2)] {
        let ledger = divisor_ledger(p, n).unwrap();
        for c in &ledger.components {
            assert_eq!(inertia_from_tower(p, n, c.i).unwrap(), c.inertia_order, "p={p} n={n} i={}", c.i);
        }
    }
}
