use contractions_core::contraction::Contraction;
use contractions_core::dilation::schaffer_dilation;
use contractions_core::factorization::{is_regular_pair, triangulate};
use contractions_core::fixtures::{
    conjugated_pair, generate, jordan_matrix, random_contraction, sim_pair, FixtureSpec,
};
use contractions_core::linalg::{direct_sum, identity, op_norm, unitary_residual, Tolerance};
use contractions_core::order::{
    cantor_bernstein, decide, find_isometric_intertwiner, recheck_certificate, witness_residual,
    Relation,
};
use contractions_core::rng::{contraction_with_norm, seeded};
use contractions_core::subspace::Subspace;
use contractions_core::verdict::{Budget, Status};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn valid(m: contractions_core::ComplexMatrix) -> Contraction {
    Contraction::validate(m, tol()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn witnesses_are_sound(seed in any::<u64>(), n in 1usize..5) {
        let pair = conjugated_pair(seed, n).unwrap();
        let (a, b) = (valid(pair.a), valid(pair.b));
        let v = find_isometric_intertwiner(&a, &b, true, &Budget::default()).unwrap();
        prop_assert_ne!(v.status, Status::Refuted);
        if let Some(omega) = v.isometry() {
            prop_assert!(witness_residual(omega, a.matrix(), b.matrix(), true).unwrap() <= tol().residual_tol);
        }
    }

    #[test]
    fn order_is_reflexive(seed in any::<u64>(), n in 1usize..5) {
        let a = random_contraction(seed, n, 0.8, tol()).unwrap();
        let v = decide(&a, &a, Relation::MutuallyReducing, &Budget::default()).unwrap();
        prop_assert_eq!(v.status, Status::Holds);
    }

    #[test]
    fn refutations_recheck(seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let mut rng = seeded(seed, 9);
        let a = valid(contraction_with_norm(&mut rng, n, 0.7));
        let b = valid(jordan_matrix(m));
        let v = find_isometric_intertwiner(&a, &b, false, &Budget::default()).unwrap();
        if let Some(cert) = &v.certificate {
            prop_assert!(recheck_certificate(a.matrix(), b.matrix(), cert, &tol()).unwrap());
        }
    }

    #[test]
    fn gluing_is_unitary(seed in any::<u64>(), common in 0usize..5, swapped in 1usize..5) {
        let pair = sim_pair(seed, common, swapped).unwrap();
        let g = cantor_bernstein(&pair.a, &pair.b, &pair.omega, &pair.omega_prime, &tol()).unwrap();
        prop_assert!(g.iterations <= pair.a.nrows() + 1);
        prop_assert!(unitary_residual(&g.w) <= 1e-8);
        prop_assert!(op_norm(&(&g.w * &pair.a - &pair.b * &g.w)) <= 1e-8);
    }

    #[test]
    fn dilation_is_unitary_with_power_identity(seed in any::<u64>(), n in 1usize..5, depth in 1usize..5) {
        let a = random_contraction(seed, n, 0.9, tol()).unwrap();
        let d = schaffer_dilation(&a, depth).unwrap();
        prop_assert!(d.unitary_residual() <= 1e-12);
        prop_assert!(d.power_residual(a.matrix(), depth) <= 1e-10);
    }

    #[test]
    fn regularity_of_direct_sums_is_conjunctive(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = seeded(seed, 4);
        let mut pick = |k: u64| {
            if k.is_multiple_of(2) { contraction_with_norm(&mut rng, n, 0.6) } else { identity(n) }
        };
        let (t1, t2, s1, s2) = (pick(seed), pick(seed >> 1), pick(seed >> 2), pick(seed >> 3));
        let left = is_regular_pair(&t1, &t2, &tol()).unwrap();
        let right = is_regular_pair(&s1, &s2, &tol()).unwrap();
        let both = is_regular_pair(&direct_sum(&[&t1, &s1]), &direct_sum(&[&t2, &s2]), &tol()).unwrap();
        prop_assert_eq!(both, left && right);
    }

    #[test]
    fn triangulation_reassembles(seed in any::<u64>(), n in 2usize..6) {
        let a = random_contraction(seed, n, 0.9, tol()).unwrap();
        let (q, _) = contractions_core::linalg::schur(a.matrix()).unwrap();
        let k = 1 + (seed as usize) % (n - 1);
        let y = Subspace::span(&q.columns(0, k).into_owned(), tol()).unwrap();
        let tri = triangulate(&a, &y).unwrap();
        prop_assert!(op_norm(&(tri.reassemble() - a.matrix())) <= 1e-10);
    }

    #[test]
    fn witnesses_compose(seed in any::<u64>(), n in 1usize..4) {
        let ab = conjugated_pair(seed, n).unwrap();
        let (a, b) = (valid(ab.a), valid(ab.b));
        let c = valid(direct_sum(&[b.matrix(), &jordan_matrix(2)]));
        let budget = Budget::default();
        let first = find_isometric_intertwiner(&a, &b, false, &budget).unwrap();
        let second = find_isometric_intertwiner(&b, &c, false, &budget).unwrap();
        if let (Some(x), Some(y)) = (first.isometry(), second.isometry()) {
            let composed = y * x;
            prop_assert!(witness_residual(&composed, a.matrix(), c.matrix(), false).unwrap() <= 2.0 * tol().residual_tol);
        }
    }

    #[test]
    fn dilation_window_is_minimal(seed in any::<u64>(), n in 1usize..4, depth in 1usize..4) {
        let a = random_contraction(seed, n, 0.9, tol()).unwrap();
        let d = schaffer_dilation(&a, depth).unwrap();
        prop_assert_eq!(d.orbit_span_dim().unwrap(), d.space_dim);
    }

    #[test]
    fn fixtures_are_deterministic(seed in any::<u64>(), n in 1usize..6) {
        let spec = FixtureSpec::ConjugatedPair { n, seed };
        prop_assert_eq!(generate(&spec, tol()).unwrap(), generate(&spec, tol()).unwrap());
    }
}
