use contractions_core::linalg::Tolerance;
use contractions_core::rng::{contraction_with_norm, gaussian_matrix, seeded, unitary};
use contractions_core::singular_values::{contraction_corollary_check, horn_inequality_holds, horn_products};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn horn_holds_for_random_pairs(seed in any::<u64>(), m in 1usize..9, p in 1usize..9, q in 1usize..9) {
        let mut rng = seeded(seed, 0);
        let x = gaussian_matrix(&mut rng, p, q);
        let y = gaussian_matrix(&mut rng, m, p);
        for k in 1..=m.max(p).max(q) {
            prop_assert!(horn_inequality_holds(&x, &y, k).unwrap());
        }
    }

    #[test]
    fn horn_products_are_unitarily_invariant(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = seeded(seed, 1);
        let x = gaussian_matrix(&mut rng, n, n);
        let y = gaussian_matrix(&mut rng, n, n);
        let (u, v) = (unitary(&mut rng, n), unitary(&mut rng, n));
        for k in 1..=n {
            let (l0, r0) = horn_products(&x, &y, k).unwrap();
            let (l1, r1) = horn_products(&(&x * &u), &(&v * &y), k).unwrap();
            prop_assert!((l0 - l1).abs() <= 1e-12 * l0.max(r0));
            prop_assert!((r0 - r1).abs() <= 1e-12 * r0);
        }
    }

    #[test]
    fn contractions_shrink_products(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = seeded(seed, 2);
        let x = gaussian_matrix(&mut rng, n, n);
        let y = contraction_with_norm(&mut rng, n, 1.0);
        for k in 1..=n {
            prop_assert!(contraction_corollary_check(&x, &y, k, &Tolerance::default()).unwrap());
        }
    }
}
