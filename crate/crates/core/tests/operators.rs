mod common;

use common::sbx_spread_cdf;
use mfrl_core::genome::UnifiedGenome;
use mfrl_core::mfea::operators::{polynomial_mutation, sbx_crossover, sbx_pair, sbx_spread_factor};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn identical_parents_are_a_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let g = UnifiedGenome((0..50).map(|_| rng.gen()).collect());
        let (a, b) = sbx_crossover(&g, &g, 15.0, &mut rng).unwrap();
        assert_eq!(a, g);
        assert_eq!(b, g);
    }
}

#[test]
fn spread_factor_matches_analytic_distribution() {
    let eta = 15.0;
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut betas: Vec<f64> = (0..n).map(|_| sbx_spread_factor(rng.gen(), eta)).collect();
    betas.sort_by(f64::total_cmp);
    let mut ks: f64 = 0.0;
    for (i, &b) in betas.iter().enumerate() {
        let f = sbx_spread_cdf(b, eta);
        ks = ks
            .max((f - i as f64 / n as f64).abs())
            .max(((i + 1) as f64 / n as f64 - f).abs());
    }
    assert!(ks < 0.01, "Kolmogorov distance {ks}");
}

proptest! {
    #[test]
    fn children_keep_the_parent_midpoint(a in 0.0f64..1.0, b in 0.0f64..1.0, u in 0.0f64..1.0) {
        let beta = sbx_spread_factor(u, 15.0);
        let (c1, c2) = sbx_pair(a, b, beta);
        prop_assert!(((c1 + c2) - (a + b)).abs() <= 1e-12);
        prop_assert!(((c2 - c1).abs() - beta * (b - a).abs()).abs() <= 1e-12);
    }

    #[test]
    fn unclipped_crossover_preserves_midpoints(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // parents near the centre so children rarely need clipping
        let a = UnifiedGenome((0..20).map(|_| rng.gen_range(0.45..0.55)).collect());
        let b = UnifiedGenome((0..20).map(|_| rng.gen_range(0.45..0.55)).collect());
        let (c1, c2) = sbx_crossover(&a, &b, 15.0, &mut rng).unwrap();
        for i in 0..20 {
            if (0.0..=1.0).contains(&c1.0[i]) && c1.0[i] != 0.0 && c1.0[i] != 1.0 && c2.0[i] != 0.0 && c2.0[i] != 1.0 {
                prop_assert!((c1.0[i] + c2.0[i] - a.0[i] - b.0[i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn crossover_and_mutation_stay_in_the_box(seed in any::<u64>(), p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = UnifiedGenome((0..30).map(|_| rng.gen()).collect());
        let b = UnifiedGenome((0..30).map(|_| rng.gen()).collect());
        let (c1, c2) = sbx_crossover(&a, &b, 2.0, &mut rng).unwrap();
        let m = polynomial_mutation(&c1, 20.0, p, &mut rng);
        for g in [&c1, &c2, &m] {
            prop_assert!(g.0.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn zero_mutation_probability_is_a_no_op(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = UnifiedGenome((0..40).map(|_| rng.gen()).collect());
        prop_assert_eq!(polynomial_mutation(&g, 20.0, 0.0, &mut rng), g);
    }
}

#[test]
fn mismatched_parents_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let a = UnifiedGenome(vec![0.5; 3]);
    let b = UnifiedGenome(vec![0.5; 4]);
    assert!(sbx_crossover(&a, &b, 15.0, &mut rng).is_err());
}
