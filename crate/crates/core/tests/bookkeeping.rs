mod common;

use common::{brute_force_ranks, brute_force_skill};
use mfrl_core::genome::UnifiedGenome;
use mfrl_core::mfea::factorial::{
    factorial_ranks, scalar_fitness_and_skill, select_survivors, update_records, Candidate, FactorialRecord,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random cost table with ties (costs on a coarse grid) and gaps.
fn random_table(rng: &mut impl Rng, p: usize, k: usize) -> Vec<Vec<Option<f64>>> {
    (0..p)
        .map(|_| {
            (0..k)
                .map(|_| rng.gen_bool(0.8).then(|| f64::from(rng.gen_range(0..40)) * 0.25))
                .collect()
        })
        .collect()
}

#[test]
fn ranks_and_skills_match_counting_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let table = random_table(&mut rng, 50, 3);
        let ranks = factorial_ranks(&table).unwrap();
        assert_eq!(ranks, brute_force_ranks(&table));
        for r in &ranks {
            assert_eq!(scalar_fitness_and_skill(r), brute_force_skill(r));
        }
    }
}

fn candidates(table: &[Vec<Option<f64>>], births: &[usize]) -> Vec<Candidate> {
    table
        .iter()
        .zip(births)
        .enumerate()
        .map(|(i, (costs, &birth))| Candidate {
            genome: UnifiedGenome(vec![i as f64]),
            record: FactorialRecord::unranked(costs.clone()),
            birth,
        })
        .collect()
}

proptest! {
    #[test]
    fn ranks_are_a_permutation_of_evaluated_rows(seed in any::<u64>(), p in 1usize..30, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = random_table(&mut rng, p, k);
        let ranks = factorial_ranks(&table).unwrap();
        for t in 0..k {
            let mut seen: Vec<usize> = (0..p).filter(|&i| table[i][t].is_some()).map(|i| ranks[i][t]).collect();
            seen.sort_unstable();
            prop_assert_eq!(seen, (1..=table.iter().filter(|r| r[t].is_some()).count()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn survivors_match_sorting_oracle(seed in any::<u64>(), p in 2usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let merged = 2 * p;
        let table = random_table(&mut rng, merged, 3);
        let births: Vec<usize> = (0..merged).map(|_| rng.gen_range(0..4)).collect();
        let mut pool = candidates(&table, &births);
        update_records(&mut pool).unwrap();

        let mut oracle: Vec<(f64, usize, usize)> = pool
            .iter()
            .enumerate()
            .map(|(i, c)| (c.record.scalar_fitness, c.birth, i))
            .collect();
        oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let expected: Vec<f64> = oracle[..p].iter().map(|o| o.2 as f64).collect();

        let kept = select_survivors(pool, p).unwrap();
        let got: Vec<f64> = kept.iter().map(|c| c.genome.0[0]).collect();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn rank_one_candidates_always_survive(seed in any::<u64>(), p in 4usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = random_table(&mut rng, 2 * p, 3);
        let mut pool = candidates(&table, &vec![0; 2 * p]);
        update_records(&mut pool).unwrap();
        let leaders: Vec<f64> = pool
            .iter()
            .filter(|c| c.record.ranks.contains(&1))
            .map(|c| c.genome.0[0])
            .collect();
        let kept = select_survivors(pool, p).unwrap();
        for l in leaders {
            prop_assert!(kept.iter().any(|c| c.genome.0[0] == l));
        }
    }
}

#[test]
fn selecting_more_than_available_is_an_error() {
    let table = vec![vec![Some(1.0)]; 3];
    let mut pool = candidates(&table, &[0, 0, 0]);
    update_records(&mut pool).unwrap();
    assert!(select_survivors(pool, 4).is_err());
}
