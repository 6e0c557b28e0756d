//! Factorial bookkeeping: ranks per task, scalar fitness, skill factor and
//! scalar-fitness survivor selection.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genome::UnifiedGenome;

/// Per-candidate MFEA bookkeeping. `costs[k]` is `None` when the candidate
/// was never evaluated on task `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorialRecord {
    pub costs: Vec<Option<f64>>,
    pub ranks: Vec<usize>,
    pub scalar_fitness: f64,
    pub skill_factor: usize,
}

impl FactorialRecord {
    pub fn unranked(costs: Vec<Option<f64>>) -> Self {
        let k = costs.len();
        FactorialRecord {
            costs,
            ranks: vec![0; k],
            scalar_fitness: 0.0,
            skill_factor: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub genome: UnifiedGenome,
    pub record: FactorialRecord,
    /// Generation in which the candidate was created (0 = initial).
    pub birth: usize,
}

/// Factorial ranks of a `P × K` cost table.
///
/// Within each task, evaluated candidates get ranks `1..=m` by ascending
/// cost with ties broken by row index; unevaluated entries get rank `P`.
pub fn factorial_ranks(costs: &[Vec<Option<f64>>]) -> Result<Vec<Vec<usize>>> {
    let rows = costs.len();
    if rows == 0 {
        return Err(Error::usage("cannot rank an empty population"));
    }
    let k = costs[0].len();
    if costs.iter().any(|r| r.len() != k) {
        return Err(Error::usage("cost table rows differ in task count"));
    }
    let mut ranks = vec![vec![rows; k]; rows];
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(rows);
    for task in 0..k {
        order.clear();
        order.extend(costs.iter().enumerate().filter_map(|(i, r)| r[task].map(|c| (c, i))));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (pos, &(_, i)) in order.iter().enumerate() {
            ranks[i][task] = pos + 1;
        }
    }
    Ok(ranks)
}

/// `(φ, τ)` from a candidate's ranks: φ = 1 / min rank, τ = first task
/// attaining it.
pub fn scalar_fitness_and_skill(ranks: &[usize]) -> (f64, usize) {
    let (skill, &best) = ranks
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .expect("at least one task");
    (1.0 / best as f64, skill)
}

/// Recompute ranks, scalar fitness and skill factor of every candidate from
/// the stored costs.
pub fn update_records(candidates: &mut [Candidate]) -> Result<()> {
    let table: Vec<Vec<Option<f64>>> = candidates.iter().map(|c| c.record.costs.clone()).collect();
    let ranks = factorial_ranks(&table)?;
    for (c, r) in candidates.iter_mut().zip(ranks) {
        let (phi, tau) = scalar_fitness_and_skill(&r);
        c.record.ranks = r;
        c.record.scalar_fitness = phi;
        c.record.skill_factor = tau;
    }
    Ok(())
}

/// Order in which survivors are taken: higher φ first, then older, then
/// lower index.
fn survivor_order(merged: &[Candidate]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..merged.len()).collect();
    idx.sort_by(|&a, &b| {
        let (x, y) = (&merged[a], &merged[b]);
        y.record
            .scalar_fitness
            .partial_cmp(&x.record.scalar_fitness)
            .unwrap_or(Ordering::Equal)
            .then(x.birth.cmp(&y.birth))
            .then(a.cmp(&b))
    });
    idx
}

/// Keep the `p` best candidates of `merged` by scalar fitness. Records must
/// be current. Survivors are returned best first.
pub fn select_survivors(merged: Vec<Candidate>, p: usize) -> Result<Vec<Candidate>> {
    if merged.len() < p {
        return Err(Error::usage(format!(
            "cannot select {p} survivors from {} candidates",
            merged.len()
        )));
    }
    let keep = survivor_order(&merged);
    let mut slots: Vec<Option<Candidate>> = merged.into_iter().map(Some).collect();
    Ok(keep[..p]
        .iter()
        .map(|&i| slots[i].take().expect("each index once"))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> Vec<Vec<Option<f64>>> {
        v.iter().map(|&c| vec![Some(c)]).collect()
    }

    #[test]
    fn ranks_sort_ascending() {
        let r = factorial_ranks(&col(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(r, vec![vec![3], vec![1], vec![2]]);
    }

    #[test]
    fn ties_by_index() {
        let r = factorial_ranks(&col(&[1.0, 1.0])).unwrap();
        assert_eq!(r, vec![vec![1], vec![2]]);
    }

    #[test]
    fn unevaluated_ranked_last() {
        let t = vec![vec![Some(5.0), None], vec![None, Some(1.0)], vec![Some(1.0), Some(2.0)]];
        let r = factorial_ranks(&t).unwrap();
        assert_eq!(r, vec![vec![2, 3], vec![3, 1], vec![1, 2]]);
    }

    #[test]
    fn empty_population_rejected() {
        assert!(matches!(factorial_ranks(&[]), Err(Error::Usage(_))));
    }

    #[test]
    fn fitness_and_skill() {
        assert_eq!(scalar_fitness_and_skill(&[2, 5, 9]), (0.5, 0));
        assert_eq!(scalar_fitness_and_skill(&[4, 4]), (0.25, 0));
        assert_eq!(scalar_fitness_and_skill(&[7, 3, 3]), (1.0 / 3.0, 1));
    }

    fn cand(phi: f64, birth: usize, tag: f64) -> Candidate {
        Candidate {
            genome: UnifiedGenome(vec![tag]),
            record: FactorialRecord {
                costs: vec![Some(tag)],
                ranks: vec![1],
                scalar_fitness: phi,
                skill_factor: 0,
            },
            birth,
        }
    }

    #[test]
    fn selection_prefers_fitness_then_age() {
        let merged = vec![
            cand(0.5, 2, 0.0),
            cand(1.0, 2, 1.0),
            cand(0.5, 1, 2.0),
            cand(0.25, 0, 3.0),
        ];
        let s = select_survivors(merged, 3).unwrap();
        let tags: Vec<f64> = s.iter().map(|c| c.genome.0[0]).collect();
        assert_eq!(tags, vec![1.0, 2.0, 0.0]);
    }

    #[test]
    fn selection_of_exact_size_keeps_everyone() {
        let merged = vec![cand(0.5, 0, 0.0), cand(1.0, 0, 1.0), cand(1.0 / 3.0, 0, 2.0)];
        let s = select_survivors(merged.clone(), 3).unwrap();
        let mut tags: Vec<f64> = s.iter().map(|c| c.genome.0[0]).collect();
        tags.sort_by(f64::total_cmp);
        assert_eq!(tags, vec![0.0, 1.0, 2.0]);
        assert!(select_survivors(merged, 4).is_err());
    }

    #[test]
    fn one_rank_one_per_task() {
        let mut rng = crate::seeds::rng(8);
        use rand::Rng;
        let mut cands: Vec<Candidate> = (0..30)
            .map(|i| Candidate {
                genome: UnifiedGenome(vec![]),
                record: FactorialRecord::unranked((0..3).map(|_| Some(rng.gen::<f64>())).collect()),
                birth: i,
            })
            .collect();
        update_records(&mut cands).unwrap();
        for k in 0..3 {
            assert_eq!(cands.iter().filter(|c| c.record.ranks[k] == 1).count(), 1);
        }
        let max_phi = cands.iter().map(|c| c.record.scalar_fitness).fold(0.0, f64::max);
        assert_eq!(max_phi, 1.0);
    }
}
