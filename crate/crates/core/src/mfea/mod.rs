//! Multifactorial Evolutionary Algorithm.
//!
//! One population in the unified space serves every task. Each candidate is
//! ranked per task; its scalar fitness is the inverse of its best rank and its
//! skill factor is the task attaining that rank. Each generation pairs the
//! population at random, applies assortative mating, evaluates each child on
//! a single inherited task and keeps the best `P` of parents and children by
//! scalar fitness.

pub mod checkpoint;
pub mod factorial;
pub mod operators;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::genome::UnifiedGenome;
use crate::seeds::{self, tag};

pub use factorial::{
    factorial_ranks, scalar_fitness_and_skill, select_survivors, update_records, Candidate, FactorialRecord,
};
pub use operators::{polynomial_mutation, sbx_crossover};

fn default_population() -> usize {
    100
}
fn default_generations() -> usize {
    60
}
fn default_rmp() -> f64 {
    0.3
}
fn default_sbx_eta() -> f64 {
    15.0
}
fn default_mutation_eta() -> f64 {
    20.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfeaConfig {
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default = "default_generations")]
    pub generations: usize,
    /// Probability of crossover between parents of different skill factor.
    #[serde(default = "default_rmp")]
    pub rmp: f64,
    #[serde(default = "default_sbx_eta")]
    pub sbx_eta: f64,
    #[serde(default = "default_mutation_eta")]
    pub mutation_eta: f64,
    /// Per-gene mutation probability; `None` means `1 / D`.
    #[serde(default)]
    pub mutation_prob: Option<f64>,
    /// Multiplier of the constraint-violation term in the factorial cost.
    #[serde(default)]
    pub constraint_penalty: f64,
    #[serde(default)]
    pub seed: u64,
}

impl Default for MfeaConfig {
    fn default() -> Self {
        MfeaConfig {
            population_size: default_population(),
            generations: default_generations(),
            rmp: default_rmp(),
            sbx_eta: default_sbx_eta(),
            mutation_eta: default_mutation_eta(),
            mutation_prob: None,
            constraint_penalty: 0.0,
            seed: 0,
        }
    }
}

impl MfeaConfig {
    pub fn validate(&self) -> Result<()> {
        let p = self.population_size;
        if p < 4 || !p.is_multiple_of(2) {
            return Err(Error::config(
                "mfea.population_size",
                format!("must be even and at least 4, got {p}"),
            ));
        }
        if !(0.0..=1.0).contains(&self.rmp) {
            return Err(Error::config(
                "mfea.rmp",
                format!("must lie in [0, 1], got {}", self.rmp),
            ));
        }
        for (name, eta) in [("mfea.sbx_eta", self.sbx_eta), ("mfea.mutation_eta", self.mutation_eta)] {
            if !(eta.is_finite() && eta >= 0.0) {
                return Err(Error::config(name, format!("must be a non-negative number, got {eta}")));
            }
        }
        if let Some(pm) = self.mutation_prob {
            if !(0.0..=1.0).contains(&pm) {
                return Err(Error::config(
                    "mfea.mutation_prob",
                    format!("must lie in [0, 1], got {pm}"),
                ));
            }
        }
        if !(self.constraint_penalty.is_finite() && self.constraint_penalty >= 0.0) {
            return Err(Error::config(
                "mfea.constraint_penalty",
                "must be a non-negative number",
            ));
        }
        Ok(())
    }

    pub fn mutation_prob_for(&self, dim: usize) -> f64 {
        self.mutation_prob.unwrap_or(1.0 / dim.max(1) as f64)
    }
}

/// Where an evaluation sits in the run. `seed` is shared by every evaluation
/// of the same generation; `slot` is the candidate's position in the batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalContext {
    pub generation: usize,
    pub slot: usize,
    pub seed: u64,
}

/// Objective functions of the tasks being solved. Lower is better.
pub trait Evaluator: Sync {
    fn num_tasks(&self) -> usize;

    /// Dimension of the unified space.
    fn dimension(&self) -> usize;

    fn objective(&self, genome: &UnifiedGenome, task: usize, ctx: EvalContext) -> Result<f64>;

    /// Total constraint violation; unconstrained tasks keep the default.
    fn constraint_violation(&self, _genome: &UnifiedGenome, _task: usize) -> f64 {
        0.0
    }
}

/// One crossover-branch mating and what it achieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossoverEvent {
    pub generation: usize,
    pub parent_skill_a: usize,
    pub parent_skill_b: usize,
    pub offspring_assigned_task: usize,
    /// A child beat the population's best cost on the assigned task.
    pub improved: bool,
}

impl CrossoverEvent {
    /// Skill factor of the parent whose task did not receive the children.
    /// Equal to the assignee for same-skill matings.
    pub fn donor(&self) -> usize {
        if self.parent_skill_a == self.offspring_assigned_task {
            self.parent_skill_b
        } else {
            self.parent_skill_a
        }
    }
}

/// Result of mating two parents.
#[derive(Debug, Clone, PartialEq)]
pub struct Offspring {
    pub children: [UnifiedGenome; 2],
    /// Evaluation task of each child.
    pub tasks: [usize; 2],
    pub crossover: bool,
}

/// Operator parameters resolved for a given dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatingParams {
    pub rmp: f64,
    pub sbx_eta: f64,
    pub mutation_eta: f64,
    pub mutation_prob: f64,
}

impl MatingParams {
    pub fn new(cfg: &MfeaConfig, dim: usize) -> Self {
        MatingParams {
            rmp: cfg.rmp,
            sbx_eta: cfg.sbx_eta,
            mutation_eta: cfg.mutation_eta,
            mutation_prob: cfg.mutation_prob_for(dim),
        }
    }
}

/// Evaluation task of a child: the sole parent's skill, or one of the two
/// parents' skills chosen uniformly.
pub fn assign_evaluation_task(parent_skills: &[usize], rng: &mut impl Rng) -> usize {
    match parent_skills {
        [only] => *only,
        [a, b] if a == b => *a,
        [a, b] => {
            if rng.gen_bool(0.5) {
                *a
            } else {
                *b
            }
        }
        _ => panic!("a child has one or two parents"),
    }
}

/// Assortative mating: crossover plus mutation when the parents share a
/// skill factor or a uniform draw falls below `rmp`, otherwise each parent
/// is mutated alone. Crossover children share one evaluation task drawn from
/// the parents' skills.
pub fn assortative_mating(
    p1: &Candidate,
    p2: &Candidate,
    params: &MatingParams,
    rng: &mut impl Rng,
) -> Result<Offspring> {
    let (s1, s2) = (p1.record.skill_factor, p2.record.skill_factor);
    let draw: f64 = rng.gen();
    if s1 == s2 || draw < params.rmp {
        let (mut c1, mut c2) = sbx_crossover(&p1.genome, &p2.genome, params.sbx_eta, rng)?;
        operators::polynomial_mutation_in_place(&mut c1, params.mutation_eta, params.mutation_prob, rng);
        operators::polynomial_mutation_in_place(&mut c2, params.mutation_eta, params.mutation_prob, rng);
        let task = assign_evaluation_task(&[s1, s2], rng);
        Ok(Offspring {
            children: [c1, c2],
            tasks: [task, task],
            crossover: true,
        })
    } else {
        let c1 = polynomial_mutation(&p1.genome, params.mutation_eta, params.mutation_prob, rng);
        let c2 = polynomial_mutation(&p2.genome, params.mutation_eta, params.mutation_prob, rng);
        Ok(Offspring {
            children: [c1, c2],
            tasks: [assign_evaluation_task(&[s1], rng), assign_evaluation_task(&[s2], rng)],
            crossover: false,
        })
    }
}

/// Population statistics of one task's factorial costs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskStats {
    /// Lowest cost among candidates evaluated on the task.
    pub best: Option<f64>,
    pub mean: Option<f64>,
    /// Population standard deviation (divisor n).
    pub std: Option<f64>,
    pub evaluated: usize,
    /// Candidates whose skill factor is this task.
    pub specialists: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub tasks: Vec<TaskStats>,
    /// Cumulative single-task evaluations so far.
    pub evaluations: usize,
    pub crossover_matings: usize,
    pub mutation_matings: usize,
}

fn population_stats(pop: &[Candidate], num_tasks: usize) -> Vec<TaskStats> {
    (0..num_tasks)
        .map(|k| {
            let costs: Vec<f64> = pop.iter().filter_map(|c| c.record.costs[k]).collect();
            let specialists = pop.iter().filter(|c| c.record.skill_factor == k).count();
            let (mean, std) = crate::stats::mean_std(&costs)
                .map(|(m, s)| (Some(m), Some(s)))
                .unwrap_or((None, None));
            TaskStats {
                best: costs.iter().copied().min_by(f64::total_cmp),
                mean,
                std,
                evaluated: costs.len(),
                specialists,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestRecord {
    pub genome: UnifiedGenome,
    pub cost: f64,
    pub generation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct EvaluationCount {
    /// Initial candidates (each evaluated on every task).
    pub initial_candidates: usize,
    pub initial_task_evaluations: usize,
    pub offspring_evaluations: usize,
}

impl EvaluationCount {
    pub fn total(&self) -> usize {
        self.initial_task_evaluations + self.offspring_evaluations
    }
}

/// Complete state of a run between generations.
#[derive(Debug, Clone, PartialEq)]
pub struct MfeaState {
    pub config: MfeaConfig,
    pub num_tasks: usize,
    pub dimension: usize,
    /// Completed generations.
    pub generation: usize,
    pub population: Vec<Candidate>,
    pub best: Vec<BestRecord>,
    pub initial: GenerationStats,
    pub history: Vec<GenerationStats>,
    pub events: Vec<CrossoverEvent>,
    pub evaluations: EvaluationCount,
    pub crossover_matings: usize,
    pub mutation_matings: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MfeaResult {
    /// Best-ever candidate per task.
    pub best: Vec<BestRecord>,
    pub initial: GenerationStats,
    /// Statistics after each generation `1..=G`.
    pub history: Vec<GenerationStats>,
    pub events: Vec<CrossoverEvent>,
    pub evaluations: EvaluationCount,
    pub crossover_matings: usize,
    pub mutation_matings: usize,
    pub final_population: Vec<Candidate>,
}

impl MfeaState {
    /// Random population evaluated on every task.
    pub fn initialize(config: MfeaConfig, evaluator: &impl Evaluator, exec: Execution) -> Result<Self> {
        config.validate()?;
        let k = evaluator.num_tasks();
        let dim = evaluator.dimension();
        if k == 0 {
            return Err(Error::config("tasks", "at least one task is required"));
        }
        let p = config.population_size;
        let genomes: Vec<UnifiedGenome> = (0..p)
            .map(|i| UnifiedGenome::random_with_dim(dim, seeds::derive(config.seed, &[tag::INIT, i as u64])))
            .collect();
        let ctx_seed = seeds::derive(config.seed, &[tag::FITNESS, 0]);
        let jobs: Vec<(usize, usize)> = (0..p).flat_map(|i| (0..k).map(move |t| (i, t))).collect();
        let penalty = config.constraint_penalty;
        let costs = exec.try_map(&jobs, |&(i, t)| {
            factorial_cost(
                evaluator,
                &genomes[i],
                t,
                penalty,
                EvalContext {
                    generation: 0,
                    slot: i,
                    seed: ctx_seed,
                },
            )
        })?;
        let mut population: Vec<Candidate> = genomes
            .into_iter()
            .enumerate()
            .map(|(i, genome)| Candidate {
                genome,
                record: FactorialRecord::unranked(costs[i * k..(i + 1) * k].iter().copied().map(Some).collect()),
                birth: 0,
            })
            .collect();
        update_records(&mut population)?;

        let best = (0..k)
            .map(|t| {
                let c = population
                    .iter()
                    .min_by(|a, b| cost_of(a, t).total_cmp(&cost_of(b, t)))
                    .expect("non-empty population");
                BestRecord {
                    genome: c.genome.clone(),
                    cost: cost_of(c, t),
                    generation: 0,
                }
            })
            .collect();
        let evaluations = EvaluationCount {
            initial_candidates: p,
            initial_task_evaluations: p * k,
            offspring_evaluations: 0,
        };
        let initial = GenerationStats {
            generation: 0,
            tasks: population_stats(&population, k),
            evaluations: evaluations.total(),
            crossover_matings: 0,
            mutation_matings: 0,
        };
        Ok(MfeaState {
            config,
            num_tasks: k,
            dimension: dim,
            generation: 0,
            population,
            best,
            initial,
            history: Vec::new(),
            events: Vec::new(),
            evaluations,
            crossover_matings: 0,
            mutation_matings: 0,
        })
    }

    pub fn is_finished(&self) -> bool {
        self.generation >= self.config.generations
    }

    /// Run one generation: mating, single-task evaluation of every child,
    /// merge, re-rank and scalar-fitness selection.
    pub fn step(&mut self, evaluator: &impl Evaluator, exec: Execution) -> Result<()> {
        if evaluator.num_tasks() != self.num_tasks || evaluator.dimension() != self.dimension {
            return Err(Error::usage("evaluator does not match the run state"));
        }
        let g = self.generation + 1;
        let p = self.config.population_size;
        let k = self.num_tasks;
        let params = MatingParams::new(&self.config, self.dimension);
        let mut rng = seeds::rng(seeds::derive(self.config.seed, &[tag::GENERATION, g as u64]));

        let mut order: Vec<usize> = (0..p).collect();
        order.shuffle(&mut rng);

        let mut children: Vec<(UnifiedGenome, usize)> = Vec::with_capacity(p);
        // (pair index, parent skills, task) for crossover matings
        let mut pending: Vec<(usize, usize, usize, usize)> = Vec::new();
        let mut crossovers = 0;
        for (pair, idx) in order.chunks_exact(2).enumerate() {
            let (a, b) = (&self.population[idx[0]], &self.population[idx[1]]);
            let off = assortative_mating(a, b, &params, &mut rng)?;
            if off.crossover {
                crossovers += 1;
                pending.push((pair, a.record.skill_factor, b.record.skill_factor, off.tasks[0]));
            }
            let [c1, c2] = off.children;
            children.push((c1, off.tasks[0]));
            children.push((c2, off.tasks[1]));
        }

        let baseline: Vec<Option<f64>> = (0..k)
            .map(|t| {
                self.population
                    .iter()
                    .filter_map(|c| c.record.costs[t])
                    .min_by(f64::total_cmp)
            })
            .collect();

        let ctx_seed = seeds::derive(self.config.seed, &[tag::FITNESS, g as u64]);
        let penalty = self.config.constraint_penalty;
        let slots: Vec<usize> = (0..children.len()).collect();
        let costs = exec.try_map(&slots, |&i| {
            let (genome, task) = &children[i];
            factorial_cost(
                evaluator,
                genome,
                *task,
                penalty,
                EvalContext {
                    generation: g,
                    slot: i,
                    seed: ctx_seed,
                },
            )
        })?;

        for (pair, sa, sb, task) in pending {
            let best_child = costs[2 * pair].min(costs[2 * pair + 1]);
            let improved = baseline[task].is_none_or(|b| best_child < b);
            self.events.push(CrossoverEvent {
                generation: g,
                parent_skill_a: sa,
                parent_skill_b: sb,
                offspring_assigned_task: task,
                improved,
            });
        }

        for ((genome, task), &cost) in children.iter().zip(&costs) {
            if cost < self.best[*task].cost {
                self.best[*task] = BestRecord {
                    genome: genome.clone(),
                    cost,
                    generation: g,
                };
            }
        }

        let mut merged = std::mem::take(&mut self.population);
        merged.extend(children.into_iter().zip(costs).map(|((genome, task), cost)| {
            let mut c = vec![None; k];
            c[task] = Some(cost);
            Candidate {
                genome,
                record: FactorialRecord::unranked(c),
                birth: g,
            }
        }));
        update_records(&mut merged)?;
        let mut survivors = select_survivors(merged, p)?;
        update_records(&mut survivors)?;
        self.population = survivors;

        self.generation = g;
        self.evaluations.offspring_evaluations += p;
        self.crossover_matings += crossovers;
        self.mutation_matings += p / 2 - crossovers;
        self.history.push(GenerationStats {
            generation: g,
            tasks: population_stats(&self.population, k),
            evaluations: self.evaluations.total(),
            crossover_matings: self.crossover_matings,
            mutation_matings: self.mutation_matings,
        });
        Ok(())
    }

    pub fn into_result(self) -> MfeaResult {
        MfeaResult {
            best: self.best,
            initial: self.initial,
            history: self.history,
            events: self.events,
            evaluations: self.evaluations,
            crossover_matings: self.crossover_matings,
            mutation_matings: self.mutation_matings,
            final_population: self.population,
        }
    }
}

fn cost_of(c: &Candidate, task: usize) -> f64 {
    c.record.costs[task].unwrap_or(f64::INFINITY)
}

fn factorial_cost(
    evaluator: &impl Evaluator,
    genome: &UnifiedGenome,
    task: usize,
    penalty: f64,
    ctx: EvalContext,
) -> Result<f64> {
    let f = evaluator.objective(genome, task, ctx)?;
    if penalty == 0.0 {
        Ok(f)
    } else {
        Ok(f + penalty * evaluator.constraint_violation(genome, task))
    }
}

/// Run the full algorithm for `config.generations` generations.
pub fn run_mfea(config: MfeaConfig, evaluator: &impl Evaluator, exec: Execution) -> Result<MfeaResult> {
    let mut state = MfeaState::initialize(config, evaluator, exec)?;
    while !state.is_finished() {
        state.step(evaluator, exec)?;
    }
    Ok(state.into_result())
}
