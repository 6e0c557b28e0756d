//! Policy fitness: decode a genome for one task and roll out greedy episodes.

use serde::{Deserialize, Serialize};

use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::genome::{PartitionMap, UnifiedGenome};
use crate::mfea::{EvalContext, Evaluator};
use crate::policy::{Activation, Architecture, Policy, WeightVector};
use crate::seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeSeedPolicy {
    /// Every candidate of a generation sees the same block of episodes.
    #[default]
    FixedSet,
    /// Each evaluation draws its own block.
    PerCall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub index: usize,
    pub label: String,
    pub env: EnvConfig,
    pub architecture: Architecture,
    pub n_fitness_episodes: usize,
    pub n_test_episodes: usize,
    pub episode_seed_policy: EpisodeSeedPolicy,
}

impl TaskSpec {
    /// Task whose network maps the environment's observations through
    /// `hidden` layers to one value per action.
    pub fn new(
        index: usize,
        label: impl Into<String>,
        env: EnvConfig,
        hidden: &[usize],
        activation: Activation,
    ) -> Result<Self> {
        env.validate()?;
        let architecture = Architecture::mlp(env.observation_dim(), hidden, env.action_count(), activation)?;
        Ok(TaskSpec {
            index,
            label: label.into(),
            env,
            architecture,
            n_fitness_episodes: 50,
            n_test_episodes: 250,
            episode_seed_policy: EpisodeSeedPolicy::FixedSet,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.env.validate()?;
        if self.n_fitness_episodes == 0 {
            return Err(Error::config("n_fitness_episodes", "must be at least 1"));
        }
        if self.architecture.input_dim() != self.env.observation_dim()
            || self.architecture.output_dim() != self.env.action_count()
        {
            return Err(Error::config(
                "architecture",
                format!(
                    "network is {}→{} but {} needs {}→{}",
                    self.architecture.input_dim(),
                    self.architecture.output_dim(),
                    self.env.env_id,
                    self.env.observation_dim(),
                    self.env.action_count()
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mean_reward: f64,
    pub std_reward: f64,
    pub per_episode_rewards: Vec<f64>,
    pub episodes_used: usize,
}

impl EvalReport {
    fn from_rewards(rewards: Vec<f64>) -> Self {
        let (mean, std) = crate::stats::mean_std(&rewards).unwrap_or((f64::NAN, f64::NAN));
        EvalReport {
            mean_reward: mean,
            std_reward: std,
            episodes_used: rewards.len(),
            per_episode_rewards: rewards,
        }
    }
}

/// Total reward of one greedy episode.
pub fn rollout(env: &EnvConfig, policy: &mut Policy<'_>, episode_seed: u64) -> Result<f64> {
    let (mut state, mut obs) = env.reset(episode_seed)?;
    let mut total = 0.0;
    loop {
        let action = policy.act(&obs)?;
        let (next, step) = env.step(&state, action)?;
        total += step.reward;
        if step.done {
            return Ok(total);
        }
        state = next;
        obs = step.observation;
    }
}

fn episode_rewards(task: &TaskSpec, weights: &WeightVector, episode_seeds: &[u64]) -> Result<Vec<f64>> {
    let mut policy = Policy::new(&task.architecture, weights)?;
    episode_seeds
        .iter()
        .map(|&s| rollout(&task.env, &mut policy, s))
        .collect()
}

/// Factorial objective of `genome` on `task`: the negated mean episodic
/// reward over `n_fitness_episodes` episodes keyed by `seed`.
pub fn fitness(genome: &UnifiedGenome, task: &TaskSpec, map: &PartitionMap, seed: u64) -> Result<f64> {
    let weights = genome.decode(task.index, map)?;
    let rewards = episode_rewards(task, &weights, &seeds::episode_seeds(seed, task.n_fitness_episodes))?;
    Ok(-(rewards.iter().sum::<f64>() / rewards.len() as f64))
}

/// Reward statistics of `genome` on `n_episodes` episodes keyed by `seed`.
pub fn test_model(
    genome: &UnifiedGenome,
    task: &TaskSpec,
    map: &PartitionMap,
    n_episodes: usize,
    seed: u64,
    exec: Execution,
) -> Result<EvalReport> {
    if n_episodes == 0 {
        return Err(Error::usage("test needs at least one episode"));
    }
    let weights = genome.decode(task.index, map)?;
    Policy::new(&task.architecture, &weights)?;
    let episode_seeds = seeds::episode_seeds(seed, n_episodes);
    let rewards = exec.try_map(&episode_seeds, |&s| {
        let mut policy = Policy::new(&task.architecture, &weights)?;
        rollout(&task.env, &mut policy, s)
    })?;
    Ok(EvalReport::from_rewards(rewards))
}

/// Evaluator over a set of reinforcement-learning tasks sharing one
/// partition map.
#[derive(Debug, Clone)]
pub struct RlEvaluator {
    pub tasks: Vec<TaskSpec>,
    pub map: PartitionMap,
}

impl RlEvaluator {
    pub fn new(tasks: Vec<TaskSpec>, shared_layers: usize, weight_bound: f64) -> Result<Self> {
        for (i, t) in tasks.iter().enumerate() {
            t.validate()?;
            if t.index != i {
                return Err(Error::usage(format!(
                    "task `{}` has index {} at position {i}",
                    t.label, t.index
                )));
            }
        }
        let archs: Vec<Architecture> = tasks.iter().map(|t| t.architecture.clone()).collect();
        let map = PartitionMap::build(&archs, shared_layers)?.with_weight_bound(weight_bound)?;
        Ok(RlEvaluator { tasks, map })
    }

    fn episode_seed(&self, task: usize, ctx: EvalContext) -> u64 {
        match self.tasks[task].episode_seed_policy {
            EpisodeSeedPolicy::FixedSet => ctx.seed,
            EpisodeSeedPolicy::PerCall => seeds::derive(ctx.seed, &[ctx.slot as u64]),
        }
    }
}

impl Evaluator for RlEvaluator {
    fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    fn dimension(&self) -> usize {
        self.map.total_dim
    }

    fn objective(&self, genome: &UnifiedGenome, task: usize, ctx: EvalContext) -> Result<f64> {
        let spec = self
            .tasks
            .get(task)
            .ok_or_else(|| Error::usage(format!("task index {task} out of range")))?;
        fitness(genome, spec, &self.map, self.episode_seed(task, ctx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task(env: EnvConfig) -> TaskSpec {
        TaskSpec::new(0, "t", env, &[16, 16, 8], Activation::Relu).unwrap()
    }

    fn single(t: &TaskSpec) -> PartitionMap {
        PartitionMap::build(std::slice::from_ref(&t.architecture), 3).unwrap()
    }

    #[test]
    fn cartpole_fitness_bounds_and_determinism() {
        let mut t = task(EnvConfig::cartpole(0.6));
        t.n_fitness_episodes = 5;
        let map = single(&t);
        for seed in 0..5 {
            let g = UnifiedGenome::random(&map, seed);
            let f = fitness(&g, &t, &map, 11).unwrap();
            assert!((-300.0..=-1.0).contains(&f), "{f}");
            assert_eq!(f, fitness(&g, &t, &map, 11).unwrap());
        }
    }

    #[test]
    fn zero_weight_pendulum_matches_scripted_rollout() {
        let mut t = task(EnvConfig::pendulum(8.0, 2.0));
        t.n_fitness_episodes = 4;
        let map = single(&t);
        let g = UnifiedGenome(vec![0.5; map.total_dim]);
        let seed = 21;
        // scripted: constant action 0 (−max torque)
        let scripted: f64 = seeds::episode_seeds(seed, 4)
            .into_iter()
            .map(|s| {
                let (mut st, _) = t.env.reset(s).unwrap();
                let mut total = 0.0;
                loop {
                    let (n, r) = t.env.step(&st, 0).unwrap();
                    total += r.reward;
                    st = n;
                    if r.done {
                        break total;
                    }
                }
            })
            .sum::<f64>()
            / 4.0;
        assert_eq!(fitness(&g, &t, &map, seed).unwrap(), -scripted);
    }

    #[test]
    fn single_episode_report() {
        let t = task(EnvConfig::acrobot(1.0));
        let map = single(&t);
        let g = UnifiedGenome::random(&map, 3);
        let r = test_model(&g, &t, &map, 1, 5, Execution::Sequential).unwrap();
        assert_eq!(r.episodes_used, 1);
        assert_eq!(r.std_reward, 0.0);
        assert_eq!(r.mean_reward, r.per_episode_rewards[0]);
        assert!(test_model(&g, &t, &map, 0, 5, Execution::Sequential).is_err());
    }

    #[test]
    fn fitness_is_negated_test_mean() {
        let mut t = task(EnvConfig::cartpole(0.5));
        t.n_fitness_episodes = 7;
        let map = single(&t);
        let g = UnifiedGenome::random(&map, 8);
        let f = fitness(&g, &t, &map, 99).unwrap();
        let r = test_model(&g, &t, &map, 7, 99, Execution::Parallel).unwrap();
        assert_eq!(f, -r.mean_reward);
    }

    #[test]
    fn per_call_policy_varies_with_slot() {
        let mut t = task(EnvConfig::pendulum(8.0, 2.0));
        t.n_fitness_episodes = 3;
        t.episode_seed_policy = EpisodeSeedPolicy::PerCall;
        let ev = RlEvaluator::new(vec![t], 3, 4.0).unwrap();
        let g = UnifiedGenome::random(&ev.map, 1);
        let ctx = |slot| EvalContext {
            generation: 1,
            slot,
            seed: 5,
        };
        let a = ev.objective(&g, 0, ctx(0)).unwrap();
        let b = ev.objective(&g, 0, ctx(1)).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, ev.objective(&g, 0, ctx(0)).unwrap());
    }

    #[test]
    fn mismatched_architecture_rejected() {
        let mut t = task(EnvConfig::cartpole(0.5));
        t.architecture = Architecture::mlp(3, &[4], 2, Activation::Relu).unwrap();
        assert!(matches!(t.validate(), Err(Error::Config { .. })));
    }
}
