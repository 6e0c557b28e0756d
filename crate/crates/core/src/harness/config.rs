//! Experiment configuration files.
//!
//! ```json
//! {
//!   "name": "rq2_cartpole",
//!   "tasks": ["cartpole:A", "cartpole:B", {"preset": "cartpole:C", "max_steps": 300}],
//!   "architecture": {"hidden": [16, 16, 8], "activation": "relu",
//!                    "shared_layers": 3, "weight_bound": 4.0},
//!   "mfea": {"population_size": 100, "generations": 60, "rmp": 0.3},
//!   "episodes": {"fitness": 50, "test": 250, "seed_policy": "fixed_set"},
//!   "runs": 5,
//!   "base_seed": 2020,
//!   "output_dir": "out/rq2_cartpole",
//!   "checkpoint_every": 10
//! }
//! ```
//!
//! Every section except `name` and `tasks` is optional. The `seed` field of
//! `mfea` is ignored: run seeds derive from `base_seed`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::presets;
use crate::error::{Error, Result};
use crate::evaluator::{EpisodeSeedPolicy, TaskSpec};
use crate::mfea::MfeaConfig;
use crate::policy::Activation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskEntry {
    Preset(String),
    Detailed(TaskOverrides),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskOverrides {
    pub preset: String,
    #[serde(default)]
    pub max_steps: Option<usize>,
    #[serde(default)]
    pub torque_bins: Option<usize>,
}

impl TaskEntry {
    pub fn preset(&self) -> &str {
        match self {
            TaskEntry::Preset(p) => p,
            TaskEntry::Detailed(d) => &d.preset,
        }
    }
}

fn default_hidden() -> Vec<usize> {
    vec![16, 16, 8]
}
fn default_shared() -> usize {
    3
}
fn default_bound() -> f64 {
    crate::genome::DEFAULT_WEIGHT_BOUND
}
fn default_fitness_episodes() -> usize {
    50
}
fn default_test_episodes() -> usize {
    250
}
fn default_runs() -> usize {
    5
}
fn default_checkpoint_every() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureSection {
    #[serde(default = "default_hidden")]
    pub hidden: Vec<usize>,
    #[serde(default)]
    pub activation: Activation,
    #[serde(default = "default_shared")]
    pub shared_layers: usize,
    #[serde(default = "default_bound")]
    pub weight_bound: f64,
}

impl Default for ArchitectureSection {
    fn default() -> Self {
        ArchitectureSection {
            hidden: default_hidden(),
            activation: Activation::default(),
            shared_layers: default_shared(),
            weight_bound: default_bound(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpisodeSection {
    #[serde(default = "default_fitness_episodes")]
    pub fitness: usize,
    #[serde(default = "default_test_episodes")]
    pub test: usize,
    #[serde(default)]
    pub seed_policy: EpisodeSeedPolicy,
}

impl Default for EpisodeSection {
    fn default() -> Self {
        EpisodeSection {
            fitness: default_fitness_episodes(),
            test: default_test_episodes(),
            seed_policy: EpisodeSeedPolicy::default(),
        }
    }
}

/// Configuration file contents as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub name: String,
    pub tasks: Vec<TaskEntry>,
    #[serde(default)]
    pub architecture: ArchitectureSection,
    #[serde(default)]
    pub mfea: MfeaConfig,
    #[serde(default)]
    pub episodes: EpisodeSection,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Generations between checkpoints; 0 disables intermediate ones.
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: usize,
}

/// Validated experiment with presets expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub tasks: Vec<TaskSpec>,
    pub shared_layers: usize,
    pub weight_bound: f64,
    pub mfea: MfeaConfig,
    pub runs: usize,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    pub checkpoint_every: usize,
    pub raw: RawConfig,
}

impl ExperimentConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        if raw.name.trim().is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        if raw.tasks.is_empty() {
            return Err(Error::config("tasks", "at least one task is required"));
        }
        if raw.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if raw.episodes.fitness == 0 {
            return Err(Error::config("episodes.fitness", "must be at least 1"));
        }
        if raw.episodes.test == 0 {
            return Err(Error::config("episodes.test", "must be at least 1"));
        }
        if raw.architecture.hidden.is_empty() || raw.architecture.hidden.contains(&0) {
            return Err(Error::config(
                "architecture.hidden",
                "needs at least one hidden layer, all widths positive",
            ));
        }
        let n_layers = raw.architecture.hidden.len() + 1;
        if raw.architecture.shared_layers == 0 || raw.architecture.shared_layers >= n_layers {
            return Err(Error::config(
                "architecture.shared_layers",
                format!("must be in [1, {n_layers}), got {}", raw.architecture.shared_layers),
            ));
        }
        let b = raw.architecture.weight_bound;
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::config("architecture.weight_bound", "must be a positive number"));
        }
        raw.mfea.validate()?;

        let mut tasks = Vec::with_capacity(raw.tasks.len());
        for (i, entry) in raw.tasks.iter().enumerate() {
            let path = format!("tasks[{i}]");
            let mut env = presets::preset(entry.preset())
                .map_err(|_| Error::config(&path, format!("unknown preset `{}`", entry.preset())))?;
            if let TaskEntry::Detailed(d) = entry {
                if let Some(n) = d.max_steps {
                    env.max_steps = n;
                }
                if let Some(n) = d.torque_bins {
                    env.torque_bins = n;
                }
            }
            env.validate().map_err(|e| match e {
                Error::Config { path: field, message } => Error::config(format!("{path}.{field}"), message),
                other => other,
            })?;
            if tasks
                .iter()
                .any(|t: &TaskSpec| t.label == entry.preset() && t.env == env)
            {
                return Err(Error::config(&path, format!("duplicate task `{}`", entry.preset())));
            }
            let mut spec = TaskSpec::new(
                i,
                entry.preset(),
                env,
                &raw.architecture.hidden,
                raw.architecture.activation,
            )?;
            spec.n_fitness_episodes = raw.episodes.fitness;
            spec.n_test_episodes = raw.episodes.test;
            spec.episode_seed_policy = raw.episodes.seed_policy;
            tasks.push(spec);
        }

        let output_dir = raw
            .output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("out").join(&raw.name));
        Ok(ExperimentConfig {
            name: raw.name.clone(),
            tasks,
            shared_layers: raw.architecture.shared_layers,
            weight_bound: raw.architecture.weight_bound,
            mfea: raw.mfea.clone(),
            runs: raw.runs,
            base_seed: raw.base_seed,
            output_dir,
            checkpoint_every: raw.checkpoint_every,
            raw,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_raw(parse_raw(text, Path::new("<inline>"))?)
    }

    /// Hex SHA-256 of the canonical JSON form of the configuration, output
    /// directory excluded.
    pub fn config_hash(&self) -> String {
        let raw = RawConfig {
            output_dir: None,
            ..self.raw.clone()
        };
        let canonical = serde_json::to_vec(&raw).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn task_labels(&self) -> Vec<String> {
        self.tasks.iter().map(|t| t.label.clone()).collect()
    }

    /// Replace the base seed (and the echoed raw value).
    pub fn set_base_seed(&mut self, seed: u64) {
        self.base_seed = seed;
        self.raw.base_seed = seed;
    }

    pub fn set_output_dir(&mut self, dir: PathBuf) {
        self.raw.output_dir = Some(dir.clone());
        self.output_dir = dir;
    }
}

fn parse_raw(text: &str, path: &Path) -> Result<RawConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        Error::Config {
            path: if field == "." {
                path.display().to_string()
            } else {
                field
            },
            message: e.into_inner().to_string(),
        }
    })
}

/// Read and validate an experiment configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentConfig::from_raw(parse_raw(&text, path)?)
}
