//! Experiment runs and their on-disk artifacts.
//!
//! Layout of an output directory:
//!
//! ```text
//! curves_run{r}.csv     per generation and task: best/mean/std population reward
//! events_run{r}.csv     crossover-event ledger
//! transfer_run{r}.csv   effective-crossover matrix
//! run{r}_result.json    test statistics of run r (used by resume)
//! curves.csv            long-format curves of every run
//! curves_aggregate.csv  across-run mean ± std per generation and task
//! summary.csv           test reward per task across runs
//! best_genomes/         best genome of every task and run, with JSON sidecars
//! checkpoints/          resumable run state
//! manifest.json         config echo, hash, seeds, budget accounting
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, RawConfig};
use super::emit::{self, CurveRow, SummaryRow};
use super::transfer::{compute_transfer_matrix, write_events_csv};
use crate::error::{Error, Result};
use crate::evaluator::{test_model, EvalReport, RlEvaluator};
use crate::exec::{with_workers, Execution};
use crate::genome::{load_genome, save_genome, GenomeSidecar};
use crate::mfea::{checkpoint, EvaluationCount, MfeaConfig, MfeaState};
use crate::seeds::{self, tag};
use crate::stats::mean_std;

/// Size of the unified space reported for the original twelve-task network.
pub const REFERENCE_UNIFIED_DIM: usize = 962;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Worker threads for parallel evaluation; `None` uses the global pool.
    pub workers: Option<usize>,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub task: String,
    pub mean_reward: f64,
    pub std_reward: f64,
    pub rewards: Vec<f64>,
    /// Fitness-episode reward of the tested genome when it was selected.
    pub fitness_reward: f64,
    pub found_at_generation: usize,
}

/// Everything an experiment keeps about one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub curves: Vec<CurveRow>,
    pub initial: Vec<CurveRow>,
    pub tests: Vec<TestRecord>,
    pub evaluations: EvaluationCount,
    pub crossover_matings: usize,
    pub mutation_matings: usize,
    pub logged_events: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub population_size: usize,
    pub generations: usize,
    pub num_tasks: usize,
    pub initial_candidates: usize,
    pub initial_task_evaluations: usize,
    pub offspring_evaluations: usize,
    /// Initial candidates plus offspring evaluations, `P + G·P`.
    pub candidate_evaluations: usize,
    /// Initial task evaluations plus offspring evaluations, `P·K + G·P`.
    pub task_evaluations: usize,
}

impl Budget {
    pub fn planned(cfg: &ExperimentConfig) -> Self {
        let p = cfg.mfea.population_size;
        let g = cfg.mfea.generations;
        let k = cfg.tasks.len();
        Budget {
            population_size: p,
            generations: g,
            num_tasks: k,
            initial_candidates: p,
            initial_task_evaluations: p * k,
            offspring_evaluations: g * p,
            candidate_evaluations: p + g * p,
            task_evaluations: p * k + g * p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnifiedSpaceReport {
    pub total_dim: usize,
    pub shared_dim: usize,
    pub task_dims: Vec<usize>,
    pub reference_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub version: String,
    pub status: String,
    pub error: Option<String>,
    pub config_hash: String,
    pub config: RawConfig,
    pub base_seed: u64,
    pub run_seeds: Vec<u64>,
    pub completed_runs: Vec<usize>,
    pub budget: Budget,
    /// Evaluation counts measured in each completed run.
    pub measured_evaluations: Vec<EvaluationCount>,
    pub unified_space: UnifiedSpaceReport,
    pub files: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub output_dir: PathBuf,
    pub runs: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub manifest: Manifest,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointContext {
    experiment: RawConfig,
    run: usize,
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    evaluator: RlEvaluator,
    exec: Execution,
    out: PathBuf,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig, exec: Execution) -> Result<Self> {
        let evaluator = RlEvaluator::new(cfg.tasks.clone(), cfg.shared_layers, cfg.weight_bound)?;
        Ok(Runner {
            cfg,
            evaluator,
            exec,
            out: cfg.output_dir.clone(),
        })
    }

    fn mfea_config(&self, run: usize) -> MfeaConfig {
        MfeaConfig {
            seed: seeds::run_seed(self.cfg.base_seed, run),
            ..self.cfg.mfea.clone()
        }
    }

    fn checkpoint_stem(&self, run: usize) -> PathBuf {
        self.out.join("checkpoints").join(format!("run{run}"))
    }

    fn save_checkpoint(&self, run: usize, state: &MfeaState) -> Result<()> {
        let ctx = CheckpointContext {
            experiment: self.cfg.raw.clone(),
            run,
        };
        checkpoint::save(
            &self.checkpoint_stem(run),
            state,
            serde_json::to_value(ctx).expect("context serializes"),
        )?;
        Ok(())
    }

    /// Run (or continue) run `run` to completion and write its artifacts.
    fn execute(&self, run: usize, resume_from: Option<MfeaState>) -> Result<RunRecord> {
        let mut state = match resume_from {
            Some(s) => s,
            None => {
                let s = MfeaState::initialize(self.mfea_config(run), &self.evaluator, self.exec)?;
                if self.cfg.checkpoint_every > 0 {
                    self.save_checkpoint(run, &s)?;
                }
                s
            }
        };
        while !state.is_finished() {
            state.step(&self.evaluator, self.exec)?;
            if self.cfg.checkpoint_every > 0 && state.generation % self.cfg.checkpoint_every == 0 {
                self.save_checkpoint(run, &state)?;
            }
        }
        self.save_checkpoint(run, &state)?;
        let seed = state.config.seed;
        let result = state.into_result();
        let labels = self.cfg.task_labels();

        let curves = emit::curve_rows(&result.history, &labels, run);
        let initial = emit::curve_rows(std::slice::from_ref(&result.initial), &labels, run);
        emit::write_rows(&self.out.join(format!("curves_run{run}.csv")), &curves)?;

        let events_path = self.out.join(format!("events_run{run}.csv"));
        let f = fs::File::create(&events_path).map_err(|e| Error::io(&events_path, e))?;
        write_events_csv(&result.events, f)?;

        let matrix = compute_transfer_matrix(&result.events, labels.len())?;
        let matrix_path = self.out.join(format!("transfer_run{run}.csv"));
        let f = fs::File::create(&matrix_path).map_err(|e| Error::io(&matrix_path, e))?;
        matrix.write_csv(&labels, f)?;

        let genome_dir = self.out.join("best_genomes");
        create_dir(&genome_dir)?;
        let mut tests = Vec::with_capacity(labels.len());
        for (k, task) in self.cfg.tasks.iter().enumerate() {
            let best = &result.best[k];
            save_genome(
                &genome_dir.join(format!("run{run}_task{k}.bin")),
                &best.genome,
                &GenomeSidecar {
                    partition_map: self.evaluator.map.clone(),
                    tasks: self.cfg.tasks.clone(),
                    task_index: Some(k),
                },
            )?;
            let test_seed = seeds::derive(seed, &[tag::TEST, k as u64]);
            let report: EvalReport = test_model(
                &best.genome,
                task,
                &self.evaluator.map,
                task.n_test_episodes,
                test_seed,
                self.exec,
            )?;
            tests.push(TestRecord {
                task: task.label.clone(),
                mean_reward: report.mean_reward,
                std_reward: report.std_reward,
                rewards: report.per_episode_rewards,
                fitness_reward: -best.cost,
                found_at_generation: best.generation,
            });
        }

        let record = RunRecord {
            run,
            seed,
            curves,
            initial,
            tests,
            evaluations: result.evaluations,
            crossover_matings: result.crossover_matings,
            mutation_matings: result.mutation_matings,
            logged_events: result.events.len(),
        };
        write_json(&self.out.join(format!("run{run}_result.json")), &record)?;
        Ok(record)
    }

    fn load_or_execute(&self, run: usize) -> Result<RunRecord> {
        let path = self.out.join(format!("run{run}_result.json"));
        if path.exists() {
            read_json(&path)
        } else {
            self.execute(run, None)
        }
    }

    fn manifest(&self, runs: &[RunRecord], error: Option<String>) -> Manifest {
        let map = &self.evaluator.map;
        let shared_dim = map.shared_slots.iter().map(|s| s.len).sum();
        let mut files = vec![
            "curves.csv".to_string(),
            "curves_aggregate.csv".into(),
            "summary.csv".into(),
        ];
        for r in runs {
            for f in ["curves_run", "events_run", "transfer_run"] {
                files.push(format!("{f}{}.csv", r.run));
            }
        }
        Manifest {
            name: self.cfg.name.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: if error.is_none() { "complete" } else { "failed" }.to_string(),
            error,
            config_hash: self.cfg.config_hash(),
            config: self.cfg.raw.clone(),
            base_seed: self.cfg.base_seed,
            run_seeds: (1..=self.cfg.runs)
                .map(|r| seeds::run_seed(self.cfg.base_seed, r))
                .collect(),
            completed_runs: runs.iter().map(|r| r.run).collect(),
            budget: Budget::planned(self.cfg),
            measured_evaluations: runs.iter().map(|r| r.evaluations).collect(),
            unified_space: UnifiedSpaceReport {
                total_dim: map.total_dim,
                shared_dim,
                task_dims: (0..map.num_tasks).map(|k| map.task_dim(k)).collect(),
                reference_dim: REFERENCE_UNIFIED_DIM,
            },
            files,
        }
    }

    fn finalize(&self, runs: Vec<RunRecord>) -> Result<ExperimentOutcome> {
        let all_curves: Vec<CurveRow> = runs.iter().flat_map(|r| r.curves.iter().cloned()).collect();
        emit::emit_plot_data(&all_curves, &self.out)?;
        let summary = summarize(self.cfg, &runs);
        emit::write_rows(&self.out.join("summary.csv"), &summary)?;
        let manifest = self.manifest(&runs, None);
        write_json(&self.out.join("manifest.json"), &manifest)?;
        Ok(ExperimentOutcome {
            output_dir: self.out.clone(),
            runs,
            summary,
            manifest,
        })
    }

    /// Runs `first..=runs`, continuing `first` from `state` when given.
    fn run_all(&self, first: usize, state: Option<MfeaState>) -> Result<ExperimentOutcome> {
        create_dir(&self.out)?;
        let mut records = Vec::with_capacity(self.cfg.runs);
        let mut state = state;
        let outcome = (|| -> Result<()> {
            for run in 1..=self.cfg.runs {
                let rec = if run < first {
                    self.load_or_execute(run)?
                } else if run == first {
                    self.execute(run, state.take())?
                } else {
                    self.execute(run, None)?
                };
                records.push(rec);
            }
            Ok(())
        })();
        match outcome {
            Ok(()) => self.finalize(records),
            Err(e) => {
                let manifest = self.manifest(&records, Some(e.to_string()));
                // best effort: the original error matters more
                let _ = write_json(&self.out.join("manifest.json"), &manifest);
                Err(e)
            }
        }
    }
}

/// Per-task test statistics across runs.
pub fn summarize(cfg: &ExperimentConfig, runs: &[RunRecord]) -> Vec<SummaryRow> {
    cfg.tasks
        .iter()
        .enumerate()
        .map(|(k, task)| {
            let means: Vec<f64> = runs.iter().map(|r| r.tests[k].mean_reward).collect();
            let stds: Vec<f64> = runs.iter().map(|r| r.tests[k].std_reward).collect();
            let pooled: Vec<f64> = runs.iter().flat_map(|r| r.tests[k].rewards.iter().copied()).collect();
            let (mean, across) = mean_std(&means).unwrap_or((f64::NAN, f64::NAN));
            SummaryRow {
                task: task.label.clone(),
                env: task.env.env_id.to_string(),
                runs: runs.len(),
                episodes_per_run: task.n_test_episodes,
                mean_reward: mean,
                std_across_runs: across,
                mean_within_run_std: mean_std(&stds).map(|m| m.0).unwrap_or(f64::NAN),
                pooled_std: mean_std(&pooled).map(|m| m.1).unwrap_or(f64::NAN),
            }
        })
        .collect()
}

/// Run every run of `cfg` and write all artifacts under `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, opts: RunOptions) -> Result<ExperimentOutcome> {
    with_workers(opts.workers, || Runner::new(cfg, opts.execution)?.run_all(1, None))?
}

/// Continue an experiment from a checkpoint written by [`run_experiment`].
/// Runs finished before the checkpointed one are read back from disk (or
/// recomputed when missing); later runs execute from scratch.
pub fn resume(checkpoint_path: &Path, opts: RunOptions) -> Result<ExperimentOutcome> {
    let (state, context) = checkpoint::load(checkpoint_path)?;
    let ctx: CheckpointContext = serde_json::from_value(context).map_err(|e| Error::Json {
        path: checkpoint_path.to_path_buf(),
        message: format!("checkpoint context: {e}"),
    })?;
    let cfg = ExperimentConfig::from_raw(ctx.experiment)?;
    if ctx.run == 0 || ctx.run > cfg.runs {
        return Err(Error::usage(format!(
            "checkpoint run {} outside 1..={}",
            ctx.run, cfg.runs
        )));
    }
    with_workers(opts.workers, || {
        let runner = Runner::new(&cfg, opts.execution)?;
        if state.dimension != runner.evaluator.map.total_dim || state.num_tasks != cfg.tasks.len() {
            return Err(Error::usage("checkpoint does not match its experiment configuration"));
        }
        runner.run_all(ctx.run, Some(state))
    })?
}

/// Test a saved genome on a preset.
///
/// The decoding task is the sidecar task with the same label. Otherwise the
/// genome's own task (or the first task of the same environment) is decoded
/// and rolled out under the requested preset's configuration.
pub fn test_saved_genome(
    bin_path: &Path,
    preset_name: &str,
    episodes: usize,
    seed: u64,
    opts: RunOptions,
) -> Result<EvalReport> {
    let (genome, sidecar) = load_genome(bin_path)?;
    let env = super::presets::preset(preset_name)?;
    let exact = sidecar.tasks.iter().find(|t| t.label == preset_name);
    let own = sidecar
        .task_index
        .and_then(|k| sidecar.tasks.get(k))
        .filter(|t| t.env.env_id == env.env_id);
    let same_env = sidecar.tasks.iter().find(|t| t.env.env_id == env.env_id);
    let base = exact.or(own).or(same_env).ok_or_else(|| {
        Error::usage(format!(
            "genome {} holds no {} task to test on {preset_name}",
            bin_path.display(),
            env.env_id
        ))
    })?;
    let mut task = base.clone();
    if exact.is_none() {
        task.label = preset_name.to_string();
        task.env = crate::env::EnvConfig {
            max_steps: base.env.max_steps,
            ..env
        };
    }
    with_workers(opts.workers, || {
        test_model(&genome, &task, &sidecar.partition_map, episodes, seed, opts.execution)
    })?
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    read_json(path)
}
