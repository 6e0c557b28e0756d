use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mfrl_core::harness::{self, RunOptions};
use mfrl_core::Execution;

/// Multitask neuroevolution of control policies.
#[derive(Debug, Parser)]
#[command(name = "mfrl", version)]
struct Cli {
    /// Base seed; overrides the config's `base_seed` (run) or the test seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output location: experiment directory for `run`, CSV file for
    /// `transfer-matrix`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for evaluation. Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run { config: PathBuf },
    /// Continue an experiment from a checkpoint (`checkpoints/run{r}.json`).
    Resume { checkpoint: PathBuf },
    /// Test a saved genome on a preset such as `cartpole:C`.
    Test {
        genome: PathBuf,
        preset: String,
        #[arg(long, default_value_t = 250)]
        episodes: usize,
    },
    /// Effective-crossover matrix of an events CSV.
    TransferMatrix {
        events: PathBuf,
        /// Number of tasks; read from a sibling manifest.json when omitted.
        #[arg(long)]
        tasks: Option<usize>,
    },
}

fn options(parallel: Option<usize>) -> Result<RunOptions> {
    if parallel == Some(0) {
        bail!("--parallel must be at least 1");
    }
    Ok(RunOptions {
        workers: parallel,
        execution: Execution::default(),
    })
}

fn report(outcome: &harness::ExperimentOutcome) {
    println!("wrote {}", outcome.output_dir.display());
    println!("task,mean_reward,std_across_runs");
    for row in &outcome.summary {
        println!("{},{:.4},{:.4}", row.task, row.mean_reward, row.std_across_runs);
    }
}

/// Task labels from the manifest beside an events file, if there is one.
fn sibling_labels(events: &Path) -> Option<Vec<String>> {
    let manifest = harness::read_manifest(&events.parent()?.join("manifest.json")).ok()?;
    let cfg = harness::ExperimentConfig::from_raw(manifest.config).ok()?;
    Some(cfg.task_labels())
}

fn transfer_matrix(events_path: &Path, tasks: Option<usize>, out: Option<&Path>) -> Result<()> {
    let file = fs::File::open(events_path).with_context(|| format!("opening {}", events_path.display()))?;
    let events = harness::read_events_csv(file)?;
    let labels = sibling_labels(events_path);
    let observed = events
        .iter()
        .map(|e| e.parent_skill_a.max(e.parent_skill_b).max(e.offspring_assigned_task) + 1)
        .max()
        .unwrap_or(1);
    let k = tasks.or(labels.as_ref().map(Vec::len)).unwrap_or(observed);
    if k < observed {
        bail!("events reference task {} but only {k} tasks were given", observed - 1);
    }
    let labels = match labels {
        Some(l) if l.len() == k => l,
        _ => (0..k).map(|i| format!("task{i}")).collect(),
    };
    let matrix = harness::compute_transfer_matrix(&events, k)?;
    match out {
        Some(path) => {
            let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            matrix.write_csv(&labels, f)?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            matrix.write_csv(&labels, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<()> {
    let opts = options(cli.parallel)?;
    match cli.command {
        Command::Run { config } => {
            let mut cfg = harness::load_config(&config)?;
            if let Some(seed) = cli.seed {
                cfg.set_base_seed(seed);
            }
            if let Some(out) = cli.out {
                cfg.set_output_dir(out);
            }
            report(&harness::run_experiment(&cfg, opts)?);
        }
        Command::Resume { checkpoint } => {
            if cli.seed.is_some() || cli.out.is_some() {
                bail!("resume takes its seed and output directory from the checkpoint");
            }
            report(&harness::resume(&checkpoint, opts)?);
        }
        Command::Test {
            genome,
            preset,
            episodes,
        } => {
            let seed = cli.seed.unwrap_or(0);
            let r = harness::test_saved_genome(&genome, &preset, episodes, seed, opts)?;
            println!(
                "{preset}: mean_reward {:.4} std_reward {:.4} over {} episodes",
                r.mean_reward, r.std_reward, r.episodes_used
            );
        }
        Command::TransferMatrix { events, tasks } => transfer_matrix(&events, tasks, cli.out.as_deref())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
