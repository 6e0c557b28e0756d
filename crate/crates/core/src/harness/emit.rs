//! CSV artifacts: reward curves, their across-run aggregate and the summary
//! table. All files are RFC 4180 CSV in UTF-8 with full-precision floats.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mfea::GenerationStats;
use crate::stats::mean_std;

/// One generation of one task in one run, in reward sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub generation: usize,
    pub task: String,
    pub run: usize,
    pub best_reward: Option<f64>,
    pub mean_reward: Option<f64>,
    pub std_reward: Option<f64>,
}

/// Curve rows of one run from MFEA statistics (costs are negated rewards).
pub fn curve_rows(history: &[GenerationStats], labels: &[String], run: usize) -> Vec<CurveRow> {
    history
        .iter()
        .flat_map(|g| {
            g.tasks.iter().zip(labels).map(move |(t, label)| CurveRow {
                generation: g.generation,
                task: label.clone(),
                run,
                best_reward: t.best.map(|c| -c),
                mean_reward: t.mean.map(|c| -c),
                std_reward: t.std,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub generation: usize,
    pub task: String,
    pub runs: usize,
    pub best_reward_mean: f64,
    pub best_reward_std: f64,
    pub mean_reward_mean: f64,
    pub mean_reward_std: f64,
}

/// Across-run mean and standard deviation per (generation, task). Rows keep
/// the first-seen task order within each generation.
pub fn aggregate_curves(rows: &[CurveRow]) -> Vec<AggregateRow> {
    let mut task_order: Vec<&str> = Vec::new();
    for r in rows {
        if !task_order.contains(&r.task.as_str()) {
            task_order.push(&r.task);
        }
    }
    let mut groups: BTreeMap<(usize, usize), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let t = task_order.iter().position(|t| *t == r.task).expect("collected");
        let entry = groups.entry((r.generation, t)).or_default();
        if let (Some(b), Some(m)) = (r.best_reward, r.mean_reward) {
            entry.0.push(b);
            entry.1.push(m);
        }
    }
    groups
        .into_iter()
        .filter(|(_, (b, _))| !b.is_empty())
        .map(|((generation, t), (best, mean))| {
            let (bm, bs) = mean_std(&best).expect("non-empty");
            let (mm, ms) = mean_std(&mean).expect("non-empty");
            AggregateRow {
                generation,
                task: task_order[t].to_string(),
                runs: best.len(),
                best_reward_mean: bm,
                best_reward_std: bs,
                mean_reward_mean: mm,
                mean_reward_std: ms,
            }
        })
        .collect()
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    csv::Reader::from_path(path)?
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Write the long-format curve file `curves.csv` and the across-run
/// aggregate `curves_aggregate.csv` into `out`.
pub fn emit_plot_data(rows: &[CurveRow], out: &Path) -> Result<()> {
    write_rows(&out.join("curves.csv"), rows)?;
    write_rows(&out.join("curves_aggregate.csv"), &aggregate_curves(rows))
}

/// Test-reward summary of one task across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub task: String,
    pub env: String,
    pub runs: usize,
    pub episodes_per_run: usize,
    /// Mean over runs of each run's mean test reward.
    pub mean_reward: f64,
    /// Standard deviation across runs of the per-run means.
    pub std_across_runs: f64,
    /// Mean over runs of the within-run episode standard deviation.
    pub mean_within_run_std: f64,
    /// Standard deviation over every test episode of every run.
    pub pooled_std: f64,
}
