//! Checkpoints of a run between generations.
//!
//! A checkpoint is a JSON manifest (`<stem>.json`) holding the configuration,
//! the generation counter, the random-stream descriptor and all bookkeeping,
//! plus a binary block (`<stem>.bin`) of little-endian f64 genomes: the
//! population in order, then the best genome of every task. Every random
//! stream of generation `g` is derived from `(seed, g)`, so the seed and the
//! next generation index fully describe the generator state.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    BestRecord, Candidate, CrossoverEvent, EvaluationCount, FactorialRecord, GenerationStats, MfeaConfig, MfeaState,
};
use crate::error::{Error, Result};
use crate::genome::UnifiedGenome;

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngDescriptor {
    pub scheme: String,
    pub seed: u64,
    pub next_generation: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct CandidateMeta {
    record: FactorialRecord,
    birth: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct BestMeta {
    cost: f64,
    generation: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: u32,
    generation: usize,
    config: MfeaConfig,
    num_tasks: usize,
    dimension: usize,
    rng: RngDescriptor,
    genome_block: String,
    population: Vec<CandidateMeta>,
    best: Vec<BestMeta>,
    initial: GenerationStats,
    history: Vec<GenerationStats>,
    events: Vec<CrossoverEvent>,
    evaluations: EvaluationCount,
    crossover_matings: usize,
    mutation_matings: usize,
    /// Caller-provided data stored alongside the run state.
    context: serde_json::Value,
}

fn paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("json"), stem.with_extension("bin"))
}

/// Write `state` to `<stem>.json` and `<stem>.bin`. Returns the manifest path.
pub fn save(stem: &Path, state: &MfeaState, context: serde_json::Value) -> Result<PathBuf> {
    let (json_path, bin_path) = paths(stem);
    let mut block = Vec::with_capacity(8 * state.dimension * (state.population.len() + state.num_tasks));
    for g in state
        .population
        .iter()
        .map(|c| &c.genome)
        .chain(state.best.iter().map(|b| &b.genome))
    {
        block.extend(g.to_le_bytes());
    }
    let manifest = Manifest {
        format: FORMAT_VERSION,
        generation: state.generation,
        config: state.config.clone(),
        num_tasks: state.num_tasks,
        dimension: state.dimension,
        rng: RngDescriptor {
            scheme: "chacha8-per-generation".into(),
            seed: state.config.seed,
            next_generation: state.generation + 1,
        },
        genome_block: bin_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        population: state
            .population
            .iter()
            .map(|c| CandidateMeta {
                record: c.record.clone(),
                birth: c.birth,
            })
            .collect(),
        best: state
            .best
            .iter()
            .map(|b| BestMeta {
                cost: b.cost,
                generation: b.generation,
            })
            .collect(),
        initial: state.initial.clone(),
        history: state.history.clone(),
        events: state.events.clone(),
        evaluations: state.evaluations,
        crossover_matings: state.crossover_matings,
        mutation_matings: state.mutation_matings,
        context,
    };
    if let Some(dir) = json_path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    fs::write(&bin_path, block).map_err(|e| Error::io(&bin_path, e))?;
    let text = serde_json::to_string(&manifest).expect("manifest serializes");
    fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok(json_path)
}

/// Load a checkpoint written by [`save`]. `path` may name the manifest, the
/// block or the common stem.
pub fn load(path: &Path) -> Result<(MfeaState, serde_json::Value)> {
    let (json_path, _) = paths(path);
    let text = fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: json_path.clone(),
        message: e.to_string(),
    })?;
    if m.format != FORMAT_VERSION {
        return Err(Error::usage(format!("unsupported checkpoint format {}", m.format)));
    }
    let bin_path = json_path.with_file_name(&m.genome_block);
    let bytes = fs::read(&bin_path).map_err(|e| Error::io(&bin_path, e))?;
    let genomes = UnifiedGenome::from_le_bytes(&bytes)?;
    let expected = m.dimension * (m.population.len() + m.best.len());
    if genomes.len() != expected {
        return Err(Error::usage(format!(
            "genome block holds {} values, manifest implies {expected}",
            genomes.len()
        )));
    }
    let mut chunks = genomes
        .0
        .chunks_exact(m.dimension.max(1))
        .map(|c| UnifiedGenome(c.to_vec()));
    let population = m
        .population
        .into_iter()
        .map(|c| Candidate {
            genome: chunks.next().expect("length checked"),
            record: c.record,
            birth: c.birth,
        })
        .collect();
    let best = m
        .best
        .into_iter()
        .map(|b| BestRecord {
            genome: chunks.next().expect("length checked"),
            cost: b.cost,
            generation: b.generation,
        })
        .collect();
    let state = MfeaState {
        config: m.config,
        num_tasks: m.num_tasks,
        dimension: m.dimension,
        generation: m.generation,
        population,
        best,
        initial: m.initial,
        history: m.history,
        events: m.events,
        evaluations: m.evaluations,
        crossover_matings: m.crossover_matings,
        mutation_matings: m.mutation_matings,
    };
    Ok((state, m.context))
}
