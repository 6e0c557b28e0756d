//! Unified search space shared by all tasks.
//!
//! The first `shared_layers` weight layers of every task network live in a
//! common region: one slot per layer, as wide as the largest task's layer.
//! A task reads the prefix of each slot it needs. The remaining layers of
//! each task get their own disjoint spans after the shared region. Genome
//! values live in `[0, 1]` and decode affinely to weights in
//! `[-weight_bound, weight_bound]`.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::policy::{Architecture, WeightVector};

pub const DEFAULT_WEIGHT_BOUND: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
}

impl Span {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionMap {
    pub num_tasks: usize,
    pub shared_layers: usize,
    /// Parameter count of every weight layer, per task.
    pub layer_params: Vec<Vec<usize>>,
    /// One slot per shared layer, in layer order.
    pub shared_slots: Vec<Span>,
    /// Task-specific spans for layers past the shared ones, per task.
    pub specific_spans: Vec<Vec<Span>>,
    pub total_dim: usize,
    pub weight_bound: f64,
}

impl PartitionMap {
    /// Lay out the unified space for `architectures` with the first
    /// `shared_layers` weight layers shared.
    pub fn build(architectures: &[Architecture], shared_layers: usize) -> Result<Self> {
        if architectures.is_empty() {
            return Err(Error::config("tasks", "at least one architecture is required"));
        }
        let min_layers = architectures
            .iter()
            .map(Architecture::num_layers)
            .min()
            .expect("non-empty");
        if shared_layers < 1 || shared_layers >= min_layers {
            return Err(Error::config(
                "shared_layers",
                format!("must be in [1, {}), got {shared_layers}", min_layers),
            ));
        }
        let layer_params: Vec<Vec<usize>> = architectures.iter().map(Architecture::layer_param_counts).collect();

        let mut offset = 0;
        let mut shared_slots = Vec::with_capacity(shared_layers);
        for l in 0..shared_layers {
            let len = layer_params.iter().map(|p| p[l]).max().expect("non-empty");
            shared_slots.push(Span { offset, len });
            offset += len;
        }
        let mut specific_spans = Vec::with_capacity(architectures.len());
        for params in &layer_params {
            let spans = params[shared_layers..]
                .iter()
                .map(|&len| {
                    let s = Span { offset, len };
                    offset += len;
                    s
                })
                .collect();
            specific_spans.push(spans);
        }
        Ok(PartitionMap {
            num_tasks: architectures.len(),
            shared_layers,
            layer_params,
            shared_slots,
            specific_spans,
            total_dim: offset,
            weight_bound: DEFAULT_WEIGHT_BOUND,
        })
    }

    pub fn with_weight_bound(mut self, bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::config("weight_bound", format!("must be positive, got {bound}")));
        }
        self.weight_bound = bound;
        Ok(self)
    }

    /// Parameter count `D_k` of task `k`'s network.
    pub fn task_dim(&self, task: usize) -> usize {
        self.layer_params[task].iter().sum()
    }

    /// Genome index ranges read by `task`, in weight-vector order.
    pub fn task_ranges(&self, task: usize) -> Result<Vec<std::ops::Range<usize>>> {
        self.check_task(task)?;
        let params = &self.layer_params[task];
        let mut ranges: Vec<_> = self
            .shared_slots
            .iter()
            .zip(params)
            .map(|(slot, &d)| slot.offset..slot.offset + d)
            .collect();
        ranges.extend(self.specific_spans[task].iter().map(Span::range));
        Ok(ranges)
    }

    fn check_task(&self, task: usize) -> Result<()> {
        if task >= self.num_tasks {
            return Err(Error::usage(format!(
                "task index {task} out of range for {} tasks",
                self.num_tasks
            )));
        }
        Ok(())
    }

    #[inline]
    fn to_weight(&self, v: f64) -> f64 {
        (2.0 * v - 1.0) * self.weight_bound
    }

    #[inline]
    fn to_unit(&self, w: f64) -> f64 {
        (w / self.weight_bound + 1.0) / 2.0
    }
}

/// A point of the unified space, normalized to `[0, 1]` per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnifiedGenome(pub Vec<f64>);

impl UnifiedGenome {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Uniform random genome; deterministic per seed.
    pub fn random(map: &PartitionMap, seed: u64) -> Self {
        Self::random_with_dim(map.total_dim, seed)
    }

    pub fn random_with_dim(dim: usize, seed: u64) -> Self {
        let mut rng = crate::seeds::rng(seed);
        UnifiedGenome((0..dim).map(|_| rng.gen::<f64>()).collect())
    }

    /// Weight vector of `task` encoded in this genome.
    pub fn decode(&self, task: usize, map: &PartitionMap) -> Result<WeightVector> {
        self.check_len(map)?;
        let ranges = map.task_ranges(task)?;
        let mut out = Vec::with_capacity(map.task_dim(task));
        for r in ranges {
            out.extend(self.0[r].iter().map(|&v| map.to_weight(v)));
        }
        Ok(WeightVector(out))
    }

    /// Write `weights` into the coordinates `task` reads. Other coordinates
    /// are left untouched. Weights outside the bound are clipped.
    pub fn encode(&mut self, task: usize, weights: &WeightVector, map: &PartitionMap) -> Result<()> {
        self.check_len(map)?;
        map.check_task(task)?;
        if weights.len() != map.task_dim(task) {
            return Err(Error::usage(format!(
                "weight vector has {} values, task {task} needs {}",
                weights.len(),
                map.task_dim(task)
            )));
        }
        let mut src = weights.as_slice().iter();
        for r in map.task_ranges(task)? {
            for v in &mut self.0[r] {
                *v = map.to_unit(*src.next().expect("length checked")).clamp(0.0, 1.0);
            }
        }
        Ok(())
    }

    fn check_len(&self, map: &PartitionMap) -> Result<()> {
        if self.0.len() != map.total_dim {
            return Err(Error::usage(format!(
                "genome has {} values, partition map needs {}",
                self.0.len(),
                map.total_dim
            )));
        }
        Ok(())
    }

    /// Flat little-endian f64 array.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.0.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn from_le_bytes(bytes: &[u8]) -> Result<Self> {
        if !bytes.len().is_multiple_of(8) {
            return Err(Error::usage(format!(
                "genome block length {} is not a multiple of 8",
                bytes.len()
            )));
        }
        Ok(UnifiedGenome(
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
                .collect(),
        ))
    }
}

/// JSON sidecar stored next to a genome block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenomeSidecar {
    pub partition_map: PartitionMap,
    /// Every task of the map, in task order.
    pub tasks: Vec<crate::evaluator::TaskSpec>,
    /// Task this genome was selected for, if any.
    pub task_index: Option<usize>,
}

/// Write `genome` to `bin_path` and the sidecar next to it (`.json`).
pub fn save_genome(bin_path: &Path, genome: &UnifiedGenome, sidecar: &GenomeSidecar) -> Result<()> {
    fs::write(bin_path, genome.to_le_bytes()).map_err(|e| Error::io(bin_path, e))?;
    let json_path = bin_path.with_extension("json");
    let text = serde_json::to_string_pretty(sidecar).expect("sidecar serializes");
    fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))
}

pub fn load_genome(bin_path: &Path) -> Result<(UnifiedGenome, GenomeSidecar)> {
    let bytes = fs::read(bin_path).map_err(|e| Error::io(bin_path, e))?;
    let genome = UnifiedGenome::from_le_bytes(&bytes)?;
    let json_path = bin_path.with_extension("json");
    let text = fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
    let sidecar: GenomeSidecar = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: json_path.clone(),
        message: e.to_string(),
    })?;
    if genome.len() != sidecar.partition_map.total_dim {
        return Err(Error::usage(format!(
            "genome has {} values but its sidecar declares {}",
            genome.len(),
            sidecar.partition_map.total_dim
        )));
    }
    Ok((genome, sidecar))
}
