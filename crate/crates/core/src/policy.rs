//! Dense feed-forward policies over flat weight vectors.
//!
//! Weights are laid out layer by layer; each layer stores its `out × in`
//! weight matrix row-major (one row per output unit) followed by its `out`
//! biases. Hidden layers apply the configured activation, the output layer is
//! linear, and the greedy action is the argmax of the outputs.

use serde::{Deserialize, Serialize};

use crate::env::Observation;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Architecture {
    /// Input dim, hidden dims..., output dim.
    pub layer_sizes: Vec<usize>,
    pub activation: Activation,
}

impl Architecture {
    pub fn new(layer_sizes: Vec<usize>, activation: Activation) -> Result<Self> {
        if layer_sizes.len() < 3 {
            return Err(Error::config(
                "layer_sizes",
                "need an input, at least one hidden layer and an output",
            ));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::config("layer_sizes", "layer widths must be positive"));
        }
        Ok(Architecture {
            layer_sizes,
            activation,
        })
    }

    /// `input → hidden… → output` with the given activation.
    pub fn mlp(input: usize, hidden: &[usize], output: usize, activation: Activation) -> Result<Self> {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(input);
        sizes.extend_from_slice(hidden);
        sizes.push(output);
        Self::new(sizes, activation)
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().expect("validated non-empty")
    }

    /// Number of weight layers (consecutive size pairs).
    pub fn num_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Parameters of each weight layer: `in·out + out`.
    pub fn layer_param_counts(&self) -> Vec<usize> {
        self.layer_sizes.windows(2).map(|w| w[0] * w[1] + w[1]).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layer_param_counts().iter().sum()
    }

    fn max_width(&self) -> usize {
        self.layer_sizes.iter().copied().max().unwrap_or(0)
    }
}

/// Flat parameter vector of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn zeros(arch: &Architecture) -> Self {
        WeightVector(vec![0.0; arch.parameter_count()])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_dims(arch: &Architecture, weights: &[f64], input: &[f64]) -> Result<()> {
    if weights.len() != arch.parameter_count() {
        return Err(Error::usage(format!(
            "weight vector has {} values, architecture needs {}",
            weights.len(),
            arch.parameter_count()
        )));
    }
    if input.len() != arch.input_dim() {
        return Err(Error::usage(format!(
            "observation has {} values, architecture expects {}",
            input.len(),
            arch.input_dim()
        )));
    }
    Ok(())
}

/// Reusable evaluator for one (architecture, weights) pair. Holds scratch
/// buffers so repeated calls during a rollout do not allocate.
pub struct Policy<'a> {
    arch: &'a Architecture,
    weights: &'a [f64],
    buf_a: Vec<f64>,
    buf_b: Vec<f64>,
}

impl<'a> Policy<'a> {
    pub fn new(arch: &'a Architecture, weights: &'a WeightVector) -> Result<Self> {
        if weights.len() != arch.parameter_count() {
            return Err(Error::usage(format!(
                "weight vector has {} values, architecture needs {}",
                weights.len(),
                arch.parameter_count()
            )));
        }
        let w = arch.max_width();
        Ok(Policy {
            arch,
            weights: weights.as_slice(),
            buf_a: vec![0.0; w],
            buf_b: vec![0.0; w],
        })
    }

    /// Output values; the slice is valid until the next call. Returns the
    /// number of parameters consumed alongside.
    fn run(&mut self, input: &[f64]) -> Result<(&[f64], usize)> {
        check_dims(self.arch, self.weights, input)?;
        let sizes = &self.arch.layer_sizes;
        let last = sizes.len() - 2;
        let mut offset = 0;
        self.buf_a[..input.len()].copy_from_slice(input);
        for (l, w) in sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let matrix = &self.weights[offset..offset + n_in * n_out];
            let bias = &self.weights[offset + n_in * n_out..offset + n_in * n_out + n_out];
            offset += n_in * n_out + n_out;
            let x = &self.buf_a[..n_in];
            for (j, out) in self.buf_b[..n_out].iter_mut().enumerate() {
                let row = &matrix[j * n_in..(j + 1) * n_in];
                let z = row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + bias[j];
                *out = if l == last { z } else { self.arch.activation.apply(z) };
            }
            std::mem::swap(&mut self.buf_a, &mut self.buf_b);
        }
        Ok((&self.buf_a[..self.arch.output_dim()], offset))
    }

    pub fn forward(&mut self, obs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.run(obs)?.0.to_vec())
    }

    pub fn act(&mut self, obs: &Observation) -> Result<usize> {
        Ok(argmax(self.run(obs.as_slice())?.0))
    }

    /// Parameters read by one forward pass.
    pub fn consumed_parameters(&mut self) -> usize {
        let zeros = vec![0.0; self.arch.input_dim()];
        self.run(&zeros).map(|(_, n)| n).unwrap_or(0)
    }
}

/// Per-action values for `obs`.
pub fn forward(arch: &Architecture, weights: &WeightVector, obs: &Observation) -> Result<Vec<f64>> {
    Policy::new(arch, weights)?.forward(obs.as_slice())
}

/// Greedy action for `obs`.
pub fn act(arch: &Architecture, weights: &WeightVector, obs: &Observation) -> Result<usize> {
    Policy::new(arch, weights)?.act(obs)
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
