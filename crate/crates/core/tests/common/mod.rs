//! Independent oracles shared by the integration suites and the acceptance
//! runner.
#![allow(dead_code)]

use mfrl_core::env::acrobot::{self, Links};
use mfrl_core::env::pendulum;
use mfrl_core::genome::UnifiedGenome;
use mfrl_core::mfea::{EvalContext, Evaluator};
use mfrl_core::Result;

/// Ranks by counting: one plus the number of evaluated rows that sort
/// strictly before row `i` (lower cost, or equal cost and lower index).
/// Unevaluated entries rank as the row count.
pub fn brute_force_ranks(costs: &[Vec<Option<f64>>]) -> Vec<Vec<usize>> {
    let p = costs.len();
    let k = costs[0].len();
    let mut out = vec![vec![0; k]; p];
    for t in 0..k {
        for i in 0..p {
            out[i][t] = match costs[i][t] {
                None => p,
                Some(ci) => {
                    1 + (0..p)
                        .filter(|&j| match costs[j][t] {
                            Some(cj) => cj < ci || (cj == ci && j < i),
                            None => false,
                        })
                        .count()
                }
            };
        }
    }
    out
}

/// Scalar fitness and skill factor by scanning tasks in order.
pub fn brute_force_skill(ranks: &[usize]) -> (f64, usize) {
    let mut best = 0;
    for t in 1..ranks.len() {
        if ranks[t] < ranks[best] {
            best = t;
        }
    }
    (1.0 / ranks[best] as f64, best)
}

/// Parameter count of a fully connected network, one weight and one bias
/// at a time.
pub fn count_parameters(layer_sizes: &[usize]) -> Vec<usize> {
    let mut per_layer = Vec::new();
    for w in layer_sizes.windows(2) {
        let mut n = 0;
        for _out in 0..w[1] {
            for _in in 0..w[0] {
                n += 1;
            }
            n += 1;
        }
        per_layer.push(n);
    }
    per_layer
}

/// Unified dimension: widest network per shared layer plus every task's
/// own deeper layers.
pub fn unified_dimension(architectures: &[Vec<usize>], shared: usize) -> usize {
    let counts: Vec<Vec<usize>> = architectures.iter().map(|a| count_parameters(a)).collect();
    let mut total = 0;
    for l in 0..shared {
        total += counts.iter().map(|c| c[l]).max().unwrap();
    }
    for c in &counts {
        total += c[shared..].iter().sum::<usize>();
    }
    total
}

/// Distribution function of the SBX spread factor.
pub fn sbx_spread_cdf(beta: f64, eta: f64) -> f64 {
    if beta <= 1.0 {
        0.5 * beta.powf(eta + 1.0)
    } else {
        1.0 - 0.5 * beta.powf(-(eta + 1.0))
    }
}

/// Shifted spheres `f_k(x) = Σ (x_i - c_k)²` on a shared space.
pub struct Spheres {
    pub centers: Vec<f64>,
    pub dim: usize,
}

impl Evaluator for Spheres {
    fn num_tasks(&self) -> usize {
        self.centers.len()
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn objective(&self, genome: &UnifiedGenome, task: usize, _ctx: EvalContext) -> Result<f64> {
        let c = self.centers[task];
        Ok(genome.0.iter().map(|x| (x - c) * (x - c)).sum())
    }
}

/// Pendulum energy with θ = 0 upright: rod inertia m·l²/3 about the pivot,
/// centre of mass at l/2.
pub fn pendulum_energy(s: [f64; 2]) -> f64 {
    let [th, thdot] = s;
    let inertia = pendulum::MASS * pendulum::LENGTH * pendulum::LENGTH / 3.0;
    0.5 * inertia * thdot * thdot + pendulum::MASS * pendulum::GRAVITY * pendulum::LENGTH / 2.0 * th.cos()
}

/// Acrobot energy from the positions and velocities of both link centres.
pub fn acrobot_energy(links: &Links, s: [f64; 4]) -> f64 {
    let [t1, t2, w1, w2] = s;
    let (l, m, lc, i, g) = (links.length, links.mass, links.com, links.inertia, acrobot::GRAVITY);
    let v1 = (lc * w1).powi(2);
    let vx2 = l * t1.cos() * w1 + lc * (t1 + t2).cos() * (w1 + w2);
    let vy2 = l * t1.sin() * w1 + lc * (t1 + t2).sin() * (w1 + w2);
    let kinetic = 0.5 * m * v1 + 0.5 * i * w1 * w1 + 0.5 * m * (vx2 * vx2 + vy2 * vy2) + 0.5 * i * (w1 + w2).powi(2);
    let y1 = -lc * t1.cos();
    let y2 = -l * t1.cos() - lc * (t1 + t2).cos();
    kinetic + m * g * (y1 + y2)
}
