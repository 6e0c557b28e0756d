//! Real-coded variation operators on the `[0, 1]` box: simulated binary
//! crossover and polynomial mutation.

use rand::Rng;

use crate::error::{Error, Result};
use crate::genome::UnifiedGenome;

/// SBX spread factor β for a uniform draw `u ∈ [0, 1)`.
///
/// The induced density is `0.5(η+1)β^η` on `[0, 1]` and
/// `0.5(η+1)β^-(η+2)` above 1.
pub fn sbx_spread_factor(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(e)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(e)
    }
}

/// Children of one gene pair before clipping. Their midpoint equals the
/// parents' midpoint.
#[inline]
pub fn sbx_pair(a: f64, b: f64, beta: f64) -> (f64, f64) {
    (
        0.5 * ((1.0 + beta) * a + (1.0 - beta) * b),
        0.5 * ((1.0 - beta) * a + (1.0 + beta) * b),
    )
}

/// Simulated binary crossover applied to every gene, children clipped to
/// `[0, 1]`.
pub fn sbx_crossover(
    a: &UnifiedGenome,
    b: &UnifiedGenome,
    eta: f64,
    rng: &mut impl Rng,
) -> Result<(UnifiedGenome, UnifiedGenome)> {
    if a.len() != b.len() {
        return Err(Error::usage(format!(
            "crossover parents differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    for (&x, &y) in a.0.iter().zip(&b.0) {
        let beta = sbx_spread_factor(rng.gen::<f64>(), eta);
        let cross = rng.gen::<bool>();
        // equal genes pass through exactly
        let (u, v) = if x == y || !cross { (x, y) } else { sbx_pair(x, y, beta) };
        c1.push(u.clamp(0.0, 1.0));
        c2.push(v.clamp(0.0, 1.0));
    }
    Ok((UnifiedGenome(c1), UnifiedGenome(c2)))
}

/// Perturbation δ ∈ [-1, 1] of polynomial mutation for a uniform draw `u`.
pub fn polynomial_delta(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u < 0.5 {
        (2.0 * u).powf(e) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(e)
    }
}

/// Polynomial mutation: each gene is perturbed with probability `p_gene`,
/// then clipped to `[0, 1]`.
pub fn polynomial_mutation(g: &UnifiedGenome, eta: f64, p_gene: f64, rng: &mut impl Rng) -> UnifiedGenome {
    let mut out = g.clone();
    polynomial_mutation_in_place(&mut out, eta, p_gene, rng);
    out
}

pub fn polynomial_mutation_in_place(g: &mut UnifiedGenome, eta: f64, p_gene: f64, rng: &mut impl Rng) {
    for x in &mut g.0 {
        if rng.gen::<f64>() < p_gene {
            let delta = polynomial_delta(rng.gen::<f64>(), eta);
            *x = (*x + delta).clamp(0.0, 1.0);
        }
    }
}
