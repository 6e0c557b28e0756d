//! Inverted pendulum swing-up with a discretized torque set. Semi-implicit
//! Euler at 50 ms; θ = 0 is upright.

use std::f64::consts::PI;

use rand::Rng;

use super::{wrap_angle, Physics};

pub const DEFAULT_MAX_SPEED: f64 = 8.0;
pub const DEFAULT_MAX_TORQUE: f64 = 2.0;
pub const DEFAULT_TORQUE_BINS: usize = 5;

pub const GRAVITY: f64 = 10.0;
pub const MASS: f64 = 1.0;
pub const LENGTH: f64 = 1.0;
pub const DT: f64 = 0.05;

pub(super) fn initial(rng: &mut impl Rng) -> Physics {
    Physics::Pendulum([rng.gen_range(-PI..=PI), rng.gen_range(-1.0..=1.0)])
}

/// Torque for bin `action` of `bins` evenly spaced levels over
/// [-max_torque, max_torque]. Bin 0 is the most negative.
pub fn torque_of(action: usize, bins: usize, max_torque: f64) -> f64 {
    let step = 2.0 * max_torque / (bins - 1) as f64;
    (-max_torque + action as f64 * step).clamp(-max_torque, max_torque)
}

/// Reward for applying `torque` in state `s` (before the transition).
pub fn reward(s: &[f64; 2], torque: f64) -> f64 {
    let [th, thdot] = *s;
    let th = wrap_angle(th);
    -(th * th + 0.1 * thdot * thdot + 0.001 * torque * torque)
}

pub fn advance(s: &[f64; 2], torque: f64, max_speed: f64) -> [f64; 2] {
    let [th, thdot] = *s;
    let acc = 3.0 * GRAVITY / (2.0 * LENGTH) * th.sin() + 3.0 / (MASS * LENGTH * LENGTH) * torque;
    let thdot = (thdot + acc * DT).clamp(-max_speed, max_speed);
    [th + thdot * DT, thdot]
}
