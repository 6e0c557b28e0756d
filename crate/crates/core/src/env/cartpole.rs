//! Cart-pole balancing. Euler integration at 20 ms with the classic
//! Barto–Sutton–Anderson equations; `pole_length` is the half-length of the
//! pole.

use rand::Rng;

use super::Physics;

pub const DEFAULT_POLE_LENGTH: f64 = 0.5;

const GRAVITY: f64 = 9.8;
const CART_MASS: f64 = 1.0;
const POLE_MASS: f64 = 0.1;
const FORCE: f64 = 10.0;
const DT: f64 = 0.02;
const ANGLE_LIMIT: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
const POSITION_LIMIT: f64 = 2.4;

pub(super) fn initial(rng: &mut impl Rng) -> Physics {
    Physics::Cartpole(std::array::from_fn(|_| rng.gen_range(-0.05..=0.05)))
}

/// Action 0 pushes left, 1 pushes right.
pub fn advance(s: &[f64; 4], action: usize, pole_length: f64) -> [f64; 4] {
    let [x, x_dot, theta, theta_dot] = *s;
    let force = if action == 1 { FORCE } else { -FORCE };
    let total_mass = CART_MASS + POLE_MASS;
    let pole_mass_length = POLE_MASS * pole_length;
    let (sin, cos) = theta.sin_cos();

    let temp = (force + pole_mass_length * theta_dot * theta_dot * sin) / total_mass;
    let theta_acc = (GRAVITY * sin - cos * temp) / (pole_length * (4.0 / 3.0 - POLE_MASS * cos * cos / total_mass));
    let x_acc = temp - pole_mass_length * theta_acc * cos / total_mass;

    [
        x + DT * x_dot,
        x_dot + DT * x_acc,
        theta + DT * theta_dot,
        theta_dot + DT * theta_acc,
    ]
}

pub fn is_terminal(s: &[f64; 4]) -> bool {
    s[0].abs() > POSITION_LIMIT || s[2].abs() > ANGLE_LIMIT
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{EnvConfig, EnvState};

    #[test]
    fn upright_equilibrium_survives() {
        let cfg = EnvConfig::cartpole(0.5);
        let mut s = EnvState {
            physics: Physics::Cartpole([0.0; 4]),
            step_count: 0,
        };
        for i in 0..4 {
            let (next, r) = cfg.step(&s, i % 2).unwrap();
            assert_eq!(r.reward, 1.0);
            assert!(!r.done);
            s = next;
        }
    }

    #[test]
    fn falls_without_control() {
        let cfg = EnvConfig::cartpole(0.5);
        let (mut s, _) = cfg.reset(1).unwrap();
        let mut total = 0.0;
        loop {
            let (next, r) = cfg.step(&s, 1).unwrap();
            total += r.reward;
            s = next;
            if r.done {
                break;
            }
        }
        assert!((1.0..300.0).contains(&total));
    }

    #[test]
    fn longer_pole_falls_slower() {
        let tilted = [0.0, 0.0, 0.1, 0.0];
        let short = advance(&tilted, 0, 0.4);
        let long = advance(&tilted, 0, 0.7);
        assert!(short[3] > long[3]);
    }
}
