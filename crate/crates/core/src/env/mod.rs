//! Classic-control environments: cart-pole, acrobot and pendulum.
//!
//! Environments are pure functions over an explicit [`EnvState`]:
//! [`EnvConfig::reset`] samples an initial state from a seed and
//! [`EnvConfig::step`] advances it by one control step. Nothing is shared or
//! mutated behind the caller's back, so any number of episodes can run
//! concurrently.

pub mod acrobot;
pub mod cartpole;
pub mod pendulum;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest observation dimension over all environments (acrobot).
pub const MAX_OBS_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvId {
    Cartpole,
    Acrobot,
    Pendulum,
}

impl EnvId {
    pub const ALL: [EnvId; 3] = [EnvId::Cartpole, EnvId::Acrobot, EnvId::Pendulum];

    pub fn name(self) -> &'static str {
        match self {
            EnvId::Cartpole => "cartpole",
            EnvId::Acrobot => "acrobot",
            EnvId::Pendulum => "pendulum",
        }
    }

    pub fn observation_dim(self) -> usize {
        match self {
            EnvId::Cartpole => 4,
            EnvId::Acrobot => 6,
            EnvId::Pendulum => 3,
        }
    }

    /// Default episode cap.
    pub fn default_max_steps(self) -> usize {
        match self {
            EnvId::Cartpole => 300,
            EnvId::Acrobot => 500,
            EnvId::Pendulum => 200,
        }
    }
}

impl fmt::Display for EnvId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EnvId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EnvId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::usage(format!("unknown environment `{s}`")))
    }
}

/// Environment identity plus its configuration knobs. Only the fields
/// relevant to `env_id` are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub env_id: EnvId,
    /// Cart-pole pole (half-)length in meters.
    pub pole_length: f64,
    /// Acrobot link length in meters, applied to both links.
    pub joint_length: f64,
    /// Pendulum angular speed limit in rad/s.
    pub max_speed: f64,
    /// Pendulum torque limit in N·m.
    pub max_torque: f64,
    /// Number of evenly spaced pendulum torque levels (odd, ≥ 3).
    pub torque_bins: usize,
    pub max_steps: usize,
}

impl EnvConfig {
    fn base(env_id: EnvId) -> Self {
        EnvConfig {
            env_id,
            pole_length: cartpole::DEFAULT_POLE_LENGTH,
            joint_length: acrobot::DEFAULT_LINK_LENGTH,
            max_speed: pendulum::DEFAULT_MAX_SPEED,
            max_torque: pendulum::DEFAULT_MAX_TORQUE,
            torque_bins: pendulum::DEFAULT_TORQUE_BINS,
            max_steps: env_id.default_max_steps(),
        }
    }

    pub fn cartpole(pole_length: f64) -> Self {
        EnvConfig {
            pole_length,
            ..Self::base(EnvId::Cartpole)
        }
    }

    pub fn acrobot(joint_length: f64) -> Self {
        EnvConfig {
            joint_length,
            ..Self::base(EnvId::Acrobot)
        }
    }

    pub fn pendulum(max_speed: f64, max_torque: f64) -> Self {
        EnvConfig {
            max_speed,
            max_torque,
            ..Self::base(EnvId::Pendulum)
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(name, format!("must be a positive number, got {v}")))
            }
        }
        if self.max_steps == 0 {
            return Err(Error::config("max_steps", "must be at least 1"));
        }
        match self.env_id {
            EnvId::Cartpole => positive("pole_length", self.pole_length),
            EnvId::Acrobot => positive("joint_length", self.joint_length),
            EnvId::Pendulum => {
                positive("max_speed", self.max_speed)?;
                positive("max_torque", self.max_torque)?;
                if self.torque_bins < 3 || self.torque_bins.is_multiple_of(2) {
                    return Err(Error::config(
                        "torque_bins",
                        format!("must be odd and at least 3, got {}", self.torque_bins),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn observation_dim(&self) -> usize {
        self.env_id.observation_dim()
    }

    pub fn action_count(&self) -> usize {
        match self.env_id {
            EnvId::Cartpole => 2,
            EnvId::Acrobot => 3,
            EnvId::Pendulum => self.torque_bins,
        }
    }

    /// Sample an initial state. Identical seeds give bit-identical states.
    pub fn reset(&self, seed: u64) -> Result<(EnvState, Observation)> {
        self.validate()?;
        let mut rng = crate::seeds::rng(seed);
        let physics = match self.env_id {
            EnvId::Cartpole => cartpole::initial(&mut rng),
            EnvId::Acrobot => acrobot::initial(&mut rng),
            EnvId::Pendulum => pendulum::initial(&mut rng),
        };
        let state = EnvState { physics, step_count: 0 };
        let obs = self.observation_of(&state);
        Ok((state, obs))
    }

    /// Advance `state` by one control step under `action`.
    pub fn step(&self, state: &EnvState, action: usize) -> Result<(EnvState, StepResult)> {
        let actions = self.action_count();
        if action >= actions {
            return Err(Error::usage(format!(
                "action {action} out of range for {} ({actions} actions)",
                self.env_id
            )));
        }
        let step_count = state.step_count + 1;
        let capped = step_count >= self.max_steps;
        let (physics, reward, terminal) = match (self.env_id, &state.physics) {
            (EnvId::Cartpole, Physics::Cartpole(s)) => {
                let next = cartpole::advance(s, action, self.pole_length);
                (Physics::Cartpole(next), 1.0, cartpole::is_terminal(&next))
            }
            (EnvId::Acrobot, Physics::Acrobot(s)) => {
                let next = acrobot::advance(s, action, self.joint_length);
                (Physics::Acrobot(next), -1.0, acrobot::reached_goal(&next))
            }
            (EnvId::Pendulum, Physics::Pendulum(s)) => {
                let torque = pendulum::torque_of(action, self.torque_bins, self.max_torque);
                let reward = pendulum::reward(s, torque);
                let next = pendulum::advance(s, torque, self.max_speed);
                (Physics::Pendulum(next), reward, false)
            }
            (env, _) => return Err(Error::usage(format!("state does not belong to environment {env}"))),
        };
        let next = EnvState { physics, step_count };
        let observation = self.observation_of(&next);
        Ok((
            next,
            StepResult {
                observation,
                reward,
                done: terminal || capped,
            },
        ))
    }

    /// Observation encoding of `state`. Pure.
    pub fn observation_of(&self, state: &EnvState) -> Observation {
        match &state.physics {
            Physics::Cartpole(s) => Observation::from_slice(s),
            Physics::Acrobot(s) => {
                let [t1, t2, d1, d2] = *s;
                Observation::from_slice(&[t1.cos(), t1.sin(), t2.cos(), t2.sin(), d1, d2])
            }
            Physics::Pendulum(s) => {
                let [th, thdot] = *s;
                Observation::from_slice(&[th.cos(), th.sin(), thdot])
            }
        }
    }
}

/// Environment-specific physical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Physics {
    /// (x, ẋ, θ, θ̇)
    Cartpole([f64; 4]),
    /// (θ1, θ2, θ̇1, θ̇2)
    Acrobot([f64; 4]),
    /// (θ, θ̇)
    Pendulum([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvState {
    pub physics: Physics,
    pub step_count: usize,
}

/// Fixed-capacity observation vector.
#[derive(Clone, Copy, PartialEq)]
pub struct Observation {
    values: [f64; MAX_OBS_DIM],
    len: usize,
}

impl Observation {
    pub fn from_slice(values: &[f64]) -> Self {
        assert!(values.len() <= MAX_OBS_DIM, "observation too long");
        let mut buf = [0.0; MAX_OBS_DIM];
        buf[..values.len()].copy_from_slice(values);
        Observation {
            values: buf,
            len: values.len(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl fmt::Debug for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub observation: Observation,
    pub reward: f64,
    pub done: bool,
}

/// Wrap an angle into [-π, π].
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::PI;
    let two_pi = 2.0 * PI;
    let r = (x + PI).rem_euclid(two_pi) - PI;
    // rem_euclid can round up to exactly 2π
    if r > PI {
        r - two_pi
    } else {
        r
    }
}
