//! Two-link underactuated swing-up. Torque is applied at the second joint;
//! integration is one classical RK4 step of 200 ms. Link lengths equal the
//! configured joint length, link masses scale with it (1 kg per meter),
//! centers of mass sit at mid-link and both moments of inertia are 1.

use std::f64::consts::PI;

use rand::Rng;

use super::{wrap_angle, Physics};

pub const DEFAULT_LINK_LENGTH: f64 = 1.0;

pub const GRAVITY: f64 = 9.8;
pub const DT: f64 = 0.2;
pub const MAX_VEL_1: f64 = 4.0 * PI;
pub const MAX_VEL_2: f64 = 9.0 * PI;
const TORQUES: [f64; 3] = [-1.0, 0.0, 1.0];

/// Physical parameters derived from a joint length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Links {
    pub length: f64,
    pub mass: f64,
    pub com: f64,
    pub inertia: f64,
}

impl Links {
    pub fn new(joint_length: f64) -> Self {
        Links {
            length: joint_length,
            mass: joint_length,
            com: joint_length / 2.0,
            inertia: 1.0,
        }
    }
}

pub(super) fn initial(rng: &mut impl Rng) -> Physics {
    Physics::Acrobot(std::array::from_fn(|_| rng.gen_range(-0.1..=0.1)))
}

fn derivatives(links: &Links, s: &[f64; 4], torque: f64) -> [f64; 4] {
    let Links {
        length: l1,
        mass: m,
        com: lc,
        inertia: i,
    } = *links;
    let (m1, m2, lc1, lc2) = (m, m, lc, lc);
    let [theta1, theta2, dtheta1, dtheta2] = *s;
    let g = GRAVITY;

    let d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * theta2.cos()) + 2.0 * i;
    let d2 = m2 * (lc2 * lc2 + l1 * lc2 * theta2.cos()) + i;
    let phi2 = m2 * lc2 * g * (theta1 + theta2 - PI / 2.0).cos();
    let phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * theta2.sin()
        - 2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * theta2.sin()
        + (m1 * lc1 + m2 * l1) * g * (theta1 - PI / 2.0).cos()
        + phi2;
    let ddtheta2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * theta2.sin() - phi2)
        / (m2 * lc2 * lc2 + i - d2 * d2 / d1);
    let ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
    [dtheta1, dtheta2, ddtheta1, ddtheta2]
}

/// One RK4 step of the unconstrained dynamics, without wrapping or clamping.
pub fn rk4(links: &Links, s: &[f64; 4], torque: f64, dt: f64) -> [f64; 4] {
    let add = |a: &[f64; 4], k: &[f64; 4], h: f64| -> [f64; 4] { std::array::from_fn(|j| a[j] + h * k[j]) };
    let k1 = derivatives(links, s, torque);
    let k2 = derivatives(links, &add(s, &k1, dt / 2.0), torque);
    let k3 = derivatives(links, &add(s, &k2, dt / 2.0), torque);
    let k4 = derivatives(links, &add(s, &k3, dt), torque);
    std::array::from_fn(|j| s[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
}

/// Action 0, 1, 2 apply torque -1, 0, +1 N·m.
pub fn advance(s: &[f64; 4], action: usize, joint_length: f64) -> [f64; 4] {
    let links = Links::new(joint_length);
    let n = rk4(&links, s, TORQUES[action], DT);
    [
        wrap_angle(n[0]),
        wrap_angle(n[1]),
        n[2].clamp(-MAX_VEL_1, MAX_VEL_1),
        n[3].clamp(-MAX_VEL_2, MAX_VEL_2),
    ]
}

/// Free end above the goal line, one link length over the pivot.
pub fn reached_goal(s: &[f64; 4]) -> bool {
    -s[0].cos() - (s[0] + s[1]).cos() > 1.0
}
