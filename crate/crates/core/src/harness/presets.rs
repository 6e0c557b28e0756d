//! Named environment configurations `"<env>:<A|B|C|D>"`.
//!
//! | env      | knob                    | A       | B       | C        | D       |
//! |----------|-------------------------|---------|---------|----------|---------|
//! | cartpole | pole length (m)         | 0.5     | 0.6     | 0.7      | 0.4     |
//! | acrobot  | joint length (m)        | 1.0     | 1.2     | 1.4      | 1.6     |
//! | pendulum | max speed / max torque  | 8 / 2.0 | 6 / 2.0 | 10 / 2.0 | 8 / 2.5 |

use crate::env::{EnvConfig, EnvId};
use crate::error::{Error, Result};

pub const VARIANTS: [char; 4] = ['A', 'B', 'C', 'D'];

/// Environment configuration for `preset`, e.g. `"cartpole:B"`.
pub fn preset(name: &str) -> Result<EnvConfig> {
    let unknown = || Error::usage(format!("unknown preset `{name}`"));
    let (env, variant) = name.split_once(':').ok_or_else(unknown)?;
    let env: EnvId = env.parse().map_err(|_| unknown())?;
    let i = match variant {
        "A" => 0,
        "B" => 1,
        "C" => 2,
        "D" => 3,
        _ => return Err(unknown()),
    };
    Ok(match env {
        EnvId::Cartpole => EnvConfig::cartpole([0.5, 0.6, 0.7, 0.4][i]),
        EnvId::Acrobot => EnvConfig::acrobot([1.0, 1.2, 1.4, 1.6][i]),
        EnvId::Pendulum => {
            let (speed, torque) = [(8.0, 2.0), (6.0, 2.0), (10.0, 2.0), (8.0, 2.5)][i];
            EnvConfig::pendulum(speed, torque)
        }
    })
}

/// All twelve preset names in table order.
pub fn all_presets() -> Vec<String> {
    EnvId::ALL
        .iter()
        .flat_map(|e| VARIANTS.iter().map(move |v| format!("{e}:{v}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert_eq!(preset("cartpole:B").unwrap().pole_length, 0.6);
        assert_eq!(preset("cartpole:D").unwrap().pole_length, 0.4);
        assert_eq!(preset("acrobot:C").unwrap().joint_length, 1.4);
        let p = preset("pendulum:D").unwrap();
        assert_eq!((p.max_speed, p.max_torque), (8.0, 2.5));
        let p = preset("pendulum:B").unwrap();
        assert_eq!((p.max_speed, p.max_torque), (6.0, 2.0));
    }

    #[test]
    fn unknown_names() {
        for bad in ["cartpole:E", "cartpole", "walker:A", "pendulum:b", ""] {
            let e = preset(bad).unwrap_err().to_string();
            assert!(e.contains(bad), "{e}");
        }
    }

    #[test]
    fn twelve_presets() {
        let all = all_presets();
        assert_eq!(all.len(), 12);
        assert!(all.iter().all(|p| preset(p).is_ok()));
    }
}
