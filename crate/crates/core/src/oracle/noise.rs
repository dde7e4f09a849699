use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Imperfections applied by a [`super::ChannelOracle`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseConfig {
    /// Depolarizing strength applied after each channel application.
    pub depolarizing_p: f64,
    /// Standard deviation (radians) of the random pulse-rotation error
    /// applied to every state preparation.
    pub rotation_error_sigma: f64,
    /// Per-qubit readout bit-flip probability.
    pub spam_flip_p: f64,
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn is_noiseless(&self) -> bool {
        self.depolarizing_p == 0.0 && self.rotation_error_sigma == 0.0 && self.spam_flip_p == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidNoise(format!("{name} = {p} is not in [0, 1]")))
            }
        };
        prob("depolarizing_p", self.depolarizing_p)?;
        prob("spam_flip_p", self.spam_flip_p)?;
        if !(self.rotation_error_sigma.is_finite() && self.rotation_error_sigma >= 0.0) {
            return Err(Error::InvalidNoise(format!(
                "rotation_error_sigma = {} must be finite and non-negative",
                self.rotation_error_sigma
            )));
        }
        Ok(())
    }
}

/// Parses `key=value` lists such as `depol=0.01,rot=0.02,spam=0`.
impl FromStr for NoiseConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut cfg = NoiseConfig::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidNoise(format!("expected key=value, got '{item}'")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidNoise(format!("bad number in '{item}'")))?;
            match key.trim() {
                "depol" | "depolarizing" | "depolarizing_p" => cfg.depolarizing_p = value,
                "rot" | "rotation" | "rotation_error_sigma" => cfg.rotation_error_sigma = value,
                "spam" | "spam_flip" | "spam_flip_p" => cfg.spam_flip_p = value,
                other => return Err(Error::InvalidNoise(format!("unknown noise key '{other}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for NoiseConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "depol={},rot={},spam={}",
            self.depolarizing_p, self.rotation_error_sigma, self.spam_flip_p
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_lists() {
        let n: NoiseConfig = "depol=0.01, rot=0.02".parse().unwrap();
        assert_eq!(n.depolarizing_p, 0.01);
        assert_eq!(n.rotation_error_sigma, 0.02);
        assert_eq!(n.spam_flip_p, 0.0);
        assert!("depol=2".parse::<NoiseConfig>().is_err());
        assert!("foo=1".parse::<NoiseConfig>().is_err());
        assert!("".parse::<NoiseConfig>().unwrap().is_noiseless());
    }

    #[test]
    fn json_field_names() {
        let n = NoiseConfig {
            depolarizing_p: 0.1,
            rotation_error_sigma: 0.2,
            spam_flip_p: 0.3,
        };
        let v = serde_json::to_value(n).unwrap();
        assert_eq!(v["depolarizing_p"], 0.1);
        assert_eq!(v["rotation_error_sigma"], 0.2);
        assert_eq!(v["spam_flip_p"], 0.3);
    }
}
