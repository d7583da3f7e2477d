use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Event-generating rule plus the transition formula it is paired with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Degree- and history-weighted transitions, deterministic argmax.
    Rw1,
    /// Degree- and history-weighted transitions, biased-dice sampling.
    Rw2,
    /// Inverse-distance transitions with the RW1 argmax.
    NaiveRw1,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Rw1 => "rw1",
            Variant::Rw2 => "rw2",
            Variant::NaiveRw1 => "naive",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rw1" => Ok(Variant::Rw1),
            "rw2" => Ok(Variant::Rw2),
            "naive" | "naive-rw1" => Ok(Variant::NaiveRw1),
            other => Err(Error::usage(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// How the interaction range R is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RangeSpec {
    /// Median of the b-th smallest initial distance per particle (1-indexed).
    Rank(usize),
    /// R given directly.
    Radius(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub sigma: f64,
    /// Collision-avoiding threshold; neighbors at distance <= theta are never targets.
    pub theta: f64,
    pub range: RangeSpec,
    /// Stopping threshold on the summed walk length. `None` means `1e-3 * N`.
    pub epsilon: Option<f64>,
    pub max_iters: usize,
    pub variant: Variant,
    #[serde(with = "seed_string")]
    pub seed: u64,
    /// Whether a particle counts itself as a neighbor.
    pub include_self: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            theta: 1.1,
            range: RangeSpec::Rank(15),
            epsilon: None,
            max_iters: 1000,
            variant: Variant::Rw1,
            seed: 0,
            include_self: true,
        }
    }
}

impl ModelParams {
    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_range(mut self, range: RangeSpec) -> Self {
        self.range = range;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn epsilon_for(&self, n: usize) -> f64 {
        self.epsilon.unwrap_or(1e-3 * n as f64)
    }

    /// Checks everything that can be checked without the data.
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::usage(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.theta.is_finite() && self.theta >= 1.0) {
            return Err(Error::usage(format!("theta must be >= 1, got {}", self.theta)));
        }
        match self.range {
            RangeSpec::Rank(0) => return Err(Error::usage("b must be >= 1")),
            RangeSpec::Radius(r) if !(r.is_finite() && r >= 1.0) => {
                return Err(Error::usage(format!("range must be >= 1, got {r}")));
            }
            _ => {}
        }
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::usage(format!("epsilon must be positive, got {eps}")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::usage("max_iters must be >= 1"));
        }
        Ok(())
    }
}

/// TOML integers are signed 64-bit, so seeds travel as strings.
mod seed_string {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&seed.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = ModelParams::default();
        p.validate().unwrap();
        assert_eq!(p.sigma, 1.0);
        assert_eq!(p.theta, 1.1);
        assert_eq!(p.epsilon_for(150), 0.15);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            ModelParams { sigma: 0.0, ..Default::default() },
            ModelParams { theta: 0.9, ..Default::default() },
            ModelParams { range: RangeSpec::Rank(0), ..Default::default() },
            ModelParams { range: RangeSpec::Radius(0.5), ..Default::default() },
            ModelParams { epsilon: Some(-1.0), ..Default::default() },
            ModelParams { max_iters: 0, ..Default::default() },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(Error::Usage(_))), "{p:?}");
        }
    }

    #[test]
    fn variant_names() {
        for v in [Variant::Rw1, Variant::Rw2, Variant::NaiveRw1] {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        assert!("rw3".parse::<Variant>().is_err());
    }
}
