//! Experiment configuration and its flat TOML file format. Missing keys take
//! the defaults shown below.
//!
//! ```toml
//! format_version = 1
//! d = 10                 # context dimension (>= 2)
//! m = 5                  # objectives (>= 1)
//! horizon = 3000         # rounds per trial
//! trials = 10
//! seed = 0               # base seed for every derived stream
//! algorithms = ["moglb", "pucb", "sucb", "pts"]
//! gamma_mode = "tuned"   # or "theoretical"
//! c = 0.1                # tuned width scale, in [1e-3, 1]
//! delta = 0.1            # in (0, 1)
//! lambda = 1.0           # optional; default max(1, kappa/2)
//! pin_instance = false   # one instance for all trials
//! instance = "inst.json" # optional pinned instance file
//! output = "out/run"     # optional output directory
//! max_attempts = 1000
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environment::DEFAULT_MAX_ATTEMPTS;
use crate::error::{Error, Result};
use crate::policies::{AlgoKind, GammaMode, MoglbConfig, PolicySettings};

pub const CONFIG_FORMAT_VERSION: u32 = 1;
pub const TUNED_C_RANGE: (f64, f64) = (1e-3, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GammaModeKind {
    Theoretical,
    Tuned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub format_version: u32,
    #[serde(rename = "d")]
    pub dim: usize,
    #[serde(rename = "m")]
    pub num_objectives: usize,
    pub horizon: usize,
    pub trials: usize,
    #[serde(rename = "seed")]
    pub base_seed: u64,
    pub algorithms: Vec<AlgoKind>,
    pub gamma_mode: GammaModeKind,
    pub c: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub pin_instance: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub max_attempts: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            format_version: CONFIG_FORMAT_VERSION,
            dim: 10,
            num_objectives: 5,
            horizon: 3000,
            trials: 10,
            base_seed: 0,
            algorithms: AlgoKind::ALL.to_vec(),
            gamma_mode: GammaModeKind::Tuned,
            c: 0.1,
            delta: 0.1,
            lambda: None,
            pin_instance: false,
            instance: None,
            output: None,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::invalid(msg));
        if self.format_version != CONFIG_FORMAT_VERSION {
            return fail(format!(
                "unsupported config format version {} (expected {CONFIG_FORMAT_VERSION})",
                self.format_version
            ));
        }
        if self.dim < 2 {
            return fail(format!("d must be at least 2, got {}", self.dim));
        }
        if self.num_objectives < 1 {
            return fail("m must be at least 1".into());
        }
        if self.horizon < 1 {
            return fail("horizon must be at least 1".into());
        }
        if self.trials < 1 {
            return fail("trials must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        check_c(self.c)?;
        if let Some(l) = self.lambda {
            if !(l > 0.0 && l.is_finite()) {
                return fail(format!("lambda must be positive, got {l}"));
            }
        }
        if self.base_seed > i64::MAX as u64 {
            return fail(format!(
                "seed must be at most {}, got {}",
                i64::MAX,
                self.base_seed
            ));
        }
        if self.algorithms.is_empty() {
            return fail("at least one algorithm is required".into());
        }
        if self.max_attempts == 0 {
            return fail("max_attempts must be positive".into());
        }
        Ok(())
    }

    /// Distinct algorithms in canonical order.
    pub fn roster(&self) -> Vec<AlgoKind> {
        let mut algos = self.algorithms.clone();
        algos.sort();
        algos.dedup();
        algos
    }

    pub fn gamma(&self) -> GammaMode {
        match self.gamma_mode {
            GammaModeKind::Theoretical => GammaMode::Theoretical,
            GammaModeKind::Tuned => GammaMode::Tuned { c: self.c },
        }
    }

    pub fn policy_settings(&self) -> PolicySettings {
        PolicySettings {
            moglb: MoglbConfig {
                gamma_mode: self.gamma(),
                delta: self.delta,
                lambda: self.lambda,
            },
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }
}

pub fn check_c(c: f64) -> Result<()> {
    let (lo, hi) = TUNED_C_RANGE;
    if !(lo..=hi).contains(&c) {
        return Err(Error::invalid(format!(
            "c must lie in [{lo}, {hi}], got {c}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig {
            dim: 7,
            base_seed: i64::MAX as u64,
            c: 0.0123456789012345,
            lambda: Some(1.5),
            algorithms: vec![AlgoKind::Pts, AlgoKind::Moglb],
            instance: Some("a/b.json".into()),
            gamma_mode: GammaModeKind::Theoretical,
            ..ExperimentConfig::default()
        };
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn invariants_enforced() {
        let bad = [
            ExperimentConfig {
                dim: 1,
                ..Default::default()
            },
            ExperimentConfig {
                num_objectives: 0,
                ..Default::default()
            },
            ExperimentConfig {
                horizon: 0,
                ..Default::default()
            },
            ExperimentConfig {
                trials: 0,
                ..Default::default()
            },
            ExperimentConfig {
                delta: 1.0,
                ..Default::default()
            },
            ExperimentConfig {
                c: 2.0,
                ..Default::default()
            },
            ExperimentConfig {
                c: 1e-4,
                ..Default::default()
            },
            ExperimentConfig {
                algorithms: vec![],
                ..Default::default()
            },
            ExperimentConfig {
                format_version: 2,
                ..Default::default()
            },
            ExperimentConfig {
                base_seed: u64::MAX,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(
                matches!(cfg.validate(), Err(Error::InvalidArgument(_))),
                "{cfg:?}"
            );
        }
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg = ExperimentConfig::from_toml("d = 4\nalgorithms = [\"pts\"]\n").unwrap();
        assert_eq!(cfg.dim, 4);
        assert_eq!(cfg.algorithms, vec![AlgoKind::Pts]);
        assert_eq!(cfg.horizon, ExperimentConfig::default().horizon);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = ExperimentConfig::default().to_toml() + "bogus = 3\n";
        assert!(matches!(
            ExperimentConfig::from_toml(&text),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn roster_is_canonical() {
        let cfg = ExperimentConfig {
            algorithms: vec![AlgoKind::Pts, AlgoKind::Moglb, AlgoKind::Pts],
            ..Default::default()
        };
        assert_eq!(cfg.roster(), vec![AlgoKind::Moglb, AlgoKind::Pts]);
    }
}
