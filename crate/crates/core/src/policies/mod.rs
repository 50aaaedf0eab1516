//! Arm-selection policies sharing one select/update protocol.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::environment::ProblemInstance;
use crate::error::{Error, Result};
use crate::pareto::ParetoFront;

mod moglb;
mod pts;
mod pucb;
mod sucb;

pub use moglb::{GammaMode, MoglbConfig, MoglbPolicy, TUNED_GAMMA_FLOOR};
pub use pts::{BetaPosterior, ParetoThompson};
pub use pucb::{pucb_index, ParetoUcb};
pub use sucb::{ucb1_index, ScalarizedUcb};

/// Sequential decision maker. `select_arm` and `update` strictly alternate.
pub trait Policy: Send {
    fn algo(&self) -> AlgoKind;

    /// Picks an arm for round `t` (1-based).
    fn select_arm(&mut self, t: usize, rng: &mut dyn RngCore) -> Result<usize>;

    /// Feeds back the reward vector observed for the arm returned by the last `select_arm`.
    fn update(&mut self, arm: usize, reward: &[f64]) -> Result<()>;

    /// The approximate Pareto front used by the most recent selection, if the
    /// policy maintains one.
    fn current_front(&self) -> Option<&ParetoFront>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoKind {
    Moglb,
    Pucb,
    Sucb,
    Pts,
}

impl AlgoKind {
    pub const ALL: [AlgoKind; 4] = [
        AlgoKind::Moglb,
        AlgoKind::Pucb,
        AlgoKind::Sucb,
        AlgoKind::Pts,
    ];

    /// Stable identifier mixed into random-stream derivation.
    pub fn id(self) -> u64 {
        match self {
            AlgoKind::Moglb => 0,
            AlgoKind::Pucb => 1,
            AlgoKind::Sucb => 2,
            AlgoKind::Pts => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlgoKind::Moglb => "moglb",
            AlgoKind::Pucb => "pucb",
            AlgoKind::Sucb => "sucb",
            AlgoKind::Pts => "pts",
        }
    }

    pub fn has_front(self) -> bool {
        !matches!(self, AlgoKind::Sucb)
    }
}

impl fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgoKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        AlgoKind::ALL
            .into_iter()
            .find(|a| a.name() == key || (key == "moglbucb" && *a == AlgoKind::Moglb))
            .ok_or_else(|| {
                Error::invalid(format!(
                    "unknown algorithm '{s}' (valid: {})",
                    AlgoKind::ALL.map(AlgoKind::name).join(", ")
                ))
            })
    }
}

/// Policy construction knobs shared by the harness and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PolicySettings {
    pub moglb: MoglbConfig,
}

/// Fresh policy of the given kind for `instance`.
pub fn build_policy(
    kind: AlgoKind,
    instance: &ProblemInstance,
    settings: &PolicySettings,
) -> Result<Box<dyn Policy>> {
    let k = instance.num_arms();
    let m = instance.num_objectives();
    Ok(match kind {
        AlgoKind::Moglb => Box::new(MoglbPolicy::for_instance(instance, settings.moglb)?),
        AlgoKind::Pucb => Box::new(ParetoUcb::new(k, m)?),
        AlgoKind::Sucb => Box::new(ScalarizedUcb::equal_weights(k, m)?),
        AlgoKind::Pts => Box::new(ParetoThompson::new(k, m)?),
    })
}

/// Uniform pick from a non-empty candidate list.
pub(crate) fn choose_uniform(candidates: &[usize], rng: &mut dyn RngCore) -> usize {
    debug_assert!(!candidates.is_empty());
    if candidates.len() == 1 {
        candidates[0]
    } else {
        candidates[rng.random_range(0..candidates.len())]
    }
}

/// Tracks the select/update alternation.
#[derive(Debug, Clone, Default)]
pub(crate) struct Pending(Option<usize>);

impl Pending {
    pub(crate) fn set(&mut self, arm: usize) -> Result<()> {
        if let Some(prev) = self.0 {
            return Err(Error::invalid(format!(
                "select_arm called twice without update (arm {prev} pending)"
            )));
        }
        self.0 = Some(arm);
        Ok(())
    }

    pub(crate) fn take(&mut self, arm: usize) -> Result<()> {
        match self.0.take() {
            Some(a) if a == arm => Ok(()),
            Some(a) => {
                self.0 = Some(a);
                Err(Error::invalid(format!(
                    "update for arm {arm} but arm {a} was selected"
                )))
            }
            None => Err(Error::invalid(
                "update called without a preceding select_arm",
            )),
        }
    }
}

/// Per-arm, per-objective pull counts and reward sums.
#[derive(Debug, Clone)]
pub struct MabStats {
    num_objectives: usize,
    counts: Vec<u64>,
    sums: Vec<f64>,
}

impl MabStats {
    pub fn new(num_arms: usize, num_objectives: usize) -> Result<Self> {
        if num_arms == 0 || num_objectives == 0 {
            return Err(Error::invalid("need at least one arm and one objective"));
        }
        Ok(Self {
            num_objectives,
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms * num_objectives],
        })
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    pub fn mean(&self, arm: usize, objective: usize) -> f64 {
        let n = self.counts[arm];
        if n == 0 {
            0.0
        } else {
            self.sums[arm * self.num_objectives + objective] / n as f64
        }
    }

    pub fn record(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        if arm >= self.num_arms() {
            return Err(Error::invalid(format!("arm index {arm} out of range")));
        }
        if reward.len() != self.num_objectives {
            return Err(Error::invalid(format!(
                "reward has {} entries, expected {}",
                reward.len(),
                self.num_objectives
            )));
        }
        self.counts[arm] += 1;
        let m = self.num_objectives;
        for (s, r) in self.sums[arm * m..(arm + 1) * m].iter_mut().zip(reward) {
            *s += r;
        }
        Ok(())
    }

    /// Lowest-index arm that has never been pulled.
    pub fn first_unplayed(&self) -> Option<usize> {
        self.counts.iter().position(|&n| n == 0)
    }

    pub fn unplayed(&self) -> Vec<usize> {
        (0..self.num_arms())
            .filter(|&k| self.counts[k] == 0)
            .collect()
    }
}
