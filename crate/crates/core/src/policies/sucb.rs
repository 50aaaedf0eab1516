//! Scalarized UCB: fixed weights collapse the reward vector, then UCB1.

use rand::RngCore;

use super::{choose_uniform, AlgoKind, MabStats, Pending, Policy};
use crate::error::{Error, Result};
use crate::pareto::ParetoFront;

/// `mean + √(2 ln t / n)`.
pub fn ucb1_index(mean: f64, t: usize, pulls: u64) -> f64 {
    mean + (2.0 * (t as f64).ln().max(0.0) / pulls as f64).sqrt()
}

#[derive(Debug, Clone)]
pub struct ScalarizedUcb {
    stats: MabStats,
    weights: Vec<f64>,
    pending: Pending,
}

impl ScalarizedUcb {
    pub fn new(num_arms: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::invalid(
                "scalarization weights must be finite and non-negative",
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "scalarization weights sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            stats: MabStats::new(num_arms, weights.len())?,
            weights,
            pending: Pending::default(),
        })
    }

    pub fn equal_weights(num_arms: usize, num_objectives: usize) -> Result<Self> {
        if num_objectives == 0 {
            return Err(Error::invalid("need at least one objective"));
        }
        Self::new(num_arms, vec![1.0 / num_objectives as f64; num_objectives])
    }

    pub fn stats(&self) -> &MabStats {
        &self.stats
    }

    pub fn scalarized_mean(&self, arm: usize) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, w)| w * self.stats.mean(arm, i))
            .sum()
    }
}

impl Policy for ScalarizedUcb {
    fn algo(&self) -> AlgoKind {
        AlgoKind::Sucb
    }

    fn select_arm(&mut self, t: usize, rng: &mut dyn RngCore) -> Result<usize> {
        let arm = match self.stats.first_unplayed() {
            Some(a) => a,
            None => {
                let indices: Vec<f64> = (0..self.stats.num_arms())
                    .map(|a| ucb1_index(self.scalarized_mean(a), t.max(1), self.stats.count(a)))
                    .collect();
                let best = indices.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let tied: Vec<usize> = (0..indices.len()).filter(|&a| indices[a] == best).collect();
                choose_uniform(&tied, rng)
            }
        };
        self.pending.set(arm)?;
        Ok(arm)
    }

    fn update(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        self.stats.record(arm, reward)?;
        self.pending.take(arm)
    }

    fn current_front(&self) -> Option<&ParetoFront> {
        None
    }
}
