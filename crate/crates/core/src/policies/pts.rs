//! Pareto Thompson sampling with Beta-Bernoulli posteriors per arm and objective.

use rand::RngCore;
use rand_distr::{Beta, Distribution};

use super::{choose_uniform, AlgoKind, Pending, Policy};
use crate::error::{Error, Result};
use crate::pareto::{pareto_front, ParetoFront, RewardMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPosterior {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for BetaPosterior {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
        }
    }
}

impl BetaPosterior {
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        Beta::new(self.alpha, self.beta)
            .expect("Beta parameters are at least 1")
            .sample(rng)
    }
}

#[derive(Debug, Clone)]
pub struct ParetoThompson {
    num_objectives: usize,
    posteriors: Vec<BetaPosterior>,
    counts: Vec<u64>,
    front: ParetoFront,
    pending: Pending,
}

impl ParetoThompson {
    pub fn new(num_arms: usize, num_objectives: usize) -> Result<Self> {
        if num_arms == 0 || num_objectives == 0 {
            return Err(Error::invalid("need at least one arm and one objective"));
        }
        Ok(Self {
            num_objectives,
            posteriors: vec![BetaPosterior::default(); num_arms * num_objectives],
            counts: vec![0; num_arms],
            front: ParetoFront::all(num_arms),
            pending: Pending::default(),
        })
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    pub fn posterior(&self, arm: usize, objective: usize) -> BetaPosterior {
        self.posteriors[arm * self.num_objectives + objective]
    }

    pub fn set_posterior(&mut self, arm: usize, objective: usize, posterior: BetaPosterior) {
        self.posteriors[arm * self.num_objectives + objective] = posterior;
    }

    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    /// Pareto front of one joint posterior draw, and a uniform pick from it.
    pub fn sample_front(&self, rng: &mut dyn RngCore) -> ParetoFront {
        let values = self.posteriors.iter().map(|p| p.sample(rng)).collect();
        pareto_front(
            &RewardMatrix::new(self.num_arms(), self.num_objectives, values)
                .expect("draws in [0,1]"),
        )
    }
}

impl Policy for ParetoThompson {
    fn algo(&self) -> AlgoKind {
        AlgoKind::Pts
    }

    fn select_arm(&mut self, _t: usize, rng: &mut dyn RngCore) -> Result<usize> {
        let arm = match self.counts.iter().position(|&n| n == 0) {
            Some(a) => {
                self.front = ParetoFront::from_indices(
                    (0..self.num_arms())
                        .filter(|&k| self.counts[k] == 0)
                        .collect(),
                );
                a
            }
            None => {
                self.front = self.sample_front(rng);
                choose_uniform(self.front.indices(), rng)
            }
        };
        self.pending.set(arm)?;
        Ok(arm)
    }

    fn update(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        if reward.len() != self.num_objectives {
            return Err(Error::invalid(format!(
                "reward has {} entries, expected {}",
                reward.len(),
                self.num_objectives
            )));
        }
        if let Some(r) = reward.iter().find(|&&r| r != 0.0 && r != 1.0) {
            return Err(Error::invalid(format!(
                "Thompson sampling needs one-bit rewards, got {r}"
            )));
        }
        self.pending.take(arm)?;
        self.counts[arm] += 1;
        let m = self.num_objectives;
        for (p, &r) in self.posteriors[arm * m..(arm + 1) * m]
            .iter_mut()
            .zip(reward)
        {
            if r == 1.0 {
                p.alpha += 1.0;
            } else {
                p.beta += 1.0;
            }
        }
        Ok(())
    }

    fn current_front(&self) -> Option<&ParetoFront> {
        Some(&self.front)
    }
}
