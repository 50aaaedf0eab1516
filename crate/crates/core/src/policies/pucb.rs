//! Pareto UCB: per-objective UCB1-style indices, uniform play over their front.

use rand::RngCore;

use super::{choose_uniform, AlgoKind, MabStats, Pending, Policy};
use crate::error::Result;
use crate::pareto::{pareto_front, ParetoFront, RewardMatrix};

/// `mean + √(2 ln(t·(mK)^{1/4}) / n)`.
pub fn pucb_index(mean: f64, t: usize, pulls: u64, num_objectives: usize, num_arms: usize) -> f64 {
    let scale = ((num_objectives * num_arms) as f64).powf(0.25);
    let log_term = (t as f64 * scale).ln().max(0.0);
    mean + (2.0 * log_term / pulls as f64).sqrt()
}

#[derive(Debug, Clone)]
pub struct ParetoUcb {
    stats: MabStats,
    front: ParetoFront,
    pending: Pending,
}

impl ParetoUcb {
    pub fn new(num_arms: usize, num_objectives: usize) -> Result<Self> {
        Ok(Self {
            stats: MabStats::new(num_arms, num_objectives)?,
            front: ParetoFront::all(num_arms),
            pending: Pending::default(),
        })
    }

    pub fn stats(&self) -> &MabStats {
        &self.stats
    }

    pub fn ucb_matrix(&self, t: usize) -> RewardMatrix {
        let (k, m) = (self.stats.num_arms(), self.stats.num_objectives());
        let values = (0..k)
            .flat_map(|a| {
                (0..m).map(move |i| pucb_index(self.stats.mean(a, i), t, self.stats.count(a), m, k))
            })
            .collect();
        RewardMatrix::new(k, m, values).expect("all arms pulled")
    }
}

impl Policy for ParetoUcb {
    fn algo(&self) -> AlgoKind {
        AlgoKind::Pucb
    }

    fn select_arm(&mut self, t: usize, rng: &mut dyn RngCore) -> Result<usize> {
        // unpulled arms carry an infinite index and tie with each other
        let arm = match self.stats.first_unplayed() {
            Some(a) => {
                self.front = ParetoFront::from_indices(self.stats.unplayed());
                a
            }
            None => {
                self.front = pareto_front(&self.ucb_matrix(t.max(1)));
                choose_uniform(self.front.indices(), rng)
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
        Some(&self.front)
    }
}
