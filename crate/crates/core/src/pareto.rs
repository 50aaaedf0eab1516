//! Pareto order over reward vectors (larger is better in every objective).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `K × m` matrix of reward vectors, one row per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardMatrix {
    num_arms: usize,
    num_objectives: usize,
    values: Vec<f64>,
}

impl RewardMatrix {
    /// Builds a matrix from row-major values.
    pub fn new(num_arms: usize, num_objectives: usize, values: Vec<f64>) -> Result<Self> {
        if num_arms == 0 || num_objectives == 0 {
            return Err(Error::invalid(
                "reward matrix must have at least one row and column",
            ));
        }
        if values.len() != num_arms * num_objectives {
            return Err(Error::invalid(format!(
                "reward matrix expects {} values, got {}",
                num_arms * num_objectives,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("reward matrix has non-finite entries"));
        }
        Ok(Self {
            num_arms,
            num_objectives,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("reward rows have unequal lengths"));
        }
        Self::new(rows.len(), m, rows.concat())
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn num_objectives(&self) -> usize {
        self.num_objectives
    }

    pub fn row(&self, arm: usize) -> &[f64] {
        let m = self.num_objectives;
        &self.values[arm * m..(arm + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.num_objectives)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Sorted set of arm indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParetoFront(Vec<usize>);

impl ParetoFront {
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Self(indices)
    }

    /// Every arm in `0..num_arms`.
    pub fn all(num_arms: usize) -> Self {
        Self((0..num_arms).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.0.binary_search(&arm).is_ok()
    }
}

fn check_lengths(u: &[f64], v: &[f64]) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::invalid(format!(
            "reward vectors have different lengths ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    Ok(())
}

/// `u` dominates `v`: `u ≥ v` componentwise with at least one strict coordinate.
pub fn dominates(u: &[f64], v: &[f64]) -> Result<bool> {
    check_lengths(u, v)?;
    Ok(dominates_unchecked(u, v))
}

/// `v` is not dominated by `u`: `v = u`, or `v` beats `u` somewhere.
pub fn not_dominated(v: &[f64], u: &[f64]) -> Result<bool> {
    check_lengths(u, v)?;
    Ok(v == u || v.iter().zip(u).any(|(a, b)| a > b))
}

#[inline]
pub(crate) fn dominates_unchecked(u: &[f64], v: &[f64]) -> bool {
    let mut strict = false;
    for (a, b) in u.iter().zip(v) {
        if a < b {
            return false;
        }
        if a > b {
            strict = true;
        }
    }
    strict
}

/// Indices of rows not dominated by any other row. Duplicate optimal rows all
/// enter the front.
pub fn pareto_front(rewards: &RewardMatrix) -> ParetoFront {
    let front = (0..rewards.num_arms())
        .filter(|&k| {
            let row = rewards.row(k);
            rewards.rows().all(|other| !dominates_unchecked(other, row))
        })
        .collect();
    ParetoFront(front)
}

/// Pareto suboptimality gap of `arm`: the smallest uniform boost `ε ≥ 0` that
/// leaves the arm's row undominated, `max(0, max_{k'} min_i (μ_{k'}^i − μ_k^i))`.
pub fn psg(rewards: &RewardMatrix, arm: usize) -> Result<f64> {
    if arm >= rewards.num_arms() {
        return Err(Error::invalid(format!(
            "arm index {arm} out of range for {} arms",
            rewards.num_arms()
        )));
    }
    let row = rewards.row(arm);
    let gap = rewards
        .rows()
        .map(|other| {
            other
                .iter()
                .zip(row)
                .map(|(a, b)| a - b)
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    Ok(gap)
}

/// PSG of every arm.
pub fn psg_table(rewards: &RewardMatrix) -> Vec<f64> {
    (0..rewards.num_arms())
        .map(|k| psg(rewards, k).expect("index in range"))
        .collect()
}

/// `|a ∩ b| / |a ∪ b|`.
pub fn jaccard(a: &ParetoFront, b: &ParetoFront) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::invalid(
            "jaccard index of two empty sets is undefined",
        ));
    }
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    let (x, y) = (a.indices(), b.indices());
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = x.len() + y.len() - inter;
    Ok(inter as f64 / union as f64)
}
