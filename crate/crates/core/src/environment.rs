//! Synthetic problem instances and their ground truth.
//!
//! An instance has `4d` arms: `3d` drawn uniformly from the centered ball of
//! radius 0.5 followed by `d` drawn from the unit ball. Coefficients are drawn
//! once from the non-negative part of the unit ball and the arm set is redrawn
//! until the true Pareto front has at most `d` arms.

use std::path::Path;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{euclidean_norm, GlmObjective, LinkBounds, LinkKind};
use crate::pareto::{pareto_front, psg_table, ParetoFront, RewardMatrix};

pub const INSTANCE_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

/// Radius of the ball the "inner" arms are drawn from.
pub const INNER_RADIUS: f64 = 0.5;

/// Finite decision set; every context has norm at most 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSet {
    dim: usize,
    arms: Vec<Vec<f64>>,
}

impl ArmSet {
    pub fn new(arms: Vec<Vec<f64>>) -> Result<Self> {
        let dim = arms.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::invalid(
                "arm set must be non-empty with positive dimension",
            ));
        }
        for (k, x) in arms.iter().enumerate() {
            if x.len() != dim {
                return Err(Error::invalid(format!(
                    "arm {k} has length {}, expected {dim}",
                    x.len()
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("arm {k} has non-finite entries")));
            }
            let norm = euclidean_norm(x);
            if norm > 1.0 + 1e-12 {
                return Err(Error::invalid(format!("arm {k} has norm {norm} > 1")));
            }
        }
        Ok(Self { dim, arms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn arm(&self, k: usize) -> &[f64] {
        &self.arms[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.arms.iter().map(Vec::as_slice)
    }
}

/// Arm set, reward models, and precomputed ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    seed: Option<u64>,
    arms: ArmSet,
    objectives: Vec<GlmObjective>,
    expected_rewards: RewardMatrix,
    true_front: ParetoFront,
    psg_table: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(arms: ArmSet, objectives: Vec<GlmObjective>) -> Result<Self> {
        if objectives.is_empty() {
            return Err(Error::invalid("an instance needs at least one objective"));
        }
        if let Some(o) = objectives.iter().find(|o| o.dim() != arms.dim()) {
            return Err(Error::invalid(format!(
                "objective dimension {} does not match arm dimension {}",
                o.dim(),
                arms.dim()
            )));
        }
        let expected_rewards = expected_matrix(&arms, &objectives)?;
        let true_front = pareto_front(&expected_rewards);
        let psg_table = psg_table(&expected_rewards);
        Ok(Self {
            seed: None,
            arms,
            objectives,
            expected_rewards,
            true_front,
            psg_table,
        })
    }

    /// Generates from a fresh ChaCha stream seeded with `seed`, recording the seed.
    pub fn generate(
        dim: usize,
        num_objectives: usize,
        seed: u64,
        max_attempts: usize,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inst = generate_instance(dim, num_objectives, &mut rng, max_attempts)?;
        inst.seed = Some(seed);
        Ok(inst)
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.seed = seed;
        self
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn arms(&self) -> &ArmSet {
        &self.arms
    }

    pub fn objectives(&self) -> &[GlmObjective] {
        &self.objectives
    }

    pub fn dim(&self) -> usize {
        self.arms.dim()
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn num_objectives(&self) -> usize {
        self.objectives.len()
    }

    pub fn expected_rewards(&self) -> &RewardMatrix {
        &self.expected_rewards
    }

    pub fn true_front(&self) -> &ParetoFront {
        &self.true_front
    }

    pub fn psg_table(&self) -> &[f64] {
        &self.psg_table
    }

    pub fn links(&self) -> Vec<LinkKind> {
        self.objectives.iter().map(|o| o.link).collect()
    }

    /// Worst-case constants across objectives: smallest `κ`, largest `L`, `U`, `R`, `D`.
    pub fn pooled_bounds(&self) -> (LinkBounds, f64) {
        let mut pooled = LinkBounds {
            kappa: f64::INFINITY,
            lipschitz: 0.0,
            mean_bound: 0.0,
            reward_bound: 0.0,
        };
        let mut norm_bound = 0.0f64;
        for o in &self.objectives {
            let b = o.bounds();
            pooled.kappa = pooled.kappa.min(b.kappa);
            pooled.lipschitz = pooled.lipschitz.max(b.lipschitz);
            pooled.mean_bound = pooled.mean_bound.max(b.mean_bound);
            pooled.reward_bound = pooled.reward_bound.max(b.reward_bound);
            norm_bound = norm_bound.max(o.norm_bound);
        }
        (pooled, norm_bound)
    }

    /// One reward vector for playing `arm`, sampled objective by objective.
    pub fn sample_rewards(&self, arm: usize, rng: &mut dyn RngCore) -> Result<Vec<f64>> {
        if arm >= self.num_arms() {
            return Err(Error::invalid(format!("arm index {arm} out of range")));
        }
        let x = self.arms.arm(arm);
        self.objectives
            .iter()
            .map(|o| o.sample_reward(x, rng))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let file = InstanceFile {
            format_version: INSTANCE_FORMAT_VERSION,
            seed: self.seed,
            dim: self.dim(),
            num_arms: self.num_arms(),
            num_objectives: self.num_objectives(),
            arms: self.arms.arms.clone(),
            objectives: self.objectives.clone(),
        };
        serde_json::to_string_pretty(&file).expect("instance serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Format(format!("instance file: {e}")))?;
        if file.format_version != INSTANCE_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported instance format version {} (expected {INSTANCE_FORMAT_VERSION})",
                file.format_version
            )));
        }
        if file.arms.len() != file.num_arms || file.objectives.len() != file.num_objectives {
            return Err(Error::Format(
                "instance header counts do not match contents".into(),
            ));
        }
        let arms = ArmSet::new(file.arms)?;
        if arms.dim() != file.dim {
            return Err(Error::Format(
                "instance header dimension does not match arms".into(),
            ));
        }
        let objectives = file
            .objectives
            .into_iter()
            .map(|o| {
                let noise = o.identity_noise;
                GlmObjective::new(o.link, o.theta, o.norm_bound)
                    .map(|g| g.with_identity_noise(noise))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(arms, objectives)?.with_seed(file.seed))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    format_version: u32,
    seed: Option<u64>,
    dim: usize,
    num_arms: usize,
    num_objectives: usize,
    arms: Vec<Vec<f64>>,
    objectives: Vec<GlmObjective>,
}

fn expected_matrix(arms: &ArmSet, objectives: &[GlmObjective]) -> Result<RewardMatrix> {
    let values = arms
        .iter()
        .flat_map(|x| objectives.iter().map(move |o| o.expected_reward(x)))
        .collect();
    RewardMatrix::new(arms.len(), objectives.len(), values)
}

/// Uniform draw from the centered ball of the given radius in `dim` dimensions.
pub fn sample_in_ball(dim: usize, radius: f64, rng: &mut dyn RngCore) -> Vec<f64> {
    let mut dir: Vec<f64>;
    loop {
        dir = (0..dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let n = euclidean_norm(&dir);
        if n > 0.0 && n.is_finite() {
            dir.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    // u ∈ (0, 1]
    let u: f64 = 1.0 - rng.random::<f64>();
    let r = radius * u.powf(1.0 / dim as f64);
    dir.into_iter().map(|v| v * r).collect()
}

/// Uniform draw from the intersection of the unit ball with the non-negative orthant.
pub fn sample_coefficients(dim: usize, rng: &mut dyn RngCore) -> Vec<f64> {
    sample_in_ball(dim, 1.0, rng)
        .into_iter()
        .map(f64::abs)
        .collect()
}

/// `[probit, probit, logit, logit, logit]` for five objectives, otherwise
/// alternating probit/logit starting with probit.
pub fn default_links(num_objectives: usize) -> Vec<LinkKind> {
    if num_objectives == 5 {
        vec![
            LinkKind::Probit,
            LinkKind::Probit,
            LinkKind::Logit,
            LinkKind::Logit,
            LinkKind::Logit,
        ]
    } else {
        (0..num_objectives)
            .map(|i| {
                if i % 2 == 0 {
                    LinkKind::Probit
                } else {
                    LinkKind::Logit
                }
            })
            .collect()
    }
}

pub fn generate_instance(
    dim: usize,
    num_objectives: usize,
    rng: &mut dyn RngCore,
    max_attempts: usize,
) -> Result<ProblemInstance> {
    if num_objectives == 0 {
        return Err(Error::invalid("need at least one objective"));
    }
    generate_instance_with_links(dim, &default_links(num_objectives), rng, max_attempts)
}

/// Like [`generate_instance`] with an explicit link per objective.
pub fn generate_instance_with_links(
    dim: usize,
    links: &[LinkKind],
    rng: &mut dyn RngCore,
    max_attempts: usize,
) -> Result<ProblemInstance> {
    if dim < 2 {
        return Err(Error::invalid(format!(
            "dimension must be at least 2, got {dim}"
        )));
    }
    if links.is_empty() {
        return Err(Error::invalid("need at least one objective"));
    }
    if max_attempts == 0 {
        return Err(Error::invalid("max_attempts must be positive"));
    }
    let objectives = links
        .iter()
        .map(|&link| GlmObjective::new(link, sample_coefficients(dim, rng), 1.0))
        .collect::<Result<Vec<_>>>()?;

    let mut smallest = usize::MAX;
    for _ in 0..max_attempts {
        let mut arms: Vec<Vec<f64>> = (0..3 * dim)
            .map(|_| sample_in_ball(dim, INNER_RADIUS, rng))
            .collect();
        arms.extend((0..dim).map(|_| sample_in_ball(dim, 1.0, rng)));
        let arms = ArmSet::new(arms)?;
        let expected = expected_matrix(&arms, &objectives)?;
        let front = pareto_front(&expected).len();
        smallest = smallest.min(front);
        if front <= dim {
            return ProblemInstance::new(arms, objectives);
        }
    }
    Err(Error::GenerationFailure {
        attempts: max_attempts,
        smallest_front: smallest,
        limit: dim,
    })
}
