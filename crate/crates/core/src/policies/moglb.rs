//! MOGLB-UCB: online-Newton estimates per objective, a shared design matrix,
//! and uniform play over the Pareto front of the optimistic reward estimates.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{choose_uniform, AlgoKind, Pending, Policy};
use crate::environment::{ArmSet, ProblemInstance};
use crate::error::{Error, Result};
use crate::glm::{dot, LinkBounds, LinkKind};
use crate::linalg::{quad_form, Metric, SpdState};
use crate::pareto::{pareto_front, ParetoFront, RewardMatrix};

/// Value substituted for a zero tuned confidence width.
pub const TUNED_GAMMA_FLOOR: f64 = 1e-12;

/// How the confidence width `γ_t` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum GammaMode {
    /// High-probability width that keeps every true parameter inside its ellipsoid.
    Theoretical,
    /// `c · log(det Z_t / det Z_1)`.
    Tuned { c: f64 },
}

impl Default for GammaMode {
    fn default() -> Self {
        GammaMode::Tuned { c: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoglbConfig {
    pub gamma_mode: GammaMode,
    /// Failure probability `δ` in the theoretical width.
    pub delta: f64,
    /// Regularizer; `None` means `max(1, κ/2)`.
    pub lambda: Option<f64>,
}

impl Default for MoglbConfig {
    fn default() -> Self {
        Self {
            gamma_mode: GammaMode::default(),
            delta: 0.1,
            lambda: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MoglbPolicy {
    arms: ArmSet,
    links: Vec<LinkKind>,
    bounds: LinkBounds,
    norm_bound: f64,
    lambda: f64,
    delta: f64,
    gamma_mode: GammaMode,
    spd: SpdState,
    estimates: Vec<Vec<f64>>,
    front: ParetoFront,
    pending: Pending,
}

impl MoglbPolicy {
    /// `bounds` are pooled across objectives (smallest `κ`, largest `U` and `R`).
    pub fn new(
        arms: ArmSet,
        links: Vec<LinkKind>,
        bounds: LinkBounds,
        norm_bound: f64,
        config: MoglbConfig,
    ) -> Result<Self> {
        if links.is_empty() {
            return Err(Error::invalid("need at least one objective"));
        }
        if !(bounds.kappa > 0.0 && bounds.kappa.is_finite()) {
            return Err(Error::invalid(format!(
                "kappa must be positive, got {}",
                bounds.kappa
            )));
        }
        if !(config.delta > 0.0 && config.delta < 1.0) {
            return Err(Error::invalid(format!(
                "delta must lie in (0, 1), got {}",
                config.delta
            )));
        }
        if let GammaMode::Tuned { c } = config.gamma_mode {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::invalid(format!(
                    "tuned gamma scale must be positive, got {c}"
                )));
            }
        }
        let lambda = config
            .lambda
            .unwrap_or_else(|| (bounds.kappa / 2.0).max(1.0));
        let dim = arms.dim();
        let spd = SpdState::new(dim, lambda)?;
        let front = ParetoFront::all(arms.len());
        Ok(Self {
            estimates: vec![vec![0.0; dim]; links.len()],
            arms,
            links,
            bounds,
            norm_bound,
            lambda,
            delta: config.delta,
            gamma_mode: config.gamma_mode,
            spd,
            front,
            pending: Pending::default(),
        })
    }

    pub fn for_instance(instance: &ProblemInstance, config: MoglbConfig) -> Result<Self> {
        let (bounds, norm_bound) = instance.pooled_bounds();
        Self::new(
            instance.arms().clone(),
            instance.links(),
            bounds,
            norm_bound,
            config,
        )
    }

    pub fn spd(&self) -> &SpdState {
        &self.spd
    }

    pub fn estimates(&self) -> &[Vec<f64>] {
        &self.estimates
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn bounds(&self) -> LinkBounds {
        self.bounds
    }

    /// Number of observations absorbed so far.
    pub fn rounds_observed(&self) -> usize {
        self.spd.update_count()
    }

    /// Confidence width after `t` observations, using the current log-det ratio.
    pub fn gamma_at(&self, t: usize) -> f64 {
        let logdet = self.spd.logdet_ratio();
        match self.gamma_mode {
            GammaMode::Theoretical => {
                let LinkBounds {
                    kappa,
                    mean_bound,
                    reward_bound,
                    ..
                } = self.bounds;
                let spread = (reward_bound + mean_bound).powi(2);
                let m = self.links.len() as f64;
                let d2 = self.norm_bound * self.norm_bound;
                let log_term = (m / self.delta * (1.0 + 4.0 * d2 * t as f64).sqrt()).ln();
                16.0 * spread / kappa * log_term
                    + self.lambda * d2
                    + 2.0 * spread / kappa * logdet
                    + kappa / 2.0
            }
            GammaMode::Tuned { c } => (c * logdet).max(TUNED_GAMMA_FLOOR),
        }
    }

    /// Width that accompanies the current estimates.
    pub fn gamma(&self) -> f64 {
        self.gamma_at(self.rounds_observed())
    }

    /// `d · log(1 + κt / (2λd))`, the ceiling on the log-det ratio after `t`
    /// updates with contexts in the unit ball.
    pub fn logdet_ceiling(&self) -> f64 {
        let d = self.spd.dim() as f64;
        let t = self.rounds_observed() as f64;
        d * (1.0 + self.bounds.kappa * t / (2.0 * self.lambda * d)).ln()
    }

    /// Optimistic linear reward `θ̂_iᵀx + √γ‖x‖_{Z⁻¹}` for every arm and objective.
    pub fn ucb_matrix(&self, gamma: f64) -> RewardMatrix {
        let root = gamma.max(0.0).sqrt();
        let m = self.links.len();
        let mut values = Vec::with_capacity(self.arms.len() * m);
        for x in self.arms.iter() {
            let width = root * quad_form(self.spd.inverse(), x).max(0.0).sqrt();
            values.extend(self.estimates.iter().map(|th| dot(th, x) + width));
        }
        RewardMatrix::new(self.arms.len(), m, values).expect("finite UCB values")
    }

    /// One entry of [`Self::ucb_matrix`] for an arbitrary context.
    pub fn ucb_entry(&self, objective: usize, x: &[f64], gamma: f64) -> f64 {
        let width = gamma.max(0.0).sqrt() * quad_form(self.spd.inverse(), x).max(0.0).sqrt();
        dot(&self.estimates[objective], x) + width
    }

    /// Online Newton step on context `x` with reward vector `y`.
    pub fn observe(&mut self, x: &[f64], y: &[f64]) -> Result<()> {
        if y.len() != self.links.len() {
            return Err(Error::invalid(format!(
                "reward has {} entries, expected {}",
                y.len(),
                self.links.len()
            )));
        }
        self.spd.rank1_update(x, self.bounds.kappa / 2.0)?;
        debug_assert!(
            self.spd.logdet_ratio() <= self.logdet_ceiling() + 1e-9,
            "log-det ratio {} above ceiling {}",
            self.spd.logdet_ratio(),
            self.logdet_ceiling()
        );
        for ((theta, &link), &yi) in self.estimates.iter_mut().zip(&self.links).zip(y) {
            let residual = link.value(dot(theta, x)) - yi;
            if residual == 0.0 {
                continue;
            }
            let grad: Vec<f64> = x.iter().map(|v| residual * v).collect();
            let step = self.spd.inverse() * nalgebra::DVector::from_column_slice(&grad);
            let newton: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, b)| a - b).collect();
            *theta = self.spd.project_onto_ball(&newton, self.norm_bound)?;
        }
        Ok(())
    }

    /// Recomputes the approximate front from the current estimates.
    pub fn refresh_front(&mut self) {
        self.front = pareto_front(&self.ucb_matrix(self.gamma()));
    }

    /// `‖θ − θ̂_i‖²_Z` for objective `i`.
    pub fn estimation_error(&self, objective: usize, theta: &[f64]) -> Result<f64> {
        let diff: Vec<f64> = theta
            .iter()
            .zip(&self.estimates[objective])
            .map(|(a, b)| a - b)
            .collect();
        self.spd.mahalanobis_sq(&diff, Metric::Design)
    }
}

impl Policy for MoglbPolicy {
    fn algo(&self) -> AlgoKind {
        AlgoKind::Moglb
    }

    fn select_arm(&mut self, _t: usize, rng: &mut dyn RngCore) -> Result<usize> {
        let arm = choose_uniform(self.front.indices(), rng);
        self.pending.set(arm)?;
        Ok(arm)
    }

    fn update(&mut self, arm: usize, reward: &[f64]) -> Result<()> {
        self.pending.take(arm)?;
        let x = self.arms.arm(arm).to_vec();
        self.observe(&x, reward)?;
        self.refresh_front();
        Ok(())
    }

    fn current_front(&self) -> Option<&ParetoFront> {
        Some(&self.front)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glm::derive_bounds;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const KAPPA_LOGIT_1: f64 = 0.196_611_933_241_481_85;

    fn scalar_policy(mode: GammaMode, m: usize) -> MoglbPolicy {
        let arms = ArmSet::new(vec![vec![1.0]]).unwrap();
        let bounds = LinkBounds {
            mean_bound: 1.0,
            ..derive_bounds(LinkKind::Logit, 1.0, 0.0)
        };
        MoglbPolicy::new(
            arms,
            vec![LinkKind::Logit; m],
            bounds,
            1.0,
            MoglbConfig {
                gamma_mode: mode,
                delta: 0.1,
                lambda: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn lambda_defaults_to_rule() {
        let p = scalar_policy(GammaMode::Theoretical, 1);
        assert_eq!(p.lambda(), 1.0);
    }

    #[test]
    fn one_newton_step_by_hand() {
        let mut p = scalar_policy(GammaMode::Theoretical, 1);
        p.observe(&[1.0], &[1.0]).unwrap();
        // Z₂ = 1 + κ/2, θ̂₂ = 0.5 / Z₂
        assert_abs_diff_eq!(
            p.spd().matrix()[(0, 0)],
            1.098_305_966_620_740_9,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            p.estimates()[0][0],
            0.455_246_548_043_798_8,
            epsilon = 1e-12
        );
    }

    #[test]
    fn zero_gradient_keeps_estimate() {
        let mut p = scalar_policy(GammaMode::Theoretical, 1);
        p.observe(&[1.0], &[0.5]).unwrap();
        assert_eq!(p.estimates()[0], vec![0.0]);
        assert_eq!(p.rounds_observed(), 1);
    }

    #[test]
    fn zero_context_changes_nothing() {
        let arms = ArmSet::new(vec![vec![0.0, 0.0], vec![0.6, 0.0]]).unwrap();
        let bounds = derive_bounds(LinkKind::Logit, 1.0, 0.0);
        let mut p = MoglbPolicy::new(
            arms,
            vec![LinkKind::Logit, LinkKind::Probit],
            bounds,
            1.0,
            MoglbConfig::default(),
        )
        .unwrap();
        p.observe(&[0.6, 0.0], &[1.0, 0.0]).unwrap();
        let before = p.clone();
        p.observe(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(p.spd().matrix(), before.spd().matrix());
        assert_eq!(p.estimates(), before.estimates());
        assert_eq!(p.rounds_observed(), 2);
    }

    #[test]
    fn theoretical_gamma_at_start() {
        let p = scalar_policy(GammaMode::Theoretical, 2);
        // (16·4/κ)·ln(20) + λD² + 0 + κ/2
        let want = 64.0 / KAPPA_LOGIT_1 * 20f64.ln() + 1.0 + KAPPA_LOGIT_1 / 2.0;
        assert_abs_diff_eq!(p.gamma_at(0), want, epsilon = 1e-9);
        assert_abs_diff_eq!(p.gamma_at(0), 976.252_063_658_293_9, epsilon = 1e-9);
    }

    #[test]
    fn theoretical_gamma_grows() {
        let mut p = scalar_policy(GammaMode::Theoretical, 2);
        let mut prev = p.gamma();
        for _ in 0..50 {
            p.observe(&[1.0], &[1.0, 0.0]).unwrap();
            let g = p.gamma();
            assert!(g >= prev);
            prev = g;
        }
    }

    #[test]
    fn tuned_gamma() {
        let mut p = scalar_policy(GammaMode::Tuned { c: 0.1 }, 1);
        assert_eq!(p.gamma(), TUNED_GAMMA_FLOOR);
        // a unit-weight update makes Z = 2, so the ratio is ln 2
        p.spd.rank1_update(&[1.0], 1.0).unwrap();
        assert_abs_diff_eq!(p.gamma(), 0.069_314_718_055_994_53, epsilon = 1e-15);
    }

    #[test]
    fn ucb_matrix_examples() {
        let arms = ArmSet::new(vec![vec![1.0, 0.0], vec![0.6, 0.8]]).unwrap();
        let bounds = derive_bounds(LinkKind::Logit, 1.0, 0.0);
        let mut p = MoglbPolicy::new(
            arms,
            vec![LinkKind::Logit],
            bounds,
            1.0,
            MoglbConfig::default(),
        )
        .unwrap();
        let u = p.ucb_matrix(4.0);
        assert_abs_diff_eq!(u.row(0)[0], 2.0, epsilon = 1e-15);

        p.estimates[0] = vec![0.3, -0.2];
        let u = p.ucb_matrix(0.0);
        assert_abs_diff_eq!(u.row(0)[0], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(u.row(1)[0], 0.3 * 0.6 - 0.2 * 0.8, epsilon = 1e-15);
    }

    #[test]
    fn ucb_with_scaled_design() {
        // Z = diag(2, 1), θ̂ = (1, 0), γ = 1, x = (1, 1): 1 + √1.5
        let arms = ArmSet::new(vec![vec![1.0, 0.0]]).unwrap();
        let bounds = derive_bounds(LinkKind::Logit, 1.0, 0.0);
        let mut p = MoglbPolicy::new(
            arms,
            vec![LinkKind::Logit],
            bounds,
            1.0,
            MoglbConfig::default(),
        )
        .unwrap();
        p.spd.rank1_update(&[1.0, 0.0], 1.0).unwrap();
        p.estimates[0] = vec![1.0, 0.0];
        assert_abs_diff_eq!(
            p.ucb_entry(0, &[1.0, 1.0], 1.0),
            2.224_744_871_391_589,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            p.ucb_matrix(1.0).row(0)[0],
            1.0 + 0.5f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn singleton_front_is_deterministic() {
        let mut p = scalar_policy(GammaMode::Tuned { c: 0.1 }, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for t in 1..20 {
            let a = p.select_arm(t, &mut rng).unwrap();
            assert_eq!(a, 0);
            p.update(a, &[1.0]).unwrap();
        }
    }

    #[test]
    fn update_requires_matching_select() {
        let mut p = scalar_policy(GammaMode::Tuned { c: 0.1 }, 1);
        assert!(p.update(0, &[1.0]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = p.select_arm(1, &mut rng).unwrap();
        assert!(p.update(a, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_bad_config() {
        let arms = ArmSet::new(vec![vec![1.0]]).unwrap();
        let bounds = derive_bounds(LinkKind::Logit, 1.0, 0.0);
        let bad_delta = MoglbConfig {
            delta: 1.0,
            ..MoglbConfig::default()
        };
        assert!(
            MoglbPolicy::new(arms.clone(), vec![LinkKind::Logit], bounds, 1.0, bad_delta).is_err()
        );
        let bad_c = MoglbConfig {
            gamma_mode: GammaMode::Tuned { c: 0.0 },
            ..MoglbConfig::default()
        };
        assert!(MoglbPolicy::new(arms, vec![LinkKind::Logit], bounds, 1.0, bad_c).is_err());
    }
}
