//! Per-objective generalized linear reward models.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-width of the uniform noise added to identity-link rewards.
pub const DEFAULT_IDENTITY_NOISE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Identity,
    Logit,
    Probit,
}

impl LinkKind {
    /// Mean reward `μ(z)`.
    pub fn value(self, z: f64) -> f64 {
        match self {
            LinkKind::Identity => z,
            LinkKind::Logit => sigmoid(z),
            LinkKind::Probit => normal_cdf(z),
        }
    }

    /// Slope `μ′(z)`.
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            LinkKind::Identity => 1.0,
            LinkKind::Logit => {
                let s = sigmoid(z);
                s * (1.0 - s)
            }
            LinkKind::Probit => normal_pdf(z),
        }
    }

    /// `true` when rewards are one-bit.
    pub fn is_binary(self) -> bool {
        !matches!(self, LinkKind::Identity)
    }

    pub fn name(self) -> &'static str {
        match self {
            LinkKind::Identity => "identity",
            LinkKind::Logit => "logit",
            LinkKind::Probit => "probit",
        }
    }
}

impl std::fmt::Display for LinkKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn link_value(kind: LinkKind, z: f64) -> f64 {
    kind.value(z)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Standard normal CDF via the complementary error function, accurate in both tails.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Analytic constants of a link restricted to `[−D, D]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBounds {
    /// `min μ′` on `[−D, D]`.
    pub kappa: f64,
    /// `max μ′` on `[−D, D]`.
    pub lipschitz: f64,
    /// `max |μ|` on `[−D, D]`.
    pub mean_bound: f64,
    /// Almost-sure bound on `|y|`.
    pub reward_bound: f64,
}

/// Bounds for `kind` on `[−D, D]`. The logit and probit slopes are even and
/// decreasing in `|z|`, so the extremes sit at `0` and `±D`. For the identity link
/// `reward_bound` is `D + noise`.
pub fn derive_bounds(kind: LinkKind, d: f64, identity_noise: f64) -> LinkBounds {
    match kind {
        LinkKind::Logit => LinkBounds {
            kappa: kind.derivative(d),
            lipschitz: 0.25,
            mean_bound: sigmoid(d),
            reward_bound: 1.0,
        },
        LinkKind::Probit => LinkBounds {
            kappa: normal_pdf(d),
            lipschitz: normal_pdf(0.0),
            mean_bound: normal_cdf(d),
            reward_bound: 1.0,
        },
        LinkKind::Identity => LinkBounds {
            kappa: 1.0,
            lipschitz: 1.0,
            mean_bound: d,
            reward_bound: d + identity_noise,
        },
    }
}

/// One reward objective: a link and its true coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlmObjective {
    pub link: LinkKind,
    pub theta: Vec<f64>,
    /// Coefficient-norm bound `D`.
    pub norm_bound: f64,
    /// Half-width of the uniform noise on identity-link rewards.
    #[serde(default = "default_noise")]
    pub identity_noise: f64,
}

fn default_noise() -> f64 {
    DEFAULT_IDENTITY_NOISE
}

impl GlmObjective {
    pub fn new(link: LinkKind, theta: Vec<f64>, norm_bound: f64) -> Result<Self> {
        if !(norm_bound > 0.0 && norm_bound.is_finite()) {
            return Err(Error::invalid(format!(
                "coefficient bound must be positive, got {norm_bound}"
            )));
        }
        if theta.is_empty() || theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "coefficients must be a non-empty finite vector",
            ));
        }
        let norm = euclidean_norm(&theta);
        if norm > norm_bound + 1e-12 {
            return Err(Error::invalid(format!(
                "coefficient norm {norm} exceeds bound {norm_bound}"
            )));
        }
        Ok(Self {
            link,
            theta,
            norm_bound,
            identity_noise: DEFAULT_IDENTITY_NOISE,
        })
    }

    pub fn with_identity_noise(mut self, noise: f64) -> Self {
        self.identity_noise = noise.max(0.0);
        self
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn bounds(&self) -> LinkBounds {
        derive_bounds(self.link, self.norm_bound, self.identity_noise)
    }

    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        dot(&self.theta, x)
    }

    pub fn expected_reward(&self, x: &[f64]) -> f64 {
        self.link.value(self.linear_predictor(x))
    }

    /// Draws a reward whose conditional mean is `μ(θᵀx)`.
    pub fn sample_reward(&self, x: &[f64], rng: &mut dyn RngCore) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::invalid(format!(
                "context has length {}, objective expects {}",
                x.len(),
                self.dim()
            )));
        }
        let norm = euclidean_norm(x);
        if norm > 1.0 + 1e-9 {
            return Err(Error::invalid(format!("context norm {norm} exceeds 1")));
        }
        let z = self.linear_predictor(x);
        Ok(match self.link {
            LinkKind::Identity => {
                if self.identity_noise > 0.0 {
                    z + rng.random_range(-self.identity_noise..=self.identity_noise)
                } else {
                    z
                }
            }
            kind => {
                let p = kind.value(z);
                if rng.random::<f64>() < p {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}
