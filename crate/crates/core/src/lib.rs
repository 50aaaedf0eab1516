//! Multi-objective generalized linear bandits.
//!
//! Each arm is a context vector `x` and each of `m` objectives draws its
//! reward from a generalized linear model with mean `μ_i(θ_iᵀx)`. Policies are
//! scored by Pareto regret: the summed gap between each played arm and the
//! Pareto front of the expected rewards.
//!
//! - [`linalg`]: design-matrix state, Mahalanobis norms, generalized projection.
//! - [`pareto`]: dominance, fronts, suboptimality gaps, Jaccard index.
//! - [`glm`]: identity/logit/probit links and reward sampling.
//! - [`policies`]: MOGLB-UCB and the P-UCB, S-UCB and P-TS baselines.
//! - [`environment`]: synthetic instances with precomputed ground truth.
//! - [`harness`]: seeded trials, parallel experiments, CSV output.

pub mod config;
pub mod environment;
pub mod error;
pub mod glm;
pub mod harness;
pub mod linalg;
pub mod pareto;
pub mod policies;
pub mod seeding;

pub use config::ExperimentConfig;
pub use environment::{ArmSet, ProblemInstance};
pub use error::{Error, Result};
pub use harness::{run_experiment, run_trial, Execution, RoundRecord, RunSummary};
pub use pareto::{ParetoFront, RewardMatrix};
pub use policies::{AlgoKind, Policy};
