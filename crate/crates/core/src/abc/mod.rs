pub mod engine;
pub mod kernel;
pub mod population;
pub mod prior;

pub use engine::{
    importance_weights, rejection_abc, smc_abc, Acceptance, QuantileStage, Rejection, Schedule, Simulator, SmcConfig,
    SmcFailure, DEFAULT_BUDGET_PER_STAGE,
};
pub use kernel::{gaussian_kernel_density, gaussian_kernel_sample, weighted_covariance, GaussianKernel};
pub use population::{Particle, ParticlePopulation};
pub use prior::{Prior, PriorComponent};
