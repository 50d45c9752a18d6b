//! Controlled branching processes and likelihood-free inference of their
//! offspring and control parameters by sequential Monte Carlo ABC.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`.

pub mod abc;
pub mod branching;
pub mod datasets;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod multitype;
pub mod posterior;
pub mod rng;
pub mod scalar;
pub mod summary;

pub use abc::{
    rejection_abc, smc_abc, Acceptance, QuantileStage, Rejection, Schedule, Simulator, SmcFailure,
};
pub use branching::{
    mean_growth_rate, simulate_cbp, simulate_nonextinct, transition_probability, ControlFamily,
    OffspringFamily, SizeMap, Trajectory,
};
pub use error::{Error, Result};
pub use model::CbpModel;
pub use multitype::{ConjugatePosterior, TwoTypeModel, TwoTypeParams, TwoTypeTreeSummary};
pub use rng::{Domain, SeedTree, Stream};
pub use scalar::Real;
pub use summary::{distance, summarize, Metric, SummaryKind};

pub type OffspringLaw = branching::OffspringLaw<f64>;
pub type ControlLaw = branching::ControlLaw<f64>;
pub type SummaryVector = summary::SummaryVector<f64>;
pub type Prior = abc::Prior<f64>;
pub type PriorComponent = abc::PriorComponent<f64>;
pub type Particle = abc::Particle<f64>;
pub type ParticlePopulation = abc::ParticlePopulation<f64>;
pub type SmcConfig = abc::SmcConfig<f64>;
pub type GaussianKernel = abc::GaussianKernel<f64>;
pub type DensityEstimate = posterior::DensityEstimate<f64>;
pub type Adjusted = posterior::Adjusted<f64>;
pub type ParameterSummary = posterior::ParameterSummary<f64>;
pub type GrowthSamples = posterior::GrowthSamples<f64>;
