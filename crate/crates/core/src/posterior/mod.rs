//! Post-processing of particle populations.

pub mod diagnostics;
pub mod hpd;
pub mod kde;
pub mod regression;

pub use diagnostics::{
    derived_posteriors, ise, kl, rmse, summarize_parameter, total_variation, GrowthSamples,
    ParameterSummary, HPD_LEVEL, KL_FLOOR,
};
pub use hpd::{hpd_interval, weighted_median};
pub use kde::{
    bandwidth_1d, default_grid, default_lattice, kde_1d, kde_2d, linspace, DensityEstimate,
    DEFAULT_GRID_POINTS, DEFAULT_LATTICE_POINTS,
};
pub use regression::{adjust_points, regression_adjust, Adjusted};
