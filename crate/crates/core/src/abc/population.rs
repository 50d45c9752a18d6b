use serde::{Deserialize, Serialize};

use crate::scalar::{weighted_mean, weighted_variance, Real};
use crate::summary::SummaryVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle<T = f64> {
    pub params: Vec<T>,
    /// Normalized importance weight.
    pub weight: T,
    pub distance: T,
    pub summary: SummaryVector<T>,
}

/// Accepted particles of one stage together with the kernel covariance
/// (twice the weighted covariance) the next stage perturbs with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticlePopulation<T = f64> {
    pub stage: usize,
    pub param_names: Vec<String>,
    pub particles: Vec<Particle<T>>,
    pub threshold: T,
    /// Row-major `d × d`.
    pub covariance: Vec<T>,
    /// Simulations run during the stage, including rejected ones.
    pub attempts: u64,
    /// Candidates considered when the stage threshold was set by a quantile.
    pub pool_size: Option<usize>,
}

impl<T: Real> ParticlePopulation<T> {
    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.param_names.len()
    }

    pub fn weights(&self) -> Vec<T> {
        self.particles.iter().map(|p| p.weight).collect()
    }

    pub fn distances(&self) -> Vec<T> {
        self.particles.iter().map(|p| p.distance).collect()
    }

    pub fn points(&self) -> Vec<Vec<T>> {
        self.particles.iter().map(|p| p.params.clone()).collect()
    }

    /// Values of parameter `index` across particles.
    pub fn column(&self, index: usize) -> Vec<T> {
        self.particles.iter().map(|p| p.params[index]).collect()
    }

    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.param_names.iter().position(|n| n == name)
    }

    pub fn mean(&self, index: usize) -> T {
        weighted_mean(&self.column(index), &self.weights())
    }

    pub fn variance(&self, index: usize) -> T {
        weighted_variance(&self.column(index), &self.weights())
    }

    /// Kish effective sample size `1 / Σ w²`.
    pub fn effective_sample_size(&self) -> T {
        T::one() / self.particles.iter().map(|p| p.weight * p.weight).sum::<T>()
    }
}
