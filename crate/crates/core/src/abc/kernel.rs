use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, forward_solve, trace};
use crate::scalar::Real;

/// Multivariate normal perturbation kernel with a fixed covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel<T = f64> {
    dim: usize,
    cov: Vec<T>,
    chol: Vec<T>,
    /// `-(d/2) ln 2π - ln det L`
    log_norm: T,
}

impl<T: Real> GaussianKernel<T> {
    /// Factorizes `cov`, adding `1e-10 · trace/d` (growing tenfold per retry)
    /// to the diagonal until the Cholesky factorization succeeds.
    pub fn new(cov: &[T], dim: usize) -> Result<Self> {
        if cov.len() != dim * dim || dim == 0 {
            return Err(Error::usage(format!("covariance must be {dim}x{dim}")));
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("covariance has non-finite entries".into()));
        }
        for i in 0..dim {
            for j in 0..i {
                let (a, b) = (cov[i * dim + j], cov[j * dim + i]);
                if (a - b).abs() > T::of(1e-9) * (a.abs() + b.abs() + T::min_positive_value()) {
                    return Err(Error::usage("covariance must be symmetric"));
                }
            }
        }
        let mut work = cov.to_vec();
        let scale = trace(cov, dim) / T::of_usize(dim);
        let base = if scale > T::zero() { scale } else { T::one() };
        let mut jitter = T::of(1e-10) * base;
        let chol = loop {
            if let Some(l) = cholesky(&work, dim) {
                break l;
            }
            if jitter > base * T::of(1e6) {
                return Err(Error::Numeric("covariance cannot be regularized".into()));
            }
            for i in 0..dim {
                work[i * dim + i] = cov[i * dim + i] + jitter;
            }
            jitter = jitter * T::of(10.0);
        };
        let log_det_l: T = (0..dim).map(|i| chol[i * dim + i].ln()).sum();
        let log_norm = -T::of(0.5 * dim as f64) * (T::TAU()).ln() - log_det_l;
        Ok(Self {
            dim,
            cov: work,
            chol,
            log_norm,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Covariance actually used, including any regularization.
    pub fn covariance(&self) -> &[T] {
        &self.cov
    }

    pub fn cholesky_factor(&self) -> &[T] {
        &self.chol
    }

    /// `mean + L z` with `z ~ N(0, I)`.
    pub fn sample<R: Rng + ?Sized>(&self, mean: &[T], rng: &mut R) -> Vec<T> {
        let z: Vec<T> = (0..self.dim)
            .map(|_| T::of(StandardNormal.sample(rng)))
            .collect();
        self.transform(mean, &z)
    }

    pub fn transform(&self, mean: &[T], z: &[T]) -> Vec<T> {
        let d = self.dim;
        (0..d)
            .map(|i| mean[i] + (0..=i).map(|k| self.chol[i * d + k] * z[k]).sum::<T>())
            .collect()
    }

    pub fn log_density(&self, x: &[T], mean: &[T]) -> T {
        let diff: Vec<T> = x.iter().zip(mean).map(|(&a, &b)| a - b).collect();
        let y = forward_solve(&self.chol, self.dim, &diff);
        let q: T = y.iter().map(|&v| v * v).sum();
        self.log_norm - T::of(0.5) * q
    }

    pub fn density(&self, x: &[T], mean: &[T]) -> T {
        self.log_density(x, mean).exp()
    }
}

/// One draw from `N(mean, cov)`.
pub fn gaussian_kernel_sample<T: Real, R: Rng + ?Sized>(
    mean: &[T],
    cov: &[T],
    rng: &mut R,
) -> Result<Vec<T>> {
    Ok(GaussianKernel::new(cov, mean.len())?.sample(mean, rng))
}

/// Density of `N(mean, cov)` at `x`.
pub fn gaussian_kernel_density<T: Real>(x: &[T], mean: &[T], cov: &[T]) -> Result<T> {
    if x.iter().chain(mean).any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite point or mean".into()));
    }
    Ok(GaussianKernel::new(cov, mean.len())?.density(x, mean))
}

/// `Σ_ij = Σ_k w_k (x_ki − μ_i)(x_kj − μ_j)` with `μ = Σ_k w_k x_k`.
/// Weights are assumed normalized.
pub fn weighted_covariance<T: Real>(points: &[Vec<T>], weights: &[T]) -> Vec<T> {
    let d = points.first().map_or(0, Vec::len);
    let mut mean = vec![T::zero(); d];
    for (p, &w) in points.iter().zip(weights) {
        for (m, &v) in mean.iter_mut().zip(p) {
            *m = *m + w * v;
        }
    }
    let mut cov = vec![T::zero(); d * d];
    for (p, &w) in points.iter().zip(weights) {
        for i in 0..d {
            let di = p[i] - mean[i];
            for j in i..d {
                cov[i * d + j] = cov[i * d + j] + w * di * (p[j] - mean[j]);
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            cov[i * d + j] = cov[j * d + i];
        }
    }
    cov
}
