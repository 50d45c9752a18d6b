use serde::{Deserialize, Serialize};

use crate::abc::{ParticlePopulation, Prior};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve};
use crate::scalar::Real;
use crate::summary::SummaryVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjusted<T = f64> {
    pub params: Vec<Vec<T>>,
    /// Particle weights times the Epanechnikov kernel weights, normalized.
    pub weights: Vec<T>,
    /// `false` when the weighted design was singular and `params` are the
    /// unadjusted values.
    pub adjusted: bool,
    pub warning: Option<String>,
}

impl<T: Real> Adjusted<T> {
    pub fn column(&self, index: usize) -> Vec<T> {
        self.params.iter().map(|p| p[index]).collect()
    }
}

/// `1 − u²` on `[0, 1)`, zero outside (the normalizing constant cancels).
fn epanechnikov<T: Real>(u: T) -> T {
    if u < T::one() {
        T::one() - u * u
    } else {
        T::zero()
    }
}

/// Local-linear regression adjustment of accepted parameters towards the
/// observed summary: `θ_i − b̂ᵀ(S_i − S_obs)`, clamped into the prior support.
pub fn regression_adjust<T: Real>(
    population: &ParticlePopulation<T>,
    observed: &SummaryVector<T>,
    prior: &Prior<T>,
) -> Result<Adjusted<T>> {
    let eps = population.threshold;
    let kernel: Vec<T> = population
        .particles
        .iter()
        .map(|p| {
            if eps.is_infinite() || eps == T::zero() {
                T::one()
            } else {
                epanechnikov(p.distance / eps)
            }
        })
        .collect();
    let regressors: Vec<Vec<T>> = population
        .particles
        .iter()
        .map(|p| {
            p.summary
                .values()
                .iter()
                .zip(observed.values())
                .map(|(&s, &o)| s - o)
                .collect()
        })
        .collect();
    let params: Vec<Vec<T>> = population.points();
    let weights: Vec<T> = population
        .particles
        .iter()
        .zip(&kernel)
        .map(|(p, &k)| p.weight * k)
        .collect();
    adjust_points(&params, &regressors, &weights, prior)
}

/// Core of [`regression_adjust`] on raw arrays: `x_i` are regressors
/// `S_i − S_obs`, `w_i` the combined weights.
pub fn adjust_points<T: Real>(
    params: &[Vec<T>],
    regressors: &[Vec<T>],
    weights: &[T],
    prior: &Prior<T>,
) -> Result<Adjusted<T>> {
    let n = params.len();
    let q = regressors.first().map_or(0, Vec::len);
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::DegenerateSample("all regression weights are zero".into()));
    }
    let w: Vec<T> = weights.iter().map(|&v| v / total).collect();
    let support = w.iter().filter(|&&v| v > T::zero()).count();
    if support < q + 2 {
        return Err(Error::InsufficientSamples { needed: q + 2, got: support });
    }

    // Center and scale each regressor; constant columns carry no information.
    let mut keep = Vec::new();
    let mut centre = Vec::new();
    let mut scale = Vec::new();
    for c in 0..q {
        let mu: T = (0..n).map(|i| w[i] * regressors[i][c]).sum();
        let var: T = (0..n).map(|i| w[i] * (regressors[i][c] - mu).powi(2)).sum();
        let sd = var.sqrt();
        if sd > T::epsilon() * (mu.abs() + T::one()) {
            keep.push(c);
            centre.push(mu);
            scale.push(sd);
        }
    }
    let unadjusted = |warning: Option<String>| Adjusted {
        params: params.to_vec(),
        weights: w.clone(),
        adjusted: false,
        warning,
    };
    if keep.is_empty() {
        return Ok(Adjusted { adjusted: true, ..unadjusted(None) });
    }

    let k = keep.len() + 1;
    let row = |i: usize| -> Vec<T> {
        let mut r = Vec::with_capacity(k);
        r.push(T::one());
        for (j, &c) in keep.iter().enumerate() {
            r.push((regressors[i][c] - centre[j]) / scale[j]);
        }
        r
    };
    let design: Vec<Vec<T>> = (0..n).map(row).collect();
    let mut xtwx = vec![T::zero(); k * k];
    for (i, r) in design.iter().enumerate() {
        for a in 0..k {
            for b in 0..k {
                xtwx[a * k + b] = xtwx[a * k + b] + w[i] * r[a] * r[b];
            }
        }
    }
    let Some(l) = cholesky(&xtwx, k) else {
        return Ok(unadjusted(Some("singular regression design; parameters left unadjusted".into())));
    };

    let d = params.first().map_or(0, Vec::len);
    let mut out = params.to_vec();
    for p in 0..d {
        let mut xtwy = vec![T::zero(); k];
        for (i, r) in design.iter().enumerate() {
            for a in 0..k {
                xtwy[a] = xtwy[a] + w[i] * r[a] * params[i][p];
            }
        }
        let beta = cholesky_solve(&l, k, &xtwy);
        if beta.iter().any(|b| !b.is_finite()) {
            return Ok(unadjusted(Some("non-finite regression coefficients".into())));
        }
        // S_obs sits at x = 0, i.e. at standardized coordinate -centre/scale.
        for (i, r) in design.iter().enumerate() {
            let shift: T = (1..k)
                .map(|a| beta[a] * (r[a] + centre[a - 1] / scale[a - 1]))
                .sum();
            out[i][p] = params[i][p] - shift;
        }
    }
    for x in &mut out {
        prior.clamp(x);
    }
    Ok(Adjusted { params: out, weights: w, adjusted: true, warning: None })
}
