use serde::{Deserialize, Serialize};

use super::hpd::hpd_interval;
use super::kde::{integrate, DensityEstimate};
use crate::error::{Error, Result};
use crate::model::CbpModel;
use crate::scalar::{weighted_mean, weighted_variance, Real};

/// Densities are clipped below at this value before taking logarithms.
pub const KL_FLOOR: f64 = 1e-12;

/// Relative mean squared error `Σ w (x − t)² / t²` (weights normalized here).
pub fn rmse<T: Real>(samples: &[T], weights: &[T], truth: T) -> T {
    let total: T = weights.iter().copied().sum();
    let mse: T = samples
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w * (x - truth).powi(2))
        .sum::<T>()
        / total;
    mse / (truth * truth)
}

fn check_grid<T: Real>(f: &DensityEstimate<T>, g: &DensityEstimate<T>) -> Result<()> {
    if !f.same_grid(g) || f.values.len() != g.values.len() {
        return Err(Error::usage("densities are not on a common grid"));
    }
    Ok(())
}

/// Integrated squared error `∫ (f − g)²`.
pub fn ise<T: Real>(f: &DensityEstimate<T>, g: &DensityEstimate<T>) -> Result<T> {
    check_grid(f, g)?;
    let sq: Vec<T> = f.values.iter().zip(&g.values).map(|(&a, &b)| (a - b).powi(2)).collect();
    Ok(integrate(&f.x, &f.y, &sq))
}

/// `∫ f ln(f/g)` after clipping both at [`KL_FLOOR`] and renormalizing both
/// on the grid, so the result is a divergence between proper densities.
pub fn kl<T: Real>(f: &DensityEstimate<T>, g: &DensityEstimate<T>) -> Result<T> {
    check_grid(f, g)?;
    let floor = T::of(KL_FLOOR);
    let clip = |d: &DensityEstimate<T>| -> Result<Vec<T>> {
        let v: Vec<T> = d.values.iter().map(|&x| x.max(floor)).collect();
        let z = integrate(&d.x, &d.y, &v);
        if !(z > T::zero()) {
            return Err(Error::DegenerateDensity("density integrates to zero".into()));
        }
        Ok(v.into_iter().map(|x| x / z).collect())
    };
    let (p, q) = (clip(f)?, clip(g)?);
    let integrand: Vec<T> = p.iter().zip(&q).map(|(&a, &b)| a * (a / b).ln()).collect();
    Ok(integrate(&f.x, &f.y, &integrand))
}

/// Total-variation distance `½ ∫ |f − g|`.
pub fn total_variation<T: Real>(f: &DensityEstimate<T>, g: &DensityEstimate<T>) -> Result<T> {
    check_grid(f, g)?;
    let abs: Vec<T> = f.values.iter().zip(&g.values).map(|(&a, &b)| (a - b).abs()).collect();
    Ok(T::of(0.5) * integrate(&f.x, &f.y, &abs))
}

/// Particles mapped through `(m, τ, τ_m)`, weights unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSamples<T = f64> {
    pub m: Vec<T>,
    pub tau: Vec<T>,
    pub tau_m: Vec<T>,
    pub weights: Vec<T>,
}

pub fn derived_posteriors<T: Real>(
    points: &[Vec<T>],
    weights: &[T],
    model: &CbpModel,
) -> Result<GrowthSamples<T>> {
    let mut out = GrowthSamples {
        m: Vec::with_capacity(points.len()),
        tau: Vec::with_capacity(points.len()),
        tau_m: Vec::with_capacity(points.len()),
        weights: weights.to_vec(),
    };
    for p in points {
        let (m, tau, tau_m) = model.growth(p)?;
        out.m.push(m);
        out.tau.push(tau);
        out.tau_m.push(tau_m);
    }
    Ok(out)
}

/// One row of a posterior report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary<T = f64> {
    pub method: String,
    pub parameter: String,
    pub mean: T,
    pub variance: T,
    pub hpd_lo: T,
    pub hpd_hi: T,
    pub rmse: Option<T>,
    pub ise: Option<T>,
    pub kl: Option<T>,
}

pub const HPD_LEVEL: f64 = 0.95;

/// Mean, variance and 95% HPD of a weighted sample, plus RMSE against
/// `truth` and ISE/KL of `estimate` against `reference` when supplied.
pub fn summarize_parameter<T: Real>(
    method: &str,
    parameter: &str,
    samples: &[T],
    weights: &[T],
    truth: Option<T>,
    densities: Option<(&DensityEstimate<T>, &DensityEstimate<T>)>,
) -> Result<ParameterSummary<T>> {
    let (hpd_lo, hpd_hi) = hpd_interval(samples, weights, T::of(HPD_LEVEL))?;
    let (ise_v, kl_v) = match densities {
        Some((est, reference)) => (Some(ise(est, reference)?), Some(kl(est, reference)?)),
        None => (None, None),
    };
    Ok(ParameterSummary {
        method: method.to_string(),
        parameter: parameter.to_string(),
        mean: weighted_mean(samples, weights),
        variance: weighted_variance(samples, weights),
        hpd_lo,
        hpd_hi,
        rmse: truth.map(|t| rmse(samples, weights, t)),
        ise: ise_v,
        kl: kl_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posterior::kde::linspace;

    fn normal_density(grid: &[f64], mu: f64) -> DensityEstimate<f64> {
        let v = grid
            .iter()
            .map(|x| (-0.5 * (x - mu).powi(2)).exp() / std::f64::consts::TAU.sqrt())
            .collect();
        DensityEstimate::new_1d(grid.to_vec(), v).unwrap()
    }

    #[test]
    fn rmse_hand_value() {
        let r: f64 = rmse(&[0.5, 0.7], &[1.0, 1.0], 0.6);
        assert!((r - 0.02 / 2.0 / 0.36).abs() < 1e-15);
        assert_eq!(rmse(&[0.6, 0.6], &[0.3, 0.7], 0.6), 0.0);
    }

    #[test]
    fn self_divergences_vanish() {
        let grid = linspace(-8.0, 8.0, 2001);
        let f = normal_density(&grid, 0.0);
        assert_eq!(ise(&f, &f).unwrap(), 0.0);
        assert!(kl(&f, &f).unwrap().abs() < 1e-14);
        assert_eq!(total_variation(&f, &f).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_kl_closed_form() {
        let grid = linspace(-10.0, 10.0, 4001);
        let f = normal_density(&grid, 0.0);
        let g = normal_density(&grid, 0.1);
        let k = kl(&f, &g).unwrap();
        assert!((k - 0.005).abs() < 0.0005, "kl {k}");
        assert!(kl(&g, &f).unwrap() >= -1e-9);
        // ∫(φ(x) − φ(x − δ))² = (1 − e^{−δ²/4}) / √π
        let expected = (1.0 - (-0.01f64 / 4.0).exp()) / std::f64::consts::PI.sqrt();
        assert!((ise(&f, &g).unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn grid_mismatch() {
        let f = normal_density(&linspace(-1.0, 1.0, 11), 0.0);
        let g = normal_density(&linspace(-1.0, 1.0, 12), 0.0);
        assert!(matches!(ise(&f, &g), Err(Error::Usage(_))));
        assert!(kl(&f, &g).is_err());
    }

    #[test]
    fn growth_samples() {
        let model = CbpModel::reference(1, 30);
        let pts: Vec<Vec<f64>> = vec![vec![0.6, 0.75], vec![0.5, 0.5], vec![0.7, 0.9]];
        let g = derived_posteriors(&pts, &[0.2, 0.3, 0.5], &model).unwrap();
        assert!((g.m[0] - 1.5).abs() < 1e-12 && (g.tau[0] - 0.75).abs() < 1e-12 && (g.tau_m[0] - 1.125).abs() < 1e-12);
        // m(θ) is increasing, so the θ order carries over.
        assert!(g.m[1] < g.m[0] && g.m[0] < g.m[2]);
        assert_eq!(g.weights, vec![0.2, 0.3, 0.5]);
    }

    #[test]
    fn report_row() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64 / 999.0).collect();
        let w = vec![1.0; 1000];
        let row = summarize_parameter("abc", "x", &xs, &w, Some(0.5), None).unwrap();
        assert!((row.mean - 0.5).abs() < 1e-12);
        assert!((row.hpd_hi - row.hpd_lo - 0.95).abs() < 0.01);
        assert!(row.ise.is_none());
    }
}
