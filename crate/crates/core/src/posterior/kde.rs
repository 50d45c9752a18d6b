use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{trapezoid, weighted_mean, weighted_variance, Real};

pub const DEFAULT_GRID_POINTS: usize = 512;
pub const DEFAULT_LATTICE_POINTS: usize = 128;
/// Half-width of default grids, in weighted standard deviations.
pub const GRID_SPAN_SD: f64 = 5.0;

/// Density values on a 1-d grid (`y` empty) or a 2-d lattice stored
/// row-major with `x` as the slow index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate<T = f64> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub values: Vec<T>,
    /// Per-axis bandwidths; empty for densities read back from disk.
    pub bandwidth: Vec<T>,
}

impl<T: Real> DensityEstimate<T> {
    pub fn new_1d(x: Vec<T>, values: Vec<T>) -> Result<Self> {
        if x.len() != values.len() || x.len() < 2 {
            return Err(Error::usage("grid and values must have equal length >= 2"));
        }
        Ok(Self { x, y: Vec::new(), values, bandwidth: Vec::new() })
    }

    pub fn new_2d(x: Vec<T>, y: Vec<T>, values: Vec<T>) -> Result<Self> {
        if x.len() < 2 || y.len() < 2 || values.len() != x.len() * y.len() {
            return Err(Error::usage("lattice values must be nx * ny with nx, ny >= 2"));
        }
        Ok(Self { x, y, values, bandwidth: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        if self.y.is_empty() {
            1
        } else {
            2
        }
    }

    pub fn at(&self, i: usize, j: usize) -> T {
        self.values[i * self.y.len() + j]
    }

    /// Trapezoidal integral of `f(values)` over the grid.
    pub fn integrate_with(&self, f: impl Fn(T) -> T) -> T {
        let mapped: Vec<T> = self.values.iter().map(|&v| f(v)).collect();
        integrate(&self.x, &self.y, &mapped)
    }

    pub fn integral(&self) -> T {
        self.integrate_with(|v| v)
    }

    /// Grid location of the largest value (first one on ties).
    pub fn mode(&self) -> Vec<T> {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        if self.dim() == 1 {
            vec![self.x[best]]
        } else {
            let ny = self.y.len();
            vec![self.x[best / ny], self.y[best % ny]]
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y
    }
}

pub(crate) fn integrate<T: Real>(x: &[T], y: &[T], values: &[T]) -> T {
    if y.is_empty() {
        return trapezoid(x, values);
    }
    let rows: Vec<T> = values.chunks(y.len()).map(|row| trapezoid(y, row)).collect();
    trapezoid(x, &rows)
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    assert!(n >= 2);
    let step = (hi - lo) / T::of_usize(n - 1);
    (0..n).map(|i| lo + step * T::of_usize(i)).collect()
}

fn checked_moments<T: Real>(samples: &[T], weights: &[T]) -> Result<(T, T)> {
    if samples.len() != weights.len() {
        return Err(Error::usage("samples and weights differ in length"));
    }
    let first = samples.first().copied();
    let distinct = samples.iter().filter(|&&s| Some(s) != first).count() > 0;
    if !distinct {
        return Err(Error::InsufficientSamples { needed: 2, got: usize::from(first.is_some()) });
    }
    let mean = weighted_mean(samples, weights);
    let sd = weighted_variance(samples, weights).sqrt();
    if !(sd > T::zero()) || !sd.is_finite() {
        return Err(Error::DegenerateDensity("weighted variance is zero".into()));
    }
    Ok((mean, sd))
}

fn normalized<T: Real>(weights: &[T]) -> Vec<T> {
    let total: T = weights.iter().copied().sum();
    weights.iter().map(|&w| w / total).collect()
}

fn kish<T: Real>(weights: &[T]) -> T {
    T::one() / weights.iter().map(|&w| w * w).sum::<T>()
}

/// `mean ± 5 sd` of the weighted sample, 512 points.
pub fn default_grid<T: Real>(samples: &[T], weights: &[T]) -> Result<Vec<T>> {
    let (mean, sd) = checked_moments(samples, &normalized(weights))?;
    let half = T::of(GRID_SPAN_SD) * sd;
    Ok(linspace(mean - half, mean + half, DEFAULT_GRID_POINTS))
}

/// Silverman-style `1.06 σ n_eff^{-1/5}` on weighted moments.
pub fn bandwidth_1d<T: Real>(samples: &[T], weights: &[T]) -> Result<T> {
    let w = normalized(weights);
    let (_, sd) = checked_moments(samples, &w)?;
    Ok(T::of(1.06) * sd * kish(&w).powf(T::of(-0.2)))
}

fn gauss<T: Real>(u: T) -> T {
    (-T::of(0.5) * u * u).exp() / T::TAU().sqrt()
}

/// Weighted Gaussian KDE evaluated on `grid`.
pub fn kde_1d<T: Real>(samples: &[T], weights: &[T], grid: &[T]) -> Result<DensityEstimate<T>> {
    let w = normalized(weights);
    let h = bandwidth_1d(samples, &w)?;
    let values: Vec<T> = grid
        .par_iter()
        .map(|&g| {
            samples
                .iter()
                .zip(&w)
                .map(|(&s, &wk)| wk * gauss((g - s) / h))
                .sum::<T>()
                / h
        })
        .collect();
    let mut est = DensityEstimate::new_1d(grid.to_vec(), values)?;
    est.bandwidth = vec![h];
    Ok(est)
}

pub fn default_lattice<T: Real>(xs: &[T], ys: &[T], weights: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    let w = normalized(weights);
    let grid = |s: &[T]| -> Result<Vec<T>> {
        let (mean, sd) = checked_moments(s, &w)?;
        let half = T::of(GRID_SPAN_SD) * sd;
        Ok(linspace(mean - half, mean + half, DEFAULT_LATTICE_POINTS))
    };
    Ok((grid(xs)?, grid(ys)?))
}

/// Product-Gaussian weighted KDE with per-axis `σ_j n_eff^{-1/6}`.
pub fn kde_2d<T: Real>(
    xs: &[T],
    ys: &[T],
    weights: &[T],
    gx: &[T],
    gy: &[T],
) -> Result<DensityEstimate<T>> {
    if xs.len() != ys.len() {
        return Err(Error::usage("x and y samples differ in length"));
    }
    let w = normalized(weights);
    let factor = kish(&w).powf(T::of(-1.0 / 6.0));
    let hx = checked_moments(xs, &w)?.1 * factor;
    let hy = checked_moments(ys, &w)?.1 * factor;
    let ky: Vec<Vec<T>> = ys
        .iter()
        .map(|&s| gy.iter().map(|&g| gauss((g - s) / hy)).collect())
        .collect();
    let norm = hx * hy;
    let values: Vec<T> = gx
        .par_iter()
        .flat_map_iter(|&g| {
            let mut row = vec![T::zero(); gy.len()];
            for (k, &s) in xs.iter().enumerate() {
                let a = w[k] * gauss((g - s) / hx);
                if a == T::zero() {
                    continue;
                }
                for (r, &b) in row.iter_mut().zip(&ky[k]) {
                    *r = *r + a * b;
                }
            }
            row.into_iter().map(move |v| v / norm)
        })
        .collect();
    let mut est = DensityEstimate::new_2d(gx.to_vec(), gy.to_vec(), values)?;
    est.bandwidth = vec![hx, hy];
    Ok(est)
}
