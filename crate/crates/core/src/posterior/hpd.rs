use crate::error::{Error, Result};
use crate::scalar::Real;

fn sorted_pairs<T: Real>(samples: &[T], weights: &[T]) -> Result<(Vec<T>, Vec<T>)> {
    if samples.len() != weights.len() {
        return Err(Error::usage("samples and weights differ in length"));
    }
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: samples.len() });
    }
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(Error::usage("weights must have positive total mass"));
    }
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.sort_by(|&a, &b| samples[a].partial_cmp(&samples[b]).expect("finite samples"));
    let xs = idx.iter().map(|&i| samples[i]).collect();
    let ws = idx.iter().map(|&i| weights[i] / total).collect();
    Ok((xs, ws))
}

/// Shortest interval `[x_i, x_j]` of the sorted weighted sample holding at
/// least `level` of the mass.
pub fn hpd_interval<T: Real>(samples: &[T], weights: &[T], level: T) -> Result<(T, T)> {
    if !(level > T::zero() && level < T::one()) {
        return Err(Error::usage("level must lie in (0, 1)"));
    }
    let (xs, ws) = sorted_pairs(samples, weights)?;
    let n = xs.len();
    // cum[k] = mass of xs[..k]
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(T::zero());
    for &w in &ws {
        cum.push(*cum.last().unwrap() + w);
    }
    // Guard against rounding so the whole sample always qualifies.
    cum[n] = T::one();
    let need = level - T::of(1e-12);
    let mut best = (xs[0], xs[n - 1]);
    let mut j = 0;
    for i in 0..n {
        if j < i {
            j = i;
        }
        while j < n && cum[j + 1] - cum[i] < need {
            j += 1;
        }
        if j == n {
            break;
        }
        if xs[j] - xs[i] < best.1 - best.0 {
            best = (xs[i], xs[j]);
        }
    }
    Ok(best)
}

/// Smallest sample whose cumulative weight reaches one half.
pub fn weighted_median<T: Real>(samples: &[T], weights: &[T]) -> Result<T> {
    let (xs, ws) = sorted_pairs(samples, weights)?;
    let mut acc = T::zero();
    for (x, w) in xs.iter().zip(ws) {
        acc = acc + w;
        if acc >= T::of(0.5) {
            return Ok(*x);
        }
    }
    Ok(*xs.last().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Domain, SeedTree};
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn uniform_width() {
        let mut rng = SeedTree::new(1).stream(Domain::Test, 0, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random()).collect();
        let w = vec![1.0; xs.len()];
        let (lo, hi) = hpd_interval(&xs, &w, 0.95).unwrap();
        assert!(((hi - lo) - 0.95).abs() < 0.01, "width {}", hi - lo);
    }

    #[test]
    fn symmetric_sample() {
        let mut rng = SeedTree::new(2).stream(Domain::Test, 0, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let w = vec![1.0; xs.len()];
        let (lo, hi) = hpd_interval(&xs, &w, 0.95).unwrap();
        assert!((lo + hi).abs() < 0.05);
        assert!((hi - 1.96).abs() < 0.05);
    }

    #[test]
    fn weights_shift_interval() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let w = [0.01, 0.01, 0.49, 0.49];
        assert_eq!(hpd_interval(&xs, &w, 0.9).unwrap(), (2.0, 3.0));
        assert_eq!(hpd_interval(&xs, &w, 0.99).unwrap(), (1.0, 3.0));
        assert!(hpd_interval(&[1.0], &[1.0], 0.9).is_err());
        assert!(hpd_interval(&xs, &w, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn contains_weighted_median(
            pairs in prop::collection::vec((-100.0f64..100.0, 0.01f64..10.0), 2..200),
            level in 0.55f64..0.99,
        ) {
            let (xs, ws): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let (lo, hi) = hpd_interval(&xs, &ws, level).unwrap();
            let med = weighted_median(&xs, &ws).unwrap();
            prop_assert!(lo <= med && med <= hi);
            let total: f64 = ws.iter().sum();
            let inside: f64 = xs.iter().zip(&ws).filter(|(x, _)| **x >= lo && **x <= hi).map(|(_, w)| w).sum();
            prop_assert!(inside / total >= level - 1e-9);
        }
    }
}
