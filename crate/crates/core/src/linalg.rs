//! Tiny dense routines for the d ≤ 5 systems the engine needs.
//! Matrices are row-major square `Vec<T>` of length `d * d`.

use crate::scalar::Real;

/// Lower Cholesky factor, or `None` if `a` is not numerically positive definite.
pub fn cholesky<T: Real>(a: &[T], d: usize) -> Option<Vec<T>> {
    debug_assert_eq!(a.len(), d * d);
    let mut l = vec![T::zero(); d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s = s - l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(s > T::zero()) || !s.is_finite() {
                    return None;
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    Some(l)
}

/// Solves `L Lᵀ x = b` given the Cholesky factor.
pub fn cholesky_solve<T: Real>(l: &[T], d: usize, b: &[T]) -> Vec<T> {
    let mut y = vec![T::zero(); d];
    for i in 0..d {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[i * d + k] * y[k];
        }
        y[i] = s / l[i * d + i];
    }
    let mut x = vec![T::zero(); d];
    for i in (0..d).rev() {
        let mut s = y[i];
        for k in i + 1..d {
            s = s - l[k * d + i] * x[k];
        }
        x[i] = s / l[i * d + i];
    }
    x
}

/// Solves `L y = b` (forward substitution only).
pub fn forward_solve<T: Real>(l: &[T], d: usize, b: &[T]) -> Vec<T> {
    let mut y = vec![T::zero(); d];
    for i in 0..d {
        let mut s = b[i];
        for k in 0..i {
            s = s - l[i * d + k] * y[k];
        }
        y[i] = s / l[i * d + i];
    }
    y
}

pub fn trace<T: Real>(a: &[T], d: usize) -> T {
    (0..d).map(|i| a[i * d + i]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_factor() {
        let l = cholesky(&[4.0, 0.0, 0.0, 9.0], 2).unwrap();
        assert_eq!(l, vec![2.0, 0.0, 0.0, 3.0]);
    }

    #[test]
    fn solve_roundtrip() {
        let a = [4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0];
        let l = cholesky(&a, 3).unwrap();
        let x = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i * 3 + j] * x[j]).sum()).collect();
        let got = cholesky_solve(&l, 3, &b);
        for (g, e) in got.iter().zip(x) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
        assert!(cholesky(&[0.0, 0.0, 0.0, 0.0], 2).is_none());
    }
}
