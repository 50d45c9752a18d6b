//! Summary statistics and the ratio-based discrepancy measures.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::branching::Trajectory;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SummaryKind {
    /// (total progeny, growth ratio, progenitor ratio)
    #[serde(rename = "s")]
    Full,
    /// drops total progeny
    #[serde(rename = "s1")]
    S1,
    /// drops the growth ratio
    #[serde(rename = "s2")]
    S2,
    /// drops the progenitor ratio
    #[serde(rename = "s3")]
    S3,
    /// two-type tree statistic
    #[serde(rename = "two_type")]
    TwoType,
}

impl SummaryKind {
    pub fn dim(self) -> usize {
        match self {
            SummaryKind::Full => 3,
            SummaryKind::S1 | SummaryKind::S2 | SummaryKind::S3 => 2,
            SummaryKind::TwoType => 4,
        }
    }

    /// Column names used in particle files.
    pub fn component_names(self) -> &'static [&'static str] {
        match self {
            SummaryKind::Full => &["total_progeny", "growth_ratio", "progenitor_ratio"],
            SummaryKind::S1 => &["growth_ratio", "progenitor_ratio"],
            SummaryKind::S2 => &["total_progeny", "progenitor_ratio"],
            SummaryKind::S3 => &["total_progeny", "growth_ratio"],
            SummaryKind::TwoType => &["total_t1", "death_ratio", "split_ratio", "progenitor_ratio"],
        }
    }

    pub fn is_single_type(self) -> bool {
        self != SummaryKind::TwoType
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SummaryKind::Full => "s",
            SummaryKind::S1 => "s1",
            SummaryKind::S2 => "s2",
            SummaryKind::S3 => "s3",
            SummaryKind::TwoType => "two_type",
        }
    }
}

impl fmt::Display for SummaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SummaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s" => Ok(SummaryKind::Full),
            "s1" => Ok(SummaryKind::S1),
            "s2" => Ok(SummaryKind::S2),
            "s3" => Ok(SummaryKind::S3),
            "two_type" => Ok(SummaryKind::TwoType),
            other => Err(Error::config(format!("unknown summary kind '{other}'"))),
        }
    }
}

/// A strictly positive, finite summary vector of a known kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryVector<T = f64> {
    kind: SummaryKind,
    values: Vec<T>,
}

impl<T: Real> SummaryVector<T> {
    pub fn new(kind: SummaryKind, values: Vec<T>) -> Result<Self> {
        if values.len() != kind.dim() {
            return Err(Error::usage(format!(
                "summary kind {kind} has {} components, got {}",
                kind.dim(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(Error::degenerate(format!(
                "summary component {} ({}) is not strictly positive",
                i,
                kind.component_names()[i]
            )));
        }
        Ok(Self { kind, values })
    }

    pub fn kind(&self) -> SummaryKind {
        self.kind
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Reduces a single-type trajectory to the statistic of the requested kind.
pub fn summarize<T: Real>(traj: &Trajectory, kind: SummaryKind) -> Result<SummaryVector<T>> {
    let z = traj.sizes();
    let n = traj.generations();
    let head: f64 = z[..n].iter().map(|&v| v as f64).sum();
    let tail: f64 = z[1..].iter().map(|&v| v as f64).sum();
    let before_last = z[n - 1] as f64;
    let total = T::of(tail);
    let growth = T::of(tail / head);
    let progenitor = T::of(traj.last_progenitors() as f64 / before_last);
    let values = match kind {
        SummaryKind::Full => vec![total, growth, progenitor],
        SummaryKind::S1 => vec![growth, progenitor],
        SummaryKind::S2 => vec![total, progenitor],
        SummaryKind::S3 => vec![total, growth],
        SummaryKind::TwoType => {
            return Err(Error::usage("two-type summaries need a tree, not a trajectory"))
        }
    };
    SummaryVector::new(kind, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// ℓ1 distance between x/y and y/x
    #[serde(rename = "rho1")]
    Rho1,
    /// Euclidean distance between x/y and y/x
    #[serde(rename = "rhoe")]
    RhoE,
    /// Hellinger-type distance `‖√(x/y) − √(y/x)‖₂ / √2`
    #[serde(rename = "rhoh")]
    RhoH,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Rho1, Metric::RhoE, Metric::RhoH];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Rho1 => "rho1",
            Metric::RhoE => "rhoe",
            Metric::RhoH => "rhoh",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho1" => Ok(Metric::Rho1),
            "rhoe" => Ok(Metric::RhoE),
            "rhoh" => Ok(Metric::RhoH),
            other => Err(Error::config(format!("unknown metric '{other}'"))),
        }
    }
}

/// Discrepancy between two summaries measured on the ratio vectors `a/b` and `b/a`.
pub fn distance<T: Real>(a: &SummaryVector<T>, b: &SummaryVector<T>, metric: Metric) -> Result<T> {
    if a.kind != b.kind {
        return Err(Error::usage(format!(
            "cannot compare summaries of kinds {} and {}",
            a.kind, b.kind
        )));
    }
    Ok(ratio_distance(&a.values, &b.values, metric))
}

/// Metric kernel on raw positive slices of equal length.
pub(crate) fn ratio_distance<T: Real>(a: &[T], b: &[T], metric: Metric) -> T {
    let pairs = a.iter().zip(b).map(|(&x, &y)| (x / y, y / x));
    match metric {
        Metric::Rho1 => pairs.map(|(u, v)| (u - v).abs()).sum(),
        Metric::RhoE => pairs.map(|(u, v)| (u - v) * (u - v)).sum::<T>().sqrt(),
        Metric::RhoH => {
            let s: T = pairs
                .map(|(u, v)| {
                    let d = u.sqrt() - v.sqrt();
                    d * d
                })
                .sum();
            (s / T::of(2.0)).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Reference observed trajectory (Z_0..Z_30), φ_29 = 131.
    pub(crate) const OBSERVED_Z: [u64; 31] = [
        1, 4, 6, 4, 11, 6, 9, 19, 26, 14, 10, 11, 9, 12, 14, 15, 9, 3, 6, 13, 17, 23, 35, 58, 75,
        73, 103, 107, 141, 166, 216,
    ];

    fn sv(kind: SummaryKind, v: &[f64]) -> SummaryVector<f64> {
        SummaryVector::new(kind, v.to_vec()).unwrap()
    }

    #[test]
    fn observed_reference_summary() {
        let traj = Trajectory::new(OBSERVED_Z.to_vec(), 131).unwrap();
        // Independent sums by hand over the trajectory.
        let tail: u64 = OBSERVED_Z[1..].iter().sum();
        let head: u64 = OBSERVED_Z[..30].iter().sum();
        assert_eq!((tail, head), (1215, 1000));
        let s: SummaryVector<f64> = summarize(&traj, SummaryKind::Full).unwrap();
        assert_eq!(s.values()[0], 1215.0);
        assert!((s.values()[1] - 1215.0 / 1000.0).abs() < 1e-15);
        assert!((s.values()[2] - 131.0 / 166.0).abs() < 1e-15);
        assert!((s.values()[2] - 0.78916).abs() < 1e-5);

        let s3: SummaryVector<f64> = summarize(&traj, SummaryKind::S3).unwrap();
        assert_eq!(s3.values(), &s.values()[..2]);
        let s1: SummaryVector<f64> = summarize(&traj, SummaryKind::S1).unwrap();
        assert_eq!(s1.values(), &s.values()[1..]);
        let s2: SummaryVector<f64> = summarize(&traj, SummaryKind::S2).unwrap();
        assert_eq!(s2.values(), &[s.values()[0], s.values()[2]]);
    }

    #[test]
    fn constant_trajectory() {
        let traj = Trajectory::new(vec![5; 11], 5).unwrap();
        let s: SummaryVector<f64> = summarize(&traj, SummaryKind::Full).unwrap();
        assert_eq!(s.values(), &[50.0, 1.0, 1.0]);
    }

    #[test]
    fn extinct_trajectory_is_degenerate() {
        let traj = Trajectory::new(vec![1, 2, 0, 0], 0).unwrap();
        let err = summarize::<f64>(&traj, SummaryKind::Full).unwrap_err();
        assert!(matches!(err, Error::DegenerateSample(_)));
        // S3 never divides by Z_{n-1}.
        assert!(summarize::<f64>(&traj, SummaryKind::S3).is_ok());
    }

    #[test]
    fn hand_evaluated_metrics() {
        let a = sv(SummaryKind::Full, &[2.0, 1.0, 1.0]);
        let b = sv(SummaryKind::Full, &[1.0, 1.0, 1.0]);
        assert!((distance(&a, &b, Metric::Rho1).unwrap() - 1.5).abs() < 1e-15);
        assert!((distance(&a, &b, Metric::RhoE).unwrap() - 1.5).abs() < 1e-15);
        assert!((distance(&a, &b, Metric::RhoH).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kind_mismatch_is_usage_error() {
        let a = sv(SummaryKind::S1, &[2.0, 1.0]);
        let b = sv(SummaryKind::S2, &[1.0, 1.0]);
        assert!(matches!(distance(&a, &b, Metric::Rho1), Err(Error::Usage(_))));
        assert!(SummaryVector::new(SummaryKind::Full, vec![1.0, 2.0]).is_err());
        assert!(matches!(
            SummaryVector::new(SummaryKind::S1, vec![1.0, 0.0]),
            Err(Error::DegenerateSample(_))
        ));
    }

    #[test]
    fn metrics_work_in_single_precision() {
        let a = SummaryVector::new(SummaryKind::Full, vec![2.0f32, 1.0, 1.0]).unwrap();
        let b = SummaryVector::new(SummaryKind::Full, vec![1.0f32, 1.0, 1.0]).unwrap();
        assert!((distance(&a, &b, Metric::RhoH).unwrap() - 0.5).abs() < 1e-6);
    }

    fn positive_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(1e-3f64..1e3, 3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]

        #[test]
        fn metric_axioms(a in positive_vec(), b in positive_vec(), c in 1e-3f64..1e3) {
            let sa = sv(SummaryKind::Full, &a);
            let sb = sv(SummaryKind::Full, &b);
            let scaled_a = sv(SummaryKind::Full, &a.iter().map(|x| x * c).collect::<Vec<_>>());
            let scaled_b = sv(SummaryKind::Full, &b.iter().map(|x| x * c).collect::<Vec<_>>());
            for m in Metric::ALL {
                let d = distance(&sa, &sb, m).unwrap();
                prop_assert!(d >= 0.0);
                prop_assert_eq!(distance(&sa, &sa, m).unwrap(), 0.0);
                prop_assert!((d - distance(&sb, &sa, m).unwrap()).abs() <= 1e-12 * (1.0 + d));
                let ds = distance(&scaled_a, &scaled_b, m).unwrap();
                prop_assert!((d - ds).abs() <= 1e-9 * (1.0 + d));
            }
            prop_assert!(distance(&sa, &sb, Metric::Rho1).unwrap() + 1e-12 >= distance(&sa, &sb, Metric::RhoE).unwrap());
        }
    }
}
