//! Controlled two-type process: type-1 progenitors split into two type-1
//! cells (p1), become one type-2 cell (p2) or die (p0), after binomial
//! emigration with retention probability γ.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::abc::{Prior, PriorComponent, Rejection, Simulator};
use crate::branching::POPULATION_CAP;
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::scalar::Real;
use crate::summary::{SummaryKind, SummaryVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoTypeParams {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub gamma: f64,
}

impl TwoTypeParams {
    pub fn new(p0: f64, p1: f64, p2: f64, gamma: f64) -> Result<Self> {
        let p = Self { p0, p1, p2, gamma };
        p.validate()?;
        Ok(p)
    }

    /// From the free coordinates `(p0, p1, γ)`, with `p2 = 1 − p0 − p1`.
    pub fn from_free(p0: f64, p1: f64, gamma: f64) -> Result<Self> {
        Self::new(p0, p1, (1.0 - p0 - p1).max(0.0), gamma)
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [self.p0, self.p1, self.p2];
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) || ((probs.iter().sum::<f64>()) - 1.0).abs() > 1e-12 {
            return Err(Error::config("p0, p1, p2 must be non-negative and sum to 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::config("gamma must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Per-generation counts for `l = 0..n-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRecord {
    /// Type-1 cells present.
    pub z1: u64,
    /// Type-2 cells present.
    pub z2: u64,
    pub progenitors: u64,
    /// Progenitors dying without offspring.
    pub died: u64,
    /// Progenitors splitting into two type-1 cells.
    pub split: u64,
    /// Progenitors becoming one type-2 cell.
    pub differentiated: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoTypeTree {
    pub generations: Vec<GenerationRecord>,
    /// Type-1 cells at generation `n`.
    pub final_z1: u64,
}

/// Tree aggregates over generations `0..n-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoTypeTreeSummary {
    pub n: u64,
    #[serde(rename = "N")]
    pub n0: u64,
    #[serde(rename = "Y1")]
    pub y1: u64,
    #[serde(rename = "Delta")]
    pub delta: u64,
    #[serde(rename = "Y0")]
    pub y0: u64,
    #[serde(rename = "Y2")]
    pub y2: u64,
    #[serde(rename = "Psi")]
    pub psi: u64,
}

impl TwoTypeTreeSummary {
    pub fn validate(&self) -> Result<()> {
        if self.y0 + self.y2 + self.psi != self.delta {
            return Err(Error::config("Y0 + Y2 + Psi must equal Delta"));
        }
        if self.delta > self.y1 {
            return Err(Error::config("Delta cannot exceed Y1"));
        }
        Ok(())
    }

    /// `(Y1, Y0/Δ, Y2/Δ, Δ/Y1)`.
    pub fn statistic<T: Real>(&self) -> Result<SummaryVector<T>> {
        summarize_two_type(self)
    }
}

impl TwoTypeTree {
    pub fn summary(&self, n0: u64) -> TwoTypeTreeSummary {
        let g = &self.generations;
        TwoTypeTreeSummary {
            n: g.len() as u64,
            n0,
            y1: g.iter().map(|r| r.z1).sum(),
            delta: g.iter().map(|r| r.progenitors).sum(),
            y0: g.iter().map(|r| r.died).sum(),
            y2: g.iter().map(|r| r.split).sum(),
            psi: g.iter().map(|r| r.differentiated).sum(),
        }
    }
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

/// Simulates generations `0..n` from `Z_0 = (n0, 0)`.
pub fn simulate_two_type<R: Rng + ?Sized>(
    params: &TwoTypeParams,
    n0: u64,
    n: usize,
    rng: &mut R,
) -> TwoTypeTree {
    assert!(n0 >= 1 && n >= 1, "n0 and n must be positive");
    let mut generations = Vec::with_capacity(n);
    let (mut z1, mut z2) = (n0, 0u64);
    for _ in 0..n {
        let progenitors = binomial(z1, params.gamma, rng);
        let died = binomial(progenitors, params.p0, rng);
        let rest = 1.0 - params.p0;
        let split = if rest > 0.0 {
            binomial(progenitors - died, (params.p1 / rest).min(1.0), rng)
        } else {
            0
        };
        let differentiated = progenitors - died - split;
        generations.push(GenerationRecord { z1, z2, progenitors, died, split, differentiated });
        z1 = split.saturating_mul(2).min(POPULATION_CAP);
        z2 = differentiated;
    }
    TwoTypeTree { generations, final_z1: z1 }
}

/// `(Y1, Y0/Δ, Y2/Δ, Δ/Y1)`; any zero component is degenerate.
pub fn summarize_two_type<T: Real>(s: &TwoTypeTreeSummary) -> Result<SummaryVector<T>> {
    if s.y1 == 0 || s.delta == 0 {
        return Err(Error::degenerate("Y1 and Delta must be positive"));
    }
    let d = T::of(s.delta as f64);
    let y1 = T::of(s.y1 as f64);
    SummaryVector::new(
        SummaryKind::TwoType,
        vec![y1, T::of(s.y0 as f64) / d, T::of(s.y2 as f64) / d, d / y1],
    )
}

/// `Y0 ln p0 + Y2 ln p1 + Ψ ln p2 + Δ ln γ + (Y1 − Δ) ln(1 − γ)`, with
/// `0 · ln 0 = 0` and `−∞` for a positive count on a zero probability.
pub fn two_type_likelihood(data: &TwoTypeTreeSummary, params: &TwoTypeParams) -> f64 {
    let term = |count: u64, p: f64| {
        if count == 0 {
            0.0
        } else if p <= 0.0 {
            f64::NEG_INFINITY
        } else {
            count as f64 * p.ln()
        }
    };
    term(data.y0, params.p0)
        + term(data.y2, params.p1)
        + term(data.psi, params.p2)
        + term(data.delta, params.gamma)
        + term(data.y1 - data.delta, 1.0 - params.gamma)
}

/// Exact posterior `Dirichlet(α + (Y0, Y2, Ψ)) × Beta(β1 + Δ, β2 + Y1 − Δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePosterior {
    pub alpha: [f64; 3],
    pub beta: [f64; 2],
}

pub const REFERENCE_ALPHA: [f64; 3] = [0.5, 0.5, 0.5];
pub const REFERENCE_BETA: [f64; 2] = [0.5, 0.5];

fn beta_ln_pdf(x: f64, a: f64, b: f64) -> f64 {
    if !(x > 0.0 && x < 1.0) {
        return f64::NEG_INFINITY;
    }
    (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() + ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b)
}

impl ConjugatePosterior {
    pub fn new(data: &TwoTypeTreeSummary, alpha: [f64; 3], beta: [f64; 2]) -> Result<Self> {
        if alpha.iter().chain(&beta).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::config("prior hyperparameters must be positive"));
        }
        data.validate()?;
        Ok(Self {
            alpha: [
                alpha[0] + data.y0 as f64,
                alpha[1] + data.y2 as f64,
                alpha[2] + data.psi as f64,
            ],
            beta: [beta[0] + data.delta as f64, beta[1] + (data.y1 - data.delta) as f64],
        })
    }

    fn alpha_sum(&self) -> f64 {
        self.alpha.iter().sum()
    }

    /// Posterior means of `(p0, p1, p2, γ)`.
    pub fn means(&self) -> [f64; 4] {
        let s = self.alpha_sum();
        let [b1, b2] = self.beta;
        [self.alpha[0] / s, self.alpha[1] / s, self.alpha[2] / s, b1 / (b1 + b2)]
    }

    pub fn variances(&self) -> [f64; 4] {
        let s = self.alpha_sum();
        let v = |a: f64| a * (s - a) / (s * s * (s + 1.0));
        let [b1, b2] = self.beta;
        let t = b1 + b2;
        [v(self.alpha[0]), v(self.alpha[1]), v(self.alpha[2]), b1 * b2 / (t * t * (t + 1.0))]
    }

    /// Joint log density at `(p0, p1, γ)` with `p2 = 1 − p0 − p1`.
    pub fn log_density(&self, p0: f64, p1: f64, gamma: f64) -> f64 {
        let p2 = 1.0 - p0 - p1;
        if !(p0 > 0.0 && p1 > 0.0 && p2 > 0.0) {
            return f64::NEG_INFINITY;
        }
        let [a0, a1, a2] = self.alpha;
        let dir = ln_gamma(a0 + a1 + a2) - ln_gamma(a0) - ln_gamma(a1) - ln_gamma(a2)
            + (a0 - 1.0) * p0.ln()
            + (a1 - 1.0) * p1.ln()
            + (a2 - 1.0) * p2.ln();
        dir + beta_ln_pdf(gamma, self.beta[0], self.beta[1])
    }

    pub fn density(&self, p0: f64, p1: f64, gamma: f64) -> f64 {
        self.log_density(p0, p1, gamma).exp()
    }

    /// Marginal density of coordinate `index` of `(p0, p1, p2, γ)`; each is a Beta law.
    pub fn marginal_density(&self, index: usize, x: f64) -> f64 {
        let (a, b) = match index {
            0..=2 => (self.alpha[index], self.alpha_sum() - self.alpha[index]),
            3 => (self.beta[0], self.beta[1]),
            _ => panic!("marginal index out of range"),
        };
        beta_ln_pdf(x, a, b).exp()
    }

    /// One draw of `(p0, p1, p2, γ)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 4] {
        let g = |a: f64, rng: &mut R| Gamma::new(a, 1.0).expect("positive shape").sample(rng);
        let x = [g(self.alpha[0], rng), g(self.alpha[1], rng), g(self.alpha[2], rng)];
        let s: f64 = x.iter().sum();
        let (u, v) = (g(self.beta[0], rng), g(self.beta[1], rng));
        [x[0] / s, x[1] / s, x[2] / s, u / (u + v)]
    }
}

/// Two-type model plug-in; parameter layout `[p0, p1, γ]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoTypeModel {
    pub n0: u64,
    pub generations: usize,
    /// Simulations tried per call before reporting extinction at generation `n`.
    #[serde(default = "one")]
    pub extinction_retries: u64,
}

fn one() -> u64 {
    1
}

pub const TWO_TYPE_PARAMS: [&str; 3] = ["p0", "p1", "gamma"];

impl TwoTypeModel {
    pub fn new(n0: u64, generations: usize) -> Result<Self> {
        let m = Self { n0, generations, extinction_retries: 1 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 == 0 || self.generations == 0 || self.extinction_retries == 0 {
            return Err(Error::config("n0, generations and extinction_retries must be positive"));
        }
        Ok(())
    }

    /// Dirichlet(α) on `(p0, p1, p2)` times Beta(β) on γ.
    pub fn prior<T: Real>(&self, alpha: [f64; 3], beta: [f64; 2]) -> Result<Prior<T>> {
        Prior::new(vec![
            PriorComponent::dirichlet(&["p0", "p1"], alpha.iter().map(|&a| T::of(a)).collect()),
            PriorComponent::beta("gamma", T::of(beta[0]), T::of(beta[1])),
        ])
    }
}

impl<T: Real> Simulator<T> for TwoTypeModel {
    fn simulate(
        &self,
        params: &[T],
        kind: SummaryKind,
        rng: &mut Stream,
    ) -> std::result::Result<SummaryVector<T>, Rejection> {
        if kind != SummaryKind::TwoType || params.len() != 3 {
            return Err(Rejection::Degenerate);
        }
        let p = TwoTypeParams::from_free(params[0].as_f64(), params[1].as_f64(), params[2].as_f64())
            .map_err(|_| Rejection::Degenerate)?;
        for _ in 0..self.extinction_retries {
            let tree = simulate_two_type(&p, self.n0, self.generations, rng);
            if tree.final_z1 == 0 {
                continue;
            }
            if tree.final_z1 >= POPULATION_CAP {
                return Err(Rejection::Degenerate);
            }
            return summarize_two_type(&tree.summary(self.n0)).map_err(|_| Rejection::Degenerate);
        }
        Err(Rejection::Extinct)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Domain, SeedTree};

    pub(crate) const OBSERVED: TwoTypeTreeSummary =
        TwoTypeTreeSummary { n: 5, n0: 30, y1: 276, delta: 269, y0: 37, y2: 133, psi: 99 };

    #[test]
    fn reference_statistic() {
        let s: SummaryVector<f64> = summarize_two_type(&OBSERVED).unwrap();
        let v = s.values();
        assert_eq!(v[0], 276.0);
        assert!((v[1] - 37.0 / 269.0).abs() < 1e-15 && (v[1] - 0.137546).abs() < 1e-6);
        assert!((v[2] - 133.0 / 269.0).abs() < 1e-15 && (v[2] - 0.494423).abs() < 1e-6);
        assert!((v[3] - 269.0 / 276.0).abs() < 1e-15 && (v[3] - 0.974637).abs() < 1e-6);
        OBSERVED.validate().unwrap();
    }

    #[test]
    fn deterministic_doubling() {
        let p = TwoTypeParams::new(0.0, 1.0, 0.0, 1.0).unwrap();
        let mut rng = SeedTree::new(1).stream(Domain::Test, 0, 0);
        let tree = simulate_two_type(&p, 1, 6, &mut rng);
        let z: Vec<u64> = tree.generations.iter().map(|g| g.z1).collect();
        assert_eq!(z, vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(tree.final_z1, 64);
    }

    #[test]
    fn total_emigration() {
        let p = TwoTypeParams::new(0.2, 0.5, 0.3, 0.0).unwrap();
        let mut rng = SeedTree::new(2).stream(Domain::Test, 0, 0);
        let s = simulate_two_type(&p, 7, 4, &mut rng).summary(7);
        assert_eq!((s.y1, s.delta, s.y0, s.y2, s.psi), (7, 0, 0, 0, 0));
        assert!(summarize_two_type::<f64>(&s).is_err());
    }

    #[test]
    fn all_die_statistic() {
        let s = TwoTypeTreeSummary { n: 1, n0: 5, y1: 5, delta: 5, y0: 5, y2: 0, psi: 0 };
        // Y2/Δ = 0 is not a valid summary component.
        assert!(summarize_two_type::<f64>(&s).is_err());
        let s = TwoTypeTreeSummary { n: 1, n0: 5, y1: 10, delta: 10, y0: 10, y2: 0, psi: 0 };
        assert!(s.validate().is_ok());
    }

    #[test]
    fn partition_and_one_step_mean() {
        let p = TwoTypeParams::new(0.14, 0.5, 0.36, 0.97).unwrap();
        let mut rng = SeedTree::new(3).stream(Domain::Test, 0, 0);
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let tree = simulate_two_type(&p, 30, 1, &mut rng);
            let s = tree.summary(30);
            assert_eq!(s.y0 + s.y2 + s.psi, s.delta);
            assert!(s.delta <= s.y1);
            let z = tree.final_z1 as f64;
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let se = ((sum_sq / n as f64 - mean * mean) / n as f64).sqrt();
        let expected = 30.0 * 0.97 * 2.0 * 0.5;
        assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected} (se {se})");
    }

    #[test]
    fn conjugate_closed_forms() {
        let post = ConjugatePosterior::new(&OBSERVED, REFERENCE_ALPHA, REFERENCE_BETA).unwrap();
        assert_eq!(post.beta, [269.5, 7.5]);
        let m = post.means();
        let v = post.variances();
        assert!((m[3] - 269.5 / 277.0).abs() < 1e-15);
        assert!((m[3] - 0.97292).abs() < 1e-5);
        assert!((v[3] - 269.5 * 7.5 / (277.0 * 277.0 * 278.0)).abs() < 1e-18);
        assert!((v[3] - 9.48e-5).abs() < 1e-7);
        assert!((m[0] - 37.5 / 270.5).abs() < 1e-15);
        assert!((m.iter().take(3).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_data_gives_prior() {
        let empty = TwoTypeTreeSummary { n: 0, n0: 1, y1: 0, delta: 0, y0: 0, y2: 0, psi: 0 };
        let post = ConjugatePosterior::new(&empty, [1.0, 2.0, 3.0], [4.0, 5.0]).unwrap();
        assert_eq!(post.alpha, [1.0, 2.0, 3.0]);
        assert_eq!(post.beta, [4.0, 5.0]);
    }

    #[test]
    fn sampling_matches_moments() {
        let post = ConjugatePosterior::new(&OBSERVED, REFERENCE_ALPHA, REFERENCE_BETA).unwrap();
        let mut rng = SeedTree::new(4).stream(Domain::Test, 0, 0);
        let n = 200_000;
        let mut acc = [0.0; 4];
        for _ in 0..n {
            let s = post.sample(&mut rng);
            for k in 0..4 {
                acc[k] += s[k];
            }
        }
        let (m, v) = (post.means(), post.variances());
        for k in 0..4 {
            let se = (v[k] / n as f64).sqrt();
            assert!((acc[k] / n as f64 - m[k]).abs() < 4.0 * se);
        }
    }

    #[test]
    fn likelihood_maximizer() {
        let mle = TwoTypeParams::new(37.0 / 269.0, 133.0 / 269.0, 99.0 / 269.0, 269.0 / 276.0).unwrap();
        let best = two_type_likelihood(&OBSERVED, &mle);
        for (d0, d1, dg) in [(0.01, 0.0, 0.0), (0.0, -0.01, 0.0), (-0.005, 0.005, 0.0), (0.0, 0.0, 0.005), (0.0, 0.0, -0.01)] {
            let p = TwoTypeParams::from_free(mle.p0 + d0, mle.p1 + d1, mle.gamma + dg).unwrap();
            assert!(two_type_likelihood(&OBSERVED, &p) < best);
        }
        let zero = TwoTypeParams::new(0.0, 0.5, 0.5, 0.9).unwrap();
        assert_eq!(two_type_likelihood(&OBSERVED, &zero), f64::NEG_INFINITY);
    }

    #[test]
    fn likelihood_symmetry() {
        let s = TwoTypeTreeSummary { n: 3, n0: 10, y1: 40, delta: 30, y0: 10, y2: 10, psi: 10 };
        let a = two_type_likelihood(&s, &TwoTypeParams::new(0.2, 0.3, 0.5, 0.7).unwrap());
        let b = two_type_likelihood(&s, &TwoTypeParams::new(0.5, 0.2, 0.3, 0.7).unwrap());
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn model_plugin() {
        let m = TwoTypeModel::new(30, 5).unwrap();
        let mut rng = SeedTree::new(5).stream(Domain::Test, 0, 0);
        let s: SummaryVector<f64> = m.simulate(&[0.14, 0.5, 0.97], SummaryKind::TwoType, &mut rng).unwrap();
        assert_eq!(s.dim(), 4);
        let r = Simulator::<f64>::simulate(&m, &[0.9, 0.05, 0.97], SummaryKind::Full, &mut rng);
        assert_eq!(r.unwrap_err(), Rejection::Degenerate);
        let p: Prior<f64> = m.prior(REFERENCE_ALPHA, REFERENCE_BETA).unwrap();
        assert_eq!(p.names(), TWO_TYPE_PARAMS.to_vec());
    }
}
