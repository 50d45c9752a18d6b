use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::{weighted_covariance, GaussianKernel};
use super::population::{Particle, ParticlePopulation};
use super::prior::Prior;
use crate::error::{Error, Result};
use crate::rng::{Domain, SeedTree, Stream};
use crate::scalar::Real;
use crate::summary::{distance, Metric, SummaryKind, SummaryVector};

/// Why a simulation produced no usable summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    /// The process died out (or kept dying out) before the horizon.
    Extinct,
    /// The summary has a zero, non-finite or saturated component.
    Degenerate,
}

/// Model plug-in: parameters in, summary statistic out.
pub trait Simulator<T: Real>: Sync {
    fn simulate(
        &self,
        params: &[T],
        kind: SummaryKind,
        rng: &mut Stream,
    ) -> std::result::Result<SummaryVector<T>, Rejection>;
}

impl<T, F> Simulator<T> for F
where
    T: Real,
    F: Fn(&[T], SummaryKind, &mut Stream) -> std::result::Result<SummaryVector<T>, Rejection> + Sync,
{
    fn simulate(
        &self,
        params: &[T],
        kind: SummaryKind,
        rng: &mut Stream,
    ) -> std::result::Result<SummaryVector<T>, Rejection> {
        self(params, kind, rng)
    }
}

/// How a pool of candidates is turned into an accepted population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance<T = f64> {
    /// Keep the `round(q · pool)` closest candidates.
    Quantile(f64),
    /// Keep every candidate within the threshold.
    Threshold(T),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantileStage {
    pub pool: usize,
    pub order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum Schedule<T = f64> {
    /// Each stage simulates `pool` candidates and keeps the closest fraction `order`.
    Quantile { stages: Vec<QuantileStage> },
    /// Each stage fills `particles` slots, simulating until the distance is within the threshold.
    Explicit { particles: usize, thresholds: Vec<T> },
}

impl<T: Real> Schedule<T> {
    pub fn stages(&self) -> usize {
        match self {
            Schedule::Quantile { stages } => stages.len(),
            Schedule::Explicit { thresholds, .. } => thresholds.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages() == 0 {
            return Err(Error::config("schedule needs at least one stage"));
        }
        match self {
            Schedule::Quantile { stages } => {
                for (t, s) in stages.iter().enumerate() {
                    if s.pool == 0 {
                        return Err(Error::config(format!("stage {}: pool must be positive", t + 1)));
                    }
                    if !(s.order > 0.0 && s.order <= 1.0) {
                        return Err(Error::config(format!(
                            "stage {}: quantile order must lie in (0, 1], got {}",
                            t + 1,
                            s.order
                        )));
                    }
                }
            }
            Schedule::Explicit { particles, thresholds } => {
                if *particles == 0 {
                    return Err(Error::config("particle count must be positive"));
                }
                if thresholds.iter().any(|e| e.is_nan() || *e <= T::zero()) {
                    return Err(Error::config("thresholds must be positive"));
                }
                if thresholds.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::config("thresholds must be non-increasing"));
                }
            }
        }
        Ok(())
    }
}

pub const DEFAULT_BUDGET_PER_STAGE: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmcConfig<T = f64> {
    pub schedule: Schedule<T>,
    pub metric: Metric,
    pub summary: SummaryKind,
    pub seed: u64,
    /// Simulation attempts allowed per stage, split evenly over the stage's slots.
    pub budget_per_stage: u64,
}

/// Failure of a sequential run, keeping the stages that did complete.
#[derive(Debug, Clone, PartialEq)]
pub struct SmcFailure<T = f64> {
    pub error: Error,
    pub completed: Vec<ParticlePopulation<T>>,
}

impl<T> fmt::Display for SmcFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (after {} completed stages)", self.error, self.completed.len())
    }
}

impl<T: fmt::Debug> std::error::Error for SmcFailure<T> {}

/// Proposal redraws allowed before a kernel is declared stuck outside the support.
const MAX_SUPPORT_REDRAWS: u64 = 1_000_000;

struct Candidate<T> {
    params: Vec<T>,
    summary: SummaryVector<T>,
    distance: T,
}

enum Proposal<'a, T> {
    Prior,
    Mixture {
        prev: &'a ParticlePopulation<T>,
        kernel: GaussianKernel<T>,
        index: WeightedIndex<f64>,
    },
}

impl<'a, T: Real> Proposal<'a, T> {
    fn mixture(prev: &'a ParticlePopulation<T>) -> Result<Self> {
        let kernel = GaussianKernel::new(&prev.covariance, prev.dim())?;
        let index = WeightedIndex::new(prev.particles.iter().map(|p| p.weight.as_f64()))
            .map_err(|e| Error::Numeric(format!("previous weights unusable: {e}")))?;
        Ok(Proposal::Mixture { prev, kernel, index })
    }
}

enum Plan<T> {
    Pool { size: usize, rule: Acceptance<T> },
    Fill { particles: usize, threshold: T },
}

struct Stage<'a, T: Real, S> {
    prior: &'a Prior<T>,
    simulator: &'a S,
    observed: &'a SummaryVector<T>,
    metric: Metric,
    seeds: SeedTree,
    stage: usize,
    budget: u64,
}

impl<T: Real, S: Simulator<T>> Stage<'_, T, S> {
    fn propose(&self, proposal: &Proposal<'_, T>, rng: &mut Stream) -> Result<Vec<T>> {
        match proposal {
            Proposal::Prior => Ok(self.prior.sample(rng)),
            Proposal::Mixture { prev, kernel, index } => {
                for _ in 0..MAX_SUPPORT_REDRAWS {
                    let k = index.sample(rng);
                    let x = kernel.sample(&prev.particles[k].params, rng);
                    if self.prior.in_support(&x) {
                        return Ok(x);
                    }
                }
                Err(Error::Numeric("perturbation kernel keeps leaving the prior support".into()))
            }
        }
    }

    fn draw(
        &self,
        proposal: &Proposal<'_, T>,
        rng: &mut Stream,
        attempts: &mut u64,
        cap: u64,
    ) -> Result<Candidate<T>> {
        let kind = self.observed.kind();
        loop {
            if *attempts >= cap {
                return Err(Error::Budget(format!(
                    "stage {}: a slot used all {cap} of its simulation attempts",
                    self.stage
                )));
            }
            *attempts += 1;
            let params = self.propose(proposal, rng)?;
            let Ok(summary) = self.simulator.simulate(&params, kind, rng) else {
                continue;
            };
            let d = distance(&summary, self.observed, self.metric)?;
            if d.is_finite() {
                return Ok(Candidate { params, summary, distance: d });
            }
        }
    }

    fn run(&self, proposal: &Proposal<'_, T>, plan: &Plan<T>) -> Result<Outcome<T>> {
        let slots = match plan {
            Plan::Pool { size, .. } => *size,
            Plan::Fill { particles, .. } => *particles,
        };
        let cap = self.budget.div_ceil(slots as u64).max(1);
        let results: Vec<Result<(Candidate<T>, u64)>> = (0..slots)
            .into_par_iter()
            .map(|j| {
                let mut rng = self.seeds.stream(Domain::Smc, self.stage as u64, j as u64);
                let mut attempts = 0;
                loop {
                    let c = self.draw(proposal, &mut rng, &mut attempts, cap)?;
                    match plan {
                        Plan::Fill { threshold, .. } if c.distance > *threshold => continue,
                        _ => return Ok((c, attempts)),
                    }
                }
            })
            .collect();
        let mut candidates = Vec::with_capacity(slots);
        let mut attempts = 0u64;
        for r in results {
            let (c, a) = r?;
            attempts += a;
            candidates.push(c);
        }

        let (accepted, threshold, pool) = match plan {
            Plan::Fill { threshold, .. } => (candidates, *threshold, None),
            Plan::Pool { size, rule: Acceptance::Threshold(eps) } => {
                let kept: Vec<_> = candidates.into_iter().filter(|c| c.distance <= *eps).collect();
                if kept.is_empty() {
                    return Err(Error::EmptyPopulation);
                }
                (kept, *eps, Some(*size))
            }
            Plan::Pool { size, rule: Acceptance::Quantile(q) } => {
                let k = ((q * *size as f64).round() as usize).clamp(1, *size);
                let mut order: Vec<usize> = (0..candidates.len()).collect();
                order.sort_by(|&a, &b| {
                    candidates[a]
                        .distance
                        .partial_cmp(&candidates[b].distance)
                        .expect("finite distances")
                        .then(a.cmp(&b))
                });
                let eps = candidates[order[k - 1]].distance;
                let mut chosen = vec![false; candidates.len()];
                for &i in &order[..k] {
                    chosen[i] = true;
                }
                let kept = candidates
                    .into_iter()
                    .zip(chosen)
                    .filter_map(|(c, keep)| keep.then_some(c))
                    .collect();
                (kept, eps, Some(*size))
            }
        };
        Ok(Outcome { accepted, threshold, attempts, pool })
    }
}

struct Outcome<T> {
    accepted: Vec<Candidate<T>>,
    threshold: T,
    attempts: u64,
    pool: Option<usize>,
}

/// Normalized importance weights `π(x) / Σ_k ω_k K(x | x_k)` for points drawn
/// from the mixture around `prev`.
pub fn importance_weights<T: Real>(
    prior: &Prior<T>,
    prev: &ParticlePopulation<T>,
    kernel: &GaussianKernel<T>,
    points: &[Vec<T>],
) -> Result<Vec<T>> {
    let log_prev: Vec<f64> = prev.particles.iter().map(|p| p.weight.as_f64().ln()).collect();
    let log_w: Vec<f64> = points
        .par_iter()
        .map(|x| {
            let terms: Vec<f64> = prev
                .particles
                .iter()
                .zip(&log_prev)
                .map(|(p, lw)| lw + kernel.log_density(x, &p.params).as_f64())
                .collect();
            prior.log_density(x) - log_sum_exp(&terms)
        })
        .collect();
    normalize_log_weights(&log_w)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

fn normalize_log_weights<T: Real>(log_w: &[f64]) -> Result<Vec<T>> {
    let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Numeric("importance weights are all zero or infinite".into()));
    }
    let unnorm: Vec<f64> = log_w.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    Ok(unnorm.iter().map(|w| T::of(w / total)).collect())
}

fn assemble<T: Real>(
    prior: &Prior<T>,
    stage: usize,
    outcome: Outcome<T>,
    previous: Option<(&ParticlePopulation<T>, &GaussianKernel<T>)>,
) -> Result<ParticlePopulation<T>> {
    let points: Vec<Vec<T>> = outcome.accepted.iter().map(|c| c.params.clone()).collect();
    let weights = match previous {
        None => vec![T::one() / T::of_usize(points.len()); points.len()],
        Some((prev, kernel)) => importance_weights(prior, prev, kernel, &points)?,
    };
    let two = T::of(2.0);
    let covariance = weighted_covariance(&points, &weights)
        .into_iter()
        .map(|v| two * v)
        .collect();
    let particles = outcome
        .accepted
        .into_iter()
        .zip(&weights)
        .map(|(c, &weight)| Particle {
            params: c.params,
            weight,
            distance: c.distance,
            summary: c.summary,
        })
        .collect();
    Ok(ParticlePopulation {
        stage,
        param_names: prior.names(),
        particles,
        threshold: outcome.threshold,
        covariance,
        attempts: outcome.attempts,
        pool_size: outcome.pool,
    })
}

/// Rejection sampler: simulates a pool of `pool` candidates from the prior and
/// accepts according to `rule`. Identical to the first stage of [`smc_abc`].
#[allow(clippy::too_many_arguments)]
pub fn rejection_abc<T: Real, S: Simulator<T>>(
    prior: &Prior<T>,
    simulator: &S,
    observed: &SummaryVector<T>,
    metric: Metric,
    pool: usize,
    rule: Acceptance<T>,
    seed: u64,
    budget: u64,
) -> Result<ParticlePopulation<T>> {
    if pool == 0 {
        return Err(Error::config("pool must be positive"));
    }
    if let Acceptance::Quantile(q) = rule {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::config("quantile order must lie in (0, 1]"));
        }
    }
    let stage = Stage {
        prior,
        simulator,
        observed,
        metric,
        seeds: SeedTree::new(seed),
        stage: 1,
        budget,
    };
    let outcome = stage.run(&Proposal::Prior, &Plan::Pool { size: pool, rule })?;
    assemble(prior, 1, outcome, None)
}

/// Sequential Monte Carlo ABC. Stage 1 samples the prior; stage `t > 1`
/// perturbs particles of stage `t − 1` with a Gaussian kernel.
pub fn smc_abc<T: Real, S: Simulator<T>>(
    prior: &Prior<T>,
    simulator: &S,
    observed: &SummaryVector<T>,
    config: &SmcConfig<T>,
) -> std::result::Result<Vec<ParticlePopulation<T>>, SmcFailure<T>> {
    let mut done: Vec<ParticlePopulation<T>> = Vec::new();
    let fail = |error, completed| SmcFailure { error, completed };
    if let Err(e) = config.schedule.validate() {
        return Err(fail(e, done));
    }
    if observed.kind() != config.summary {
        return Err(fail(
            Error::usage(format!(
                "observed summary is {} but the run is configured for {}",
                observed.kind(),
                config.summary
            )),
            done,
        ));
    }
    let seeds = SeedTree::new(config.seed);
    for t in 1..=config.schedule.stages() {
        let plan = match &config.schedule {
            Schedule::Quantile { stages } => Plan::Pool {
                size: stages[t - 1].pool,
                rule: Acceptance::Quantile(stages[t - 1].order),
            },
            Schedule::Explicit { particles, thresholds } => Plan::Fill {
                particles: *particles,
                threshold: thresholds[t - 1],
            },
        };
        let stage = Stage {
            prior,
            simulator,
            observed,
            metric: config.metric,
            seeds,
            stage: t,
            budget: config.budget_per_stage,
        };
        let result = match done.last() {
            None => stage
                .run(&Proposal::Prior, &plan)
                .and_then(|o| assemble(prior, t, o, None)),
            Some(prev) => Proposal::mixture(prev).and_then(|proposal| {
                let outcome = stage.run(&proposal, &plan)?;
                let Proposal::Mixture { kernel, .. } = &proposal else {
                    unreachable!()
                };
                assemble(prior, t, outcome, Some((prev, kernel)))
            }),
        };
        match result {
            Ok(pop) => done.push(pop),
            Err(e) => return Err(fail(e, done)),
        }
    }
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abc::prior::PriorComponent;
    use rand::Rng;
    use statrs::distribution::{Beta, ContinuousCDF};

    fn prior_1d() -> Prior<f64> {
        Prior::new(vec![PriorComponent::uniform("x", 0.0, 1.0)]).unwrap()
    }

    /// Summary `(1 + x + noise, 1, 1)` so the distance is driven by `x`.
    fn toy(params: &[f64], kind: SummaryKind, rng: &mut Stream) -> std::result::Result<SummaryVector<f64>, Rejection> {
        let noise: f64 = rng.random::<f64>() * 0.05;
        SummaryVector::new(kind, vec![1.0 + params[0] + noise, 1.0, 1.0]).map_err(|_| Rejection::Degenerate)
    }

    fn observed(x: f64) -> SummaryVector<f64> {
        SummaryVector::new(SummaryKind::Full, vec![1.0 + x, 1.0, 1.0]).unwrap()
    }

    fn quantile_config(stages: &[(usize, f64)], seed: u64) -> SmcConfig<f64> {
        SmcConfig {
            schedule: Schedule::Quantile {
                stages: stages.iter().map(|&(pool, order)| QuantileStage { pool, order }).collect(),
            },
            metric: Metric::Rho1,
            summary: SummaryKind::Full,
            seed,
            budget_per_stage: DEFAULT_BUDGET_PER_STAGE,
        }
    }

    #[test]
    fn weights_match_hand_computation() {
        let prior = Prior::new(vec![PriorComponent::beta("x", 2.0, 2.0)]).unwrap();
        let summary = observed(0.1);
        let prev = ParticlePopulation {
            stage: 1,
            param_names: vec!["x".into()],
            particles: vec![
                Particle { params: vec![0.3], weight: 0.25, distance: 0.1, summary: summary.clone() },
                Particle { params: vec![0.6], weight: 0.75, distance: 0.1, summary: summary.clone() },
            ],
            threshold: 0.1,
            covariance: vec![0.04],
            attempts: 2,
            pool_size: None,
        };
        let kernel = GaussianKernel::new(&prev.covariance, 1).unwrap();
        let pts = vec![vec![0.4], vec![0.7]];
        let got = importance_weights(&prior, &prev, &kernel, &pts).unwrap();

        let phi = |x: f64, m: f64| (-(x - m).powi(2) / (2.0 * 0.04)).exp() / (0.04 * std::f64::consts::TAU).sqrt();
        let beta22 = |x: f64| 6.0 * x * (1.0 - x);
        let raw: Vec<f64> = [0.4, 0.7]
            .iter()
            .map(|&x| beta22(x) / (0.25 * phi(x, 0.3) + 0.75 * phi(x, 0.6)))
            .collect();
        let total: f64 = raw.iter().sum();
        for (g, r) in got.iter().zip(&raw) {
            assert!((g - r / total).abs() < 1e-12, "{g} vs {}", r / total);
        }
    }

    #[test]
    fn quantile_keeps_exact_count() {
        let prior = prior_1d();
        let pop = rejection_abc(&prior, &toy, &observed(0.5), Metric::Rho1, 9000, Acceptance::Quantile(0.025), 11, u64::MAX)
            .unwrap();
        assert_eq!(pop.len(), 225);
        assert!(pop.particles.iter().all(|p| p.distance <= pop.threshold));
        assert_eq!(pop.pool_size, Some(9000));
        let total: f64 = pop.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_stage_smc_equals_rejection() {
        let prior = prior_1d();
        let obs = observed(0.3);
        let rej = rejection_abc(&prior, &toy, &obs, Metric::RhoE, 2000, Acceptance::Quantile(0.05), 5, DEFAULT_BUDGET_PER_STAGE)
            .unwrap();
        let mut cfg = quantile_config(&[(2000, 0.05)], 5);
        cfg.metric = Metric::RhoE;
        let smc = smc_abc(&prior, &toy, &obs, &cfg).unwrap();
        assert_eq!(smc.len(), 1);
        assert_eq!(smc[0], rej);
    }

    #[test]
    fn infinite_threshold_returns_the_prior() {
        let prior = Prior::new(vec![PriorComponent::beta("x", 0.5, 0.5)]).unwrap();
        let n = 4000;
        let pop = rejection_abc(&prior, &toy, &observed(0.2), Metric::Rho1, n, Acceptance::Threshold(f64::INFINITY), 8, u64::MAX)
            .unwrap();
        assert_eq!(pop.len(), n);
        let mut xs = pop.column(0);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let cdf = Beta::new(0.5, 0.5).unwrap();
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf.cdf(x);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value of the one-sample KS statistic.
        assert!(ks < 1.63 / (n as f64).sqrt(), "KS {ks}");
    }

    #[test]
    fn stages_shrink_threshold_and_concentrate() {
        let prior = prior_1d();
        let obs = observed(0.4);
        let cfg = quantile_config(&[(4000, 0.1), (4000, 0.1), (4000, 0.1)], 21);
        let pops = smc_abc(&prior, &toy, &obs, &cfg).unwrap();
        assert_eq!(pops.len(), 3);
        assert!(pops[2].threshold < pops[0].threshold);
        assert!(pops[2].variance(0) < pops[0].variance(0));
        for p in &pops {
            assert_eq!(p.len(), 400);
            assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.particles.iter().all(|q| prior.in_support(&q.params)));
        }
    }

    #[test]
    fn explicit_schedule_respects_thresholds() {
        let prior = prior_1d();
        let cfg = SmcConfig {
            schedule: Schedule::Explicit { particles: 300, thresholds: vec![0.5, 0.2, 0.1] },
            metric: Metric::Rho1,
            summary: SummaryKind::Full,
            seed: 3,
            budget_per_stage: DEFAULT_BUDGET_PER_STAGE,
        };
        let pops = smc_abc(&prior, &toy, &observed(0.4), &cfg).unwrap();
        for (p, eps) in pops.iter().zip([0.5, 0.2, 0.1]) {
            assert_eq!(p.len(), 300);
            assert!(p.particles.iter().all(|q| q.distance <= eps));
            assert!(p.attempts >= 300);
        }
    }

    #[test]
    fn budget_failure_keeps_completed_stages() {
        let prior = prior_1d();
        let cfg = SmcConfig {
            schedule: Schedule::Explicit { particles: 50, thresholds: vec![1.0, 1e-300] },
            metric: Metric::Rho1,
            summary: SummaryKind::Full,
            seed: 3,
            budget_per_stage: 5000,
        };
        let err = smc_abc(&prior, &toy, &observed(0.4), &cfg).unwrap_err();
        assert!(matches!(err.error, Error::Budget(_)));
        assert_eq!(err.completed.len(), 1);

        let always_extinct = |_: &[f64], _: SummaryKind, _: &mut Stream| -> std::result::Result<SummaryVector<f64>, Rejection> {
            Err(Rejection::Extinct)
        };
        let err = rejection_abc(&prior, &always_extinct, &observed(0.4), Metric::Rho1, 10, Acceptance::Quantile(0.5), 1, 100)
            .unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
    }

    #[test]
    fn invalid_configs() {
        let prior = prior_1d();
        let obs = observed(0.4);
        let mut cfg = quantile_config(&[(100, 1.5)], 1);
        assert!(matches!(smc_abc(&prior, &toy, &obs, &cfg).unwrap_err().error, Error::Config(_)));
        cfg = quantile_config(&[], 1);
        assert!(smc_abc(&prior, &toy, &obs, &cfg).is_err());
        cfg = quantile_config(&[(100, 0.1)], 1);
        cfg.summary = SummaryKind::S1;
        assert!(matches!(smc_abc(&prior, &toy, &obs, &cfg).unwrap_err().error, Error::Usage(_)));
        let bad = Schedule::Explicit { particles: 10, thresholds: vec![0.1, 0.2] };
        assert!(bad.validate().is_err());
        assert!(rejection_abc(&prior, &toy, &obs, Metric::Rho1, 100, Acceptance::Threshold(1e-300), 1, u64::MAX)
            .is_err_and(|e| e == Error::EmptyPopulation));
    }

    #[test]
    fn schedule_json() {
        let s: Schedule<f64> =
            serde_json::from_str(r#"{"mode":"quantile","stages":[{"pool":20000,"order":0.025}]}"#).unwrap();
        assert_eq!(s.stages(), 1);
        let e: Schedule<f64> =
            serde_json::from_str(r#"{"mode":"explicit","particles":100,"thresholds":[2.0,1.0]}"#).unwrap();
        assert_eq!(e.stages(), 2);
    }
}
