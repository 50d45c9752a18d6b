use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Geometric, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Population sizes saturate here. Trajectories that reach it are far outside
/// anything an observed sample could be compared against, and the cap keeps
/// every count representable in `u64` and every Poisson rate in range.
pub const POPULATION_CAP: u64 = 1 << 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffspringFamily {
    /// `p_k = (1 - θ) θ^k`, power-series parameterization.
    Geometric,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlFamily {
    /// `φ(k) ~ Binomial(ξ(k), γ)`
    Binomial,
    /// `φ(k) ~ Poisson(ξ(k) λ)`
    Poisson,
    /// `φ(k) ~ NegBinomial(ξ(k), ϱ)` counting failures, mean `ξ(k)(1-ϱ)/ϱ`
    #[serde(alias = "negative_binomial")]
    NegBinomial,
}

/// Deterministic pre-control count applied before the random control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SizeMap {
    /// `ξ(k) = k + ⌊ln k⌋`, `ξ(0) = 0`
    #[default]
    XiLog,
    Identity,
}

/// `ξ(k)` for the given size map (natural logarithm).
pub fn xi(k: u64, size_map: SizeMap) -> u64 {
    match size_map {
        SizeMap::Identity => k,
        SizeMap::XiLog if k == 0 => 0,
        SizeMap::XiLog => k + (k as f64).ln().floor() as u64,
    }
}

impl OffspringFamily {
    /// Whether the parameter lives in (0, 1) rather than (0, ∞).
    pub fn is_probability(self) -> bool {
        matches!(self, OffspringFamily::Geometric)
    }
}

impl ControlFamily {
    pub fn is_probability(self) -> bool {
        !matches!(self, ControlFamily::Poisson)
    }
}

fn check_param<T: Real>(what: &str, value: T, probability: bool) -> Result<()> {
    let v = value.as_f64();
    let ok = v.is_finite() && v > 0.0 && (!probability || v < 1.0);
    if ok {
        Ok(())
    } else if probability {
        Err(Error::config(format!("{what} parameter must lie in (0, 1), got {v}")))
    } else {
        Err(Error::config(format!("{what} parameter must be positive, got {v}")))
    }
}

/// Reproduction law of a single individual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffspringLaw<T = f64> {
    family: OffspringFamily,
    param: T,
}

impl<T: Real> OffspringLaw<T> {
    pub fn new(family: OffspringFamily, param: T) -> Result<Self> {
        check_param("offspring", param, family.is_probability())?;
        Ok(Self { family, param })
    }

    pub fn geometric(theta: T) -> Result<Self> {
        Self::new(OffspringFamily::Geometric, theta)
    }

    pub fn poisson(lambda: T) -> Result<Self> {
        Self::new(OffspringFamily::Poisson, lambda)
    }

    pub fn family(&self) -> OffspringFamily {
        self.family
    }

    pub fn param(&self) -> T {
        self.param
    }

    /// Offspring mean `m`.
    pub fn mean(&self) -> T {
        match self.family {
            OffspringFamily::Geometric => self.param / (T::one() - self.param),
            OffspringFamily::Poisson => self.param,
        }
    }

    pub fn variance(&self) -> T {
        match self.family {
            OffspringFamily::Geometric => {
                let q = T::one() - self.param;
                self.param / (q * q)
            }
            OffspringFamily::Poisson => self.param,
        }
    }

    /// One offspring count.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let p = self.param.as_f64();
        match self.family {
            OffspringFamily::Geometric => Geometric::new(1.0 - p).expect("validated").sample(rng),
            OffspringFamily::Poisson => sample_poisson(p, rng),
        }
    }

    /// Total offspring of `progenitors` independent individuals.
    ///
    /// Drawn from the exact law of the sum (negative binomial for geometric
    /// offspring, Poisson for Poisson offspring), saturating at
    /// [`POPULATION_CAP`].
    pub fn sample_total<R: Rng + ?Sized>(&self, progenitors: u64, rng: &mut R) -> u64 {
        if progenitors == 0 {
            return 0;
        }
        let p = self.param.as_f64();
        match self.family {
            OffspringFamily::Geometric => {
                sample_negbin_failures(progenitors as f64, p / (1.0 - p), rng)
            }
            OffspringFamily::Poisson => sample_poisson(progenitors as f64 * p, rng),
        }
    }
}

/// Random control on the number of progenitors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlLaw<T = f64> {
    family: ControlFamily,
    param: T,
    size_map: SizeMap,
}

impl<T: Real> ControlLaw<T> {
    pub fn new(family: ControlFamily, param: T, size_map: SizeMap) -> Result<Self> {
        check_param("control", param, family.is_probability())?;
        Ok(Self {
            family,
            param,
            size_map,
        })
    }

    pub fn binomial(gamma: T, size_map: SizeMap) -> Result<Self> {
        Self::new(ControlFamily::Binomial, gamma, size_map)
    }

    pub fn family(&self) -> ControlFamily {
        self.family
    }

    pub fn param(&self) -> T {
        self.param
    }

    pub fn size_map(&self) -> SizeMap {
        self.size_map
    }

    /// `τ = lim ε(k)/k`.
    pub fn tau(&self) -> T {
        match self.family {
            ControlFamily::Binomial | ControlFamily::Poisson => self.param,
            ControlFamily::NegBinomial => (T::one() - self.param) / self.param,
        }
    }

    /// `ε(k) = E[φ(k)] = τ ξ(k)`.
    pub fn mean(&self, k: u64) -> T {
        self.tau() * T::of(xi(k, self.size_map) as f64)
    }

    pub fn variance(&self, k: u64) -> T {
        let size = T::of(xi(k, self.size_map) as f64);
        let p = self.param;
        match self.family {
            ControlFamily::Binomial => size * p * (T::one() - p),
            ControlFamily::Poisson => size * p,
            ControlFamily::NegBinomial => size * (T::one() - p) / (p * p),
        }
    }

    /// One draw of `φ(k)`; always 0 when `k = 0`.
    pub fn sample<R: Rng + ?Sized>(&self, k: u64, rng: &mut R) -> u64 {
        let size = xi(k, self.size_map);
        if size == 0 {
            return 0;
        }
        let p = self.param.as_f64();
        match self.family {
            ControlFamily::Binomial => Binomial::new(size, p).expect("validated").sample(rng),
            ControlFamily::Poisson => sample_poisson(size as f64 * p, rng),
            ControlFamily::NegBinomial => sample_negbin_failures(size as f64, (1.0 - p) / p, rng),
        }
    }
}

fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda >= POPULATION_CAP as f64 {
        return POPULATION_CAP;
    }
    let draw: f64 = Poisson::new(lambda).expect("finite positive rate").sample(rng);
    (draw as u64).min(POPULATION_CAP)
}

/// Failures before `size` successes, drawn as a gamma-mixed Poisson with
/// gamma scale `odds = (1-p)/p`.
fn sample_negbin_failures<R: Rng + ?Sized>(size: f64, odds: f64, rng: &mut R) -> u64 {
    let rate: f64 = Gamma::new(size, odds).expect("positive shape and scale").sample(rng);
    sample_poisson(rate, rng)
}

/// Closed-form `(m, τ, τ_m)` for a pair of laws.
pub fn mean_growth_rate<T: Real>(offspring: &OffspringLaw<T>, control: &ControlLaw<T>) -> (T, T, T) {
    let m = offspring.mean();
    let tau = control.tau();
    (m, tau, m * tau)
}
