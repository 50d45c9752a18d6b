//! Single-type controlled branching process as an ABC simulator plug-in.

use serde::{Deserialize, Serialize};

use crate::abc::{Prior, PriorComponent, Rejection, Simulator};
use crate::branching::{
    mean_growth_rate, simulate_cbp, ControlFamily, ControlLaw, OffspringFamily, OffspringLaw,
    SizeMap, POPULATION_CAP,
};
use crate::error::{Error, Result};
use crate::rng::Stream;
use crate::scalar::Real;
use crate::summary::{summarize, SummaryKind, SummaryVector};

fn one() -> u64 {
    1
}

/// Parameter vector layout: `[offspring parameter, control parameter]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CbpModel {
    pub offspring: OffspringFamily,
    pub control: ControlFamily,
    #[serde(default)]
    pub size_map: SizeMap,
    pub z0: u64,
    pub generations: usize,
    /// Simulations tried per call before reporting extinction.
    #[serde(default = "one")]
    pub extinction_retries: u64,
}

impl CbpModel {
    pub fn new(
        offspring: OffspringFamily,
        control: ControlFamily,
        size_map: SizeMap,
        z0: u64,
        generations: usize,
    ) -> Result<Self> {
        let m = Self {
            offspring,
            control,
            size_map,
            z0,
            generations,
            extinction_retries: 1,
        };
        m.validate()?;
        Ok(m)
    }

    /// Geometric offspring, binomial control on `k + ⌊ln k⌋`.
    pub fn reference(z0: u64, generations: usize) -> Self {
        Self::new(
            OffspringFamily::Geometric,
            ControlFamily::Binomial,
            SizeMap::XiLog,
            z0,
            generations,
        )
        .expect("valid reference model")
    }

    pub fn validate(&self) -> Result<()> {
        if self.z0 == 0 {
            return Err(Error::config("z0 must be positive"));
        }
        if self.generations == 0 {
            return Err(Error::config("generations must be positive"));
        }
        if self.extinction_retries == 0 {
            return Err(Error::config("extinction_retries must be positive"));
        }
        Ok(())
    }

    pub fn param_names(&self) -> [&'static str; 2] {
        let off = match self.offspring {
            OffspringFamily::Geometric => "theta",
            OffspringFamily::Poisson => "lambda",
        };
        let ctl = match self.control {
            ControlFamily::Binomial => "gamma",
            ControlFamily::Poisson => "lambda_ctl",
            ControlFamily::NegBinomial => "rho",
        };
        [off, ctl]
    }

    /// Beta(½, ½) on probability parameters, Uniform(0, 20) on rates.
    pub fn default_prior<T: Real>(&self) -> Prior<T> {
        let [a, b] = self.param_names();
        let block = |name: &str, prob: bool| {
            if prob {
                PriorComponent::beta(name, T::of(0.5), T::of(0.5))
            } else {
                PriorComponent::uniform(name, T::zero(), T::of(20.0))
            }
        };
        Prior::new(vec![
            block(a, self.offspring.is_probability()),
            block(b, self.control.is_probability()),
        ])
        .expect("valid default prior")
    }

    pub fn laws<T: Real>(&self, params: &[T]) -> Result<(OffspringLaw<T>, ControlLaw<T>)> {
        if params.len() != 2 {
            return Err(Error::usage(format!("expected 2 parameters, got {}", params.len())));
        }
        Ok((
            OffspringLaw::new(self.offspring, params[0])?,
            ControlLaw::new(self.control, params[1], self.size_map)?,
        ))
    }

    /// `(m, τ, τ_m)` at a parameter point. Unlike [`CbpModel::laws`] this
    /// accepts the closure of the parameter space (regression-adjusted
    /// particles may sit on it) and fails only on non-finite results.
    pub fn growth<T: Real>(&self, params: &[T]) -> Result<(T, T, T)> {
        if let Ok((off, ctl)) = self.laws(params) {
            return Ok(mean_growth_rate(&off, &ctl));
        }
        let (a, b) = (params[0], params[1]);
        let m = match self.offspring {
            OffspringFamily::Geometric => a / (T::one() - a),
            OffspringFamily::Poisson => a,
        };
        let tau = match self.control {
            ControlFamily::Binomial | ControlFamily::Poisson => b,
            ControlFamily::NegBinomial => (T::one() - b) / b,
        };
        let out = (m, tau, m * tau);
        if [out.0, out.1, out.2].iter().any(|v| !v.is_finite() || *v < T::zero()) {
            return Err(Error::Numeric(format!("growth rates undefined at {params:?}")));
        }
        Ok(out)
    }
}

impl<T: Real> Simulator<T> for CbpModel {
    fn simulate(
        &self,
        params: &[T],
        kind: SummaryKind,
        rng: &mut Stream,
    ) -> std::result::Result<SummaryVector<T>, Rejection> {
        if !kind.is_single_type() {
            return Err(Rejection::Degenerate);
        }
        let (off, ctl) = self.laws(params).map_err(|_| Rejection::Degenerate)?;
        for _ in 0..self.extinction_retries {
            let traj = simulate_cbp(&off, &ctl, self.z0, self.generations, rng);
            if traj.is_extinct() {
                continue;
            }
            if traj.sizes().iter().any(|&z| z >= POPULATION_CAP) {
                return Err(Rejection::Degenerate);
            }
            return summarize(&traj, kind).map_err(|_| Rejection::Degenerate);
        }
        Err(Rejection::Extinct)
    }
}
