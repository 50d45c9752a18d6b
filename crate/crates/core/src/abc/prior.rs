use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Uniform};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One independent block of the prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorComponent<T = f64> {
    Beta { name: String, a: T, b: T },
    Uniform { name: String, lo: T, hi: T },
    Gamma { name: String, shape: T, rate: T },
    /// Dirichlet over `alpha.len()` weights; only the first `alpha.len() - 1`
    /// coordinates are parameters, the last is implied by the simplex.
    Dirichlet { names: Vec<String>, alpha: Vec<T> },
}

impl<T: Real> PriorComponent<T> {
    pub fn beta(name: &str, a: T, b: T) -> Self {
        PriorComponent::Beta { name: name.into(), a, b }
    }

    pub fn uniform(name: &str, lo: T, hi: T) -> Self {
        PriorComponent::Uniform { name: name.into(), lo, hi }
    }

    pub fn dirichlet(names: &[&str], alpha: Vec<T>) -> Self {
        PriorComponent::Dirichlet {
            names: names.iter().map(|s| s.to_string()).collect(),
            alpha,
        }
    }

    fn dim(&self) -> usize {
        match self {
            PriorComponent::Dirichlet { names, .. } => names.len(),
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let positive = |what: &str, v: T| {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(Error::config(format!("prior {what} must be positive, got {v}")))
            }
        };
        match self {
            PriorComponent::Beta { a, b, .. } => {
                positive("beta shape", *a)?;
                positive("beta shape", *b)
            }
            PriorComponent::Gamma { shape, rate, .. } => {
                positive("gamma shape", *shape)?;
                positive("gamma rate", *rate)
            }
            PriorComponent::Uniform { lo, hi, .. } => {
                if lo.is_finite() && hi.is_finite() && lo < hi {
                    Ok(())
                } else {
                    Err(Error::config(format!("uniform prior needs lo < hi, got [{lo}, {hi}]")))
                }
            }
            PriorComponent::Dirichlet { names, alpha } => {
                if alpha.len() < 2 || names.len() + 1 != alpha.len() {
                    return Err(Error::config(format!(
                        "dirichlet prior with {} weights needs {} parameter names, got {}",
                        alpha.len(),
                        alpha.len().saturating_sub(1),
                        names.len()
                    )));
                }
                alpha.iter().try_for_each(|&a| positive("dirichlet weight", a))
            }
        }
    }

    fn log_density(&self, x: &[T]) -> f64 {
        match self {
            PriorComponent::Beta { a, b, .. } => {
                let (a, b, v) = (a.as_f64(), b.as_f64(), x[0].as_f64());
                if !(v > 0.0 && v < 1.0) {
                    return f64::NEG_INFINITY;
                }
                (a - 1.0) * v.ln() + (b - 1.0) * (1.0 - v).ln() - ln_beta(a, b)
            }
            PriorComponent::Uniform { lo, hi, .. } => {
                let v = x[0];
                if v > *lo && v < *hi {
                    -(*hi - *lo).as_f64().ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            PriorComponent::Gamma { shape, rate, .. } => {
                let (k, r, v) = (shape.as_f64(), rate.as_f64(), x[0].as_f64());
                if !(v > 0.0) {
                    return f64::NEG_INFINITY;
                }
                k * r.ln() - ln_gamma(k) + (k - 1.0) * v.ln() - r * v
            }
            PriorComponent::Dirichlet { alpha, .. } => {
                let free: Vec<f64> = x.iter().map(|v| v.as_f64()).collect();
                let last = 1.0 - free.iter().sum::<f64>();
                if free.iter().any(|&v| !(v > 0.0)) || !(last > 0.0) {
                    return f64::NEG_INFINITY;
                }
                let alpha: Vec<f64> = alpha.iter().map(|a| a.as_f64()).collect();
                let norm = ln_gamma(alpha.iter().sum()) - alpha.iter().map(|&a| ln_gamma(a)).sum::<f64>();
                norm + free
                    .iter()
                    .chain(std::iter::once(&last))
                    .zip(&alpha)
                    .map(|(&v, &a)| (a - 1.0) * v.ln())
                    .sum::<f64>()
            }
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<T>) {
        match self {
            PriorComponent::Beta { a, b, .. } => {
                let d = Beta::new(a.as_f64(), b.as_f64()).expect("validated");
                // Beta draws can round to exactly 0 or 1 for small shapes; resample.
                loop {
                    let v: f64 = d.sample(rng);
                    if v > 0.0 && v < 1.0 && T::of(v) > T::zero() && T::of(v) < T::one() {
                        out.push(T::of(v));
                        break;
                    }
                }
            }
            PriorComponent::Uniform { lo, hi, .. } => {
                let d = Uniform::new(lo.as_f64(), hi.as_f64()).expect("validated");
                loop {
                    let v = T::of(d.sample(rng));
                    if v > *lo && v < *hi {
                        out.push(v);
                        break;
                    }
                }
            }
            PriorComponent::Gamma { shape, rate, .. } => {
                let d = Gamma::new(shape.as_f64(), 1.0 / rate.as_f64()).expect("validated");
                loop {
                    let v: f64 = d.sample(rng);
                    if v > 0.0 {
                        out.push(T::of(v));
                        break;
                    }
                }
            }
            PriorComponent::Dirichlet { alpha, .. } => loop {
                let g: Vec<f64> = alpha
                    .iter()
                    .map(|a| Gamma::new(a.as_f64(), 1.0).expect("validated").sample(rng))
                    .collect();
                let total: f64 = g.iter().sum();
                let free: Vec<T> = g[..g.len() - 1].iter().map(|v| T::of(v / total)).collect();
                if total > 0.0 && self.log_density(&free).is_finite() {
                    out.extend(free);
                    break;
                }
            },
        }
    }

    fn clamp(&self, x: &mut [T]) {
        match self {
            PriorComponent::Beta { .. } => x[0] = x[0].max(T::zero()).min(T::one()),
            PriorComponent::Uniform { lo, hi, .. } => x[0] = x[0].max(*lo).min(*hi),
            PriorComponent::Gamma { .. } => x[0] = x[0].max(T::zero()),
            PriorComponent::Dirichlet { .. } => {
                for v in x.iter_mut() {
                    *v = v.max(T::zero());
                }
                let total: T = x.iter().copied().sum();
                if total > T::one() {
                    for v in x.iter_mut() {
                        *v = *v / total;
                    }
                }
            }
        }
    }
}

impl<T: Real> TryFrom<Vec<PriorComponent<T>>> for Prior<T> {
    type Error = Error;

    fn try_from(components: Vec<PriorComponent<T>>) -> Result<Self> {
        Prior::new(components)
    }
}

impl<T> From<Prior<T>> for Vec<PriorComponent<T>> {
    fn from(p: Prior<T>) -> Self {
        p.components
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Product of independent prior blocks over a flat parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<PriorComponent<T>>",
    into = "Vec<PriorComponent<T>>",
    bound(
        serialize = "T: Real + Serialize",
        deserialize = "T: Real + Deserialize<'de>"
    )
)]
pub struct Prior<T = f64> {
    components: Vec<PriorComponent<T>>,
}

impl<T: Real> Prior<T> {
    pub fn new(components: Vec<PriorComponent<T>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::config("prior needs at least one component"));
        }
        let dirichlets = components
            .iter()
            .filter(|c| matches!(c, PriorComponent::Dirichlet { .. }))
            .count();
        if dirichlets > 1 {
            return Err(Error::config("at most one dirichlet block is supported"));
        }
        components.iter().try_for_each(PriorComponent::validate)?;
        let prior = Self { components };
        let mut names = prior.names();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::config("prior parameter names must be unique"));
        }
        Ok(prior)
    }

    pub fn components(&self) -> &[PriorComponent<T>] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(PriorComponent::dim).sum()
    }

    pub fn names(&self) -> Vec<String> {
        self.components
            .iter()
            .flat_map(|c| match c {
                PriorComponent::Beta { name, .. }
                | PriorComponent::Uniform { name, .. }
                | PriorComponent::Gamma { name, .. } => vec![name.clone()],
                PriorComponent::Dirichlet { names, .. } => names.clone(),
            })
            .collect()
    }

    fn blocks<'a>(&'a self, x: &'a [T]) -> impl Iterator<Item = (&'a PriorComponent<T>, &'a [T])> {
        let mut offset = 0;
        self.components.iter().map(move |c| {
            let d = c.dim();
            let block = &x[offset..offset + d];
            offset += d;
            (c, block)
        })
    }

    /// Log density; `-inf` outside the support.
    pub fn log_density(&self, x: &[T]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        self.blocks(x).map(|(c, b)| c.log_density(b)).sum()
    }

    pub fn density(&self, x: &[T]) -> T {
        T::of(self.log_density(x).exp())
    }

    pub fn in_support(&self, x: &[T]) -> bool {
        x.len() == self.dim() && self.log_density(x) > f64::NEG_INFINITY
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        let mut out = Vec::with_capacity(self.dim());
        for c in &self.components {
            c.sample(rng, &mut out);
        }
        out
    }

    /// Projects a parameter vector onto the closure of the support.
    pub fn clamp(&self, x: &mut [T]) {
        let mut offset = 0;
        for c in &self.components {
            let d = c.dim();
            c.clamp(&mut x[offset..offset + d]);
            offset += d;
        }
    }
}
