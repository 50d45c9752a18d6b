//! Exact one-step transition probabilities for small states.
//!
//! `P[Z_l = j | Z_{l-1} = i] = Σ_k q_k(i) p^{*k}(j)` with `p^{*0} = δ_0`.
//! Mass functions come from `statrs`, not from the samplers in
//! [`super::laws`], so this stays an independent check on the simulator.

use statrs::distribution::{Binomial, Discrete, NegativeBinomial, Poisson};

use super::laws::{xi, ControlFamily, ControlLaw, OffspringFamily, OffspringLaw};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest `z_from` / `z_to` accepted.
pub const MAX_TRANSITION_STATE: u64 = 256;

/// Control mass beyond the truncation point is below this.
pub const TAIL_MASS: f64 = 1e-12;

fn offspring_pmf<T: Real>(law: &OffspringLaw<T>, upto: usize) -> Vec<f64> {
    let p = law.param().as_f64();
    match law.family() {
        OffspringFamily::Geometric => (0..=upto).map(|k| (1.0 - p) * p.powi(k as i32)).collect(),
        OffspringFamily::Poisson => {
            let d = Poisson::new(p).expect("validated rate");
            (0..=upto).map(|k| d.pmf(k as u64)).collect()
        }
    }
}

/// `q_j(k)` for `j = 0..J`, truncated once the remaining mass is below [`TAIL_MASS`].
fn control_pmf<T: Real>(law: &ControlLaw<T>, k: u64) -> Vec<f64> {
    let size = xi(k, law.size_map());
    if size == 0 {
        return vec![1.0];
    }
    let p = law.param().as_f64();
    let pmf: Box<dyn Fn(u64) -> f64> = match law.family() {
        ControlFamily::Binomial => {
            let d = Binomial::new(p, size).expect("validated");
            return (0..=size).map(|j| d.pmf(j)).collect();
        }
        ControlFamily::Poisson => {
            let d = Poisson::new(size as f64 * p).expect("validated");
            Box::new(move |j| d.pmf(j))
        }
        ControlFamily::NegBinomial => {
            let d = NegativeBinomial::new(size as f64, p).expect("validated");
            Box::new(move |j| d.pmf(j))
        }
    };
    let mean = law.mean(k).as_f64();
    let mut out = Vec::new();
    let mut acc = 0.0;
    let mut j = 0u64;
    while acc < 1.0 - TAIL_MASS || (j as f64) < mean {
        let q = pmf(j);
        acc += q;
        out.push(q);
        j += 1;
        if j > 100_000 {
            break;
        }
    }
    out
}

/// Exact `P[Z_l = z_to | Z_{l-1} = z_from]`.
pub fn transition_probability<T: Real>(
    offspring: &OffspringLaw<T>,
    control: &ControlLaw<T>,
    z_from: u64,
    z_to: u64,
) -> Result<f64> {
    for state in [z_from, z_to] {
        if state > MAX_TRANSITION_STATE {
            return Err(Error::UnsupportedSize {
                state,
                bound: MAX_TRANSITION_STATE,
            });
        }
    }
    if z_from == 0 {
        return Ok(if z_to == 0 { 1.0 } else { 0.0 });
    }
    let target = z_to as usize;
    let p = offspring_pmf(offspring, target);
    let q = control_pmf(control, z_from);

    // conv holds p^{*j}(0..=target)
    let mut conv = vec![0.0; target + 1];
    conv[0] = 1.0;
    let mut total = 0.0;
    for (j, &qj) in q.iter().enumerate() {
        if j > 0 {
            let mut next = vec![0.0; target + 1];
            for (s, slot) in next.iter_mut().enumerate() {
                *slot = (0..=s).map(|i| conv[i] * p[s - i]).sum();
            }
            conv = next;
        }
        total += qj * conv[target];
    }
    Ok(total)
}

/// `[P(0), ..., P(z_max)]` for a fixed starting state.
pub fn transition_row<T: Real>(
    offspring: &OffspringLaw<T>,
    control: &ControlLaw<T>,
    z_from: u64,
    z_max: u64,
) -> Result<Vec<f64>> {
    (0..=z_max)
        .map(|j| transition_probability(offspring, control, z_from, j))
        .collect()
}
