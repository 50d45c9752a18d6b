use rand::Rng;
use serde::{Deserialize, Serialize};

use super::laws::{ControlLaw, OffspringLaw};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Observed sample `Z_0, ..., Z_n` plus the progenitor count `φ_{n-1}(Z_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    z: Vec<u64>,
    last_progenitors: u64,
}

impl Trajectory {
    /// Validates the absorbing-extinction and progenitor invariants.
    pub fn new(z: Vec<u64>, last_progenitors: u64) -> Result<Self> {
        if z.len() < 2 {
            return Err(Error::usage("a trajectory needs at least Z_0 and Z_1"));
        }
        if z[0] == 0 {
            return Err(Error::usage("Z_0 must be positive"));
        }
        if let Some(k) = z.iter().position(|&v| v == 0) {
            if z[k..].iter().any(|&v| v != 0) {
                return Err(Error::usage(format!(
                    "population revived after extinction at generation {k}"
                )));
            }
        }
        if last_progenitors == 0 && *z.last().unwrap() != 0 {
            return Err(Error::usage("zero progenitors but Z_n > 0"));
        }
        Ok(Self { z, last_progenitors })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.z
    }

    pub fn last_progenitors(&self) -> u64 {
        self.last_progenitors
    }

    /// Number of generations `n` after the initial one.
    pub fn generations(&self) -> usize {
        self.z.len() - 1
    }

    pub fn is_extinct(&self) -> bool {
        *self.z.last().unwrap() == 0
    }
}

/// Runs one controlled branching process for `n` generations from `z0`.
///
/// # Panics
/// If `z0 == 0` or `n == 0`.
pub fn simulate_cbp<T: Real, R: Rng + ?Sized>(
    offspring: &OffspringLaw<T>,
    control: &ControlLaw<T>,
    z0: u64,
    n: usize,
    rng: &mut R,
) -> Trajectory {
    assert!(z0 >= 1 && n >= 1, "need z0 >= 1 and n >= 1");
    let mut z = Vec::with_capacity(n + 1);
    z.push(z0);
    let mut current = z0;
    let mut last_progenitors = 0;
    for generation in 0..n {
        let progenitors = if current == 0 { 0 } else { control.sample(current, rng) };
        if generation + 1 == n {
            last_progenitors = progenitors;
        }
        current = offspring.sample_total(progenitors, rng);
        z.push(current);
    }
    Trajectory { z, last_progenitors }
}

/// Repeats [`simulate_cbp`] until `Z_n > 0`.
pub fn simulate_nonextinct<T: Real, R: Rng + ?Sized>(
    offspring: &OffspringLaw<T>,
    control: &ControlLaw<T>,
    z0: u64,
    n: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<Trajectory> {
    if max_attempts == 0 {
        return Err(Error::config("max_attempts must be at least 1"));
    }
    for _ in 0..max_attempts {
        let traj = simulate_cbp(offspring, control, z0, n, rng);
        if !traj.is_extinct() {
            return Ok(traj);
        }
    }
    Err(Error::Budget(format!(
        "no non-extinct trajectory in {max_attempts} attempts"
    )))
}

pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::laws::{ControlFamily, SizeMap};
    use crate::rng::{Domain, SeedTree};

    fn reference_laws() -> (OffspringLaw, ControlLaw) {
        (
            OffspringLaw::geometric(0.6).unwrap(),
            ControlLaw::binomial(0.75, SizeMap::XiLog).unwrap(),
        )
    }

    #[test]
    fn trajectory_invariants_are_checked() {
        assert!(Trajectory::new(vec![1, 0, 2], 0).is_err());
        assert!(Trajectory::new(vec![0, 0], 0).is_err());
        assert!(Trajectory::new(vec![3, 4], 0).is_err());
        assert!(Trajectory::new(vec![3, 0], 0).is_ok());
        assert!(Trajectory::new(vec![3, 4, 5], 2).is_ok());
    }

    #[test]
    fn deterministic_given_stream() {
        let (off, ctl) = reference_laws();
        let seeds = SeedTree::new(5);
        let a = simulate_cbp(&off, &ctl, 1, 30, &mut seeds.stream(Domain::Test, 0, 3));
        let b = simulate_cbp(&off, &ctl, 1, 30, &mut seeds.stream(Domain::Test, 0, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn extinction_is_absorbing() {
        let (off, ctl) = reference_laws();
        let seeds = SeedTree::new(6);
        for i in 0..2000 {
            let t = simulate_cbp(&off, &ctl, 1, 30, &mut seeds.stream(Domain::Test, 0, i));
            Trajectory::new(t.sizes().to_vec(), t.last_progenitors()).unwrap();
        }
    }

    #[test]
    fn zero_control_forces_extinction() {
        // A Poisson control with a vanishing rate gives φ = 0 with overwhelming probability.
        let off = OffspringLaw::geometric(0.6).unwrap();
        let ctl = ControlLaw::new(ControlFamily::Poisson, 1e-300, SizeMap::XiLog).unwrap();
        let mut r = SeedTree::new(7).stream(Domain::Test, 0, 0);
        let t = simulate_cbp(&off, &ctl, 10, 8, &mut r);
        assert!(t.sizes()[1..].iter().all(|&z| z == 0));
        assert_eq!(t.last_progenitors(), 0);
    }

    #[test]
    fn nonextinct_supercritical_survives() {
        let (off, ctl) = reference_laws();
        let mut r = SeedTree::new(8).stream(Domain::Test, 0, 0);
        let t = simulate_nonextinct(&off, &ctl, 1, 30, &mut r, DEFAULT_MAX_ATTEMPTS).unwrap();
        assert!(t.sizes()[30] > 0);
    }

    #[test]
    fn nonextinct_budget_error_when_subcritical() {
        let off = OffspringLaw::geometric(0.05).unwrap();
        let ctl = ControlLaw::binomial(0.05, SizeMap::XiLog).unwrap();
        let mut r = SeedTree::new(9).stream(Domain::Test, 0, 0);
        let err = simulate_nonextinct(&off, &ctl, 1, 30, &mut r, 50).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
        assert!(simulate_nonextinct(&off, &ctl, 1, 30, &mut r, 0).is_err());
    }

    #[test]
    fn survival_frequency_matches_attempt_count() {
        // Mean number of attempts is 1/P(survive); both estimated from the same model.
        let (off, ctl) = reference_laws();
        let seeds = SeedTree::new(10);
        let runs = 20_000u64;
        let survived = (0..runs)
            .filter(|&i| !simulate_cbp(&off, &ctl, 1, 30, &mut seeds.stream(Domain::Test, 0, i)).is_extinct())
            .count() as f64;
        let p = survived / runs as f64;

        let mut attempts = 0u64;
        let reps = 4000u64;
        for i in 0..reps {
            let mut r = seeds.stream(Domain::Test, 1, i);
            loop {
                attempts += 1;
                if !simulate_cbp(&off, &ctl, 1, 30, &mut r).is_extinct() {
                    break;
                }
            }
        }
        let p_from_attempts = reps as f64 / attempts as f64;
        assert!((p - p_from_attempts).abs() < 0.03, "{p} vs {p_from_attempts}");
    }
}
