//! Single-type controlled branching processes: laws, simulation and the
//! exact small-state transition oracle.

mod laws;
mod simulate;
mod transition;

pub use laws::{
    mean_growth_rate, xi, ControlFamily, ControlLaw, OffspringFamily, OffspringLaw, SizeMap,
    POPULATION_CAP,
};
pub use simulate::{simulate_cbp, simulate_nonextinct, Trajectory, DEFAULT_MAX_ATTEMPTS};
pub use transition::{transition_probability, transition_row, MAX_TRANSITION_STATE, TAIL_MASS};
