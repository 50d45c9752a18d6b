//! Reference observations used by the examples and the acceptance suite.

use crate::branching::Trajectory;
use crate::multitype::TwoTypeTreeSummary;

/// `Z_0..Z_30` of a geometric(θ = 0.6), binomial(γ = 0.75) process on
/// `k + ⌊ln k⌋`, started from one individual.
pub const REFERENCE_Z: [u64; 31] = [
    1, 4, 6, 4, 11, 6, 9, 19, 26, 14, 10, 11, 9, 12, 14, 15, 9, 3, 6, 13, 17, 23, 35, 58, 75, 73,
    103, 107, 141, 166, 216,
];

/// `φ_29(Z_29)` of the reference trajectory.
pub const REFERENCE_LAST_PROGENITORS: u64 = 131;

/// Parameters that generated the reference trajectory.
pub const REFERENCE_THETA: f64 = 0.6;
pub const REFERENCE_GAMMA: f64 = 0.75;

pub fn reference_trajectory() -> Trajectory {
    Trajectory::new(REFERENCE_Z.to_vec(), REFERENCE_LAST_PROGENITORS).expect("valid trajectory")
}

/// Observed cell-lineage tree: 30 founders followed for 5 generations.
pub const REFERENCE_TREE: TwoTypeTreeSummary = TwoTypeTreeSummary {
    n: 5,
    n0: 30,
    y1: 276,
    delta: 269,
    y0: 37,
    y2: 133,
    psi: 99,
};
