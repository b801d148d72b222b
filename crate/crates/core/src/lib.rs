//! Transition probabilities, field correlations and harvested mutual information
//! for two Unruh-DeWitt detectors on coaxial circular orbits next to a perfectly
//! reflecting plane. Lengths and times are in units of the switching width, and
//! probabilities in units of the squared coupling.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlation;
pub mod error;
pub mod infomeasure;
pub mod kinematics;
pub mod numerics;
pub mod response;
pub mod sweep;
pub mod wightman;

pub use error::{Error, Result};
pub use kinematics::{omega_from_accel_radius, trajectory_point, CircularDetector, SpacetimePoint};
pub use numerics::{Extrapolated, QuadratureResult};
pub use response::{
    solve_pole_s, transition_probability, transition_probability_free,
    transition_probability_oracle, ResponseBreakdown,
};
pub use correlation::{
    correlation, correlation_equal, correlation_equal_regularized, correlation_general,
    correlation_s_only, CorrelationResult,
    PairConfig,
};
pub use infomeasure::{
    assemble_density_block, mutual_information, mutual_information_point, DensityBlock,
    HarvestPoint, MIResult,
};
pub use sweep::{run_oracle_suite, run_sweep, run_sweep_with_workers, SweepRow, SweepSpec};
