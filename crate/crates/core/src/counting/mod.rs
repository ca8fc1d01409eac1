//! Binary-tree continual counting and the continual `n`-column histogram.

mod calibrate;
mod histogram;
mod tree;

pub use calibrate::{
    approx_constant, calibrated_bound, calibrated_bound_with, compute_error_bound,
    compute_error_bound_model, unit_noise_maxima, BoundModel, BoundRequest, CALIBRATION_PATHS,
    CALIBRATION_SEED,
};
pub use histogram::{histogram_step, HistogramMechanism};
pub use tree::{counter_step, node_partial_sums, TreeCounter};
