//! Square functions, weighted operator norms and the named experiments.

pub mod experiments;
pub mod norms;
pub mod square;

pub use experiments::{find_experiment, list_experiments, run_experiment, ExperimentInfo};
pub use norms::{operator_norm_l2w, operator_norm_lpw_lower, NormEstimate};
pub use square::{square_function, testing_function, weighted_square_identity};
