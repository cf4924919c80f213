//! Dataset-level analytics over scored clips.

mod calibrate;
mod correlation;
mod records;
mod stratify;
mod tracking;

pub use calibrate::{calibrate_weights, parse_grid, Calibration, LOW_CONFIDENCE_RHO, MIN_CALIBRATION_ROWS};
pub use correlation::{correlations, kendall_tau_b, pearson, ranks, spearman, CorrelationReport};
pub use records::{exclude_outliers, join_errors, read_error_table, JoinResult, ScoredRecord};
pub use stratify::{dsje, mid, MidResult};
pub use tracking::{mean_position_error_mm, mpjpe_g, mpjpe_l};
