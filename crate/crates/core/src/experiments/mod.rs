//! Monte Carlo estimation, preset sweeps and CSV output.

mod io;
mod metrics;
mod sweep;

pub use io::{read_csv, read_rows, sig9, write_csv, write_rows};
pub use metrics::{estimate_metrics, Estimate, MetricsRow, CSV_COLUMNS};
pub use sweep::{
    run_sweep, SweepKind, SweepPlan, KAPPA_GRID, NTR_GRID, SE_EVAL_POINTS, SE_GRID, TSW_GRID,
};
