//! Sharp-interface side: cell constant, limiting energy, recovery pairs,
//! interface extraction, and the convergence trend.

pub mod cell;
pub mod contour;
pub mod interface;
pub mod recovery;
pub mod trend;

pub use cell::{cell_oracle, cell_oracle_with, sigma_eff, CellFunctional, CellProblemResult, GROUPED_SIGMA, SPLIT_SIGMA};
pub use contour::extract_interface;
pub use interface::{limit_energy, InterfaceSpec};
pub use recovery::{build_recovery, default_t, transect_energy, ProfileSpec, Recovery};
pub use trend::{gamma_trend, trend_point, TrendMode, TrendOptions, TrendRow, TREND_HEADER};
