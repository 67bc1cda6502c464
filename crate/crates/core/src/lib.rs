pub mod error;
mod flow;
pub mod geometry;
pub mod gpe_single;
pub mod gpe_two;
pub mod grid;
pub mod params;
mod quad;
pub mod sharp;
pub mod spin;
pub mod symmetry;
pub mod tf;

pub use error::{Error, Result};
pub use geometry::{Curve, Point};
pub use gpe_single::{check_eta_properties, energy_single, solve_eta, EtaReport, GroundState};
pub use gpe_two::{energy_two, minimize_two, scaled_excess, CondensatePair, InitKind};
pub use grid::{Field, GridSpec};
pub use params::Params;
pub use spin::{decompose, f_energy, from_spin, g_energy, interface_min_v, to_spin, EnergyBreakdown, SpinPair};
