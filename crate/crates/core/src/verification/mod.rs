//! Manufactured solutions, error norms, convergence sweeps, energy traces
//! and post-processed flow fields.

mod energy;
mod filtration;
mod manufactured;
mod norms;
mod sweep;

pub use energy::{energy_trace, EnergyNorms, EnergyRow, EnergyTrace};
pub use filtration::{filtration_field, relative_flow_difference, FiltrationField};
pub use manufactured::{CaseKind, ExactFields, Jet, Manufactured, Profile, ZeroFields};
pub use norms::{compute_errors, FieldErrors};
pub use sweep::{
    convergence_sweep, log_linear_fit, observed_rates, solve_level, voronoi_levels, ErrorReport, ErrorRow, Level,
    SweepConfig, SweepKind,
};
