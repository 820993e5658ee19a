//! Random-walk simulation and exact checks of the walk identities and bounds.

pub mod diagnose;
pub mod duality;
pub mod green;
pub mod mixing;
pub mod sim;

pub use diagnose::{diagnose, DiagnoseConfig, DiagnoseReport, IdentityResult};
pub use duality::{
    carne_check, chebyshev_matrix, chebyshev_scalar, hoeffding_check, rw_step_distribution,
    verify_duality, BoundSweep,
};
pub use green::{green_return_identity, killed_green, last_exit_identity, KilledGreen};
pub use mixing::{walk_statistics, BoundCheck, WalkStatistics};
pub use sim::{
    discrepancy_probability, simulate_mrp, simulate_walk, Estimate, IncrementLaw, MrpConfig,
    MrpPath, WalkPath,
};
