//! Standalone inequality checks and exponential-sum bound sweeps.

mod omega;
mod sweep;
mod theta;

pub use omega::{omega_sum_check, omega_sum_checks, OmegaReport, TAIL_TRUNCATION};
pub use sweep::{parse_range, run_sweep, sweep_moduli, SweepConfig, SweepSummary, SWEEP_COLUMNS};
pub use theta::{theta_integral_check, SandwichReport};
