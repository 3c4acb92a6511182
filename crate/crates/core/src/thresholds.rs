//! Harness calibration constants. None of these are theorem constants; each
//! is an empirical bound chosen from development sweeps, and every check that
//! uses one reports the measured value next to it.

/// Default `C_expo`: ratio ceiling for the `<<` exponential-sum bounds.
/// Sweeps over `c <= 2000` (50 draws per modulus) peak at 2, attained at `c = 1`.
pub const C_EXPO: f64 = 64.0;

/// Default stand-in for the per-prime constant `K`.
pub const K_EMP: f64 = 16.0;

/// The sandwich ratio is required to lie in this interval.
pub const SANDWICH_RATIO_RANGE: (f64, f64) = (0.5, 8.0);

/// Looser interval recorded on every sandwich report.
pub const SANDWICH_REPORT_RANGE: (f64, f64) = (0.1, 10.0);

/// Ceiling for the `3^omega` partial-sum ratios (observed maxima below 2).
pub const OMEGA_RATIO_MAX: f64 = 50.0;

/// `C` in the perfect-square target `C / sqrt(N)` (observed deviations below 3 / sqrt(N)).
pub const CONSISTENCY_CONSTANT: f64 = 10.0;

/// Ceiling for `t^2` times the finite-difference slope of `sigma_inf` on `[2, 6]`.
pub const SHAPE_SLOPE_CONSTANT: f64 = 10.0;

/// Ceiling for the Haar-lattice avoidance and pair-hit witnesses.
pub const LATTICE_WITNESS_CONSTANT: f64 = 10.0;

/// Second-half over first-half ratio maxima allowed in the `c`-sweeps.
pub const SWEEP_STABILITY_FACTOR: f64 = 2.0;

/// Largest allowed sup-difference between `lambda_N` at `N = 10^6` and the Monte Carlo limit.
pub const LIMIT_AGREEMENT: f64 = 0.01;
