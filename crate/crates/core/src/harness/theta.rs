use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quadrature::integrate;
use crate::thresholds::SANDWICH_REPORT_RANGE;
use crate::{Error, Result};

const REL_TOL: f64 = 1e-6;
const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub a: f64,
    pub integral: f64,
    pub error_estimate: f64,
    /// `1 / (a (1 + a))`.
    pub reference: f64,
    pub ratio: f64,
    /// Whether the ratio lies in the recorded reporting interval.
    pub within_report_range: bool,
}

/// `int_{-pi}^{pi} min(1, (|sin t| / a)^2) dt / sin^2 t` compared with `1 / (a (1 + a))`.
pub fn theta_integral_check(a: f64) -> Result<SandwichReport> {
    if !(1e-4..=1e4).contains(&a) {
        return Err(Error::invalid(format!("a must lie in [1e-4, 1e4], got {a}")));
    }
    let inv_a2 = 1.0 / (a * a);
    let integrand = |t: f64| {
        let s = t.sin();
        // The minimum picks (sin t / a)^2 exactly when |sin t| < a.
        if s.abs() < a {
            inv_a2
        } else {
            1.0 / (s * s)
        }
    };
    // Split where the two branches meet, so every piece is smooth.
    let mut cuts = vec![-PI, PI];
    if a < 1.0 {
        let t0 = a.asin();
        cuts.extend([-PI + t0, -t0, t0, PI - t0]);
    }
    cuts.sort_by(f64::total_cmp);
    let (mut integral, mut error_estimate) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let q = integrate(integrand, w[0], w[1], REL_TOL, 0.0, MAX_INTERVALS)?;
        integral += q.value;
        error_estimate += q.error_estimate;
    }
    let reference = 1.0 / (a * (1.0 + a));
    let ratio = integral / reference;
    Ok(SandwichReport {
        a,
        integral,
        error_estimate,
        reference,
        ratio,
        within_report_range: (SANDWICH_REPORT_RANGE.0..=SANDWICH_REPORT_RANGE.1).contains(&ratio),
    })
}
