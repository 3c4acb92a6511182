use serde::{Deserialize, Serialize};

use crate::arithmetic::partial_sums_3omega;
use crate::{Error, Result};

/// Upper end of the explicitly summed tail.
pub const TAIL_TRUNCATION: u64 = 100_000_000;

const X_MAX: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaReport {
    pub x: u64,
    /// `sum_{c <= x} 3^omega(c) / sqrt(c)`.
    pub head_sum: f64,
    /// `head_sum / (sqrt(x) log^2(2 + x))`.
    pub head_ratio: f64,
    /// `sum_{c <= x} 3^omega(c)`.
    pub count_sum: f64,
    /// `count_sum / (x log^2 x)`, undefined for `x < 2`.
    pub count_ratio: Option<f64>,
    /// `sum_{c > x} 3^omega(c) / c^{3/2}`, including the estimated part beyond the truncation.
    pub tail_sum: f64,
    /// `tail_sum / (log^2(2 + x) / sqrt(x))`.
    pub tail_ratio: f64,
    /// Estimated contribution of `c > TAIL_TRUNCATION`, already included in `tail_sum`.
    pub tail_truncation: f64,
}

impl OmegaReport {
    /// Largest of the reported ratios.
    pub fn max_ratio(&self) -> f64 {
        self.head_ratio.max(self.tail_ratio).max(self.count_ratio.unwrap_or(0.0))
    }
}

/// Single-point form of [`omega_sum_checks`].
pub fn omega_sum_check(x: u64) -> Result<OmegaReport> {
    Ok(omega_sum_checks(&[x])?[0])
}

/// Partial sums of `3^omega(c) c^{-gamma}` for `gamma` in `{0, 1/2, 3/2}` compared
/// with their expected orders at every `x`.
///
/// The tail beyond [`TAIL_TRUNCATION`] is extrapolated geometrically from the
/// last two decades: with `D_k` the sum over `(10^{k-1}, 10^k]`, the remainder is
/// taken as `D_8 r / (1 - r)` where `r = D_8 / D_7`.
pub fn omega_sum_checks(xs: &[u64]) -> Result<Vec<OmegaReport>> {
    if let Some(&x) = xs.iter().find(|&&x| x == 0 || x > X_MAX) {
        return Err(Error::invalid(format!("x must lie in [1, 1e7], got {x}")));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() {
        return Ok(Vec::new());
    }
    let heads = partial_sums_3omega(&sorted, 0.5)?;
    let counts = partial_sums_3omega(&sorted, 0.0)?;

    let decades = [TAIL_TRUNCATION / 100, TAIL_TRUNCATION / 10, TAIL_TRUNCATION];
    let mut tail_points = sorted.clone();
    tail_points.extend(decades);
    tail_points.sort_unstable();
    tail_points.dedup();
    let tails = partial_sums_3omega(&tail_points, 1.5)?;
    let at = |x: u64| tails[tail_points.binary_search(&x).expect("checkpoint")];
    let (s6, s7, s8) = (at(decades[0]), at(decades[1]), at(decades[2]));
    let r = (s8 - s7) / (s7 - s6);
    let truncation = (s8 - s7) * r / (1.0 - r);
    let total = s8 + truncation;

    let report = |i: usize| {
        let x = sorted[i];
        let xf = x as f64;
        let l2 = (2.0 + xf).ln().powi(2);
        let tail_sum = total - at(x);
        OmegaReport {
            x,
            head_sum: heads[i],
            head_ratio: heads[i] / (xf.sqrt() * l2),
            count_sum: counts[i],
            count_ratio: (x >= 2).then(|| counts[i] / (xf * xf.ln().powi(2))),
            tail_sum,
            tail_ratio: tail_sum / (l2 / xf.sqrt()),
            tail_truncation: truncation,
        }
    };
    Ok(xs
        .iter()
        .map(|x| report(sorted.binary_search(x).expect("present")))
        .collect())
}
