//! Gap statistics of `sqrt(n) mod 1`, `1 <= n <= N`.

use serde::{Deserialize, Serialize};

use crate::arithmetic::CompensatedSum;
use crate::thresholds::CONSISTENCY_CONSTANT;
use crate::{par, Error, Result};

pub const MAX_N: u64 = 1_000_000_000;

const POINT_CHUNK: usize = 1 << 16;

/// The t-grid of the perfect-square consistency check.
pub const CONSISTENCY_T_MAX: f64 = 10.0;
pub const CONSISTENCY_T_STEP: f64 = 0.05;

/// The sorted multiset `{frac(sqrt n) : 1 <= n <= N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirclePoints {
    n: u64,
    points: Vec<f64>,
}

impl CirclePoints {
    /// Wraps already sorted points in `[0, 1)`.
    pub fn new(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.iter().any(|p| !(0.0..1.0).contains(p)) {
            return Err(Error::invalid("need at least one point, all in [0, 1)"));
        }
        par::sort_floats(&mut points);
        Ok(Self {
            n: points.len() as u64,
            points,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

fn frac_sqrt(n: u64) -> f64 {
    let s = n.isqrt();
    if s * s == n {
        0.0
    } else {
        (n as f64).sqrt() - s as f64
    }
}

pub fn sqrt_fractional_parts(n: u64) -> Result<CirclePoints> {
    if n == 0 || n > MAX_N {
        return Err(Error::invalid(format!("N must be in [1, {MAX_N}], got {n}")));
    }
    let chunks = par::map_chunks(n as usize, POINT_CHUNK, |r| {
        r.map(|i| frac_sqrt(i as u64 + 1)).collect::<Vec<_>>()
    });
    let mut points = chunks.concat();
    par::sort_floats(&mut points);
    Ok(CirclePoints { n, points })
}

/// The `N` circular gaps of a point set, sorted, with prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GapDistribution {
    n: u64,
    gaps: Vec<f64>,
    /// `prefix[k]` = sum of the `k` smallest gaps.
    prefix: Vec<f64>,
}

pub fn gaps_of(pts: &CirclePoints) -> GapDistribution {
    let p = &pts.points;
    let mut gaps: Vec<f64> = p.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.push(1.0 - p[p.len() - 1] + p[0]);
    par::sort_floats(&mut gaps);
    let mut acc = CompensatedSum::default();
    let prefix = std::iter::once(0.0)
        .chain(gaps.iter().map(|&g| {
            acc.add(g);
            acc.value()
        }))
        .collect();
    GapDistribution { n: pts.n, gaps, prefix }
}

impl GapDistribution {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn total(&self) -> f64 {
        self.prefix[self.gaps.len()]
    }

    pub fn max_gap(&self) -> f64 {
        self.gaps[self.gaps.len() - 1]
    }

    /// Number of gaps of length strictly below `len`.
    pub fn count_below(&self, len: f64) -> usize {
        self.gaps.partition_point(|&g| g < len)
    }

    pub fn zero_gaps(&self) -> usize {
        self.count_below(f64::MIN_POSITIVE)
    }

    /// `lambda_N(t)`: the proportion of gaps shorter than `t / N`.
    pub fn lambda(&self, t: f64) -> f64 {
        self.count_below(t / self.n as f64) as f64 / self.n as f64
    }

    /// `sigma_N(t)`: the total length of the gaps shorter than `t / N`.
    pub fn sigma(&self, t: f64) -> f64 {
        self.prefix[self.count_below(t / self.n as f64)]
    }
}

pub fn lambda_n(d: &GapDistribution, t: f64) -> f64 {
    d.lambda(t)
}

pub fn sigma_n(d: &GapDistribution, t: f64) -> f64 {
    d.sigma(t)
}

/// `0, step, 2 step, ...` up to `t_max` inclusive (with a half-step tolerance).
pub fn t_grid(t_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::invalid("need t_max >= 0 and step > 0"));
    }
    let k = (t_max / step + 0.5).floor() as usize;
    Ok((0..=k).map(|i| i as f64 * step).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub n: u64,
    pub s: u64,
    pub max_deviation: f64,
    pub argmax_t: f64,
    /// `CONSISTENCY_CONSTANT / sqrt(N)`.
    pub target: f64,
    pub within_target: bool,
}

/// `sup_t |lambda_N(t) - (s^2/N) lambda_{s^2}(t s^2 / N)|` over the grid, `s = isqrt(N)`.
pub fn perfect_square_consistency(n: u64) -> Result<ConsistencyReport> {
    if n < 4 {
        return Err(Error::invalid(format!("N must be at least 4, got {n}")));
    }
    let s = n.isqrt();
    let full = gaps_of(&sqrt_fractional_parts(n)?);
    let square = if s * s == n {
        full.clone()
    } else {
        gaps_of(&sqrt_fractional_parts(s * s)?)
    };
    // (s^2/N) lambda_{s^2}(t s^2/N) = #{square gaps < t/N} / N, so both sides share
    // the denominator N and the deviation is a difference of integer counts.
    let mut best = (0u64, 0.0);
    for t in t_grid(CONSISTENCY_T_MAX, CONSISTENCY_T_STEP)? {
        let len = t / n as f64;
        let diff = full.count_below(len).abs_diff(square.count_below(len)) as u64;
        if diff > best.0 {
            best = (diff, t);
        }
    }
    let max_deviation = best.0 as f64 / n as f64;
    let target = CONSISTENCY_CONSTANT / (n as f64).sqrt();
    Ok(ConsistencyReport {
        n,
        s,
        max_deviation,
        argmax_t: best.1,
        target,
        within_target: max_deviation <= target,
    })
}
