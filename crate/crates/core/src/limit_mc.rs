//! Estimates of the limit laws `sigma_inf`, `lambda_inf` and of the
//! horocycle averages `mu_y`, plus power-law rate fitting.

use serde::{Deserialize, Serialize};

use crate::arithmetic::CompensatedSum;
use crate::lattice::{haar_sample_counted, horocycle_point, l_value, point_count_in_box, LValue};
use crate::par::{self, stream_rng, SAMPLE_BLOCK};
use crate::{Error, Result};

pub const DEFAULT_CLIP_FLOOR: f64 = 1e-4;

const QUADRATURE_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub t: f64,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clip_floor: Option<f64>,
    /// Fraction of all samples whose `1/L` was clipped and counted at this `t`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clipped_fraction: Option<f64>,
}

fn check_grid(t_grid: &[f64], cap: f64) -> Result<()> {
    if t_grid.iter().any(|t| !(*t >= 0.0) || *t > cap) {
        return Err(Error::invalid(format!("t-grid must lie in [0, cap = {cap}]")));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("t-grid must be ascending"));
    }
    Ok(())
}

/// Mean and standard error from `sum w` and `sum w^2` over `n` samples.
fn mean_stderr(sum: f64, sum_sq: f64, n: u64) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Sorted `L` values of a seeded Haar sample, certified up to `cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct LSamples {
    /// Ascending; `L > cap` is stored as `+inf`.
    keys: Vec<f64>,
    seed: u64,
    cap: f64,
    proposals: u64,
}

impl LSamples {
    /// Draws `samples` points in blocks of [`SAMPLE_BLOCK`], block `b` from
    /// stream `b` of `seed`, so the sample set is independent of threading.
    pub fn draw(samples: u64, seed: u64, cap: f64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::invalid("need at least one sample"));
        }
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(Error::invalid(format!("cap must be positive, got {cap}")));
        }
        let blocks = samples.div_ceil(SAMPLE_BLOCK as u64) as usize;
        let parts = par::try_map_indexed(blocks, |b| -> Result<(Vec<f64>, u64)> {
            let mut rng = stream_rng(seed, b as u64);
            let len = (samples - (b * SAMPLE_BLOCK) as u64).min(SAMPLE_BLOCK as u64);
            let mut keys = Vec::with_capacity(len as usize);
            let mut proposals = 0u64;
            for _ in 0..len {
                let (g, tries) = haar_sample_counted(&mut rng);
                proposals += tries as u64;
                keys.push(l_value(&g, cap)?.sort_key());
            }
            Ok((keys, proposals))
        })?;
        let proposals = parts.iter().map(|p| p.1).sum();
        let mut keys: Vec<f64> = parts.into_iter().flat_map(|p| p.0).collect();
        par::sort_floats(&mut keys);
        Ok(Self { keys, seed, cap, proposals })
    }

    pub fn samples(&self) -> u64 {
        self.keys.len() as u64
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Fraction of samples with `L > cap`.
    pub fn beyond_cap_fraction(&self) -> f64 {
        self.keys.iter().rev().take_while(|k| k.is_infinite()).count() as f64 / self.keys.len() as f64
    }

    /// Proposals of the rejection step used to produce the sample.
    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    /// `P(L < t)` along the grid.
    pub fn sigma(&self, t_grid: &[f64]) -> Result<Vec<MCEstimate>> {
        check_grid(t_grid, self.cap)?;
        let n = self.samples();
        Ok(t_grid
            .iter()
            .map(|&t| {
                let k = self.keys.partition_point(|&l| l < t) as f64;
                let (mean, stderr) = mean_stderr(k, k, n);
                MCEstimate {
                    t,
                    mean,
                    stderr,
                    samples: n,
                    seed: self.seed,
                    clip_floor: None,
                    clipped_fraction: None,
                }
            })
            .collect())
    }

    /// `E[(1 / max(L, clip_floor)) 1{L < t}]` along the grid.
    pub fn lambda(&self, t_grid: &[f64], clip_floor: f64) -> Result<Vec<MCEstimate>> {
        check_grid(t_grid, self.cap)?;
        if !(clip_floor > 0.0 && clip_floor <= 0.01) {
            return Err(Error::invalid(format!("clip_floor must be in (0, 0.01], got {clip_floor}")));
        }
        let n = self.samples();
        let clipped = self.keys.partition_point(|&l| l < clip_floor);
        let mut out = Vec::with_capacity(t_grid.len());
        let (mut sum, mut sum_sq) = (CompensatedSum::default(), CompensatedSum::default());
        let mut i = 0;
        for &t in t_grid {
            while i < self.keys.len() && self.keys[i] < t {
                let w = 1.0 / self.keys[i].max(clip_floor);
                sum.add(w);
                sum_sq.add(w * w);
                i += 1;
            }
            let (mean, stderr) = mean_stderr(sum.value(), sum_sq.value(), n);
            out.push(MCEstimate {
                t,
                mean,
                stderr,
                samples: n,
                seed: self.seed,
                clip_floor: Some(clip_floor),
                clipped_fraction: Some(clipped.min(i) as f64 / n as f64),
            });
        }
        Ok(out)
    }
}

/// `sigma_inf(t) = mu{L < t}` on the grid; the enumeration cap is `max(t_grid)`.
pub fn sigma_inf_estimate(t_grid: &[f64], samples: u64, seed: u64) -> Result<Vec<MCEstimate>> {
    LSamples::draw(samples, seed, grid_cap(t_grid)?)?.sigma(t_grid)
}

/// `lambda_inf(t) = E[(1/L) 1{L < t}]` with `1/L` clipped at `1/clip_floor`.
pub fn lambda_inf_estimate(t_grid: &[f64], samples: u64, seed: u64, clip_floor: f64) -> Result<Vec<MCEstimate>> {
    LSamples::draw(samples, seed, grid_cap(t_grid)?)?.lambda(t_grid, clip_floor)
}

fn grid_cap(t_grid: &[f64]) -> Result<f64> {
    match t_grid.iter().copied().reduce(f64::max) {
        Some(m) if m > 0.0 => Ok(m),
        _ => Err(Error::invalid("t-grid needs a positive point")),
    }
}

/// Minimal number of midpoint steps for height `y`.
pub fn recommended_steps(y: f64) -> u64 {
    (40.0 / y).ceil() as u64
}

/// `(1/2) int_{-1}^{1} 1{L(u(x) a(y)) < t} dx` by the midpoint rule, for every `t` of the grid.
pub fn horocycle_integral(t_grid: &[f64], y: f64, steps: u64, cap: f64) -> Result<Vec<f64>> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::invalid(format!("y must be positive, got {y}")));
    }
    if steps < 100 {
        return Err(Error::invalid(format!("need at least 100 steps, got {steps}")));
    }
    check_grid(t_grid, cap)?;
    let h = 2.0 / steps as f64;
    let parts = par::map_chunks(steps as usize, QUADRATURE_CHUNK, |r| -> Result<Vec<f64>> {
        r.map(|i| {
            let x = -1.0 + (i as f64 + 0.5) * h;
            Ok(l_value(&horocycle_point(x, y)?, cap)?.sort_key())
        })
        .collect()
    });
    let mut keys = Vec::with_capacity(steps as usize);
    for p in parts {
        keys.extend(p?);
    }
    par::sort_floats(&mut keys);
    Ok(t_grid
        .iter()
        .map(|&t| keys.partition_point(|&l| l < t) as f64 / steps as f64)
        .collect())
}

/// `L` at one horocycle point, exposed for spot checks.
pub fn horocycle_l_value(x: f64, y: f64, cap: f64) -> Result<LValue> {
    l_value(&horocycle_point(x, y)?, cap)
}

/// Acceptance rate of the fundamental-domain rejection step, and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceEstimate {
    pub accepted: u64,
    pub proposals: u64,
    pub rate: f64,
    pub stderr: f64,
}

pub fn acceptance_rate(samples: u64, seed: u64) -> Result<AcceptanceEstimate> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let blocks = samples.div_ceil(SAMPLE_BLOCK as u64) as usize;
    let proposals: u64 = par::map_indexed(blocks, |b| {
        let mut rng = stream_rng(seed, b as u64);
        let len = (samples - (b * SAMPLE_BLOCK) as u64).min(SAMPLE_BLOCK as u64);
        (0..len).map(|_| haar_sample_counted(&mut rng).1 as u64).sum::<u64>()
    })
    .into_iter()
    .sum();
    let rate = samples as f64 / proposals as f64;
    Ok(AcceptanceEstimate {
        accepted: samples,
        proposals,
        rate,
        stderr: (rate * (1.0 - rate) / proposals as f64).sqrt(),
    })
}

/// Mean number of Haar-lattice points in `[0, w) x [0, h)`.
pub fn siegel_mean(w: f64, h: f64, samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let blocks = samples.div_ceil(SAMPLE_BLOCK as u64) as usize;
    let parts = par::try_map_indexed(blocks, |b| -> Result<(f64, f64)> {
        let mut rng = stream_rng(seed, b as u64);
        let len = (samples - (b * SAMPLE_BLOCK) as u64).min(SAMPLE_BLOCK as u64);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..len {
            let g = haar_sample_counted(&mut rng).0;
            let c = point_count_in_box(&g, 0.0, w, 0.0, h)? as f64;
            s += c;
            s2 += c * c;
        }
        Ok((s, s2))
    })?;
    let sum: CompensatedSum = parts.iter().map(|p| p.0).collect();
    let sum_sq: CompensatedSum = parts.iter().map(|p| p.1).collect();
    let (mean, stderr) = mean_stderr(sum.value(), sum_sq.value(), samples);
    Ok(MCEstimate {
        t: w * h,
        mean,
        stderr,
        samples,
        seed,
        clip_floor: None,
        clipped_fraction: None,
    })
}

/// Least-squares line through the origin fitted to estimates with `0 < t <= t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearityReport {
    pub slope: f64,
    pub points: usize,
    /// Largest `|mean - slope t| / stderr` over the fitted points.
    pub max_residual_se: f64,
}

pub fn linearity_through_origin(estimates: &[MCEstimate], t_max: f64) -> Result<LinearityReport> {
    let pts: Vec<&MCEstimate> = estimates.iter().filter(|e| e.t > 0.0 && e.t <= t_max + 1e-12).collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateFit("fewer than two grid points in range".into()));
    }
    let stt: f64 = pts.iter().map(|e| e.t * e.t).sum();
    let slope = pts.iter().map(|e| e.t * e.mean).sum::<f64>() / stt;
    let max_residual_se = pts
        .iter()
        .map(|e| {
            let r = (e.mean - slope * e.t).abs();
            if e.stderr > 0.0 {
                r / e.stderr
            } else if r == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    Ok(LinearityReport {
        slope,
        points: pts.len(),
        max_residual_se,
    })
}

/// `err ~ amplitude * N^(-exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub exponent: f64,
    pub amplitude: f64,
    /// RMS of the log-space residuals.
    pub residual: f64,
}

/// Least-squares fit of `log err` against `log N`.
pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::invalid("need at least 3 points"));
    }
    if points.iter().any(|&(n, e)| !(n > 0.0) || !(e > 0.0)) {
        return Err(Error::invalid("all N and errors must be positive"));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-12 * (1.0 + mx * mx) {
        return Err(Error::DegenerateFit("all N are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(RateFit {
        exponent: -slope,
        amplitude: intercept.exp(),
        residual: (rss / k).sqrt(),
    })
}

/// Largest `|a_i - b_i|` over grid points with `t` in `[t_min, t_max]`.
pub fn sup_difference(t_grid: &[f64], a: &[f64], b: &[f64], t_min: f64, t_max: f64) -> f64 {
    t_grid
        .iter()
        .zip(a.iter().zip(b))
        .filter(|(t, _)| **t >= t_min - 1e-12 && **t <= t_max + 1e-12)
        .map(|(_, (x, y))| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_fit_examples() {
        let f = rate_fit(&[(10.0, 0.1), (100.0, 0.01), (1000.0, 0.001)]).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!((f.amplitude - 1.0).abs() < 1e-9);
        let f = rate_fit(&[(10.0, 1.0), (100.0, 1.0), (1000.0, 1.0)]).unwrap();
        assert!(f.exponent.abs() < 1e-15);
        assert!(matches!(rate_fit(&[(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)]), Err(Error::DegenerateFit(_))));
        assert!(rate_fit(&[(5.0, 1.0), (6.0, 2.0)]).is_err());
        assert!(rate_fit(&[(5.0, 1.0), (6.0, 0.0), (7.0, 1.0)]).is_err());
    }

    #[test]
    fn zero_t_is_exactly_zero() {
        let grid = [0.0, 1.0, 2.0];
        let s = LSamples::draw(2000, 5, 2.0).unwrap();
        assert_eq!(s.sigma(&grid).unwrap()[0].mean, 0.0);
        assert_eq!(s.lambda(&grid, 1e-4).unwrap()[0].mean, 0.0);
        assert!(s.sigma(&[3.0]).is_err());
        assert!(s.lambda(&grid, 0.5).is_err());
    }

    #[test]
    fn horocycle_zero_and_monotone() {
        let grid = [0.0, 0.5, 1.0, 2.0];
        let v = horocycle_integral(&grid, 1.0, 200, 2.0).unwrap();
        assert_eq!(v[0], 0.0);
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
        assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!(horocycle_integral(&grid, 1.0, 50, 2.0).is_err());
        assert!(horocycle_integral(&grid, 0.0, 200, 2.0).is_err());
    }

    #[test]
    fn sample_set_is_thread_independent() {
        let a = LSamples::draw(3000, 17, 4.0).unwrap();
        let b = par::sequential(|| LSamples::draw(3000, 17, 4.0).unwrap());
        assert_eq!(a, b);
    }
}
