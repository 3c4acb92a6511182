use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{factorize, is_prime};
use crate::expsums::{
    BoundCase, BoundReport, CubicKernel, EmpiricalConstants, Lemma, LatticeKernel, T2mKernel, TqKernel, PARAM_LIMIT,
};
use crate::par;
use crate::report::{fmt_sig, CsvWriter};
use crate::{Error, Result};

pub const SWEEP_COLUMNS: [&str; 14] = [
    "lemma", "modulus", "p", "m", "delta", "A", "B", "C", "k", "l", "n", "abs", "bound", "ratio",
];

/// Largest number of cases an exhaustive sweep may enumerate.
const EXHAUSTIVE_LIMIT: u64 = 50_000_000;

/// Cases evaluated between two flushes of the CSV writer.
const BATCH_CASES: u64 = 1 << 16;

/// Largest modulus accepted by a sweep.
const MODULUS_LIMIT: u64 = 1 << 28;

const DRAW_LIMIT: i64 = PARAM_LIMIT - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub lemma: Lemma,
    pub min_modulus: u64,
    pub max_modulus: u64,
    /// Random parameter draws per modulus (per `delta` for powers of two).
    pub samples: u64,
    /// Enumerate every parameter residue instead of drawing.
    pub exhaustive: bool,
    pub seed: u64,
    pub constants: EmpiricalConstants,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub lemma: Lemma,
    pub moduli: u64,
    pub cases: u64,
    pub max_ratio: f64,
    pub argmax_params: Option<BoundCase>,
    pub threshold: f64,
    pub violations: u64,
    pub first_violation: Option<BoundReport>,
    /// Largest ratio over moduli in the lower half of the requested range.
    pub first_half_max: f64,
    /// Largest ratio over moduli in the upper half of the requested range.
    pub second_half_max: f64,
}

impl SweepSummary {
    /// Turns the first violation into [`Error::BoundViolated`].
    pub fn check(&self) -> Result<()> {
        match &self.first_violation {
            Some(r) => Err(Error::BoundViolated(Box::new(*r))),
            None => Ok(()),
        }
    }
}

/// Parses `p<=100`, `q<5000`, `10<=c<=2000` or a bare upper bound into an inclusive range.
pub fn parse_range(s: &str) -> Result<(u64, u64)> {
    let bad = || Error::invalid(format!("cannot parse range {s:?}"));
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bound = |t: &str| t.parse::<u64>().map_err(|_| bad());
    let upper = |t: &str| -> Result<u64> {
        match t.strip_prefix("<=") {
            Some(v) => bound(v),
            None => t.strip_prefix('<').ok_or_else(bad).and_then(bound)?.checked_sub(1).ok_or_else(bad),
        }
    };
    if let Ok(v) = s.parse::<u64>() {
        return Ok((1, v));
    }
    let var_start = s.find(|c: char| c.is_ascii_alphabetic()).ok_or_else(bad)?;
    let var_end = s[var_start..]
        .find(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .map_or(s.len(), |e| var_start + e);
    let (lower, rest) = (&s[..var_start], &s[var_end..]);
    let lo = if lower.is_empty() {
        1
    } else if let Some(v) = lower.strip_suffix("<=") {
        bound(v)?
    } else {
        bound(lower.strip_suffix('<').ok_or_else(bad)?)? + 1
    };
    let hi = upper(rest)?;
    Ok((lo.max(1), hi))
}

/// Moduli visited by a sweep of `lemma` over `[lo, hi]`, ascending.
pub fn sweep_moduli(lemma: Lemma, lo: u64, hi: u64) -> Vec<u64> {
    let range = lo.max(1)..=hi;
    let prime_power = |q: u64, odd: bool| {
        factorize(q).is_ok_and(|f| f.factors().len() == 1 && (!odd || f.factors()[0].0 != 2))
    };
    match lemma {
        Lemma::Weil => range.filter(|&q| is_prime(q)).collect(),
        Lemma::Lemma2 => range.filter(|&q| q > 1 && prime_power(q, true)).collect(),
        Lemma::Lemma2Prime => range.filter(|&q| q > 1 && q.is_power_of_two()).collect(),
        Lemma::CubicPrimePower => range.filter(|&q| q > 1 && prime_power(q, false)).collect(),
        Lemma::Lemma3 | Lemma::LemmaExpo | Lemma::LemmaNewExpo => range.collect(),
    }
}

fn divisors(q: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in factorize(q).expect("positive modulus").factors() {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Kernel and case layout for one modulus.
enum Evaluator {
    Tq(TqKernel, u64),
    T2m([T2mKernel; 2], u32),
    Cubic(CubicKernel, u64, u32),
    Lattice(LatticeKernel, u64),
}

impl Evaluator {
    fn new(lemma: Lemma, q: u64) -> Result<Self> {
        let prime_power = |q: u64| {
            let f = factorize(q)?;
            let (p, m) = f.factors()[0];
            Ok::<_, Error>((p, m))
        };
        Ok(match lemma {
            Lemma::Weil | Lemma::Lemma2 | Lemma::Lemma3 => Evaluator::Tq(TqKernel::new(q)?, q),
            Lemma::Lemma2Prime => {
                let m = q.trailing_zeros();
                Evaluator::T2m([T2mKernel::new(m, 0)?, T2mKernel::new(m, 1)?], m)
            }
            Lemma::CubicPrimePower => {
                let (p, m) = prime_power(q)?;
                Evaluator::Cubic(CubicKernel::new(p, m)?, p, m)
            }
            Lemma::LemmaExpo | Lemma::LemmaNewExpo => Evaluator::Lattice(LatticeKernel::new(q)?, q),
        })
    }
}

/// Parameter tuples (up to three entries) for one modulus.
fn parameter_sets(lemma: Lemma, q: u64, config: &SweepConfig) -> Vec<[i64; 3]> {
    let qi = q as i64;
    if config.exhaustive {
        let torus = |a: i64, b: i64, c: i64| -> Vec<[i64; 3]> {
            let mut v = Vec::with_capacity((a * b * c) as usize);
            for x in 0..a {
                for y in 0..b {
                    for z in 0..c {
                        v.push([x, y, z]);
                    }
                }
            }
            v
        };
        return match lemma {
            Lemma::Weil | Lemma::Lemma2 | Lemma::Lemma3 | Lemma::Lemma2Prime => torus(qi, qi, 1),
            Lemma::CubicPrimePower => torus(qi, qi, qi),
            // (l, n, k): l mod c, n in 1..=4c, k mod 2c.
            Lemma::LemmaExpo => torus(qi, 4 * qi, 1).into_iter().map(|[l, n, k]| [l, n + 1, k]).collect(),
            Lemma::LemmaNewExpo => torus(qi, 4 * qi, 2 * qi).into_iter().map(|[l, n, k]| [l, n + 1, k]).collect(),
        };
    }
    let mut rng = par::stream_rng(config.seed, q);
    let divs = divisors(q);
    let positive_last = matches!(lemma, Lemma::LemmaExpo | Lemma::LemmaNewExpo);
    (0..config.samples)
        .map(|_| {
            let d = if rng.random_range(0..4) == 0 {
                divs[rng.random_range(0..divs.len())] as i64
            } else {
                1
            };
            let lim = DRAW_LIMIT / d;
            let mut draw = [0i64; 3];
            for (i, x) in draw.iter_mut().enumerate() {
                *x = if positive_last && i == 1 {
                    d * rng.random_range(1..=lim)
                } else {
                    d * rng.random_range(-lim..=lim)
                };
            }
            draw
        })
        .collect()
}

fn exhaustive_size(lemma: Lemma, q: u64) -> u64 {
    match lemma {
        Lemma::Weil | Lemma::Lemma2 | Lemma::Lemma3 => q * q,
        Lemma::Lemma2Prime => 2 * q * q,
        Lemma::CubicPrimePower => q.saturating_mul(q).saturating_mul(q),
        Lemma::LemmaExpo => 4 * q * q,
        Lemma::LemmaNewExpo => 8 * q.saturating_mul(q).saturating_mul(q),
    }
}

fn cases_for(q: u64, config: &SweepConfig) -> u64 {
    if config.exhaustive {
        exhaustive_size(config.lemma, q)
    } else if config.lemma == Lemma::Lemma2Prime {
        2 * config.samples
    } else {
        config.samples
    }
}

fn evaluate_modulus(q: u64, config: &SweepConfig) -> Result<Vec<BoundReport>> {
    let lemma = config.lemma;
    let eval = Evaluator::new(lemma, q)?;
    let params = parameter_sets(lemma, q, config);
    let c = &config.constants;
    let mut out = Vec::with_capacity(params.len());
    match &eval {
        Evaluator::Tq(kernel, q) => {
            let (p, m) = match lemma {
                Lemma::Lemma3 => (0, 0),
                _ => factorize(*q)?.factors()[0],
            };
            for [a, b, _] in params {
                let case = match lemma {
                    Lemma::Weil => BoundCase::Weil { p: *q, a, b },
                    Lemma::Lemma2 => BoundCase::Lemma2 { p, m, a, b },
                    _ => BoundCase::Lemma3 { q: *q, a, b },
                };
                out.push(BoundReport::new(case, kernel.eval(a, b)?.abs(), c)?);
            }
        }
        Evaluator::T2m(kernels, m) => {
            for delta in 0..2u32 {
                for &[a, b, _] in &params {
                    let abs = kernels[delta as usize].eval(a, b)?.abs();
                    out.push(BoundReport::new(BoundCase::Lemma2Prime { m: *m, delta, a, b }, abs, c)?);
                }
            }
        }
        Evaluator::Cubic(kernel, p, m) => {
            for [a, b, cc] in params {
                let case = BoundCase::Cubic { p: *p, m: *m, a, b, c: cc };
                out.push(BoundReport::new(case, kernel.eval(a, b, cc)?.abs(), c)?);
            }
        }
        Evaluator::Lattice(kernel, q) => {
            for [l, n, k] in params {
                let (case, k) = match lemma {
                    Lemma::LemmaExpo => (BoundCase::Expo { c: *q, l, n }, 0),
                    _ => (BoundCase::NewExpo { c: *q, k, l, n }, k),
                };
                out.push(BoundReport::new(case, kernel.eval(k, l, n)?.abs(), c)?);
            }
        }
    }
    Ok(out)
}

fn csv_row(q: u64, r: &BoundReport) -> Vec<String> {
    let s = |x: i64| x.to_string();
    let e = String::new;
    let (p, m, delta, a, b, cc, k, l, n) = match r.case {
        BoundCase::Weil { p, a, b } => (p.to_string(), "1".into(), e(), s(a), s(b), e(), e(), e(), e()),
        BoundCase::Lemma2 { p, m, a, b } => (p.to_string(), m.to_string(), e(), s(a), s(b), e(), e(), e(), e()),
        BoundCase::Lemma2Prime { m, delta, a, b } => {
            ("2".into(), m.to_string(), delta.to_string(), s(a), s(b), e(), e(), e(), e())
        }
        BoundCase::Lemma3 { a, b, .. } => (e(), e(), e(), s(a), s(b), e(), e(), e(), e()),
        BoundCase::Expo { l, n, .. } => (e(), e(), e(), e(), e(), e(), e(), s(l), s(n)),
        BoundCase::NewExpo { k, l, n, .. } => (e(), e(), e(), e(), e(), e(), s(k), s(l), s(n)),
        BoundCase::Cubic { p, m, a, b, c } => (p.to_string(), m.to_string(), e(), s(a), s(b), s(c), e(), e(), e()),
    };
    vec![
        r.lemma.short_name().to_string(),
        q.to_string(),
        p,
        m,
        delta,
        a,
        b,
        cc,
        k,
        l,
        n,
        fmt_sig(r.sum_abs),
        fmt_sig(r.bound),
        fmt_sig(r.ratio),
    ]
}

/// Evaluates every case of the sweep, writes one CSV row per case in modulus
/// order, and summarizes the ratios. Violations are recorded, not raised; call
/// [`SweepSummary::check`] to turn them into an error.
pub fn run_sweep<W: Write>(config: &SweepConfig, comments: &[String], out: W) -> Result<SweepSummary> {
    if config.max_modulus > MODULUS_LIMIT {
        return Err(Error::invalid(format!("moduli above {MODULUS_LIMIT} are not supported")));
    }
    if !(config.constants.c_expo > 0.0 && config.constants.k_emp > 0.0) {
        return Err(Error::invalid("empirical constants must be positive"));
    }
    let moduli = sweep_moduli(config.lemma, config.min_modulus, config.max_modulus);
    if config.exhaustive {
        let total = moduli
            .iter()
            .fold(0u64, |acc, &q| acc.saturating_add(exhaustive_size(config.lemma, q)));
        if total > EXHAUSTIVE_LIMIT {
            return Err(Error::invalid(format!(
                "exhaustive sweep would enumerate {total} cases (limit {EXHAUSTIVE_LIMIT})"
            )));
        }
    }
    let mut writer = CsvWriter::new(out, comments, &SWEEP_COLUMNS)?;
    let threshold = if config.lemma.is_explicit() { 1.0 } else { config.constants.c_expo };
    let midpoint = config.min_modulus.max(1) + config.max_modulus.saturating_sub(config.min_modulus.max(1)) / 2;
    let mut summary = SweepSummary {
        lemma: config.lemma,
        moduli: moduli.len() as u64,
        cases: 0,
        max_ratio: 0.0,
        argmax_params: None,
        threshold,
        violations: 0,
        first_violation: None,
        first_half_max: 0.0,
        second_half_max: 0.0,
    };
    let mut start = 0;
    while start < moduli.len() {
        let mut end = start;
        let mut batch_cases = 0;
        while end < moduli.len() && (end == start || batch_cases + cases_for(moduli[end], config) <= BATCH_CASES) {
            batch_cases += cases_for(moduli[end], config);
            end += 1;
        }
        let batch = &moduli[start..end];
        let results = par::try_map_indexed(batch.len(), |i| evaluate_modulus(batch[i], config))?;
        for (&q, reports) in batch.iter().zip(&results) {
            for r in reports {
                writer.row(&csv_row(q, r))?;
                summary.cases += 1;
                if r.ratio > summary.max_ratio || summary.argmax_params.is_none() {
                    summary.max_ratio = r.ratio;
                    summary.argmax_params = Some(r.case);
                }
                let half = if q <= midpoint { &mut summary.first_half_max } else { &mut summary.second_half_max };
                *half = half.max(r.ratio);
                if r.is_violation() {
                    summary.violations += 1;
                    summary.first_violation.get_or_insert(*r);
                }
            }
        }
        start = end;
    }
    writer.finish()?;
    Ok(summary)
}
