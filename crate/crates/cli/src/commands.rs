use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use eqdist::expsums::{EmpiricalConstants, Lemma};
use eqdist::gapstats::{gaps_of, sqrt_fractional_parts, t_grid};
use eqdist::harness::{parse_range, run_sweep, SweepConfig};
use eqdist::limit_mc::{horocycle_integral, rate_fit, recommended_steps, sup_difference, LSamples, DEFAULT_CLIP_FLOOR};
use eqdist::report::{fmt_sig, CsvWriter};

use crate::config::summary_path;

pub enum Outcome {
    Success,
    Violation,
}

const DEFAULT_T_MAX: f64 = 6.0;
const DEFAULT_T_STEP: f64 = 0.05;

/// Comment lines opening every output: artifact version and the resolved configuration.
fn preamble(command: &str, config: &impl Serialize) -> anyhow::Result<Vec<String>> {
    Ok(vec![
        format!("eqdist {}", eqdist::VERSION),
        format!("command: {command}"),
        format!("config: {}", serde_json::to_string(config)?),
    ])
}

fn open_out(out: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes the summary next to the CSV, or to stderr when the CSV went to stdout.
fn write_summary(out: Option<&Path>, summary: &impl Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(summary)? + "\n";
    match out {
        Some(p) => {
            let path = summary_path(p);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None => eprint!("{text}"),
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaArg {
    Weil,
    L2,
    L2p,
    L3,
    Expo,
    Newexpo,
    Cubic,
}

impl From<LemmaArg> for Lemma {
    fn from(l: LemmaArg) -> Lemma {
        match l {
            LemmaArg::Weil => Lemma::Weil,
            LemmaArg::L2 => Lemma::Lemma2,
            LemmaArg::L2p => Lemma::Lemma2Prime,
            LemmaArg::L3 => Lemma::Lemma3,
            LemmaArg::Expo => Lemma::LemmaExpo,
            LemmaArg::Newexpo => Lemma::LemmaNewExpo,
            LemmaArg::Cubic => Lemma::CubicPrimePower,
        }
    }
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpsumArgs {
    /// Which bound to sweep.
    #[arg(long, value_enum)]
    lemma: Option<LemmaArg>,
    /// Modulus range such as `p<=100` or `10<=q<=5000`.
    #[arg(long)]
    range: Option<String>,
    /// Random parameter draws per modulus.
    #[arg(long)]
    samples: Option<u64>,
    /// Enumerate every parameter residue instead of drawing.
    #[arg(long)]
    #[serde(default)]
    exhaustive: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Ratio threshold for the bounds stated without an explicit constant.
    #[arg(long)]
    c_expo: Option<f64>,
    /// Per-prime constant in the three-frequency bound.
    #[arg(long)]
    k_emp: Option<f64>,
    /// CSV output path; the summary goes to the same path with a .json extension.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ExpsumArgs {
    pub fn merge(self, file: Self) -> Self {
        Self {
            lemma: self.lemma.or(file.lemma),
            range: self.range.or(file.range),
            samples: self.samples.or(file.samples),
            exhaustive: self.exhaustive || file.exhaustive,
            seed: self.seed.or(file.seed),
            c_expo: self.c_expo.or(file.c_expo),
            k_emp: self.k_emp.or(file.k_emp),
            out: self.out.or(file.out),
        }
    }
}

#[derive(Serialize)]
struct ExpsumRun<'a> {
    range: &'a str,
    #[serde(flatten)]
    sweep: &'a SweepConfig,
}

pub fn expsum(args: ExpsumArgs) -> anyhow::Result<Outcome> {
    let Some(lemma) = args.lemma else {
        bail!("missing --lemma (one of weil, l2, l2p, l3, expo, newexpo, cubic)");
    };
    let range = args.range.unwrap_or_else(|| "q<=100".into());
    let (lo, hi) = parse_range(&range)?;
    let defaults = EmpiricalConstants::default();
    let config = SweepConfig {
        lemma: lemma.into(),
        min_modulus: lo,
        max_modulus: hi,
        samples: args.samples.unwrap_or(50),
        exhaustive: args.exhaustive,
        seed: args.seed.unwrap_or(0),
        constants: EmpiricalConstants {
            c_expo: args.c_expo.unwrap_or(defaults.c_expo),
            k_emp: args.k_emp.unwrap_or(defaults.k_emp),
        },
    };
    let comments = preamble("expsum", &ExpsumRun { range: &range, sweep: &config })?;
    let summary = run_sweep(&config, &comments, open_out(args.out.as_deref())?)?;
    write_summary(args.out.as_deref(), &summary)?;
    Ok(match summary.check() {
        Ok(()) => Outcome::Success,
        Err(e) => {
            eprintln!("bound violated in {} of {} cases; first: {e}", summary.violations, summary.cases);
            Outcome::Violation
        }
    })
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapsArgs {
    /// Number of points sqrt(1), ..., sqrt(N) mod 1.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GapsArgs {
    pub fn merge(self, file: Self) -> Self {
        Self {
            n: self.n.or(file.n),
            t_max: self.t_max.or(file.t_max),
            t_step: self.t_step.or(file.t_step),
            out: self.out.or(file.out),
        }
    }
}

#[derive(Serialize)]
struct GapsRun {
    n: u64,
    t_max: f64,
    t_step: f64,
}

#[derive(Serialize)]
struct GapsSummary {
    n: u64,
    gaps: usize,
    total: f64,
    /// Largest gap in units of `1/N`.
    max_gap_scaled: f64,
    zero_gaps: usize,
}

pub fn gaps(args: GapsArgs) -> anyhow::Result<Outcome> {
    let Some(n) = args.n else {
        bail!("missing --n");
    };
    let run = GapsRun {
        n,
        t_max: args.t_max.unwrap_or(DEFAULT_T_MAX),
        t_step: args.t_step.unwrap_or(DEFAULT_T_STEP),
    };
    let grid = t_grid(run.t_max, run.t_step)?;
    let dist = gaps_of(&sqrt_fractional_parts(n)?);
    let comments = preamble("gaps", &run)?;
    let mut w = CsvWriter::new(open_out(args.out.as_deref())?, &comments, &["t", "lambda_N", "sigma_N"])?;
    for &t in &grid {
        w.row(&[fmt_sig(t), fmt_sig(dist.lambda(t)), fmt_sig(dist.sigma(t))])?;
    }
    w.finish()?;
    let summary = GapsSummary {
        n,
        gaps: dist.gaps().len(),
        total: dist.total(),
        max_gap_scaled: dist.max_gap() * n as f64,
        zero_gaps: dist.zero_gaps(),
    };
    write_summary(args.out.as_deref(), &summary)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Haar,
    Horocycle,
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitArgs {
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Horocycle height.
    #[arg(long)]
    y: Option<f64>,
    /// Midpoint steps along the horocycle (default ceil(40 / y)).
    #[arg(long)]
    steps: Option<u64>,
    /// Haar samples.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_step: Option<f64>,
    /// Floor applied to L before inverting it.
    #[arg(long)]
    clip_floor: Option<f64>,
    /// Enumeration cap for L (default t-max); must not be below t-max.
    #[arg(long)]
    cap: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl LimitArgs {
    pub fn merge(self, file: Self) -> Self {
        Self {
            mode: self.mode.or(file.mode),
            y: self.y.or(file.y),
            steps: self.steps.or(file.steps),
            samples: self.samples.or(file.samples),
            seed: self.seed.or(file.seed),
            t_max: self.t_max.or(file.t_max),
            t_step: self.t_step.or(file.t_step),
            clip_floor: self.clip_floor.or(file.clip_floor),
            cap: self.cap.or(file.cap),
            out: self.out.or(file.out),
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
enum LimitRun {
    Haar {
        samples: u64,
        seed: u64,
        t_max: f64,
        t_step: f64,
        clip_floor: f64,
        cap: f64,
    },
    Horocycle {
        y: f64,
        steps: u64,
        t_max: f64,
        t_step: f64,
        cap: f64,
    },
}

#[derive(Serialize)]
struct HaarSummary {
    samples: u64,
    proposals: u64,
    beyond_cap_fraction: f64,
}

pub fn limit(args: LimitArgs) -> anyhow::Result<Outcome> {
    let t_max = args.t_max.unwrap_or(DEFAULT_T_MAX);
    let t_step = args.t_step.unwrap_or(DEFAULT_T_STEP);
    let cap = args.cap.unwrap_or(t_max);
    if !(cap >= t_max) {
        bail!("--cap {cap} is below --t-max {t_max}");
    }
    let grid = t_grid(t_max, t_step)?;
    let out = args.out.as_deref();
    match args.mode.unwrap_or(Mode::Haar) {
        Mode::Haar => {
            let run = LimitRun::Haar {
                samples: args.samples.unwrap_or(100_000),
                seed: args.seed.unwrap_or(0),
                t_max,
                t_step,
                clip_floor: args.clip_floor.unwrap_or(DEFAULT_CLIP_FLOOR),
                cap,
            };
            let LimitRun::Haar { samples, seed, clip_floor, .. } = run else { unreachable!() };
            let draws = LSamples::draw(samples, seed, cap)?;
            let sigma = draws.sigma(&grid)?;
            let lambda = draws.lambda(&grid, clip_floor)?;
            let header = ["t", "sigma", "sigma_stderr", "lambda", "lambda_stderr", "clipped_fraction"];
            let mut w = CsvWriter::new(open_out(out)?, &preamble("limit", &run)?, &header)?;
            for (s, l) in sigma.iter().zip(&lambda) {
                w.row(&[
                    fmt_sig(s.t),
                    fmt_sig(s.mean),
                    fmt_sig(s.stderr),
                    fmt_sig(l.mean),
                    fmt_sig(l.stderr),
                    fmt_sig(l.clipped_fraction.unwrap_or(0.0)),
                ])?;
            }
            w.finish()?;
            let summary = HaarSummary {
                samples: draws.samples(),
                proposals: draws.proposals(),
                beyond_cap_fraction: draws.beyond_cap_fraction(),
            };
            write_summary(out, &summary)?;
        }
        Mode::Horocycle => {
            let Some(y) = args.y else {
                bail!("--mode horocycle needs --y");
            };
            if !(y > 0.0 && y.is_finite()) {
                bail!("--y must be positive, got {y}");
            }
            let steps = args.steps.unwrap_or_else(|| recommended_steps(y));
            if steps < recommended_steps(y) {
                eprintln!(
                    "warning: {steps} steps undersample the horocycle at y = {y}; at least {} are recommended",
                    recommended_steps(y)
                );
            }
            let run = LimitRun::Horocycle { y, steps, t_max, t_step, cap };
            let mu = horocycle_integral(&grid, y, steps, cap)?;
            let mut w = CsvWriter::new(open_out(out)?, &preamble("limit", &run)?, &["t", "mu_y"])?;
            for (t, m) in grid.iter().zip(&mu) {
                w.row(&[fmt_sig(*t), fmt_sig(*m)])?;
            }
            w.finish()?;
        }
    }
    Ok(Outcome::Success)
}

#[derive(Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateArgs {
    /// Comma-separated N values (at least three).
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u64>>,
    /// Haar samples for the limit law.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    t_step: Option<f64>,
    #[arg(long)]
    clip_floor: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RateArgs {
    pub fn merge(self, file: Self) -> Self {
        Self {
            n_list: self.n_list.or(file.n_list),
            samples: self.samples.or(file.samples),
            seed: self.seed.or(file.seed),
            t_max: self.t_max.or(file.t_max),
            t_step: self.t_step.or(file.t_step),
            clip_floor: self.clip_floor.or(file.clip_floor),
            out: self.out.or(file.out),
        }
    }
}

#[derive(Serialize)]
struct RateRun<'a> {
    n_list: &'a [u64],
    samples: u64,
    seed: u64,
    t_max: f64,
    t_step: f64,
    clip_floor: f64,
}

#[derive(Serialize)]
struct RatePoint {
    n: u64,
    sup_diff: f64,
    argmax_t: f64,
}

#[derive(Serialize)]
struct RateSummary {
    points: Vec<RatePoint>,
    strictly_decreasing: bool,
    rate_fit: eqdist::limit_mc::RateFit,
    beyond_cap_fraction: f64,
}

pub fn rate(args: RateArgs) -> anyhow::Result<Outcome> {
    let n_list = args.n_list.unwrap_or_default();
    if n_list.len() < 3 {
        bail!("--n-list needs at least three values, got {}", n_list.len());
    }
    let run = RateRun {
        n_list: &n_list,
        samples: args.samples.unwrap_or(1_000_000),
        seed: args.seed.unwrap_or(0),
        t_max: args.t_max.unwrap_or(DEFAULT_T_MAX),
        t_step: args.t_step.unwrap_or(DEFAULT_T_STEP),
        clip_floor: args.clip_floor.unwrap_or(DEFAULT_CLIP_FLOOR),
    };
    let grid = t_grid(run.t_max, run.t_step)?;
    let draws = LSamples::draw(run.samples, run.seed, run.t_max)?;
    let limit: Vec<f64> = draws.lambda(&grid, run.clip_floor)?.iter().map(|e| e.mean).collect();
    let mut points = Vec::with_capacity(n_list.len());
    for &n in &n_list {
        let dist = gaps_of(&sqrt_fractional_parts(n)?);
        let finite: Vec<f64> = grid.iter().map(|&t| dist.lambda(t)).collect();
        let sup_diff = sup_difference(&grid, &finite, &limit, 0.0, run.t_max);
        let argmax_t = grid
            .iter()
            .zip(finite.iter().zip(&limit))
            .find(|(_, (a, b))| (*a - *b).abs() == sup_diff)
            .map_or(0.0, |(t, _)| *t);
        points.push(RatePoint { n, sup_diff, argmax_t });
    }
    let fit = rate_fit(&points.iter().map(|p| (p.n as f64, p.sup_diff)).collect::<Vec<_>>())?;
    let mut w = CsvWriter::new(open_out(args.out.as_deref())?, &preamble("rate", &run)?, &["n", "sup_diff", "argmax_t"])?;
    for p in &points {
        w.row(&[p.n.to_string(), fmt_sig(p.sup_diff), fmt_sig(p.argmax_t)])?;
    }
    w.finish()?;
    let summary = RateSummary {
        strictly_decreasing: points.windows(2).all(|w| w[1].sup_diff < w[0].sup_diff),
        points,
        rate_fit: fit,
        beyond_cap_fraction: draws.beyond_cap_fraction(),
    };
    write_summary(args.out.as_deref(), &summary)?;
    Ok(Outcome::Success)
}
