use std::fmt;

use serde::{Deserialize, Serialize};

use super::{s_lattice_sum, t_2m_delta, t_pm_cubic, t_q_direct, ExpSumResult};
use crate::arithmetic::{factorize, gcd_with, is_prime, split_factored_squarefree, split_six_smooth, valuation};
use crate::{thresholds, Error, Result};

/// Relative slack applied before a ratio counts as a violation.
const RATIO_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lemma {
    /// Prime modulus, square-root cancellation.
    Weil,
    /// Odd prime powers.
    Lemma2,
    /// Powers of two, `T_{2^m}(A, B; delta)`.
    Lemma2Prime,
    /// General moduli via the six-smooth split.
    Lemma3,
    /// The two-frequency lattice sum.
    LemmaExpo,
    /// The three-frequency lattice sum.
    LemmaNewExpo,
    /// `T_{p^m}(A, B, C)`.
    CubicPrimePower,
}

impl Lemma {
    pub const ALL: [Lemma; 7] = [
        Lemma::Weil,
        Lemma::Lemma2,
        Lemma::Lemma2Prime,
        Lemma::Lemma3,
        Lemma::LemmaExpo,
        Lemma::LemmaNewExpo,
        Lemma::CubicPrimePower,
    ];

    /// Lemmas whose right-hand side carries an explicit constant.
    pub fn is_explicit(self) -> bool {
        matches!(self, Lemma::Weil | Lemma::Lemma2 | Lemma::Lemma2Prime | Lemma::Lemma3)
    }

    /// Short command-line name.
    pub fn short_name(self) -> &'static str {
        match self {
            Lemma::Weil => "weil",
            Lemma::Lemma2 => "l2",
            Lemma::Lemma2Prime => "l2p",
            Lemma::Lemma3 => "l3",
            Lemma::LemmaExpo => "expo",
            Lemma::LemmaNewExpo => "newexpo",
            Lemma::CubicPrimePower => "cubic",
        }
    }

    pub fn from_short_name(s: &str) -> Option<Lemma> {
        Lemma::ALL.into_iter().find(|l| l.short_name() == s)
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Constants standing in for the unspecified implied constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmpiricalConstants {
    /// Threshold on `|sum| / rhs` for the lemmas stated with `<<`.
    pub c_expo: f64,
    /// Stand-in for the per-prime constant `K` of the three-frequency bound.
    pub k_emp: f64,
}

impl Default for EmpiricalConstants {
    fn default() -> Self {
        Self {
            c_expo: thresholds::C_EXPO,
            k_emp: thresholds::K_EMP,
        }
    }
}

/// One bound instance: the lemma together with the parameters of its sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lemma")]
pub enum BoundCase {
    Weil { p: u64, a: i64, b: i64 },
    Lemma2 { p: u64, m: u32, a: i64, b: i64 },
    Lemma2Prime { m: u32, delta: u32, a: i64, b: i64 },
    Lemma3 { q: u64, a: i64, b: i64 },
    Expo { c: u64, l: i64, n: i64 },
    NewExpo { c: u64, k: i64, l: i64, n: i64 },
    Cubic { p: u64, m: u32, a: i64, b: i64, c: i64 },
}

fn checked_pow(p: u64, m: u32) -> Result<u64> {
    p.checked_pow(m)
        .ok_or_else(|| Error::Overflow(format!("{p}^{m} overflows")))
}

impl BoundCase {
    pub fn lemma(&self) -> Lemma {
        match self {
            BoundCase::Weil { .. } => Lemma::Weil,
            BoundCase::Lemma2 { .. } => Lemma::Lemma2,
            BoundCase::Lemma2Prime { .. } => Lemma::Lemma2Prime,
            BoundCase::Lemma3 { .. } => Lemma::Lemma3,
            BoundCase::Expo { .. } => Lemma::LemmaExpo,
            BoundCase::NewExpo { .. } => Lemma::LemmaNewExpo,
            BoundCase::Cubic { .. } => Lemma::CubicPrimePower,
        }
    }

    /// The modulus of the underlying sum.
    pub fn modulus(&self) -> Result<u64> {
        Ok(match *self {
            BoundCase::Weil { p, .. } => p,
            BoundCase::Lemma2 { p, m, .. } | BoundCase::Cubic { p, m, .. } => checked_pow(p, m)?,
            BoundCase::Lemma2Prime { m, .. } => checked_pow(2, m)?,
            BoundCase::Lemma3 { q, .. } => q,
            BoundCase::Expo { c, .. } | BoundCase::NewExpo { c, .. } => c,
        })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            BoundCase::Weil { p, .. } if !is_prime(p) => Err(Error::invalid(format!("{p} is not prime"))),
            BoundCase::Lemma2 { p, m, .. } if !is_prime(p) || p == 2 || m == 0 => {
                Err(Error::invalid(format!("need an odd prime power, got {p}^{m}")))
            }
            BoundCase::Cubic { p, m, .. } if !is_prime(p) || m == 0 => {
                Err(Error::invalid(format!("need a prime power, got {p}^{m}")))
            }
            BoundCase::Lemma2Prime { m, delta, .. } if m == 0 || delta > 1 => {
                Err(Error::invalid("need m >= 1 and delta in {0, 1}"))
            }
            BoundCase::Lemma3 { q: 0, .. } | BoundCase::Expo { c: 0, .. } | BoundCase::NewExpo { c: 0, .. } => {
                Err(Error::invalid("modulus must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Evaluates the sum through the direct path.
    pub fn evaluate(&self) -> Result<ExpSumResult> {
        self.validate()?;
        match *self {
            BoundCase::Weil { p, a, b } => t_q_direct(a, b, p),
            BoundCase::Lemma2 { p, m, a, b } => t_q_direct(a, b, checked_pow(p, m)?),
            BoundCase::Lemma2Prime { m, delta, a, b } => t_2m_delta(a, b, m, delta),
            BoundCase::Lemma3 { q, a, b } => t_q_direct(a, b, q),
            BoundCase::Expo { c, l, n } => s_lattice_sum(0, l, n, c),
            BoundCase::NewExpo { c, k, l, n } => s_lattice_sum(k, l, n, c),
            BoundCase::Cubic { p, m, a, b, c } => t_pm_cubic(a, b, c, p, m),
        }
    }

    /// The right-hand side of the lemma. For the `<<` lemmas this is the
    /// displayed expression without an implied constant (with `K` replaced by
    /// `k_emp` in the three-frequency case).
    pub fn bound(&self, constants: &EmpiricalConstants) -> Result<f64> {
        self.validate()?;
        let g = |q: u64, params: &[i64]| gcd_with(q, params) as f64;
        Ok(match *self {
            BoundCase::Weil { p, a, b } => 2.0 * (p as f64).sqrt() * g(p, &[a, b]).sqrt(),
            BoundCase::Lemma2 { p, m, a, b } => {
                let q = checked_pow(p, m)?;
                if p > 3 {
                    3.0 * (p as f64).powf(m as f64 / 2.0) * g(q, &[a, b]).sqrt()
                } else {
                    3f64.powf(1.0 + 0.75 * m as f64) * g(q, &[a, b]).powf(0.25)
                }
            }
            BoundCase::Lemma2Prime { m, a, b, .. } => {
                6.0 * 2f64.powf(0.75 * m as f64) * g(checked_pow(2, m)?, &[a, b]).powf(0.25)
            }
            BoundCase::Lemma3 { q, a, b } => {
                let (q0, q1) = split_six_smooth(q)?;
                18.0 * 3f64.powi(factorize(q1)?.omega() as i32) * six_smooth_bracket(q0, q1, &[a, b])
            }
            BoundCase::Expo { c, l, n } => {
                let (c0, c1) = split_six_smooth(c)?;
                3f64.powi(factorize(c1)?.omega() as i32) * six_smooth_bracket(c0, c1, &[n, l])
            }
            BoundCase::NewExpo { c, k, l, n } => {
                let (c0, c1) = split_six_smooth(c)?;
                let (u, v) = split_factored_squarefree(&factorize(c1)?);
                let params = [k, n, l];
                constants.k_emp.powi(factorize(c)?.omega() as i32)
                    * (c0 as f64).powf(0.75)
                    * (u as f64).sqrt()
                    * (v as f64).powf(2.0 / 3.0)
                    * g(c0, &params).powf(0.25)
                    * g(u, &params).sqrt()
                    * g(v, &params).powf(1.0 / 3.0)
            }
            BoundCase::Cubic { p, m, a, b, c } => {
                let q = checked_pow(p, m)?;
                if m == 1 {
                    2.0 * (p as f64).sqrt() * g(p, &[a, b, c]).sqrt()
                } else {
                    // t = v_p((2A, B, C)), infinite when all three vanish mod p^m.
                    let t = match gcd_with(q, &[2 * a, b, c]) {
                        d if d == q => m,
                        d => valuation(d, p).min(m),
                    };
                    let (e_m, e_t) = if p == 3 { (0.75, 0.25) } else { (2.0 / 3.0, 1.0 / 3.0) };
                    (p as f64).powf(e_m * m as f64 + e_t * t as f64)
                }
            }
        })
    }

    /// The ratio a report must not exceed.
    pub fn threshold(&self, constants: &EmpiricalConstants) -> f64 {
        if self.lemma().is_explicit() {
            1.0
        } else {
            constants.c_expo
        }
    }
}

fn six_smooth_bracket(q0: u64, q1: u64, params: &[i64]) -> f64 {
    (q0 as f64).powf(0.75)
        * (q1 as f64).sqrt()
        * (gcd_with(q0, params) as f64).powf(0.25)
        * (gcd_with(q1, params) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub lemma: Lemma,
    pub case: BoundCase,
    pub sum_abs: f64,
    pub bound: f64,
    /// `sum_abs / bound`, with `0/0 = 0`.
    pub ratio: f64,
    pub threshold: f64,
}

impl BoundReport {
    /// Builds the report for an already evaluated `|sum|`, without checking it.
    pub fn new(case: BoundCase, sum_abs: f64, constants: &EmpiricalConstants) -> Result<Self> {
        let bound = case.bound(constants)?;
        let ratio = if sum_abs == 0.0 { 0.0 } else { sum_abs / bound };
        Ok(Self {
            lemma: case.lemma(),
            case,
            sum_abs,
            bound,
            ratio,
            threshold: case.threshold(constants),
        })
    }

    pub fn is_violation(&self) -> bool {
        !(self.ratio <= self.threshold * (1.0 + RATIO_SLACK))
    }

    /// Turns a violating report into [`Error::BoundViolated`].
    pub fn check(self) -> Result<Self> {
        if self.is_violation() {
            Err(Error::BoundViolated(Box::new(self)))
        } else {
            Ok(self)
        }
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:?}: |sum| = {:.12}, bound = {:.12}, ratio = {:.12} > {}",
            self.lemma, self.case, self.sum_abs, self.bound, self.ratio, self.threshold
        )
    }
}

/// Evaluates the sum of `case` directly and compares it with the lemma's bound.
pub fn bound_report(case: BoundCase, constants: &EmpiricalConstants) -> Result<BoundReport> {
    let abs = case.evaluate()?.abs();
    BoundReport::new(case, abs, constants)?.check()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(case: BoundCase) -> Result<BoundReport> {
        bound_report(case, &EmpiricalConstants::default())
    }

    #[test]
    fn weil_small_prime() {
        let r = report(BoundCase::Weil { p: 7, a: 1, b: 1 }).unwrap();
        assert!(r.sum_abs <= 2.0 * 7f64.sqrt());
        assert_eq!(r.threshold, 1.0);
    }

    #[test]
    fn weil_constant_two_is_exceeded() {
        // |T_61(1, 25)| = 17.7019... > 2 sqrt(61).
        match report(BoundCase::Weil { p: 61, a: 1, b: 25 }) {
            Err(Error::BoundViolated(r)) => {
                assert!((r.sum_abs - 17.7019).abs() < 1e-3);
                assert!(r.ratio > 1.13 && r.ratio < 1.14);
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn lemma3_trivial_modulus() {
        let r = report(BoundCase::Lemma3 { q: 1, a: 5, b: -2 }).unwrap();
        assert_eq!(r.bound, 18.0);
        assert_eq!(r.sum_abs, 1.0);
        assert!((r.ratio - 1.0 / 18.0).abs() < 1e-15);
    }

    #[test]
    fn zero_over_zero_is_zero() {
        let case = BoundCase::Lemma3 { q: 360, a: 7, b: 11 };
        let r = BoundReport::new(case, 0.0, &EmpiricalConstants::default()).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn lemma2_branches() {
        let c = EmpiricalConstants::default();
        let b = BoundCase::Lemma2 { p: 5, m: 2, a: 5, b: 10 }.bound(&c).unwrap();
        assert!((b - 3.0 * 5.0 * 5f64.sqrt()).abs() < 1e-12);
        let b = BoundCase::Lemma2 { p: 3, m: 4, a: 9, b: 0 }.bound(&c).unwrap();
        assert!((b - 3f64.powi(4) * 3f64.sqrt()).abs() < 1e-9);
        assert!(BoundCase::Lemma2 { p: 2, m: 3, a: 1, b: 1 }.bound(&c).is_err());
    }

    #[test]
    fn cubic_valuation() {
        let c = EmpiricalConstants::default();
        // t = v_5((2, 5, 25)) = 0.
        let b = BoundCase::Cubic { p: 5, m: 3, a: 1, b: 5, c: 25 }.bound(&c).unwrap();
        assert!((b - 25.0).abs() < 1e-9);
        // t = 1.
        let b = BoundCase::Cubic { p: 5, m: 3, a: 5, b: 5, c: 25 }.bound(&c).unwrap();
        assert!((b - 5f64.powf(7.0 / 3.0)).abs() < 1e-9);
        // Everything divisible by p^m: t = m.
        let b = BoundCase::Cubic { p: 3, m: 2, a: 0, b: 9, c: 0 }.bound(&c).unwrap();
        assert!((b - 9.0).abs() < 1e-9);
    }

    #[test]
    fn new_expo_at_one() {
        let r = report(BoundCase::NewExpo { c: 1, k: 0, l: 3, n: 4 }).unwrap();
        assert_eq!(r.bound, 1.0);
        assert!((r.sum_abs - 2.0).abs() < 1e-12);
        assert_eq!(r.threshold, 64.0);
    }

    #[test]
    fn short_names_round_trip() {
        for l in Lemma::ALL {
            assert_eq!(Lemma::from_short_name(l.short_name()), Some(l));
        }
    }
}
