//! Complete exponential sums.
//!
//! Every sum here has the shape `sum_j e(P(x_j) / D)` where `P` is an
//! integer combination of at most three residue-valued basis functions of
//! the summation variable (its square, its modular inverse, itself). A
//! [`PhaseKernel`] precomputes those basis residues once per modulus; each
//! evaluation then reduces the exact integer phase modulo `D` and looks up
//! (or evaluates) a single root of unity per term. Nothing is accumulated
//! incrementally in floating point except the final sum of unit vectors.

mod bounds;

pub use bounds::{bound_report, BoundCase, BoundReport, EmpiricalConstants, Lemma};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{ext_gcd, factorize, is_prime, mod_inverse, residue, unit_phase, Barrett};
use crate::{Error, Result};

/// Parameters must satisfy `|x| < PARAM_LIMIT`.
pub const PARAM_LIMIT: i64 = 1 << 40;

/// Phase denominators must stay below this.
pub const DENOMINATOR_LIMIT: u64 = 1 << 31;

/// Largest denominator for which the roots of unity are tabulated.
const TABLE_LIMIT: u64 = 1 << 20;

/// Which evaluation route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalPath {
    Direct,
    Factored,
}

/// The parameters of an evaluated sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumParams {
    /// `T_q(A, B)`.
    Tq { a: i64, b: i64 },
    /// `T_{2^m}(A, B; delta)`.
    T2m { a: i64, b: i64, m: u32, delta: u32 },
    /// `T_{p^m}(A, B, C)`.
    Cubic { a: i64, b: i64, c: i64, p: u64, m: u32 },
    /// `sum_{d mod 2c, (d,c)=1} e(-n d^2/4c + l dbar/c - k d/2c)`.
    Lattice { k: i64, l: i64, n: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSumResult {
    pub value: Complex64,
    pub modulus: u64,
    pub params: SumParams,
    pub path: EvalPath,
    /// Number of summands (the trivial bound).
    pub terms: u64,
}

impl ExpSumResult {
    pub fn abs(&self) -> f64 {
        self.value.norm()
    }
}

fn check_params(params: &[i64]) -> Result<()> {
    match params.iter().find(|x| x.unsigned_abs() >= PARAM_LIMIT as u64) {
        Some(x) => Err(Error::Overflow(format!("|{x}| >= 2^40"))),
        None => Ok(()),
    }
}

/// Residue tables for one phase denominator.
#[derive(Debug, Clone)]
pub struct PhaseKernel {
    den: u64,
    barrett: Barrett,
    basis: Vec<[u32; 3]>,
    table: Option<Vec<Complex64>>,
}

impl PhaseKernel {
    fn new(den: u64, basis: Vec<[u32; 3]>) -> Result<Self> {
        if den == 0 || den >= DENOMINATOR_LIMIT {
            return Err(Error::Overflow(format!("phase denominator {den} out of range")));
        }
        let table = (den <= TABLE_LIMIT).then(|| {
            let mut t: Vec<Complex64> = (0..=den / 2).map(|k| unit_phase(k, den)).collect();
            for k in den / 2 + 1..den {
                t.push(t[(den - k) as usize].conj());
            }
            t
        });
        Ok(Self {
            den,
            barrett: Barrett::new(den),
            basis,
            table,
        })
    }

    pub fn terms(&self) -> u64 {
        self.basis.len() as u64
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    /// `sum_j e((c0 b0_j + c1 b1_j + c2 b2_j) / den)` for coefficients reduced mod `den`.
    fn eval_reduced(&self, coeffs: [u64; 3]) -> Complex64 {
        let [c0, c1, c2] = coeffs;
        let br = &self.barrett;
        let phase_of = |b: &[u32; 3]| -> u64 {
            if self.den < 1 << 20 {
                br.reduce(c0 * b[0] as u64 + c1 * b[1] as u64 + c2 * b[2] as u64)
            } else {
                let s = br.reduce(c0 * b[0] as u64) + br.reduce(c1 * b[1] as u64) + br.reduce(c2 * b[2] as u64);
                br.reduce(s)
            }
        };
        let mut acc = Complex64::new(0.0, 0.0);
        match &self.table {
            Some(t) => self.basis.iter().for_each(|b| acc += t[phase_of(b) as usize]),
            None => self.basis.iter().for_each(|b| acc += unit_phase(phase_of(b), self.den)),
        }
        let bound = self.terms() as f64;
        assert!(
            acc.norm() <= bound * (1.0 + 1e-12) + 1e-9,
            "sum exceeds trivial bound: |{acc}| > {bound}"
        );
        acc
    }

    fn eval(&self, coeffs: [i128; 3]) -> Complex64 {
        self.eval_reduced(coeffs.map(|c| residue(c, self.den)))
    }
}

/// Units modulo `q` paired with their inverses, ascending (`[(0, 0)]` for `q = 1`).
fn units_with_inverses(q: u64) -> Vec<(u64, u64)> {
    if q == 1 {
        return vec![(0, 0)];
    }
    let mut is_unit = vec![true; q as usize];
    is_unit[0] = false;
    for &(p, _) in factorize(q).expect("positive modulus").factors() {
        (0..q as usize).step_by(p as usize).for_each(|i| is_unit[i] = false);
    }
    let units: Vec<u64> = (1..q).filter(|&n| is_unit[n as usize]).collect();
    let br = Barrett::new(q);
    let mul = |x: u64, y: u64| br.reduce(x * y);
    // Batch inversion: prefix products, one inverse, then unwind.
    let mut prefix = Vec::with_capacity(units.len());
    let mut acc = 1u64;
    for &n in &units {
        acc = mul(acc, n);
        prefix.push(acc);
    }
    let mut inv = mod_inverse(acc as i128, q).expect("product of units");
    let mut out = vec![(0, 0); units.len()];
    for i in (0..units.len()).rev() {
        let before = if i == 0 { 1 } else { prefix[i - 1] };
        out[i] = (units[i], mul(inv, before));
        inv = mul(inv, units[i]);
    }
    out
}

fn square_mod(n: u64, d: u64) -> u32 {
    ((n as u128 * n as u128) % d as u128) as u32
}

/// Direct evaluator for `T_q(A, B) = sum_{n mod q, (n,q)=1} e_q(A n^2 + B nbar)`.
#[derive(Debug, Clone)]
pub struct TqKernel {
    q: u64,
    kernel: PhaseKernel,
}

impl TqKernel {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("modulus must be positive"));
        }
        if q >= DENOMINATOR_LIMIT {
            return Err(Error::Overflow(format!("modulus {q} out of range")));
        }
        let br = Barrett::new(q);
        let basis = units_with_inverses(q)
            .into_iter()
            .map(|(n, inv)| [br.reduce(n * n) as u32, inv as u32, 0])
            .collect();
        Ok(Self {
            q,
            kernel: PhaseKernel::new(q, basis)?,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn eval(&self, a: i64, b: i64) -> Result<ExpSumResult> {
        check_params(&[a, b])?;
        Ok(ExpSumResult {
            value: self.kernel.eval([a as i128, b as i128, 0]),
            modulus: self.q,
            params: SumParams::Tq { a, b },
            path: EvalPath::Direct,
            terms: self.kernel.terms(),
        })
    }
}

/// `T_q(A, B)` as a product over the prime powers `Q || q` of
/// `T_Q(w A, w B)`, where `w` is the Bezout inverse of `q/Q` modulo `Q`.
#[derive(Debug, Clone)]
pub struct FactoredTqKernel {
    q: u64,
    parts: Vec<(TqKernel, u64)>,
}

impl FactoredTqKernel {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("modulus must be positive"));
        }
        if q >= DENOMINATOR_LIMIT {
            return Err(Error::Overflow(format!("modulus {q} out of range")));
        }
        let parts = factorize(q)?
            .prime_powers()
            .map(|pq| {
                let rest = q / pq;
                // pq * x + rest * y = 1, so y inverts rest modulo pq.
                let (g, _, y) = ext_gcd(pq as i128, rest as i128);
                debug_assert_eq!(g, 1);
                Ok((TqKernel::new(pq)?, residue(y, pq)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { q, parts })
    }

    pub fn eval(&self, a: i64, b: i64) -> Result<ExpSumResult> {
        check_params(&[a, b])?;
        let mut value = Complex64::new(1.0, 0.0);
        let mut terms = 1u64;
        for (kernel, w) in &self.parts {
            let pq = kernel.modulus();
            let aw = residue(a as i128 * *w as i128, pq);
            let bw = residue(b as i128 * *w as i128, pq);
            value *= kernel.kernel.eval_reduced([aw, bw, 0]);
            terms *= kernel.kernel.terms();
        }
        Ok(ExpSumResult {
            value,
            modulus: self.q,
            params: SumParams::Tq { a, b },
            path: EvalPath::Factored,
            terms,
        })
    }
}

/// Evaluator for `T_{2^m}(A, B; delta) = sum_{n mod 2^m odd} e_{2^{m+delta}}(A n^2 + 2^delta B nbar)`,
/// `nbar` the inverse of `n` modulo `2^{m+delta}`.
#[derive(Debug, Clone)]
pub struct T2mKernel {
    m: u32,
    delta: u32,
    kernel: PhaseKernel,
}

impl T2mKernel {
    pub fn new(m: u32, delta: u32) -> Result<Self> {
        if m == 0 || delta > 1 {
            return Err(Error::invalid("need m >= 1 and delta in {0, 1}"));
        }
        if m + delta > 30 {
            return Err(Error::Overflow(format!("2^{} out of range", m + delta)));
        }
        let den = 1u64 << (m + delta);
        let basis = units_with_inverses(den)
            .into_iter()
            .take_while(|&(n, _)| n < 1 << m)
            .map(|(n, inv)| [square_mod(n, den), ((inv << delta) % den) as u32, 0])
            .collect();
        Ok(Self {
            m,
            delta,
            kernel: PhaseKernel::new(den, basis)?,
        })
    }

    pub fn eval(&self, a: i64, b: i64) -> Result<ExpSumResult> {
        check_params(&[a, b])?;
        Ok(ExpSumResult {
            value: self.kernel.eval([a as i128, b as i128, 0]),
            modulus: 1 << self.m,
            params: SumParams::T2m {
                a,
                b,
                m: self.m,
                delta: self.delta,
            },
            path: EvalPath::Direct,
            terms: self.kernel.terms(),
        })
    }
}

/// Evaluator for `T_{p^m}(A, B, C) = sum_{n mod p^m, p !| n} e_{p^m}(A n^2 + B nbar + C n)`.
#[derive(Debug, Clone)]
pub struct CubicKernel {
    p: u64,
    m: u32,
    kernel: PhaseKernel,
}

impl CubicKernel {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) || m == 0 {
            return Err(Error::invalid(format!("need a prime p and m >= 1, got p={p}, m={m}")));
        }
        let q = p
            .checked_pow(m)
            .filter(|&q| q < DENOMINATOR_LIMIT)
            .ok_or_else(|| Error::Overflow(format!("{p}^{m} out of range")))?;
        let br = Barrett::new(q);
        let basis = units_with_inverses(q)
            .into_iter()
            .map(|(n, inv)| [br.reduce(n * n) as u32, inv as u32, n as u32])
            .collect();
        Ok(Self {
            p,
            m,
            kernel: PhaseKernel::new(q, basis)?,
        })
    }

    pub fn eval(&self, a: i64, b: i64, c: i64) -> Result<ExpSumResult> {
        check_params(&[a, b, c])?;
        Ok(ExpSumResult {
            value: self.kernel.eval([a as i128, b as i128, c as i128]),
            modulus: self.kernel.denominator(),
            params: SumParams::Cubic {
                a,
                b,
                c,
                p: self.p,
                m: self.m,
            },
            path: EvalPath::Direct,
            terms: self.kernel.terms(),
        })
    }
}

/// Evaluator for `S = sum_{d mod 2c, (d,c)=1} e(-n d^2/(4c) + l dbar/c - k d/(2c))`
/// with `dbar` an inverse of `d` modulo `c`. Over the common denominator `4c`
/// the phase is `-n d^2 + 4 l dbar - 2 k d`, which does not depend on the
/// lifts chosen for `d` or `dbar`.
#[derive(Debug, Clone)]
pub struct LatticeKernel {
    c: u64,
    kernel: PhaseKernel,
}

impl LatticeKernel {
    pub fn new(c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::invalid("modulus must be positive"));
        }
        let den = c
            .checked_mul(4)
            .filter(|&d| d < DENOMINATOR_LIMIT)
            .ok_or_else(|| Error::Overflow(format!("4*{c} out of range")))?;
        let units = units_with_inverses(c);
        let basis = [0, c]
            .into_iter()
            .flat_map(|shift| units.iter().map(move |&(d, inv)| (d + shift, inv)))
            .map(|(d, inv)| [square_mod(d, den), ((4 * inv) % den) as u32, d as u32])
            .collect();
        Ok(Self {
            c,
            kernel: PhaseKernel::new(den, basis)?,
        })
    }

    pub fn eval(&self, k: i64, l: i64, n: i64) -> Result<ExpSumResult> {
        check_params(&[k, l, n])?;
        Ok(ExpSumResult {
            value: self.kernel.eval([-(n as i128), l as i128, -2 * k as i128]),
            modulus: self.c,
            params: SumParams::Lattice { k, l, n },
            path: EvalPath::Direct,
            terms: self.kernel.terms(),
        })
    }
}

/// `T_q(A, B)` by direct summation.
pub fn t_q_direct(a: i64, b: i64, q: u64) -> Result<ExpSumResult> {
    TqKernel::new(q)?.eval(a, b)
}

/// `T_q(A, B)` through the multiplicativity over prime powers.
pub fn t_q_factored(a: i64, b: i64, q: u64) -> Result<ExpSumResult> {
    FactoredTqKernel::new(q)?.eval(a, b)
}

/// `T_{2^m}(A, B; delta)`.
pub fn t_2m_delta(a: i64, b: i64, m: u32, delta: u32) -> Result<ExpSumResult> {
    T2mKernel::new(m, delta)?.eval(a, b)
}

/// `T_{p^m}(A, B, C)`.
pub fn t_pm_cubic(a: i64, b: i64, c: i64, p: u64, m: u32) -> Result<ExpSumResult> {
    CubicKernel::new(p, m)?.eval(a, b, c)
}

/// `S(l, n; c)` with the extra linear frequency `k` (`k = 0` is the two-frequency sum).
pub fn s_lattice_sum(k: i64, l: i64, n: i64, c: u64) -> Result<ExpSumResult> {
    LatticeKernel::new(c)?.eval(k, l, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(z: Complex64, re: f64, im: f64) -> bool {
        (z.re - re).abs() < 1e-12 && (z.im - im).abs() < 1e-12
    }

    #[test]
    fn tq_examples() {
        assert!(close(t_q_direct(5, -9, 1).unwrap().value, 1.0, 0.0));
        assert!(close(t_q_direct(0, 0, 360).unwrap().value, 96.0, 0.0));
        let r = t_q_direct(1, 1, 3).unwrap();
        assert!(close(r.value, 0.5, -(3f64.sqrt()) / 2.0));
        assert_eq!(r.terms, 2);
        assert!(close(t_q_factored(0, 0, 360).unwrap().value, 96.0, 0.0));
        assert!(close(t_q_factored(3, 4, 1).unwrap().value, 1.0, 0.0));
    }

    #[test]
    fn factored_single_prime_is_direct() {
        let d = t_q_direct(123, 456, 101).unwrap().value;
        let f = t_q_factored(123, 456, 101).unwrap().value;
        assert_eq!(d, f);
    }

    #[test]
    fn t2m_examples() {
        for (a, b) in [(0, 0), (1, 0), (1, 2), (-3, 7)] {
            let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
            assert!(close(t_2m_delta(a, b, 1, 0).unwrap().value, sign, 0.0));
        }
        assert!(close(t_2m_delta(0, 0, 6, 0).unwrap().value, 32.0, 0.0));
        assert!(t_2m_delta(1, 1, 0, 0).is_err());
        assert!(t_2m_delta(1, 1, 3, 2).is_err());
    }

    #[test]
    fn cubic_examples() {
        assert!(close(t_pm_cubic(0, 0, 0, 7, 1).unwrap().value, 6.0, 0.0));
        let c = t_pm_cubic(4, 9, 0, 5, 3).unwrap().value;
        let d = t_q_direct(4, 9, 125).unwrap().value;
        assert!((c - d).norm() < 1e-12);
        assert!(t_pm_cubic(1, 1, 1, 9, 1).is_err());
    }

    #[test]
    fn lattice_examples() {
        assert!(close(s_lattice_sum(0, 5, 4, 1).unwrap().value, 2.0, 0.0));
        // 4c | n: all phases integral apart from l dbar/c, which vanishes for l = 0.
        let r = s_lattice_sum(0, 0, 48, 12).unwrap();
        assert!(close(r.value, r.terms as f64, 0.0));
        assert_eq!(r.terms, 8);
    }

    #[test]
    fn parameter_window() {
        assert!(matches!(t_q_direct(1 << 40, 0, 7), Err(Error::Overflow(_))));
        assert!(matches!(t_q_direct(0, -(1 << 40), 7), Err(Error::Overflow(_))));
        assert!(t_q_direct((1 << 40) - 1, -(1 << 40) + 1, 7).is_ok());
        assert!(matches!(t_q_direct(1, 1, 0), Err(Error::InvalidInput(_))));
    }
}
