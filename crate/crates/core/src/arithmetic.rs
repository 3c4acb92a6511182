//! Exact integer arithmetic shared by the other modules.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::{par, Error, Result};

/// Trial division bound before switching to Miller-Rabin and Pollard rho.
pub const TRIAL_DIVISION_LIMIT: u64 = 10_000_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(modulus, p_1, p_2, ...)`: the gcd of a positive modulus with integer parameters.
pub fn gcd_with(modulus: u64, params: &[i64]) -> u64 {
    params
        .iter()
        .fold(modulus, |g, &p| gcd(g, p.unsigned_abs()))
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// `a mod q` in `[0, q)` for any signed `a`.
#[inline]
pub fn residue(a: i128, q: u64) -> u64 {
    a.rem_euclid(q as i128) as u64
}

/// The inverse of `a` modulo `q`, in `[0, q)`. For `q = 1` the answer is 0.
pub fn mod_inverse(a: i128, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    if q == 1 {
        return Ok(0);
    }
    let (g, x, _) = ext_gcd(residue(a, q) as i128, q as i128);
    if g != 1 {
        return Err(Error::NonInvertible { a, q });
    }
    Ok(residue(x, q))
}

/// Exponent of the prime `p` in `n` (`n > 0`).
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0 && p > 1);
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // Bases known to be sufficient below 2^64.
    'witness: for a in [2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; `n` must be an odd composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 0;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

/// Prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// The prime powers `p^e` exactly dividing the value, in prime order.
    pub fn prime_powers(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, e)| p.pow(e))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_squarefull(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e >= 2)
    }

    /// Euler's totient.
    pub fn totient(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

/// Factors `n >= 1` by trial division, then Miller-Rabin and Pollard rho for
/// any cofactor left above [`TRIAL_DIVISION_LIMIT`].
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::invalid("cannot factor 0"));
    }
    let mut primes: Vec<u64> = Vec::new();
    let mut rem = n;
    for p in [2u64, 3] {
        while rem.is_multiple_of(p) {
            primes.push(p);
            rem /= p;
        }
    }
    let mut d = 5u64;
    let mut step = 2u64;
    let mut checked_prime = false;
    while d <= TRIAL_DIVISION_LIMIT && d * d <= rem {
        if !checked_prime && d > 1 << 16 {
            // Large prime cofactors would otherwise cost the full trial range.
            if is_prime(rem) {
                break;
            }
            checked_prime = true;
        }
        while rem.is_multiple_of(d) {
            primes.push(d);
            rem /= d;
            checked_prime = false;
        }
        d += step;
        step = 6 - step;
    }
    if rem > 1 {
        let mut stack = vec![rem];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime(m) {
                primes.push(m);
            } else {
                let f = pollard_rho(m);
                stack.push(f);
                stack.push(m / f);
            }
        }
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { value: n, factors })
}

/// Number of distinct primes dividing `n`.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.omega())
}

/// Splits `q = q0 * q1` with `q0` supported on {2, 3} and `gcd(q1, 6) = 1`.
pub fn split_six_smooth(q: u64) -> Result<(u64, u64)> {
    if q == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    let mut q1 = q;
    while q1.is_multiple_of(2) {
        q1 /= 2;
    }
    while q1.is_multiple_of(3) {
        q1 /= 3;
    }
    Ok((q / q1, q1))
}

/// Splits `c1` (coprime to 6) as `u * v` with `u` squarefree, `v` squarefull.
pub fn split_squarefree_squarefull(c1: u64) -> Result<(u64, u64)> {
    if c1 == 0 || gcd(c1, 6) != 1 {
        return Err(Error::invalid(format!("{c1} is not a positive integer coprime to 6")));
    }
    Ok(split_factored_squarefree(&factorize(c1)?))
}

pub(crate) fn split_factored_squarefree(f: &Factorization) -> (u64, u64) {
    f.factors()
        .iter()
        .fold((1, 1), |(u, v), &(p, e)| if e == 1 { (u * p, v) } else { (u, v * p.pow(e)) })
}

/// `e(num/den) = exp(2 pi i num/den)` for `0 <= num < den`.
///
/// The angle is reduced by quarter turns in exact integer arithmetic first,
/// so the trig call only ever sees an argument in `[-pi/4, pi/4]`, and
/// quarter-turn phases (`1, i, -1, -i`) come out exact.
#[inline]
pub fn unit_phase(num: u64, den: u64) -> Complex64 {
    debug_assert!(den > 0 && num < den);
    let four = 4 * num as u128;
    let d = den as u128;
    let mut k = four / d;
    let mut r = (four % d) as i128;
    if 2 * r > den as i128 {
        k += 1;
        r -= den as i128;
    }
    let (s, c) = (FRAC_PI_2 * (r as f64 / den as f64)).sin_cos();
    match k & 3 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

/// A reduced fraction `numerator/denominator` with numerator in `[0, denominator)`,
/// standing for the root of unity `e(numerator/denominator)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalPhase {
    numerator: u64,
    denominator: u64,
}

impl RationalPhase {
    pub fn new(numerator: i128, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::invalid("phase denominator must be positive"));
        }
        let num = residue(numerator, denominator);
        let g = gcd(num, denominator);
        Ok(Self {
            numerator: num / g,
            denominator: denominator / g,
        })
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn eval(&self) -> Complex64 {
        unit_phase(self.numerator, self.denominator)
    }
}

/// Barrett reduction for a fixed modulus below 2^32.
#[derive(Debug, Clone, Copy)]
pub struct Barrett {
    modulus: u64,
    factor: u64,
}

impl Barrett {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus > 0 && modulus < 1 << 32, "Barrett modulus out of range");
        let factor = if modulus == 1 { 0 } else { (u128::from(u64::MAX) / modulus as u128) as u64 };
        Self { modulus, factor }
    }

    #[inline(always)]
    pub fn reduce(&self, x: u64) -> u64 {
        if self.modulus == 1 {
            return 0;
        }
        let q = ((x as u128 * self.factor as u128) >> 64) as u64;
        let mut r = x - q * self.modulus;
        while r >= self.modulus {
            r -= self.modulus;
        }
        r
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        iter.into_iter().for_each(|x| s.add(x));
        s
    }
}

const SIEVE_SEGMENT: usize = 1 << 16;

fn small_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Distinct-prime counts `omega(c)` for `c` in `[lo, hi)`, given all primes up to `sqrt(hi - 1)`.
fn omega_segment(lo: u64, hi: u64, primes: &[u64]) -> Vec<u8> {
    let len = (hi - lo) as usize;
    let mut om = vec![0u8; len];
    let mut prod = vec![1u64; len];
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let first = lo.div_ceil(p) * p;
        let mut i = (first - lo) as usize;
        while i < len {
            om[i] += 1;
            prod[i] *= p;
            i += p as usize;
        }
        let mut pk = p * p;
        while pk < hi {
            let first = lo.div_ceil(pk) * pk;
            let mut i = (first - lo) as usize;
            while i < len {
                prod[i] *= p;
                i += pk as usize;
            }
            match pk.checked_mul(p) {
                Some(next) => pk = next,
                None => break,
            }
        }
    }
    for (i, (o, &pr)) in om.iter_mut().zip(&prod).enumerate() {
        // What is left after removing primes <= sqrt(hi) is 1 or one large prime.
        if pr < lo + i as u64 {
            *o += 1;
        }
    }
    om
}

/// `omega(c)` for every `c` in `1..=limit`; index 0 holds 0.
pub fn omega_table(limit: u64) -> Vec<u8> {
    let primes = small_primes((limit as f64).sqrt() as u64 + 1);
    let parts = par::map_chunks(limit as usize, SIEVE_SEGMENT, |r| {
        omega_segment(r.start as u64 + 1, r.end as u64 + 1, &primes)
    });
    let mut out = Vec::with_capacity(limit as usize + 1);
    out.push(0);
    parts.into_iter().for_each(|p| out.extend(p));
    out
}

fn inverse_power(gamma: f64) -> impl Fn(f64) -> f64 {
    move |c: f64| {
        if gamma == 0.0 {
            1.0
        } else if gamma == 0.5 {
            1.0 / c.sqrt()
        } else if gamma == 1.0 {
            1.0 / c
        } else if gamma == 1.5 {
            1.0 / (c * c.sqrt())
        } else {
            c.powf(-gamma)
        }
    }
}

/// `sum_{c <= x} 3^omega(c) / c^gamma` at each checkpoint `x` (ascending).
///
/// One segmented sieve pass up to the largest checkpoint; segment sums are
/// compensated and merged in segment order.
pub fn partial_sums_3omega(checkpoints: &[u64], gamma: f64) -> Result<Vec<f64>> {
    if checkpoints.is_empty() {
        return Ok(Vec::new());
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("checkpoints must be positive and ascending"));
    }
    if !gamma.is_finite() {
        return Err(Error::invalid("gamma must be finite"));
    }
    let max = *checkpoints.last().unwrap();
    let primes = small_primes((max as f64).sqrt() as u64 + 1);
    let weight = inverse_power(gamma);
    let pow3: Vec<f64> = (0..32).map(|k| 3f64.powi(k)).collect();

    struct Segment {
        total: CompensatedSum,
        marks: Vec<(usize, CompensatedSum)>,
    }
    let segments = par::map_chunks(max as usize, SIEVE_SEGMENT, |r| {
        let lo = r.start as u64 + 1;
        let hi = r.end as u64 + 1;
        let om = omega_segment(lo, hi, &primes);
        let mut total = CompensatedSum::default();
        let mut marks = Vec::new();
        let mut next = checkpoints.partition_point(|&x| x < lo);
        for (i, &o) in om.iter().enumerate() {
            let c = lo + i as u64;
            total.add(pow3[o as usize] * weight(c as f64));
            while next < checkpoints.len() && checkpoints[next] == c {
                marks.push((next, total));
                next += 1;
            }
        }
        Segment { total, marks }
    });

    let mut out = vec![0.0; checkpoints.len()];
    let mut running = CompensatedSum::default();
    for seg in &segments {
        for (idx, partial) in &seg.marks {
            let mut v = running;
            v.merge(partial);
            out[*idx] = v.value();
        }
        running.merge(&seg.total);
    }
    Ok(out)
}

/// `sum_{c <= x} 3^omega(c) / c^gamma`.
pub fn partial_sum_3omega(x: u64, gamma: f64) -> Result<f64> {
    Ok(partial_sums_3omega(&[x], gamma)?[0])
}
