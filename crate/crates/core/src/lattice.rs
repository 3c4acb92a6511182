//! The affine group `ASL(2,R)`, enumeration of affine lattices `Z^2 M + xi`,
//! the gap functional `L` and Haar sampling of `ASL(2,Z)\ASL(2,R)`.
//!
//! Row vectors throughout: `(M, xi)` maps `w` to `w M + xi`, and the affine
//! lattice attached to `g = (M, xi)` is `{n M + xi : n in Z^2}`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default boundary tolerance for strip membership and zero slopes.
pub const DEFAULT_TAU: f64 = 1e-9;

/// Largest number of integer candidates an enumeration may scan.
pub const ENUMERATION_LIMIT: u64 = 100_000_000;

/// Widening applied to every half-plane before the exact membership test.
const SCAN_MARGIN: f64 = 1e-9;

type Mat = [[f64; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn row_mul(v: [f64; 2], m: &Mat) -> [f64; 2] {
    [v[0] * m[0][0] + v[1] * m[1][0], v[0] * m[0][1] + v[1] * m[1][1]]
}

fn det(m: &Mat) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// An element `(M, xi)` of `ASL(2,R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMotion {
    pub m: Mat,
    pub xi: [f64; 2],
}

impl AffineMotion {
    /// Validates `det M = 1`, relative to the size of the entries.
    pub fn new(m: Mat, xi: [f64; 2]) -> Result<Self> {
        let scale = m.iter().flatten().map(|x| x * x).sum::<f64>().max(1.0);
        let d = det(&m);
        if !d.is_finite() || (d - 1.0).abs() > 1e-10 * scale || xi.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("det M = {d}, expected 1")));
        }
        Ok(Self { m, xi })
    }

    pub fn identity() -> Self {
        Self::linear([[1.0, 0.0], [0.0, 1.0]])
    }

    fn linear(m: Mat) -> Self {
        Self { m, xi: [0.0, 0.0] }
    }

    /// The pure translation `(I, xi)`.
    pub fn translation(xi: [f64; 2]) -> Self {
        Self { xi, ..Self::identity() }
    }

    /// `u(x) = ((1, x; 0, 1), (x/2, x^2/4))`.
    pub fn u(x: f64) -> Self {
        Self {
            m: [[1.0, x], [0.0, 1.0]],
            xi: [x / 2.0, x * x / 4.0],
        }
    }

    /// `a(y) = diag(sqrt y, 1/sqrt y)`.
    pub fn a(y: f64) -> Result<Self> {
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::invalid(format!("y must be positive, got {y}")));
        }
        let s = y.sqrt();
        Ok(Self::linear([[s, 0.0], [0.0, 1.0 / s]]))
    }

    /// `n(x) = (1, x; 0, 1)` without translation.
    pub fn n(x: f64) -> Self {
        Self::linear([[1.0, x], [0.0, 1.0]])
    }

    /// Rotation by `theta`.
    pub fn k(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::linear([[c, -s], [s, c]])
    }

    pub fn det(&self) -> f64 {
        det(&self.m)
    }

    /// `(M, x)(M', x') = (M M', x M' + x')`.
    pub fn compose(&self, other: &AffineMotion) -> AffineMotion {
        let xi = row_mul(self.xi, &other.m);
        AffineMotion {
            m: mat_mul(&self.m, &other.m),
            xi: [xi[0] + other.xi[0], xi[1] + other.xi[1]],
        }
    }

    /// `(M^{-1}, -xi M^{-1})`.
    pub fn inverse(&self) -> AffineMotion {
        let d = self.det();
        let [[a, b], [c, e]] = self.m;
        let inv = [[e / d, -b / d], [-c / d, a / d]];
        let xi = row_mul(self.xi, &inv);
        AffineMotion { m: inv, xi: [-xi[0], -xi[1]] }
    }

    /// The lattice point `n M + xi`.
    pub fn point(&self, n: [i64; 2]) -> [f64; 2] {
        let p = row_mul([n[0] as f64, n[1] as f64], &self.m);
        [p[0] + self.xi[0], p[1] + self.xi[1]]
    }
}

/// `u(x) a(y)`, the point at `x` of the horocycle at height `y`.
pub fn horocycle_point(x: f64, y: f64) -> Result<AffineMotion> {
    Ok(AffineMotion::u(x).compose(&AffineMotion::a(y)?))
}

/// A lattice point in the strip `0 < w2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripPoint {
    pub w1: f64,
    pub w2: f64,
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum Shape {
    Strip { r: f64, tau: f64 },
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    Triangle { c_minus: f64, c_plus: f64 },
}

/// A bounded convex region of the `(w1, w2)`-plane with an exact membership test.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexRegion {
    shape: Shape,
    /// Closed half-planes `a . p <= c` whose intersection contains the region.
    halfplanes: Vec<([f64; 2], f64)>,
    vertices: Vec<[f64; 2]>,
}

impl ConvexRegion {
    /// `{tau < w2 < 1 - tau, |w1| <= 2 r w2 + tau}`.
    pub fn strip(r: f64, tau: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) || !(tau > 0.0 && tau <= 1e-6) {
            return Err(Error::invalid(format!("need r > 0 and tau in (0, 1e-6], got r={r}, tau={tau}")));
        }
        let (lo, hi) = (tau, 1.0 - tau);
        let halfplanes = vec![
            ([0.0, -1.0], -lo),
            ([0.0, 1.0], hi),
            ([1.0, -2.0 * r], tau),
            ([-1.0, -2.0 * r], tau),
        ];
        let half = |w2: f64| 2.0 * r * w2 + tau;
        let vertices = vec![[-half(lo), lo], [half(lo), lo], [half(hi), hi], [-half(hi), hi]];
        Ok(Self {
            shape: Shape::Strip { r, tau },
            halfplanes,
            vertices,
        })
    }

    /// The half-open box `[x0, x1) x [y0, y1)`.
    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || [x0, x1, y0, y1].iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("box must be bounded and nonempty"));
        }
        Ok(Self {
            shape: Shape::Rect { x0, x1, y0, y1 },
            halfplanes: vec![([-1.0, 0.0], -x0), ([1.0, 0.0], x1), ([0.0, -1.0], -y0), ([0.0, 1.0], y1)],
            vertices: vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
        })
    }

    /// The open triangle with vertex at the origin, top edge on `w2 = 1` and
    /// sides on `w1 = 2 c_minus w2`, `w1 = 2 c_plus w2`.
    pub fn triangle(c_minus: f64, c_plus: f64) -> Result<Self> {
        if !(c_minus < c_plus) || !c_minus.is_finite() || !c_plus.is_finite() {
            return Err(Error::invalid("need c_minus < c_plus"));
        }
        Ok(Self {
            shape: Shape::Triangle { c_minus, c_plus },
            halfplanes: vec![([0.0, 1.0], 1.0), ([1.0, -2.0 * c_plus], 0.0), ([-1.0, 2.0 * c_minus], 0.0)],
            vertices: vec![[0.0, 0.0], [2.0 * c_minus, 1.0], [2.0 * c_plus, 1.0]],
        })
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let [w1, w2] = p;
        match self.shape {
            Shape::Strip { r, tau } => w2 > tau && w2 < 1.0 - tau && w1.abs() <= 2.0 * r * w2 + tau,
            Shape::Rect { x0, x1, y0, y1 } => w1 >= x0 && w1 < x1 && w2 >= y0 && w2 < y1,
            Shape::Triangle { c_minus, c_plus } => w2 > 0.0 && w2 < 1.0 && w1 > 2.0 * c_minus * w2 && w1 < 2.0 * c_plus * w2,
        }
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let twice: f64 = (0..v.len())
            .map(|i| {
                let (p, q) = (v[i], v[(i + 1) % v.len()]);
                p[0] * q[1] - p[1] * q[0]
            })
            .sum();
        twice.abs() / 2.0
    }
}

/// Lagrange-reduces the rows of `m`. Returns the integer matrix `u` with
/// `det u = +-1` such that the rows of `u m` form a reduced basis, first row shortest.
fn reduce_basis(m: &Mat) -> [[i64; 2]; 2] {
    let mut u = [[1i64, 0], [0, 1]];
    let row = |u: &[[i64; 2]; 2], i: usize| -> [f64; 2] { row_mul([u[i][0] as f64, u[i][1] as f64], m) };
    let norm2 = |v: [f64; 2]| dot(v, v);
    if norm2(row(&u, 1)) < norm2(row(&u, 0)) {
        u.swap(0, 1);
    }
    for _ in 0..200 {
        let (b1, b2) = (row(&u, 0), row(&u, 1));
        let mu = (dot(b1, b2) / norm2(b1)).round();
        if mu != 0.0 {
            let k = mu as i64;
            u[1] = [u[1][0] - k * u[0][0], u[1][1] - k * u[0][1]];
        }
        if norm2(row(&u, 1)) < norm2(row(&u, 0)) {
            u.swap(0, 1);
        } else {
            break;
        }
    }
    u
}

/// Calls `visit` on every point of `Z^2 M + xi` lying in `region`.
pub fn for_each_point(g: &AffineMotion, region: &ConvexRegion, mut visit: impl FnMut([f64; 2])) -> Result<()> {
    let u = reduce_basis(&g.m);
    let b: Mat = [
        row_mul([u[0][0] as f64, u[0][1] as f64], &g.m),
        row_mul([u[1][0] as f64, u[1][1] as f64], &g.m),
    ];
    let d = det(&b);
    // Column of b^{-1} giving the coefficient of the second basis row.
    let dual = [-b[0][1] / d, b[0][0] / d];
    let (mut jlo, mut jhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in &region.vertices {
        let j = dot([v[0] - g.xi[0], v[1] - g.xi[1]], dual);
        jlo = jlo.min(j);
        jhi = jhi.max(j);
    }
    let jmargin = SCAN_MARGIN * (1.0 + jlo.abs().max(jhi.abs()));
    let (jlo, jhi) = ((jlo - jmargin).ceil(), (jhi + jmargin).floor());
    if jhi < jlo {
        return Ok(());
    }
    let lines = jhi - jlo + 1.0;
    if lines > ENUMERATION_LIMIT as f64 {
        return Err(Error::EnumerationOverflow {
            candidates: lines as u64,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut scanned = 0u64;
    for j in jlo as i64..=jhi as i64 {
        let base = [g.xi[0] + j as f64 * b[1][0], g.xi[1] + j as f64 * b[1][1]];
        let (mut ilo, mut ihi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut empty = false;
        for &(a, c) in &region.halfplanes {
            let slack = c - dot(a, base) + SCAN_MARGIN * (1.0 + c.abs() + dot(a, base).abs());
            let step = dot(a, b[0]);
            if step.abs() < 1e-300 {
                empty |= slack < 0.0;
            } else if step > 0.0 {
                ihi = ihi.min(slack / step);
            } else {
                ilo = ilo.max(slack / step);
            }
        }
        if empty || !(ilo <= ihi) {
            continue;
        }
        let (ilo, ihi) = (ilo.ceil(), ihi.floor());
        if ihi < ilo {
            continue;
        }
        scanned += (ihi - ilo) as u64 + 1;
        if scanned > ENUMERATION_LIMIT {
            return Err(Error::EnumerationOverflow {
                candidates: scanned,
                limit: ENUMERATION_LIMIT,
            });
        }
        for i in ilo as i64..=ihi as i64 {
            let n = [i * u[0][0] + j * u[1][0], i * u[0][1] + j * u[1][1]];
            let p = g.point(n);
            if region.contains(p) {
                visit(p);
            }
        }
    }
    Ok(())
}

pub fn points_in(g: &AffineMotion, region: &ConvexRegion) -> Result<Vec<[f64; 2]>> {
    let mut out = Vec::new();
    for_each_point(g, region, |p| out.push(p))?;
    Ok(out)
}

pub fn count_points(g: &AffineMotion, region: &ConvexRegion) -> Result<u64> {
    let mut n = 0;
    for_each_point(g, region, |_| n += 1)?;
    Ok(n)
}

/// All points with `tau < w2 < 1 - tau` and `|w1| <= 2 r w2 + tau`.
pub fn strip_points(g: &AffineMotion, r: f64, tau: f64) -> Result<Vec<StripPoint>> {
    let region = ConvexRegion::strip(r, tau)?;
    let mut out = Vec::new();
    for_each_point(g, &region, |[w1, w2]| {
        out.push(StripPoint {
            w1,
            w2,
            slope: w1 / (2.0 * w2),
        })
    })?;
    Ok(out)
}

/// Exact count of `Z^2 g` in the half-open box `[x0, x1) x [y0, y1)`.
pub fn point_count_in_box(g: &AffineMotion, x0: f64, x1: f64, y0: f64, y1: f64) -> Result<u64> {
    count_points(g, &ConvexRegion::rect(x0, x1, y0, y1)?)
}

/// `L(Gamma g)` as certified by an enumeration up to slope `cap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LValue {
    Zero,
    Finite(f64),
    /// `L > cap`.
    AtLeastCap(f64),
}

impl LValue {
    /// `1{L < t}`, or `None` when the enumeration cannot decide it (`t > cap`).
    pub fn is_below(&self, t: f64) -> Option<bool> {
        match *self {
            LValue::Zero => Some(0.0 < t),
            LValue::Finite(v) => Some(v < t),
            LValue::AtLeastCap(cap) => (t <= cap).then_some(false),
        }
    }

    /// Monotone real key: `AtLeastCap` sorts after every finite value.
    pub fn sort_key(&self) -> f64 {
        match *self {
            LValue::Zero => 0.0,
            LValue::Finite(v) => v,
            LValue::AtLeastCap(_) => f64::INFINITY,
        }
    }
}

pub fn l_value(g: &AffineMotion, cap: f64) -> Result<LValue> {
    l_value_with(g, cap, DEFAULT_TAU)
}

pub fn l_value_with(g: &AffineMotion, cap: f64, tau: f64) -> Result<LValue> {
    let region = ConvexRegion::strip(cap, tau)?;
    let (mut pos, mut neg) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut zero = false;
    for_each_point(g, &region, |[w1, w2]| {
        let s = w1 / (2.0 * w2);
        if s.abs() <= tau {
            zero = true;
        } else if s > 0.0 {
            pos = pos.min(s);
        } else {
            neg = neg.max(s);
        }
    })?;
    Ok(if zero {
        LValue::Zero
    } else if pos <= cap && neg >= -cap {
        LValue::Finite(pos - neg)
    } else {
        LValue::AtLeastCap(cap)
    })
}

/// Draws `(x, y)` from `dx dy / y^2` on the standard fundamental domain of
/// `SL(2,Z)`. Returns the point and the number of proposals used.
pub fn sample_fundamental_domain<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, u32) {
    let mut attempts = 0;
    loop {
        attempts += 1;
        let x = rng.random::<f64>() - 0.5;
        let y = (3f64.sqrt() / 2.0) / (1.0 - rng.random::<f64>());
        if x * x + y * y >= 1.0 {
            return (x, y, attempts);
        }
    }
}

/// A Haar-random point of `ASL(2,Z)\ASL(2,R)`, with the number of
/// rejection-step proposals it took.
pub fn haar_sample_counted<R: Rng + ?Sized>(rng: &mut R) -> (AffineMotion, u32) {
    let (x, y, attempts) = sample_fundamental_domain(rng);
    let theta = 2.0 * PI * rng.random::<f64>();
    let m = AffineMotion::n(x)
        .compose(&AffineMotion::a(y).expect("y > 0"))
        .compose(&AffineMotion::k(theta))
        .m;
    // Uniform on the torus R^2 / Z^2 M.
    let eta: [f64; 2] = [rng.random(), rng.random()];
    (AffineMotion { m, xi: row_mul(eta, &m) }, attempts)
}

pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> AffineMotion {
    haar_sample_counted(rng).0
}
