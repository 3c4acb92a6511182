use std::f64::consts::PI;

use eqdist::lattice::{
    count_points, for_each_point, haar_sample, l_value, points_in, AffineMotion, ConvexRegion, LValue,
};
use eqdist::par::stream_rng;
use proptest::prelude::*;

fn motion(x: f64, y: f64, theta: f64, xi: [f64; 2]) -> AffineMotion {
    let m = AffineMotion::n(x)
        .compose(&AffineMotion::a(y).unwrap())
        .compose(&AffineMotion::k(theta))
        .m;
    AffineMotion::new(m, xi).unwrap()
}

/// Every `n M + xi` with `n` in a box large enough to cover the region.
fn naive_points(g: &AffineMotion, region: &ConvexRegion, reach: f64) -> Vec<[f64; 2]> {
    let inv = g.inverse();
    let r = reach * (inv.m.iter().flatten().map(|v| v.abs()).sum::<f64>() + 1.0) + inv.xi[0].abs() + inv.xi[1].abs();
    let r = r.ceil() as i64 + 1;
    let mut out = Vec::new();
    for i in -r..=r {
        for j in -r..=r {
            let p = g.point([i, j]);
            if region.contains(p) {
                out.push(p);
            }
        }
    }
    out
}

fn sorted(mut v: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    v.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    v
}

#[test]
fn integer_lattice_counts() {
    let id = AffineMotion::identity();
    assert_eq!(count_points(&id, &ConvexRegion::rect(0.0, 3.0, 0.0, 2.0).unwrap()).unwrap(), 6);
    assert_eq!(count_points(&id, &ConvexRegion::rect(-0.5, 0.5, -0.5, 0.5).unwrap()).unwrap(), 1);
    // Open triangle with vertices (0,0), (-2,1), (4,1) contains no integer point.
    assert_eq!(count_points(&id, &ConvexRegion::triangle(-1.0, 2.0).unwrap()).unwrap(), 0);
}

#[test]
fn l_value_is_invariant_under_the_lattice_group() {
    let mut rng = stream_rng(11, 0);
    let gammas = [([[2i64, 1], [1, 1]], [3i64, -1]), ([[1, 0], [5, 1]], [0, 2]), ([[0, -1], [1, 0]], [-4, 7])];
    for _ in 0..40 {
        let g = haar_sample(&mut rng);
        let base = l_value(&g, 6.0).unwrap();
        for (a, t) in gammas {
            let af = [[a[0][0] as f64, a[0][1] as f64], [a[1][0] as f64, a[1][1] as f64]];
            let gamma = AffineMotion::new(af, [t[0] as f64, t[1] as f64]).unwrap();
            let moved = gamma.compose(&g);
            match (base, l_value(&moved, 6.0).unwrap()) {
                (LValue::Finite(x), LValue::Finite(y)) => assert!((x - y).abs() <= 1e-9 * (1.0 + x)),
                (x, y) => assert_eq!(x, y),
            }
        }
    }
}

#[test]
fn composition_matches_pointwise_action() {
    let g = motion(0.3, 2.0, 1.1, [0.2, -0.7]);
    let h = motion(-0.1, 0.5, 2.9, [1.5, 0.25]);
    let gh = g.compose(&h);
    // Z^2 (g h): n M_g M_h + xi_g M_h + xi_h, i.e. h applied to the points of g.
    let p = g.point([2, -3]);
    let q = [p[0] * h.m[0][0] + p[1] * h.m[1][0] + h.xi[0], p[0] * h.m[0][1] + p[1] * h.m[1][1] + h.xi[1]];
    let r = gh.point([2, -3]);
    assert!((q[0] - r[0]).abs() < 1e-12 && (q[1] - r[1]).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn enumeration_matches_naive_scan(
        x in -0.5f64..0.5, y in 0.1f64..6.0, theta in 0.0..2.0 * PI,
        e1 in 0.0f64..1.0, e2 in 0.0f64..1.0,
        x0 in -3.0f64..3.0, w in 0.1f64..4.0, y0 in -3.0f64..3.0, h in 0.1f64..4.0,
    ) {
        let g = motion(x, y, theta, [e1, e2]);
        let region = ConvexRegion::rect(x0, x0 + w, y0, y0 + h).unwrap();
        let reach = x0.abs().max((x0 + w).abs()).max(y0.abs()).max((y0 + h).abs());
        let fast = sorted(points_in(&g, &region).unwrap());
        let slow = sorted(naive_points(&g, &region, reach));
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn strip_enumeration_matches_naive_scan(
        x in -0.5f64..0.5, y in 0.2f64..4.0, theta in 0.0..2.0 * PI,
        e1 in 0.0f64..1.0, e2 in 0.0f64..1.0, r in 0.1f64..4.0,
    ) {
        let g = motion(x, y, theta, [e1, e2]);
        let region = ConvexRegion::strip(r, 1e-9).unwrap();
        let mut fast = Vec::new();
        for_each_point(&g, &region, |p| fast.push(p)).unwrap();
        prop_assert_eq!(sorted(fast), sorted(naive_points(&g, &region, 2.0 * r + 1.0)));
    }

    #[test]
    fn group_axioms(
        a in (-0.5f64..0.5, 0.2f64..5.0, 0.0..2.0 * PI, -2.0f64..2.0, -2.0f64..2.0),
        b in (-0.5f64..0.5, 0.2f64..5.0, 0.0..2.0 * PI, -2.0f64..2.0, -2.0f64..2.0),
        c in (-0.5f64..0.5, 0.2f64..5.0, 0.0..2.0 * PI, -2.0f64..2.0, -2.0f64..2.0),
    ) {
        let mk = |t: (f64, f64, f64, f64, f64)| motion(t.0, t.1, t.2, [t.3, t.4]);
        let (g, h, k) = (mk(a), mk(b), mk(c));
        let close = |u: &AffineMotion, v: &AffineMotion| {
            u.m.iter().flatten().chain(&u.xi).zip(v.m.iter().flatten().chain(&v.xi)).all(|(p, q)| (p - q).abs() < 1e-9)
        };
        prop_assert!(close(&g.compose(&h).compose(&k), &g.compose(&h.compose(&k))));
        prop_assert!(close(&g.compose(&g.inverse()), &AffineMotion::identity()));
        prop_assert!(close(&g.inverse().compose(&g), &AffineMotion::identity()));
        prop_assert!((g.compose(&h).det() - 1.0).abs() < 1e-9);
    }
}
