use eqdist::arithmetic::{factorize, gcd, mod_inverse};
use eqdist::expsums::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn assert_close(z: Complex64, re: f64, im: f64, tol: f64) {
    assert!(
        (z.re - re).abs() <= tol && (z.im - im).abs() <= tol,
        "{z} != {re} + {im}i"
    );
}

// Reference values below were computed with 30-digit arithmetic by direct summation.

#[test]
fn tq_reference_values() {
    assert_close(t_q_direct(1, 1, 3).unwrap().value, 0.5, -0.866_025_403_784_438_6, 1e-12);
    assert_close(t_q_direct(7, 11, 360).unwrap().value, 0.0, 0.0, 1e-10);
    assert_close(t_q_direct(7, 11, 1001).unwrap().value, 11.723_325_255_532_565, -0.630_164_017_595_933_3, 1e-10);
    assert_close(
        t_q_direct(-123456789, 987654321, 2310).unwrap().value,
        -2.812_506_294_197_516,
        -3.729_418_359_303_511_3,
        1e-10,
    );
}

#[test]
fn factored_reference_values() {
    assert_close(t_q_factored(7, 11, 360).unwrap().value, 0.0, 0.0, 1e-10);
    assert_close(t_q_factored(7, 11, 1001).unwrap().value, 11.723_325_255_532_565, -0.630_164_017_595_933_3, 1e-10);
    let r = t_q_factored(0, 0, 1001).unwrap();
    assert_close(r.value, 720.0, 0.0, 1e-9);
    assert_eq!(r.path, EvalPath::Factored);
    assert_eq!(r.terms, 720);
}

#[test]
fn t2m_reference_value() {
    let r = t_2m_delta(3, 5, 4, 1).unwrap();
    assert_close(r.value, -3.325_878_449_210_181, 2.222_280_932_078_408_7, 1e-12);
    assert_eq!(r.terms, 8);
}

#[test]
fn cubic_reference_values() {
    let r = t_pm_cubic(1, 2, 3, 5, 2).unwrap();
    assert_close(r.value, 0.0, 0.0, 1e-12);
    assert_eq!(r.terms, 20);
    assert_close(t_pm_cubic(2, 3, 7, 7, 2).unwrap().value, 2.457_414_759_175_244_4, -6.645_681_919_969_419_5, 1e-11);
    assert_close(t_pm_cubic(1, 1, 1, 3, 3).unwrap().value, 0.0, 0.0, 1e-11);
}

#[test]
fn lattice_reference_values() {
    let r = s_lattice_sum(3, 2, 5, 12).unwrap();
    assert_close(r.value, 2.243_942_107_187_724, -1.721_837_338_307_517_6, 1e-12);
    assert_eq!(r.terms, 8);
    assert_close(s_lattice_sum(0, 7, 4, 1).unwrap().value, 2.0, 0.0, 1e-12);
    assert_close(s_lattice_sum(1, 3, 7, 15).unwrap().value, 0.624_060_409_920_890_8, -2.091_525_908_821_016_5, 1e-11);
    assert_close(s_lattice_sum(-4, 9, 2, 64).unwrap().value, 3.887_682_878_452_222_4, -15.520_500_051_112_704, 1e-10);
}

#[test]
fn trivial_counts() {
    for q in 1..200u64 {
        let r = t_q_direct(0, 0, q).unwrap();
        assert_close(r.value, factorize(q).unwrap().totient() as f64, 0.0, 1e-9);
        assert_eq!(r.terms, factorize(q).unwrap().totient());
    }
}

#[test]
fn factored_matches_direct_exhaustive_moduli() {
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % (1 << 41)) as i64 - (1 << 40) + 1
    };
    for q in 1..=2000u64 {
        let direct = TqKernel::new(q).unwrap();
        let factored = FactoredTqKernel::new(q).unwrap();
        for _ in 0..100 {
            let (a, b) = (next(), next());
            let d = direct.eval(a, b).unwrap().value;
            let f = factored.eval(a, b).unwrap().value;
            assert!((d.re - f.re).abs() <= 1e-9 && (d.im - f.im).abs() <= 1e-9, "q={q} A={a} B={b}: {d} vs {f}");
        }
    }
}

fn param() -> impl Strategy<Value = i64> {
    -(1i64 << 40) + 1..(1i64 << 40)
}

proptest! {
    #[test]
    fn conjugation_symmetry(a in param(), b in param(), q in 1u64..3000) {
        let z = t_q_direct(a, b, q).unwrap().value;
        let w = t_q_direct(-a, -b, q).unwrap().value;
        prop_assert!((z.conj() - w).norm() <= 1e-12);
    }

    #[test]
    fn trivial_bound_holds(a in param(), b in param(), q in 1u64..3000) {
        let r = t_q_direct(a, b, q).unwrap();
        prop_assert!(r.abs() <= r.terms as f64 + 1e-9);
    }

    #[test]
    fn delta_one_doubles_the_range(a in param(), b in -(1i64 << 39)..(1i64 << 39), m in 1u32..12) {
        let lhs = t_2m_delta(a, b, m, 1).unwrap().value;
        let rhs = t_2m_delta(a, 2 * b, m + 1, 0).unwrap().value / 2.0;
        prop_assert!((lhs - rhs).norm() <= 1e-9);
    }

    #[test]
    fn cubic_without_linear_term(a in param(), b in param(), pm in prop::sample::select(vec![(3u64, 3u32), (5, 2), (7, 3), (11, 1), (13, 2)])) {
        let (p, m) = pm;
        let c = t_pm_cubic(a, b, 0, p, m).unwrap().value;
        let d = t_q_direct(a, b, p.pow(m)).unwrap().value;
        prop_assert!((c - d).norm() <= 1e-9);
    }

    // For odd c the even d give T_c(-n, 2bar l); for even n the odd d give T_2c(-n/2, 2l).
    #[test]
    fn lattice_sum_splits(l in -(1i64 << 39)..(1i64 << 39), half_n in -(1i64 << 38)..(1i64 << 38), c in (0u64..500).prop_map(|c| 2 * c + 1)) {
        let n = 2 * half_n;
        let s = s_lattice_sum(0, l, n, c).unwrap().value;
        let two_bar = mod_inverse(2, c).unwrap() as i128;
        let l2 = ((two_bar * l as i128).rem_euclid(c as i128)) as i64;
        let s1 = t_q_direct(-n, l2, c).unwrap().value;
        let s2 = t_q_direct(-half_n, 2 * l, 2 * c).unwrap().value;
        prop_assert!((s - s1 - s2).norm() <= 1e-9);
    }

    #[test]
    fn lattice_sum_term_count(k in param(), l in param(), n in param(), c in 1u64..400) {
        let r = s_lattice_sum(k, l, n, c).unwrap();
        let count = (0..2 * c).filter(|&d| gcd(d, c) == 1).count() as u64;
        prop_assert_eq!(r.terms, count);
        prop_assert!(r.abs() <= count as f64 + 1e-9);
    }
}
