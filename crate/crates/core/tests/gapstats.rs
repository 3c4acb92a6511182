use eqdist::gapstats::{gaps_of, perfect_square_consistency, sqrt_fractional_parts, t_grid};
use proptest::prelude::*;

/// `(t, count of gaps below t / N, sigma_N(t))`.
type Row = (f64, u64, f64);

// Exact counts from 60-digit decimal square roots.
#[test]
fn frozen_gap_statistics() {
    let cases: [(u64, [Row; 3], f64); 2] = [
        (
            1000,
            [(0.5, 318, 0.0650068021459969), (1.0, 599, 0.278428506378386), (2.5, 959, 0.8155011516069852)],
            16.13323034066492,
        ),
        (
            12345,
            [(0.5, 3860, 0.06912104092045258), (1.0, 7278, 0.2742748420848178), (2.5, 11858, 0.8224592359437534)],
            55.85915667444263,
        ),
    ];
    for (n, rows, max_gap) in cases {
        let d = gaps_of(&sqrt_fractional_parts(n).unwrap());
        for (t, count, sigma) in rows {
            assert_eq!(d.lambda(t), count as f64 / n as f64, "lambda_{n}({t})");
            assert!((d.sigma(t) - sigma).abs() < 1e-12, "sigma_{n}({t})");
        }
        assert!((d.max_gap() * n as f64 - max_gap).abs() < 1e-9);
    }
}

#[test]
fn squares_are_consistent_exactly() {
    for s in [2u64, 10, 31, 100, 1000] {
        let r = perfect_square_consistency(s * s).unwrap();
        assert_eq!(r.max_deviation, 0.0);
    }
}

#[test]
fn out_of_range_n() {
    assert!(sqrt_fractional_parts(0).is_err());
    assert!(sqrt_fractional_parts(1_000_000_001).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap_invariants(n in 1u64..20_000) {
        let d = gaps_of(&sqrt_fractional_parts(n).unwrap());
        prop_assert_eq!(d.gaps().len() as u64, n);
        prop_assert!((d.total() - 1.0).abs() < 1e-12);
        prop_assert_eq!(d.lambda(0.0), 0.0);
        prop_assert_eq!(d.zero_gaps() as u64, n.isqrt() - 1);
        let beyond = d.max_gap() * n as f64 * (1.0 + 1e-12) + 1e-9;
        prop_assert_eq!(d.lambda(beyond), 1.0);
        prop_assert!((d.sigma(beyond) - 1.0).abs() < 1e-12);
        let grid = t_grid(8.0, 0.25).unwrap();
        for w in grid.windows(2) {
            prop_assert!(d.lambda(w[0]) <= d.lambda(w[1]));
            prop_assert!(d.sigma(w[0]) <= d.sigma(w[1]));
        }
        for &t in &grid {
            // Every gap counted by sigma is shorter than t / N.
            prop_assert!(d.sigma(t) <= t * d.lambda(t) + 1e-12);
        }
    }
}
