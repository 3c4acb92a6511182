use std::f64::consts::PI;

use eqdist::gapstats::t_grid;
use eqdist::limit_mc::{
    acceptance_rate, horocycle_integral, lambda_inf_estimate, linearity_through_origin, rate_fit, siegel_mean,
    sigma_inf_estimate, LSamples,
};
use eqdist::par;

#[test]
fn lambda_is_linear_near_zero() {
    let grid = t_grid(0.5, 0.05).unwrap();
    let est = lambda_inf_estimate(&grid, 50_000, 5, 1e-4).unwrap();
    let fit = linearity_through_origin(&est, 0.5).unwrap();
    assert!(fit.max_residual_se <= 3.0, "{fit:?}");
    assert!((fit.slope - 6.0 / (PI * PI)).abs() < 0.05, "{fit:?}");
}

#[test]
fn sigma_is_a_distribution_function() {
    let grid = t_grid(4.0, 0.25).unwrap();
    let est = sigma_inf_estimate(&grid, 20_000, 9).unwrap();
    assert_eq!(est[0].mean, 0.0);
    assert!(est.windows(2).all(|w| w[0].mean <= w[1].mean));
    assert!(est.iter().all(|e| (0.0..=1.0).contains(&e.mean)));
}

#[test]
fn siegel_and_acceptance() {
    let m = siegel_mean(1.0, 1.0, 20_000, 3).unwrap();
    assert!((m.mean - 1.0).abs() <= 4.0 * m.stderr, "{m:?}");
    let a = acceptance_rate(20_000, 3).unwrap();
    assert!((a.rate - PI / (2.0 * 3f64.sqrt())).abs() <= 4.0 * a.stderr, "{a:?}");
}

#[test]
fn sequential_and_parallel_agree() {
    let grid = t_grid(2.0, 0.5).unwrap();
    let par_run = LSamples::draw(5000, 21, 2.0).unwrap().lambda(&grid, 1e-4).unwrap();
    let seq_run = par::sequential(|| LSamples::draw(5000, 21, 2.0).unwrap().lambda(&grid, 1e-4).unwrap());
    assert_eq!(par_run, seq_run);
    let h1 = horocycle_integral(&grid, 0.01, 4000, 2.0).unwrap();
    let h2 = par::sequential(|| horocycle_integral(&grid, 0.01, 4000, 2.0).unwrap());
    assert_eq!(h1, h2);
}

#[test]
fn horocycle_average_is_monotone_in_t() {
    let grid = t_grid(3.0, 0.25).unwrap();
    let mu = horocycle_integral(&grid, 0.01, 4000, 3.0).unwrap();
    assert_eq!(mu[0], 0.0);
    assert!(mu.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn cap_below_grid_is_rejected() {
    assert!(LSamples::draw(100, 1, 2.0).unwrap().sigma(&[0.0, 3.0]).is_err());
    assert!(horocycle_integral(&[0.0, 1.0], 0.1, 50, 1.0).is_err());
}

#[test]
fn rate_fit_recovers_power_law() {
    let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5, 1e6].iter().map(|&n: &f64| (n, 0.7 * n.powf(-0.25))).collect();
    let f = rate_fit(&pts).unwrap();
    assert!((f.exponent - 0.25).abs() < 1e-12 && (f.amplitude - 0.7).abs() < 1e-12);
}
