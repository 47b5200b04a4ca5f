use std::f64::consts::{PI, TAU};

use mhfe::oracle::{
    gauss_unit, grid_search_alpha_beta, integrate_spacetime, integrate_square, integrate_time,
    mode_coefficient, spacetime_mode_cost,
};
use mhfe::{Constants, Error};

#[test]
fn gauss_rules_integrate_monomials() {
    for p in 1..=5 {
        let q = gauss_unit(p).unwrap();
        for d in 0..2 * p {
            let s: f64 = q.iter().map(|&(x, w)| w * x.powi(d as i32)).sum();
            assert!(
                (s - 1.0 / (d as f64 + 1.0)).abs() < 1e-15,
                "points {p} degree {d}"
            );
        }
    }
    assert_eq!(gauss_unit(6).unwrap_err(), Error::UnsupportedDegree(6));
}

#[test]
fn tensor_and_time_rules() {
    let s = integrate_square(3, 4, |x| (PI * x[0]).sin().powi(2) * x[1]).unwrap();
    assert!((s - 0.25).abs() < 1e-12);
    let t = integrate_time(TAU, 8, 5, |t| t.cos().powi(2)).unwrap();
    assert!((t - PI).abs() < 1e-12);
}

#[test]
fn mode_coefficients_of_trigonometric_signals() {
    let g = |t: f64| 0.5 + 2.0 * (3.0 * t).cos() - (3.0 * t).sin() + (6.0 * t).sin();
    let period = TAU / 3.0;
    let c0 = mode_coefficient(period, 0, 16, g).unwrap();
    let c1 = mode_coefficient(period, 1, 16, g).unwrap();
    let c2 = mode_coefficient(period, 2, 16, g).unwrap();
    assert!((c0.0 - 0.5).abs() < 1e-13);
    assert!((c1.0 - 2.0).abs() < 1e-13 && (c1.1 + 1.0).abs() < 1e-13);
    assert!(c2.0.abs() < 1e-13 && (c2.1 - 1.0).abs() < 1e-13);
}

#[test]
fn spacetime_cost_vanishes_on_zero_misfit_and_control() {
    let j = spacetime_mode_cost(1.0, 2, 0.1, 2, 8, |_, _| [0.0; 2], |_, _| 0.0).unwrap();
    assert_eq!(j, 0.0);
}

#[test]
fn spacetime_cost_of_separable_data() {
    // m = φ(x) cos(2πt), u = φ(x) sin(2πt) with ‖φ‖² = 1/4
    let phi = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).sin();
    let j = spacetime_mode_cost(
        1.0,
        1,
        0.5,
        4,
        16,
        |x, t| [phi(x) * (TAU * t).cos(), 0.0],
        |x, t| phi(x) * (TAU * t).sin(),
    )
    .unwrap();
    assert!((j - (0.5 * 0.25 + 0.25 * 0.25)).abs() < 1e-10);
    let total = integrate_spacetime(1.0, 4, 16, |x, t| (phi(x) * (TAU * t).cos()).powi(2)).unwrap();
    assert!((total - 0.125).abs() < 1e-10);
}

#[test]
fn quadrature_refinement_is_stable() {
    let f = |x: [f64; 2], t: f64| (x[0] * x[1] + t).exp() * (1.0 - x[0]);
    let coarse = integrate_spacetime(1.0, 2, 8, f).unwrap();
    let fine = integrate_spacetime(1.0, 4, 16, f).unwrap();
    assert!((coarse - fine).abs() < 1e-6 * fine.abs());
}

#[test]
fn grid_search_without_gradient_residual() {
    let c = Constants::unit_square(0.1, 1.0, 1.0, 1.0);
    let (al, be, v) = grid_search_alpha_beta(1.0, 0.0, 0.0, &c);
    // with no residuals the best grid point is the smallest α
    assert!((al - 1e-6).abs() < 1e-18);
    assert!(be > 0.0);
    assert!((v - 0.5 * (1.0 + 1e-6)).abs() < 1e-12);
}
