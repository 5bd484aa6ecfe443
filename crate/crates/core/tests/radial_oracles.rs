mod common;

use common::*;
use vekua::potential::PotentialSpec;
use vekua::radial::{build_f, darboux_potential, regular_profile};

fn helmholtz() -> PotentialSpec {
    PotentialSpec::constant(c(-KAPPA * KAPPA, 0.0), 1.0).unwrap()
}

fn sample_radii() -> Vec<f64> {
    // Log-spaced from 1e-3 to 1, plus an off-node linear sweep.
    let mut rs: Vec<f64> = (0..=60).map(|k| 10f64.powf(-3.0 + 3.0 * k as f64 / 60.0)).collect();
    rs.extend((1..200).map(|k| k as f64 / 200.0 + 1.3e-4));
    rs.retain(|&r| r <= 1.0);
    rs
}

#[test]
fn helmholtz_profiles_match_bessel_closed_form() {
    let q = helmholtz();
    for n in 0..=8 {
        let p = regular_profile(&q, n, 1e-12, 60).unwrap();
        for &r in &sample_radii() {
            let exact = helmholtz_profile(n, KAPPA, r);
            let err = rel(p.eval(r), c(exact, 0.0));
            assert!(err < 1e-12, "n={n} r={r} err={err:e}");
            let dexact = helmholtz_profile_deriv(n, KAPPA, r);
            assert!((p.eval_deriv(r) - dexact).norm() < 1e-12, "derivative n={n} r={r}");
        }
    }
}

#[test]
fn f_at_one_is_j0_of_half() {
    let f = build_f(&helmholtz(), 1e-12).unwrap();
    assert!((f.eval(1.0).re - 0.938_469_807_240_813).abs() < 1e-12);
    assert!((f.eval(1.0).re - bessel_j(0, 0.5)).abs() < 1e-14);
}

#[test]
fn modified_bessel_profiles_for_positive_constant() {
    let mu = 3f64.sqrt() * KAPPA;
    let q = PotentialSpec::constant(c(mu * mu, 0.0), 1.0).unwrap();
    for n in 0..=8 {
        let p = regular_profile(&q, n, 1e-12, 60).unwrap();
        for &r in &sample_radii() {
            let exact = modified_profile(n, mu, r);
            assert!(rel(p.eval(r), c(exact, 0.0)) < 1e-12, "n={n} r={r}");
        }
        // The closed form without the 1/rⁿ factor vanishes at the origin and
        // cannot be a profile normalized to one there.
        let r = 1e-3;
        let without = modified_profile(n, mu, r) * r.powi(n as i32);
        if n > 0 {
            assert!((p.eval(r).re - without).abs() > 0.5);
        }
    }
}

#[test]
fn darboux_potential_is_not_constant() {
    let q = helmholtz();
    let f = build_f(&q, 1e-12).unwrap();
    let qd = darboux_potential(f.function(), &q).unwrap();
    assert!((qd.eval(0.0).re - KAPPA * KAPPA).abs() < 1e-14);
    for r in [0.1, 0.5, 1.0] {
        let ratio = -KAPPA * bessel_j(1, KAPPA * r) / bessel_j(0, KAPPA * r);
        let exact = 2.0 * ratio * ratio + KAPPA * KAPPA;
        assert!((qd.eval(r).re - exact).abs() < 1e-12);
        assert!((qd.eval(r).re - 3.0 * KAPPA * KAPPA).abs() > 0.4);
    }
}

/// `u = rⁿφ` must satisfy `u'' + u'/r − q u − n²u/r² = 0`.
///
/// Fourth-order central differences at `h = 1e-4`; the residual is divided by
/// `sup|u|` over `[0.05, 1]`.
fn fd_ode_residual(phi: impl Fn(f64) -> num_complex::Complex64, q: impl Fn(f64) -> num_complex::Complex64, n: usize) -> f64 {
    let h = 1e-4;
    let u = |r: f64| phi(r) * r.powi(n as i32);
    let (mut worst, mut size): (f64, f64) = (0.0, 0.0);
    for k in 0..=95 {
        let r = 0.05 + 0.01 * k as f64 - if k == 95 { 2.0 * h } else { 0.0 };
        let s = [u(r - 2.0 * h), u(r - h), u(r), u(r + h), u(r + 2.0 * h)];
        let d2 = (-s[0] + 16.0 * s[1] - 30.0 * s[2] + 16.0 * s[3] - s[4]) / (12.0 * h * h);
        let d1 = (s[0] - 8.0 * s[1] + 8.0 * s[3] - s[4]) / (12.0 * h);
        let terms = [d2, d1 / r, -q(r) * s[2], -((n * n) as f64) * s[2] / (r * r)];
        let res: num_complex::Complex64 = terms.iter().sum();
        worst = worst.max(res.norm());
        size = size.max(s[2].norm());
    }
    worst / size
}

#[test]
fn profiles_solve_their_ode() {
    let q = helmholtz();
    let f = build_f(&q, 1e-12).unwrap();
    let qd = darboux_potential(f.function(), &q).unwrap();
    for n in 0..=8 {
        let pf = regular_profile(&q, n, 1e-12, 60).unwrap();
        let pi = regular_profile(&qd, n, 1e-12, 60).unwrap();
        let res_f = fd_ode_residual(|r| pf.eval(r), |r| q.eval(r), n);
        let res_i = fd_ode_residual(|r| pi.eval(r), |r| qd.eval(r), n);
        assert!(res_f < 1e-7, "phi_f n={n}: {res_f:e}");
        assert!(res_i < 1e-7, "phi_inv_f n={n}: {res_i:e}");
    }
}
