//! Reference values shared by the integration tests. Nothing here calls into
//! the library's radial solver.
#![allow(dead_code)]

use num_complex::Complex64 as C64;

/// `Σ_k s^k (x/2)^{2k+n} / (k!(k+n)!)`: `J_n` for `s = −1`, `I_n` for `s = 1`.
fn bessel_series(n: usize, x: f64, sign: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
    let mut sum = term;
    for k in 1..200 {
        term *= sign * half * half / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn bessel_j(n: usize, x: f64) -> f64 {
    bessel_series(n, x, -1.0)
}

pub fn bessel_i(n: usize, x: f64) -> f64 {
    bessel_series(n, x, 1.0)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `n!·2ⁿ·κ^{−n}·J_n(κr)/rⁿ`, the regular profile for `q ≡ −κ²`.
pub fn helmholtz_profile(n: usize, kappa: f64, r: f64) -> f64 {
    factorial(n) * 2f64.powi(n as i32) * kappa.powi(-(n as i32)) * bessel_j(n, kappa * r) / r.powi(n as i32)
}

/// Derivative of [`helmholtz_profile`] in `r`, from `(x^{−n}J_n)' = −x^{−n}J_{n+1}`.
pub fn helmholtz_profile_deriv(n: usize, kappa: f64, r: f64) -> f64 {
    -factorial(n) * 2f64.powi(n as i32) * kappa * bessel_j(n + 1, kappa * r) / (kappa * r).powi(n as i32)
}

/// `n!·2ⁿ·μ^{−n}·I_n(μr)/rⁿ`, the regular profile for `q ≡ μ²`.
pub fn modified_profile(n: usize, mu: f64, r: f64) -> f64 {
    factorial(n) * 2f64.powi(n as i32) * mu.powi(-(n as i32)) * bessel_i(n, mu * r) / r.powi(n as i32)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const KAPPA: f64 = 0.5;

/// Relative error `|a − b| / |b|`.
pub fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}
