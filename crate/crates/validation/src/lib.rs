//! Reference values computed without the `vekua` library, and the result
//! type printed by the acceptance gate.

use num_complex::Complex64 as C64;

/// `J_n(x) = Σ_k (−1)^k (x/2)^{2k+n} / (k!(k+n)!)`.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term;
    for k in 1..200 {
        term *= -half * half / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `n!·2ⁿ·κ^{−n}·J_n(κr)/rⁿ`.
pub fn helmholtz_profile(n: usize, kappa: f64, r: f64) -> f64 {
    factorial(n) * 2f64.powi(n as i32) * kappa.powi(-(n as i32)) * bessel_j(n, kappa * r) / r.powi(n as i32)
}

/// A bicomplex number `a + b i + c 𝐣 + d k` (`k = i𝐣`) as four reals.
pub type Quad = [f64; 4];

/// Product through the left-multiplication matrix of `x` acting on `y`,
/// written out from `i² = 𝐣² = −1`, `k² = 1`, `i𝐣 = 𝐣i = k`.
pub fn quad_mul(x: Quad, y: Quad) -> Quad {
    let [a, b, c, d] = x;
    let m = [[a, -b, -c, d], [b, a, -d, -c], [c, -d, a, -b], [d, c, b, a]];
    let mut out = [0.0; 4];
    for (row, o) in m.iter().zip(out.iter_mut()) {
        *o = row.iter().zip(y).map(|(p, q)| p * q).sum();
    }
    out
}

/// `(sc, vec) ↦ [Re sc, Im sc, Re vec, Im vec]`.
pub fn to_quad(sc: C64, vec: C64) -> Quad {
    [sc.re, sc.im, vec.re, vec.im]
}

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub pass: bool,
    pub summary: String,
    pub details: Vec<String>,
}

impl Outcome {
    pub fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome { pass, summary: summary.into(), details: Vec::new() }
    }

    pub fn detail(mut self, line: impl Into<String>) -> Self {
        self.details.push(line.into());
        self
    }

    pub fn line(&self, id: usize, title: &str) -> String {
        format!("{} criterion {id} ({title}): {}", if self.pass { "PASS" } else { "FAIL" }, self.summary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        assert!((bessel_j(0, 0.5) - 0.938_469_807_240_813).abs() < 1e-15);
        assert!((bessel_j(1, 1.0) - 0.440_050_585_744_933_5).abs() < 1e-15);
    }

    #[test]
    fn quad_units() {
        let (i, j, k) = ([0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(quad_mul(i, i), [-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(quad_mul(j, j), [-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(quad_mul(k, k), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(quad_mul(i, j), k);
        assert_eq!(quad_mul(j, i), k);
        assert_eq!(quad_mul(i, k), [0.0, 0.0, -1.0, 0.0]);
    }
}
