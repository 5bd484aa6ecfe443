//! Bicomplex radial formal powers.
//!
//! For `z = r e^{iθ}` and `n ≥ 1`
//!
//! ```text
//! Z^(n)(1; z) = rⁿ(φ_f^(n)(r) cos nθ + 𝐣 φ_{1/f}^(n)(r) sin nθ)
//! Z^(n)(𝐣; z) = rⁿ(−φ_f^(n)(r) sin nθ + 𝐣 φ_{1/f}^(n)(r) cos nθ)
//! ```
//!
//! and `Z^(0)(1; z) = f(r)`, `Z^(0)(𝐣; z) = 𝐣/f(r)`. A general coefficient acts
//! through `Z^(n)(A; z) = Sc(A)·Z^(n)(1; z) + Vec(A)·Z^(n)(𝐣; z)`.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bicomplex::{Bicomplex, BicomplexPolynomial};
use crate::error::{Error, Result};
use crate::potential::PotentialSpec;
use crate::quadrature::PanelGrid;
use crate::radial::{
    check_nonvanishing, darboux_potential, darboux_values, regular_profile_sampled, RadialFunction, RadialProfile,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    One,
    J,
}

impl Unit {
    pub fn as_bicomplex(self) -> Bicomplex {
        match self {
            Unit::One => Bicomplex::ONE,
            Unit::J => Bicomplex::J,
        }
    }
}

impl std::str::FromStr for Unit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" | "1" => Ok(Unit::One),
            "j" => Ok(Unit::J),
            other => Err(Error::InvalidConfig(format!("unknown unit {other:?}, expected one or j"))),
        }
    }
}

/// Polar coordinates with `θ ∈ [0, 2π)`.
pub fn polar(z: C64) -> (f64, f64) {
    let theta = z.im.atan2(z.re);
    (z.norm(), if theta < 0.0 { theta + TAU } else { theta })
}

/// The profiles `φ_f^(n)`, `φ_{1/f}^(n)` for `n = 0..=n_max`, with `f = φ_f^(0)`.
#[derive(Clone, Debug)]
pub struct FormalPowerBasis {
    potential: PotentialSpec,
    darboux: PotentialSpec,
    tol: f64,
    phi_f: Vec<RadialProfile>,
    phi_inv_f: Vec<RadialProfile>,
}

impl FormalPowerBasis {
    /// Builds every profile by the iterated-integral series. Degrees are built in parallel.
    pub fn build(q: &PotentialSpec, n_max: usize, tol: f64, max_terms: usize) -> Result<Self> {
        q.validate()?;
        let grid = Arc::new(PanelGrid::new(q.radius())?);
        let qv: Vec<C64> = grid.nodes().iter().map(|&r| q.eval(r)).collect();
        let f = regular_profile_sampled(&grid, &qv, 0, tol, max_terms)?;
        check_nonvanishing(f.function())?;
        let qd = darboux_values(f.function(), q)?;
        let build = |values: &[C64]| -> Result<Vec<RadialProfile>> {
            (0..=n_max)
                .into_par_iter()
                .map(|n| regular_profile_sampled(&grid, values, n, tol, max_terms))
                .collect()
        };
        let phi_f = build(&qv)?;
        let phi_inv_f = build(&qd)?;
        Self::from_profiles(q.clone(), tol, phi_f, phi_inv_f)
    }

    /// Assembles a basis from existing profiles, e.g. ones read back from disk.
    pub fn from_profiles(
        potential: PotentialSpec,
        tol: f64,
        phi_f: Vec<RadialProfile>,
        phi_inv_f: Vec<RadialProfile>,
    ) -> Result<Self> {
        if phi_f.is_empty() || phi_f.len() != phi_inv_f.len() {
            return Err(Error::Format(format!(
                "need matching non-empty profile lists, got {} and {}",
                phi_f.len(),
                phi_inv_f.len()
            )));
        }
        let grid = phi_f[0].grid().clone();
        for (n, (a, b)) in phi_f.iter().zip(&phi_inv_f).enumerate() {
            if a.degree() != n || b.degree() != n {
                return Err(Error::Format(format!("profile at position {n} has the wrong degree")));
            }
            if !a.grid().same_as(&grid) || !b.grid().same_as(&grid) {
                return Err(Error::GridMismatch);
            }
        }
        if grid.radius() != potential.radius() {
            return Err(Error::GridMismatch);
        }
        check_nonvanishing(phi_f[0].function())?;
        let darboux = darboux_potential(phi_f[0].function(), &potential)?;
        Ok(FormalPowerBasis { potential, darboux, tol, phi_f, phi_inv_f })
    }

    pub fn n_max(&self) -> usize {
        self.phi_f.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.potential.radius()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    /// `q_{1/f} = 2(f'/f)² − q`, tabulated on the profile grid.
    pub fn darboux_potential(&self) -> &PotentialSpec {
        &self.darboux
    }

    pub fn f(&self) -> &RadialFunction {
        self.phi_f[0].function()
    }

    pub fn phi_f(&self) -> &[RadialProfile] {
        &self.phi_f
    }

    pub fn phi_inv_f(&self) -> &[RadialProfile] {
        &self.phi_inv_f
    }

    pub fn grid(&self) -> &Arc<PanelGrid> {
        self.phi_f[0].grid()
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.n_max() {
            return Err(Error::DegreeOutOfRange { degree: n, max: self.n_max() });
        }
        Ok(())
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r <= self.radius() * (1.0 + 1e-12)) {
            return Err(Error::OutsideDomain { modulus: r, radius: self.radius() });
        }
        Ok(())
    }

    /// `(rⁿφ_f^(n)(r), rⁿφ_{1/f}^(n)(r))`, with `(f, 1/f)` for `n = 0`.
    pub fn radial_parts(&self, n: usize, r: f64) -> (C64, C64) {
        if n == 0 {
            let f = self.phi_f[0].eval(r);
            return (f, f.inv());
        }
        let rn = r.powi(n as i32);
        (self.phi_f[n].eval(r) * rn, self.phi_inv_f[n].eval(r) * rn)
    }

    /// `Z^(n)(unit; z)`.
    pub fn eval_basic(&self, n: usize, unit: Unit, z: C64) -> Result<Bicomplex> {
        let (r, theta) = polar(z);
        self.eval_basic_polar(n, unit, r, theta)
    }

    pub fn eval_basic_polar(&self, n: usize, unit: Unit, r: f64, theta: f64) -> Result<Bicomplex> {
        self.check_degree(n)?;
        self.check_radius(r)?;
        let (a, b) = self.radial_parts(n, r);
        Ok(combine(n, unit, a, b, theta))
    }

    /// `Z^(n)(A; z)`.
    pub fn eval_power(&self, n: usize, coeff: Bicomplex, z: C64) -> Result<Bicomplex> {
        let (r, theta) = polar(z);
        self.check_degree(n)?;
        self.check_radius(r)?;
        let (a, b) = self.radial_parts(n, r);
        Ok(apply_coefficient(coeff, combine(n, Unit::One, a, b, theta), combine(n, Unit::J, a, b, theta)))
    }
}

/// Assembles `Z^(n)(unit)` from its radial parts at angle `θ`.
pub(crate) fn combine(n: usize, unit: Unit, a: C64, b: C64, theta: f64) -> Bicomplex {
    let (s, c) = (n as f64 * theta).sin_cos();
    match unit {
        Unit::One => Bicomplex::new(a * c, b * s),
        Unit::J => Bicomplex::new(-a * s, b * c),
    }
}

/// `Sc(A)·one + Vec(A)·j`.
pub(crate) fn apply_coefficient(coeff: Bicomplex, one: Bicomplex, j: Bicomplex) -> Bicomplex {
    one.scale(coeff.sc) + j.scale(coeff.vec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormalTerm {
    pub n: usize,
    #[serde(rename = "A")]
    pub coeff: Bicomplex,
}

/// `Σ Z^(n)(A_n; z)`; serialized as a list of `{"n", "A"}` records.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FormalPolynomial {
    pub terms: Vec<FormalTerm>,
}

impl FormalPolynomial {
    pub fn new(terms: Vec<FormalTerm>) -> Self {
        FormalPolynomial { terms }
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.iter().filter(|t| t.coeff != Bicomplex::ZERO).map(|t| t.n).max()
    }

    pub fn eval(&self, basis: &FormalPowerBasis, z: C64) -> Result<Bicomplex> {
        self.terms.iter().map(|t| basis.eval_power(t.n, t.coeff, z)).sum()
    }

    /// Coefficient of degree `n`, summed over repeated entries.
    pub fn coefficient(&self, n: usize) -> Bicomplex {
        self.terms.iter().filter(|t| t.n == n).map(|t| t.coeff).sum()
    }
}

/// Maps `Σ A_n ẑⁿ` to the formal polynomial `Σ Z^(n)(A_n; z)`.
pub fn transmute_polynomial(p: &BicomplexPolynomial, basis: &FormalPowerBasis) -> Result<FormalPolynomial> {
    if let Some(d) = p.degree() {
        basis.check_degree(d)?;
    }
    Ok(FormalPolynomial::new(
        p.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Bicomplex::ZERO)
            .map(|(n, &coeff)| FormalTerm { n, coeff })
            .collect(),
    ))
}

/// Taylor coefficients at the origin from the idempotent parts: `v_plus[n]` is
/// the coefficient of `(z*)ⁿ` in `V⁺`, `v_minus[n]` that of `zⁿ` in `V⁻`.
pub fn taylor_coefficients(v_plus: &[C64], v_minus: &[C64], n_max: usize) -> BicomplexPolynomial {
    let at = |v: &[C64], n: usize| v.get(n).copied().unwrap_or_default();
    BicomplexPolynomial::new(
        (0..=n_max)
            .map(|n| Bicomplex::from_idempotent(at(v_plus, n), at(v_minus, n)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bicomplex::hat_pow;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn helmholtz(n_max: usize) -> FormalPowerBasis {
        let q = PotentialSpec::constant(c(-0.25, 0.0), 1.0).unwrap();
        FormalPowerBasis::build(&q, n_max, 1e-12, 60).unwrap()
    }

    #[test]
    fn zero_potential_gives_hat_powers() {
        let q = PotentialSpec::zero(1.0).unwrap();
        let basis = FormalPowerBasis::build(&q, 6, 1e-12, 60).unwrap();
        for z in [c(0.3, -0.4), c(-0.7, 0.1), c(0.0, 0.0)] {
            for n in 0..=6 {
                let zn = hat_pow(z, n as u32);
                assert!((basis.eval_basic(n, Unit::One, z).unwrap() - zn).norm() < 1e-14);
                assert!((basis.eval_basic(n, Unit::J, z).unwrap() - Bicomplex::J * zn).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn degree_zero_powers() {
        let basis = helmholtz(2);
        let z = c(0.5, 0.5);
        let one = basis.eval_basic(0, Unit::One, z).unwrap();
        let j = basis.eval_basic(0, Unit::J, z).unwrap();
        let f = basis.f().eval(z.norm());
        assert_eq!(one, Bicomplex::from_scalar(f));
        assert!((one * j - Bicomplex::J).norm() < 1e-15);
        // φ_{1/f}^(0) from the series agrees with 1/f.
        for (p, fv) in basis.phi_inv_f()[0].values().iter().zip(basis.f().values()) {
            assert!((p * fv - 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn errors() {
        let basis = helmholtz(2);
        assert_eq!(
            basis.eval_basic(3, Unit::One, c(0.1, 0.0)).unwrap_err(),
            Error::DegreeOutOfRange { degree: 3, max: 2 }
        );
        assert!(matches!(basis.eval_basic(1, Unit::J, c(1.0, 0.5)), Err(Error::OutsideDomain { .. })));
        let p = BicomplexPolynomial::new(vec![Bicomplex::ZERO; 3].into_iter().chain([Bicomplex::ONE]).collect());
        assert!(transmute_polynomial(&p, &basis).is_err());
    }

    #[test]
    fn transmuting_constants() {
        let basis = helmholtz(1);
        let z = c(-0.2, 0.6);
        let f = basis.f().eval(z.norm());
        let one = transmute_polynomial(&BicomplexPolynomial::new(vec![Bicomplex::ONE]), &basis).unwrap();
        assert!((one.eval(&basis, z).unwrap() - Bicomplex::from_scalar(f)).norm() < 1e-15);
        let j = transmute_polynomial(&BicomplexPolynomial::new(vec![Bicomplex::J]), &basis).unwrap();
        assert!((j.eval(&basis, z).unwrap() - Bicomplex::J.scale(f.inv())).norm() < 1e-15);
    }

    #[test]
    fn taylor_coefficients_of_simple_functions() {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let p = taylor_coefficients(&[zero, one], &[zero, one], 3);
        assert_eq!(p.coeffs, vec![Bicomplex::ZERO, Bicomplex::ONE, Bicomplex::ZERO, Bicomplex::ZERO]);

        // e^ẑ: both idempotent parts are exponentials.
        let inv_fact: Vec<C64> = (0..8).map(|n| c(1.0 / (1..=n).map(|k| k as f64).product::<f64>(), 0.0)).collect();
        let p = taylor_coefficients(&inv_fact, &inv_fact, 7);
        for (n, a) in p.coeffs.iter().enumerate() {
            assert_eq!(*a, Bicomplex::from_real(inv_fact[n].re));
        }

        // 𝐣ẑ²: (𝐣)⁺ = −i, (𝐣)⁻ = i.
        let i = c(0.0, 1.0);
        let p = taylor_coefficients(&[zero, zero, -i], &[zero, zero, i], 2);
        assert_eq!(p.coeffs[2], Bicomplex::J);
    }

    #[test]
    fn formal_polynomial_json() {
        let p = FormalPolynomial::new(vec![FormalTerm { n: 2, coeff: Bicomplex::J }]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[{"n":2,"A":{"sc":[0.0,0.0],"vec":[1.0,0.0]}}]"#);
        assert_eq!(serde_json::from_str::<FormalPolynomial>(&s).unwrap(), p);
    }

    #[test]
    fn polar_angle_range() {
        let (r, t) = polar(c(0.0, -1.0));
        assert_eq!(r, 1.0);
        assert!((t - 1.5 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(polar(c(0.0, 0.0)), (0.0, 0.0));
    }
}
