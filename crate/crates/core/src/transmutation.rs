//! The transmutation pair `T_f`, `T_{1/f}` acting diagonally on `rⁿe^{inθ}`,
//! the Darboux operators and the integral representation of `T_{1/f}`.
//!
//! `T_f[rⁿ cos nθ] = φ_f^(n)(r) rⁿ cos nθ`, and likewise for `sin nθ`, so a
//! harmonic polynomial is transmuted term by term.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{check_nonvanishing, RadialFunction, RadialProfile};

/// One term `rⁿ(a cos nθ + b sin nθ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub n: usize,
    #[serde(with = "crate::potential::complex_json")]
    pub a: C64,
    #[serde(with = "crate::potential::complex_json")]
    pub b: C64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HarmonicPolynomial {
    pub terms: Vec<HarmonicTerm>,
}

impl HarmonicPolynomial {
    pub fn new(terms: Vec<HarmonicTerm>) -> Self {
        HarmonicPolynomial { terms }
    }

    pub fn constant(a: C64) -> Self {
        Self::new(vec![HarmonicTerm { n: 0, a, b: C64::new(0.0, 0.0) }])
    }

    pub fn eval(&self, r: f64, theta: f64) -> C64 {
        self.terms
            .iter()
            .map(|t| {
                let (s, c) = (t.n as f64 * theta).sin_cos();
                r.powi(t.n as i32) * (t.a * c + t.b * s)
            })
            .sum()
    }

    /// `αh₁ + βh₂`, keeping the terms of both.
    pub fn combine(&self, alpha: C64, other: &HarmonicPolynomial, beta: C64) -> HarmonicPolynomial {
        fn scaled(h: &HarmonicPolynomial, s: C64) -> impl Iterator<Item = HarmonicTerm> + '_ {
            h.terms
                .iter()
                .map(move |t| HarmonicTerm { n: t.n, a: t.a * s, b: t.b * s })
        }
        HarmonicPolynomial::new(scaled(self, alpha).chain(scaled(other, beta)).collect())
    }
}

/// `T_f h` for a harmonic polynomial `h`, holding references to the profiles.
#[derive(Clone, Debug)]
pub struct TransmutedFunction<'a> {
    terms: Vec<(HarmonicTerm, &'a RadialProfile)>,
}

impl<'a> TransmutedFunction<'a> {
    pub fn eval(&self, r: f64, theta: f64) -> C64 {
        self.terms
            .iter()
            .map(|(t, phi)| {
                let (s, c) = (t.n as f64 * theta).sin_cos();
                phi.eval(r) * r.powi(t.n as i32) * (t.a * c + t.b * s)
            })
            .sum()
    }

    pub fn terms(&self) -> &[(HarmonicTerm, &'a RadialProfile)] {
        &self.terms
    }
}

/// Applies `T_f` term-wise; `profiles[n]` must be `φ_f^(n)`.
pub fn transmute<'a>(h: &HarmonicPolynomial, profiles: &'a [RadialProfile]) -> Result<TransmutedFunction<'a>> {
    let terms = h
        .terms
        .iter()
        .map(|t| profiles.get(t.n).map(|p| (*t, p)).ok_or(Error::MissingProfile(t.n)))
        .collect::<Result<_>>()?;
    Ok(TransmutedFunction { terms })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DarbouxVariant {
    /// `D_f u = r u' + r (f'/f) u`.
    #[serde(rename = "D_f")]
    F,
    /// `D_{1/f} u = r u' − r (f'/f) u`.
    #[serde(rename = "D_inv_f")]
    InvF,
    /// `D_1 u = r u'`.
    #[serde(rename = "D_1")]
    One,
}

/// Applies a Darboux operator. The derivative of the result is taken spectrally.
pub fn darboux_d(u: &RadialFunction, f: &RadialFunction, variant: DarbouxVariant) -> Result<RadialFunction> {
    if !u.grid().same_as(f.grid()) {
        return Err(Error::GridMismatch);
    }
    let sign = match variant {
        DarbouxVariant::F => 1.0,
        DarbouxVariant::InvF => -1.0,
        DarbouxVariant::One => 0.0,
    };
    if variant != DarbouxVariant::One {
        check_nonvanishing(f)?;
    }
    let values = u
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let log_der = if sign == 0.0 { C64::new(0.0, 0.0) } else { f.derivs()[i] / f.values()[i] };
            r * u.derivs()[i] + sign * r * log_der * u.values()[i]
        })
        .collect();
    RadialFunction::from_values(u.grid().clone(), values)
}

/// `T rⁿ = rⁿφ^(n)` as a radial function with its exact derivative.
pub fn monomial_image(profile: &RadialProfile) -> RadialFunction {
    let n = profile.degree() as i32;
    let values = profile
        .nodes()
        .iter()
        .zip(profile.values().iter().zip(profile.derivs()))
        .map(|(&r, (&v, &d))| {
            let rn = r.powi(n);
            let drn = if n == 0 { 0.0 } else { n as f64 * r.powi(n - 1) };
            (v * rn, d * rn + v * drn)
        });
    let (values, derivs) = values.unzip();
    RadialFunction::new(profile.grid().clone(), values, derivs).expect("profile samples match its grid")
}

/// `u(r) = Σ coeffs[n]·rⁿ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialPolynomial {
    #[serde(with = "crate::potential::complex_json::list")]
    pub coeffs: Vec<C64>,
}

impl RadialPolynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        RadialPolynomial { coeffs }
    }

    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[n] = C64::new(1.0, 0.0);
        Self::new(coeffs)
    }
}

/// `T_{1/f}u(r) = (1/f(r))·(∫₀^r f(s)·T_f[s u'(s)]/s ds + u(0))`.
///
/// For `u = Σ c_n rⁿ` the quotient `T_f[s u'(s)]/s = Σ n c_n φ_f^(n)(s) s^{n−1}`
/// is formed directly, so the integrand has no singularity at `s = 0`. The
/// returned derivative is exact: `(T_{1/f}u)' = −(f'/f)·T_{1/f}u + T_f[s u']/s`.
pub fn t_inv_f_integral(u: &RadialPolynomial, f: &RadialFunction, profiles_f: &[RadialProfile]) -> Result<RadialFunction> {
    check_nonvanishing(f)?;
    let grid = f.grid().clone();
    for (n, c) in u.coeffs.iter().enumerate().skip(1) {
        if *c != C64::new(0.0, 0.0) {
            let p = profiles_f.get(n).ok_or(Error::MissingProfile(n))?;
            if !p.grid().same_as(&grid) {
                return Err(Error::GridMismatch);
            }
        }
    }
    let quotient: Vec<C64> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            u.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, c)| **c != C64::new(0.0, 0.0))
                .map(|(n, &c)| c * (n as f64) * profiles_f[n].values()[i] * r.powi(n as i32 - 1))
                .sum()
        })
        .collect();
    let integrand: Vec<C64> = quotient.iter().zip(f.values()).map(|(q, fv)| q * fv).collect();
    if let Some(i) = integrand.iter().position(|v| !v.is_finite()) {
        return Err(Error::QuadratureFailure { r: grid.nodes()[i] });
    }
    let u0 = u.coeffs.first().copied().unwrap_or_default();
    let integral = grid.cumulative(&integrand);
    let values: Vec<C64> = integral.iter().zip(f.values()).map(|(c, fv)| (c + u0) / fv).collect();
    let derivs = values
        .iter()
        .zip(&quotient)
        .enumerate()
        .map(|(i, (t, q))| -f.derivs()[i] / f.values()[i] * t + q)
        .collect();
    RadialFunction::new(Arc::clone(&grid), values, derivs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    /// `D_{1/f} T_f rⁿ = n T_{1/f} rⁿ`.
    #[serde(rename = "D1f_Tf")]
    DInvFTf,
    /// `D_f T_{1/f} rⁿ = n T_f rⁿ`.
    #[serde(rename = "Df_T1f")]
    DfTInvF,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub degree: usize,
    pub relation: Relation,
    /// `sup|lhs − rhs| / max(sup|lhs|, sup|rhs|, sup|u|/R)` over `[0.05R, R]`,
    /// where `u` is the function being differentiated. The last term keeps
    /// `n = 0` meaningful, where both sides vanish.
    pub residual: f64,
}

/// Residuals of both transmutation relations for `n = 0..=n_max`.
pub fn check_transmutation_relations(
    n_max: usize,
    phi_f: &[RadialProfile],
    phi_inv_f: &[RadialProfile],
    f: &RadialFunction,
) -> Result<Vec<RelationResidual>> {
    let mut out = Vec::with_capacity(2 * (n_max + 1));
    let r_min = 0.05 * f.grid().radius();
    for n in 0..=n_max {
        let pf = phi_f.get(n).ok_or(Error::MissingProfile(n))?;
        let pi = phi_inv_f.get(n).ok_or(Error::MissingProfile(n))?;
        let tf = monomial_image(pf);
        let ti = monomial_image(pi);
        let radius = f.grid().radius();
        let cases = [
            (Relation::DInvFTf, darboux_values(&tf, f, -1.0), &ti, &tf),
            (Relation::DfTInvF, darboux_values(&ti, f, 1.0), &tf, &ti),
        ];
        for (relation, lhs, target, source) in cases {
            let (mut diff, mut scale) = (0.0f64, 0.0f64);
            for (i, &r) in f.nodes().iter().enumerate() {
                if r < r_min {
                    continue;
                }
                let rhs = target.values()[i] * n as f64;
                diff = diff.max((lhs[i] - rhs).norm());
                scale = scale.max(lhs[i].norm()).max(rhs.norm()).max(source.values()[i].norm() / radius);
            }
            let residual = if scale > 0.0 { diff / scale } else { diff };
            out.push(RelationResidual { degree: n, relation, residual });
        }
    }
    Ok(out)
}

/// Node values of `r u' + sign·r(f'/f)u`, without differentiating the result.
fn darboux_values(u: &RadialFunction, f: &RadialFunction, sign: f64) -> Vec<C64> {
    u.nodes()
        .iter()
        .enumerate()
        .map(|(i, &r)| r * u.derivs()[i] + sign * r * f.derivs()[i] / f.values()[i] * u.values()[i])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialSpec;
    use crate::radial::{build_f, regular_profile};

    fn profiles(q: &PotentialSpec, n_max: usize) -> Vec<RadialProfile> {
        (0..=n_max).map(|n| regular_profile(q, n, 1e-13, 60).unwrap()).collect()
    }

    #[test]
    fn transmuting_one_gives_f() {
        let q = PotentialSpec::constant(C64::new(-0.25, 0.0), 1.0).unwrap();
        let ps = profiles(&q, 2);
        let t = transmute(&HarmonicPolynomial::constant(C64::new(1.0, 0.0)), &ps).unwrap();
        for r in [0.0, 0.3, 1.0] {
            assert_eq!(t.eval(r, 1.2), ps[0].eval(r));
        }
    }

    #[test]
    fn identity_for_zero_potential() {
        let q = PotentialSpec::zero(1.0).unwrap();
        let ps = profiles(&q, 3);
        let h = HarmonicPolynomial::new(vec![
            HarmonicTerm { n: 1, a: C64::new(1.0, 0.0), b: C64::new(0.0, 2.0) },
            HarmonicTerm { n: 3, a: C64::new(-0.5, 0.0), b: C64::new(0.0, 0.0) },
        ]);
        let t = transmute(&h, &ps).unwrap();
        assert!((t.eval(0.7, 2.1) - h.eval(0.7, 2.1)).norm() < 1e-15);
    }

    #[test]
    fn missing_degree() {
        let q = PotentialSpec::zero(1.0).unwrap();
        let ps = profiles(&q, 1);
        let h = HarmonicPolynomial::new(vec![HarmonicTerm { n: 2, a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) }]);
        assert_eq!(transmute(&h, &ps).unwrap_err(), Error::MissingProfile(2));
    }

    #[test]
    fn darboux_operators_on_simple_inputs() {
        let q = PotentialSpec::constant(C64::new(-0.25, 0.0), 1.0).unwrap();
        let f = build_f(&q, 1e-13).unwrap();
        let grid = f.grid().clone();
        let cube = RadialFunction::from_fn(grid.clone(), |r| (C64::new(r.powi(3), 0.0), C64::new(3.0 * r * r, 0.0)));
        let d1 = darboux_d(&cube, f.function(), DarbouxVariant::One).unwrap();
        for (&r, v) in grid.nodes().iter().zip(d1.values()) {
            assert!((v - 3.0 * r.powi(3)).norm() < 1e-15);
        }
        let inv_f = RadialFunction::new(
            grid.clone(),
            f.values().iter().map(|v| v.inv()).collect(),
            f.values().iter().zip(f.derivs()).map(|(v, d)| -d / (v * v)).collect(),
        )
        .unwrap();
        let zero = darboux_d(&inv_f, f.function(), DarbouxVariant::F).unwrap();
        assert!(zero.sup_norm() < 1e-15);
        let also_zero = darboux_d(f.function(), f.function(), DarbouxVariant::InvF).unwrap();
        assert!(also_zero.sup_norm() < 1e-15);
    }

    #[test]
    fn integral_route_for_constant() {
        let q = PotentialSpec::constant(C64::new(-0.25, 0.0), 1.0).unwrap();
        let f = build_f(&q, 1e-13).unwrap();
        let ps = profiles(&q, 0);
        let t = t_inv_f_integral(&RadialPolynomial::monomial(0), f.function(), &ps).unwrap();
        for (v, fv) in t.values().iter().zip(f.values()) {
            assert!((v * fv - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_potential_relations_vanish() {
        let q = PotentialSpec::zero(1.0).unwrap();
        let ps = profiles(&q, 4);
        let report = check_transmutation_relations(4, &ps, &ps, ps[0].function()).unwrap();
        assert_eq!(report.len(), 10);
        assert!(report.iter().all(|r| r.residual < 1e-15));
        let json = serde_json::to_string(&report[1]).unwrap();
        assert_eq!(json, r#"{"degree":0,"relation":"Df_T1f","residual":0.0}"#);
    }
}
