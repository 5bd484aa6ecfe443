//! Regular solutions of the perturbed Bessel equation and the radial functions
//! built from them.
//!
//! For a degree `n` the regular solution of `u'' + u'/r − n²u/r² = q u` is
//! written `u = rⁿ φ(r)`. The profile `φ` solves
//! `φ'' + (2n+1)φ'/r = q φ` with `φ(0) = 1`, `φ'(0) = 0`, and is summed as
//! `φ = Σ g_k` with `g_0 = 1`,
//!
//! ```text
//! g_k'(r) = r^{−(2n+1)} ∫₀^r t^{2n+1} q(t) g_{k−1}(t) dt,    g_k(0) = 0.
//! ```

use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PotentialSpec, TabulatedNode};
use crate::quadrature::{gauss_legendre_unit, PanelGrid, PANELS, PANEL_ORDER};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_TERMS: usize = 60;
/// `|f|` below this at any node stops the pipeline.
pub const VANISHING_F_THRESHOLD: f64 = 1e-10;

/// A complex function of `r` sampled on a [`PanelGrid`], with its derivative.
#[derive(Clone, Debug)]
pub struct RadialFunction {
    grid: Arc<PanelGrid>,
    values: Vec<C64>,
    derivs: Vec<C64>,
}

impl RadialFunction {
    pub fn new(grid: Arc<PanelGrid>, values: Vec<C64>, derivs: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() || derivs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {} values and {} derivatives",
                grid.len(),
                values.len(),
                derivs.len()
            )));
        }
        Ok(RadialFunction { grid, values, derivs })
    }

    /// Samples `func(r) -> (value, derivative)` at the grid nodes.
    pub fn from_fn(grid: Arc<PanelGrid>, func: impl Fn(f64) -> (C64, C64)) -> Self {
        let (values, derivs) = grid.nodes().iter().map(|&r| func(r)).unzip();
        RadialFunction { grid, values, derivs }
    }

    /// Node values with the derivative obtained by spectral differentiation.
    pub fn from_values(grid: Arc<PanelGrid>, values: Vec<C64>) -> Result<Self> {
        let derivs = grid.derivative(&values);
        Self::new(grid, values, derivs)
    }

    pub fn grid(&self) -> &Arc<PanelGrid> {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn derivs(&self) -> &[C64] {
        &self.derivs
    }

    pub fn eval(&self, r: f64) -> C64 {
        self.grid.interpolate(&self.values, r)
    }

    pub fn eval_deriv(&self, r: f64) -> C64 {
        self.grid.interpolate(&self.derivs, r)
    }

    pub fn eval_with_deriv(&self, r: f64) -> (C64, C64) {
        let [v, d] = self.grid.interpolate_many([&self.values, &self.derivs], r);
        (v, d)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Writes `r, re_phi, im_phi, re_dphi, im_dphi` rows at the grid nodes.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "re_phi", "im_phi", "re_dphi", "im_dphi"])?;
        for ((&r, v), d) in self.nodes().iter().zip(&self.values).zip(&self.derivs) {
            w.write_record([r, v.re, v.im, d.re, d.im].map(crate::io::fmt_f64))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Construction metadata for a regular profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesInfo {
    /// Number of series terms summed, `g_0` included.
    pub terms: usize,
    /// `sup|g_last| / sup|Σ g_k|` at termination.
    pub truncation: f64,
}

/// `φ^(n)` with `φ(0) = 1`, so that `rⁿφ^(n)` is the regular solution of degree `n`.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    degree: usize,
    info: SeriesInfo,
    function: RadialFunction,
}

impl RadialProfile {
    pub fn from_parts(degree: usize, info: SeriesInfo, function: RadialFunction) -> Self {
        RadialProfile { degree, info, function }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn info(&self) -> SeriesInfo {
        self.info
    }

    pub fn function(&self) -> &RadialFunction {
        &self.function
    }

    /// `rⁿφ(r)`.
    pub fn eval_scaled(&self, r: f64) -> C64 {
        self.function.eval(r) * r.powi(self.degree as i32)
    }
}

impl std::ops::Deref for RadialProfile {
    type Target = RadialFunction;
    fn deref(&self) -> &RadialFunction {
        &self.function
    }
}

/// Evaluates `h(s) = s^{−(2n+1)} ∫₀^s t^{2n+1} F(t) dt` at every grid node.
///
/// Each panel `[a, b]` is advanced from the value at its left end,
/// `h(s) = (a/s)^{2n+1} h(a) + ∫_a^s (t/s)^{2n+1} F(t) dt`, so no large power of
/// `1/s` is ever formed.
struct ScaledIntegrator {
    power: i32,
    /// Gauss–Legendre rule on `[0, 1]`.
    tau: Vec<f64>,
    omega: Vec<f64>,
    /// `table[i][k]`: cardinal values at `x_i·τ_k` for the panel nodes
    /// followed by the right panel end (`x = 1`).
    table: Vec<Vec<Vec<f64>>>,
    targets: Vec<f64>,
}

impl ScaledIntegrator {
    fn new(grid: &PanelGrid, n: usize) -> Self {
        let power = 2 * n as i32 + 1;
        // The integrand is a polynomial of degree PANEL_ORDER - 1 + 2n + 1 in t.
        let m = (PANEL_ORDER + 2 * n + 2) / 2 + 4;
        let (tau, omega) = gauss_legendre_unit(m);
        let mut targets = grid.local_nodes().to_vec();
        targets.push(1.0);
        let interp = grid.local_interpolator();
        let table = targets
            .iter()
            .map(|&x| tau.iter().map(|&t| interp.basis(x * t)).collect())
            .collect();
        ScaledIntegrator { power, tau, omega, table, targets }
    }

    fn apply(&self, grid: &PanelGrid, f: &[C64]) -> Vec<C64> {
        let width = grid.panel_width();
        let mut out = Vec::with_capacity(f.len());
        let mut h_left = C64::new(0.0, 0.0);
        for p in 0..PANELS {
            let a = p as f64 * width;
            let chunk = &f[p * PANEL_ORDER..(p + 1) * PANEL_ORDER];
            for (i, &x) in self.targets.iter().enumerate() {
                let s = a + x * width;
                let len = x * width;
                let mut acc = C64::new(0.0, 0.0);
                for (k, (&t, &w)) in self.tau.iter().zip(&self.omega).enumerate() {
                    let ratio = (a + len * t) / s;
                    let fv: C64 = self.table[i][k]
                        .iter()
                        .zip(chunk)
                        .map(|(&l, &v)| v * l)
                        .sum();
                    acc += fv * (w * ratio.powi(self.power));
                }
                let h = h_left * (a / s).powi(self.power) + acc * len;
                if i < PANEL_ORDER {
                    out.push(h);
                } else {
                    h_left = h;
                }
            }
        }
        out
    }
}

/// Builds `φ^(n)` for `q` on the standard panel grid of radius `q.radius()`.
pub fn regular_profile(q: &PotentialSpec, n: usize, tol: f64, max_terms: usize) -> Result<RadialProfile> {
    let grid = Arc::new(PanelGrid::new(q.radius())?);
    let qv: Vec<C64> = grid.nodes().iter().map(|&r| q.eval(r)).collect();
    regular_profile_sampled(&grid, &qv, n, tol, max_terms)
}

/// As [`regular_profile`], with `q` given by its values at the grid nodes.
pub fn regular_profile_sampled(
    grid: &Arc<PanelGrid>,
    q: &[C64],
    n: usize,
    tol: f64,
    max_terms: usize,
) -> Result<RadialProfile> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    if q.len() != grid.len() {
        return Err(Error::InvalidPotential("potential samples do not match the grid".into()));
    }
    if let Some(i) = q.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidPotential(format!("potential is not finite at r = {}", grid.nodes()[i])));
    }
    let size = grid.len();
    let integrator = ScaledIntegrator::new(grid, n);
    let mut term = vec![C64::new(1.0, 0.0); size];
    let mut sum = term.clone();
    let mut dsum = vec![C64::new(0.0, 0.0); size];
    let sup = |v: &[C64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut terms = 1;
    loop {
        if terms >= max_terms {
            return Err(Error::NoConvergence {
                terms,
                last_term: sup(&term),
                sum: sup(&sum),
            });
        }
        let integrand: Vec<C64> = q.iter().zip(&term).map(|(a, b)| a * b).collect();
        let dterm = integrator.apply(grid, &integrand);
        term = grid.cumulative(&dterm);
        if let Some(i) = term.iter().chain(&dterm).position(|v| !v.is_finite()) {
            return Err(Error::QuadratureFailure { r: grid.nodes()[i % size] });
        }
        for ((s, d), (t, dt)) in sum.iter_mut().zip(dsum.iter_mut()).zip(term.iter().zip(&dterm)) {
            *s += t;
            *d += dt;
        }
        terms += 1;
        let last = sup(&term);
        let total = sup(&sum);
        if last <= tol * total {
            let info = SeriesInfo {
                terms,
                truncation: if total > 0.0 { last / total } else { 0.0 },
            };
            let function = RadialFunction::new(grid.clone(), sum, dsum)?;
            return Ok(RadialProfile::from_parts(n, info, function));
        }
    }
}

/// `f = φ^(0)`, the normalized regular solution with `f(0) = 1`.
pub fn build_f(q: &PotentialSpec, tol: f64) -> Result<RadialProfile> {
    let f = regular_profile(q, 0, tol, DEFAULT_MAX_TERMS)?;
    check_nonvanishing(f.function())?;
    Ok(f)
}

/// Fails with [`Error::VanishingF`] if `|f| < 1e-10` at a node or at `r = R`.
pub fn check_nonvanishing(f: &RadialFunction) -> Result<()> {
    let radius = f.grid().radius();
    let samples = f
        .nodes()
        .iter()
        .copied()
        .zip(f.values().iter().copied())
        .chain(std::iter::once((radius, f.eval(radius))));
    for (r, v) in samples {
        if !(v.norm() >= VANISHING_F_THRESHOLD) {
            return Err(Error::VanishingF { r, value: v.norm() });
        }
    }
    Ok(())
}

/// `q_{1/f} = 2(f'/f)² − q` at the grid nodes.
pub fn darboux_values(f: &RadialFunction, q: &PotentialSpec) -> Result<Vec<C64>> {
    check_nonvanishing(f)?;
    Ok(f
        .nodes()
        .iter()
        .zip(f.values().iter().zip(f.derivs()))
        .map(|(&r, (&v, &d))| {
            let ratio = d / v;
            2.0 * ratio * ratio - q.eval(r)
        })
        .collect())
}

/// The Darboux potential `q_{1/f} = 2(f'/f)² − q`, tabulated at `r = 0`, the
/// grid nodes and `r = R`.
pub fn darboux_potential(f: &RadialFunction, q: &PotentialSpec) -> Result<PotentialSpec> {
    let radius = f.grid().radius();
    let inner = darboux_values(f, q)?;
    let at = |r: f64| {
        let (v, d) = f.eval_with_deriv(r);
        let ratio = d / v;
        2.0 * ratio * ratio - q.eval(r)
    };
    let mut nodes = Vec::with_capacity(inner.len() + 2);
    nodes.push(TabulatedNode { r: 0.0, value: at(0.0) });
    nodes.extend(f.nodes().iter().zip(inner).map(|(&r, value)| TabulatedNode { r, value }));
    nodes.push(TabulatedNode { r: radius, value: at(radius) });
    PotentialSpec::tabulated(nodes, radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Closed form for constant q: φ^(n)(r) = Σ_k n!/(k!(k+n)!)·(q r²/4)^k.
    fn constant_q_profile(q: C64, n: usize, r: f64) -> C64 {
        (0..60)
            .map(|k| (q * r * r / 4.0).powu(k as u32) * (factorial(n) / (factorial(k) * factorial(k + n))))
            .sum()
    }

    #[test]
    fn zero_potential_gives_one() {
        let q = PotentialSpec::zero(1.0).unwrap();
        for n in [0, 1, 7, 40] {
            let p = regular_profile(&q, n, 1e-12, 60).unwrap();
            assert!(p.values().iter().all(|&v| v == C64::new(1.0, 0.0)));
            assert!(p.derivs().iter().all(|&v| v == C64::new(0.0, 0.0)));
            assert_eq!(p.info().terms, 2);
        }
    }

    #[test]
    fn constant_potential_matches_series() {
        for (q, radius) in [(C64::new(-0.25, 0.0), 1.0), (C64::new(0.75, 0.3), 2.0)] {
            let spec = PotentialSpec::constant(q, radius).unwrap();
            for n in [0, 1, 3, 8, 20] {
                let p = regular_profile(&spec, n, 1e-14, 60).unwrap();
                for &r in p.nodes().iter().step_by(7) {
                    let exact = constant_q_profile(q, n, r);
                    assert!((p.eval(r) - exact).norm() < 1e-13 * exact.norm(), "n={n} r={r}");
                }
                let r = 0.77 * radius;
                assert!((p.eval(r) - constant_q_profile(q, n, r)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn derivative_is_termwise() {
        let q = PotentialSpec::polynomial(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-2.0, 1.0)], 1.5).unwrap();
        let p = regular_profile(&q, 2, 1e-13, 60).unwrap();
        let spectral = p.grid().derivative(p.values());
        for (a, b) in spectral.iter().zip(p.derivs()) {
            assert!((a - b).norm() < 1e-10);
        }
        assert!((p.eval(0.0) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn reports_no_convergence() {
        let q = PotentialSpec::constant(C64::new(400.0, 0.0), 1.0).unwrap();
        let err = regular_profile(&q, 0, 1e-12, 5).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { terms: 5, .. }));
    }

    #[test]
    fn detects_vanishing_f() {
        // Put the first zero of J_0 (2.4048...) exactly on a grid node.
        let grid = PanelGrid::new(1.0).unwrap();
        let kappa = 2.404_825_557_695_773 / grid.nodes()[400];
        let q = PotentialSpec::constant(C64::new(-kappa * kappa, 0.0), 1.0).unwrap();
        assert!(matches!(build_f(&q, 1e-13), Err(Error::VanishingF { .. })));
    }

    #[test]
    fn darboux_of_constant_potential() {
        let q = PotentialSpec::constant(C64::new(-0.25, 0.0), 1.0).unwrap();
        let f = build_f(&q, 1e-12).unwrap();
        let qd = darboux_potential(f.function(), &q).unwrap();
        assert!((qd.eval(0.0) - 0.25).norm() < 1e-14);
        // f'/f = -κ J_1/J_0; check one node against the constant-q series.
        let r = f.nodes()[300];
        let j0 = constant_q_profile(C64::new(-0.25, 0.0), 0, r);
        let j1_scaled = constant_q_profile(C64::new(-0.25, 0.0), 1, r);
        let ratio = -0.25 * r / 2.0 * j1_scaled / j0;
        assert!((qd.eval(r) - (2.0 * ratio * ratio + 0.25)).norm() < 1e-13);
    }

    #[test]
    fn csv_columns() {
        let q = PotentialSpec::zero(1.0).unwrap();
        let p = regular_profile(&q, 1, 1e-12, 60).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("r,re_phi,im_phi,re_dphi,im_dphi"));
        assert_eq!(lines.count(), PANELS * PANEL_ORDER);
    }
}
