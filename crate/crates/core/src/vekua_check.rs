//! Finite-difference checks that a bicomplex field solves the radial Vekua
//! equation `W_r + (𝐣/r)W_θ − (f'/f)·W̄ = 0`, and that its scalar and vector
//! parts solve the corresponding Schrödinger equations.
//!
//! All derivatives are second-order central differences on a uniform polar
//! grid over an annulus. The innermost and outermost rings only feed stencils
//! and are excluded from every sup norm.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bicomplex::Bicomplex;
use crate::error::{Error, Result};
use crate::formal_powers::{FormalPolynomial, FormalPowerBasis, Unit};
use crate::io::fmt_f64;
use crate::potential::PotentialSpec;
use crate::radial::RadialFunction;

/// Minimum number of nodes per direction for the residual operators.
pub const MIN_NODES: usize = 5;

/// Uniform grid in `r ∈ [r_min, r_max]` and `θ ∈ [0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarGrid {
    r_min: f64,
    r_max: f64,
    n_r: usize,
    n_theta: usize,
}

impl PolarGrid {
    pub fn new(r_min: f64, r_max: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        if n_r < 2 || n_theta < 1 {
            return Err(Error::InvalidGrid(format!("need n_r ≥ 2 and n_θ ≥ 1, got {n_r} and {n_theta}")));
        }
        let grid = PolarGrid { r_min, r_max, n_r, n_theta };
        if r_min < 2.0 * grid.h_r() * (1.0 - 1e-12) {
            return Err(Error::InvalidGrid(format!(
                "r_min = {r_min} is closer to the origin than two radial steps ({})",
                2.0 * grid.h_r()
            )));
        }
        Ok(grid)
    }

    /// Radial step close to `h` and `n_θ = round(2π/h)`.
    pub fn with_spacing(r_min: f64, r_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {h}")));
        }
        let n_r = ((r_max - r_min) / h).round() as usize + 1;
        let n_theta = (TAU / h).round() as usize;
        Self::new(r_min, r_max, n_r, n_theta)
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn h_r(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_r - 1) as f64
    }

    pub fn h_theta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        if i + 1 == self.n_r {
            self.r_max
        } else {
            self.r_min + i as f64 * self.h_r()
        }
    }

    pub fn theta(&self, k: usize) -> f64 {
        k as f64 * self.h_theta()
    }

    pub fn r_nodes(&self) -> Vec<f64> {
        (0..self.n_r).map(|i| self.r(i)).collect()
    }

    pub fn theta_nodes(&self) -> Vec<f64> {
        (0..self.n_theta).map(|k| self.theta(k)).collect()
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_resolution(&self) -> Result<()> {
        if self.n_r < MIN_NODES || self.n_theta < MIN_NODES {
            return Err(Error::GridTooCoarse(format!(
                "{} x {} nodes, need at least {MIN_NODES} per direction",
                self.n_r, self.n_theta
            )));
        }
        Ok(())
    }
}

/// A bicomplex field that can be read at grid node `(i, k)`.
pub trait GridField: Sync {
    fn grid(&self) -> &PolarGrid;
    fn at(&self, i: usize, k: usize) -> Bicomplex;
}

/// A complex scalar field that can be read at grid node `(i, k)`.
pub trait ScalarGridField: Sync {
    fn grid(&self) -> &PolarGrid;
    fn at(&self, i: usize, k: usize) -> C64;
}

/// Stored samples, ring-major.
#[derive(Clone, Debug)]
pub struct BicomplexField {
    grid: PolarGrid,
    values: Vec<Bicomplex>,
}

impl BicomplexField {
    pub fn new(grid: PolarGrid, values: Vec<Bicomplex>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("expected {} samples, got {}", grid.len(), values.len())));
        }
        if values.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(BicomplexField { grid, values })
    }

    pub fn from_fn(grid: PolarGrid, func: impl Fn(f64, f64) -> Bicomplex + Sync) -> Result<Self> {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| func(grid.r(idx / grid.n_theta), grid.theta(idx % grid.n_theta)))
            .collect();
        Self::new(grid, values)
    }

    pub fn values(&self) -> &[Bicomplex] {
        &self.values
    }
}

impl GridField for BicomplexField {
    fn grid(&self) -> &PolarGrid {
        &self.grid
    }
    fn at(&self, i: usize, k: usize) -> Bicomplex {
        self.values[i * self.grid.n_theta + k]
    }
}

/// `Σ_t (sc_r[t](r)·sc_θ[t](θ) + 𝐣·vec_r[t](r)·vec_θ[t](θ))`, stored as ring and
/// angle tables; formal powers have this shape.
#[derive(Clone, Debug)]
pub struct SeparableField {
    grid: PolarGrid,
    terms: Vec<SeparableTerm>,
}

#[derive(Clone, Debug)]
pub struct SeparableTerm {
    pub sc_r: Vec<C64>,
    pub sc_theta: Vec<C64>,
    pub vec_r: Vec<C64>,
    pub vec_theta: Vec<C64>,
}

impl SeparableField {
    pub fn new(grid: PolarGrid, terms: Vec<SeparableTerm>) -> Result<Self> {
        for t in &terms {
            if t.sc_r.len() != grid.n_r
                || t.vec_r.len() != grid.n_r
                || t.sc_theta.len() != grid.n_theta
                || t.vec_theta.len() != grid.n_theta
            {
                return Err(Error::InvalidGrid("separable term does not match the grid".into()));
            }
        }
        Ok(SeparableField { grid, terms })
    }

    /// Builds one term from radial and angular functions.
    pub fn term(
        grid: &PolarGrid,
        sc_r: impl Fn(f64) -> C64,
        sc_theta: impl Fn(f64) -> C64,
        vec_r: impl Fn(f64) -> C64,
        vec_theta: impl Fn(f64) -> C64,
    ) -> SeparableTerm {
        let rs = grid.r_nodes();
        let ts = grid.theta_nodes();
        SeparableTerm {
            sc_r: rs.iter().map(|&r| sc_r(r)).collect(),
            sc_theta: ts.iter().map(|&t| sc_theta(t)).collect(),
            vec_r: rs.iter().map(|&r| vec_r(r)).collect(),
            vec_theta: ts.iter().map(|&t| vec_theta(t)).collect(),
        }
    }

    pub fn terms_mut(&mut self) -> &mut Vec<SeparableTerm> {
        &mut self.terms
    }
}

impl GridField for SeparableField {
    fn grid(&self) -> &PolarGrid {
        &self.grid
    }
    fn at(&self, i: usize, k: usize) -> Bicomplex {
        self.terms
            .iter()
            .map(|t| Bicomplex::new(t.sc_r[i] * t.sc_theta[k], t.vec_r[i] * t.vec_theta[k]))
            .sum()
    }
}

/// `Z^(n)(unit; ·)` on the grid.
pub fn basic_field(basis: &FormalPowerBasis, n: usize, unit: Unit, grid: &PolarGrid) -> Result<SeparableField> {
    let poly = FormalPolynomial::new(vec![crate::formal_powers::FormalTerm { n, coeff: unit.as_bicomplex() }]);
    formal_field(basis, &poly, grid)
}

/// A formal polynomial sampled on the grid, one separable term per entry.
pub fn formal_field(basis: &FormalPowerBasis, poly: &FormalPolynomial, grid: &PolarGrid) -> Result<SeparableField> {
    // Domain and degree checks through a single evaluation at the outer ring.
    for t in &poly.terms {
        basis.eval_basic_polar(t.n, Unit::One, grid.r_max(), 0.0)?;
    }
    let terms = poly
        .terms
        .iter()
        .map(|t| {
            let (a, b, n) = (t.coeff.sc, t.coeff.vec, t.n as f64);
            // Sc(A)Z(1) + Vec(A)Z(𝐣): sc = ρ_f (a cos nθ − b sin nθ), vec = ρ_{1/f} (a sin nθ + b cos nθ).
            SeparableField::term(
                grid,
                |r| basis.radial_parts(t.n, r).0,
                |th| a * (n * th).cos() - b * (n * th).sin(),
                |r| basis.radial_parts(t.n, r).1,
                |th| a * (n * th).sin() + b * (n * th).cos(),
            )
        })
        .collect();
    SeparableField::new(grid.clone(), terms)
}

/// Scalar part of a bicomplex field.
pub struct ScPart<'a, F: GridField>(pub &'a F);
/// Vector part of a bicomplex field.
pub struct VecPart<'a, F: GridField>(pub &'a F);

impl<F: GridField> ScalarGridField for ScPart<'_, F> {
    fn grid(&self) -> &PolarGrid {
        self.0.grid()
    }
    fn at(&self, i: usize, k: usize) -> C64 {
        self.0.at(i, k).sc
    }
}

impl<F: GridField> ScalarGridField for VecPart<'_, F> {
    fn grid(&self) -> &PolarGrid {
        self.0.grid()
    }
    fn at(&self, i: usize, k: usize) -> C64 {
        self.0.at(i, k).vec
    }
}

/// Stored complex scalar samples, ring-major.
#[derive(Clone, Debug)]
pub struct ScalarField {
    grid: PolarGrid,
    values: Vec<C64>,
}

impl ScalarField {
    pub fn from_fn(grid: PolarGrid, func: impl Fn(f64, f64) -> C64 + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|idx| func(grid.r(idx / grid.n_theta), grid.theta(idx % grid.n_theta)))
            .collect();
        ScalarField { grid, values }
    }
}

impl ScalarGridField for ScalarField {
    fn grid(&self) -> &PolarGrid {
        &self.grid
    }
    fn at(&self, i: usize, k: usize) -> C64 {
        self.values[i * self.grid.n_theta + k]
    }
}

/// `|residual|_𝔹` at the interior rings `1..n_r−1`.
#[derive(Clone, Debug)]
pub struct ResidualField {
    grid: PolarGrid,
    values: Vec<f64>,
}

impl ResidualField {
    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, nan_max)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Rows `r, theta, residual`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "theta", "residual"])?;
        let n_theta = self.grid.n_theta;
        for (idx, v) in self.values.iter().enumerate() {
            let (i, k) = (idx / n_theta + 1, idx % n_theta);
            w.write_record([self.grid.r(i), self.grid.theta(k), *v].map(fmt_f64))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// `f'/f` at every ring.
fn log_derivative(f: &RadialFunction, grid: &PolarGrid) -> Result<Vec<C64>> {
    if grid.r_max() > f.grid().radius() * (1.0 + 1e-12) {
        return Err(Error::OutsideDomain { modulus: grid.r_max(), radius: f.grid().radius() });
    }
    grid.r_nodes()
        .into_iter()
        .map(|r| {
            let (v, d) = f.eval_with_deriv(r);
            if v.norm() < crate::radial::VANISHING_F_THRESHOLD {
                return Err(Error::VanishingF { r, value: v.norm() });
            }
            Ok(d / v)
        })
        .collect()
}

/// Maps `op(i, k)` over the interior rings in parallel.
fn interior_map<T: Send>(grid: &PolarGrid, op: impl Fn(usize, usize) -> T + Sync) -> Vec<T> {
    let n_theta = grid.n_theta;
    (1..grid.n_r - 1)
        .into_par_iter()
        .flat_map_iter(|i| (0..n_theta).map(move |k| (i, k)))
        .map(|(i, k)| op(i, k))
        .collect()
}

fn interior_sup(grid: &PolarGrid, op: impl Fn(usize, usize) -> f64 + Sync) -> f64 {
    let n_theta = grid.n_theta;
    (1..grid.n_r - 1)
        .into_par_iter()
        .map(|i| (0..n_theta).map(|k| op(i, k)).fold(0.0, nan_max))
        .reduce(|| 0.0, nan_max)
}

fn vekua_at<F: GridField>(w: &F, logder: &[C64], i: usize, k: usize) -> Bicomplex {
    let grid = w.grid();
    let (kp, km) = ((k + 1) % grid.n_theta, (k + grid.n_theta - 1) % grid.n_theta);
    let w_r = (w.at(i + 1, k) - w.at(i - 1, k)) * (0.5 / grid.h_r());
    let w_t = (w.at(i, kp) - w.at(i, km)) * (0.5 / grid.h_theta());
    w_r + Bicomplex::J * w_t * (1.0 / grid.r(i)) - w.at(i, k).conj_bar().scale(logder[i])
}

/// Sup norm over the interior of the discrete Vekua residual.
pub fn vekua_residual<F: GridField>(w: &F, f: &RadialFunction) -> Result<f64> {
    w.grid().check_resolution()?;
    let logder = log_derivative(f, w.grid())?;
    Ok(interior_sup(w.grid(), |i, k| vekua_at(w, &logder, i, k).norm()))
}

/// Per-node magnitude of the discrete Vekua residual.
pub fn vekua_residual_field<F: GridField>(w: &F, f: &RadialFunction) -> Result<ResidualField> {
    w.grid().check_resolution()?;
    let logder = log_derivative(f, w.grid())?;
    let values = interior_map(w.grid(), |i, k| vekua_at(w, &logder, i, k).norm());
    Ok(ResidualField { grid: w.grid().clone(), values })
}

/// Sup norms of `f·∂_r(u/f) − (1/r)∂_θ v` and `(1/f)·∂_r(f v) + (1/r)∂_θ u`
/// for `W = u + 𝐣v`.
pub fn cr_system_residual<F: GridField>(w: &F, f: &RadialFunction) -> Result<(f64, f64)> {
    let grid = w.grid();
    grid.check_resolution()?;
    log_derivative(f, grid)?;
    let fr: Vec<C64> = grid.r_nodes().into_iter().map(|r| f.eval(r)).collect();
    let (h_r, h_t) = (grid.h_r(), grid.h_theta());
    let n_theta = grid.n_theta;
    let pair = |i: usize, k: usize| {
        let (kp, km) = ((k + 1) % n_theta, (k + n_theta - 1) % n_theta);
        let (wp, wm) = (w.at(i + 1, k), w.at(i - 1, k));
        let (tp, tm) = (w.at(i, kp), w.at(i, km));
        let r = grid.r(i);
        let d_u_over_f = (wp.sc / fr[i + 1] - wm.sc / fr[i - 1]) / (2.0 * h_r);
        let d_f_v = (wp.vec * fr[i + 1] - wm.vec * fr[i - 1]) / (2.0 * h_r);
        let v_t = (tp.vec - tm.vec) / (2.0 * h_t);
        let u_t = (tp.sc - tm.sc) / (2.0 * h_t);
        let first = fr[i] * d_u_over_f - v_t / r;
        let second = d_f_v / fr[i] + u_t / r;
        (first.norm(), second.norm())
    };
    let first = interior_sup(grid, |i, k| pair(i, k).0);
    let second = interior_sup(grid, |i, k| pair(i, k).1);
    Ok((first, second))
}

/// Sup norm of `(Δ − q)u` with the five-point polar Laplacian
/// `u_rr + u_r/r + u_θθ/r²`.
pub fn schrodinger_residual<U: ScalarGridField>(u: &U, q: &PotentialSpec) -> Result<f64> {
    let grid = u.grid();
    grid.check_resolution()?;
    let qr: Vec<C64> = grid.r_nodes().into_iter().map(|r| q.eval(r)).collect();
    let (h_r, h_t) = (grid.h_r(), grid.h_theta());
    let n_theta = grid.n_theta;
    Ok(interior_sup(grid, |i, k| {
        let (kp, km) = ((k + 1) % n_theta, (k + n_theta - 1) % n_theta);
        let c = u.at(i, k);
        let (up, um) = (u.at(i + 1, k), u.at(i - 1, k));
        let (tp, tm) = (u.at(i, kp), u.at(i, km));
        let r = grid.r(i);
        let u_rr = (up - 2.0 * c + um) / (h_r * h_r);
        let u_r = (up - um) / (2.0 * h_r);
        let u_tt = (tp - 2.0 * c + tm) / (h_t * h_t);
        (u_rr + u_r / r + u_tt / (r * r) - qr[i] * c).norm()
    }))
}

/// Least-squares slope of `log(residual)` against `log(h)`.
pub fn convergence_order(hs: &[f64], residuals: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = hs.iter().zip(residuals).map(|(h, r)| (h.ln(), r.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
