//! `L₂(Ω; 𝔹)` inner products on a disk, Gram matrices of the formal powers,
//! the truncated Bergman kernel and the Bergman projection.
//!
//! The squared norms of the basis are
//!
//! ```text
//! (M_0^1)² = 2π ∫₀^R |f|² r dr,   (M_0^2)² = 2π ∫₀^R |1/f|² r dr,
//! M_n²     = π ∫₀^R r^{2n+1} (|φ_f^(n)|² + |φ_{1/f}^(n)|²) dr,
//! ```
//!
//! each computed by one-dimensional quadrature on the profile grid.

use std::f64::consts::{PI, TAU};
use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bicomplex::Bicomplex;
use crate::error::{Error, Result};
use crate::formal_powers::{apply_coefficient, combine, FormalPolynomial, FormalPowerBasis, FormalTerm, Unit};
use crate::io::fmt_f64;
use crate::quadrature::gauss_legendre_unit;

pub const DEFAULT_RADIAL_NODES: usize = 64;
pub const DEFAULT_ANGULAR_NODES: usize = 256;

/// Tensor rule on the disk of radius `R`: Gauss–Legendre in `r` (with the
/// Jacobian `r` folded into the weights) times the uniform rule in `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskQuadrature {
    radius: f64,
    r_nodes: Vec<f64>,
    r_weights: Vec<f64>,
    n_theta: usize,
}

impl DiskQuadrature {
    pub fn new(radius: f64, radial_nodes: usize, angular_nodes: usize) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidGrid(format!("radius must be positive, got {radius}")));
        }
        if radial_nodes == 0 || angular_nodes == 0 {
            return Err(Error::InvalidGrid("quadrature needs at least one node per direction".into()));
        }
        let (x, w) = gauss_legendre_unit(radial_nodes);
        let r_nodes: Vec<f64> = x.iter().map(|t| t * radius).collect();
        let r_weights = w.iter().zip(&r_nodes).map(|(w, r)| w * radius * r).collect();
        Ok(DiskQuadrature { radius, r_nodes, r_weights, n_theta: angular_nodes })
    }

    pub fn with_defaults(radius: f64) -> Result<Self> {
        Self::new(radius, DEFAULT_RADIAL_NODES, DEFAULT_ANGULAR_NODES)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r_nodes
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn theta(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n_theta as f64
    }

    pub fn len(&self) -> usize {
        self.r_nodes.len() * self.n_theta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node `(r, θ)` and weight for a flat index (ring-major).
    pub fn node(&self, idx: usize) -> (f64, f64, f64) {
        let (i, k) = (idx / self.n_theta, idx % self.n_theta);
        (self.r_nodes[i], self.theta(k), self.r_weights[i] * TAU / self.n_theta as f64)
    }

    pub fn sample(&self, func: impl Fn(f64, f64) -> Bicomplex + Sync) -> QuadField {
        let values = (0..self.len())
            .into_par_iter()
            .map(|idx| {
                let (r, t, _) = self.node(idx);
                func(r, t)
            })
            .collect();
        QuadField { values }
    }

    /// Rows `r, theta, weight`, the layout expected by [`QuadField::read_csv`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "theta", "weight"])?;
        for idx in 0..self.len() {
            let (r, t, wt) = self.node(idx);
            w.write_record([r, t, wt].map(fmt_f64))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Samples of a bicomplex function at the nodes of a [`DiskQuadrature`].
#[derive(Clone, Debug, PartialEq)]
pub struct QuadField {
    values: Vec<Bicomplex>,
}

impl QuadField {
    pub fn new(quad: &DiskQuadrature, values: Vec<Bicomplex>) -> Result<Self> {
        if values.len() != quad.len() {
            return Err(Error::InvalidGrid(format!("expected {} samples, got {}", quad.len(), values.len())));
        }
        Ok(QuadField { values })
    }

    pub fn values(&self) -> &[Bicomplex] {
        &self.values
    }

    /// Reads rows `r, theta, sc_re, sc_im, vec_re, vec_im` given at the
    /// quadrature nodes in ring-major order.
    pub fn read_csv<R: std::io::Read>(quad: &DiskQuadrature, input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let mut values = Vec::with_capacity(quad.len());
        for (idx, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let nums: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Format(format!("row {}: {e}", idx + 1))))
                .collect::<Result<_>>()?;
            if nums.len() != 6 {
                return Err(Error::Format(format!("row {} has {} columns, expected 6", idx + 1, nums.len())));
            }
            if idx >= quad.len() {
                return Err(Error::Format(format!("more rows than the {} quadrature nodes", quad.len())));
            }
            let (r, t, _) = quad.node(idx);
            if (nums[0] - r).abs() > 1e-9 * quad.radius || (nums[1] - t).abs() > 1e-9 {
                return Err(Error::Format(format!("row {} is not at quadrature node ({r}, {t})", idx + 1)));
            }
            values.push(Bicomplex::new(C64::new(nums[2], nums[3]), C64::new(nums[4], nums[5])));
        }
        Self::new(quad, values)
    }
}

/// `∬ ⟨W, V⟩_𝔹 dA`.
pub fn l2_inner(w: &QuadField, v: &QuadField, quad: &DiskQuadrature) -> Result<C64> {
    if w.values.len() != quad.len() || v.values.len() != quad.len() {
        return Err(Error::InvalidGrid("field does not match the quadrature".into()));
    }
    let sum = (0..quad.len())
        .into_par_iter()
        .with_min_len(1024)
        .map(|idx| {
            let (a, b) = (w.values[idx], v.values[idx]);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFinite);
            }
            Ok(a.inner(b) * quad.node(idx).2)
        })
        .try_reduce(|| C64::new(0.0, 0.0), |x, y| Ok(x + y))?;
    Ok(sum)
}

/// `∬ ⟨W, V⟩_𝔹 dA` for callables.
pub fn l2_inner_fn(
    w: impl Fn(f64, f64) -> Bicomplex + Sync,
    v: impl Fn(f64, f64) -> Bicomplex + Sync,
    quad: &DiskQuadrature,
) -> Result<C64> {
    l2_inner(&quad.sample(w), &quad.sample(v), quad)
}

/// Index of `Z^(n)(unit)` in the Gram matrix: `2n` for `1`, `2n + 1` for `𝐣`.
pub fn gram_index(n: usize, unit: Unit) -> usize {
    2 * n + if unit == Unit::J { 1 } else { 0 }
}

fn check_quad(basis: &FormalPowerBasis, quad: &DiskQuadrature) -> Result<()> {
    if quad.radius > basis.radius() * (1.0 + 1e-12) {
        return Err(Error::OutsideDomain { modulus: quad.radius, radius: basis.radius() });
    }
    Ok(())
}

/// Every `Z^(n)(unit)`, `n ≤ big_n`, sampled at the quadrature nodes, in
/// [`gram_index`] order.
pub fn sample_basis(basis: &FormalPowerBasis, big_n: usize, quad: &DiskQuadrature) -> Result<Vec<QuadField>> {
    if big_n > basis.n_max() {
        return Err(Error::DegreeOutOfRange { degree: big_n, max: basis.n_max() });
    }
    check_quad(basis, quad)?;
    let radial: Vec<Vec<(C64, C64)>> = (0..=big_n)
        .map(|n| quad.r_nodes.iter().map(|&r| basis.radial_parts(n, r)).collect())
        .collect();
    let mut out = Vec::with_capacity(2 * big_n + 2);
    for n in 0..=big_n {
        for unit in [Unit::One, Unit::J] {
            let values = (0..quad.len())
                .map(|idx| {
                    let (i, k) = (idx / quad.n_theta, idx % quad.n_theta);
                    let (a, b) = radial[n][i];
                    combine(n, unit, a, b, quad.theta(k))
                })
                .collect();
            out.push(QuadField { values });
        }
    }
    Ok(out)
}

/// Hermitian matrix `G[a][b] = ⟨Z_a, Z_b⟩` over `{Z^(n)(1), Z^(n)(𝐣)}`, `n ≤ big_n`.
pub fn gram_matrix(basis: &FormalPowerBasis, big_n: usize, quad: &DiskQuadrature) -> Result<Vec<Vec<C64>>> {
    let fields = sample_basis(basis, big_n, quad)?;
    let size = fields.len();
    let mut g = vec![vec![C64::new(0.0, 0.0); size]; size];
    for a in 0..size {
        for b in a..size {
            let v = l2_inner(&fields[a], &fields[b], quad)?;
            g[a][b] = v;
            g[b][a] = v.conj();
        }
    }
    Ok(g)
}

/// Writes a matrix as rows of `re_0, im_0, re_1, im_1, ...`.
pub fn write_matrix_csv<W: Write>(m: &[Vec<C64>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = (0..m.len()).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
    w.write_record(&header)?;
    for row in m {
        w.write_record(row.iter().flat_map(|z| [fmt_f64(z.re), fmt_f64(z.im)]))?;
    }
    w.flush()?;
    Ok(())
}

/// The basis together with the squared norms needed by the kernel.
#[derive(Clone, Debug)]
pub struct KernelTruncation<'a> {
    basis: &'a FormalPowerBasis,
    big_n: usize,
    norms: KernelNorms,
}

/// `(M_0^1)²`, `(M_0^2)²` and `M_n²` for `n = 1..=N` (`m_sq[0]` unused, set to 0).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelNorms {
    pub m01_sq: f64,
    pub m02_sq: f64,
    pub m_sq: Vec<f64>,
}

impl KernelNorms {
    /// Squared norm of `Z^(n)(unit)`.
    pub fn norm_sq(&self, n: usize, unit: Unit) -> f64 {
        match (n, unit) {
            (0, Unit::One) => self.m01_sq,
            (0, Unit::J) => self.m02_sq,
            (n, _) => self.m_sq[n],
        }
    }
}

/// One-dimensional radial norm integrals on the profile grid.
pub fn radial_norms(basis: &FormalPowerBasis, big_n: usize) -> Result<KernelNorms> {
    if big_n > basis.n_max() {
        return Err(Error::DegreeOutOfRange { degree: big_n, max: basis.n_max() });
    }
    let grid = basis.grid();
    let integrate = |g: &dyn Fn(usize, f64) -> f64| -> f64 {
        grid.nodes().iter().zip(grid.weights()).enumerate().map(|(i, (&r, &w))| w * g(i, r)).sum()
    };
    let f = basis.f().values();
    let m01_sq = TAU * integrate(&|i, r| f[i].norm_sqr() * r);
    let m02_sq = TAU * integrate(&|i, r| f[i].inv().norm_sqr() * r);
    let mut m_sq = vec![0.0; big_n + 1];
    for (n, slot) in m_sq.iter_mut().enumerate().skip(1) {
        let (pf, pi) = (basis.phi_f()[n].values(), basis.phi_inv_f()[n].values());
        *slot = PI * integrate(&|i, r| r.powi(2 * n as i32 + 1) * (pf[i].norm_sqr() + pi[i].norm_sqr()));
    }
    Ok(KernelNorms { m01_sq, m02_sq, m_sq })
}

/// Basis values `(Z^(n)(1; z), Z^(n)(𝐣; z))` for `n ≤ N` at one point.
fn point_values(basis: &FormalPowerBasis, big_n: usize, z: C64) -> Result<Vec<(Bicomplex, Bicomplex)>> {
    (0..=big_n)
        .map(|n| Ok((basis.eval_basic(n, Unit::One, z)?, basis.eval_basic(n, Unit::J, z)?)))
        .collect()
}

impl<'a> KernelTruncation<'a> {
    pub fn new(basis: &'a FormalPowerBasis, big_n: usize) -> Result<Self> {
        let norms = radial_norms(basis, big_n)?;
        Ok(KernelTruncation { basis, big_n, norms })
    }

    pub fn truncation(&self) -> usize {
        self.big_n
    }

    pub fn norms(&self) -> &KernelNorms {
        &self.norms
    }

    pub fn basis(&self) -> &FormalPowerBasis {
        self.basis
    }

    /// `Σ_{n ≤ N} Σ_Λ ⟨A, Z^(n)(Λ; ζ)⟩ Z^(n)(Λ; z) / ‖Z^(n)(Λ)‖²`.
    ///
    /// The `n = 0` part equals `Sc(A) f*(ζ) f(z)/(M_0^1)² + 𝐣 Vec(A)/((M_0^2)² f*(ζ) f(z))`.
    pub fn eval(&self, a: Bicomplex, z: C64, zeta: C64) -> Result<Bicomplex> {
        let at_z = point_values(self.basis, self.big_n, z)?;
        let at_zeta = point_values(self.basis, self.big_n, zeta)?;
        Ok(self.eval_cached(a, &at_z, &at_zeta))
    }

    fn eval_cached(&self, a: Bicomplex, at_z: &[(Bicomplex, Bicomplex)], at_zeta: &[(Bicomplex, Bicomplex)]) -> Bicomplex {
        at_z.iter()
            .zip(at_zeta)
            .enumerate()
            .map(|(n, ((z1, zj), (w1, wj)))| {
                z1.scale(a.inner(*w1) / self.norms.norm_sq(n, Unit::One))
                    + zj.scale(a.inner(*wj) / self.norms.norm_sq(n, Unit::J))
            })
            .sum()
    }

    /// `∬ K(W(ζ); z, ζ) dA_ζ` by quadrature over `ζ`.
    pub fn reproduce(&self, w: &FormalPolynomial, z: C64, quad: &DiskQuadrature) -> Result<Bicomplex> {
        check_quad(self.basis, quad)?;
        let at_z = point_values(self.basis, self.big_n, z)?;
        let fields = sample_basis(self.basis, self.big_n, quad)?;
        let max_deg = w.terms.iter().map(|t| t.n).max().unwrap_or(0);
        let w_fields = sample_basis(self.basis, max_deg, quad)?;
        let total = (0..quad.len())
            .into_par_iter()
            .with_min_len(256)
            .map(|idx| {
                let w_zeta: Bicomplex = w
                    .terms
                    .iter()
                    .map(|t| apply_coefficient(t.coeff, w_fields[2 * t.n].values[idx], w_fields[2 * t.n + 1].values[idx]))
                    .sum();
                let at_zeta: Vec<(Bicomplex, Bicomplex)> =
                    (0..=self.big_n).map(|n| (fields[2 * n].values[idx], fields[2 * n + 1].values[idx])).collect();
                self.eval_cached(w_zeta, &at_z, &at_zeta) * quad.node(idx).2
            })
            .reduce(|| Bicomplex::ZERO, |x, y| x + y);
        Ok(total)
    }

    /// Orthogonal projection onto the span of `Z^(n)(Λ)`, `n ≤ N`, with
    /// coefficients `⟨Ψ, Z^(n)(Λ)⟩ / ‖Z^(n)(Λ)‖²`.
    pub fn project(&self, psi: &QuadField, quad: &DiskQuadrature) -> Result<FormalPolynomial> {
        let fields = sample_basis(self.basis, self.big_n, quad)?;
        let terms = (0..=self.big_n)
            .map(|n| {
                let c1 = l2_inner(psi, &fields[2 * n], quad)? / self.norms.norm_sq(n, Unit::One);
                let cj = l2_inner(psi, &fields[2 * n + 1], quad)? / self.norms.norm_sq(n, Unit::J);
                Ok(FormalTerm { n, coeff: Bicomplex::new(c1, cj) })
            })
            .collect::<Result<_>>()?;
        Ok(FormalPolynomial::new(terms))
    }
}

/// Samples a formal polynomial at the quadrature nodes.
pub fn sample_formal(basis: &FormalPowerBasis, w: &FormalPolynomial, quad: &DiskQuadrature) -> Result<QuadField> {
    let max_deg = w.terms.iter().map(|t| t.n).max().unwrap_or(0);
    let fields = sample_basis(basis, max_deg, quad)?;
    let values = (0..quad.len())
        .map(|idx| {
            w.terms
                .iter()
                .map(|t| apply_coefficient(t.coeff, fields[2 * t.n].values[idx], fields[2 * t.n + 1].values[idx]))
                .sum()
        })
        .collect();
    Ok(QuadField { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bicomplex::hat_pow;
    use crate::potential::PotentialSpec;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn area_and_monomials() {
        let quad = DiskQuadrature::with_defaults(1.0).unwrap();
        let area = l2_inner_fn(|_, _| Bicomplex::ONE, |_, _| Bicomplex::ONE, &quad).unwrap();
        assert!((area - PI).norm() < 1e-13);
        let zn = |n: u32| move |r: f64, t: f64| hat_pow(C64::from_polar(r, t), n);
        let cross = l2_inner_fn(zn(3), move |r, t| Bicomplex::J * zn(5)(r, t), &quad).unwrap();
        assert!(cross.norm() < 1e-14);
        let diag = l2_inner_fn(zn(4), zn(4), &quad).unwrap();
        assert!((diag - PI / 5.0).norm() < 1e-14);
    }

    #[test]
    fn non_finite_samples() {
        let quad = DiskQuadrature::new(1.0, 4, 8).unwrap();
        let bad = quad.sample(|r, _| Bicomplex::from_real(if r > 0.5 { f64::NAN } else { 1.0 }));
        let good = quad.sample(|_, _| Bicomplex::ONE);
        assert_eq!(l2_inner(&bad, &good, &quad), Err(Error::NonFinite));
    }

    #[test]
    fn kernel_at_origin_for_zero_potential() {
        let q = PotentialSpec::zero(1.0).unwrap();
        let basis = FormalPowerBasis::build(&q, 5, 1e-12, 60).unwrap();
        let k = KernelTruncation::new(&basis, 5).unwrap();
        let v = k.eval(Bicomplex::ONE, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((v - Bicomplex::from_real(1.0 / PI)).norm() < 1e-14);
        assert_eq!(k.eval(Bicomplex::ZERO, c(0.2, 0.1), c(-0.3, 0.0)).unwrap(), Bicomplex::ZERO);
        for n in 1..=5 {
            assert!((k.norms().m_sq[n] - PI / (n as f64 + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn quadrature_csv_round_trip() {
        let quad = DiskQuadrature::new(1.0, 3, 4).unwrap();
        let mut buf = Vec::new();
        quad.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut field_csv = String::from("r,theta,sc_re,sc_im,vec_re,vec_im\n");
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            field_csv.push_str(&format!("{},{},1,0,0,2\n", cols[0], cols[1]));
        }
        let field = QuadField::read_csv(&quad, field_csv.as_bytes()).unwrap();
        assert_eq!(field.values()[5], Bicomplex::new(c(1.0, 0.0), c(0.0, 2.0)));
    }
}
