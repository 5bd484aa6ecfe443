//! Gauss–Legendre rules and the composite panel grid on `[0, R]` that carries
//! every radial profile.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Number of panels of the radial grid.
pub const PANELS: usize = 32;
/// Gauss–Legendre nodes per panel.
pub const PANEL_ORDER: usize = 16;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// nodes in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|t| 0.5 * t).collect(),
    )
}

/// Lagrange interpolation on a fixed set of nodes in barycentric form.
#[derive(Clone, Debug)]
pub struct Barycentric {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Barycentric {
    pub fn new(nodes: &[f64]) -> Self {
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(j, &xj)| {
                let prod: f64 = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &xk)| xj - xk)
                    .product();
                1.0 / prod
            })
            .collect();
        Barycentric {
            nodes: nodes.to_vec(),
            weights,
        }
    }

    /// Values `ℓ_j(x)` of all cardinal functions at `x`.
    pub fn basis(&self, x: f64) -> Vec<f64> {
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            let mut out = vec![0.0; self.nodes.len()];
            out[j] = 1.0;
            return out;
        }
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&xj, &wj)| wj / (x - xj))
            .collect();
        let denom: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / denom).collect()
    }

    /// Interpolated value at `x`.
    ///
    /// Deviations from the value at the nearest node are interpolated, which
    /// keeps rounding noise proportional to the local variation of the data
    /// rather than to its size.
    pub fn eval(&self, values: &[C64], x: f64) -> C64 {
        let basis = self.basis(x);
        self.eval_with_basis(&basis, values, x)
    }

    pub(crate) fn eval_with_basis(&self, basis: &[f64], values: &[C64], x: f64) -> C64 {
        let k = self.nearest(x);
        let anchor = values[k];
        anchor
            + basis
                .iter()
                .zip(values)
                .map(|(&l, &v)| (v - anchor) * l)
                .sum::<C64>()
    }

    fn nearest(&self, x: f64) -> usize {
        let mut best = 0;
        for (j, &xj) in self.nodes.iter().enumerate() {
            if (xj - x).abs() < (self.nodes[best] - x).abs() {
                best = j;
            }
        }
        best
    }

    /// Differentiation matrix `D[i][j] = ℓ_j'(x_i)`.
    pub fn diff_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.nodes.len();
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = (self.weights[j] / self.weights[i]) / (self.nodes[i] - self.nodes[j]);
                    d[i][j] = v;
                    diag -= v;
                }
            }
            d[i][i] = diag;
        }
        d
    }
}

/// Composite Gauss–Legendre grid: [`PANELS`] equal panels on `[0, R]` with
/// [`PANEL_ORDER`] nodes each.
///
/// The layout is fixed so that every profile built for the same radius lives
/// on exactly the same nodes.
#[derive(Clone, Debug)]
pub struct PanelGrid {
    radius: f64,
    width: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    local_nodes: Vec<f64>,
    local_weights: Vec<f64>,
    interp: Barycentric,
    /// `cumint[i][j] = ∫₀^{τ_i} ℓ_j` on the unit panel.
    cumint: Vec<Vec<f64>>,
    diff: Vec<Vec<f64>>,
}

impl PanelGrid {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGrid(format!("radius must be positive, got {radius}")));
        }
        let (local_nodes, local_weights) = gauss_legendre_unit(PANEL_ORDER);
        let interp = Barycentric::new(&local_nodes);
        let cumint = local_nodes
            .iter()
            .map(|&x| {
                // ℓ_j has degree PANEL_ORDER - 1, so the same rule on [0, x] is exact.
                let mut row = vec![0.0; PANEL_ORDER];
                for (&t, &w) in local_nodes.iter().zip(&local_weights) {
                    for (acc, l) in row.iter_mut().zip(interp.basis(x * t)) {
                        *acc += x * w * l;
                    }
                }
                row
            })
            .collect();
        let diff = interp.diff_matrix();
        let width = radius / PANELS as f64;
        let mut nodes = Vec::with_capacity(PANELS * PANEL_ORDER);
        let mut weights = Vec::with_capacity(PANELS * PANEL_ORDER);
        for p in 0..PANELS {
            let a = p as f64 * width;
            for (&t, &w) in local_nodes.iter().zip(&local_weights) {
                nodes.push(a + width * t);
                weights.push(width * w);
            }
        }
        Ok(PanelGrid {
            radius,
            width,
            nodes,
            weights,
            local_nodes,
            local_weights,
            interp,
            cumint,
            diff,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn panel_width(&self) -> f64 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes of the reference panel `[0, 1]`.
    pub fn local_nodes(&self) -> &[f64] {
        &self.local_nodes
    }

    pub fn local_weights(&self) -> &[f64] {
        &self.local_weights
    }

    pub fn local_interpolator(&self) -> &Barycentric {
        &self.interp
    }

    /// Whether `other` has the same node layout.
    pub fn same_as(&self, other: &PanelGrid) -> bool {
        self.radius == other.radius
    }

    pub fn integrate(&self, values: &[C64]) -> C64 {
        values.iter().zip(&self.weights).map(|(&v, &w)| v * w).sum()
    }

    /// Running integral `∫₀^{r_i} F` at every node.
    pub fn cumulative(&self, values: &[C64]) -> Vec<C64> {
        debug_assert_eq!(values.len(), self.len());
        let mut out = Vec::with_capacity(values.len());
        let mut start = C64::new(0.0, 0.0);
        for chunk in values.chunks(PANEL_ORDER) {
            for row in &self.cumint {
                let partial: C64 = row.iter().zip(chunk).map(|(&c, &v)| v * c).sum();
                out.push(start + partial * self.width);
            }
            let full: C64 = self
                .local_weights
                .iter()
                .zip(chunk)
                .map(|(&w, &v)| v * w)
                .sum();
            start += full * self.width;
        }
        out
    }

    /// Spectral derivative, panel by panel.
    pub fn derivative(&self, values: &[C64]) -> Vec<C64> {
        let mut out = Vec::with_capacity(values.len());
        for chunk in values.chunks(PANEL_ORDER) {
            for row in &self.diff {
                let d: C64 = row.iter().zip(chunk).map(|(&c, &v)| v * c).sum();
                out.push(d / self.width);
            }
        }
        out
    }

    /// Panel index and local coordinate in `[0, 1]` for a radius in `[0, R]`.
    pub fn locate(&self, r: f64) -> (usize, f64) {
        let p = ((r / self.width).floor().max(0.0) as usize).min(PANELS - 1);
        (p, (r - p as f64 * self.width) / self.width)
    }

    /// Interpolated value at `r`; exact at the nodes.
    pub fn interpolate(&self, values: &[C64], r: f64) -> C64 {
        let (p, x) = self.locate(r);
        self.interp
            .eval(&values[p * PANEL_ORDER..(p + 1) * PANEL_ORDER], x)
    }

    /// Interpolates several node arrays at once, sharing the cardinal weights.
    pub fn interpolate_many<const K: usize>(&self, arrays: [&[C64]; K], r: f64) -> [C64; K] {
        let (p, x) = self.locate(r);
        let basis = self.interp.basis(x);
        let range = p * PANEL_ORDER..(p + 1) * PANEL_ORDER;
        arrays.map(|values| self.interp.eval_with_basis(&basis, &values[range.clone()], x))
    }
}
