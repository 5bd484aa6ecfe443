//! Bicomplex numbers `W = sc + j·vec` with `sc, vec ∈ ℂ`, `j² = −1` and `ij = ji`.
//!
//! Values are stored in the scalar/vector form. The idempotent components
//! `W± = sc ∓ i·vec` are produced on demand; in that basis the product is
//! component-wise, `(WV)± = W±·V±`, and the algebra splits as
//! `W = p⁺W⁺ + p⁻W⁻` with `p± = (1 ± ij)/2`.
//!
//! ```
//! use vekua::bicomplex::Bicomplex;
//!
//! let w = Bicomplex::ONE + Bicomplex::J;
//! let v = Bicomplex::ONE - Bicomplex::J;
//! assert_eq!(w * v, Bicomplex::from_real(2.0));
//! ```

use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Relative zero-divisor threshold used by [`Bicomplex::inverse`] callers that
/// have no better scale at hand.
pub const DEFAULT_ZERO_DIVISOR_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bicomplex {
    pub sc: C64,
    pub vec: C64,
}

impl Bicomplex {
    pub const ZERO: Bicomplex = Bicomplex::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    pub const ONE: Bicomplex = Bicomplex::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    pub const J: Bicomplex = Bicomplex::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    /// `k = ij`, the hyperbolic unit (`k² = 1`).
    pub const K: Bicomplex = Bicomplex::new(C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    /// `p⁺ = (1 + k)/2`.
    pub const P_PLUS: Bicomplex = Bicomplex::new(C64::new(0.5, 0.0), C64::new(0.0, 0.5));
    /// `p⁻ = (1 − k)/2`.
    pub const P_MINUS: Bicomplex = Bicomplex::new(C64::new(0.5, 0.0), C64::new(0.0, -0.5));

    pub const fn new(sc: C64, vec: C64) -> Self {
        Bicomplex { sc, vec }
    }

    pub fn from_real(x: f64) -> Self {
        Bicomplex::new(C64::new(x, 0.0), C64::new(0.0, 0.0))
    }

    pub fn from_scalar(sc: C64) -> Self {
        Bicomplex::new(sc, C64::new(0.0, 0.0))
    }

    /// Builds `p⁺·plus + p⁻·minus`.
    pub fn from_idempotent(plus: C64, minus: C64) -> Self {
        Bicomplex::new((plus + minus) * 0.5, I * (plus - minus) * 0.5)
    }

    /// Returns `(W⁺, W⁻) = (sc − i·vec, sc + i·vec)`.
    pub fn idempotent(self) -> (C64, C64) {
        (self.sc - I * self.vec, self.sc + I * self.vec)
    }

    /// Bicomplex conjugation `sc − j·vec`.
    pub fn conj_bar(self) -> Self {
        Bicomplex::new(self.sc, -self.vec)
    }

    /// The involution `W† = p⁺(W⁺)* + p⁻(W⁻)* = sc* − j·vec*`.
    pub fn conj_dagger(self) -> Self {
        Bicomplex::new(self.sc.conj(), -self.vec.conj())
    }

    /// Complex-valued inner product `Sc(W·V†) = sc_W·sc_V* + vec_W·vec_V*`.
    pub fn inner(self, other: Bicomplex) -> C64 {
        self.sc * other.sc.conj() + self.vec * other.vec.conj()
    }

    pub fn norm_sqr(self) -> f64 {
        self.sc.norm_sqr() + self.vec.norm_sqr()
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `W·W̄ = sc² + vec²`, a complex number that vanishes exactly on zero divisors.
    pub fn norm_product(self) -> C64 {
        self.sc * self.sc + self.vec * self.vec
    }

    pub fn is_finite(self) -> bool {
        self.sc.is_finite() && self.vec.is_finite()
    }

    /// Inverse `W̄ / (W·W̄)`.
    ///
    /// `W` is treated as a zero divisor when `|W·W̄| ≤ eps·|W|²`.
    pub fn inverse(self, eps: f64) -> Result<Self> {
        let product = self.norm_product();
        let norm_sq = self.norm_sqr();
        if !(product.norm() > eps * norm_sq) {
            return Err(Error::ZeroDivisor {
                product: product.norm(),
                norm_sq,
            });
        }
        Ok(self.conj_bar().scale(product.inv()))
    }

    /// Multiplication by a complex scalar.
    pub fn scale(self, c: C64) -> Self {
        Bicomplex::new(self.sc * c, self.vec * c)
    }

    /// `e^W = p⁺e^{W⁺} + p⁻e^{W⁻}`.
    pub fn exp(self) -> Self {
        let (plus, minus) = self.idempotent();
        Bicomplex::from_idempotent(plus.exp(), minus.exp())
    }

    /// Integer power through the idempotent components.
    pub fn powi(self, n: i32) -> Self {
        let (plus, minus) = self.idempotent();
        Bicomplex::from_idempotent(plus.powi(n), minus.powi(n))
    }

    /// `ẑ = x + j·y` for `z = x + iy`.
    pub fn hat(z: C64) -> Self {
        Bicomplex::new(C64::new(z.re, 0.0), C64::new(z.im, 0.0))
    }
}

/// `ẑⁿ = p⁺(z*)ⁿ + p⁻zⁿ`, which in polar form is `rⁿ(cos nθ + j sin nθ)`.
pub fn hat_pow(z: C64, n: u32) -> Bicomplex {
    let zn = z.powu(n);
    Bicomplex::from_idempotent(zn.conj(), zn)
}

impl Add for Bicomplex {
    type Output = Bicomplex;
    fn add(self, rhs: Bicomplex) -> Bicomplex {
        Bicomplex::new(self.sc + rhs.sc, self.vec + rhs.vec)
    }
}

impl Sub for Bicomplex {
    type Output = Bicomplex;
    fn sub(self, rhs: Bicomplex) -> Bicomplex {
        Bicomplex::new(self.sc - rhs.sc, self.vec - rhs.vec)
    }
}

impl Neg for Bicomplex {
    type Output = Bicomplex;
    fn neg(self) -> Bicomplex {
        Bicomplex::new(-self.sc, -self.vec)
    }
}

impl Mul for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, rhs: Bicomplex) -> Bicomplex {
        Bicomplex::new(
            self.sc * rhs.sc - self.vec * rhs.vec,
            self.sc * rhs.vec + self.vec * rhs.sc,
        )
    }
}

impl Mul<C64> for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, rhs: C64) -> Bicomplex {
        self.scale(rhs)
    }
}

impl Mul<f64> for Bicomplex {
    type Output = Bicomplex;
    fn mul(self, rhs: f64) -> Bicomplex {
        Bicomplex::new(self.sc * rhs, self.vec * rhs)
    }
}

impl AddAssign for Bicomplex {
    fn add_assign(&mut self, rhs: Bicomplex) {
        self.sc += rhs.sc;
        self.vec += rhs.vec;
    }
}

impl SubAssign for Bicomplex {
    fn sub_assign(&mut self, rhs: Bicomplex) {
        self.sc -= rhs.sc;
        self.vec -= rhs.vec;
    }
}

impl MulAssign for Bicomplex {
    fn mul_assign(&mut self, rhs: Bicomplex) {
        *self = *self * rhs;
    }
}

impl Sum for Bicomplex {
    fn sum<It: Iterator<Item = Bicomplex>>(iter: It) -> Bicomplex {
        iter.fold(Bicomplex::ZERO, |acc, w| acc + w)
    }
}

impl From<C64> for Bicomplex {
    fn from(sc: C64) -> Self {
        Bicomplex::from_scalar(sc)
    }
}

/// `Σ A_n ẑⁿ` with bicomplex coefficients; `coeffs[n]` multiplies `ẑⁿ`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BicomplexPolynomial {
    pub coeffs: Vec<Bicomplex>,
}

impl BicomplexPolynomial {
    pub fn new(coeffs: Vec<Bicomplex>) -> Self {
        BicomplexPolynomial { coeffs }
    }

    /// Highest index with a nonzero coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|a| *a != Bicomplex::ZERO)
    }

    /// Horner evaluation in the bicomplex variable `ẑ`.
    pub fn eval(&self, z: C64) -> Bicomplex {
        let zh = Bicomplex::hat(z);
        self.coeffs
            .iter()
            .rev()
            .fold(Bicomplex::ZERO, |acc, &a| acc * zh + a)
    }

    /// Evaluation through the idempotent split,
    /// `p⁺Σ(A_n)⁺(z*)ⁿ + p⁻Σ(A_n)⁻zⁿ`.
    pub fn eval_idempotent(&self, z: C64) -> Bicomplex {
        let (mut plus, mut minus) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &a in self.coeffs.iter().rev() {
            let (ap, am) = a.idempotent();
            plus = plus * z.conj() + ap;
            minus = minus * z + am;
        }
        Bicomplex::from_idempotent(plus, minus)
    }
}
