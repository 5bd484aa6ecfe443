mod common;

use std::f64::consts::PI;

use common::{c, KAPPA};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vekua::bergman::{gram_matrix, radial_norms, sample_formal, DiskQuadrature, KernelTruncation, QuadField};
use vekua::formal_powers::{FormalPolynomial, FormalPowerBasis, FormalTerm, Unit};
use vekua::{Bicomplex, Error, PotentialSpec};

fn helmholtz(n_max: usize) -> FormalPowerBasis {
    let q = PotentialSpec::constant(c(-KAPPA * KAPPA, 0.0), 1.0).unwrap();
    FormalPowerBasis::build(&q, n_max, 1e-12, 60).unwrap()
}

#[test]
fn zero_potential_kernel_is_the_squared_disk_kernel() {
    let q = PotentialSpec::zero(1.0).unwrap();
    let basis = FormalPowerBasis::build(&q, 40, 1e-12, 60).unwrap();
    let kernel = KernelTruncation::new(&basis, 40).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let z = C64::from_polar(0.5 * rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI));
        let zeta = C64::from_polar(0.5 * rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI));
        let w = Bicomplex::hat(z) * Bicomplex::hat(zeta).conj_dagger();
        let base = (Bicomplex::ONE - w).inverse(1e-12).unwrap();
        let want = base * base * (1.0 / PI);
        assert!((kernel.eval(Bicomplex::ONE, z, zeta).unwrap() - want).norm() < 1e-13);
    }
}

#[test]
fn zero_potential_gram_diagonal() {
    let q = PotentialSpec::zero(1.0).unwrap();
    let basis = FormalPowerBasis::build(&q, 5, 1e-12, 60).unwrap();
    let quad = DiskQuadrature::with_defaults(1.0).unwrap();
    let g = gram_matrix(&basis, 5, &quad).unwrap();
    for (a, row) in g.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            let want = if a == b { PI / (a / 2 + 1) as f64 } else { 0.0 };
            assert!((v - want).norm() < 1e-13, "({a}, {b})");
        }
    }
}

/// For `|f| ≢ 1` the two degree-0 norms differ, and only `(M_0^2)²` in the
/// 𝐣 term reproduces `Z^(0)(𝐣)`.
#[test]
fn degree_zero_reproduction_fixes_the_j_constant() {
    let basis = helmholtz(1);
    let norms = radial_norms(&basis, 1).unwrap();
    assert!((norms.m01_sq - norms.m02_sq).abs() > 1e-3 * norms.m01_sq);
    let kernel = KernelTruncation::new(&basis, 1).unwrap();
    let quad = DiskQuadrature::with_defaults(1.0).unwrap();
    let w = FormalPolynomial::new(vec![FormalTerm { n: 0, coeff: Bicomplex::J }]);
    for z in [c(0.0, 0.0), c(0.3, -0.2), c(-0.7, 0.1)] {
        let got = kernel.reproduce(&w, z, &quad).unwrap();
        let want = w.eval(&basis, z).unwrap();
        assert!((got - want).norm() < 1e-13);
        let with_m01 = got.scale(C64::new(norms.m02_sq / norms.m01_sq, 0.0));
        assert!((with_m01 - want).norm() > 1e-3);
    }
}

#[test]
fn projection_ignores_orthogonal_noise() {
    let basis = helmholtz(3);
    let kernel = KernelTruncation::new(&basis, 3).unwrap();
    let quad = DiskQuadrature::with_defaults(1.0).unwrap();
    let target = FormalPolynomial::new(vec![FormalTerm { n: 1, coeff: Bicomplex::ONE }]);
    let clean = sample_formal(&basis, &target, &quad).unwrap();
    let noise = quad.sample(|r, t| Bicomplex::new(C64::from_polar(0.2 * r * r, 5.0 * t), C64::from_polar(0.1 * r, 7.0 * t)));
    let noisy: Vec<Bicomplex> = clean.values().iter().zip(noise.values()).map(|(a, b)| *a + *b).collect();
    let proj = kernel.project(&QuadField::new(&quad, noisy).unwrap(), &quad).unwrap();
    for n in 0..=3 {
        let want = if n == 1 { Bicomplex::ONE } else { Bicomplex::ZERO };
        assert!((proj.coefficient(n) - want).norm() < 1e-12, "n = {n}");
    }
    let zero = kernel.project(&quad.sample(|_, _| Bicomplex::ZERO), &quad).unwrap();
    assert!(zero.terms.iter().all(|t| t.coeff == Bicomplex::ZERO));
}

#[test]
fn quadrature_must_fit_inside_the_basis_disk() {
    let basis = helmholtz(1);
    let quad = DiskQuadrature::with_defaults(1.5).unwrap();
    assert!(matches!(gram_matrix(&basis, 1, &quad), Err(Error::OutsideDomain { .. })));
    assert!(matches!(gram_matrix(&basis, 2, &DiskQuadrature::with_defaults(1.0).unwrap()), Err(Error::DegreeOutOfRange { .. })));
}

#[test]
fn kernel_norms_follow_the_unit_index() {
    let basis = helmholtz(2);
    let norms = radial_norms(&basis, 2).unwrap();
    assert_eq!(norms.norm_sq(0, Unit::J), norms.m02_sq);
    assert_eq!(norms.norm_sq(2, Unit::J), norms.norm_sq(2, Unit::One));
}
