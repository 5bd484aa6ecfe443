mod common;

use std::f64::consts::PI;

use common::{c, helmholtz_profile, KAPPA};
use num_complex::Complex64 as C64;
use vekua::formal_powers::{FormalPolynomial, FormalPowerBasis, FormalTerm, Unit};
use vekua::vekua_check::{
    basic_field, convergence_order, cr_system_residual, formal_field, schrodinger_residual, vekua_residual, PolarGrid,
    VecPart,
};
use vekua::{Bicomplex, Error, PotentialSpec};

fn helmholtz(n_max: usize) -> FormalPowerBasis {
    let q = PotentialSpec::constant(c(-KAPPA * KAPPA, 0.0), 1.0).unwrap();
    FormalPowerBasis::build(&q, n_max, 1e-12, 60).unwrap()
}

#[test]
fn second_power_against_bessel() {
    let b = helmholtz(2);
    let (r, theta) = (0.8, PI / 3.0);
    let z = C64::from_polar(r, theta);
    let phi = helmholtz_profile(2, KAPPA, r);
    let one = b.eval_basic(2, Unit::One, z).unwrap();
    let j = b.eval_basic(2, Unit::J, z).unwrap();
    assert!((one.sc - r * r * phi * (2.0 * theta).cos()).norm() < 1e-13);
    assert!((j.sc + r * r * phi * (2.0 * theta).sin()).norm() < 1e-13);
    let psi = b.phi_inv_f()[2].eval(r);
    assert!((one.vec - r * r * psi * (2.0 * theta).sin()).norm() < 1e-13);
    assert!((j.vec - r * r * psi * (2.0 * theta).cos()).norm() < 1e-13);
}

#[test]
fn general_coefficient_splits_into_units() {
    let b = helmholtz(3);
    let a = Bicomplex::new(c(0.3, -1.2), c(0.5, 0.25));
    for n in 0..=3 {
        for z in [c(0.1, 0.2), c(-0.6, 0.3), c(0.0, -0.99)] {
            let direct = b.eval_power(n, a, z).unwrap();
            let split = b.eval_basic(n, Unit::One, z).unwrap().scale(a.sc) + b.eval_basic(n, Unit::J, z).unwrap().scale(a.vec);
            assert!((direct - split).norm() < 1e-15);
        }
    }
    let p = FormalPolynomial::new(vec![FormalTerm { n: 1, coeff: a }, FormalTerm { n: 3, coeff: Bicomplex::J }]);
    let z = c(0.4, -0.4);
    let want = b.eval_power(1, a, z).unwrap() + b.eval_power(3, Bicomplex::J, z).unwrap();
    assert!((p.eval(&b, z).unwrap() - want).norm() < 1e-15);
    assert!(matches!(b.eval_basic(1, Unit::One, c(1.5, 0.0)), Err(Error::OutsideDomain { .. })));
    assert!(matches!(b.eval_basic(4, Unit::One, c(0.5, 0.0)), Err(Error::DegreeOutOfRange { .. })));
}

#[test]
fn f_and_its_reciprocal_solve_the_cr_system_exactly() {
    let b = helmholtz(0);
    let grid = PolarGrid::with_spacing(0.05, 0.95, 4e-3).unwrap();
    for unit in [Unit::One, Unit::J] {
        let w = basic_field(&b, 0, unit, &grid).unwrap();
        let (first, second) = cr_system_residual(&w, b.f()).unwrap();
        assert!(first < 1e-13 && second < 1e-13, "{unit:?}: {first:e} {second:e}");
    }
}

#[test]
fn cr_and_vekua_residuals_agree() {
    let b = helmholtz(3);
    let grid = PolarGrid::with_spacing(0.05, 0.95, 2e-3).unwrap();
    for n in 1..=3 {
        let w = basic_field(&b, n, Unit::One, &grid).unwrap();
        let v = vekua_residual(&w, b.f()).unwrap();
        let (first, second) = cr_system_residual(&w, b.f()).unwrap();
        let cr = first.max(second);
        assert!(cr <= 4.0 * v && v <= 4.0 * cr, "n = {n}: vekua {v:e}, cr {cr:e}");
    }
}

#[test]
fn formal_polynomials_are_solutions() {
    let b = helmholtz(4);
    let p = FormalPolynomial::new(vec![
        FormalTerm { n: 0, coeff: Bicomplex::new(c(1.0, 0.0), c(0.0, -0.5)) },
        FormalTerm { n: 2, coeff: Bicomplex::J },
        FormalTerm { n: 4, coeff: Bicomplex::new(c(0.0, 0.3), c(0.2, 0.0)) },
    ]);
    let hs = [4e-3, 2e-3];
    let res: Vec<f64> = hs
        .iter()
        .map(|&h| vekua_residual(&formal_field(&b, &p, &PolarGrid::with_spacing(0.05, 0.95, h).unwrap()).unwrap(), b.f()).unwrap())
        .collect();
    let order = convergence_order(&hs, &res);
    assert!((1.8..=2.2).contains(&order), "order {order}, residuals {res:?}");
}

/// The vector part solves the Darboux-transformed equation, not the original one.
#[test]
fn vector_part_against_the_wrong_potential() {
    let b = helmholtz(2);
    let hs = [4e-3, 2e-3];
    let mut right = Vec::new();
    let mut wrong = Vec::new();
    for &h in &hs {
        let w = basic_field(&b, 2, Unit::One, &PolarGrid::with_spacing(0.05, 0.95, h).unwrap()).unwrap();
        right.push(schrodinger_residual(&VecPart(&w), b.darboux_potential()).unwrap());
        wrong.push(schrodinger_residual(&VecPart(&w), b.potential()).unwrap());
    }
    assert!((1.8..=2.2).contains(&convergence_order(&hs, &right)));
    assert!(convergence_order(&hs, &wrong) < 0.5, "{wrong:?}");
    assert!(wrong[1] > 100.0 * right[1]);
}
