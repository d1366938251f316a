mod common;

use common::*;
use num_complex::Complex64;
use skewfold::bottcher::{chi, phi, psi, relative_log_residual, PhiContext};
use skewfold::error::Error;
use skewfold::poly::LogPoint;
use skewfold::region::estimate_r;

#[test]
fn monomial_map_is_its_own_coordinate() {
    let f = map(&[(2, 0, 1.0)], &[(1, 2, 1.0)]);
    let plan = only_plan(&f);
    let spec = estimate_r(&f, &plan, 0.01).unwrap();
    for x in spec.sample_lift(20, 1) {
        let e = phi(&f, &plan, &spec, &x, 1e-12, 100).unwrap();
        assert!(relative_log_residual(&e.log_phi, &x) < 1e-15);
    }
}

#[test]
fn agrees_with_product_formula_with_general_coefficients() {
    // leading coefficients away from 1 and complex
    let f = map(&[(3, 0, 2.0), (1, 0, -1.5)], &[(3, 2, 0.5), (5, 0, 1.0), (2, 1, 1.0)]);
    let plan = only_plan(&f);
    let spec = estimate_r(&f, &plan, 0.01).unwrap();
    let ctx = PhiContext::new(&f, &plan, &spec).unwrap();
    for (z, w) in spec.sample(10, 3) {
        let x = LogPoint::from_point(z, w).unwrap();
        let (lib, ..) = ctx.phi_log(&x, 1e-14, 400).unwrap();
        let (oz, ow) = product_formula_phi(&f, &plan, z, w, 12);
        assert!(relative_log_residual(&lib, &LogPoint::new(oz, ow)) < 1e-10);
    }
}

#[test]
fn psi_inverts_phi() {
    for (name, f) in worked() {
        let plan = only_plan(&f);
        let spec = estimate_r(&f, &plan, 0.01).unwrap();
        let ctx = PhiContext::new(&f, &plan, &spec).unwrap();
        for x in spec.sample_lift(10, 4) {
            let (y, ..) = ctx.phi_log(&x, 1e-13, 400).unwrap();
            let back = psi(&f, &plan, &spec, &y, 1e-12).unwrap();
            assert!(relative_log_residual(&back, &x) < 1e-9, "{name}");
        }
    }
}

#[test]
fn points_outside_u_are_rejected() {
    let f = case2();
    let plan = only_plan(&f);
    let spec = estimate_r(&f, &plan, 0.01).unwrap();
    let x = LogPoint::from_point(Complex64::new(2.0, 0.0), Complex64::new(2.0, 0.0)).unwrap();
    assert!(matches!(phi(&f, &plan, &spec, &x, 1e-12, 100), Err(Error::InvalidInput(_))));
}

#[test]
fn chi_refuses_d_one() {
    let f = map(&[(6, 0, 1.0)], &[(3, 1, 1.0), (0, 2, 1.0)]);
    let plan = only_plan(&f);
    assert!(matches!(chi(&f, &plan, Complex64::new(50.0, 0.0), 1e-12), Err(Error::Hypothesis(_))));
}
