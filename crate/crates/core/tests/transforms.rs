mod common;

use common::*;
use skewfold::region::estimate_r;
use skewfold::transforms::{default_pipeline, lemma_translation, pushforward, verify_normal_form, MonomialSubstitution};

#[test]
fn default_pipelines_reach_normal_form() {
    for (name, f) in worked() {
        let plan = only_plan(&f);
        let t = default_pipeline(&f, &plan).unwrap();
        assert!(t.well_defined, "{name}: {:?}", t.reason);
        assert!(verify_normal_form(&t), "{name}");
        assert!(lemma_translation(&t), "{name}");
        assert_eq!(t.polygon.vertices.len(), 1);
        let spec = estimate_r(&f, &plan, 0.01).unwrap();
        assert!(t.numeric_residual(&spec, 200, 1).unwrap() < 0.02, "{name}");
    }
}

#[test]
fn first_substitution_must_match_the_case() {
    let f = map(&[(2, 0, 1.0)], &[(1, 2, 1.0)]);
    let plan = only_plan(&f);
    assert!(pushforward(&f, &plan, MonomialSubstitution::blowup1(qn(1)).unwrap()).is_err());
    let p3 = only_plan(&case3());
    assert!(pushforward(&case3(), &p3, MonomialSubstitution::cover1(1, 1).unwrap()).is_err());
    assert!(MonomialSubstitution::cover2(2, 4).is_err());
}

#[test]
fn pull_back_inverts_the_substitution_matrix() {
    let p4 = only_plan(&case4());
    let t = pushforward(&case4(), &p4, MonomialSubstitution::cover1(2, 1).unwrap()).unwrap();
    let spec = estimate_r(&case4(), &p4, 0.01).unwrap();
    for x in spec.sample_lift(5, 2) {
        let y = t.pull_back(&x);
        // π(Z, C) = (Z^2, Z C): log z = 2 log Z, log w = log Z + log C
        assert!((y.log_z * 2.0 - x.log_z).norm() < 1e-12);
        assert!((y.log_z + y.log_w - x.log_w).norm() < 1e-12);
    }
}
