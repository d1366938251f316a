//! One line per acceptance criterion. Tolerances are pinned here.

mod common;

use common::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skewfold::bottcher::{chi_functional_residual, derived_coordinates, injectivity_region, relative_log_residual, PhiContext};
use skewfold::classify::{Case, WeightPlan};
use skewfold::infinity::{afo_region, classify_infinity, classify_weighted, preimage_region, t_map, Basin};
use skewfold::newton::newton_polygon;
use skewfold::poly::{LogPoint, Monomial, Polynomial};
use skewfold::region::{estimate_r, verify_bounds, verify_contraction, verify_invariance};
use skewfold::transforms::{intermediate_case_check, pushforward, verify_normal_form, MonomialSubstitution};
use std::process::Command;
use std::time::{Duration, Instant};

const EPS: f64 = 0.01;
const CONJ_TOL: f64 = 1e-8;
const TELESCOPE_TOL: f64 = 1e-13;
const ORACLE_TOL: f64 = 1e-10;
const CHI_TOL: f64 = 1e-8;
const AFO_BAND: f64 = 1e-9;
const INJ_SEP: f64 = 1e-12;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Duration, limit: f64, what: &str) -> Result<(), String> {
    ensure(t.as_secs_f64() < limit, format!("{what} took {:.2}s, limit {limit}s", t.as_secs_f64()))
}

fn c1_classification() -> Outcome {
    let start = Instant::now();
    let p2 = only_plan(&case2());
    ensure(p2.case == Case::Two && (p2.gamma, p2.d) == (qn(3), qn(2)), "case 2 dominant")?;
    ensure(p2.l1 == qn(1) && p2.alpha0 == Some(qn(3)), "case 2 weights")?;
    ensure(p2.interval.to_json()["interval"] == "[1, 3]", format!("case 2 interval {}", p2.interval.to_json()))?;
    let p3 = only_plan(&case3());
    ensure(p3.case == Case::Three && p3.l2.finite() == Some(qn(1)), "case 3 l2")?;
    ensure(p3.alpha0 == Some(qf(3, 4)), "case 3 alpha0")?;
    ensure(p3.interval.to_json()["interval"] == "[3/4, 1]", format!("case 3 interval {}", p3.interval.to_json()))?;
    let p4 = only_plan(&case4());
    ensure(p4.case == Case::Four && p4.k == 2, "case 4 k")?;
    ensure(p4.l1 == qf(1, 2) && p4.l2.finite() == Some(qf(3, 2)), "case 4 weights")?;
    ensure(p4.tilde_gamma == Some(qn(1)) && p4.tilde_d == Some(qf(11, 3)), "case 4 tilde values")?;
    within(start.elapsed(), 1.0, "classification")?;
    Ok(format!("3 instances exact in {:.3}s", start.elapsed().as_secs_f64()))
}

fn c2_newton_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..1000 {
        let n = rng.gen_range(1..9);
        let pts: Vec<(i128, i128)> = (0..n).map(|_| (rng.gen_range(0..12), rng.gen_range(0..12))).collect();
        let poly = Polynomial::new(pts.iter().map(|&(i, j)| Monomial::new(qn(i), qn(j), Complex64::new(1.0, 0.0))));
        let got = newton_polygon(&poly).map_err(|e| e.to_string())?;
        let want = brute_vertices(&pts);
        let wantq: Vec<_> = want.iter().map(|&(i, j)| (qn(i), qn(j))).collect();
        ensure(got.vertices == wantq, format!("trial {trial}: {pts:?} gave {:?}, oracle {want:?}", got.vertices))?;
        let (t, w) = brute_intercepts(&want);
        ensure(got.intercepts == t && got.edge_weights == w, format!("trial {trial}: intercepts differ"))?;
    }
    within(start.elapsed(), 10.0, "1000 polygons")?;
    Ok(format!("1000/1000 agree in {:.2}s", start.elapsed().as_secs_f64()))
}

fn c3_certificates() -> Outcome {
    let mut notes = Vec::new();
    for (name, f) in worked() {
        let start = Instant::now();
        let plan = only_plan(&f);
        let spec = estimate_r(&f, &plan, EPS).map_err(|e| e.to_string())?;
        let b = verify_bounds(&f, &plan, &spec, EPS, 10_000, 3).map_err(|e| e.to_string())?;
        let inv = verify_invariance(&f, &plan, &spec, 10_000, 3).map_err(|e| e.to_string())?;
        ensure(b.max_zeta < EPS && b.max_eta < EPS, format!("{name}: max |zeta| {} |eta| {}", b.max_zeta, b.max_eta))?;
        ensure(inv.violation_count == 0, format!("{name}: {} invariance violations", inv.violation_count))?;
        within(start.elapsed(), 5.0, name)?;
        notes.push(format!("{name} R={:.3} max={:.2e}", spec.r, b.max_zeta.max(b.max_eta)));
    }
    Ok(notes.join(", "))
}

fn c4_conjugacy() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_tel: f64 = 0.0;
    for (name, f) in worked() {
        let plan = only_plan(&f);
        let spec = estimate_r(&f, &plan, EPS).map_err(|e| e.to_string())?;
        let ctx = PhiContext::new(&f, &plan, &spec).map_err(|e| e.to_string())?;
        for x in spec.sample_lift(100, 4) {
            let e = ctx.eval(&x, 1e-12, 400).map_err(|e| e.to_string())?;
            let r = e.residual.unwrap_or(f64::INFINITY);
            ensure(r < CONJ_TOL, format!("{name}: residual {r:e}"))?;
            worst = worst.max(r);
        }
        for x in spec.sample_lift(10, 5) {
            for n in 0..=10 {
                let lhs = ctx.lift.phi_n(&x, n + 1).map_err(|e| e.to_string())?;
                let fx = ctx.lift.forward(&x).map_err(|e| e.to_string())?;
                let rhs = ctx.lift.model_inverse(&ctx.lift.phi_n(&fx, n).map_err(|e| e.to_string())?);
                let scale = lhs.log_z.norm().max(lhs.log_w.norm());
                let rel = (lhs.log_z - rhs.log_z).norm().max((lhs.log_w - rhs.log_w).norm()) / scale;
                ensure(rel < TELESCOPE_TOL, format!("{name}: telescoping {rel:e} at n = {n}"))?;
                worst_tel = worst_tel.max(rel);
            }
        }
        let (s1, s2) = identity_sups(&f, &plan, spec.r)?;
        ensure(s1.windows(2).all(|w| w[0] >= w[1]), format!("{name}: sup|phi1/z-1| {s1:?} increases"))?;
        ensure(s2[0] > s2[1] && s2[1] > s2[2], format!("{name}: sup|phi2/w-1| {s2:?} not decreasing"))?;
        // p is monomial above, so phi1 = z; perturb p to exercise the first coordinate
        let delta = plan.delta as i64;
        let g: Vec<(i64, i64, f64)> = f.q().terms().iter().map(|t| (t.i.to_integer() as i64, t.j.to_integer() as i64, t.coeff.re)).collect();
        let fp = map(&[(delta, 0, 1.0), (delta - 1, 0, 1.0)], &g);
        let pp = only_plan(&fp);
        let sp = estimate_r(&fp, &pp, EPS).map_err(|e| e.to_string())?;
        let (s1, _) = identity_sups(&fp, &pp, sp.r)?;
        ensure(s1[0] > s1[1] && s1[1] > s1[2], format!("{name} with p + z^(delta-1): sup|phi1/z-1| {s1:?} not decreasing"))?;
    }
    Ok(format!("max residual {worst:.2e}, telescoping {worst_tel:.2e}"))
}

/// `sup|φ₁/z − 1|` and `sup|φ₂/w − 1|` over samples of U at R, 2R, 4R.
fn identity_sups(f: &skewfold::poly::SkewProduct, plan: &WeightPlan, r: f64) -> Result<(Vec<f64>, Vec<f64>), String> {
    let (mut s1, mut s2) = (Vec::new(), Vec::new());
    for k in 0..3 {
        let s = skewfold::region::RegionSpec::for_plan(plan, r * f64::powi(2.0, k));
        let c = PhiContext::new(f, plan, &s).map_err(|e| e.to_string())?;
        let (mut a, mut b): (f64, f64) = (0.0, 0.0);
        for x in s.sample_lift(200, 6) {
            let (p, ..) = c.phi_log(&x, 1e-13, 400).map_err(|e| e.to_string())?;
            a = a.max(((p.log_z - x.log_z).exp() - 1.0).norm());
            b = b.max(((p.log_w - x.log_w).exp() - 1.0).norm());
        }
        s1.push(a);
        s2.push(b);
    }
    Ok((s1, s2))
}

fn c5_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for (name, f) in worked() {
        let plan = only_plan(&f);
        let spec = estimate_r(&f, &plan, EPS).map_err(|e| e.to_string())?;
        let ctx = PhiContext::new(&f, &plan, &spec).map_err(|e| e.to_string())?;
        let n = if plan.delta <= 3 { 12 } else { 8 };
        for (z, w) in spec.sample(20, 7) {
            let x = LogPoint::from_point(z, w).map_err(|e| e.to_string())?;
            let (lib, ..) = ctx.phi_log(&x, 1e-14, 400).map_err(|e| e.to_string())?;
            let (oz, ow) = product_formula_phi(&f, &plan, z, w, n);
            let rel = relative_log_residual(&lib, &LogPoint::new(oz, ow));
            ensure(rel < ORACLE_TOL, format!("{name}: lift vs product formula {rel:e}"))?;
            worst = worst.max(rel);
        }
    }
    Ok(format!("60 points, max relative deviation {worst:.2e}"))
}

fn c6_d_one() -> Outcome {
    let f = map(&[(6, 0, 1.0)], &[(3, 1, 1.0), (0, 2, 1.0)]);
    let plan = only_plan(&f);
    ensure(plan.d == qn(1) && plan.degree_ok, "d = 1 instance should pass the degree gate")?;
    let spec = estimate_r(&f, &plan, EPS).map_err(|e| e.to_string())?;
    let c = verify_contraction(&f, &plan, &spec, 8, 1000, 8).map_err(|e| e.to_string())?;
    ensure(c.pass(), format!("{} contraction violations", c.violation_count))?;
    let ctx = PhiContext::new(&f, &plan, &spec).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for x in spec.sample_lift(50, 9) {
        let e = ctx.eval(&x, 1e-12, 400).map_err(|e| e.to_string())?;
        ensure(e.converged, "phi did not converge under the tail bound")?;
        worst = worst.max(e.residual.unwrap_or(f64::INFINITY));
    }
    ensure(worst < CONJ_TOL, format!("d = 1 residual {worst:e}"))?;
    let bin = env!("CARGO_BIN_EXE_skewfold");
    for extra in [vec![], vec!["--plan-index", "1"]] {
        let out = Command::new(bin)
            .arg("bottcher")
            .arg(data("boundary.map"))
            .args(&extra)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(2), format!("boundary instance exit {:?}", out.status.code()))?;
    }
    let out = Command::new(bin).args(["bottcher", &data("boundary.map"), "--plan-index", "1"]).output().unwrap();
    let msg = String::from_utf8_lossy(&out.stderr);
    ensure(msg.contains("δ ≠ T_k for any k"), format!("message does not cite the hypothesis: {msg}"))?;
    Ok(format!("contraction ok for n <= 8, residual {worst:.2e}, boundary refused with exit 2"))
}

fn c7_transforms() -> Outcome {
    let p2 = only_plan(&case2());
    let t2 = pushforward(&case2(), &p2, MonomialSubstitution::blowup1(qn(1)).unwrap()).map_err(|e| e.to_string())?;
    ensure(verify_normal_form(&t2) && t2.polygon.vertices == vec![(qn(2), qn(2))], "case 2 normal form (gamma~, d)")?;
    let p3 = only_plan(&case3());
    let t3 = pushforward(&case3(), &p3, MonomialSubstitution::blowup2(qn(1)).unwrap()).map_err(|e| e.to_string())?;
    ensure(verify_normal_form(&t3) && t3.polygon.vertices == vec![(qn(3), qn(5))], "case 3 normal form (gamma, d~)")?;
    let p4 = only_plan(&case4());
    let s1 = pushforward(&case4(), &p4, MonomialSubstitution::blowup1(qf(1, 2)).unwrap()).map_err(|e| e.to_string())?;
    ensure(!s1.well_defined && s1.reason.as_deref() == Some("l1 ∉ ℕ"), "l1 gate on case 4")?;
    let t4 = s1.then(MonomialSubstitution::blowup2(qf(3, 2)).unwrap()).map_err(|e| e.to_string())?;
    ensure(verify_normal_form(&t4) && t4.polygon.vertices == vec![(qn(1), qf(11, 3))], "case 4 normal form (gamma~, d~)")?;
    ensure(t4.reason.is_some(), "1/l2 gate on case 4")?;
    let c1 = pushforward(&case4(), &p4, MonomialSubstitution::cover1(2, 1).unwrap()).map_err(|e| e.to_string())?;
    let rep = intermediate_case_check(&c1).map_err(|e| e.to_string())?;
    ensure(rep.detected_case == Case::Three && rep.pass(), "case 4 stage one is not case 3")?;
    // gamma~/s2 gate on the second cover, with s/r = alpha0 of the stage-one map passing
    ensure(!c1.then(MonomialSubstitution::cover2(1, 3).unwrap()).unwrap().well_defined, "gamma~/s2 gate")?;
    let a = c1.plan().alpha0.unwrap();
    let c2 = c1
        .then(MonomialSubstitution::cover_for(skewfold::transforms::SubstitutionKind::Cover2, a).unwrap())
        .map_err(|e| e.to_string())?;
    ensure(c2.well_defined && verify_normal_form(&c2), "s/r = alpha0 shortcut")?;
    // gamma/s gate for a case 3 cover, and the alpha0 shortcut there
    ensure(!pushforward(&case3(), &p3, MonomialSubstitution::cover2(1, 2).unwrap()).unwrap().well_defined, "gamma/s gate")?;
    let sc = pushforward(&case3(), &p3, MonomialSubstitution::cover2(4, 3).unwrap()).unwrap();
    ensure(sc.well_defined && verify_normal_form(&sc), "case 3 alpha0 cover")?;
    ensure(pushforward(&case2(), &p2, MonomialSubstitution::blowup1(qn(1)).unwrap()).unwrap().well_defined, "l1 in N passes")?;
    Ok("normal forms (2,2), (3,5), (1,11/3); stage one is case 3; gates enforced".into())
}

fn c8_tables() -> Outcome {
    let r2 = classify_infinity(&case2(), &only_plan(&case2()));
    ensure(r2.basin == Basin::APlus, "case 2 should be A_plus")?;
    let r3 = classify_infinity(&case3(), &only_plan(&case3()));
    ensure(r3.basin == Basin::AMinus, "case 3 should be A_minus")?;
    let p4 = only_plan(&case4());
    let r4 = classify_infinity(&case4(), &p4);
    ensure(r4.basin == Basin::ClosureUnion && r4.h == vec![(p4.gamma, p4.d)], "case 4 closure with h = z^gamma w^d")?;
    let w2 = classify_weighted(&case2(), &only_plan(&case2()), 1, 3).map_err(|e| e.to_string())?;
    let w3 = classify_weighted(&case3(), &only_plan(&case3()), 4, 3).map_err(|e| e.to_string())?;
    ensure(w2.basin == Basin::ClosureUnion && w3.basin == Basin::ClosureUnion, "weighted l = alpha0 rows")?;
    for (name, f) in worked() {
        let plan = only_plan(&f);
        let a = classify_infinity(&f, &plan);
        let b = classify_weighted(&f, &plan, 1, 1).map_err(|e| e.to_string())?;
        ensure(a == b, format!("{name}: (1,1) specialization differs"))?;
    }
    ensure(classify_weighted(&case3(), &only_plan(&case3()), 2, 2).is_err(), "gcd gate")?;
    Ok("A+, A-, closure; weighted closure rows; (1,1) matches".into())
}

fn afo_agreement(plan: &WeightPlan, rho: f64, n: usize, seed: u64) -> Result<usize, String> {
    let afo = afo_region(plan);
    ensure(afo.shape.is_some(), format!("{} not covered", afo.entry))?;
    let pre: Vec<_> = (0..=8u32).map(|m| preimage_region(plan, rho.exp(), m).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for _ in 0..n {
        let x = rng.gen_range(-3.0..(3.0 * rho + 6.0));
        let y = rng.gen_range(-(4.0 * rho + 20.0)..(4.0 * rho + 20.0));
        // each preimage against direct iteration
        for (m, pr) in pre.iter().enumerate() {
            let (mut a, mut b) = (x, y);
            for _ in 0..m {
                (a, b) = (plan.delta as f64 * a, to_f(&plan.gamma) * a + to_f(&plan.d) * b);
            }
            let direct = in_u(plan, rho, a, b);
            let near = (pr.member_log(x + 1e-9, y) != pr.member_log(x - 1e-9, y))
                || (pr.member_log(x, y + 1e-9) != pr.member_log(x, y - 1e-9));
            ensure(near || pr.member_log(x, y) == direct, format!("preimage {m} at ({x}, {y})"))?;
        }
        let closed = afo.member_log(x, y).unwrap();
        let union = pre.iter().any(|p| p.member_log(x, y));
        ensure(!union || closed, format!("union escapes the closed form at ({x}, {y})"))?;
        if afo.boundary_distance(x, y) > AFO_BAND {
            ensure(reaches_u(plan, rho, x, y, 200) == closed, format!("closed form vs iteration at ({x}, {y})"))?;
            checked += 1;
        }
    }
    Ok(checked)
}

fn c9_afo() -> Outcome {
    let mut total = 0;
    for (name, f) in worked() {
        let plan = only_plan(&f);
        let spec = estimate_r(&f, &plan, EPS).map_err(|e| e.to_string())?;
        total += afo_agreement(&plan, spec.r.ln(), 10_000, 10).map_err(|e| format!("{name}: {e}"))?;
        let a = plan.alpha0.unwrap();
        ensure(t_map(&plan, a) == a, format!("{name}: T(alpha0) != alpha0"))?;
    }
    Ok(format!("{total} points outside the band agree; T(alpha0) = alpha0"))
}

fn c10_chi() -> Outcome {
    let mut worst: f64 = 0.0;
    let b_nonmonomial = map(&[(3, 0, 1.0)], &[(3, 2, 1.0), (2, 2, 1.0), (5, 0, 1.0)]);
    let mut instances = worked();
    instances.push(("case2-b(z)", b_nonmonomial));
    for (name, f) in instances {
        let plan = only_plan(&f);
        let spec = estimate_r(&f, &plan, EPS).map_err(|e| e.to_string())?;
        let ctx = PhiContext::new(&f, &plan, &spec).map_err(|e| e.to_string())?;
        for (z, w) in spec.sample(20, 11) {
            let r = chi_functional_residual(&f, &plan, z, 1e-14).map_err(|e| e.to_string())?;
            ensure(r < CHI_TOL, format!("{name}: chi residual {r:e}"))?;
            worst = worst.max(r);
            let x = LogPoint::from_point(z, w).map_err(|e| e.to_string())?;
            let dc = derived_coordinates(&ctx, &f, &plan, &x, 1e-13).map_err(|e| e.to_string())?;
            let r2 = dc.phi_tilde2_residual.ok_or(format!("{name}: no (p, b w^d) residual"))?;
            ensure(r2 < CHI_TOL, format!("{name}: (p, b w^d) residual {r2:e}"))?;
            worst = worst.max(r2);
            let want_alpha = plan.alpha0.is_some_and(|a| a.is_integer()) && plan.d != plan.delta_q();
            if want_alpha {
                let r3 = dc.phi_alpha0_residual.ok_or(format!("{name}: no (z^delta, w^d) residual"))?;
                ensure(r3 < CHI_TOL, format!("{name}: (z^delta, w^d) residual {r3:e}"))?;
                worst = worst.max(r3);
            }
        }
    }
    Ok(format!("max residual {worst:.2e}"))
}

fn c11_injectivity() -> Outcome {
    let mut min_sep = f64::INFINITY;
    for (name, f) in worked() {
        let plan = only_plan(&f);
        let spec = estimate_r(&f, &plan, EPS).map_err(|e| e.to_string())?;
        let inj = injectivity_region(&plan, &spec, EPS);
        let ctx = PhiContext::new(&f, &plan, &inj).map_err(|e| e.to_string())?;
        let pts = inj.sample_lift(2000, 12);
        for pair in pts.chunks(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if relative_log_residual(a, b) == 0.0 {
                continue;
            }
            let (pa, ..) = ctx.phi_log(a, 1e-13, 400).map_err(|e| e.to_string())?;
            let (pb, ..) = ctx.phi_log(b, 1e-13, 400).map_err(|e| e.to_string())?;
            let sep = relative_log_residual(&pa, &pb);
            ensure(sep > INJ_SEP, format!("{name}: images {sep:e} apart"))?;
            min_sep = min_sep.min(sep);
        }
    }
    Ok(format!("3000 pairs, min relative separation {min_sep:.2e}"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("classification exactness", c1_classification),
        ("newton polygon oracle", c2_newton_oracle),
        ("remainder certificates", c3_certificates),
        ("conjugacy", c4_conjugacy),
        ("product-formula oracle", c5_oracle),
        ("d = 1 regime", c6_d_one),
        ("transform normal forms", c7_transforms),
        ("tables at infinity", c8_tables),
        ("A_f0 closed forms", c9_afo),
        ("chi and derived coordinates", c10_chi),
        ("injectivity", c11_injectivity),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = check();
        let t = start.elapsed().as_secs_f64();
        match &res {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{t:.2}s]", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why} [{t:.2}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
