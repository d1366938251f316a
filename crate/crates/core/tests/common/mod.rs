//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::Ratio;
use skewfold::classify::{classify_map, WeightPlan};
use skewfold::poly::{Polynomial, SkewProduct};
use skewfold::precision::{ExtComplex, ExtCtx};

pub type Q = Ratio<i128>;

pub fn qn(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn map(p: &[(i64, i64, f64)], q: &[(i64, i64, f64)]) -> SkewProduct {
    SkewProduct::new(Polynomial::from_int_terms(p), Polynomial::from_int_terms(q)).unwrap()
}

pub fn case2() -> SkewProduct {
    map(&[(3, 0, 1.0)], &[(3, 2, 1.0), (5, 0, 1.0)])
}

pub fn case3() -> SkewProduct {
    map(&[(6, 0, 1.0)], &[(3, 2, 1.0), (0, 5, 1.0)])
}

pub fn case4() -> SkewProduct {
    map(&[(5, 0, 1.0)], &[(0, 4, 1.0), (2, 3, 1.0), (3, 1, 1.0)])
}

pub fn worked() -> Vec<(&'static str, SkewProduct)> {
    vec![("case2", case2()), ("case3", case3()), ("case4", case4())]
}

pub fn only_plan(f: &SkewProduct) -> WeightPlan {
    let mut plans = classify_map(f).unwrap();
    assert_eq!(plans.len(), 1);
    plans.remove(0)
}

/// Vertices of the hull of the lower-left quadrants, by extremality: a point
/// is a vertex unless some point or segment between two others dominates it.
pub fn brute_vertices(points: &[(i128, i128)]) -> Vec<(i128, i128)> {
    let mut pts: Vec<_> = points.to_vec();
    pts.sort();
    pts.dedup();
    let dominated_by_segment = |p: (i128, i128), a: (i128, i128), b: (i128, i128)| {
        // t a + (1-t) b >= p componentwise for some t in [0, 1]
        let (mut lo, mut hi) = (qn(0), qn(1));
        for (pa, pb, pp) in [(a.0, b.0, p.0), (a.1, b.1, p.1)] {
            // t (pa - pb) >= pp - pb
            let c = qn(pa - pb);
            let r = qn(pp - pb);
            if c == qn(0) {
                if r > qn(0) {
                    return false;
                }
            } else if c > qn(0) {
                lo = lo.max(r / c);
            } else {
                hi = hi.min(r / c);
            }
        }
        lo <= hi
    };
    pts.iter()
        .copied()
        .filter(|&p| {
            let others: Vec<_> = pts.iter().copied().filter(|&o| o != p).collect();
            !others
                .iter()
                .any(|&a| others.iter().any(|&b| dominated_by_segment(p, a, b)))
        })
        .collect()
}

/// `T_k` and edge weights from consecutive vertices.
pub fn brute_intercepts(v: &[(i128, i128)]) -> (Vec<Q>, Vec<Q>) {
    let mut t = Vec::new();
    let mut w = Vec::new();
    for e in v.windows(2) {
        let ((n1, m1), (n2, m2)) = (e[0], e[1]);
        let slope = qf(m2 - m1, n2 - n1);
        t.push(qn(m1) - slope * qn(n1));
        w.push(qf(n2 - n1, m1 - m2));
    }
    (t, w)
}

/// U as constraints `a·x + b·y > c·ρ` with exact coefficients, written out
/// from the four region shapes (`x = log|z|`, `y = log|w|`).
pub fn u_constraints(plan: &WeightPlan) -> Vec<(Q, Q, Q)> {
    let l1 = plan.l1;
    let one = qn(1);
    let zero = qn(0);
    match plan.case.number() {
        1 => vec![(one, zero, one), (zero, one, one)],
        2 => vec![(one, zero, one), (-l1, one, one)],
        3 => {
            let l2 = plan.l2.finite().unwrap();
            vec![(zero, one, one), (l2, -one, l2)]
        }
        _ => {
            let l2 = plan.l2.finite().unwrap();
            vec![(-l1, one, one), (l1 + l2, -one, l2)]
        }
    }
}

pub fn in_u(plan: &WeightPlan, rho: f64, x: f64, y: f64) -> bool {
    u_constraints(plan)
        .iter()
        .all(|(a, b, c)| to_f(a) * x + to_f(b) * y > to_f(c) * rho)
}

pub fn to_f(q: &Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Whether some iterate of `(x, y) ↦ (δx, γx + dy)` lands in U. With
/// `δ ≠ d` the orbit is followed in `(x, e = y − α₀x)`, where `e ↦ d·e`, so
/// no cancellation builds up along the line `y = α₀x`.
pub fn reaches_u(plan: &WeightPlan, rho: f64, x: f64, y: f64, steps: usize) -> bool {
    let (delta, g, d) = (plan.delta as f64, to_f(&plan.gamma), to_f(&plan.d));
    let cons = u_constraints(plan);
    let Some(a0) = plan.alpha0 else {
        let (mut x, mut y) = (x, y);
        for _ in 0..=steps {
            if in_u(plan, rho, x, y) {
                return true;
            }
            (x, y) = (delta * x, g * x + d * y);
        }
        return false;
    };
    let eig: Vec<(f64, f64, f64)> = cons.iter().map(|(a, b, c)| (to_f(&(a + b * a0)), to_f(b), to_f(c) * rho)).collect();
    let (mut x, mut e) = (x, y - to_f(&a0) * x);
    for _ in 0..=steps {
        if eig.iter().all(|&(a, b, c)| a * x + b * e > c) {
            return true;
        }
        if x.abs().max(e.abs()) > 1e250 {
            return false;
        }
        (x, e) = (delta * x, d * e);
    }
    false
}

fn ext_pow(ctx: &ExtCtx, base: &ExtComplex, e: u32) -> ExtComplex {
    let mut out = ctx.c(Complex64::new(1.0, 0.0));
    for _ in 0..e {
        out = ctx.mul(&out, base);
    }
    out
}

fn ext_eval(ctx: &ExtCtx, p: &Polynomial, z: &ExtComplex, w: &ExtComplex) -> ExtComplex {
    let mut acc = ctx.zero();
    for t in p.terms() {
        let i = t.i.to_integer() as u32;
        let j = t.j.to_integer() as u32;
        let m = ctx.mul(&ext_pow(ctx, z, i), &ext_pow(ctx, w, j));
        acc = ctx.add(&acc, &ctx.mul(&ctx.c(t.coeff), &m));
    }
    acc
}

/// φ in log form by the product formula: the orbit is computed directly in
/// extended precision and each factor `p(z_k)/(a z_k^δ)`, `q/(b z_k^γ w_k^d)`
/// enters through its principal logarithm, weighted by `M^{-(k+1)}`.
pub fn product_formula_phi(f: &SkewProduct, plan: &WeightPlan, z: Complex64, w: Complex64, n: usize) -> (Complex64, Complex64) {
    let ctx = ExtCtx::new(512);
    let delta = plan.delta;
    let g = plan.gamma.to_integer() as u32;
    let d = plan.d.to_integer() as u32;
    let a = f.a_delta();
    let b = f.q().coeff(plan.gamma, plan.d).unwrap();
    let (ea, eb) = (ctx.c(a), ctx.c(b));
    let (mut zk, mut wk) = (ctx.c(z), ctx.c(w));
    let mut phi = (z.ln(), w.ln());
    let (df, gf, dd) = (delta as f64, g as f64, d as f64);
    let mut m11 = 1.0;
    let mut m22 = 1.0;
    let mut m21 = 0.0;
    for _ in 0..n {
        let pz = ext_eval(&ctx, f.p(), &zk, &wk);
        let qz = ext_eval(&ctx, f.q(), &zk, &wk);
        let dom_p = ctx.mul(&ea, &ext_pow(&ctx, &zk, delta));
        let dom_q = ctx.mul(&eb, &ctx.mul(&ext_pow(&ctx, &zk, g), &ext_pow(&ctx, &wk, d)));
        let rp = ctx.to_c64(&ctx.div(&pz, &dom_p));
        let rq = ctx.to_c64(&ctx.div(&qz, &dom_q));
        let (lz, lw) = (rp.ln(), rq.ln());
        // M^{-(k+1)} = M^{-1} M^{-k}, M^{-1} = [[1/δ, 0], [-γ/(δd), 1/d]]
        (m11, m21, m22) = (m11 / df, m21 / dd - gf / (df * dd) * m11, m22 / dd);
        phi.0 += lz * m11;
        phi.1 += lz * m21 + lw * m22;
        zk = pz;
        wk = qz;
    }
    phi
}
