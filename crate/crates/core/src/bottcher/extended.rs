//! Φₙ in the lift at extended precision, for certification runs.

use super::LiftedMap;
use crate::classify::WeightPlan;
use crate::error::{Error, Result};
use crate::exact::to_f64 as q_to_f64;
use crate::poly::{LogPoint, SkewProduct};
use crate::precision::{ExtComplex, ExtCtx, EXT_BITS};
use num_complex::Complex64;

struct Term {
    di: f64,
    dj: f64,
    ratio: ExtComplex,
}

/// `Φ_n(X)` with every intermediate carried at 256 bits.
pub fn phi_n_extended(f: &SkewProduct, plan: &WeightPlan, x: &LogPoint, n: usize) -> Result<LogPoint> {
    let lift = LiftedMap::new(f, plan)?;
    let mut ctx = ExtCtx::new(EXT_BITS);
    let delta = f.delta() as f64;
    let (g, d) = (lift.gamma as f64, lift.d as f64);
    let a = ctx.c(f.a_delta());
    let b = ctx.c(f.q().coeff(plan.gamma, plan.d).expect("dominant monomial"));
    let zeta: Vec<Term> = f
        .p()
        .terms()
        .iter()
        .filter(|t| q_to_f64(&t.i) != delta)
        .map(|t| Term {
            di: q_to_f64(&t.i) - delta,
            dj: 0.0,
            ratio: ctx.div(&ctx.c(t.coeff), &a),
        })
        .collect();
    let eta: Vec<Term> = f
        .q()
        .terms()
        .iter()
        .filter(|t| !(t.i == plan.gamma && t.j == plan.d))
        .map(|t| Term {
            di: q_to_f64(&t.i) - g,
            dj: q_to_f64(&t.j) - d,
            ratio: ctx.div(&ctx.c(t.coeff), &b),
        })
        .collect();
    let log_a = ctx.ln(&a);
    let log_b = ctx.ln(&b);
    let one = ctx.c(Complex64::new(1.0, 0.0));

    let remainder = |ctx: &mut ExtCtx, terms: &[Term], z: &ExtComplex, w: &ExtComplex| {
        let mut acc = ctx.zero();
        for t in terms {
            let e = ctx.add(&ctx.scale(z, &ctx.real(t.di)), &ctx.scale(w, &ctx.real(t.dj)));
            let e = ctx.exp(&e);
            acc = ctx.add(&acc, &ctx.mul(&t.ratio, &e));
        }
        acc
    };

    let mut z = ctx.c(x.log_z);
    let mut w = ctx.c(x.log_w);
    let mut acc_z = z.clone();
    let mut acc_w = w.clone();
    // c_m = γ_m/(δd)^m
    let mut c = ctx.real(0.0);
    let mut dz = ctx.real(1.0);
    let mut dw = ctx.real(1.0);
    let p = EXT_BITS;
    let rm = astro_float::RoundingMode::ToEven;
    for _ in 0..n {
        let zr = remainder(&mut ctx, &zeta, &z, &w);
        let er = remainder(&mut ctx, &eta, &z, &w);
        if ctx.to_c64(&zr).norm() >= 1.0 || ctx.to_c64(&er).norm() >= 1.0 {
            return Err(Error::EscapedValidity);
        }
        let lz = ctx.ln(&ctx.add(&one, &zr));
        let le = ctx.ln(&ctx.add(&one, &er));
        dz = dz.div(&ctx.real(delta), p, rm);
        c = c.div(&ctx.real(d), p, rm).add(&ctx.real(g).mul(&dz, p, rm).div(&ctx.real(d), p, rm), p, rm);
        dw = dw.div(&ctx.real(d), p, rm);
        acc_z = ctx.add(&acc_z, &ctx.scale(&lz, &dz));
        acc_w = ctx.add(&acc_w, &ctx.sub(&ctx.scale(&le, &dw), &ctx.scale(&lz, &c)));
        let nz = ctx.add(&ctx.add(&ctx.scale(&z, &ctx.real(delta)), &log_a), &lz);
        let nw = ctx.add(
            &ctx.add(&ctx.add(&ctx.scale(&z, &ctx.real(g)), &ctx.scale(&w, &ctx.real(d))), &log_b),
            &le,
        );
        z = nz;
        w = nw;
    }
    Ok(LogPoint::new(ctx.to_c64(&acc_z), ctx.to_c64(&acc_w)))
}
