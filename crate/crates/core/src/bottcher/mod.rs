//! Boettcher coordinate φ = lim f₀⁻ⁿ∘fⁿ on U, computed in the logarithmic
//! lift, with certified tail bounds, the inverse ψ, and the injectivity region.

mod chi;
mod extended;

pub use chi::{chi, chi_functional_residual, derived_coordinates, DerivedCoordinates};
pub use extended::phi_n_extended;

use crate::classify::{Case, WeightPlan};
use crate::error::{Error, Result};
use crate::exact::{qi, to_f64};
use crate::poly::{LogPoint, Remainders, SkewProduct};
use crate::region::{remainder_bounds, term_gaps, RegionSpec, TermGap};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

/// `γ_n = Σ_{j=1..n} δ^{n-j} d^{j-1} γ`, exactly.
pub fn gamma_n(delta: u64, d: u64, gamma: u64, n: u32) -> BigInt {
    let mut g = BigInt::from(0);
    let mut dpow = BigInt::from(1);
    for _ in 0..n {
        // γ_{m+1} = δ γ_m + d^m γ
        g = g * BigInt::from(delta) + &dpow * BigInt::from(gamma);
        dpow *= BigInt::from(d);
    }
    g
}

/// `γ_m / (δ d)^m` for m = 0..=n, accumulated without forming huge integers.
fn gamma_ratios(delta: f64, d: f64, gamma: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut c = 0.0;
    let mut dinv = 1.0; // δ^{-m}
    out.push(0.0);
    for _ in 0..n {
        dinv /= delta;
        c = c / d + gamma * dinv / d;
        out.push(c);
    }
    out
}

/// `log(1 + x)` accurate for small `x`.
pub(crate) fn log1p_c(x: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * x.re + x.norm_sqr()).ln_1p();
    let im = x.im.atan2(1.0 + x.re);
    Complex64::new(re, im)
}

/// `F(Z,W) = (δZ + log a + log(1+ζ), γZ + dW + log b + log(1+η))`.
#[derive(Clone, Debug)]
pub struct LiftedMap {
    pub delta: u32,
    pub d: u32,
    pub gamma: u32,
    pub log_a: Complex64,
    pub log_b: Complex64,
    pub rem: Remainders,
}

/// One lift step together with the two logarithmic corrections.
#[derive(Clone, Copy, Debug)]
pub struct Step {
    pub image: LogPoint,
    pub l_zeta: Complex64,
    pub l_eta: Complex64,
}

impl LiftedMap {
    pub fn new(f: &SkewProduct, plan: &WeightPlan) -> Result<Self> {
        let g = plan.gamma.to_integer();
        let d = plan.d.to_integer();
        if !plan.gamma.is_integer() || !plan.d.is_integer() || g < 0 || d < 1 {
            return Err(Error::Hypothesis(format!(
                "lift needs integer gamma >= 0 and d >= 1, got ({}, {})",
                plan.gamma, plan.d
            )));
        }
        let rem = Remainders::new(f, plan.gamma, plan.d)?;
        Ok(LiftedMap {
            delta: f.delta(),
            d: d as u32,
            gamma: g as u32,
            log_a: rem.log_a,
            log_b: rem.log_b,
            rem,
        })
    }

    pub fn step(&self, x: &LogPoint) -> Result<Step> {
        let (zeta, eta) = self.rem.eval(x)?;
        if !(zeta.norm() < 1.0 && eta.norm() < 1.0) {
            return Err(Error::EscapedValidity);
        }
        let l_zeta = log1p_c(zeta);
        let l_eta = log1p_c(eta);
        let m = self.model(x);
        Ok(Step {
            image: LogPoint::new(m.log_z + l_zeta, m.log_w + l_eta),
            l_zeta,
            l_eta,
        })
    }

    pub fn forward(&self, x: &LogPoint) -> Result<LogPoint> {
        Ok(self.step(x)?.image)
    }

    /// `F₀(Z,W) = (δZ + log a, γZ + dW + log b)`.
    pub fn model(&self, x: &LogPoint) -> LogPoint {
        LogPoint::new(
            x.log_z * self.delta as f64 + self.log_a,
            x.log_z * self.gamma as f64 + x.log_w * self.d as f64 + self.log_b,
        )
    }

    pub fn model_inverse(&self, x: &LogPoint) -> LogPoint {
        let z = (x.log_z - self.log_a) / self.delta as f64;
        let w = (x.log_w - self.log_b - z * self.gamma as f64) / self.d as f64;
        LogPoint::new(z, w)
    }

    /// `Φ_n(X)` via the telescoping sum `Φ_{m+1} = Φ_m + M^{-(m+1)} L(F^m X)`.
    pub fn phi_n(&self, x: &LogPoint, n: usize) -> Result<LogPoint> {
        let c = gamma_ratios(self.delta as f64, self.d as f64, self.gamma as f64, n);
        let mut acc = *x;
        let mut orbit = *x;
        let (mut dz, mut dw) = (1.0, 1.0);
        for m in 1..=n {
            let s = self.step(&orbit)?;
            dz /= self.delta as f64;
            dw /= self.d as f64;
            acc.log_z += s.l_zeta * dz;
            acc.log_w += s.l_eta * dw - s.l_zeta * c[m];
            orbit = s.image;
        }
        Ok(acc)
    }
}

/// Value of φ (or φ_n) at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct BottcherEval {
    pub z: Complex64,
    pub w: Complex64,
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub log_phi: LogPoint,
    pub n_used: usize,
    pub tail_bound: Option<f64>,
    pub residual: Option<f64>,
    pub converged: bool,
}

impl BottcherEval {
    pub fn to_json(&self) -> Value {
        json!({
            "z": [self.z.re, self.z.im], "w": [self.w.re, self.w.im],
            "phi1": [self.phi1.re, self.phi1.im], "phi2": [self.phi2.re, self.phi2.im],
            "n_used": self.n_used, "tail_bound": self.tail_bound,
            "residual": self.residual, "converged": self.converged,
        })
    }
}

/// Certified tail bounds `|Φ − Φ_n|` for points of a fixed region.
#[derive(Clone, Debug)]
pub struct TailModel {
    delta: f64,
    d: f64,
    gamma: f64,
    m: f64,
    gaps: (Vec<TermGap>, Vec<TermGap>),
    spec: RegionSpec,
}

impl TailModel {
    pub fn new(f: &SkewProduct, plan: &WeightPlan, spec: &RegionSpec) -> Result<Self> {
        Ok(TailModel {
            delta: f.delta() as f64,
            d: to_f64(&plan.d),
            gamma: to_f64(&plan.gamma),
            m: to_f64(&plan.m),
            gaps: term_gaps(f, plan, spec)?,
            spec: spec.clone(),
        })
    }

    /// Radius certified at a lift point (at least the region's own R).
    pub fn radius_at(&self, x: &LogPoint) -> f64 {
        self.spec.radius_at(x.log_z.re, x.log_w.re).max(self.spec.r)
    }

    /// `Σ_{m>n}` of the increment bounds for the orbit of a point in `U_r`.
    pub fn tail(&self, n: usize, r: f64) -> f64 {
        let (ez, ee) = remainder_bounds(&self.gaps, r);
        let eps = ez.max(ee);
        if eps == 0.0 {
            return 0.0;
        }
        if eps >= 1.0 {
            return f64::INFINITY;
        }
        if self.d >= 2.0 {
            let et = -(1.0 - eps).ln();
            let c = gamma_ratios(self.delta, self.d, self.gamma, n + 400);
            let (mut s1, mut s2) = (0.0, 0.0);
            for m in (n + 1)..=(n + 400) {
                s1 += self.delta.powi(-(m as i32));
                s2 += self.d.powi(-(m as i32)) + c[m];
            }
            s1.max(s2) * et
        } else {
            let (c1, c2) = self.decay_constants(r);
            let k = (c2 + self.gamma * c1 / (self.delta - 1.0)) / (1.0 - eps);
            // Σ_{m>=n} K (2^m r)^{-M}
            let q = 2f64.powf(-self.m);
            k * r.powf(-self.m) * q.powi(n as i32) / (1.0 - q)
        }
    }

    /// `(C₁, C₂)` with `|ζ| <= C₁ e^{-M u}` and `|η| <= C₂ (e^{-M u} + e^{-M v})`-type bounds on U_r.
    pub fn decay_constants(&self, r: f64) -> (f64, f64) {
        let rho = r.ln();
        let m = self.m;
        let split = |terms: &Vec<TermGap>| -> f64 {
            terms
                .iter()
                .map(|t| {
                    let (g1, g2) = (to_f64(&t.g1), to_f64(&t.g2));
                    if g1 >= m {
                        t.coeff * (-(g1 - m + g2) * rho).exp()
                    } else {
                        t.coeff * (-(g1 + g2 - m) * rho).exp()
                    }
                })
                .sum()
        };
        (split(&self.gaps.0), split(&self.gaps.1))
    }
}

fn check_plan(plan: &WeightPlan) -> Result<()> {
    if !plan.degree_ok {
        return Err(Error::Hypothesis(
            plan.degree_reason.clone().unwrap_or_else(|| "degree condition fails".into()),
        ));
    }
    Ok(())
}

fn eval_from(x: &LogPoint, phi: LogPoint, n: usize, tail: Option<f64>, residual: Option<f64>, converged: bool) -> BottcherEval {
    let (z, w) = x.to_point();
    let (phi1, phi2) = phi.to_point();
    BottcherEval {
        z,
        w,
        phi1,
        phi2,
        log_phi: phi,
        n_used: n,
        tail_bound: tail,
        residual,
        converged,
    }
}

/// `φ_n` at a point of U, without a tail bound.
pub fn phi_n(f: &SkewProduct, plan: &WeightPlan, spec: &RegionSpec, x: &LogPoint, n: usize) -> Result<BottcherEval> {
    check_plan(plan)?;
    if !spec.member_lift(x) {
        return Err(Error::InvalidInput("point is outside U".into()));
    }
    let lift = LiftedMap::new(f, plan)?;
    let phi = lift.phi_n(x, n)?;
    Ok(eval_from(x, phi, n, None, None, true))
}

/// Iterates until the certified tail bound drops below `tol`.
pub fn phi_lift(
    lift: &LiftedMap,
    tails: &TailModel,
    x: &LogPoint,
    tol: f64,
    max_iter: usize,
) -> Result<(LogPoint, usize, f64, bool)> {
    let r = tails.radius_at(x);
    let mut n = 0;
    let mut t = tails.tail(0, r);
    while t >= tol && n < max_iter {
        n += 1;
        t = tails.tail(n, r);
    }
    let phi = lift.phi_n(x, n)?;
    Ok((phi, n, t, t < tol))
}

/// Largest relative deviation `|exp(a_k − b_k) − 1|` over both coordinates.
pub fn relative_log_residual(a: &LogPoint, b: &LogPoint) -> f64 {
    let e1 = (a.log_z - b.log_z).exp() - 1.0;
    let e2 = (a.log_w - b.log_w).exp() - 1.0;
    e1.norm().max(e2.norm())
}

/// Converged φ at a point of U, with the conjugacy residual `φ∘f` vs `f₀∘φ`.
pub fn phi(
    f: &SkewProduct,
    plan: &WeightPlan,
    spec: &RegionSpec,
    x: &LogPoint,
    tol: f64,
    max_iter: usize,
) -> Result<BottcherEval> {
    let ctx = PhiContext::new(f, plan, spec)?;
    ctx.eval(x, tol, max_iter)
}

/// Shared setup for many evaluations on one region.
#[derive(Clone, Debug)]
pub struct PhiContext {
    pub lift: LiftedMap,
    pub tails: TailModel,
    pub spec: RegionSpec,
}

impl PhiContext {
    pub fn new(f: &SkewProduct, plan: &WeightPlan, spec: &RegionSpec) -> Result<Self> {
        check_plan(plan)?;
        Ok(PhiContext {
            lift: LiftedMap::new(f, plan)?,
            tails: TailModel::new(f, plan, spec)?,
            spec: spec.clone(),
        })
    }

    pub fn phi_log(&self, x: &LogPoint, tol: f64, max_iter: usize) -> Result<(LogPoint, usize, f64, bool)> {
        phi_lift(&self.lift, &self.tails, x, tol, max_iter)
    }

    pub fn eval(&self, x: &LogPoint, tol: f64, max_iter: usize) -> Result<BottcherEval> {
        if !self.spec.member_lift(x) {
            return Err(Error::InvalidInput("point is outside U".into()));
        }
        let (p, n, t, ok) = self.phi_log(x, tol, max_iter)?;
        let fx = self.lift.forward(x)?;
        let (pf, _, _, ok2) = self.phi_log(&fx, tol, max_iter)?;
        let residual = relative_log_residual(&pf, &self.lift.model(&p));
        Ok(eval_from(x, p, n, Some(t), Some(residual), ok && ok2))
    }
}

/// Solves `φ(x) = y` by damped Newton iteration in the lift.
pub fn psi(
    f: &SkewProduct,
    plan: &WeightPlan,
    spec: &RegionSpec,
    y: &LogPoint,
    tol: f64,
) -> Result<LogPoint> {
    let ctx = PhiContext::new(f, plan, spec)?;
    psi_with(&ctx, y, tol)
}

pub fn psi_with(ctx: &PhiContext, y: &LogPoint, tol: f64) -> Result<LogPoint> {
    let inner = (tol * 1e-3).max(1e-15);
    let eval = |x: &LogPoint| -> Option<LogPoint> {
        if !ctx.spec.member_lift(x) {
            return None;
        }
        ctx.phi_log(x, inner, 400).ok().map(|r| r.0)
    };
    let diverged = |x: &LogPoint| {
        let (z, w) = x.to_point();
        Error::NewtonDivergence { z, w }
    };
    let resid = |p: &LogPoint| [p.log_z - y.log_z, p.log_w - y.log_w];
    let size = |r: &[Complex64; 2]| r[0].norm().max(r[1].norm());

    let mut x = *y;
    let mut px = eval(&x).ok_or_else(|| diverged(&x))?;
    for _ in 0..60 {
        let r = resid(&px);
        if relative_log_residual(&px, y) < tol {
            return Ok(x);
        }
        let h = 1e-7 * x.log_z.norm().max(x.log_w.norm()).max(1.0);
        let pz = eval(&LogPoint::new(x.log_z + h, x.log_w)).ok_or_else(|| diverged(&x))?;
        let pw = eval(&LogPoint::new(x.log_z, x.log_w + h)).ok_or_else(|| diverged(&x))?;
        let (j11, j21) = ((pz.log_z - px.log_z) / h, (pz.log_w - px.log_w) / h);
        let (j12, j22) = ((pw.log_z - px.log_z) / h, (pw.log_w - px.log_w) / h);
        let det = j11 * j22 - j12 * j21;
        if det.norm() == 0.0 {
            return Err(diverged(&x));
        }
        let sz = -(j22 * r[0] - j12 * r[1]) / det;
        let sw = -(j11 * r[1] - j21 * r[0]) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = LogPoint::new(x.log_z + sz * lambda, x.log_w + sw * lambda);
            if let Some(pc) = eval(&cand) {
                if size(&resid(&pc)) < size(&r) {
                    x = cand;
                    px = pc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if relative_log_residual(&px, y) < tol {
                return Ok(x);
            }
            return Err(diverged(&x));
        }
    }
    if relative_log_residual(&px, y) < tol {
        Ok(x)
    } else {
        Err(diverged(&x))
    }
}

/// U shrunk by the factor `(1+ε)^{2C}` on both bounds.
pub fn injectivity_region(plan: &WeightPlan, spec: &RegionSpec, eps: f64) -> RegionSpec {
    let c = injectivity_constant(plan);
    RegionSpec {
        margin: (1.0 + eps).powf(2.0 * c),
        ..spec.clone()
    }
}

/// `C = max{1/d, l2/(2δ)}` (Cases 3, 4); `max{1/d, 1/δ}` when l2 is infinite.
pub fn injectivity_constant(plan: &WeightPlan) -> f64 {
    let d = to_f64(&plan.d);
    let delta = plan.delta as f64;
    match plan.case {
        Case::One | Case::Two => (1.0 / d).max(1.0 / delta),
        Case::Three | Case::Four => (1.0 / d).max(plan.l2.to_f64() / (2.0 * delta)),
    }
}

/// `‖Φ − id‖` bound of the d >= 2 theory, in terms of ε.
pub fn identity_bound(plan: &WeightPlan, eps: f64) -> Option<f64> {
    let d = to_f64(&plan.d);
    if d < 2.0 {
        return None;
    }
    let delta = plan.delta as f64;
    let g = to_f64(&plan.gamma);
    let et = -(1.0 - eps).ln();
    let b = if plan.d != qi(plan.delta as i128) {
        (1.0 / (delta - 1.0)).max(1.0 / (d - 1.0) + g / (delta - d) * (1.0 / (d - 1.0) - 1.0 / (delta - 1.0)))
    } else {
        1.0 / (d - 1.0) + g / ((d - 1.0) * (d - 1.0))
    };
    Some(b * et)
}

/// `γ_n` as f64 when it fits.
pub fn gamma_n_f64(delta: u64, d: u64, gamma: u64, n: u32) -> f64 {
    gamma_n(delta, d, gamma, n).to_f64().unwrap_or(f64::INFINITY)
}
