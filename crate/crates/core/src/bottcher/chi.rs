//! χ(z) = lim (Bₙ(z)/pⁿ(z)^{γₙ/δⁿ})^{1/dⁿ} and the coordinates built from it.

use super::{gamma_ratios, log1p_c, relative_log_residual, PhiContext};
use crate::classify::WeightPlan;
use crate::error::{Error, Result};
use crate::exact::{qi, to_f64};
use crate::poly::{LogPoint, SkewProduct};
use num_complex::Complex64;
use serde_json::{json, Value};

/// Terms of `p(z)/(a z^δ) − 1` and `b(z)/(b_{γd} z^γ) − 1` in log form.
struct OneVar {
    delta: f64,
    gamma: f64,
    d: f64,
    log_a: Complex64,
    log_b: Complex64,
    zeta: Vec<(f64, Complex64)>,
    beta: Vec<(f64, Complex64)>,
}

impl OneVar {
    fn new(f: &SkewProduct, plan: &WeightPlan) -> Result<Self> {
        if !plan.gamma.is_integer() || !plan.d.is_integer() {
            return Err(Error::Hypothesis("chi needs integer dominant exponents".into()));
        }
        let b = f
            .q()
            .coeff(plan.gamma, plan.d)
            .ok_or_else(|| Error::InvalidInput("dominant monomial missing".into()))?;
        let log_a = f.a_delta().ln();
        let log_b = b.ln();
        let delta = qi(f.delta() as i128);
        Ok(OneVar {
            delta: f.delta() as f64,
            gamma: to_f64(&plan.gamma),
            d: to_f64(&plan.d),
            log_a,
            log_b,
            zeta: f
                .p()
                .terms()
                .iter()
                .filter(|t| t.i != delta)
                .map(|t| (to_f64(&(t.i - delta)), t.coeff.ln() - log_a))
                .collect(),
            beta: f
                .q()
                .terms()
                .iter()
                .filter(|t| t.j == plan.d && t.i != plan.gamma)
                .map(|t| (to_f64(&(t.i - plan.gamma)), t.coeff.ln() - log_b))
                .collect(),
        })
    }

    fn rel(terms: &[(f64, Complex64)], z: Complex64) -> Result<(Complex64, f64)> {
        let s: Complex64 = terms.iter().map(|(di, lc)| (z * *di + lc).exp()).sum();
        if !(s.norm() < 1.0) {
            return Err(Error::EscapedValidity);
        }
        Ok((log1p_c(s), s.norm()))
    }
}

/// `log χ` at the lift point `log_z`, and the value of `log φ_p` there.
fn log_chi(f: &SkewProduct, plan: &WeightPlan, log_z: Complex64, tol: f64) -> Result<(Complex64, Complex64)> {
    if plan.d < qi(2) {
        return Err(Error::Hypothesis("chi requires d >= 2".into()));
    }
    let v = OneVar::new(f, plan)?;
    let (delta, g, d) = (v.delta, v.gamma, v.d);
    // Constant part: Σ d^{-n-1} log b − Σ c_{n+1} log a.
    let mut acc = (v.log_b - v.log_a * (g / (delta - 1.0))) / (d - 1.0);
    let mut phi_p = log_z + v.log_a / (delta - 1.0);
    let max_n = 200;
    let c = gamma_ratios(delta, d, g, max_n + 1);
    let mut z = log_z;
    let (mut dn, mut deln) = (1.0 / d, 1.0 / delta);
    for n in 0..max_n {
        let (lz, ez) = OneVar::rel(&v.zeta, z)?;
        let (lb, eb) = OneVar::rel(&v.beta, z)?;
        acc += lb * dn - lz * c[n + 1];
        phi_p += lz * deln;
        // remaining terms shrink at least as fast as the current ones
        let tail_c: f64 = c[n + 1..].iter().sum::<f64>() + c[max_n + 1] * 1e3;
        let tail = -(1.0 - eb).ln() * dn * d / (d - 1.0) + -(1.0 - ez).ln() * (tail_c + deln * delta / (delta - 1.0));
        if tail < tol {
            return Ok((acc, phi_p));
        }
        z = z * delta + v.log_a + lz;
        dn /= d;
        deln /= delta;
    }
    Err(Error::NonConvergence("chi did not converge".into()))
}

pub fn chi(f: &SkewProduct, plan: &WeightPlan, z: Complex64, tol: f64) -> Result<Complex64> {
    Ok(log_chi(f, plan, z.ln(), tol)?.0.exp())
}

/// `|χ(p(z))·b(z)·χ(z)^{−d}·φ_p(z)^{−γ} − 1|`.
pub fn chi_functional_residual(f: &SkewProduct, plan: &WeightPlan, z: Complex64, tol: f64) -> Result<f64> {
    let lz = z.ln();
    let (x0, lphi) = log_chi(f, plan, lz, tol)?;
    let pz = f.p().evaluate(z, Complex64::new(1.0, 0.0))?;
    let (x1, _) = log_chi(f, plan, pz.ln(), tol)?;
    let v = OneVar::new(f, plan)?;
    let (lb, _) = OneVar::rel(&v.beta, lz)?;
    let log_bz = v.log_b + lz * v.gamma + lb;
    let delta = x1 + log_bz - x0 * v.d - lphi * v.gamma;
    Ok((delta.exp() - 1.0).norm())
}

/// `φ̃₂ = φ₂/χ` and `φ^{α₀} = φ₂/φ₁^{α₀}` with their conjugacy residuals.
#[derive(Clone, Debug, Default)]
pub struct DerivedCoordinates {
    pub phi_tilde2: Option<Complex64>,
    pub phi_tilde2_residual: Option<f64>,
    pub phi_tilde2_reason: Option<String>,
    pub phi_alpha0: Option<Complex64>,
    pub phi_alpha0_residual: Option<f64>,
    pub phi_alpha0_reason: Option<String>,
}

impl DerivedCoordinates {
    pub fn to_json(&self) -> Value {
        let c = |z: Option<Complex64>| z.map(|z| vec![z.re, z.im]);
        json!({
            "phi_tilde2": c(self.phi_tilde2),
            "phi_tilde2_residual": self.phi_tilde2_residual,
            "phi_tilde2_reason": self.phi_tilde2_reason,
            "phi_alpha0": c(self.phi_alpha0),
            "phi_alpha0_residual": self.phi_alpha0_residual,
            "phi_alpha0_reason": self.phi_alpha0_reason,
        })
    }
}

/// Residuals are taken against `(p(z), κ b(z) w^d)`, κ = b a^{−γ/(δ−1)}, and
/// `(a z^δ, b a^{−α₀} w^d)`; both reduce to the monic targets when a = b = 1.
pub fn derived_coordinates(ctx: &PhiContext, f: &SkewProduct, plan: &WeightPlan, x: &LogPoint, tol: f64) -> Result<DerivedCoordinates> {
    let mut out = DerivedCoordinates::default();
    let (phi_x, ..) = ctx.phi_log(x, tol, 400)?;
    let fx = ctx.lift.forward(x)?;
    let (phi_fx, ..) = ctx.phi_log(&fx, tol, 400)?;
    let log_a = ctx.lift.log_a;
    let log_b = ctx.lift.log_b;
    let delta = f.delta() as f64;
    let (g, d) = (to_f64(&plan.gamma), to_f64(&plan.d));

    if plan.d >= qi(2) {
        let (c0, _) = log_chi(f, plan, x.log_z, tol * 1e-2)?;
        let (c1, _) = log_chi(f, plan, fx.log_z, tol * 1e-2)?;
        let v = OneVar::new(f, plan)?;
        let (lb, _) = OneVar::rel(&v.beta, x.log_z)?;
        let t0 = phi_x.log_w - c0;
        let t1 = phi_fx.log_w - c1;
        let log_kappa = log_b - log_a * (g / (delta - 1.0));
        let target = log_kappa + log_b + x.log_z * g + lb + t0 * d;
        out.phi_tilde2 = Some(t0.exp());
        out.phi_tilde2_residual = Some(((t1 - target).exp() - 1.0).norm());
    } else {
        out.phi_tilde2_reason = Some("requires d >= 2".into());
    }

    match plan.alpha0 {
        Some(a0) if a0.is_integer() => {
            let a0 = to_f64(&a0);
            let u0 = phi_x.log_w - phi_x.log_z * a0;
            let u1 = phi_fx.log_w - phi_fx.log_z * a0;
            let first = relative_log_residual(
                &LogPoint::new(phi_fx.log_z, u1),
                &LogPoint::new(log_a + phi_x.log_z * delta, log_b - log_a * a0 + u0 * d),
            );
            out.phi_alpha0 = Some(u0.exp());
            out.phi_alpha0_residual = Some(first);
        }
        Some(_) => out.phi_alpha0_reason = Some("alpha0 is not an integer".into()),
        None => out.phi_alpha0_reason = Some("alpha0 undefined (delta = d)".into()),
    }
    Ok(out)
}
