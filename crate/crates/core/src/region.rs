//! The invariant region U near infinity: membership, a certified radius R
//! for a target ε, and sampling verifiers for the bounds, invariance and the
//! d = 1 contraction.
//!
//! Every shape becomes the product `{u > ρ, v > ρ}` in log-modulus
//! coordinates (u, v) of the first and second "product" variables:
//! (z, w), (z, c = w/z^l1), (t = z/w^{1/l2}, w) and (t, c).

use crate::bottcher::LiftedMap;
use crate::classify::{Case, WeightPlan};
use crate::error::{Error, Result};
use crate::exact::{mat_inv, mat_mul, qi, to_f64, ExtRational, Mat, Rational};
use crate::poly::{LogPoint, Remainders, SkewProduct};
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Width of the sampled window above log R in each product coordinate.
pub const SAMPLE_WINDOW: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Case1,
    Case2,
    Case3,
    Case4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionSpec {
    pub r: f64,
    pub l1: Rational,
    pub l2: ExtRational,
    pub shape: Shape,
    /// Multiplicative margin on both bounds (1 for U itself).
    pub margin: f64,
}


impl RegionSpec {
    pub fn new(r: f64, l1: Rational, l2: ExtRational, shape: Shape) -> Self {
        RegionSpec {
            r,
            l1,
            l2,
            shape,
            margin: 1.0,
        }
    }

    pub fn for_plan(plan: &WeightPlan, r: f64) -> Self {
        let shape = match plan.case {
            Case::One => Shape::Case1,
            Case::Two => Shape::Case2,
            Case::Three => Shape::Case3,
            Case::Four => Shape::Case4,
        };
        RegionSpec::new(r, plan.l1, plan.l2, shape)
    }

    pub fn with_radius(&self, r: f64) -> Self {
        RegionSpec { r, ..self.clone() }
    }

    /// `(x, y) = A (u, v)` with (x, y) = (log|z|, log|w|).
    pub fn coords(&self) -> Mat {
        let (zero, one) = (qi(0), qi(1));
        match self.shape {
            Shape::Case1 => [[one, zero], [zero, one]],
            Shape::Case2 => [[one, zero], [self.l1, one]],
            Shape::Case3 => [[one, one / self.l2_finite()], [zero, one]],
            Shape::Case4 => {
                let il2 = one / self.l2_finite();
                [[one, il2], [self.l1, self.l1 * il2 + one]]
            }
        }
    }

    fn l2_finite(&self) -> Rational {
        self.l2.finite().expect("finite l2 for Cases 3 and 4")
    }

    fn thresholds(&self) -> (f64, f64) {
        let rho = self.r.ln();
        let mu = self.margin.ln();
        match self.shape {
            Shape::Case1 | Shape::Case2 => (rho + mu, rho + mu),
            Shape::Case3 | Shape::Case4 => (rho + mu / self.l2.to_f64(), rho + mu),
        }
    }

    pub fn to_product(&self, x: f64, y: f64) -> (f64, f64) {
        let a = self.coords();
        let (a11, a12, a21, a22) = (to_f64(&a[0][0]), to_f64(&a[0][1]), to_f64(&a[1][0]), to_f64(&a[1][1]));
        let det = a11 * a22 - a12 * a21;
        ((a22 * x - a12 * y) / det, (a11 * y - a21 * x) / det)
    }

    pub fn from_product(&self, u: f64, v: f64) -> (f64, f64) {
        let a = self.coords();
        (
            to_f64(&a[0][0]) * u + to_f64(&a[0][1]) * v,
            to_f64(&a[1][0]) * u + to_f64(&a[1][1]) * v,
        )
    }

    /// Membership from `x = log|z|`, `y = log|w|`.
    pub fn member_log(&self, x: f64, y: f64) -> bool {
        if x.is_nan() || y.is_nan() || y == f64::NEG_INFINITY || x == f64::NEG_INFINITY {
            return false;
        }
        let (u, v) = self.to_product(x, y);
        let (tu, tv) = self.thresholds();
        u > tu && v > tv
    }

    pub fn member(&self, z: Complex64, w: Complex64) -> bool {
        if w == Complex64::zero() || z == Complex64::zero() {
            return false;
        }
        self.member_log(z.norm().ln(), w.norm().ln())
    }

    pub fn member_lift(&self, x: &LogPoint) -> bool {
        self.member_log(x.log_z.re, x.log_w.re)
    }

    /// Largest radius R' with the point in U_{R'} (margin ignored).
    pub fn radius_at(&self, x: f64, y: f64) -> f64 {
        let (u, v) = self.to_product(x, y);
        u.min(v).exp()
    }

    /// Region description in the printed inequality form.
    pub fn describe(&self) -> String {
        match self.shape {
            Shape::Case1 => "|z| > R, |w| > R".into(),
            Shape::Case2 => format!("|z| > R, |w| > R|z|^{}", self.l1),
            Shape::Case3 => format!("R < |w| < R^-{l2} |z|^{l2}", l2 = self.l2),
            Shape::Case4 => format!(
                "R|z|^{} < |w| < R^-{} |z|^{}",
                self.l1,
                self.l2,
                self.l1 + self.l2_finite()
            ),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "R": self.r,
            "l1": self.l1.to_string(),
            "l2": self.l2.to_string(),
            "shape": format!("{:?}", self.shape),
            "margin": self.margin,
            "description": self.describe(),
        })
    }

    /// Deterministic log-uniform samples inside the region, uniform phases.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<(Complex64, Complex64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tu, tv) = self.thresholds();
        (0..n)
            .map(|_| {
                let u = tu + SAMPLE_WINDOW * (1.0 - rng.gen::<f64>());
                let v = tv + SAMPLE_WINDOW * (1.0 - rng.gen::<f64>());
                let (x, y) = self.from_product(u, v);
                let a: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let b: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                (Complex64::from_polar(x.exp(), a), Complex64::from_polar(y.exp(), b))
            })
            .collect()
    }

    /// Same as [`RegionSpec::sample`] but returned as lift points (no overflow).
    pub fn sample_lift(&self, n: usize, seed: u64) -> Vec<LogPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (tu, tv) = self.thresholds();
        (0..n)
            .map(|_| {
                let u = tu + SAMPLE_WINDOW * (1.0 - rng.gen::<f64>());
                let v = tv + SAMPLE_WINDOW * (1.0 - rng.gen::<f64>());
                let (x, y) = self.from_product(u, v);
                let a: f64 = (rng.gen::<f64>() - 0.5) * std::f64::consts::TAU;
                let b: f64 = (rng.gen::<f64>() - 0.5) * std::f64::consts::TAU;
                LogPoint::new(Complex64::new(x, a), Complex64::new(y, b))
            })
            .collect()
    }
}

/// One remainder term bounded by `coeff * exp(-(g1 u + g2 v))` on U.
#[derive(Clone, Debug, PartialEq)]
pub struct TermGap {
    pub g1: Rational,
    pub g2: Rational,
    pub coeff: f64,
}

impl TermGap {
    pub fn total(&self) -> Rational {
        self.g1 + self.g2
    }

    pub fn bound_at(&self, rho: f64) -> f64 {
        self.coeff * (-(to_f64(&self.total())) * rho).exp()
    }
}

/// Gaps of the ζ and η terms in the product coordinates of `spec`.
pub fn term_gaps(f: &SkewProduct, plan: &WeightPlan, spec: &RegionSpec) -> Result<(Vec<TermGap>, Vec<TermGap>)> {
    let rem = Remainders::new(f, plan.gamma, plan.d)?;
    let a = spec.coords();
    let gap = |di: Rational, dj: Rational, c: f64| TermGap {
        g1: -(di * a[0][0] + dj * a[1][0]),
        g2: -(di * a[0][1] + dj * a[1][1]),
        coeff: c,
    };
    let zeta: Vec<TermGap> = rem.zeta_terms().map(|(di, c)| gap(di, qi(0), c)).collect();
    let eta: Vec<TermGap> = rem.eta_terms().map(|(di, dj, c)| gap(di, dj, c)).collect();
    for t in zeta.iter().chain(eta.iter()) {
        if t.g1.is_negative() || t.g2.is_negative() || t.total().is_zero() {
            return Err(Error::Hypothesis(format!(
                "remainder term with gaps ({}, {}) is not dominated on U",
                t.g1, t.g2
            )));
        }
    }
    Ok((zeta, eta))
}

/// Certified sup bounds of |ζ| and |η| on U_R (sum of term bounds).
pub fn remainder_bounds(gaps: &(Vec<TermGap>, Vec<TermGap>), r: f64) -> (f64, f64) {
    let rho = r.ln();
    (
        gaps.0.iter().map(|t| t.bound_at(rho)).sum(),
        gaps.1.iter().map(|t| t.bound_at(rho)).sum(),
    )
}

/// The model map in product coordinates: `(u', v') = B (u, v) + const`.
pub fn product_model(plan: &WeightPlan, spec: &RegionSpec) -> (Mat, Mat) {
    let m: Mat = [[plan.delta_q(), qi(0)], [plan.gamma, plan.d]];
    let a = spec.coords();
    let ai = mat_inv(&a);
    (mat_mul(&ai, &mat_mul(&m, &a)), ai)
}

/// Lower bounds `u' >= B_r1 u + B_r2 v + c_r` hold with these `c_r` on U_R.
fn invariance_constants(f: &SkewProduct, plan: &WeightPlan, ai: &Mat, ez: f64, ee: f64) -> Result<[f64; 2]> {
    let b = f
        .q()
        .coeff(plan.gamma, plan.d)
        .ok_or_else(|| Error::InvalidInput("dominant coefficient missing".into()))?;
    let lead = [f.a_delta().norm().ln(), b.norm().ln()];
    let eps = [ez, ee];
    let mut out = [0.0; 2];
    for r in 0..2 {
        let mut c = 0.0;
        for k in 0..2 {
            let w = to_f64(&ai[r][k]);
            if eps[k] >= 1.0 && w != 0.0 {
                return Err(Error::Hypothesis("remainder bound not below 1".into()));
            }
            let worst = if w >= 0.0 { (1.0 - eps[k]).ln() } else { (1.0 + eps[k]).ln() };
            c += w * (lead[k] + if w == 0.0 { 0.0 } else { worst });
        }
        out[r] = c;
    }
    Ok(out)
}

/// Radius guaranteeing sup_U |ζ|, |η| < eps and f(U_R) ⊂ U_{2R}.
pub fn estimate_r(f: &SkewProduct, plan: &WeightPlan, eps: f64) -> Result<RegionSpec> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidInput(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !plan.degree_ok {
        return Err(Error::Hypothesis(
            plan.degree_reason.clone().unwrap_or_else(|| "degree condition fails".into()),
        ));
    }
    let base = RegionSpec::for_plan(plan, 2.0);
    let gaps = term_gaps(f, plan, &base)?;
    let mut rho = 2f64.ln();
    for terms in [&gaps.0, &gaps.1] {
        let n = terms.len() as f64;
        for t in terms.iter() {
            let g = to_f64(&t.total());
            rho = rho.max((n * t.coeff / eps).ln() / g);
        }
    }
    let (bm, ai) = product_model(plan, &base);
    let mut e = [qi(0); 2];
    for r in 0..2 {
        if bm[r][0].is_negative() || bm[r][1].is_negative() {
            return Err(Error::Hypothesis("model map is not monotone on U".into()));
        }
        e[r] = bm[r][0] + bm[r][1];
        if e[r] <= qi(1) {
            return Err(Error::Hypothesis(format!(
                "growth exponent {} <= 1 in product coordinate {}",
                e[r],
                r + 1
            )));
        }
    }
    // each pass shrinks the remainder bounds, so the required radius only decreases
    for _ in 0..64 {
        let (ez, ee) = remainder_bounds(&gaps, rho.exp());
        let c = invariance_constants(f, plan, &ai, ez, ee)?;
        let mut need = rho;
        for r in 0..2 {
            let er = to_f64(&e[r]);
            need = need.max((2f64.ln() - c[r]) / (er - 1.0));
        }
        if need <= rho * (1.0 + 1e-12) {
            break;
        }
        rho = need;
    }
    Ok(base.with_radius(rho.exp()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub max_zeta: f64,
    pub max_eta: f64,
    pub pass: bool,
    pub eps: f64,
    pub r: f64,
    pub samples: usize,
    pub seed: u64,
}

impl BoundsReport {
    pub fn to_json(&self) -> Value {
        json!({
            "max_zeta": self.max_zeta, "max_eta": self.max_eta, "pass": self.pass,
            "eps": self.eps, "R": self.r, "samples": self.samples, "seed": self.seed,
        })
    }
}

pub fn verify_bounds(
    f: &SkewProduct,
    plan: &WeightPlan,
    spec: &RegionSpec,
    eps: f64,
    n_samples: usize,
    seed: u64,
) -> Result<BoundsReport> {
    let rem = Remainders::new(f, plan.gamma, plan.d)?;
    let pts = spec.sample_lift(n_samples, seed);
    let vals: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|x| {
            rem.eval(x)
                .map(|(a, b)| (a.norm(), b.norm()))
                .unwrap_or((f64::INFINITY, f64::INFINITY))
        })
        .collect();
    let max_zeta = vals.iter().map(|v| v.0).fold(0.0, f64::max);
    let max_eta = vals.iter().map(|v| v.1).fold(0.0, f64::max);
    Ok(BoundsReport {
        max_zeta,
        max_eta,
        pass: max_zeta < eps && max_eta < eps,
        eps,
        r: spec.r,
        samples: n_samples,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub checked: usize,
    pub violation_count: usize,
    /// Up to 20 witnesses as `(log|z|, log|w|)`.
    pub violations: Vec<(f64, f64)>,
    pub r: f64,
    pub seed: u64,
}

impl InvarianceReport {
    pub fn pass(&self) -> bool {
        self.violation_count == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "checked": self.checked, "violation_count": self.violation_count,
            "violations": self.violations.iter().map(|v| json!([v.0, v.1])).collect::<Vec<_>>(),
            "R": self.r, "seed": self.seed, "pass": self.pass(),
        })
    }
}

/// `(log|p|, log|q|)` at a lift point, without any smallness assumption.
fn image_logabs(rem: &Remainders, delta: f64, x: &LogPoint) -> Result<(f64, f64)> {
    let (zeta, eta) = rem.eval(x)?;
    let g = to_f64(&rem.gamma);
    let d = to_f64(&rem.d);
    let lp = rem.log_a.re + delta * x.log_z.re + (Complex64::new(1.0, 0.0) + zeta).norm().ln();
    let lq = rem.log_b.re + g * x.log_z.re + d * x.log_w.re + (Complex64::new(1.0, 0.0) + eta).norm().ln();
    Ok((lp, lq))
}

pub fn verify_invariance(
    f: &SkewProduct,
    plan: &WeightPlan,
    spec: &RegionSpec,
    n_samples: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    let rem = Remainders::new(f, plan.gamma, plan.d)?;
    let pts = spec.sample_lift(n_samples, seed);
    let delta = f.delta() as f64;
    let bad: Vec<Option<(f64, f64)>> = pts
        .par_iter()
        .map(|x| match image_logabs(&rem, delta, x) {
            Ok((a, b)) if spec.member_log(a, b) => None,
            _ => Some((x.log_z.re, x.log_w.re)),
        })
        .collect();
    let all: Vec<(f64, f64)> = bad.into_iter().flatten().collect();
    Ok(InvarianceReport {
        checked: n_samples,
        violation_count: all.len(),
        violations: all.into_iter().take(20).collect(),
        r: spec.r,
        seed,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractionReport {
    pub n_steps: usize,
    pub checked: usize,
    pub violation_count: usize,
    /// `(sample index, step)` of the first failures.
    pub violations: Vec<(usize, usize)>,
    pub r: f64,
}

impl ContractionReport {
    pub fn pass(&self) -> bool {
        self.violation_count == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n_steps": self.n_steps, "checked": self.checked,
            "violation_count": self.violation_count,
            "violations": self.violations.iter().map(|v| json!([v.0, v.1])).collect::<Vec<_>>(),
            "R": self.r, "pass": self.pass(),
        })
    }
}

/// Checks `f^n(U_R) ⊂ U_{2^n R}` for `n <= n_steps` (d = 1 only).
pub fn verify_contraction(
    f: &SkewProduct,
    plan: &WeightPlan,
    spec: &RegionSpec,
    n_steps: usize,
    n_samples: usize,
    seed: u64,
) -> Result<ContractionReport> {
    if plan.d != qi(1) {
        return Err(Error::Misuse(format!(
            "the contraction check is for d = 1, this plan has d = {}",
            plan.d
        )));
    }
    if !plan.degree_ok {
        return Err(Error::Hypothesis(
            plan.degree_reason.clone().unwrap_or_else(|| "degree condition fails".into()),
        ));
    }
    let lift = LiftedMap::new(f, plan)?;
    let pts = spec.sample_lift(n_samples, seed);
    let first_fail: Vec<Option<usize>> = pts
        .par_iter()
        .map(|x0| {
            let mut x = *x0;
            for n in 1..=n_steps {
                match lift.forward(&x) {
                    Ok(y) => x = y,
                    Err(_) => return Some(n),
                }
                let target = spec.with_radius(spec.r * 2f64.powi(n as i32));
                if !target.member_lift(&x) {
                    return Some(n);
                }
            }
            None
        })
        .collect();
    let violations: Vec<(usize, usize)> = first_fail
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|n| (i, n)))
        .collect();
    Ok(ContractionReport {
        n_steps,
        checked: n_samples,
        violation_count: violations.len(),
        violations: violations.into_iter().take(20).collect(),
        r: spec.r,
    })
}
