//! The rational extension of f at infinity on ℙ² and ℙ(r,s,1), the union
//! A_{f₀} of preimages of U under the monomial model, and the critical-set
//! precondition for extending ψ.

use crate::bottcher::{LiftedMap, PhiContext};
use crate::classify::{Case, WeightPlan};
use crate::error::{Error, Result};
use crate::exact::{fmt_q, is_integer, max_q, q, qi, to_f64, Rational};
use crate::poly::{LogPoint, SkewProduct};
use crate::region::RegionSpec;
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trichotomy {
    CollapseToPPlus,
    InducedByH,
    CollapseToPMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointStatus {
    Superattracting,
    Indeterminacy,
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basin {
    APlus,
    AMinus,
    ClosureUnion,
    /// δ = D with d = 1, or a configuration the tables do not list.
    NotCovered,
}

impl Trichotomy {
    pub fn name(&self) -> &'static str {
        match self {
            Trichotomy::CollapseToPPlus => "collapse_to_p_plus",
            Trichotomy::InducedByH => "induced_by_h",
            Trichotomy::CollapseToPMinus => "collapse_to_p_minus",
        }
    }
}

impl PointStatus {
    pub fn name(&self) -> &'static str {
        match self {
            PointStatus::Superattracting => "superattracting",
            PointStatus::Indeterminacy => "indeterminacy",
            PointStatus::NotApplicable => "not_applicable",
        }
    }
}

impl Basin {
    pub fn name(&self) -> &'static str {
        match self {
            Basin::APlus => "A_plus",
            Basin::AMinus => "A_minus",
            Basin::ClosureUnion => "closure_union",
            Basin::NotCovered => "not_covered",
        }
    }
}

/// Classification at infinity. For ℙ² the weight is l = 1.
#[derive(Clone, Debug, PartialEq)]
pub struct InfinityReport {
    pub r: i128,
    pub s: i128,
    pub l: Rational,
    /// `D` (or `D_l`).
    pub degree: Rational,
    /// `λ = max(δ, D)` (or `λ_l`).
    pub lambda: Rational,
    pub integral: bool,
    /// Monomials of q attaining the weighted degree.
    pub h: Vec<(Rational, Rational)>,
    pub nm: (Rational, Rational),
    pub nstar_mstar: (Rational, Rational),
    pub trichotomy: Trichotomy,
    pub p_plus: PointStatus,
    pub p_minus: PointStatus,
    pub basin: Basin,
    /// The basin claim needs `λ_l ∈ ℕ`, which fails.
    pub conditional: bool,
}

impl InfinityReport {
    pub fn to_json(&self) -> Value {
        let pair = |p: &(Rational, Rational)| json!([fmt_q(&p.0), fmt_q(&p.1)]);
        json!({
            "r": self.r, "s": self.s, "l": fmt_q(&self.l),
            "D": fmt_q(&self.degree), "lambda": fmt_q(&self.lambda), "integral": self.integral,
            "h": self.h.iter().map(pair).collect::<Vec<_>>(),
            "NM": pair(&self.nm), "NstarMstar": pair(&self.nstar_mstar),
            "trichotomy": self.trichotomy.name(),
            "p_plus": self.p_plus.name(), "p_minus": self.p_minus.name(),
            "basin": self.basin.name(), "conditional": self.conditional,
        })
    }
}

pub fn classify_infinity(f: &SkewProduct, plan: &WeightPlan) -> InfinityReport {
    classify_at(f, plan, 1, 1)
}

pub fn classify_weighted(f: &SkewProduct, plan: &WeightPlan, r: i128, s: i128) -> Result<InfinityReport> {
    if r < 1 || s < 1 || r.gcd(&s) != 1 {
        return Err(Error::InvalidInput(format!("weights (r, s) = ({r}, {s}) must be coprime and positive")));
    }
    Ok(classify_at(f, plan, r, s))
}

fn classify_at(f: &SkewProduct, plan: &WeightPlan, r: i128, s: i128) -> InfinityReport {
    let l = q(s, r);
    let delta = plan.delta_q();
    let weight = |(i, j): (Rational, Rational)| i / l + j;
    let exps = f.q().exponents();
    let degree = exps.iter().map(|&e| weight(e)).max().expect("q is non-empty");
    let mut h: Vec<_> = exps.iter().copied().filter(|&e| weight(e) == degree).collect();
    h.sort();
    let nm = h[0];
    let nstar_mstar = *h.last().expect("h is non-empty");
    let lambda = max_q(delta, degree);
    let integral = is_integer(&lambda);

    let trichotomy = match delta.cmp(&degree) {
        std::cmp::Ordering::Less => Trichotomy::CollapseToPPlus,
        std::cmp::Ordering::Equal => Trichotomy::InducedByH,
        std::cmp::Ordering::Greater => Trichotomy::CollapseToPMinus,
    };
    let p_plus = match trichotomy {
        Trichotomy::CollapseToPMinus => PointStatus::Indeterminacy,
        _ if nm.0 == qi(0) => PointStatus::Superattracting,
        _ => PointStatus::Indeterminacy,
    };
    let p_minus = match trichotomy {
        Trichotomy::CollapseToPMinus => PointStatus::Superattracting,
        Trichotomy::InducedByH if nstar_mstar.1 >= qi(2) => PointStatus::Superattracting,
        Trichotomy::InducedByH => PointStatus::NotApplicable,
        Trichotomy::CollapseToPPlus if nstar_mstar.1 > qi(0) => PointStatus::Indeterminacy,
        Trichotomy::CollapseToPPlus => PointStatus::NotApplicable,
    };
    let dominant = (plan.gamma, plan.d);
    let basin = match trichotomy {
        Trichotomy::CollapseToPPlus => Basin::APlus,
        Trichotomy::CollapseToPMinus => Basin::AMinus,
        Trichotomy::InducedByH => {
            if plan.d < qi(2) || !h.contains(&dominant) {
                Basin::NotCovered
            } else if h.len() == 1 {
                Basin::ClosureUnion
            } else if dominant == nm {
                Basin::APlus
            } else if dominant == nstar_mstar {
                Basin::AMinus
            } else {
                Basin::NotCovered
            }
        }
    };
    InfinityReport {
        r,
        s,
        l,
        degree,
        lambda,
        integral,
        h,
        nm,
        nstar_mstar,
        trichotomy,
        p_plus,
        p_minus,
        basin,
        conditional: trichotomy == Trichotomy::CollapseToPPlus && !integral,
    }
}

/// Largest intercept `y + x/l` of lines of slope `−1/l` meeting
/// `{(0, δ)} ∪ N(q)`; it suffices to look at the polygon vertices.
pub fn lambda_geometric(plan: &WeightPlan, l: Rational) -> Rational {
    plan.polygon
        .vertices
        .iter()
        .map(|&(i, j)| i / l + j)
        .fold(plan.delta_q(), max_q)
}

/// Empirical basin fractions: orbits of samples of U are followed in the
/// lift and sorted by the sign of `log|w| − l log|z|`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalBasin {
    pub plus: usize,
    pub minus: usize,
    pub undecided: usize,
}

impl EmpiricalBasin {
    pub fn to_json(&self) -> Value {
        json!({"plus": self.plus, "minus": self.minus, "undecided": self.undecided})
    }
}

pub fn empirical_basin(
    f: &SkewProduct,
    plan: &WeightPlan,
    spec: &RegionSpec,
    l: Rational,
    n: usize,
    seed: u64,
) -> Result<EmpiricalBasin> {
    let lift = LiftedMap::new(f, plan)?;
    let lf = to_f64(&l);
    let mut out = EmpiricalBasin { plus: 0, minus: 0, undecided: 0 };
    for x0 in spec.sample_lift(n, seed) {
        let mut x = x0;
        let mut gap = 0.0;
        for _ in 0..60 {
            match lift.forward(&x) {
                Ok(y) => x = y,
                Err(_) => break,
            }
            gap = x.log_w.re - lf * x.log_z.re;
            if x.log_z.re.abs().max(x.log_w.re.abs()) > 1e200 {
                break;
            }
        }
        if gap > 1.0 {
            out.plus += 1;
        } else if gap < -1.0 {
            out.minus += 1;
        } else {
            out.undecided += 1;
        }
    }
    Ok(out)
}

/// Closed forms of A_{f₀}, the union of all f₀-preimages of U.
#[derive(Clone, Debug, PartialEq)]
pub enum AfoShape {
    /// `{|z| > 1, w ≠ 0}`
    PuncturedExterior,
    /// `{|z| > 1, |w| > |z|^a}`
    Above(Rational),
    /// `{|z| > 1, 0 < |w| < |z|^a}`
    Below(Rational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AfoRegion {
    pub shape: Option<AfoShape>,
    /// Catalog entry, e.g. "Case 2 item (5)", or why none applies.
    pub entry: String,
}

impl AfoRegion {
    pub fn describe(&self) -> String {
        match &self.shape {
            None => "not covered".into(),
            Some(AfoShape::PuncturedExterior) => "{|z| > 1, w != 0}".into(),
            Some(AfoShape::Above(a)) if *a == qi(0) => "{|z| > 1, |w| > 1}".into(),
            Some(AfoShape::Above(a)) => format!("{{|z| > 1, |w| > |z|^({})}}", fmt_q(a)),
            Some(AfoShape::Below(a)) => format!("{{|z| > 1, 0 < |w| < |z|^({})}}", fmt_q(a)),
        }
    }

    /// Membership from `x = log|z|`, `y = log|w|`; `None` when not covered.
    pub fn member_log(&self, x: f64, y: f64) -> Option<bool> {
        let shape = self.shape.as_ref()?;
        let inside = x > 0.0
            && y.is_finite()
            && match shape {
                AfoShape::PuncturedExterior => true,
                AfoShape::Above(a) => y > to_f64(a) * x,
                AfoShape::Below(a) => y < to_f64(a) * x,
            };
        Some(inside)
    }

    /// Signed log distance to the nearest boundary piece.
    pub fn boundary_distance(&self, x: f64, y: f64) -> f64 {
        let slope = match &self.shape {
            Some(AfoShape::Above(a)) | Some(AfoShape::Below(a)) => Some(to_f64(a)),
            _ => None,
        };
        let d = x.abs();
        match slope {
            Some(a) => d.min((y - a * x).abs() / (1.0 + a * a).sqrt()),
            None => d,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"entry": self.entry, "region": self.describe(), "covered": self.shape.is_some()})
    }
}

fn entry(shape: AfoShape, e: &str) -> AfoRegion {
    AfoRegion {
        shape: Some(shape),
        entry: e.into(),
    }
}

fn not_covered(why: &str) -> AfoRegion {
    AfoRegion {
        shape: None,
        entry: format!("not covered: {why}"),
    }
}

/// Looks the plan's configuration up in the A_{f₀} catalog.
pub fn afo_region(plan: &WeightPlan) -> AfoRegion {
    let delta = plan.delta_q();
    let (g, d) = (plan.gamma, plan.d);
    let zero = qi(0);
    let alpha0 = plan.alpha0;
    let (below, above) = plan.neighbouring_intercepts();
    match plan.case {
        Case::One => {
            if g == zero {
                entry(AfoShape::Above(zero), "Case 1 item (3)")
            } else if delta >= d {
                entry(AfoShape::PuncturedExterior, "Case 1 item (1)")
            } else {
                entry(AfoShape::Above(alpha0.expect("delta != d")), "Case 1 item (2)")
            }
        }
        Case::Two => {
            let t1 = above.expect("Case 2 has an edge");
            if g > zero && t1 > delta && delta >= d {
                entry(AfoShape::PuncturedExterior, "Case 2 item (1)")
            } else if g > zero && t1 == delta && delta > d && d >= qi(2) {
                entry(AfoShape::Above(alpha0.expect("delta != d")), "Case 2 item (2)")
            } else if g > zero && delta < d {
                entry(AfoShape::Above(alpha0.expect("delta != d")), "Case 2 item (3)")
            } else if g == zero && delta < d {
                entry(AfoShape::Above(zero), "Case 2 item (4)")
            } else if g == zero && delta == d {
                entry(AfoShape::Above(plan.l1), "Case 2 item (5)")
            } else if g == zero {
                not_covered("delta > d and gamma = 0 in Case 2")
            } else {
                not_covered("d = 1 and delta = T_j")
            }
        }
        Case::Three => {
            let t = below.expect("Case 3 has an edge");
            if g == zero {
                not_covered("gamma = 0 in Case 3")
            } else if delta > t {
                entry(AfoShape::PuncturedExterior, "Case 3 item (1)")
            } else if d >= qi(2) {
                entry(AfoShape::Below(alpha0.expect("delta != d")), "Case 3 item (2)")
            } else {
                not_covered("d = 1 and delta = T_j")
            }
        }
        Case::Four => {
            let (tb, ta) = (below.expect("edge below"), above.expect("edge above"));
            if g == zero {
                not_covered("gamma = 0 in Case 4")
            } else if tb < delta && delta < ta {
                entry(AfoShape::PuncturedExterior, "Case 4 item (1)")
            } else if d < qi(2) {
                not_covered("d = 1 and delta = T_j")
            } else if delta == ta {
                entry(AfoShape::Above(alpha0.expect("delta != d")), "Case 4 item (2)")
            } else {
                entry(AfoShape::Below(alpha0.expect("delta != d")), "Case 4 item (3)")
            }
        }
    }
}

/// `T(l) = (δl − γ)/d`.
pub fn t_map(plan: &WeightPlan, l: Rational) -> Rational {
    (plan.delta_q() * l - plan.gamma) / plan.d
}

/// `T^n(l)`, exactly.
pub fn t_iter(plan: &WeightPlan, l: Rational, n: u32) -> Result<Rational> {
    let bits = (n as f64) * (plan.delta as f64).max(to_f64(&plan.d)).max(2.0).log2()
        + (to_f64(&plan.gamma).abs() + 2.0).log2()
        + 20.0;
    if bits > 110.0 {
        return Err(Error::Overflow(format!("T^{n} does not fit exact 128-bit rationals")));
    }
    let mut x = l;
    for _ in 0..n {
        x = t_map(plan, x);
    }
    Ok(x)
}

/// `f₀^{-n}(U)`: `x > zr·ρ` (Cases 1, 2) and
/// `lo_r·ρ + lo_slope·x < y < hi_r·ρ + hi_slope·x` with ρ = log R.
#[derive(Clone, Debug, PartialEq)]
pub struct PreimageRegion {
    pub n: u32,
    pub r: f64,
    pub z_radius_exp: Option<Rational>,
    pub lower: (Rational, Rational),
    pub upper: Option<(Rational, Rational)>,
}

impl PreimageRegion {
    pub fn member_log(&self, x: f64, y: f64) -> bool {
        let rho = self.r.ln();
        if let Some(e) = &self.z_radius_exp {
            if !(x > to_f64(e) * rho) {
                return false;
            }
        }
        if !(y > to_f64(&self.lower.0) * rho + to_f64(&self.lower.1) * x) {
            return false;
        }
        match &self.upper {
            Some((c, s)) => y < to_f64(c) * rho + to_f64(s) * x,
            None => true,
        }
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(e) = &self.z_radius_exp {
            parts.push(format!("|z| > R^({})", fmt_q(e)));
        }
        let lo = format!("R^({})|z|^({})", fmt_q(&self.lower.0), fmt_q(&self.lower.1));
        match &self.upper {
            Some((c, s)) => parts.push(format!("{lo} < |w| < R^({})|z|^({})", fmt_q(c), fmt_q(s))),
            None => parts.push(format!("|w| > {lo}")),
        }
        format!("{{{}}}", parts.join(", "))
    }

    pub fn to_json(&self) -> Value {
        json!({"n": self.n, "R": self.r, "region": self.describe()})
    }
}

pub fn preimage_region(plan: &WeightPlan, r: f64, n: u32) -> Result<PreimageRegion> {
    let d = plan.d;
    if d < qi(1) {
        return Err(Error::Hypothesis("f0 needs d >= 1".into()));
    }
    let dn = pow_q(d, n)?;
    let deln = pow_q(plan.delta_q(), n)?;
    let (z_radius_exp, lo_l, hi) = match plan.case {
        Case::One => (Some(qi(1) / deln), qi(0), None),
        Case::Two => (Some(qi(1) / deln), plan.l1, None),
        Case::Three => (None, qi(0), Some(plan.l2.finite().expect("finite l2"))),
        Case::Four => (None, plan.l1, Some(plan.l2.finite().expect("finite l2"))),
    };
    let lower = (qi(1) / dn, t_iter(plan, lo_l, n)?);
    let upper = match hi {
        Some(l2) => Some((-l2 / dn, t_iter(plan, lo_l + l2, n)?)),
        None => None,
    };
    Ok(PreimageRegion {
        n,
        r,
        z_radius_exp,
        lower,
        upper,
    })
}

fn pow_q(x: Rational, n: u32) -> Result<Rational> {
    let mut out = qi(1);
    for _ in 0..n {
        out = Rational::new(
            out.numer()
                .checked_mul(*x.numer())
                .ok_or_else(|| Error::Overflow("power overflows 128 bits".into()))?,
            out.denom() * x.denom(),
        );
    }
    Ok(out)
}

/// The two four-parameter families of Reinhardt regions V ⊃ U.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VFamily {
    /// `{|z| > r1, |w| > r2|z|^{a1}}` (Cases 1, 2) or
    /// `{r2|z|^{a1} < |w| < r1^{-l2}|z|^{a2}}` (Cases 3, 4).
    First,
    /// `{r2|z|^{a1} < |w| < r1^{-a2}|z|^{a2}}`.
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VRegion {
    pub family: VFamily,
    pub r1: f64,
    pub r2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl VRegion {
    /// Checks the printed parameter ranges against the plan and R.
    pub fn new(family: VFamily, r1: f64, r2: f64, a1: f64, a2: f64, plan: &WeightPlan, r: f64) -> Result<Self> {
        let l1 = to_f64(&plan.l1);
        let l12 = l1 + plan.l2.to_f64();
        let r1_max = match family {
            VFamily::First => r,
            VFamily::Second if plan.l2.is_infinite() => r,
            VFamily::Second => r.powf(plan.l2.to_f64() / l12),
        };
        if !(1.0 <= r1 && r1 <= r1_max && 1.0 <= r2 && r2 <= r) {
            return Err(Error::InvalidInput(format!(
                "need 1 <= r1 <= {r1_max} and 1 <= r2 <= {r}, got r1 = {r1}, r2 = {r2}"
            )));
        }
        if !(a1 <= l1 && l1 < l12 && l12 <= a2) {
            return Err(Error::InvalidInput(format!(
                "need a1 <= l1 < l1 + l2 <= a2, got a1 = {a1}, a2 = {a2}"
            )));
        }
        Ok(VRegion { family, r1, r2, a1, a2 })
    }

    pub fn member_log(&self, case: Case, x: f64, y: f64, l2: f64) -> bool {
        let (r1, r2) = (self.r1.ln(), self.r2.ln());
        let lower = if self.a1 == f64::NEG_INFINITY {
            true
        } else {
            y > r2 + self.a1 * x
        };
        let upper = |c: f64| self.a2 == f64::INFINITY || y < c + self.a2 * x;
        match (self.family, case) {
            (VFamily::First, Case::One | Case::Two) => x > r1 && lower,
            (VFamily::First, _) => lower && upper(-l2 * r1),
            (VFamily::Second, _) => lower && upper(-self.a2 * r1),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalReport {
    pub samples: usize,
    pub accepted: usize,
    pub non_converged: usize,
    pub min_modulus: f64,
    pub pass: bool,
    pub warning: Option<String>,
}

impl CriticalReport {
    pub fn to_json(&self) -> Value {
        json!({
            "samples": self.samples, "accepted": self.accepted,
            "non_converged": self.non_converged, "min_modulus": self.min_modulus,
            "pass": self.pass, "warning": self.warning,
        })
    }
}

/// Samples `|φ|⁻¹(V ∩ ℝ²)` and reports the smallest `|p′(z)·∂q/∂w(z,w)|`
/// found there. Sampling evidence only.
pub fn critical_precondition(
    f: &SkewProduct,
    plan: &WeightPlan,
    spec: &RegionSpec,
    v: &VRegion,
    n: usize,
    seed: u64,
) -> Result<CriticalReport> {
    let ctx = PhiContext::new(f, plan, spec)?;
    let dp = f.p().derivative_z();
    let dq = f.q().derivative_w();
    let l2 = plan.l2.to_f64();
    let lr = spec.r.ln();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CriticalReport {
        samples: n,
        accepted: 0,
        non_converged: 0,
        min_modulus: f64::INFINITY,
        pass: true,
        warning: None,
    };
    let tau = std::f64::consts::TAU;
    let modulus = |z: Complex64, w: Complex64| -> Result<f64> { Ok((dp.evaluate(z, w)? * dq.evaluate(z, w)?).norm()) };
    let inside = |z: Complex64, w: Complex64| {
        abs_phi_log(f, &ctx, z, w).map(|lp| v.member_log(plan.case, lp.0, lp.1, l2))
    };
    let mut best: Vec<(f64, Complex64, Complex64)> = Vec::new();
    for _ in 0..n {
        // log-polar box around the part of A_f near U
        let x = rng.gen_range(-1.0..(2.0 * lr + 4.0));
        let y = rng.gen_range(-(lr + 4.0) * 3.0..(3.0 * lr + 8.0) * 3.0);
        let z = Complex64::from_polar(x.exp(), rng.gen_range(0.0..tau));
        let w = Complex64::from_polar(y.exp(), rng.gen_range(0.0..tau));
        match inside(z, w) {
            None => out.non_converged += 1,
            Some(false) => {}
            Some(true) => {
                out.accepted += 1;
                best.push((modulus(z, w)?, z, w));
            }
        }
    }
    best.sort_by(|a, b| a.0.total_cmp(&b.0));
    best.truncate(8);
    // downhill random walk that stays inside the sampled set
    for (m, z, w) in best.iter_mut() {
        let mut step = 0.25;
        for _ in 0..400 {
            let dz = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * step * z.norm();
            let dw = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * step * w.norm();
            let (nz, nw) = (*z + dz, *w + dw);
            let nm = modulus(nz, nw)?;
            if nm < *m && inside(nz, nw) == Some(true) {
                (*m, *z, *w) = (nm, nz, nw);
            } else {
                step = (step * 0.97).max(1e-6);
            }
        }
        out.min_modulus = out.min_modulus.min(*m);
    }
    if out.min_modulus == 0.0 {
        out.pass = false;
        out.warning = Some("critical point found in the sampled preimage of V".into());
    } else if out.min_modulus < 1e-2 {
        out.warning = Some(format!("critical set comes close: min modulus {:.3e}", out.min_modulus));
    }
    Ok(out)
}

/// `(log|φ₁|, log|φ₂|)` extended by `(f₀|ℝ²)^{-n}∘|φ|∘fⁿ`, n <= 20.
fn abs_phi_log(f: &SkewProduct, ctx: &PhiContext, z: Complex64, w: Complex64) -> Option<(f64, f64)> {
    let (mut z, mut w) = (z, w);
    for n in 0..=20 {
        if !(z.is_finite() && w.is_finite()) || z.norm() == 0.0 || w.norm() == 0.0 {
            return None;
        }
        if ctx.spec.member(z, w) {
            let x = LogPoint::from_point(z, w).ok()?;
            let (mut p, ..) = ctx.phi_log(&x, 1e-12, 400).ok()?;
            for _ in 0..n {
                p = ctx.lift.model_inverse(&p);
            }
            return Some((p.log_z.re, p.log_w.re));
        }
        let (nz, nw) = f.eval(z, w).ok()?;
        z = nz;
        w = nw;
    }
    None
}
