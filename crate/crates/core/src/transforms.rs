//! Blow-ups and branched coverings pushing f to a map whose second
//! coordinate has a single-vertex Newton polygon.
//!
//! A substitution π is log-linear: (log z, log w) = P (log Z, log C). The
//! pushed map f̃ = π⁻¹∘f∘π then satisfies
//! log f̃ = P⁻¹ (log p∘π, log q∘π), so its dominant exponents are the rows of
//! P⁻¹ M P with M = [[δ, 0], [γ, d]], and each remainder term enters as a
//! factor (1 + c·Z^a C^b)^{power}. Nothing is ever expanded into closed form.

use crate::classify::{classify, Case, WeightPlan};
use crate::error::{Error, Result};
use crate::exact::{fmt_q, is_integer, mat_inv, mat_mul, q, qi, to_f64, Mat, Rational};
use crate::newton::{newton_polygon_of_points, NewtonPolygon};
use crate::poly::{LogPoint, SkewProduct};
use crate::region::RegionSpec;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubstitutionKind {
    /// (z, c) → (z, z^l c)
    Blowup1,
    /// (t, w) → (t w^{1/l2}, w)
    Blowup2,
    /// (z, c) → (z^r, z^s c)
    Cover1,
    /// (t, w) → (t w^r, w^s)
    Cover2,
}

impl SubstitutionKind {
    pub fn name(&self) -> &'static str {
        match self {
            SubstitutionKind::Blowup1 => "blowup1",
            SubstitutionKind::Blowup2 => "blowup2",
            SubstitutionKind::Cover1 => "cover1",
            SubstitutionKind::Cover2 => "cover2",
        }
    }

    /// Stage-one kinds act on z, stage-two kinds on w.
    pub fn acts_on_z(&self) -> bool {
        matches!(self, SubstitutionKind::Blowup1 | SubstitutionKind::Cover1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonomialSubstitution {
    pub kind: SubstitutionKind,
    /// Blow-up weight (l1 or l2); for covers `s/r`.
    pub l: Rational,
    pub r: i128,
    pub s: i128,
}

impl MonomialSubstitution {
    pub fn blowup1(l: Rational) -> Result<Self> {
        Self::blowup(SubstitutionKind::Blowup1, l)
    }

    pub fn blowup2(l2: Rational) -> Result<Self> {
        Self::blowup(SubstitutionKind::Blowup2, l2)
    }

    fn blowup(kind: SubstitutionKind, l: Rational) -> Result<Self> {
        if l <= qi(0) {
            return Err(Error::InvalidInput(format!("blow-up weight {l} must be positive")));
        }
        Ok(MonomialSubstitution {
            kind,
            l,
            r: *l.denom(),
            s: *l.numer(),
        })
    }

    pub fn cover1(r: i128, s: i128) -> Result<Self> {
        Self::cover(SubstitutionKind::Cover1, r, s)
    }

    pub fn cover2(r: i128, s: i128) -> Result<Self> {
        Self::cover(SubstitutionKind::Cover2, r, s)
    }

    fn cover(kind: SubstitutionKind, r: i128, s: i128) -> Result<Self> {
        if r < 1 || s < 1 || r.gcd(&s) != 1 {
            return Err(Error::InvalidInput(format!("cover needs coprime positive (r, s), got ({r}, {s})")));
        }
        Ok(MonomialSubstitution { kind, l: q(s, r), r, s })
    }

    /// Cover with `s/r` equal to a given positive weight.
    pub fn cover_for(kind: SubstitutionKind, weight: Rational) -> Result<Self> {
        Self::cover(kind, *weight.denom(), *weight.numer())
    }

    /// `P` with `(log z, log w) = P (log Z, log C)`.
    pub fn matrix(&self) -> Mat {
        let (zero, one) = (qi(0), qi(1));
        let (r, s) = (qi(self.r), qi(self.s));
        match self.kind {
            SubstitutionKind::Blowup1 => [[one, zero], [self.l, one]],
            SubstitutionKind::Blowup2 => [[one, one / self.l], [zero, one]],
            SubstitutionKind::Cover1 => [[r, zero], [s, one]],
            SubstitutionKind::Cover2 => [[one, r], [zero, s]],
        }
    }

    pub fn to_json(&self) -> Value {
        match self.kind {
            SubstitutionKind::Blowup1 | SubstitutionKind::Blowup2 => {
                json!({"kind": self.kind.name(), "l": fmt_q(&self.l), "r": null, "s": null})
            }
            _ => json!({"kind": self.kind.name(), "r": self.r, "s": self.s, "l": fmt_q(&self.l)}),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    P,
    Q,
}

/// One remainder term: f̃_k picks up `(1 + c·Z^a C^b)^{powers[k]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub source: Source,
    pub original: (Rational, Rational),
    pub relative: (Rational, Rational),
    pub powers: [Rational; 2],
}

#[derive(Clone, Debug)]
pub struct TransformedMap {
    pub case: Case,
    pub stages: Vec<MonomialSubstitution>,
    /// Composite `P` and its inverse.
    pub matrix: Mat,
    pub inverse: Mat,
    /// Exponents (in Z, C) of the dominant monomials of f̃₁ and f̃₂.
    pub dominant: [(Rational, Rational); 2],
    pub perturbations: Vec<Perturbation>,
    /// Exponents of q̃, the second coordinate with the p-factor split off.
    pub q_terms: Vec<(Rational, Rational)>,
    pub polygon: NewtonPolygon,
    pub well_defined: bool,
    pub reason: Option<String>,
    pub formal: bool,
    f: SkewProduct,
    plan: WeightPlan,
}

fn row_times(v: (Rational, Rational), m: &Mat) -> (Rational, Rational) {
    (v.0 * m[0][0] + v.1 * m[1][0], v.0 * m[0][1] + v.1 * m[1][1])
}

fn scale(c: Rational, v: (Rational, Rational)) -> (Rational, Rational) {
    (c * v.0, c * v.1)
}

fn add(a: (Rational, Rational), b: (Rational, Rational)) -> (Rational, Rational) {
    (a.0 + b.0, a.1 + b.1)
}

fn fmt_pair(v: &(Rational, Rational)) -> Value {
    json!([fmt_q(&v.0), fmt_q(&v.1)])
}

/// Checks the kind-specific condition against the dominant `γ` of the map
/// the substitution is applied to.
fn condition(sub: &MonomialSubstitution, gamma_in: Rational) -> Option<String> {
    match sub.kind {
        SubstitutionKind::Blowup1 if !is_integer(&sub.l) => Some("l1 ∉ ℕ".into()),
        SubstitutionKind::Blowup2 if !is_integer(&(qi(1) / sub.l)) => Some("1/l2 ∉ ℕ".into()),
        SubstitutionKind::Cover2 => {
            let g = gamma_in / qi(sub.s);
            if !is_integer(&g) || g < qi(0) {
                Some(format!("gamma/s = {} ∉ ℕ ∪ {{0}}", fmt_q(&g)))
            } else {
                None
            }
        }
        _ => None,
    }
}

impl TransformedMap {
    fn build(f: &SkewProduct, plan: &WeightPlan, stages: Vec<MonomialSubstitution>, reason: Option<String>) -> Result<Self> {
        let mut p: Mat = [[qi(1), qi(0)], [qi(0), qi(1)]];
        for s in &stages {
            p = mat_mul(&p, &s.matrix());
        }
        let pi = mat_inv(&p);
        let delta = plan.delta_q();
        let (gamma, d) = (plan.gamma, plan.d);
        let mp = mat_mul(&[[delta, qi(0)], [gamma, d]], &p);
        let e = mat_mul(&pi, &mp);
        let dominant = [(e[0][0], e[0][1]), (e[1][0], e[1][1])];

        let mut perturbations = Vec::new();
        for t in f.p().terms() {
            if t.i != delta {
                perturbations.push(Perturbation {
                    source: Source::P,
                    original: (t.i, t.j),
                    relative: row_times((t.i - delta, qi(0)), &p),
                    powers: [pi[0][0], pi[1][0]],
                });
            }
        }
        let mut q_terms = vec![dominant[1]];
        for t in f.q().terms() {
            if (t.i, t.j) != (gamma, d) {
                let rel = row_times((t.i - gamma, t.j - d), &p);
                q_terms.push(add(dominant[1], scale(pi[1][1], rel)));
                perturbations.push(Perturbation {
                    source: Source::Q,
                    original: (t.i, t.j),
                    relative: rel,
                    powers: [pi[0][1], pi[1][1]],
                });
            }
        }
        let polygon = newton_polygon_of_points(&q_terms)?;

        let mut reason = reason;
        if reason.is_none() {
            let integral = dominant.iter().all(|v| is_integer(&v.0) && is_integer(&v.1))
                && q_terms.iter().all(|v| is_integer(&v.0) && is_integer(&v.1));
            if !integral {
                reason = Some("non-integral exponents".into());
            }
        }
        let well_defined = reason.is_none();
        Ok(TransformedMap {
            case: plan.case,
            stages,
            matrix: p,
            inverse: pi,
            dominant,
            perturbations,
            q_terms,
            polygon,
            well_defined,
            formal: !well_defined,
            reason,
            f: f.clone(),
            plan: plan.clone(),
        })
    }

    /// Applies the stage-two substitution of the Case 4 pipeline.
    pub fn then(&self, sub: MonomialSubstitution) -> Result<TransformedMap> {
        if self.case != Case::Four || self.stages.len() != 1 || sub.kind.acts_on_z() {
            return Err(Error::Misuse(
                "only a Case 4 stage-one map takes a second (blowup2/cover2) substitution".into(),
            ));
        }
        let reason = if !self.well_defined {
            Some(format!(
                "stage one not well defined ({})",
                self.reason.clone().unwrap_or_default()
            ))
        } else {
            condition(&sub, self.dominant[1].0)
        };
        let mut stages = self.stages.clone();
        stages.push(sub);
        TransformedMap::build(&self.f, &self.plan, stages, reason)
    }

    pub fn plan(&self) -> &WeightPlan {
        &self.plan
    }

    /// π⁻¹(U) as monomial inequalities in the new variables.
    pub fn region_description(&self, spec: &RegionSpec) -> String {
        let k = mat_mul(&mat_inv(&spec.coords()), &self.matrix);
        let first_z = self.stages.iter().any(|s| s.kind.acts_on_z());
        let all_z = self.stages.iter().all(|s| s.kind.acts_on_z());
        let names = [if all_z { "z" } else { "t" }, if first_z { "c" } else { "w" }];
        let mono = |row: &[Rational; 2]| {
            let mut parts = Vec::new();
            for (c, n) in row.iter().zip(names) {
                if c.is_zero() {
                    continue;
                }
                if c.is_one() {
                    parts.push(format!("|{n}|"));
                } else {
                    parts.push(format!("|{n}|^({})", fmt_q(c)));
                }
            }
            parts.join("·")
        };
        format!("{} > R, {} > R (R = {})", mono(&k[0]), mono(&k[1]), spec.r)
    }

    /// Largest `|f̃_k / dominant_k − 1|` over sampled points, with p and q
    /// evaluated directly at π of each sample.
    pub fn numeric_residual(&self, spec: &RegionSpec, n: usize, seed: u64) -> Result<f64> {
        let a = self.f.a_delta();
        let b = self
            .f
            .q()
            .coeff(self.plan.gamma, self.plan.d)
            .ok_or_else(|| Error::InvalidInput("dominant monomial missing".into()))?;
        let (g, d) = (to_f64(&self.plan.gamma), to_f64(&self.plan.d));
        let delta = self.plan.delta as f64;
        let mut worst: f64 = 0.0;
        for x in spec.sample_lift(n, seed) {
            let (z, w) = x.to_point();
            let rho_p = self.f.p().evaluate(z, w)? / (a * (x.log_z * delta).exp());
            let rho_q = self.f.q().evaluate(z, w)? / (b * (x.log_z * g + x.log_w * d).exp());
            let (lp, lq) = (rho_p.ln(), rho_q.ln());
            for k in 0..2 {
                let e: Complex64 = lp * to_f64(&self.inverse[k][0]) + lq * to_f64(&self.inverse[k][1]);
                worst = worst.max((e.exp() - 1.0).norm());
            }
        }
        Ok(worst)
    }

    /// Lift coordinates (log Z, log C) of a point given in (log z, log w).
    pub fn pull_back(&self, x: &LogPoint) -> LogPoint {
        let m = &self.inverse;
        LogPoint::new(
            x.log_z * to_f64(&m[0][0]) + x.log_w * to_f64(&m[0][1]),
            x.log_z * to_f64(&m[1][0]) + x.log_w * to_f64(&m[1][1]),
        )
    }

    pub fn to_json(&self) -> Value {
        let last = self.stages.last().expect("at least one stage");
        let mut v = last.to_json();
        let o = v.as_object_mut().expect("object");
        o.insert("stages".into(), Value::Array(self.stages.iter().map(|s| s.to_json()).collect()));
        o.insert("well_defined".into(), json!(self.well_defined));
        o.insert("reason".into(), json!(self.reason));
        o.insert("formal".into(), json!(self.formal));
        o.insert(
            "dominant_exponents".into(),
            json!([fmt_pair(&self.dominant[0]), fmt_pair(&self.dominant[1])]),
        );
        o.insert(
            "perturbations".into(),
            Value::Array(
                self.perturbations
                    .iter()
                    .map(|t| {
                        json!({
                            "source": if t.source == Source::P { "p" } else { "q" },
                            "original": fmt_pair(&t.original),
                            "relative": fmt_pair(&t.relative),
                            "powers": [fmt_q(&t.powers[0]), fmt_q(&t.powers[1])],
                        })
                    })
                    .collect(),
            ),
        );
        o.insert("polygon".into(), self.polygon.to_json());
        o.insert("normal_form".into(), json!(verify_normal_form(self)));
        v
    }
}

/// Pushes f forward under a first substitution matching the plan's case.
pub fn pushforward(f: &SkewProduct, plan: &WeightPlan, sub: MonomialSubstitution) -> Result<TransformedMap> {
    let ok = match plan.case {
        Case::One => false,
        Case::Two | Case::Four => sub.kind.acts_on_z(),
        Case::Three => !sub.kind.acts_on_z(),
    };
    if !ok {
        return Err(Error::Misuse(format!(
            "{} does not apply to a Case {} plan",
            sub.kind.name(),
            plan.case.number()
        )));
    }
    TransformedMap::build(f, plan, vec![sub], condition(&sub, plan.gamma))
}

/// Blow-ups when the weights are integral, covers otherwise; covers use
/// `s/r = α₀` on the w side, which is always well defined.
pub fn default_pipeline(f: &SkewProduct, plan: &WeightPlan) -> Result<TransformedMap> {
    let first_z = |l: Rational| {
        if is_integer(&l) {
            MonomialSubstitution::blowup1(l)
        } else {
            MonomialSubstitution::cover_for(SubstitutionKind::Cover1, l)
        }
    };
    let second_w = |l2: Rational, alpha0: Option<Rational>| {
        if is_integer(&(qi(1) / l2)) {
            MonomialSubstitution::blowup2(l2)
        } else {
            let a = alpha0.ok_or_else(|| Error::Hypothesis("alpha0 undefined".into()))?;
            MonomialSubstitution::cover_for(SubstitutionKind::Cover2, a)
        }
    };
    match plan.case {
        Case::One => Err(Error::Misuse("Case 1 is already in normal form".into())),
        Case::Two => pushforward(f, plan, first_z(plan.l1)?),
        Case::Three => pushforward(f, plan, second_w(plan.l2.finite().expect("finite l2"), plan.alpha0)?),
        Case::Four => {
            let t1 = pushforward(f, plan, first_z(plan.l1)?)?;
            let inner = intermediate_plan(&t1)
                .ok_or_else(|| Error::Hypothesis("stage one is not in Case 3".into()))?;
            t1.then(second_w(inner.l2.finite().expect("finite l2"), inner.alpha0)?)
        }
    }
}

fn intermediate_plan(t: &TransformedMap) -> Option<WeightPlan> {
    let delta = t.dominant[0].0;
    if !is_integer(&delta) || delta < qi(0) {
        return None;
    }
    classify(delta.to_integer() as u32, &t.polygon)
        .into_iter()
        .find(|p| p.case == Case::Three)
}

/// The transformed polygon is the single vertex at the dominant pair.
pub fn verify_normal_form(t: &TransformedMap) -> bool {
    t.polygon.vertices == vec![t.dominant[1]]
}

/// Exponent inequalities the transforms must satisfy: every q̃ term below
/// the dominant one in i (Case 2), in j (Case 3), or both (Case 4).
pub fn lemma_translation(t: &TransformedMap) -> bool {
    let (gi, gj) = t.dominant[1];
    let i_ok = gi >= qi(0) && t.q_terms.iter().all(|&(i, _)| i <= gi);
    let j_ok = t.q_terms.iter().all(|&(_, j)| j <= gj);
    match t.case {
        Case::One => true,
        Case::Two => i_ok,
        Case::Three => j_ok,
        Case::Four => i_ok && j_ok,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntermediateReport {
    pub detected_case: Case,
    pub case3: bool,
    pub max_vertex_ok: bool,
    pub intercept_relation_ok: bool,
    pub wrong_pipeline: bool,
}

impl IntermediateReport {
    pub fn pass(&self) -> bool {
        self.case3 && self.max_vertex_ok && self.intercept_relation_ok && !self.wrong_pipeline
    }

    pub fn to_json(&self) -> Value {
        json!({
            "detected_case": self.detected_case.number(),
            "case3": self.case3,
            "max_vertex_ok": self.max_vertex_ok,
            "intercept_relation_ok": self.intercept_relation_ok,
            "wrong_pipeline": self.wrong_pipeline,
            "pass": self.pass(),
        })
    }
}

/// Stage one of the Case 4 pipeline lands in Case 3 with the same dominant
/// vertex on top, and `T̃_{k-1}` sits relative to δ as `T_{k-1}` does.
pub fn intermediate_case_check(t: &TransformedMap) -> Result<IntermediateReport> {
    let delta = t.dominant[0].0;
    if !is_integer(&delta) || delta < qi(1) {
        return Err(Error::Misuse("first coordinate exponent is not a positive integer".into()));
    }
    let plans = classify(delta.to_integer() as u32, &t.polygon);
    let detected_case = plans.first().map(|p| p.case).unwrap_or(Case::One);
    let case3 = plans.iter().any(|p| p.case == Case::Three);
    let max_vertex_ok = t.polygon.vertices.last() == Some(&t.dominant[1]);
    let before = t.plan.neighbouring_intercepts().0;
    let after = t.polygon.intercepts.last().copied();
    let dq = t.plan.delta_q();
    let intercept_relation_ok = match (before, after) {
        (Some(b), Some(a)) => b.cmp(&dq) == a.cmp(&delta) && a.cmp(&delta) != Ordering::Greater,
        _ => false,
    };
    Ok(IntermediateReport {
        detected_case,
        case3,
        max_vertex_ok,
        intercept_relation_ok,
        wrong_pipeline: t.case != Case::Four || t.stages.len() != 1,
    })
}
