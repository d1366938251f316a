//! Case 1-4 classification from δ and the Newton polygon, with weights,
//! α₀, weight intervals, the degree gate and the two-plan boundary.

use crate::error::{Error, Result};
use crate::exact::{fmt_q, is_integer, max_q, min_q, qi, ExtRational, Interval, Rational};
use crate::newton::{newton_polygon, NewtonPolygon};
use crate::poly::{Polynomial, SkewProduct};
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    One,
    Two,
    Three,
    Four,
}

impl Case {
    pub fn number(&self) -> u8 {
        match self {
            Case::One => 1,
            Case::Two => 2,
            Case::Three => 3,
            Case::Four => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightInterval {
    /// Case 1 has no interval; `[0, inf)` is returned as a flagged convention.
    Degenerate(Interval),
    Single(Interval),
    /// Case 4: `I^1` and `I^2(l1)`.
    Pair { first: Interval, second: Interval },
}

impl WeightInterval {
    pub fn to_json(&self) -> Value {
        match self {
            WeightInterval::Degenerate(i) => json!({"kind": "degenerate", "interval": i.to_string()}),
            WeightInterval::Single(i) => json!({"kind": "single", "interval": i.to_string()}),
            WeightInterval::Pair { first, second } => json!({
                "kind": "pair", "first": first.to_string(), "second_at_l1": second.to_string()
            }),
        }
    }
}

/// Infimum of the larger-region weight set (Cases 1 and 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum L1Star {
    Value(Rational),
    UnboundedBelow,
    Empty,
}

impl L1Star {
    pub fn to_json(&self) -> Value {
        match self {
            L1Star::Value(v) => json!({"exists": true, "value": fmt_q(v), "attained": true}),
            L1Star::UnboundedBelow => json!({"exists": false, "reason": "unbounded below"}),
            L1Star::Empty => json!({"exists": false, "reason": "empty"}),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightPlan {
    pub case: Case,
    /// 1-based index of the dominant vertex.
    pub k: usize,
    pub gamma: Rational,
    pub d: Rational,
    pub delta: u32,
    pub l1: Rational,
    pub l2: ExtRational,
    pub alpha0: Option<Rational>,
    pub interval: WeightInterval,
    pub degree_ok: bool,
    pub degree_reason: Option<String>,
    pub l1_star: Option<L1Star>,
    pub tilde_gamma: Option<Rational>,
    pub tilde_d: Option<Rational>,
    pub m: Rational,
    pub polygon: NewtonPolygon,
    pub two_plans: bool,
}

impl WeightPlan {
    pub fn delta_q(&self) -> Rational {
        qi(self.delta as i128)
    }

    /// `T_{k-1}` and `T_k` around the dominant vertex (absent at the ends).
    pub fn neighbouring_intercepts(&self) -> (Option<Rational>, Option<Rational>) {
        let t = &self.polygon.intercepts;
        let below = if self.k >= 2 { Some(t[self.k - 2]) } else { None };
        let above = t.get(self.k - 1).copied();
        (below, above)
    }

    pub fn delta_hits_intercept(&self) -> bool {
        self.polygon.intercepts.contains(&self.delta_q())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": self.case.number(),
            "k": self.k,
            "gamma": fmt_q(&self.gamma),
            "d": fmt_q(&self.d),
            "l1": fmt_q(&self.l1),
            "l2": self.l2.to_string(),
            "alpha0": self.alpha0.as_ref().map(fmt_q),
            "interval": self.interval.to_json(),
            "degree_ok": self.degree_ok,
            "degree_reason": self.degree_reason,
            "l1_star": self.l1_star.map(|l| l.to_json()),
            "tilde_gamma": self.tilde_gamma.as_ref().map(fmt_q),
            "tilde_d": self.tilde_d.as_ref().map(fmt_q),
            "M": fmt_q(&self.m),
            "two_plans": self.two_plans,
        })
    }
}

/// Plans read off the polygon alone (no non-vertex monomials).
pub fn classify(delta: u32, p: &NewtonPolygon) -> Vec<WeightPlan> {
    build_plans(delta, p, &p.vertices)
}

/// Plans for a map: like [`classify`] but `M` and `l1*` see every monomial of q.
pub fn classify_map(f: &SkewProduct) -> Result<Vec<WeightPlan>> {
    let poly = newton_polygon(f.q())?;
    Ok(build_plans(f.delta(), &poly, &f.q().exponents()))
}

fn build_plans(delta: u32, poly: &NewtonPolygon, monomials: &[(Rational, Rational)]) -> Vec<WeightPlan> {
    let s = poly.s();
    let dq = qi(delta as i128);
    let t = &poly.intercepts;
    let mut plans = Vec::new();
    if s == 1 {
        plans.push(make_plan(delta, poly, 1, Case::One, monomials));
        return plans;
    }
    for k in 1..=s {
        let applies = if k == 1 {
            dq <= t[0]
        } else if k == s {
            t[s - 2] <= dq
        } else {
            t[k - 2] <= dq && dq <= t[k - 1]
        };
        if applies {
            let case = if k == 1 {
                Case::Two
            } else if k == s {
                Case::Three
            } else {
                Case::Four
            };
            plans.push(make_plan(delta, poly, k, case, monomials));
        }
    }
    let two = plans.len() == 2;
    for p in &mut plans {
        p.two_plans = two;
    }
    plans
}

fn make_plan(
    delta: u32,
    poly: &NewtonPolygon,
    k: usize,
    case: Case,
    monomials: &[(Rational, Rational)],
) -> WeightPlan {
    let dq = qi(delta as i128);
    let (gamma, d) = poly.vertex(k);
    let (l1, l2) = match case {
        Case::One => (qi(0), ExtRational::Infinity),
        Case::Two => (poly.edge_weights[0], ExtRational::Infinity),
        Case::Three => (qi(0), ExtRational::Finite(poly.edge_weights[k - 2])),
        Case::Four => {
            let l1 = poly.edge_weights[k - 1];
            (l1, ExtRational::Finite(poly.edge_weights[k - 2] - l1))
        }
    };
    let alpha0 = if dq != d { Some(gamma / (dq - d)) } else { None };

    let (degree_ok, degree_reason) = if d >= qi(2) {
        (true, None)
    } else if d == qi(1) {
        if poly.intercepts.contains(&dq) {
            (false, Some(format!("d = 1 and delta = {delta} equals an intercept T_k; need delta != T_k for every k")))
        } else {
            (true, None)
        }
    } else {
        (false, Some(format!("dominant w-degree d = {d} < 1")))
    };

    let (tilde_gamma, tilde_d) = if case == Case::Four {
        let l2f = l2.finite().unwrap();
        let tg = gamma + l1 * d - l1 * dq;
        (Some(tg), Some(tg / l2f + d))
    } else {
        (None, None)
    };

    let m = if case == Case::Four {
        let tg = tilde_gamma.unwrap();
        let gaps = monomials
            .iter()
            .filter(|&&(i, j)| (i, j) != (gamma, d))
            .map(|&(i, j)| tg - (i + l1 * j - l1 * dq))
            .filter(|g| g.is_positive());
        gaps.fold(qi(1), min_q)
    } else {
        qi(1)
    };

    let mut plan = WeightPlan {
        case,
        k,
        gamma,
        d,
        delta,
        l1,
        l2,
        alpha0,
        interval: WeightInterval::Degenerate(Interval::ray(qi(0))),
        degree_ok,
        degree_reason,
        l1_star: None,
        tilde_gamma,
        tilde_d,
        m,
        polygon: poly.clone(),
        two_plans: false,
    };
    plan.interval = interval(&plan);
    if matches!(case, Case::One | Case::Two) {
        plan.l1_star = Some(l1_star_points(delta, monomials, &plan));
    }
    plan
}

/// The weight interval(s) of a plan.
pub fn interval(plan: &WeightPlan) -> WeightInterval {
    let dq = plan.delta_q();
    match plan.case {
        Case::One => WeightInterval::Degenerate(Interval::ray(qi(0))),
        Case::Two => {
            if dq > plan.d {
                WeightInterval::Single(Interval::closed(plan.l1, plan.alpha0.unwrap()))
            } else {
                WeightInterval::Single(Interval::ray(plan.l1))
            }
        }
        Case::Three => WeightInterval::Single(Interval::closed(
            plan.alpha0.unwrap(),
            plan.l2.finite().unwrap(),
        )),
        Case::Four => {
            let first = case4_first_interval(plan);
            let second = case4_second_interval(plan, plan.l1);
            WeightInterval::Pair { first, second }
        }
    }
}

/// `[l1, l1+l2) ∩ (0, α₀]`.
pub fn case4_first_interval(plan: &WeightPlan) -> Interval {
    let outer = plan.l1 + plan.l2.finite().unwrap();
    let a0 = plan.alpha0.unwrap();
    if a0 < outer {
        Interval::closed(plan.l1, a0)
    } else {
        Interval {
            lo: plan.l1,
            lo_closed: true,
            hi: ExtRational::Finite(outer),
            hi_closed: false,
        }
    }
}

/// `[α₀ − l⁽¹⁾, l1 + l2 − l⁽¹⁾] ∩ (0, ∞)`.
pub fn case4_second_interval(plan: &WeightPlan, l_first: Rational) -> Interval {
    let lo = plan.alpha0.unwrap() - l_first;
    let hi = plan.l1 + plan.l2.finite().unwrap() - l_first;
    if lo.is_positive() {
        Interval::closed(lo, hi)
    } else {
        Interval {
            lo: qi(0),
            lo_closed: false,
            hi: ExtRational::Finite(hi),
            hi_closed: true,
        }
    }
}

/// Checks `l` against the defining inequalities, monomial by monomial.
/// For Case 4 this is membership in `I^1`.
pub fn validate_weight(l: Rational, plan: &WeightPlan, q: &Polynomial) -> bool {
    if !l.is_positive() {
        return false;
    }
    let (g, d, dq) = (plan.gamma, plan.d, plan.delta_q());
    let mono = q.exponents();
    match plan.case {
        Case::One | Case::Two => {
            g + l * d >= l * dq && mono.iter().all(|&(i, j)| g + l * d >= i + l * j)
        }
        Case::Three => {
            l * dq >= g + l * d && mono.iter().all(|&(i, j)| g + l * d >= i + l * j)
        }
        Case::Four => {
            let v = &plan.polygon.vertices;
            let lower_ok = v[..plan.k - 1].iter().all(|&(n, m)| g + l * d > n + l * m);
            let upper_ok = v[plan.k..].iter().all(|&(n, m)| g + l * d >= n + l * m);
            lower_ok
                && upper_ok
                && g + l * d >= l * dq
                && mono.iter().all(|&(i, j)| g + l * d >= i + l * j)
        }
    }
}

/// Case 4: membership of `l2'` in `I^2(l1')`.
pub fn validate_weight_pair(l_first: Rational, l_second: Rational, plan: &WeightPlan, q: &Polynomial) -> bool {
    if plan.case != Case::Four || !l_second.is_positive() {
        return false;
    }
    let dq = plan.delta_q();
    let tg = plan.gamma + l_first * plan.d - l_first * dq;
    l_second * dq >= tg + l_second * plan.d
        && q.exponents().iter().all(|&(i, j)| {
            let ti = i + l_first * j - l_first * dq;
            tg + l_second * plan.d >= ti + l_second * j
        })
}

/// `l1*` as the exact max of the lower bounds of the constraint system.
pub fn l1_star(delta: u32, q: &Polynomial, plan: &WeightPlan) -> Result<L1Star> {
    if !matches!(plan.case, Case::One | Case::Two) {
        return Err(Error::Misuse("l1* is defined for Cases 1 and 2 only".into()));
    }
    Ok(l1_star_points(delta, &q.exponents(), plan))
}

fn l1_star_points(delta: u32, monomials: &[(Rational, Rational)], plan: &WeightPlan) -> L1Star {
    let (g, d, dq) = (plan.gamma, plan.d, qi(delta as i128));
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    let mut infeasible = false;
    // each constraint reads  l * (d - j) >= i - g
    let mut add = |coef: Rational, rhs: Rational| {
        if coef.is_zero() {
            if rhs.is_positive() {
                infeasible = true;
            }
        } else if coef.is_positive() {
            let b = rhs / coef;
            lower = Some(lower.map_or(b, |x| max_q(x, b)));
        } else {
            let b = rhs / coef;
            upper = Some(upper.map_or(b, |x| min_q(x, b)));
        }
    };
    for &(i, j) in monomials {
        add(d - j, i - g);
    }
    add(d - dq, -g);
    if infeasible {
        return L1Star::Empty;
    }
    match (lower, upper) {
        (None, _) => L1Star::UnboundedBelow,
        (Some(lo), Some(hi)) if lo > hi => L1Star::Empty,
        (Some(lo), _) => L1Star::Value(lo),
    }
}

/// Lemma inequalities of the plan's case, for every monomial of q.
pub fn check_lemmas(plan: &WeightPlan, q: &Polynomial) -> bool {
    let (g, d, dq, l1) = (plan.gamma, plan.d, plan.delta_q(), plan.l1);
    let mono = q.exponents();
    match plan.case {
        Case::One => mono.iter().all(|&(i, j)| g >= i && d >= j),
        Case::Two => g + l1 * d >= l1 * dq && mono.iter().all(|&(i, j)| g + l1 * d >= i + l1 * j),
        Case::Three => {
            let l2 = plan.l2.finite().unwrap();
            l2 * dq >= g + l2 * d && mono.iter().all(|&(i, j)| g + l2 * d >= i + l2 * j)
        }
        Case::Four => {
            let l2 = plan.l2.finite().unwrap();
            let outer = l1 + l2;
            let tg = plan.tilde_gamma.unwrap();
            let td = plan.tilde_d.unwrap();
            outer * dq >= g + outer * d
                && g + l1 * d >= l1 * dq
                && mono.iter().all(|&(i, j)| {
                    let ti = i + l1 * j - l1 * dq;
                    let tj = ti / l2 + j;
                    g + l1 * d >= i + l1 * j && tg >= ti && td >= tj
                })
        }
    }
}

/// True if every exponent is integral (used by transform gates).
pub fn integral(x: &Rational) -> bool {
    is_integer(x)
}
