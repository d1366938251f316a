//! Sparse complex polynomials with exact exponents, skew products, and the
//! relative remainders ζ, η evaluated in logarithmic coordinates.

mod parse;

pub use parse::{parse_complex, parse_polynomial};

use crate::error::{Error, Result};
use crate::exact::{is_integer, qi, to_f64, Rational};
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub i: Rational,
    pub j: Rational,
    pub coeff: Complex64,
}

impl Monomial {
    pub fn new(i: Rational, j: Rational, coeff: Complex64) -> Self {
        Monomial { i, j, coeff }
    }

    pub fn int(i: i64, j: i64, coeff: Complex64) -> Self {
        Monomial::new(qi(i as i128), qi(j as i128), coeff)
    }
}

/// Sparse polynomial: terms sorted by `(i, j)`, no duplicates, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn new(terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut v: Vec<Monomial> = terms.into_iter().collect();
        v.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        let mut merged: Vec<Monomial> = Vec::with_capacity(v.len());
        for t in v {
            match merged.last_mut() {
                Some(last) if last.i == t.i && last.j == t.j => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != Complex64::zero());
        Polynomial { terms: merged }
    }

    /// Convenience constructor from `(i, j, real coefficient)` triples.
    pub fn from_int_terms(terms: &[(i64, i64, f64)]) -> Self {
        Polynomial::new(
            terms
                .iter()
                .map(|&(i, j, c)| Monomial::int(i, j, Complex64::new(c, 0.0))),
        )
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, i: Rational, j: Rational) -> Option<Complex64> {
        self.terms
            .iter()
            .find(|t| t.i == i && t.j == j)
            .map(|t| t.coeff)
    }

    pub fn exponents(&self) -> Vec<(Rational, Rational)> {
        self.terms.iter().map(|t| (t.i, t.j)).collect()
    }

    /// Max of `i + j` over the terms (0 for the empty polynomial).
    pub fn total_degree(&self) -> Rational {
        self.terms
            .iter()
            .map(|t| t.i + t.j)
            .max()
            .unwrap_or_else(|| qi(0))
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.terms
            .iter()
            .all(|t| is_integer(&t.i) && is_integer(&t.j) && !t.i.is_negative() && !t.j.is_negative())
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Polynomial::new(self.terms.iter().map(|t| Monomial::new(t.i, t.j, t.coeff * c)))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        Polynomial::new(self.terms.iter().chain(other.terms.iter()).cloned())
    }

    pub fn derivative_z(&self) -> Polynomial {
        Polynomial::new(
            self.terms
                .iter()
                .filter(|t| !t.i.is_zero())
                .map(|t| Monomial::new(t.i - qi(1), t.j, t.coeff * to_f64(&t.i))),
        )
    }

    pub fn derivative_w(&self) -> Polynomial {
        Polynomial::new(
            self.terms
                .iter()
                .filter(|t| !t.j.is_zero())
                .map(|t| Monomial::new(t.i, t.j - qi(1), t.coeff * to_f64(&t.j))),
        )
    }

    pub fn evaluate(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        let mut acc = Complex64::zero();
        for t in &self.terms {
            acc += t.coeff * power(z, &t.i, "z")? * power(w, &t.j, "w")?;
        }
        Ok(acc)
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)", t.coeff.re, t.coeff.im)?;
            if !t.i.is_zero() {
                write!(f, "*z^{}", t.i)?;
            }
            if !t.j.is_zero() {
                write!(f, "*w^{}", t.j)?;
            }
        }
        Ok(())
    }
}

/// `x^e`; principal branch for non-integer `e`.
fn power(x: Complex64, e: &Rational, name: &str) -> Result<Complex64> {
    if e.is_zero() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if is_integer(e) {
        let n = e.to_i32().ok_or_else(|| Error::Overflow(format!("exponent {e}")))?;
        if n < 0 && x == Complex64::zero() {
            return Err(Error::InvalidInput(format!("{name} = 0 with negative exponent {e}")));
        }
        return Ok(x.powi(n));
    }
    if x == Complex64::zero() {
        return if e.is_positive() {
            Ok(Complex64::zero())
        } else {
            Err(Error::InvalidInput(format!("{name} = 0 with negative exponent {e}")))
        };
    }
    if x.im == 0.0 && x.re < 0.0 {
        return Err(Error::BranchAmbiguity(format!(
            "{name} on the negative real axis with exponent {e}"
        )));
    }
    Ok((x.ln() * to_f64(e)).exp())
}

/// Point in the logarithmic lift: `z = exp(log_z)`, `w = exp(log_w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogPoint {
    pub log_z: Complex64,
    pub log_w: Complex64,
}

impl LogPoint {
    pub fn new(log_z: Complex64, log_w: Complex64) -> Self {
        LogPoint { log_z, log_w }
    }

    pub fn from_point(z: Complex64, w: Complex64) -> Result<Self> {
        if z == Complex64::zero() || w == Complex64::zero() {
            return Err(Error::InvalidInput("log lift needs z != 0 and w != 0".into()));
        }
        Ok(LogPoint::new(z.ln(), w.ln()))
    }

    pub fn to_point(&self) -> (Complex64, Complex64) {
        (self.log_z.exp(), self.log_w.exp())
    }
}

/// `f(z,w) = (p(z), q(z,w))` with `deg p >= 2`, `deg q >= 2`.
#[derive(Clone, Debug)]
pub struct SkewProduct {
    p: Polynomial,
    q: Polynomial,
    delta: u32,
    a_delta: Complex64,
    deg_q: u32,
}

impl SkewProduct {
    pub fn new(p: Polynomial, q: Polynomial) -> Result<Self> {
        if !p.has_integer_exponents() || !q.has_integer_exponents() {
            return Err(Error::InvalidInput(
                "exponents must be non-negative integers".into(),
            ));
        }
        if p.terms().iter().any(|t| !t.j.is_zero()) {
            return Err(Error::InvalidInput("p must not depend on w".into()));
        }
        let last = p
            .terms()
            .last()
            .ok_or_else(|| Error::InvalidInput("p is zero".into()))?;
        let delta = last.i.to_integer() as u32;
        if delta < 2 {
            return Err(Error::Hypothesis(format!("deg p = {delta}, need deg p >= 2")));
        }
        if q.is_empty() {
            return Err(Error::InvalidInput("q is zero".into()));
        }
        let deg_q = q.total_degree().to_integer() as u32;
        if deg_q < 2 {
            return Err(Error::Hypothesis(format!("deg q = {deg_q}, need deg q >= 2")));
        }
        if q.terms().iter().all(|t| t.j.is_zero()) {
            return Err(Error::InvalidInput("q has no monomial involving w".into()));
        }
        Ok(SkewProduct {
            a_delta: last.coeff,
            p,
            q,
            delta,
            deg_q,
        })
    }

    pub fn p(&self) -> &Polynomial {
        &self.p
    }

    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn a_delta(&self) -> Complex64 {
        self.a_delta
    }

    pub fn deg_q(&self) -> u32 {
        self.deg_q
    }

    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<(Complex64, Complex64)> {
        Ok((self.p.evaluate(z, w)?, self.q.evaluate(z, w)?))
    }

    /// True when `f` equals its own monomial model for the dominant `(gamma, d)`.
    pub fn is_monomial(&self) -> bool {
        self.p.len() == 1 && self.q.len() == 1
    }
}

#[derive(Clone, Debug)]
struct RemTerm {
    di: Rational,
    dj: Rational,
    log_c: Complex64,
}

/// Precomputed remainder tables for a fixed dominant term `b z^gamma w^d`.
///
/// ζ = p/(a z^δ) − 1 and η = q/(b z^γ w^d) − 1 are sums of
/// `exp(Δi·Z + Δj·W + log(c/lead))`, so nothing overflows for huge |z|, |w|.
#[derive(Clone, Debug)]
pub struct Remainders {
    zeta: Vec<RemTerm>,
    eta: Vec<RemTerm>,
    pub log_a: Complex64,
    pub log_b: Complex64,
    pub gamma: Rational,
    pub d: Rational,
}

impl Remainders {
    pub fn new(f: &SkewProduct, gamma: Rational, d: Rational) -> Result<Self> {
        let b = f.q().coeff(gamma, d).ok_or_else(|| {
            Error::InvalidInput(format!("q has no monomial z^{gamma} w^{d}"))
        })?;
        let delta = qi(f.delta() as i128);
        let log_a = f.a_delta().ln();
        let log_b = b.ln();
        let zeta = f
            .p()
            .terms()
            .iter()
            .filter(|t| t.i != delta)
            .map(|t| RemTerm {
                di: t.i - delta,
                dj: qi(0),
                log_c: t.coeff.ln() - log_a,
            })
            .collect();
        let eta = f
            .q()
            .terms()
            .iter()
            .filter(|t| !(t.i == gamma && t.j == d))
            .map(|t| RemTerm {
                di: t.i - gamma,
                dj: t.j - d,
                log_c: t.coeff.ln() - log_b,
            })
            .collect();
        Ok(Remainders {
            zeta,
            eta,
            log_a,
            log_b,
            gamma,
            d,
        })
    }

    pub fn zeta_terms(&self) -> impl Iterator<Item = (Rational, f64)> + '_ {
        self.zeta.iter().map(|t| (t.di, t.log_c.re.exp()))
    }

    pub fn eta_terms(&self) -> impl Iterator<Item = (Rational, Rational, f64)> + '_ {
        self.eta.iter().map(|t| (t.di, t.dj, t.log_c.re.exp()))
    }

    pub fn is_trivial(&self) -> bool {
        self.zeta.is_empty() && self.eta.is_empty()
    }

    pub fn zeta(&self, log_z: Complex64) -> Result<Complex64> {
        sum_terms(&self.zeta, log_z, Complex64::zero())
    }

    pub fn eta(&self, x: &LogPoint) -> Result<Complex64> {
        sum_terms(&self.eta, x.log_z, x.log_w)
    }

    pub fn eval(&self, x: &LogPoint) -> Result<(Complex64, Complex64)> {
        Ok((self.zeta(x.log_z)?, self.eta(x)?))
    }
}

fn sum_terms(terms: &[RemTerm], lz: Complex64, lw: Complex64) -> Result<Complex64> {
    let mut exps: Vec<Complex64> = terms
        .iter()
        .map(|t| lz * to_f64(&t.di) + lw * to_f64(&t.dj) + t.log_c)
        .collect();
    exps.sort_by(|a, b| b.re.total_cmp(&a.re));
    let mut acc = Complex64::zero();
    for e in exps {
        if e.re > 700.0 {
            return Err(Error::Overflow(format!("remainder term of size e^{}", e.re)));
        }
        acc += e.exp();
    }
    Ok(acc)
}

/// ζ and η at a lift point for the dominant term `(gamma, d)`.
pub fn relative_remainder(
    f: &SkewProduct,
    gamma: Rational,
    d: Rational,
    x: &LogPoint,
) -> Result<(Complex64, Complex64)> {
    Remainders::new(f, gamma, d)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn case2() -> SkewProduct {
        SkewProduct::new(
            Polynomial::from_int_terms(&[(3, 0, 1.0)]),
            Polynomial::from_int_terms(&[(3, 2, 1.0), (5, 0, 1.0)]),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let q = Polynomial::from_int_terms(&[(3, 2, 1.0), (5, 0, 1.0)]);
        assert_eq!(q.evaluate(c(1.0, 0.0), c(1.0, 0.0)).unwrap(), c(2.0, 0.0));
        let m = Polynomial::from_int_terms(&[(3, 2, 1.0)]);
        assert_eq!(m.evaluate(c(2.0, 0.0), c(3.0, 0.0)).unwrap(), c(72.0, 0.0));
        // term-by-term: 8*(2i)^2 + 32 = -32 + 32
        let direct = c(8.0, 0.0) * c(0.0, 2.0) * c(0.0, 2.0) + c(32.0, 0.0);
        assert_eq!(q.evaluate(c(2.0, 0.0), c(0.0, 2.0)).unwrap(), direct);
    }

    #[test]
    fn merge_and_drop_zero() {
        let p = Polynomial::from_int_terms(&[(1, 1, 2.0), (1, 1, -2.0), (0, 0, 1.0), (0, 0, 1.0)]);
        assert_eq!(p.len(), 1);
        assert_eq!(p.terms()[0].coeff, c(2.0, 0.0));
    }

    #[test]
    fn fractional_power_branch_cut() {
        let p = Polynomial::new([Monomial::new(crate::exact::q(1, 2), qi(0), c(1.0, 0.0))]);
        assert!(matches!(
            p.evaluate(c(-4.0, 0.0), c(1.0, 0.0)),
            Err(Error::BranchAmbiguity(_))
        ));
        let v = p.evaluate(c(4.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!((v - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn skew_product_rejections() {
        let p1 = Polynomial::from_int_terms(&[(1, 0, 1.0)]);
        let q2 = Polynomial::from_int_terms(&[(0, 2, 1.0)]);
        assert!(SkewProduct::new(p1, q2.clone()).is_err());
        let p2 = Polynomial::from_int_terms(&[(2, 0, 1.0)]);
        assert!(SkewProduct::new(p2.clone(), Polynomial::from_int_terms(&[(3, 0, 1.0)])).is_err());
        assert!(SkewProduct::new(p2.clone(), Polynomial::from_int_terms(&[(0, 1, 1.0)])).is_err());
        assert!(SkewProduct::new(p2, q2).is_ok());
    }

    #[test]
    fn remainder_examples() {
        let f = case2();
        let x = LogPoint::from_point(c(10.0, 0.0), c(100.0, 0.0)).unwrap();
        let (zeta, eta) = relative_remainder(&f, qi(3), qi(2), &x).unwrap();
        assert_eq!(zeta, Complex64::zero());
        assert!((eta - c(1e-2, 0.0)).norm() < 1e-16);

        let g = SkewProduct::new(
            Polynomial::from_int_terms(&[(3, 0, 1.0), (1, 0, 1.0)]),
            Polynomial::from_int_terms(&[(3, 2, 1.0)]),
        )
        .unwrap();
        let (zeta, eta) = relative_remainder(&g, qi(3), qi(2), &x).unwrap();
        assert!((zeta - c(1e-2, 0.0)).norm() < 1e-16);
        assert_eq!(eta, Complex64::zero());

        let m = SkewProduct::new(
            Polynomial::from_int_terms(&[(2, 0, 1.0)]),
            Polynomial::from_int_terms(&[(1, 2, 1.0)]),
        )
        .unwrap();
        assert_eq!(
            relative_remainder(&m, qi(1), qi(2), &x).unwrap(),
            (Complex64::zero(), Complex64::zero())
        );
    }

    #[test]
    fn remainder_survives_huge_moduli() {
        let f = case2();
        let x = LogPoint::new(c(1e8, 0.3), c(2e8, -1.0));
        let (_, eta) = relative_remainder(&f, qi(3), qi(2), &x).unwrap();
        assert_eq!(eta, Complex64::zero());
    }

    #[test]
    fn derivatives() {
        let q = Polynomial::from_int_terms(&[(3, 2, 1.0), (5, 0, 1.0)]);
        assert_eq!(q.derivative_w(), Polynomial::from_int_terms(&[(3, 1, 2.0)]));
        assert_eq!(
            q.derivative_z(),
            Polynomial::from_int_terms(&[(2, 2, 3.0), (4, 0, 5.0)])
        );
    }
}
