//! Extended-precision complex arithmetic on top of astro-float.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;

pub const EXT_BITS: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

/// Floating point precision of numeric evaluations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" => Ok(Precision::Double),
            "extended" => Ok(Precision::Extended),
            _ => Err(format!("unknown precision '{s}' (expected double or extended)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExtComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

/// Working precision plus the constant cache astro-float needs for
/// transcendental functions.
pub struct ExtCtx {
    p: usize,
    cc: Consts,
}

impl ExtCtx {
    pub fn new(bits: usize) -> Self {
        ExtCtx {
            p: bits,
            cc: Consts::new().expect("astro-float constant cache"),
        }
    }

    pub fn real(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.p)
    }

    pub fn c(&self, z: Complex64) -> ExtComplex {
        ExtComplex {
            re: self.real(z.re),
            im: self.real(z.im),
        }
    }

    pub fn zero(&self) -> ExtComplex {
        self.c(Complex64::new(0.0, 0.0))
    }

    pub fn add(&self, a: &ExtComplex, b: &ExtComplex) -> ExtComplex {
        ExtComplex {
            re: a.re.add(&b.re, self.p, RM),
            im: a.im.add(&b.im, self.p, RM),
        }
    }

    pub fn sub(&self, a: &ExtComplex, b: &ExtComplex) -> ExtComplex {
        ExtComplex {
            re: a.re.sub(&b.re, self.p, RM),
            im: a.im.sub(&b.im, self.p, RM),
        }
    }

    pub fn mul(&self, a: &ExtComplex, b: &ExtComplex) -> ExtComplex {
        let p = self.p;
        ExtComplex {
            re: a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM),
            im: a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM),
        }
    }

    pub fn scale(&self, a: &ExtComplex, s: &BigFloat) -> ExtComplex {
        ExtComplex {
            re: a.re.mul(s, self.p, RM),
            im: a.im.mul(s, self.p, RM),
        }
    }

    pub fn div(&self, a: &ExtComplex, b: &ExtComplex) -> ExtComplex {
        let p = self.p;
        let den = b.re.mul(&b.re, p, RM).add(&b.im.mul(&b.im, p, RM), p, RM);
        let conj = ExtComplex {
            re: b.re.clone(),
            im: b.im.neg(),
        };
        let num = self.mul(a, &conj);
        ExtComplex {
            re: num.re.div(&den, p, RM),
            im: num.im.div(&den, p, RM),
        }
    }

    pub fn norm(&self, a: &ExtComplex) -> BigFloat {
        let p = self.p;
        a.re.mul(&a.re, p, RM).add(&a.im.mul(&a.im, p, RM), p, RM).sqrt(p, RM)
    }

    pub fn atan2(&mut self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let p = self.p;
        let pi = self.cc.pi(p, RM);
        if x.is_zero() {
            let half = pi.div(&self.real(2.0), p, RM);
            return if y.is_negative() { half.neg() } else { half };
        }
        let t = y.div(x, p, RM).atan(p, RM, &mut self.cc);
        if x.is_positive() {
            t
        } else if y.is_negative() {
            t.sub(&pi, p, RM)
        } else {
            t.add(&pi, p, RM)
        }
    }

    /// Principal logarithm.
    pub fn ln(&mut self, a: &ExtComplex) -> ExtComplex {
        let n = self.norm(a);
        ExtComplex {
            re: n.ln(self.p, RM, &mut self.cc),
            im: self.atan2(&a.im, &a.re),
        }
    }

    pub fn exp(&mut self, a: &ExtComplex) -> ExtComplex {
        let p = self.p;
        let m = a.re.exp(p, RM, &mut self.cc);
        ExtComplex {
            re: m.mul(&a.im.cos(p, RM, &mut self.cc), p, RM),
            im: m.mul(&a.im.sin(p, RM, &mut self.cc), p, RM),
        }
    }

    pub fn to_c64(&self, a: &ExtComplex) -> Complex64 {
        Complex64::new(to_f64(&a.re), to_f64(&a.im))
    }
}

/// Nearest double (via the decimal representation).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_transcendentals() {
        let mut ctx = ExtCtx::new(EXT_BITS);
        for z in [
            Complex64::new(1.5, -2.25),
            Complex64::new(-3.0, 0.5),
            Complex64::new(-0.75, -4.0),
            Complex64::new(1e-30, 7e40),
        ] {
            let e = ctx.c(z);
            assert_eq!(ctx.to_c64(&e), z);
            let l = ctx.ln(&e);
            assert!((ctx.to_c64(&l) - z.ln()).norm() < 1e-14 * z.ln().norm());
        }
        let z = Complex64::new(0.3, 2.0);
        let e = ctx.c(z);
        let x = ctx.exp(&e);
        assert!((ctx.to_c64(&x) - z.exp()).norm() < 1e-15);
        let q = ctx.div(&ctx.mul(&e, &e), &e);
        assert!((ctx.to_c64(&q) - z).norm() < 1e-16);
    }
}
