//! Arbitrary-precision reals backed by MPFR.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

/// A multiple-precision float. Binary operations use the larger precision of
/// the two operands.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct HPReal(pub Float);

impl HPReal {
    pub fn zero(prec: u32) -> Self {
        HPReal(Float::new(prec))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        HPReal(Float::with_val(prec, x))
    }

    pub fn from_i64(x: i64, prec: u32) -> Self {
        HPReal(Float::with_val(prec, x))
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        HPReal(Float::with_val(prec, q))
    }

    pub fn pi(prec: u32) -> Self {
        HPReal(Float::with_val(prec, Constant::Pi))
    }

    pub fn sqrt2(prec: u32) -> Self {
        HPReal(Float::with_val(prec, 2).sqrt())
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        HPReal(Float::with_val(prec, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn sqrt(&self) -> Self {
        HPReal(self.0.clone().sqrt())
    }

    pub fn ln(&self) -> Self {
        HPReal(self.0.clone().ln())
    }

    pub fn exp(&self) -> Self {
        HPReal(self.0.clone().exp())
    }

    pub fn abs(&self) -> Self {
        HPReal(self.0.clone().abs())
    }

    pub fn cos(&self) -> Self {
        HPReal(self.0.clone().cos())
    }

    pub fn sin(&self) -> Self {
        HPReal(self.0.clone().sin())
    }

    pub fn powi(&self, e: i32) -> Self {
        HPReal(Float::with_val(self.prec(), (&self.0).pow(e)))
    }

    pub fn recip(&self) -> Self {
        HPReal(self.0.clone().recip())
    }

    pub fn mul_f64(&self, k: f64) -> Self {
        HPReal(Float::with_val(self.prec(), &self.0 * k))
    }

    pub fn div_f64(&self, k: f64) -> Self {
        HPReal(Float::with_val(self.prec(), &self.0 / k))
    }

    pub fn add_f64(&self, k: f64) -> Self {
        HPReal(Float::with_val(self.prec(), &self.0 + k))
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for HPReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(20)))
    }
}

fn join_prec(a: &HPReal, b: &HPReal) -> u32 {
    a.prec().max(b.prec())
}

macro_rules! hp_binop {
    ($tr:ident, $m:ident) => {
        impl<'a> $tr<&'a HPReal> for &'a HPReal {
            type Output = HPReal;
            fn $m(self, rhs: &'a HPReal) -> HPReal {
                HPReal(Float::with_val(join_prec(self, rhs), (&self.0).$m(&rhs.0)))
            }
        }
        impl $tr<HPReal> for HPReal {
            type Output = HPReal;
            fn $m(self, rhs: HPReal) -> HPReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a HPReal> for HPReal {
            type Output = HPReal;
            fn $m(self, rhs: &'a HPReal) -> HPReal {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<HPReal> for &'a HPReal {
            type Output = HPReal;
            fn $m(self, rhs: HPReal) -> HPReal {
                self.$m(&rhs)
            }
        }
    };
}

hp_binop!(Add, add);
hp_binop!(Sub, sub);
hp_binop!(Mul, mul);
hp_binop!(Div, div);

impl Neg for HPReal {
    type Output = HPReal;
    fn neg(self) -> HPReal {
        HPReal(-self.0)
    }
}

impl Neg for &HPReal {
    type Output = HPReal;
    fn neg(self) -> HPReal {
        HPReal(Float::with_val(self.prec(), -&self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_propagates() {
        let a = HPReal::from_f64(1.0, 64);
        let b = HPReal::sqrt2(256);
        assert_eq!((&a + &b).prec(), 256);
        let two = &b * &b;
        assert!((two.to_f64() - 2.0).abs() < 1e-60);
        assert!(((HPReal::pi(200).to_f64()) - std::f64::consts::PI).abs() < 1e-15);
    }
}
