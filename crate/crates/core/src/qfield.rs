//! Exact arithmetic in the real quadratic field Q(√2).
//!
//! Elements are stored as a pair of GMP rationals `a + b·√2`. Both parts are
//! always canonical (rug normalizes after every operation), so equality is
//! structural and zero-testing is exact.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::hp::HPReal;

/// Sign of an exactly-known quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of_ordering(o: Ordering) -> Sign {
        match o {
            Ordering::Less => Sign::Negative,
            Ordering::Equal => Sign::Zero,
            Ordering::Greater => Sign::Positive,
        }
    }

    pub fn of_f64(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }
}

/// An element `rat + surd·√2` of Q(√2).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sqrt2Rational {
    rat: Rational,
    surd: Rational,
}

impl Sqrt2Rational {
    pub fn new(rat: impl Into<Rational>, surd: impl Into<Rational>) -> Self {
        Sqrt2Rational {
            rat: rat.into(),
            surd: surd.into(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Sqrt2Rational::new(Rational::from(n), Rational::new())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Sqrt2Rational::new(Rational::from((num, den)), Rational::new())
    }

    pub fn from_rational(q: Rational) -> Self {
        Sqrt2Rational::new(q, Rational::new())
    }

    /// The element √2.
    pub fn sqrt2() -> Self {
        Sqrt2Rational::new(Rational::new(), Rational::from(1))
    }

    /// `a + b√2` from integers.
    pub fn from_ints(a: i64, b: i64) -> Self {
        Sqrt2Rational::new(Rational::from(a), Rational::from(b))
    }

    pub fn rat(&self) -> &Rational {
        &self.rat
    }

    pub fn surd(&self) -> &Rational {
        &self.surd
    }

    pub fn into_parts(self) -> (Rational, Rational) {
        (self.rat, self.surd)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.cmp0() == Ordering::Equal && self.surd.cmp0() == Ordering::Equal
    }

    pub fn is_one(&self) -> bool {
        self.rat == 1 && self.surd.cmp0() == Ordering::Equal
    }

    pub fn is_rational(&self) -> bool {
        self.surd.cmp0() == Ordering::Equal
    }

    /// Galois conjugate `a − b√2`.
    pub fn conjugate(&self) -> Self {
        Sqrt2Rational::new(self.rat.clone(), Rational::from(-&self.surd))
    }

    /// Field norm `a² − 2b²`.
    pub fn norm(&self) -> Rational {
        let a2 = Rational::from(self.rat.square_ref());
        let b2 = Rational::from(self.surd.square_ref());
        a2 - b2 * 2u32
    }

    /// Exact sign of `a + b√2`, decided by comparing `a²` with `2b²`.
    pub fn sign(&self) -> Sign {
        let sa = Sign::of_ordering(self.rat.cmp0());
        let sb = Sign::of_ordering(self.surd.cmp0());
        match (sa, sb) {
            (Sign::Zero, s) | (s, Sign::Zero) => s,
            (a, b) if a == b => a,
            (a, _) => {
                let a2 = Rational::from(self.rat.square_ref());
                let b2 = Rational::from(self.surd.square_ref()) * 2u32;
                match a2.cmp(&b2) {
                    Ordering::Greater => a,
                    Ordering::Less => a.flip(),
                    Ordering::Equal => Sign::Zero,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Sign::Negative {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let c = self.conjugate();
        Ok(Sqrt2Rational::new(
            Rational::from(&c.rat / &n),
            Rational::from(&c.surd / &n),
        ))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        Sqrt2Rational::new(Rational::from(&self.rat * q), Rational::from(&self.surd * q))
    }

    pub fn div_rational(&self, q: &Rational) -> Result<Self> {
        if q.cmp0() == Ordering::Equal {
            return Err(Error::DivisionByZero);
        }
        Ok(Sqrt2Rational::new(Rational::from(&self.rat / q), Rational::from(&self.surd / q)))
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Sqrt2Rational::new(Rational::from(&self.rat * k), Rational::from(&self.surd * k))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Sqrt2Rational::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Least common multiple of the two denominators.
    pub fn denominator_lcm(&self) -> Integer {
        self.rat.denom().clone().lcm(self.surd.denom())
    }

    pub fn to_f64(&self) -> f64 {
        self.to_hp(128).to_f64()
    }

    pub fn to_hp(&self, prec: u32) -> HPReal {
        let a = HPReal::from_rational(&self.rat, prec);
        if self.surd.cmp0() == Ordering::Equal {
            return a;
        }
        let b = HPReal::from_rational(&self.surd, prec);
        a + b * HPReal::sqrt2(prec)
    }

    /// Text form `a_num/a_den + b_num/b_den*sqrt2`, used by fixture files.
    pub fn to_text(&self) -> String {
        format!(
            "{}/{} + {}/{}*sqrt2",
            self.rat.numer(),
            self.rat.denom(),
            self.surd.numer(),
            self.surd.denom()
        )
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    Rational::from_str(s).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

impl FromStr for Sqrt2Rational {
    type Err = Error;

    /// Accepts the fixture form `a + b*sqrt2`; a bare rational is also accepted.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let Some(body) = s.strip_suffix("*sqrt2") else {
            return Ok(Sqrt2Rational::from_rational(parse_rational(s)?));
        };
        // the separating '+' is the last one preceded by whitespace
        let split = body
            .rmatch_indices(" + ")
            .next()
            .ok_or_else(|| Error::Parse(format!("missing ' + ' in {s:?}")))?
            .0;
        let rat = parse_rational(&body[..split])?;
        let surd = parse_rational(&body[split + 3..])?;
        Ok(Sqrt2Rational::new(rat, surd))
    }
}

impl fmt::Display for Sqrt2Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.cmp0(), self.surd.cmp0()) {
            (_, Ordering::Equal) => write!(f, "{}", self.rat),
            (Ordering::Equal, _) => write!(f, "{}√2", self.surd),
            _ => write!(f, "({} + {}√2)", self.rat, self.surd),
        }
    }
}

impl PartialOrd for Sqrt2Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sqrt2Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        }
    }
}

impl From<i64> for Sqrt2Rational {
    fn from(n: i64) -> Self {
        Sqrt2Rational::from_int(n)
    }
}

impl From<Rational> for Sqrt2Rational {
    fn from(q: Rational) -> Self {
        Sqrt2Rational::from_rational(q)
    }
}

impl<'a> Add<&'a Sqrt2Rational> for &'a Sqrt2Rational {
    type Output = Sqrt2Rational;
    fn add(self, rhs: &'a Sqrt2Rational) -> Sqrt2Rational {
        Sqrt2Rational::new(
            Rational::from(&self.rat + &rhs.rat),
            Rational::from(&self.surd + &rhs.surd),
        )
    }
}

impl<'a> Sub<&'a Sqrt2Rational> for &'a Sqrt2Rational {
    type Output = Sqrt2Rational;
    fn sub(self, rhs: &'a Sqrt2Rational) -> Sqrt2Rational {
        Sqrt2Rational::new(
            Rational::from(&self.rat - &rhs.rat),
            Rational::from(&self.surd - &rhs.surd),
        )
    }
}

impl<'a> Mul<&'a Sqrt2Rational> for &'a Sqrt2Rational {
    type Output = Sqrt2Rational;
    fn mul(self, rhs: &'a Sqrt2Rational) -> Sqrt2Rational {
        if self.is_rational() && rhs.is_rational() {
            return Sqrt2Rational::from_rational(Rational::from(&self.rat * &rhs.rat));
        }
        // (a + b√2)(c + d√2) = (ac + 2bd) + (ad + bc)√2
        let ac = Rational::from(&self.rat * &rhs.rat);
        let bd = Rational::from(&self.surd * &rhs.surd);
        let ad = Rational::from(&self.rat * &rhs.surd);
        let bc = Rational::from(&self.surd * &rhs.rat);
        Sqrt2Rational::new(ac + bd * 2u32, ad + bc)
    }
}

impl Neg for &Sqrt2Rational {
    type Output = Sqrt2Rational;
    fn neg(self) -> Sqrt2Rational {
        Sqrt2Rational::new(Rational::from(-&self.rat), Rational::from(-&self.surd))
    }
}

impl Neg for Sqrt2Rational {
    type Output = Sqrt2Rational;
    fn neg(self) -> Sqrt2Rational {
        Sqrt2Rational::new(-self.rat, -self.surd)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Sqrt2Rational> for Sqrt2Rational {
            type Output = Sqrt2Rational;
            fn $m(self, rhs: Sqrt2Rational) -> Sqrt2Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Sqrt2Rational> for Sqrt2Rational {
            type Output = Sqrt2Rational;
            fn $m(self, rhs: &'a Sqrt2Rational) -> Sqrt2Rational {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Sqrt2Rational> for &'a Sqrt2Rational {
            type Output = Sqrt2Rational;
            fn $m(self, rhs: Sqrt2Rational) -> Sqrt2Rational {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Sqrt2Rational> for Sqrt2Rational {
    fn add_assign(&mut self, rhs: &Sqrt2Rational) {
        self.rat += &rhs.rat;
        self.surd += &rhs.surd;
    }
}

impl SubAssign<&Sqrt2Rational> for Sqrt2Rational {
    fn sub_assign(&mut self, rhs: &Sqrt2Rational) {
        self.rat -= &rhs.rat;
        self.surd -= &rhs.surd;
    }
}

impl MulAssign<&Sqrt2Rational> for Sqrt2Rational {
    fn mul_assign(&mut self, rhs: &Sqrt2Rational) {
        *self = &*self * rhs;
    }
}

impl Sum for Sqrt2Rational {
    fn sum<I: Iterator<Item = Sqrt2Rational>>(iter: I) -> Self {
        iter.fold(Sqrt2Rational::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl Product for Sqrt2Rational {
    fn product<I: Iterator<Item = Sqrt2Rational>>(iter: I) -> Self {
        iter.fold(Sqrt2Rational::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Sqrt2Rational {
        Sqrt2Rational::from_ints(a, b)
    }

    #[test]
    fn norm_identities() {
        assert_eq!(q(1, 1) * q(1, -1), q(-1, 0));
        assert_eq!(q(3, 2) * q(3, -2), Sqrt2Rational::one());
        let half_sqrt2 = Sqrt2Rational::new(0, Rational::from((1, 2)));
        assert_eq!(Sqrt2Rational::sqrt2().inv().unwrap(), half_sqrt2);
        assert_eq!(q(3, 2).norm(), 1);
    }

    #[test]
    fn signs() {
        assert_eq!(q(3, -2).sign(), Sign::Positive);
        assert_eq!(q(5, -4).sign(), Sign::Negative);
        assert_eq!(q(0, 0).sign(), Sign::Zero);
        assert_eq!(q(-3, 2).sign(), Sign::Negative);
        assert_eq!(q(-5, 4).sign(), Sign::Positive);
        assert_eq!(q(0, -1).sign(), Sign::Negative);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(q(1, 1).checked_div(&q(0, 0)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn text_round_trip() {
        let x = Sqrt2Rational::new(Rational::from((-7, 3)), Rational::from((5, 11)));
        let t = x.to_text();
        assert_eq!(t, "-7/3 + 5/11*sqrt2");
        assert_eq!(t.parse::<Sqrt2Rational>().unwrap(), x);
        let y = Sqrt2Rational::new(Rational::from((1, 2)), Rational::from((-3, 4)));
        assert_eq!(y.to_text().parse::<Sqrt2Rational>().unwrap(), y);
        assert_eq!("17".parse::<Sqrt2Rational>().unwrap(), q(17, 0));
    }
}
