//! Univariate polynomials over Q(√2).

mod fixture;
mod resultant;
mod sturm;
mod subst;
pub(crate) mod zring;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Rational;

use crate::error::{Error, Result};
use crate::hp::HPReal;
use crate::qfield::{Sign, Sqrt2Rational};
use zring::ZPoly;

pub use fixture::{parse_fixture, write_fixture};
pub use resultant::{resultant_v, resultant_v_sylvester, QPoly2};
pub use sturm::{isolate_roots, refine_root, sturm_count, RootInterval, SturmSequence};
pub use subst::{r_of_s, substitute_rs, Radical, SubstResult};

/// Dense polynomial over Q(√2), coefficients in ascending degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Sqrt2Rational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Sqrt2Rational>) -> Self {
        while coeffs.last().is_some_and(Sqrt2Rational::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly::default()
    }

    pub fn one() -> Self {
        QPoly::constant(Sqrt2Rational::one())
    }

    pub fn constant(c: Sqrt2Rational) -> Self {
        QPoly::new(vec![c])
    }

    /// The variable itself.
    pub fn x() -> Self {
        QPoly::new(vec![Sqrt2Rational::zero(), Sqrt2Rational::one()])
    }

    pub fn monomial(c: Sqrt2Rational, k: usize) -> Self {
        let mut v = vec![Sqrt2Rational::zero(); k];
        v.push(c);
        QPoly::new(v)
    }

    /// Polynomial with integer coefficients, ascending.
    pub fn from_ints(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&x| Sqrt2Rational::from_int(x)).collect())
    }

    /// `x − a`.
    pub fn linear_root(a: &Sqrt2Rational) -> Self {
        QPoly::new(vec![-a, Sqrt2Rational::one()])
    }

    pub fn coeffs(&self) -> &[Sqrt2Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Sqrt2Rational> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Sqrt2Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> Sqrt2Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &Sqrt2Rational) -> Sqrt2Rational {
        let mut acc = Sqrt2Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    /// Exact sign of `p(x)` without forming rational intermediates.
    pub fn sign_at(&self, x: &Sqrt2Rational) -> Sign {
        let (z, _) = ZPoly::from_coeffs(&self.coeffs);
        let (pa, pb, q) = zring::point_parts(x);
        z.sign_at(&pa, &pb, &q)
    }

    pub fn eval_hp(&self, x: &HPReal) -> HPReal {
        let prec = x.prec();
        let mut acc = HPReal::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &c.to_hp(prec);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64();
        }
        acc
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul_int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Sqrt2Rational) -> QPoly {
        if k.is_zero() {
            return QPoly::zero();
        }
        QPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn scale_rational(&self, k: &Rational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c.mul_rational(k)).collect())
    }

    pub fn conjugate(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(Sqrt2Rational::conjugate).collect())
    }

    pub fn pow(&self, e: u32) -> QPoly {
        let mut acc = QPoly::one();
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

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut v = vec![Sqrt2Rational::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        QPoly::new(v)
    }

    /// `p(q(x))`.
    pub fn compose(&self, q: &QPoly) -> QPoly {
        let mut acc = QPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * q) + &QPoly::constant(c.clone());
        }
        acc
    }

    pub fn monic(&self) -> Result<QPoly> {
        let lc = self.lc();
        if lc.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.scale(&lc.inv()?))
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn div_rem(&self, d: &QPoly) -> Result<(QPoly, QPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let Some(dn) = self.degree() else {
            return Ok((QPoly::zero(), QPoly::zero()));
        };
        if dn < dd {
            return Ok((QPoly::zero(), self.clone()));
        }
        let inv = d.lc().inv()?;
        let mut r = self.coeffs.clone();
        let mut q = vec![Sqrt2Rational::zero(); dn - dd + 1];
        for k in (0..=dn - dd).rev() {
            let c = &r[k + dd] * &inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                let t = &c * dj;
                r[k + j] -= &t;
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((QPoly::new(q), QPoly::new(r)))
    }

    /// Quotient of an exact division; a nonzero remainder is a structural error.
    pub fn exact_div(&self, d: &QPoly) -> Result<QPoly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::Structure("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn divides(&self, p: &QPoly) -> bool {
        matches!(p.div_rem(self), Ok((_, r)) if r.is_zero())
    }

    /// Monic gcd; the gcd of two zero polynomials is zero.
    pub fn gcd(&self, other: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic().unwrap_or_default();
        }
        a.monic().unwrap_or_default()
    }

    /// `p / gcd(p, p′)`.
    pub fn squarefree_part(&self) -> Result<QPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if self.is_constant() {
            return Ok(self.clone());
        }
        let g = sturm::gcd_with_derivative(self);
        self.exact_div(&g)
    }

    /// Multiplicity of the root `a`.
    pub fn root_multiplicity(&self, a: &Sqrt2Rational) -> usize {
        let lin = QPoly::linear_root(a);
        let mut p = self.clone();
        let mut m = 0;
        while !p.is_zero() && p.eval(a).is_zero() {
            p = p.exact_div(&lin).expect("root divides");
            m += 1;
        }
        m
    }

    /// Sum of absolute values of coefficients after rounding to f64.
    pub fn l1_norm_f64(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().abs()).sum()
    }

    pub(crate) fn to_zpoly(&self) -> ZPoly {
        ZPoly::from_coeffs(&self.coeffs).0
    }

    fn mul_dense(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let mut out = vec![Sqrt2Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        QPoly::new(out)
    }

    fn mul_cleared(&self, o: &QPoly) -> QPoly {
        let (za, da) = ZPoly::from_coeffs(&self.coeffs);
        let (zb, db) = ZPoly::from_coeffs(&o.coeffs);
        QPoly::new(za.mul(&zb).to_coeffs(&(da * db)))
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·x")?,
                _ => write!(f, "{c}·x^{k}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a QPoly> for &'a QPoly {
    type Output = QPoly;
    fn add(self, o: &'a QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a QPoly> for &'a QPoly {
    type Output = QPoly;
    fn sub(self, o: &'a QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a QPoly> for &'a QPoly {
    type Output = QPoly;
    fn mul(self, o: &'a QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        if self.coeffs.len().min(o.coeffs.len()) <= 4 {
            self.mul_dense(o)
        } else {
            self.mul_cleared(o)
        }
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<QPoly> for QPoly {
            type Output = QPoly;
            fn $m(self, o: QPoly) -> QPoly {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QPoly> for QPoly {
            type Output = QPoly;
            fn $m(self, o: &'a QPoly) -> QPoly {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<QPoly> for &'a QPoly {
            type Output = QPoly;
            fn $m(self, o: QPoly) -> QPoly {
                self.$m(&o)
            }
        }
    };
}

forward_poly!(Add, add);
forward_poly!(Sub, sub);
forward_poly!(Mul, mul);

impl Neg for QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_ints(c)
    }

    #[test]
    fn product_degree_adds() {
        let a = p(&[1, 2, 3, 4, 5, 6]);
        let b = QPoly::new(vec![Sqrt2Rational::from_ints(1, 1), Sqrt2Rational::from_ints(0, 3), Sqrt2Rational::from_ratio(1, 7)]);
        let c = &a * &b;
        assert_eq!(c.degree(), Some(7));
        assert_eq!(c, a.mul_dense(&b));
    }

    #[test]
    fn division_round_trip() {
        let a = p(&[3, -1, 4, 1, -5, 9, 2]);
        let d = QPoly::new(vec![Sqrt2Rational::from_ints(1, -1), Sqrt2Rational::from_ratio(2, 3)]);
        let (q, r) = a.div_rem(&d).unwrap();
        assert_eq!(&(&q * &d) + &r, a);
        assert!(r.degree().unwrap_or(0) < 1);
        assert!(matches!(a.div_rem(&QPoly::zero()), Err(Error::DivisionByZero)));
    }

    #[test]
    fn squarefree_examples() {
        // (s−1)²(s+2)
        let a = &p(&[-1, 1]).pow(2) * &p(&[2, 1]);
        let sf = a.squarefree_part().unwrap().monic().unwrap();
        assert_eq!(sf, &p(&[-1, 1]) * &p(&[2, 1]));
        let s3 = p(&[0, 0, 0, 1]).squarefree_part().unwrap().monic().unwrap();
        assert_eq!(s3, QPoly::x());
    }

    #[test]
    fn gcd_over_surds() {
        let r = QPoly::linear_root(&Sqrt2Rational::from_ints(-1, 1));
        let a = &r * &p(&[1, 0, 1]);
        let b = &r * &p(&[5, 1]);
        assert_eq!(a.gcd(&b), r);
        assert_eq!(a.root_multiplicity(&Sqrt2Rational::from_ints(-1, 1)), 1);
    }
}
