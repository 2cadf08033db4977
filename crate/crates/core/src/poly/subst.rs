//! The change of variable r = (−1 + 6s² − s⁴)/(1 + s²)².

use std::str::FromStr;

use super::QPoly;
use crate::error::{Error, Result};
use crate::qfield::Sqrt2Rational;

/// Radical multiplier allowed in a substituted expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radical {
    One,
    /// √(1 − r)
    U,
    /// √(1 + r)
    W,
    /// √(1 − r²)
    UW,
}

impl FromStr for Radical {
    type Err = Error;

    fn from_str(s: &str) -> Result<Radical> {
        match s.replace(' ', "").as_str() {
            "" | "1" => Ok(Radical::One),
            "sqrt(1-r)" | "u" => Ok(Radical::U),
            "sqrt(1+r)" | "w" => Ok(Radical::W),
            "sqrt(1-r^2)" | "uw" => Ok(Radical::UW),
            other => Err(Error::Unsupported(format!("radical {other:?}"))),
        }
    }
}

/// `num(s) / (1 + s²)^den_pow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstResult {
    pub num: QPoly,
    pub den_pow: u32,
}

impl SubstResult {
    pub fn eval_f64(&self, s: f64) -> f64 {
        self.num.eval_f64(s) / (1.0 + s * s).powi(self.den_pow as i32)
    }
}

/// Numerator and denominator of r(s).
pub fn r_of_s() -> (QPoly, QPoly) {
    (QPoly::from_ints(&[-1, 0, 6, 0, -1]), QPoly::from_ints(&[1, 0, 2, 0, 1]))
}

fn one_plus_s2() -> QPoly {
    QPoly::from_ints(&[1, 0, 1])
}

/// Substitutes r(s) into `p(r)·radical`, valid for s in (√2 − 1, 1).
pub fn substitute_rs(p: &QPoly, radical: Radical) -> SubstResult {
    let (n, d) = r_of_s();
    let deg = p.degree().unwrap_or(0);
    // Σ c_k n^k d^(deg−k)
    let mut num = QPoly::zero();
    for (k, c) in p.coeffs().iter().enumerate() {
        num = &num + &(&n.pow(k as u32) * &d.pow((deg - k) as u32)).scale(c);
    }
    let mut den_pow = 2 * deg as u32;
    let s2 = Sqrt2Rational::sqrt2();
    let rad = match radical {
        Radical::One => None,
        Radical::U => Some(QPoly::from_ints(&[1, 0, -1]).scale(&s2)),
        Radical::W => Some(QPoly::from_ints(&[0, 2]).scale(&s2)),
        Radical::UW => Some(QPoly::from_ints(&[0, 4, 0, -4])),
    };
    if let Some(r) = rad {
        num = &num * &r;
        den_pow += if radical == Radical::UW { 2 } else { 1 };
    }
    while den_pow > 0 && !num.is_zero() && one_plus_s2().divides(&num) {
        num = num.exact_div(&one_plus_s2()).expect("divides");
        den_pow -= 1;
    }
    SubstResult { num, den_pow }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_images() {
        let (n, d) = r_of_s();
        let one = Sqrt2Rational::one();
        assert_eq!(n.eval(&one).checked_div(&d.eval(&one)).unwrap(), one);
        assert!(n.eval(&Sqrt2Rational::from_ints(-1, 1)).is_zero());
    }

    #[test]
    fn radicals_square_back() {
        let half = Sqrt2Rational::from_ratio(1, 2);
        let w = substitute_rs(&QPoly::one(), Radical::W);
        let wv = w.num.eval(&half).checked_div(&(QPoly::from_ints(&[1, 0, 1]).pow(w.den_pow).eval(&half))).unwrap();
        assert_eq!(wv, Sqrt2Rational::new(0, rug::Rational::from((4, 5))));
        assert_eq!(&wv * &wv, Sqrt2Rational::from_ratio(32, 25));
        let u = substitute_rs(&QPoly::one(), Radical::U);
        let one_minus_r = substitute_rs(&QPoly::from_ints(&[1, -1]), Radical::One);
        assert_eq!(u.den_pow * 2, one_minus_r.den_pow);
        assert_eq!(&u.num * &u.num, one_minus_r.num);
        assert!("sqrt(r)".parse::<Radical>().is_err());
    }
}
