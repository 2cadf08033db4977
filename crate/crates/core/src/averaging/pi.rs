//! Polynomials in π with rational coefficients.

use std::fmt;

use rug::Rational;
use serde::{Serialize, Serializer};

use crate::hp::HPReal;

/// Σ cₙ πⁿ, trailing zeros trimmed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PiPoly(Vec<Rational>);

impl PiPoly {
    pub fn zero() -> PiPoly {
        PiPoly(Vec::new())
    }

    pub fn from_coeffs(mut c: Vec<Rational>) -> PiPoly {
        while c.last().is_some_and(|x| *x == 0) {
            c.pop();
        }
        PiPoly(c)
    }

    pub fn rational(q: impl Into<Rational>) -> PiPoly {
        PiPoly::from_coeffs(vec![q.into()])
    }

    pub fn ratio(n: i64, d: i64) -> PiPoly {
        PiPoly::rational(Rational::from((n, d)))
    }

    /// q·πⁿ.
    pub fn pi_term(q: impl Into<Rational>, n: usize) -> PiPoly {
        let mut c = vec![Rational::new(); n + 1];
        c[n] = q.into();
        PiPoly::from_coeffs(c)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    /// Coefficient of πⁿ.
    pub fn coeff(&self, n: usize) -> Rational {
        self.0.get(n).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest power of π present; None for zero.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn add(&self, o: &PiPoly) -> PiPoly {
        let n = self.0.len().max(o.0.len());
        PiPoly::from_coeffs((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &PiPoly) -> PiPoly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> PiPoly {
        PiPoly(self.0.iter().map(|x| Rational::from(-x)).collect())
    }

    pub fn mul(&self, o: &PiPoly) -> PiPoly {
        if self.is_zero() || o.is_zero() {
            return PiPoly::zero();
        }
        let mut c = vec![Rational::new(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += Rational::from(a * b);
            }
        }
        PiPoly::from_coeffs(c)
    }

    pub fn scale(&self, q: &Rational) -> PiPoly {
        PiPoly::from_coeffs(self.0.iter().map(|x| Rational::from(x * q)).collect())
    }

    pub fn eval_hp(&self, prec: u32) -> HPReal {
        let pi = HPReal::pi(prec);
        let mut acc = HPReal::zero(prec);
        for c in self.0.iter().rev() {
            acc = &(&acc * &pi) + &HPReal::from_rational(c, prec);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.eval_hp(128).to_f64()
    }
}

impl fmt::Display for PiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (n, c) in self.0.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let mag = Rational::from(c.abs_ref());
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                _ => {}
            }
            first = false;
            let pi = match n {
                0 => String::new(),
                1 => "pi".into(),
                _ => format!("pi^{n}"),
            };
            if n == 0 {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{pi}")?;
            } else {
                write!(f, "{mag}*{pi}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for PiPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Exact determinant by cofactor expansion, memoized over column subsets.
pub fn det(m: &[Vec<PiPoly>]) -> PiPoly {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "square matrix expected");
    if n == 0 {
        return PiPoly::rational(1);
    }
    // memo[mask] = minor of the last popcount(mask) rows on columns `mask`
    let mut memo: Vec<PiPoly> = vec![PiPoly::zero(); 1 << n];
    memo[0] = PiPoly::rational(1);
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = PiPoly::zero();
        let mut seen = 0;
        for c in 0..n {
            if mask & (1 << c) == 0 {
                continue;
            }
            let term = m[row][c].mul(&memo[mask & !(1 << c)]);
            acc = if seen % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            seen += 1;
        }
        memo[mask] = acc;
    }
    memo[(1 << n) - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let a = PiPoly::pi_term(Rational::from((-1, 2)), 1).add(&PiPoly::ratio(3, 4));
        assert_eq!(a.to_string(), "-1/2*pi + 3/4");
        assert_eq!(a.mul(&a).coeff(2), Rational::from((1, 4)));
        assert!(a.sub(&a).is_zero());
        assert!((a.to_f64() - (0.75 - std::f64::consts::FRAC_PI_2)).abs() < 1e-15);
    }

    #[test]
    fn det_small() {
        let q = |n| PiPoly::rational(n);
        let m = vec![vec![q(2), q(1), q(0)], vec![q(1), q(3), q(1)], vec![q(0), q(1), q(4)]];
        assert_eq!(det(&m), q(18));
        let p = vec![vec![PiPoly::pi_term(1, 1), q(1)], vec![q(1), PiPoly::pi_term(1, 1)]];
        assert_eq!(det(&p), PiPoly::from_coeffs(vec![Rational::from(-1), Rational::new(), Rational::from(1)]));
    }
}
