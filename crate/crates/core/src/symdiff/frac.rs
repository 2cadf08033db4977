//! Rational functions with a factored denominator over a fixed factor basis.

use std::fmt;
use std::marker::PhantomData;
use std::sync::OnceLock;

use crate::hp::HPReal;
use crate::poly::QPoly;
use crate::qfield::{Sign, Sqrt2Rational};

/// One basis factor.
#[derive(Clone, Debug)]
pub struct Factor {
    pub name: &'static str,
    pub poly: QPoly,
    /// Root, when the factor is linear.
    pub root: Option<Sqrt2Rational>,
}

impl Factor {
    fn linear(name: &'static str, root: Sqrt2Rational, lead: i64) -> Factor {
        // lead·(x − root)
        let poly = QPoly::linear_root(&root).scale(&Sqrt2Rational::from_int(lead));
        Factor { name, poly, root: Some(root) }
    }

    fn other(name: &'static str, poly: QPoly) -> Factor {
        Factor { name, poly, root: None }
    }

    fn divides(&self, p: &QPoly) -> bool {
        match &self.root {
            Some(a) => p.eval(a).is_zero(),
            None => self.poly.divides(p),
        }
    }
}

/// A fixed list of coprime factors.
pub trait FactorSet: Clone + fmt::Debug + Default + PartialEq + Eq + Send + Sync + 'static {
    fn factors() -> &'static [Factor];
}

/// Factors r, 1 − r, 1 + r.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RBasis;

impl FactorSet for RBasis {
    fn factors() -> &'static [Factor] {
        static F: OnceLock<Vec<Factor>> = OnceLock::new();
        F.get_or_init(|| {
            vec![
                Factor::linear("r", Sqrt2Rational::zero(), 1),
                Factor::linear("(1-r)", Sqrt2Rational::one(), -1),
                Factor::linear("(1+r)", Sqrt2Rational::from_int(-1), 1),
            ]
        })
    }
}

/// Indices into [`SBasis`].
pub mod sf {
    pub const S: usize = 0;
    pub const ONE_MINUS_S: usize = 1;
    pub const ONE_PLUS_S: usize = 2;
    pub const ONE_PLUS_S2: usize = 3;
    /// s − (√2 − 1)
    pub const S_MINUS_A: usize = 4;
    /// s + √2 + 1
    pub const S_PLUS_B: usize = 5;
    /// s − (1 + √2)
    pub const S_MINUS_C: usize = 6;
    /// s − (1 − √2)
    pub const S_MINUS_D: usize = 7;
}

/// Factors of the s-domain denominators, irreducible over Q(√2).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SBasis;

impl FactorSet for SBasis {
    fn factors() -> &'static [Factor] {
        static F: OnceLock<Vec<Factor>> = OnceLock::new();
        F.get_or_init(|| {
            vec![
                Factor::linear("s", Sqrt2Rational::zero(), 1),
                Factor::linear("(1-s)", Sqrt2Rational::one(), -1),
                Factor::linear("(1+s)", Sqrt2Rational::from_int(-1), 1),
                Factor::other("(1+s^2)", QPoly::from_ints(&[1, 0, 1])),
                Factor::linear("(s-sqrt2+1)", Sqrt2Rational::from_ints(-1, 1), 1),
                Factor::linear("(s+sqrt2+1)", Sqrt2Rational::from_ints(-1, -1), 1),
                Factor::linear("(s-sqrt2-1)", Sqrt2Rational::from_ints(1, 1), 1),
                Factor::linear("(s+sqrt2-1)", Sqrt2Rational::from_ints(1, -1), 1),
            ]
        })
    }
}

/// `num · Π factorⱼ^expⱼ` with integer exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracPoly<F: FactorSet> {
    num: QPoly,
    exps: Vec<i32>,
    _f: PhantomData<F>,
}

impl<F: FactorSet> Default for FracPoly<F> {
    fn default() -> Self {
        FracPoly::zero()
    }
}

impl<F: FactorSet> FracPoly<F> {
    fn n() -> usize {
        F::factors().len()
    }

    pub fn zero() -> Self {
        FracPoly { num: QPoly::zero(), exps: vec![0; Self::n()], _f: PhantomData }
    }

    pub fn from_poly(p: QPoly) -> Self {
        FracPoly { num: p, exps: vec![0; Self::n()], _f: PhantomData }.normalized()
    }

    pub fn constant(c: Sqrt2Rational) -> Self {
        Self::from_poly(QPoly::constant(c))
    }

    pub fn from_int(k: i64) -> Self {
        Self::constant(Sqrt2Rational::from_int(k))
    }

    /// `c · Π factorⱼ^expⱼ`.
    pub fn monomial(c: Sqrt2Rational, exps: &[(usize, i32)]) -> Self {
        let mut e = vec![0; Self::n()];
        for &(j, k) in exps {
            e[j] += k;
        }
        FracPoly { num: QPoly::constant(c), exps: e, _f: PhantomData }.normalized()
    }

    pub fn from_parts(num: QPoly, exps: Vec<i32>) -> Self {
        assert_eq!(exps.len(), Self::n());
        FracPoly { num, exps, _f: PhantomData }.normalized()
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn exps(&self) -> &[i32] {
        &self.exps
    }

    pub fn exp(&self, j: usize) -> i32 {
        self.exps[j]
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Moves every basis factor dividing the numerator into the exponents.
    fn normalized(mut self) -> Self {
        if self.num.is_zero() {
            self.exps.iter_mut().for_each(|e| *e = 0);
            return self;
        }
        for (j, f) in F::factors().iter().enumerate() {
            while !self.num.is_constant() && f.divides(&self.num) {
                self.num = self.num.exact_div(&f.poly).expect("factor divides");
                self.exps[j] += 1;
            }
        }
        self
    }

    fn factor_power(j: usize, e: u32) -> QPoly {
        F::factors()[j].poly.pow(e)
    }

    /// Numerator after raising every exponent to at least `target`.
    fn lifted_num(&self, target: &[i32]) -> QPoly {
        let mut p = self.num.clone();
        for (j, (&e, &t)) in self.exps.iter().zip(target).enumerate() {
            if e > t {
                p = &p * &Self::factor_power(j, (e - t) as u32);
            }
        }
        p
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let lo: Vec<i32> = self.exps.iter().zip(&o.exps).map(|(a, b)| *a.min(b)).collect();
        let num = &self.lifted_num(&lo) + &o.lifted_num(&lo);
        FracPoly { num, exps: lo, _f: PhantomData }.normalized()
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        FracPoly { num: -&self.num, exps: self.exps.clone(), _f: PhantomData }
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let exps = self.exps.iter().zip(&o.exps).map(|(a, b)| a + b).collect();
        let num = &self.num * &o.num;
        // a product of two normalized numerators stays normalized
        FracPoly { num, exps, _f: PhantomData }
    }

    pub fn scale(&self, c: &Sqrt2Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        FracPoly { num: self.num.scale(c), exps: self.exps.clone(), _f: PhantomData }
    }

    pub fn mul_factor(&self, j: usize, e: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = self.clone();
        out.exps[j] += e;
        out
    }

    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let active: Vec<usize> = (0..Self::n()).filter(|&j| self.exps[j] != 0).collect();
        let facs = F::factors();
        let l = active.iter().fold(QPoly::one(), |acc, &j| &acc * &facs[j].poly);
        let mut num = &self.num.derivative() * &l;
        for &j in &active {
            let rest = active
                .iter()
                .filter(|&&k| k != j)
                .fold(QPoly::one(), |acc, &k| &acc * &facs[k].poly);
            let term = &(&self.num * &facs[j].poly.derivative()) * &rest;
            num = &num + &term.scale(&Sqrt2Rational::from_int(self.exps[j] as i64));
        }
        let mut exps = self.exps.clone();
        for &j in &active {
            exps[j] -= 1;
        }
        FracPoly { num, exps, _f: PhantomData }.normalized()
    }

    pub fn eval_hp(&self, x: &HPReal) -> HPReal {
        let mut v = self.num.eval_hp(x);
        for (j, &e) in self.exps.iter().enumerate() {
            if e != 0 {
                v = &v * &F::factors()[j].poly.eval_hp(x).powi(e);
            }
        }
        v
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut v = self.num.eval_f64(x);
        for (j, &e) in self.exps.iter().enumerate() {
            if e != 0 {
                v *= F::factors()[j].poly.eval_f64(x).powi(e);
            }
        }
        v
    }

    pub fn eval(&self, x: &Sqrt2Rational) -> crate::error::Result<Sqrt2Rational> {
        let mut v = self.num.eval(x);
        for (j, &e) in self.exps.iter().enumerate() {
            let fx = F::factors()[j].poly.eval(x);
            let p = fx.pow(e.unsigned_abs());
            v = if e >= 0 { &v * &p } else { v.checked_div(&p)? };
        }
        Ok(v)
    }

    /// Splits off the factored part: `self = prefactor · numerator`.
    pub fn factored_part(&self) -> FracPoly<F> {
        FracPoly { num: QPoly::one(), exps: self.exps.clone(), _f: PhantomData }
    }

    /// Sign of the factored part on an interval avoiding every factor root,
    /// sampled at one point `x` of that interval.
    pub fn factored_sign_at(&self, x: &Sqrt2Rational) -> Sign {
        let mut s = Sign::Positive;
        for (j, &e) in self.exps.iter().enumerate() {
            if e % 2 != 0 {
                s = s.times(F::factors()[j].poly.sign_at(x));
            }
        }
        s
    }

    /// Expands into `numerator / denominator` polynomials.
    pub fn to_ratio(&self) -> (QPoly, QPoly) {
        let mut num = self.num.clone();
        let mut den = QPoly::one();
        for (j, &e) in self.exps.iter().enumerate() {
            let p = Self::factor_power(j, e.unsigned_abs());
            if e > 0 {
                num = &num * &p;
            } else if e < 0 {
                den = &den * &p;
            }
        }
        (num, den)
    }
}

impl<F: FactorSet> fmt::Display for FracPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.num)?;
        for (j, &e) in self.exps.iter().enumerate() {
            if e != 0 {
                write!(f, "·{}^{}", F::factors()[j].name, e)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type RF = FracPoly<RBasis>;

    #[test]
    fn normalization_strips_factors() {
        // r(1 − r²) = r·(1 − r)·(1 + r)
        let f = RF::from_poly(QPoly::from_ints(&[0, 1, 0, -1]));
        assert!(f.num().is_constant());
        assert_eq!(f.exps(), &[1, 1, 1]);
    }

    #[test]
    fn sum_and_derivative() {
        // 1/r + 1/(1 − r) = 1/(r(1 − r))
        let a = RF::monomial(Sqrt2Rational::one(), &[(0, -1)]);
        let b = RF::monomial(Sqrt2Rational::one(), &[(1, -1)]);
        let c = a.add(&b);
        assert_eq!(c, RF::monomial(Sqrt2Rational::one(), &[(0, -1), (1, -1)]));
        // d/dr r⁻² = −2 r⁻³
        let d = RF::monomial(Sqrt2Rational::one(), &[(0, -2)]).derivative();
        assert_eq!(d, RF::monomial(Sqrt2Rational::from_int(-2), &[(0, -3)]));
        let x = HPReal::from_f64(0.3, 128);
        let h = 1e-20;
        let fd = (c.eval_f64(0.3 + 1e-6) - c.eval_f64(0.3 - 1e-6)) / 2e-6;
        assert!((c.derivative().eval_hp(&x).to_f64() - fd).abs() < 1e-6);
        let _ = h;
    }
}
