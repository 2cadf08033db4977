//! Differential algebra over Q(√2)(r) with u = √(1 − r), w = √(1 + r) and the
//! elliptic functions I, J adjoined, plus the push-forward to the s-variable.

mod frac;
mod sexpr;

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::ellfun::{eval_ij, EllPair};
use crate::error::{Error, Result};
use crate::hp::HPReal;
use crate::poly::{QPoly, Radical};
use crate::qfield::Sqrt2Rational;

pub use frac::{sf, Factor, FactorSet, FracPoly, RBasis, SBasis};
pub use sexpr::{build_u_du, extract_polys, to_s, ExtractedPolys, SExpr, UIdentity};

/// Coefficient type: rational function in r with denominator over r, 1 − r, 1 + r.
pub type RFrac = FracPoly<RBasis>;

const R: usize = 0;
const ONE_MINUS_R: usize = 1;
const ONE_PLUS_R: usize = 2;

/// Index of a monomial rad · I^i · J^j.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub rad: Radical,
    pub i: u8,
    pub j: u8,
}

impl Mono {
    pub const ONE: Mono = Mono { rad: Radical::One, i: 0, j: 0 };

    pub fn new(rad: Radical, i: u8, j: u8) -> Mono {
        Mono { rad, i, j }
    }

    pub fn ij_degree(&self) -> u8 {
        self.i + self.j
    }
}

fn rfrac(c: i64, exps: &[(usize, i32)]) -> RFrac {
    RFrac::monomial(Sqrt2Rational::from_int(c), exps)
}

fn rfrac_q(n: i64, d: i64, exps: &[(usize, i32)]) -> RFrac {
    RFrac::monomial(Sqrt2Rational::from_ratio(n, d), exps)
}

/// Product of two radicals as (rational factor, radical).
fn rad_mul(a: Radical, b: Radical) -> (RFrac, Radical) {
    use Radical::*;
    match (a, b) {
        (One, x) | (x, One) => (RFrac::from_int(1), x),
        (U, U) => (rfrac(1, &[(ONE_MINUS_R, 1)]), One),
        (W, W) => (rfrac(1, &[(ONE_PLUS_R, 1)]), One),
        (U, W) | (W, U) => (RFrac::from_int(1), UW),
        (U, UW) | (UW, U) => (rfrac(1, &[(ONE_MINUS_R, 1)]), W),
        (W, UW) | (UW, W) => (rfrac(1, &[(ONE_PLUS_R, 1)]), U),
        (UW, UW) => (rfrac(1, &[(ONE_MINUS_R, 1), (ONE_PLUS_R, 1)]), One),
    }
}

/// Logarithmic derivative of a radical.
fn rad_log_derivative(a: Radical) -> RFrac {
    match a {
        Radical::One => RFrac::zero(),
        Radical::U => rfrac_q(-1, 2, &[(ONE_MINUS_R, -1)]),
        Radical::W => rfrac_q(1, 2, &[(ONE_PLUS_R, -1)]),
        Radical::UW => rfrac(-1, &[(R, 1), (ONE_MINUS_R, -1), (ONE_PLUS_R, -1)]),
    }
}

/// Element of the algebra: Σ coefficient · monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EllExpr {
    terms: BTreeMap<Mono, RFrac>,
}

impl EllExpr {
    pub fn zero() -> Self {
        EllExpr::default()
    }

    pub fn term(m: Mono, c: RFrac) -> Self {
        let mut e = EllExpr::zero();
        e.add_term(m, c);
        e
    }

    pub fn from_frac(c: RFrac) -> Self {
        EllExpr::term(Mono::ONE, c)
    }

    pub fn from_poly(p: QPoly) -> Self {
        EllExpr::from_frac(RFrac::from_poly(p))
    }

    pub fn constant(k: i64) -> Self {
        EllExpr::from_frac(RFrac::from_int(k))
    }

    pub fn r() -> Self {
        EllExpr::from_poly(QPoly::x())
    }

    pub fn u() -> Self {
        EllExpr::term(Mono::new(Radical::U, 0, 0), RFrac::from_int(1))
    }

    pub fn w() -> Self {
        EllExpr::term(Mono::new(Radical::W, 0, 0), RFrac::from_int(1))
    }

    pub fn i() -> Self {
        EllExpr::term(Mono::new(Radical::One, 1, 0), RFrac::from_int(1))
    }

    pub fn j() -> Self {
        EllExpr::term(Mono::new(Radical::One, 0, 1), RFrac::from_int(1))
    }

    pub fn terms(&self) -> &BTreeMap<Mono, RFrac> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total I, J degree present.
    pub fn ij_degree(&self) -> Option<u8> {
        self.terms.keys().map(Mono::ij_degree).max()
    }

    fn add_term(&mut self, m: Mono, c: RFrac) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&m) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        EllExpr { terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect() }
    }

    pub fn scale(&self, c: &RFrac) -> Self {
        let mut out = EllExpr::zero();
        for (m, x) in &self.terms {
            out.add_term(*m, x.mul(c));
        }
        out
    }

    /// Product; fails when the I, J degree would exceed 2.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        let mut out = EllExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let (i, j) = (ma.i + mb.i, ma.j + mb.j);
                if i + j > 2 {
                    return Err(Error::Unsupported(format!("I,J degree {} exceeds 2", i + j)));
                }
                let (k, rad) = rad_mul(ma.rad, mb.rad);
                out.add_term(Mono::new(rad, i, j), ca.mul(cb).mul(&k));
            }
        }
        Ok(out)
    }

    pub fn differentiate(&self) -> Self {
        // I′ = (I − J)/(2r), J′ = (I − (1 − r²)J)/(2r(1 − r²))
        let di = [
            ((1u8, 0u8), rfrac_q(1, 2, &[(R, -1)])),
            ((0, 1), rfrac_q(-1, 2, &[(R, -1)])),
        ];
        let dj = [
            ((1u8, 0u8), rfrac_q(1, 2, &[(R, -1), (ONE_MINUS_R, -1), (ONE_PLUS_R, -1)])),
            ((0, 1), rfrac_q(-1, 2, &[(R, -1)])),
        ];
        let mut out = EllExpr::zero();
        for (m, c) in &self.terms {
            let own = c.derivative().add(&c.mul(&rad_log_derivative(m.rad)));
            out.add_term(*m, own);
            if m.i > 0 {
                let k = c.scale(&Sqrt2Rational::from_int(m.i as i64));
                for ((a, b), d) in &di {
                    out.add_term(Mono::new(m.rad, m.i - 1 + a, m.j + b), k.mul(d));
                }
            }
            if m.j > 0 {
                let k = c.scale(&Sqrt2Rational::from_int(m.j as i64));
                for ((a, b), d) in &dj {
                    out.add_term(Mono::new(m.rad, m.i + a, m.j - 1 + b), k.mul(d));
                }
            }
        }
        out
    }

    pub fn eval_with(&self, p: &EllPair) -> HPReal {
        let r = &p.r;
        let one = HPReal::from_i64(1, r.prec());
        let u = (&one - r).sqrt();
        let w = (&one + r).sqrt();
        let mut acc = HPReal::zero(r.prec());
        for (m, c) in &self.terms {
            let rad = match m.rad {
                Radical::One => one.clone(),
                Radical::U => u.clone(),
                Radical::W => w.clone(),
                Radical::UW => &u * &w,
            };
            let t = &(&c.eval_hp(r) * &rad) * &(&p.i.powi(m.i as i32) * &p.j.powi(m.j as i32));
            acc = &acc + &t;
        }
        acc
    }

    pub fn eval_hp(&self, r: &HPReal) -> Result<HPReal> {
        Ok(self.eval_with(&eval_ij(r)?))
    }

    pub fn eval_f64(&self, r: f64) -> Result<f64> {
        Ok(self.eval_hp(&HPReal::from_f64(r, 128))?.to_f64())
    }
}

impl fmt::Display for EllExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}·{:?}·I^{}·J^{}", m.rad, m.i, m.j)?;
        }
        Ok(())
    }
}

/// Polynomial in r with a radical attached.
fn rad_poly(rad: Radical, c: &[i64]) -> EllExpr {
    EllExpr::term(Mono::new(rad, 0, 0), RFrac::from_poly(QPoly::from_ints(c)))
}

fn ij_poly(i: u8, j: u8, c: &[i64]) -> EllExpr {
    EllExpr::term(Mono::new(Radical::One, i, j), RFrac::from_poly(QPoly::from_ints(c)))
}

/// The basis g1, …, g6.
pub fn g_basis() -> Vec<EllExpr> {
    let g3 = EllExpr::constant(6)
        .add(&rad_poly(Radical::U, &[-3, 4, -1]))
        .add(&rad_poly(Radical::W, &[-3, -4, -1]));
    let g4 = EllExpr::constant(-4)
        .add(&rad_poly(Radical::U, &[2, -5, 2, 1]))
        .add(&rad_poly(Radical::W, &[2, 5, 2, -1]));
    let g5 = ij_poly(1, 0, &[0, -5, 0, 1]).add(&ij_poly(0, 1, &[0, 1, 0, -1]));
    let g6 = ij_poly(1, 0, &[0, 4]).add(&ij_poly(0, 1, &[0, -1, 0, 1]));
    vec![
        EllExpr::r(),
        EllExpr::from_poly(QPoly::from_ints(&[0, 0, 1])),
        g3,
        g4,
        g5,
        g6,
    ]
}

/// Basis with g6 replaced by g5, for which every W6 vanishes.
pub fn degenerate_basis() -> Vec<EllExpr> {
    let mut b = g_basis();
    b[5] = b[4].clone();
    b
}

/// W_order: determinant of the first `order` functions and their derivatives
/// up to order − 1.
pub fn wronskian(basis: &[EllExpr], order: usize) -> Result<EllExpr> {
    if order == 0 || order > basis.len() {
        return Err(Error::Structure(format!("wronskian order {order} with {} functions", basis.len())));
    }
    // rows[k][c] = c-th function differentiated k times
    let cols: Vec<Vec<EllExpr>> = basis[..order]
        .par_iter()
        .map(|g| {
            let mut v = vec![g.clone()];
            for _ in 1..order {
                let d = v.last().expect("nonempty").differentiate();
                v.push(d);
            }
            v
        })
        .collect();
    let n = order;
    let mut dp: Vec<Option<EllExpr>> = vec![None; 1 << n];
    dp[0] = Some(EllExpr::constant(1));
    for mask in 0usize..(1 << n) {
        let Some(cur) = dp[mask].take() else { continue };
        if mask == (1 << n) - 1 {
            return Ok(cur);
        }
        let row = mask.count_ones() as usize;
        for c in 0..n {
            if mask & (1 << c) != 0 {
                continue;
            }
            let entry = &cols[c][row];
            if entry.is_zero() {
                continue;
            }
            let mut t = cur.mul(entry)?;
            if (mask >> (c + 1)).count_ones() % 2 == 1 {
                t = t.neg();
            }
            let next = mask | (1 << c);
            dp[next] = Some(match dp[next].take() {
                Some(x) => x.add(&t),
                None => t,
            });
        }
    }
    Ok(EllExpr::zero())
}

/// W1, …, W6 of the g-basis.
pub fn all_wronskians() -> Result<Vec<EllExpr>> {
    let b = g_basis();
    (1..=6).into_par_iter().map(|k| wronskian(&b, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(x: f64) -> HPReal {
        HPReal::from_f64(x, 160)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn derivative_of_i_matches_finite_difference() {
        let d = EllExpr::i().differentiate();
        let r = hp(0.5);
        let h = HPReal::from_f64(1e-15, 160);
        let fd = &(&eval_ij(&(&r + &h)).unwrap().i - &eval_ij(&(&r - &h)).unwrap().i) / &h.mul_f64(2.0);
        assert!((&d.eval_hp(&r).unwrap() - &fd).abs().to_f64() < 1e-20);
    }

    #[test]
    fn radicals_square_back() {
        let s = EllExpr::u().mul(&EllExpr::u()).unwrap().add(&EllExpr::w().mul(&EllExpr::w()).unwrap());
        assert_eq!(s, EllExpr::constant(2));
        assert!(s.differentiate().is_zero());
        let uw = EllExpr::u().mul(&EllExpr::w()).unwrap();
        let sq = uw.mul(&uw).unwrap();
        assert_eq!(sq, EllExpr::from_poly(QPoly::from_ints(&[1, 0, -1])));
    }

    #[test]
    fn degree_overflow_is_an_error() {
        let i2 = EllExpr::i().mul(&EllExpr::j()).unwrap();
        assert!(i2.mul(&EllExpr::i()).is_err());
    }

    #[test]
    fn low_order_wronskians() {
        let b = g_basis();
        assert_eq!(wronskian(&b, 1).unwrap(), EllExpr::r());
        assert_eq!(wronskian(&b, 2).unwrap(), EllExpr::from_poly(QPoly::from_ints(&[0, 0, 1])));
        assert!(wronskian(&degenerate_basis(), 6).unwrap().is_zero());
    }

    #[test]
    fn wronskian_shapes() {
        let w = all_wronskians().unwrap();
        assert_eq!(w[2].ij_degree(), Some(0));
        assert_eq!(w[3].ij_degree(), Some(0));
        // every radical may appear; the I, J monomials are fixed
        let ij = |e: &EllExpr| e.terms().keys().map(|m| (m.i, m.j)).collect::<std::collections::BTreeSet<_>>();
        assert_eq!(ij(&w[4]), [(0, 1), (1, 0)].into());
        assert_eq!(ij(&w[5]), [(0, 2), (1, 1), (2, 0)].into());
    }

    #[test]
    fn w5_prefactor() {
        // W5 = 15/(64 r³ (1 − r²)^{7/2}) (W51 I + W52 J) with polynomial W51, W52
        let w5 = wronskian(&g_basis(), 5).unwrap();
        let k = rfrac_q(64, 15, &[(R, 3), (ONE_MINUS_R, 4), (ONE_PLUS_R, 4)]);
        for c in w5.scale(&k).terms().values() {
            assert!(c.exps().iter().all(|&e| e >= 0), "{c}");
        }
    }

    #[test]
    fn g_values_are_consistent() {
        // g3 and g4 vanish to second order at r = 0
        let b = g_basis();
        for g in &b[2..4] {
            let v = g.eval_f64(1e-3).unwrap();
            assert!(v.abs() < 1e-5, "{v}");
        }
        let p = eval_ij(&hp(0.4)).unwrap();
        let g5 = b[4].eval_with(&p).to_f64();
        let (r, i, j) = (0.4, p.i.to_f64(), p.j.to_f64());
        assert!(rel(g5, r * ((-5.0 + r * r) * i + (1.0 - r * r) * j)) < 1e-14);
    }
}
