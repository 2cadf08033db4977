//! Expressions in s after r = (−1 + 6s² − s⁴)/(1 + s²)², and the named
//! polynomials read off from them.

use std::collections::BTreeMap;

use crate::ellfun::{eval_ij, eval_v, r_of_s_hp};
use crate::error::{Error, Result};
use crate::hp::HPReal;
use crate::poly::{QPoly, Radical};
use crate::qfield::Sqrt2Rational;

use super::frac::{sf, FracPoly, SBasis};
use super::{EllExpr, RFrac};

pub type SFrac = FracPoly<SBasis>;

/// Σ coefficient(s) · I^i J^j, radical-free.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SExpr {
    terms: BTreeMap<(u8, u8), SFrac>,
}

impl SExpr {
    pub fn terms(&self) -> &BTreeMap<(u8, u8), SFrac> {
        &self.terms
    }

    pub fn coeff(&self, i: u8, j: u8) -> Option<&SFrac> {
        self.terms.get(&(i, j))
    }

    pub fn eval_hp(&self, s: &HPReal) -> Result<HPReal> {
        let p = eval_ij(&r_of_s_hp(s))?;
        let mut acc = HPReal::zero(s.prec());
        for (&(i, j), c) in &self.terms {
            let t = &c.eval_hp(s) * &(&p.i.powi(i as i32) * &p.j.powi(j as i32));
            acc = &acc + &t;
        }
        Ok(acc)
    }

    fn add_term(&mut self, k: (u8, u8), c: SFrac) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&k) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(k, sum);
        }
    }
}

fn sq2(k: i64) -> Sqrt2Rational {
    Sqrt2Rational::from_ints(0, k)
}

/// Image of a radical: constant · Π s-factors.
fn radical_image(rad: Radical) -> SFrac {
    use sf::*;
    match rad {
        Radical::One => SFrac::from_int(1),
        Radical::U => SFrac::monomial(sq2(1), &[(ONE_MINUS_S, 1), (ONE_PLUS_S, 1), (ONE_PLUS_S2, -1)]),
        Radical::W => SFrac::monomial(sq2(2), &[(S, 1), (ONE_PLUS_S2, -1)]),
        Radical::UW => SFrac::monomial(
            Sqrt2Rational::from_int(4),
            &[(S, 1), (ONE_MINUS_S, 1), (ONE_PLUS_S, 1), (ONE_PLUS_S2, -2)],
        ),
    }
}

/// Image of r^a (1 − r)^b (1 + r)^c.
fn factor_image(exps: &[i32]) -> SFrac {
    use sf::*;
    let (a, b, c) = (exps[0], exps[1], exps[2]);
    let mut k = Sqrt2Rational::from_int(if a % 2 == 0 { 1 } else { -1 });
    let two = Sqrt2Rational::from_int(2);
    let eight = Sqrt2Rational::from_int(8);
    let pw = |x: &Sqrt2Rational, e: i32| {
        let p = x.pow(e.unsigned_abs());
        if e >= 0 {
            p
        } else {
            p.inv().expect("nonzero")
        }
    };
    k = &(&k * &pw(&two, b)) * &pw(&eight, c);
    SFrac::monomial(
        k,
        &[
            (S_MINUS_A, a),
            (S_PLUS_B, a),
            (S_MINUS_C, a),
            (S_MINUS_D, a),
            (ONE_MINUS_S, 2 * b),
            (ONE_PLUS_S, 2 * b),
            (S, 2 * c),
            (ONE_PLUS_S2, -2 * (a + b + c)),
        ],
    )
}

/// p(r(s)) as a factored rational function.
fn poly_image(p: &QPoly) -> SFrac {
    let Some(deg) = p.degree() else { return SFrac::zero() };
    let n = QPoly::from_ints(&[-1, 0, 6, 0, -1]);
    let d = QPoly::from_ints(&[1, 0, 2, 0, 1]);
    let mut acc = QPoly::zero();
    let mut npow = QPoly::one();
    for k in 0..=deg {
        let term = (&npow * &d.pow((deg - k) as u32)).scale(&p.coeff(k));
        acc = &acc + &term;
        npow = &npow * &n;
    }
    let mut exps = vec![0; 8];
    exps[sf::ONE_PLUS_S2] = -2 * deg as i32;
    SFrac::from_parts(acc, exps)
}

fn frac_image(c: &RFrac) -> SFrac {
    poly_image(c.num()).mul(&factor_image(c.exps()))
}

/// Push an expression through the substitution r = r(s).
pub fn to_s(e: &EllExpr) -> Result<SExpr> {
    let mut out = SExpr::default();
    for (m, c) in e.terms() {
        out.add_term((m.i, m.j), frac_image(c).mul(&radical_image(m.rad)));
    }
    Ok(out)
}

/// W = prefactor · Σ polys[k] · I^{d−k} J^k.
#[derive(Clone, Debug)]
pub struct ExtractedPolys {
    pub prefactor: SFrac,
    pub polys: Vec<QPoly>,
}

/// Splits a homogeneous SExpr of I,J-degree 1 or 2 into a common prefactor and
/// polynomial parts, scaled so the first polynomial takes the fixed value at
/// s = 0 (17(181 + 128√2) for degree 1, 21(99 + 70√2) for degree 2).
pub fn extract_polys(e: &SExpr) -> Result<ExtractedPolys> {
    let deg = match e.terms.keys().map(|(i, j)| i + j).max() {
        Some(d @ (1 | 2)) => d,
        other => return Err(Error::Structure(format!("I,J degree {other:?}, expected 1 or 2"))),
    };
    let keys: Vec<(u8, u8)> = (0..=deg).map(|k| (deg - k, k)).collect();
    if e.terms.keys().any(|k| !keys.contains(k)) {
        return Err(Error::Structure("expression is not homogeneous in I, J".into()));
    }
    let coeffs: Vec<SFrac> = keys.iter().map(|k| e.terms.get(k).cloned().unwrap_or_default()).collect();
    let nz: Vec<&SFrac> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    if nz.is_empty() {
        return Err(Error::Structure("expression vanishes identically".into()));
    }
    let nf = nz[0].exps().len();
    let lo: Vec<i32> = (0..nf).map(|j| nz.iter().map(|c| c.exp(j)).min().expect("nonempty")).collect();
    let mut polys: Vec<QPoly> = coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                return QPoly::zero();
            }
            let excess: Vec<i32> = c.exps().iter().zip(&lo).map(|(a, b)| a - b).collect();
            &SFrac::from_parts(QPoly::one(), excess).to_ratio().0 * c.num()
        })
        .collect();
    let mut g = QPoly::zero();
    for p in polys.iter().filter(|p| !p.is_zero()) {
        g = if g.is_zero() { p.monic()? } else { g.gcd(p) };
    }
    if !g.is_constant() {
        polys = polys.iter().map(|p| p.exact_div(&g)).collect::<Result<_>>()?;
    }
    let anchor = if deg == 1 { Sqrt2Rational::from_ints(17 * 181, 17 * 128) } else { Sqrt2Rational::from_ints(21 * 99, 21 * 70) };
    let at0 = polys[0].coeff(0);
    if at0.is_zero() {
        return Err(Error::Structure("first polynomial vanishes at s = 0".into()));
    }
    let lambda = anchor.checked_div(&at0)?;
    let polys: Vec<QPoly> = polys.iter().map(|p| p.scale(&lambda)).collect();
    let prefactor = SFrac::from_parts(g, lo).scale(&lambda.inv()?);
    Ok(ExtractedPolys { prefactor, polys })
}

/// 2s(s⁴ − 1)(1 − 6s² + s⁴).
fn riccati_den() -> QPoly {
    &QPoly::from_ints(&[0, -2, 0, 0, 0, 2]) * &QPoly::from_ints(&[1, 0, -6, 0, 1])
}

/// 16 s²(1 − s²)².
fn riccati_c() -> QPoly {
    QPoly::from_ints(&[0, 0, 16, 0, -32, 0, 16])
}

/// U = Z51/Z52 + v and the identity U′ = c0 + c1 U + c2 U².
#[derive(Clone, Debug)]
pub struct UIdentity {
    pub z51: QPoly,
    pub z52: QPoly,
    /// c0 = −36 (1 − 2s − s²)(1 + s²)³(1 + 2s − s²)³ Z̄ / Z52².
    pub c0: (QPoly, QPoly),
    pub c1: (QPoly, QPoly),
    pub c2: SFrac,
    pub zbar: QPoly,
}

impl UIdentity {
    pub fn u_with_v(&self, s: &HPReal, v: &HPReal) -> HPReal {
        &(&self.z51.eval_hp(s) / &self.z52.eval_hp(s)) + v
    }

    pub fn eval_u(&self, s: &HPReal) -> Result<HPReal> {
        Ok(self.u_with_v(s, &eval_v(s)?))
    }

    pub fn rhs(&self, s: &HPReal, u: &HPReal) -> HPReal {
        let c0 = &self.c0.0.eval_hp(s) / &self.c0.1.eval_hp(s);
        let c1 = &self.c1.0.eval_hp(s) / &self.c1.1.eval_hp(s);
        let c2 = self.c2.eval_hp(s);
        &(&c0 + &(&c1 * u)) + &(&c2 * &(u * u))
    }
}

/// Derives the Riccati-type identity for U from Z51, Z52 and the relation
/// v′ = (A − 2Cv + Cv²)/D with A = (1 + s²)⁴, C = 16 s²(1 − s²)².
pub fn build_u_du(z51: &QPoly, z52: &QPoly) -> Result<UIdentity> {
    let a = QPoly::from_ints(&[1, 0, 1]).pow(4);
    let c = riccati_c();
    let d = riccati_den();
    let wr = &(&z51.derivative() * z52) - &(z51 * &z52.derivative());
    let bracket = &(&(&wr * &d) + &(&a * &(z52 * z52))) + &(&(&c * &(z51 * z52)).scale(&Sqrt2Rational::from_int(2)) + &(&c * &(z51 * z51)));
    let side = &(&QPoly::from_ints(&[1, -2, -1]) * &QPoly::from_ints(&[1, 0, 1]).pow(3)) * &QPoly::from_ints(&[1, 2, -1]).pow(3);
    let divisor = (&d * &side).scale(&Sqrt2Rational::from_int(-36));
    let zbar = bracket.exact_div(&divisor)?;
    let c0 = (bracket, &d * &(z52 * z52));
    let c1 = ((&c * &(z51 + z52)).scale(&Sqrt2Rational::from_int(-2)), &d * z52);
    // c/D = −8(s − s³)/((1 + s²)(1 − 6s² + s⁴))
    let c2 = SFrac::from_poly(c.clone()).mul(&SFrac::from_parts(QPoly::constant(Sqrt2Rational::from_ratio(-1, 2)), vec![-1; 8]));
    Ok(UIdentity { z51: z51.clone(), z52: z52.clone(), c0, c1, c2, zbar })
}
