//! Bivariate polynomials in (s, v) and resultants with respect to v.

use rayon::prelude::*;

use super::QPoly;
use crate::error::Result;
use crate::hp::HPReal;
use crate::qfield::Sqrt2Rational;

/// Polynomial in `v` whose coefficients are polynomials in `s`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QPoly2 {
    coeffs_in_v: Vec<QPoly>,
}

impl QPoly2 {
    pub fn new(mut coeffs_in_v: Vec<QPoly>) -> Self {
        while coeffs_in_v.last().is_some_and(QPoly::is_zero) {
            coeffs_in_v.pop();
        }
        QPoly2 { coeffs_in_v }
    }

    pub fn coeffs(&self) -> &[QPoly] {
        &self.coeffs_in_v
    }

    pub fn coeff(&self, k: usize) -> QPoly {
        self.coeffs_in_v.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs_in_v.is_empty()
    }

    pub fn degree_v(&self) -> Option<usize> {
        self.coeffs_in_v.len().checked_sub(1)
    }

    pub fn lc(&self) -> QPoly {
        self.coeffs_in_v.last().cloned().unwrap_or_default()
    }

    /// ∂/∂s.
    pub fn ds(&self) -> QPoly2 {
        QPoly2::new(self.coeffs_in_v.iter().map(QPoly::derivative).collect())
    }

    /// ∂/∂v.
    pub fn dv(&self) -> QPoly2 {
        QPoly2::new(
            self.coeffs_in_v
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&Sqrt2Rational::from_int(k as i64)))
                .collect(),
        )
    }

    pub fn add(&self, o: &QPoly2) -> QPoly2 {
        let n = self.coeffs_in_v.len().max(o.coeffs_in_v.len());
        QPoly2::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &QPoly2) -> QPoly2 {
        if self.is_zero() || o.is_zero() {
            return QPoly2::default();
        }
        let n = self.coeffs_in_v.len() + o.coeffs_in_v.len() - 1;
        let mut out = vec![QPoly::zero(); n];
        for (i, a) in self.coeffs_in_v.iter().enumerate() {
            for (j, b) in o.coeffs_in_v.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        QPoly2::new(out)
    }

    pub fn mul_s(&self, p: &QPoly) -> QPoly2 {
        QPoly2::new(self.coeffs_in_v.iter().map(|c| c * p).collect())
    }

    pub fn exact_div_s(&self, p: &QPoly) -> Result<QPoly2> {
        Ok(QPoly2::new(
            self.coeffs_in_v.iter().map(|c| c.exact_div(p)).collect::<Result<Vec<_>>>()?,
        ))
    }

    pub fn eval_hp(&self, s: &HPReal, v: &HPReal) -> HPReal {
        let mut acc = HPReal::zero(s.prec());
        for c in self.coeffs_in_v.iter().rev() {
            acc = &(&acc * v) + &c.eval_hp(s);
        }
        acc
    }

    pub fn eval_f64(&self, s: f64, v: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs_in_v.iter().rev() {
            acc = acc * v + c.eval_f64(s);
        }
        acc
    }

    /// Pseudo-remainder in `v` over the ring Q(√2)[s].
    fn prem(&self, b: &QPoly2) -> QPoly2 {
        let db = b.degree_v().expect("nonzero divisor");
        let Some(da) = self.degree_v() else {
            return QPoly2::default();
        };
        if da < db {
            return self.clone();
        }
        let lb = b.lc();
        let mut r = self.coeffs_in_v.clone();
        let mut e = da - db + 1;
        while r.len() > db {
            let top = r.len() - 1;
            let lr = r[top].clone();
            let off = top - db;
            let mut next: Vec<QPoly> = r.par_iter().map(|c| c * &lb).collect();
            let sub: Vec<QPoly> = b.coeffs_in_v.par_iter().map(|bj| &lr * bj).collect();
            for (j, t) in sub.into_iter().enumerate() {
                next[off + j] = &next[off + j] - &t;
            }
            next.pop();
            e -= 1;
            while next.last().is_some_and(QPoly::is_zero) {
                next.pop();
            }
            r = next;
        }
        let out = QPoly2::new(r);
        if e > 0 {
            out.mul_s(&lb.pow(e as u32))
        } else {
            out
        }
    }
}

/// Resultant with respect to `v`, Sylvester-determinant sign convention,
/// by the subresultant algorithm.
pub fn resultant_v(p: &QPoly2, q: &QPoly2) -> Result<QPoly> {
    if p.is_zero() || q.is_zero() {
        return Ok(QPoly::zero());
    }
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut sgn = false;
    if a.degree_v() < b.degree_v() {
        std::mem::swap(&mut a, &mut b);
        if a.degree_v().unwrap() % 2 == 1 && b.degree_v().unwrap() % 2 == 1 {
            sgn = true;
        }
    }
    if b.degree_v() == Some(0) {
        let r = b.lc().pow(a.degree_v().unwrap() as u32);
        return Ok(if sgn { -r } else { r });
    }
    let mut g = QPoly::one();
    let mut h = QPoly::one();
    loop {
        let (da, db) = (a.degree_v().unwrap(), b.degree_v().unwrap());
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            sgn = !sgn;
        }
        let r = a.prem(&b);
        if r.is_zero() {
            return Ok(QPoly::zero());
        }
        let beta = &g * &h.pow(delta);
        a = b;
        b = r.exact_div_s(&beta)?;
        g = a.lc();
        h = if delta == 0 {
            h
        } else if delta == 1 {
            g.clone()
        } else {
            g.pow(delta).exact_div(&h.pow(delta - 1))?
        };
        if b.degree_v() == Some(0) {
            let da = a.degree_v().unwrap() as u32;
            let res = if da == 0 {
                b.lc()
            } else {
                b.lc().pow(da).exact_div(&h.pow(da - 1))?
            };
            return Ok(if sgn { -res } else { res });
        }
    }
}

/// Resultant as the determinant of the Sylvester matrix, by fraction-free
/// Bareiss elimination over Q(√2)[s].
pub fn resultant_v_sylvester(p: &QPoly2, q: &QPoly2) -> Result<QPoly> {
    let (Some(m), Some(n)) = (p.degree_v(), q.degree_v()) else {
        return Ok(QPoly::zero());
    };
    let size = m + n;
    if size == 0 {
        return Ok(QPoly::one());
    }
    let mut a = vec![vec![QPoly::zero(); size]; size];
    for i in 0..n {
        for k in 0..=m {
            a[i][i + k] = p.coeff(m - k);
        }
    }
    for i in 0..m {
        for k in 0..=n {
            a[n + i][i + k] = q.coeff(n - k);
        }
    }
    bareiss_det(a)
}

/// Determinant of a square polynomial matrix by Bareiss elimination.
pub(crate) fn bareiss_det(mut a: Vec<Vec<QPoly>>) -> Result<QPoly> {
    let n = a.len();
    let mut neg = false;
    let mut prev = QPoly::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(piv) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(QPoly::zero());
            };
            a.swap(k, piv);
            neg = !neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = t.exact_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if neg { -d } else { d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_ints(c)
    }

    #[test]
    fn linear_pair() {
        // res(v − A, v − B) = g(A) = A − B in the Sylvester convention
        let a = p(&[1, 2, 0, 3]);
        let b = p(&[-4, 0, 1]);
        let pa = QPoly2::new(vec![-&a, QPoly::one()]);
        let pb = QPoly2::new(vec![-&b, QPoly::one()]);
        assert_eq!(resultant_v(&pa, &pb).unwrap(), &a - &b);
        assert_eq!(resultant_v_sylvester(&pa, &pb).unwrap(), &a - &b);
    }

    #[test]
    fn sylvester_convention() {
        // res(v² − s, v) = −s
        let pa = QPoly2::new(vec![-QPoly::x(), QPoly::zero(), QPoly::one()]);
        let pb = QPoly2::new(vec![QPoly::zero(), QPoly::one()]);
        assert_eq!(resultant_v(&pa, &pb).unwrap(), -QPoly::x());
        assert_eq!(resultant_v_sylvester(&pa, &pb).unwrap(), -QPoly::x());
        assert_eq!(resultant_v(&pb, &pa).unwrap(), -QPoly::x());
    }

    #[test]
    fn common_root_vanishes() {
        // both vanish at v = s
        let f = QPoly2::new(vec![-QPoly::x(), QPoly::one()]);
        let g1 = QPoly2::new(vec![p(&[1, 1]), p(&[0, 0, 1])]);
        let a = f.mul(&g1);
        let b = f.mul(&QPoly2::new(vec![p(&[3]), p(&[1, 1]), QPoly::one()]));
        assert!(resultant_v(&a, &b).unwrap().is_zero());
    }
}
