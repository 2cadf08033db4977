//! Sturm sequences and real root isolation.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use super::zring::{point_parts, ZPoly, Zs2};
use super::QPoly;
use crate::error::{Error, Result};
use crate::qfield::{Sign, Sqrt2Rational};

/// Signed subresultant sequence of `p, p′`.
///
/// Element `i` equals `signs[i]` times a positive multiple of the i-th Sturm
/// polynomial, so sign variations agree with the classical sequence.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    polys: Vec<ZPoly>,
    signs: Vec<Sign>,
}

impl SturmSequence {
    pub fn new(p: &QPoly) -> Result<SturmSequence> {
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let a = p.to_zpoly();
        let b = a.derivative();
        if b.is_zero() {
            return Ok(SturmSequence { polys: vec![a], signs: vec![Sign::Positive] });
        }
        let mut polys = vec![a, b];
        let mut signs = vec![Sign::Positive, Sign::Positive];
        let mut g = Zs2::one();
        let mut h = Zs2::one();
        loop {
            let n = polys.len();
            let (pa, pb) = (&polys[n - 2], &polys[n - 1]);
            if pb.degree() == 0 {
                break;
            }
            let delta = (pa.degree() - pb.degree()) as u32;
            let r = pa.prem(pb);
            if r.is_zero() {
                break;
            }
            let beta = g.mul(&h.pow(delta));
            let next = r.div_exact_scalar(&beta);
            let lb = pb.lc().sign();
            let lb_pow = if (delta + 1) % 2 == 0 { Sign::Positive } else { lb };
            let sgn = signs[n - 2].times(lb_pow).times(beta.sign()).flip();
            g = pb.lc().clone();
            h = if delta == 1 {
                g.clone()
            } else {
                g.pow(delta).div_exact(&h.pow(delta - 1))
            };
            polys.push(next);
            signs.push(sgn);
        }
        Ok(SturmSequence { polys, signs })
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Degree of `gcd(p, p′)`.
    pub fn gcd_degree(&self) -> usize {
        if self.polys.len() == 1 {
            return 0;
        }
        self.polys.last().map_or(0, ZPoly::degree)
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd_degree() == 0
    }

    pub(crate) fn last(&self) -> &ZPoly {
        self.polys.last().expect("nonempty")
    }

    /// Sign variations at `x`; `x` must not be a root of `p`.
    pub fn variations(&self, x: &Sqrt2Rational) -> usize {
        let (pa, pb, q) = point_parts(x);
        let mut count = 0;
        let mut prev = Sign::Zero;
        for (p, s) in self.polys.iter().zip(&self.signs) {
            let v = p.sign_at(&pa, &pb, &q).times(*s);
            if v == Sign::Zero {
                continue;
            }
            if prev != Sign::Zero && v != prev {
                count += 1;
            }
            prev = v;
        }
        count
    }

    pub fn sign_of_p(&self, x: &Sqrt2Rational) -> Sign {
        let (pa, pb, q) = point_parts(x);
        self.polys[0].sign_at(&pa, &pb, &q)
    }

    /// Distinct roots in the open interval, both endpoints non-roots.
    pub fn count_between(&self, lo: &Sqrt2Rational, hi: &Sqrt2Rational) -> usize {
        self.variations(lo) - self.variations(hi)
    }
}

pub(crate) fn gcd_with_derivative(p: &QPoly) -> QPoly {
    let seq = SturmSequence::new(p).expect("nonzero");
    if seq.len() == 1 || seq.gcd_degree() == 0 {
        return QPoly::one();
    }
    QPoly::new(seq.last().to_coeffs(&Integer::from(1))).monic().expect("nonzero")
}

fn check_interval(lo: &Sqrt2Rational, hi: &Sqrt2Rational) -> Result<()> {
    if lo >= hi {
        return Err(Error::InvalidInterval(format!("({lo}, {hi})")));
    }
    Ok(())
}

/// Removes every root located exactly at `lo` or `hi`.
fn strip_endpoint_roots(p: &QPoly, lo: &Sqrt2Rational, hi: &Sqrt2Rational) -> QPoly {
    let mut q = p.clone();
    for a in [lo, hi] {
        let lin = QPoly::linear_root(a);
        while q.sign_at(a) == Sign::Zero {
            q = q.exact_div(&lin).expect("endpoint root divides");
        }
    }
    q
}

/// Number of distinct real roots of `p` in the open interval `(lo, hi)`.
pub fn sturm_count(p: &QPoly, lo: &Sqrt2Rational, hi: &Sqrt2Rational) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    check_interval(lo, hi)?;
    let q = strip_endpoint_roots(p, lo, hi);
    if q.is_constant() {
        return Ok(0);
    }
    Ok(SturmSequence::new(&q)?.count_between(lo, hi))
}

/// An interval holding exactly one root when `multiplicity_one` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootInterval {
    #[serde(with = "text")]
    pub lo: Sqrt2Rational,
    #[serde(with = "text")]
    pub hi: Sqrt2Rational,
    pub multiplicity_one: bool,
}

impl RootInterval {
    pub fn width(&self) -> Sqrt2Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        0.5 * (self.lo.to_f64() + self.hi.to_f64())
    }
}

mod text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::qfield::Sqrt2Rational;

    pub fn serialize<S: Serializer>(x: &Sqrt2Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_text())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Sqrt2Rational, D::Error> {
        let t = String::deserialize(d)?;
        t.parse().map_err(serde::de::Error::custom)
    }
}

/// A rational split point inside `(lo, hi)` that is not a root of `p`.
fn split_point(seq: &SturmSequence, lo: &Sqrt2Rational, hi: &Sqrt2Rational) -> Sqrt2Rational {
    let mid = rational_between(lo, hi);
    if seq.sign_of_p(&mid) != Sign::Zero {
        return mid;
    }
    let mut k = 3i64;
    loop {
        let w = &(hi - lo) * &Sqrt2Rational::from_ratio(1, k);
        let c = &mid + &w;
        if seq.sign_of_p(&c) != Sign::Zero {
            return c;
        }
        k += 1;
    }
}

/// A short rational strictly between two distinct field elements.
pub(crate) fn rational_between(lo: &Sqrt2Rational, hi: &Sqrt2Rational) -> Sqrt2Rational {
    if lo.is_rational() && hi.is_rational() {
        return Sqrt2Rational::from_rational(Rational::from(lo.rat() + hi.rat()) / 2u32);
    }
    let (a, b) = (lo.to_f64(), hi.to_f64());
    let mut den = 2u64;
    loop {
        let m = ((a + b) / 2.0 * den as f64).round() as i64;
        let cand = Sqrt2Rational::from_ratio(m, den as i64);
        if &cand > lo && &cand < hi {
            return cand;
        }
        if den > 1 << 60 {
            let mid = &(lo + hi) * &Sqrt2Rational::from_ratio(1, 2);
            return mid;
        }
        den *= 2;
    }
}

/// Isolating intervals for the distinct roots of a square-free `p` in `(lo, hi)`.
pub fn isolate_roots(p: &QPoly, lo: &Sqrt2Rational, hi: &Sqrt2Rational) -> Result<Vec<RootInterval>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    check_interval(lo, hi)?;
    let q = strip_endpoint_roots(p, lo, hi);
    if q.is_constant() {
        return Ok(Vec::new());
    }
    let seq = SturmSequence::new(&q)?;
    if !seq.is_squarefree() {
        return Err(Error::NotSquareFree);
    }
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone(), seq.variations(lo), seq.variations(hi))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let n = va - vb;
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(RootInterval { lo: a, hi: b, multiplicity_one: true });
            continue;
        }
        let m = split_point(&seq, &a, &b);
        let vm = seq.variations(&m);
        stack.push((m.clone(), b, vm, vb));
        stack.push((a, m, va, vm));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(out)
}

/// Bisects an isolating interval of a square-free `p` until its width is at most `width`.
pub fn refine_root(p: &QPoly, iv: &RootInterval, width: &Sqrt2Rational) -> Result<RootInterval> {
    let seq = SturmSequence::new(p)?;
    let (mut a, mut b) = (iv.lo.clone(), iv.hi.clone());
    let sa = seq.sign_of_p(&a);
    if sa == Sign::Zero || seq.sign_of_p(&b) == Sign::Zero {
        return Err(Error::InvalidInterval("endpoint is a root".into()));
    }
    while &(&b - &a) > width {
        let m = rational_between(&a, &b);
        match seq.sign_of_p(&m) {
            Sign::Zero => {
                let eps = &(&b - &a) * &Sqrt2Rational::from_ratio(1, 1 << 20);
                return Ok(RootInterval { lo: &m - &eps, hi: &m + &eps, multiplicity_one: true });
            }
            s if s == sa => a = m,
            _ => b = m,
        }
    }
    Ok(RootInterval { lo: a, hi: b, multiplicity_one: iv.multiplicity_one })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_ints(c)
    }

    fn q(n: i64, d: i64) -> Sqrt2Rational {
        Sqrt2Rational::from_ratio(n, d)
    }

    fn sqrt2_minus_1() -> Sqrt2Rational {
        Sqrt2Rational::from_ints(-1, 1)
    }

    #[test]
    fn counts_on_simple_intervals() {
        // (s²−2)(s−1/2)
        let a = &p(&[-2, 0, 1]) * &QPoly::linear_root(&q(1, 2));
        assert_eq!(sturm_count(&a, &q(0, 1), &q(1, 1)).unwrap(), 1);
        assert_eq!(sturm_count(&p(&[-2, 0, 1]), &sqrt2_minus_1(), &q(1, 1)).unwrap(), 0);
        assert_eq!(sturm_count(&a, &q(-2, 1), &q(2, 1)).unwrap(), 3);
    }

    #[test]
    fn endpoint_roots_are_excluded() {
        let a = &p(&[0, 1]) * &(&p(&[-1, 1]) * &QPoly::linear_root(&q(1, 3)));
        assert_eq!(sturm_count(&a, &q(0, 1), &q(1, 1)).unwrap(), 1);
        let b = &QPoly::linear_root(&sqrt2_minus_1()).pow(3) * &QPoly::linear_root(&q(1, 2));
        assert_eq!(sturm_count(&b, &sqrt2_minus_1(), &q(1, 1)).unwrap(), 1);
    }

    #[test]
    fn repeated_roots_count_once() {
        let a = &QPoly::linear_root(&q(1, 4)).pow(3) * &QPoly::linear_root(&q(3, 4)).pow(2);
        assert_eq!(sturm_count(&a, &q(0, 1), &q(1, 1)).unwrap(), 2);
        assert!(!SturmSequence::new(&a).unwrap().is_squarefree());
    }

    #[test]
    fn isolation() {
        let a = &QPoly::linear_root(&q(1, 4)) * &QPoly::linear_root(&q(3, 4));
        let iv = isolate_roots(&a, &q(0, 1), &q(1, 1)).unwrap();
        assert_eq!(iv.len(), 2);
        assert!(iv[0].lo < q(1, 4) && q(1, 4) < iv[0].hi);
        assert!(iv[1].lo < q(3, 4) && q(3, 4) < iv[1].hi);
        assert!(iv[0].hi <= iv[1].lo);
        let sq = p(&[1, -2, 1]);
        assert!(matches!(isolate_roots(&sq, &q(0, 1), &q(2, 1)), Err(Error::NotSquareFree)));
    }

    #[test]
    fn refinement_nests() {
        let a = p(&[-2, 0, 1]);
        let iv = isolate_roots(&a, &q(1, 1), &q(2, 1)).unwrap().remove(0);
        let r1 = refine_root(&a, &iv, &q(1, 1000)).unwrap();
        let r2 = refine_root(&a, &r1, &q(1, 2000)).unwrap();
        assert!(r1.lo <= r2.lo && r2.hi <= r1.hi);
        let s2 = Sqrt2Rational::sqrt2();
        assert!(r2.lo < s2 && s2 < r2.hi);
    }
}
