//! Polynomials over the ring Z[√2], used for fraction-free hot loops.

use std::cmp::Ordering;

use rug::{Assign, Integer, Rational};

use crate::qfield::{Sign, Sqrt2Rational};

/// `a + b√2` with integer parts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Zs2 {
    pub a: Integer,
    pub b: Integer,
}

impl Zs2 {
    pub fn new(a: Integer, b: Integer) -> Self {
        Zs2 { a, b }
    }

    pub fn one() -> Self {
        Zs2::new(Integer::from(1), Integer::new())
    }

    pub fn is_zero(&self) -> bool {
        self.a.cmp0() == Ordering::Equal && self.b.cmp0() == Ordering::Equal
    }

    pub fn sign(&self) -> Sign {
        sign_ab(&self.a, &self.b)
    }

    pub fn mul(&self, o: &Zs2) -> Zs2 {
        if self.b.cmp0() == Ordering::Equal && o.b.cmp0() == Ordering::Equal {
            return Zs2::new(Integer::from(&self.a * &o.a), Integer::new());
        }
        let mut a = Integer::from(&self.a * &o.a);
        let mut t = Integer::from(&self.b * &o.b);
        t <<= 1;
        a += &t;
        let mut b = Integer::from(&self.a * &o.b);
        t.assign(&self.b * &o.a);
        b += &t;
        Zs2::new(a, b)
    }

    pub fn pow(&self, e: u32) -> Zs2 {
        let mut acc = Zs2::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient; the caller guarantees divisibility in Z[√2].
    pub fn div_exact(&self, d: &Zs2) -> Zs2 {
        if d.b.cmp0() == Ordering::Equal {
            return Zs2::new(
                Integer::from(self.a.div_exact_ref(&d.a)),
                Integer::from(self.b.div_exact_ref(&d.a)),
            );
        }
        let conj = Zs2::new(d.a.clone(), Integer::from(-&d.b));
        let num = self.mul(&conj);
        let norm = Integer::from(d.a.square_ref()) - (Integer::from(d.b.square_ref()) << 1);
        debug_assert!(num.a.is_divisible(&norm) && num.b.is_divisible(&norm));
        Zs2::new(num.a.div_exact(&norm), num.b.div_exact(&norm))
    }
}

pub(crate) fn sign_ab(a: &Integer, b: &Integer) -> Sign {
    let sa = Sign::of_ordering(a.cmp0());
    let sb = Sign::of_ordering(b.cmp0());
    match (sa, sb) {
        (Sign::Zero, s) | (s, Sign::Zero) => s,
        (x, y) if x == y => x,
        (x, _) => {
            let a2 = Integer::from(a.square_ref());
            let b2 = Integer::from(b.square_ref()) << 1;
            match a2.cmp(&b2) {
                Ordering::Greater => x,
                Ordering::Less => x.flip(),
                Ordering::Equal => Sign::Zero,
            }
        }
    }
}

/// Dense polynomial over Z[√2], ascending degree, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct ZPoly(pub Vec<Zs2>);

impl ZPoly {
    pub fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zs2::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn lc(&self) -> &Zs2 {
        self.0.last().expect("lc of zero polynomial")
    }

    /// Clears denominators by a positive integer factor.
    pub fn from_coeffs(c: &[Sqrt2Rational]) -> (ZPoly, Integer) {
        let mut den = Integer::from(1);
        for x in c {
            den.lcm_mut(x.rat().denom());
            den.lcm_mut(x.surd().denom());
        }
        let scale = |q: &Rational| -> Integer {
            let f = Integer::from(den.div_exact_ref(q.denom()));
            f * q.numer()
        };
        let v = c.iter().map(|x| Zs2::new(scale(x.rat()), scale(x.surd()))).collect();
        (ZPoly(v).trim(), den)
    }

    pub fn to_coeffs(&self, den: &Integer) -> Vec<Sqrt2Rational> {
        self.0
            .iter()
            .map(|z| {
                Sqrt2Rational::new(
                    Rational::from((z.a.clone(), den.clone())),
                    Rational::from((z.b.clone(), den.clone())),
                )
            })
            .collect()
    }

    pub fn derivative(&self) -> ZPoly {
        let v = self
            .0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, z)| Zs2::new(Integer::from(&z.a * i as u64), Integer::from(&z.b * i as u64)))
            .collect();
        ZPoly(v).trim()
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::default();
        }
        let n = self.0.len() + o.0.len() - 1;
        let mut out = vec![Zs2::default(); n];
        let mut t = Integer::new();
        for (i, x) in self.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let xb0 = x.b.cmp0() == Ordering::Equal;
            for (j, y) in o.0.iter().enumerate() {
                let acc = &mut out[i + j];
                t.assign(&x.a * &y.a);
                acc.a += &t;
                if !xb0 {
                    t.assign(&x.b * &y.b);
                    t <<= 1;
                    acc.a += &t;
                    t.assign(&x.b * &y.a);
                    acc.b += &t;
                }
                t.assign(&x.a * &y.b);
                acc.b += &t;
            }
        }
        ZPoly(out).trim()
    }

    fn scale_in_place(&mut self, k: &Zs2) {
        for c in self.0.iter_mut() {
            *c = c.mul(k);
        }
    }

    /// Pseudo-remainder `lc(b)^(deg a − deg b + 1)·a mod b`.
    pub fn prem(&self, b: &ZPoly) -> ZPoly {
        let db = b.degree();
        if self.is_zero() || self.degree() < db {
            return self.clone();
        }
        let lb = b.lc().clone();
        let mut r = self.0.clone();
        let mut e = self.degree() - db + 1;
        while r.len() > db && !r.is_empty() {
            let top = r.len() - 1;
            let lr = r[top].clone();
            // r ← lb·r − lr·x^(top−db)·b
            for c in r.iter_mut() {
                *c = c.mul(&lb);
            }
            let off = top - db;
            for (j, bj) in b.0.iter().enumerate() {
                let p = lr.mul(bj);
                let c = &mut r[off + j];
                c.a -= &p.a;
                c.b -= &p.b;
            }
            r.pop();
            e -= 1;
            while r.last().is_some_and(Zs2::is_zero) {
                r.pop();
            }
            if r.len() <= db {
                break;
            }
        }
        let mut out = ZPoly(r).trim();
        if e > 0 && !out.is_zero() {
            out.scale_in_place(&lb.pow(e as u32));
        }
        out
    }

    pub fn div_exact_scalar(&self, d: &Zs2) -> ZPoly {
        if *d == Zs2::one() {
            return self.clone();
        }
        ZPoly(self.0.iter().map(|c| c.div_exact(d)).collect())
    }

    /// Sign of `p((pa + pb√2)/q)` with `q > 0`, by homogeneous Horner.
    pub fn sign_at(&self, pa: &Integer, pb: &Integer, q: &Integer) -> Sign {
        if self.is_zero() {
            return Sign::Zero;
        }
        let x = Zs2::new(pa.clone(), pb.clone());
        let mut acc = self.lc().clone();
        let mut qk = Integer::from(1);
        for c in self.0.iter().rev().skip(1) {
            qk *= q;
            acc = acc.mul(&x);
            acc.a += Integer::from(&c.a * &qk);
            acc.b += Integer::from(&c.b * &qk);
        }
        acc.sign()
    }
}

/// Splits a point of Q(√2) into `(pa + pb√2)/q` with integer parts and `q > 0`.
pub(crate) fn point_parts(x: &Sqrt2Rational) -> (Integer, Integer, Integer) {
    let q = x.denominator_lcm();
    let pa = Integer::from(q.div_exact_ref(x.rat().denom())) * x.rat().numer();
    let pb = Integer::from(q.div_exact_ref(x.surd().denom())) * x.surd().numer();
    (pa, pb, q)
}
