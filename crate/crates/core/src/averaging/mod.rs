//! First-order averaged function of the discontinuous perturbation of S4,
//! its reduction G, Taylor independence, and zero design.

mod design;
mod pi;
mod series;

use std::collections::BTreeMap;
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ellfun::{eval_ij, quad};
use crate::error::{Error, Result};
use crate::hp::HPReal;

pub use design::{design_zeros, perturbation_from_k, perturbation_from_k_exact, zeros_of_f, Design};
pub use pi::{det, PiPoly};
pub use series::{f_series, g_series, taylor_independence, Series, SeriesTable};

/// Coefficient names in storage order.
pub const NAMES: [&str; 20] = [
    "a10", "a01", "a20", "a11", "a02", "b10", "b01", "b20", "b11", "b02", "c10", "c01", "c20", "c11", "c02", "d10",
    "d01", "d20", "d11", "d02",
];

/// Exponents (i, j) of x^i y^j, in the order of each block of NAMES.
const MONOMIALS: [(i32, i32); 5] = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];

/// Below this r the bases are evaluated from their series.
pub const SERIES_THRESHOLD: f64 = 1e-4;
const SERIES_ORDER: usize = 10;
const GUARD_BITS: u32 = 64;
/// Absolute quadrature tolerance for the reduction identity, before rescaling.
const IDENTITY_TOL: f64 = 1e-18;

fn index(name: &str) -> Result<usize> {
    NAMES.iter().position(|n| *n == name).ok_or_else(|| Error::Parse(format!("unknown coefficient {name:?}")))
}

/// Coefficients of P1, Q1 (zone x > 0: a, b) and P2, Q2 (zone x < 0: c, d).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PerturbCoeffs {
    values: [Rational; 20],
}

impl PerturbCoeffs {
    pub fn zero() -> PerturbCoeffs {
        PerturbCoeffs::default()
    }

    pub fn from_values(values: [Rational; 20]) -> PerturbCoeffs {
        PerturbCoeffs { values }
    }

    pub fn values(&self) -> &[Rational; 20] {
        &self.values
    }

    pub fn get(&self, name: &str) -> Result<&Rational> {
        Ok(&self.values[index(name)?])
    }

    pub fn set(&mut self, name: &str, v: impl Into<Rational>) -> Result<()> {
        self.values[index(name)?] = v.into();
        Ok(())
    }

    /// Builder form of `set`; panics on an unknown name.
    pub fn with(mut self, name: &str, v: impl Into<Rational>) -> PerturbCoeffs {
        self.set(name, v).expect("coefficient name");
        self
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0)
    }

    pub fn lin_comb(&self, alpha: &Rational, other: &PerturbCoeffs, beta: &Rational) -> PerturbCoeffs {
        let mut out = PerturbCoeffs::zero();
        for k in 0..20 {
            out.values[k] = Rational::from(alpha * &self.values[k]) + Rational::from(beta * &other.values[k]);
        }
        out
    }

    /// Coefficients of (P, Q) for zone 1 (x > 0) or zone 2 (x < 0), in MONOMIALS order.
    pub fn zone(&self, zone: usize) -> (&[Rational], &[Rational]) {
        let o = if zone == 1 { 0 } else { 10 };
        (&self.values[o..o + 5], &self.values[o + 5..o + 10])
    }

    /// (P_i(x, y), Q_i(x, y)) in double precision.
    pub fn eval_zone(&self, zone: usize, x: f64, y: f64) -> (f64, f64) {
        let (p, q) = self.zone(zone);
        let mono = MONOMIALS.map(|(i, j)| x.powi(i) * y.powi(j));
        let dot = |c: &[Rational]| c.iter().zip(&mono).map(|(c, m)| c.to_f64() * m).sum::<f64>();
        (dot(p), dot(q))
    }
}

fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Ok(q) = Rational::from_str(t) {
        return Ok(q);
    }
    let x: f64 = t.parse().map_err(|_| Error::Parse(format!("not a rational: {s:?}")))?;
    Rational::from_f64(x).ok_or_else(|| Error::Parse(format!("not finite: {s:?}")))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatJson {
    Str(String),
    Int(i64),
    Float(f64),
}

impl Serialize for PerturbCoeffs {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(20))?;
        for (n, v) in NAMES.iter().zip(&self.values) {
            m.serialize_entry(n, &v.to_string())?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for PerturbCoeffs {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<String, RatJson>::deserialize(d)?;
        let mut out = PerturbCoeffs::zero();
        for (name, v) in raw {
            let q = match v {
                RatJson::Str(s) => parse_rational(&s),
                RatJson::Int(n) => Ok(Rational::from(n)),
                RatJson::Float(x) => Rational::from_f64(x).ok_or_else(|| Error::Parse(format!("{name}: not finite"))),
            }
            .map_err(D::Error::custom)?;
            out.set(&name, q).map_err(D::Error::custom)?;
        }
        Ok(out)
    }
}

/// Scalars combined by the exact linear maps.
pub trait LinScalar: Clone {
    fn combine(terms: &[(Rational, &Self)]) -> Self;
}

impl LinScalar for f64 {
    fn combine(terms: &[(Rational, &f64)]) -> f64 {
        terms.iter().map(|(q, x)| q.to_f64() * **x).sum()
    }
}

impl LinScalar for PiPoly {
    fn combine(terms: &[(Rational, &PiPoly)]) -> PiPoly {
        terms.iter().fold(PiPoly::zero(), |acc, (q, x)| acc.add(&x.scale(q)))
    }
}

macro_rules! named_vector {
    ($name:ident, $json:ident, $($f:ident),+) => {
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name<T: Clone = f64>(pub [T; 6]);

        impl<T: Clone + Serialize> Serialize for $name<T> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                $json::from(self.clone()).serialize(s)
            }
        }

        impl<'de, T: Clone + Deserialize<'de>> Deserialize<'de> for $name<T> {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                $json::<T>::deserialize(d).map(Self::from)
            }
        }

        #[derive(Serialize, Deserialize)]
        struct $json<T> {
            $($f: T),+
        }

        impl<T: Clone> From<$json<T>> for $name<T> {
            fn from(j: $json<T>) -> Self {
                $name([$(j.$f),+])
            }
        }

        impl<T: Clone> From<$name<T>> for $json<T> {
            fn from(v: $name<T>) -> Self {
                let [$($f),+] = v.0;
                $json { $($f),+ }
            }
        }

        impl $name<PiPoly> {
            pub fn to_f64(&self) -> $name<f64> {
                $name(self.0.clone().map(|x| x.to_f64()))
            }
        }

        impl $name<f64> {
            pub fn max_abs(&self) -> f64 {
                self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
            }
        }
    };
}

named_vector!(KVector, KJson, k1, k2, k3, k4, k5, k6);
named_vector!(MVector, MJson, m1, m2, m3, m4, m5, m6);

/// Rows k1..k6 of the map from the 20 coefficients, as (scale, [(name, weight)]).
fn k_rows() -> [(PiPoly, Vec<(&'static str, i64)>); 6] {
    [
        (
            PiPoly::pi_term(Rational::from((1, 16)), 1),
            vec![("a10", -8), ("c10", -8), ("a11", 3), ("c11", 3), ("b01", 32), ("d01", 32), ("b02", -24), ("d02", -24)],
        ),
        (
            PiPoly::ratio(1, 6),
            vec![("a01", 8), ("c01", -8), ("a02", -6), ("c02", 6), ("b10", 8), ("d10", -8), ("b11", -3), ("d11", 3)],
        ),
        (PiPoly::ratio(1, 4), vec![("b10", 8), ("d10", -8), ("b11", -3), ("d11", 3)]),
        (PiPoly::ratio(-3, 16), vec![("a20", 1), ("c20", -1), ("b11", -2), ("d11", 2)]),
        (PiPoly::ratio(-1, 8), vec![("b01", 16), ("d01", 16), ("b20", 3), ("d20", 3), ("b02", -6), ("d02", -6)]),
        (
            PiPoly::ratio(-1, 12),
            vec![("a11", 3), ("c11", 3), ("b01", 8), ("d01", 8), ("b20", -6), ("d20", -6), ("b02", -12), ("d02", -12)],
        ),
    ]
}

/// The 6 × 20 matrix of the coefficient-to-k map.
pub fn k_matrix() -> Vec<Vec<PiPoly>> {
    k_rows()
        .into_iter()
        .map(|(scale, terms)| {
            let mut row = vec![PiPoly::zero(); 20];
            for (n, w) in terms {
                row[index(n).expect("name")] = scale.scale(&Rational::from(w));
            }
            row
        })
        .collect()
}

/// Exact k1..k6 of a perturbation.
pub fn k_from_perturbation(c: &PerturbCoeffs) -> KVector<PiPoly> {
    let rows = k_matrix();
    KVector(std::array::from_fn(|i| {
        rows[i].iter().zip(&c.values).fold(PiPoly::zero(), |acc, (a, x)| acc.add(&a.scale(x)))
    }))
}

/// Columns used for the independence argument and for inversion.
pub const PIVOT_COLUMNS: [&str; 6] = ["a10", "a01", "a20", "a11", "b10", "b01"];

/// ∂(k1..k6)/∂(a10, a01, a20, a11, b10, b01), exactly.
pub fn jacobian_check() -> PiPoly {
    jacobian_with_columns(&PIVOT_COLUMNS)
}

pub fn jacobian_with_columns(cols: &[&str; 6]) -> PiPoly {
    let k = k_matrix();
    let sub: Vec<Vec<PiPoly>> =
        k.iter().map(|row| cols.iter().map(|c| row[index(c).expect("name")].clone()).collect()).collect();
    det(&sub)
}

/// Rows m1..m6 in terms of k1..k6.
pub fn m_matrix() -> [[Rational; 6]; 6] {
    let q = |n: i64, d: i64| Rational::from((n, d));
    let z = || Rational::new();
    [
        [q(2, 1), z(), z(), z(), z(), z()],
        [z(), q(3, 1), q(-2, 1), q(4, 1), z(), z()],
        [z(), q(1, 2), z(), z(), z(), z()],
        [z(), z(), q(1, 2), z(), z(), z()],
        [z(), z(), z(), z(), q(-1, 2), z()],
        [z(), z(), z(), z(), z(), q(1, 2)],
    ]
}

/// Exact determinant of the k → m map.
pub fn reduction_determinant() -> PiPoly {
    let m: Vec<Vec<PiPoly>> = m_matrix().iter().map(|r| r.iter().map(|x| PiPoly::rational(x.clone())).collect()).collect();
    det(&m)
}

#[allow(non_snake_case)]
pub fn reduce_to_G<T: LinScalar>(k: &KVector<T>) -> MVector<T> {
    let m = m_matrix();
    MVector(std::array::from_fn(|i| {
        let terms: Vec<(Rational, &T)> = (0..6).filter(|&j| m[i][j] != 0).map(|j| (m[i][j].clone(), &k.0[j])).collect();
        T::combine(&terms)
    }))
}

fn check_r(r: &HPReal) -> Result<()> {
    if r.signum() <= 0 || r.add_f64(-1.0).signum() >= 0 || !r.is_finite() {
        return Err(Error::Domain { what: "r", value: r.to_f64(), domain: "(0, 1)" });
    }
    Ok(())
}

fn series_tables() -> &'static (Vec<Series>, Vec<Series>) {
    static T: std::sync::OnceLock<(Vec<Series>, Vec<Series>)> = std::sync::OnceLock::new();
    T.get_or_init(|| (f_series(SERIES_ORDER), g_series(SERIES_ORDER)))
}

/// f1(r), …, f6(r).
pub fn basis_f(r: &HPReal) -> Result<[HPReal; 6]> {
    check_r(r)?;
    let out = r.prec();
    let r = r.with_prec(out + GUARD_BITS);
    if r.to_f64() < SERIES_THRESHOLD {
        let t = &series_tables().0;
        return Ok(std::array::from_fn(|k| t[k].eval_hp(&r).with_prec(out)));
    }
    let one = HPReal::from_i64(1, r.prec());
    let (om, op) = (&one - &r, &one + &r);
    let (u3, w3) = (&om * &om.sqrt(), &op * &op.sqrt());
    let one_minus_r2 = &om * &op;
    let ij = eval_ij(&r)?;
    let f = [
        r.clone(),
        &(&(&r.mul_f64(3.0) + &u3) - &w3) / &r,
        (&u3 + &w3).add_f64(-2.0),
        &(&r.mul_f64(2.0) - &(&one_minus_r2 * &(&op / &om).ln())) / &r,
        &r * &ij.i,
        &(&ij.i - &(&one_minus_r2 * &ij.j)) / &r,
    ];
    Ok(f.map(|x| x.with_prec(out)))
}

/// g1(r), …, g6(r).
pub fn basis_g(r: &HPReal) -> Result<[HPReal; 6]> {
    check_r(r)?;
    let out = r.prec();
    let r = r.with_prec(out + GUARD_BITS);
    if r.to_f64() < SERIES_THRESHOLD {
        let t = &series_tables().1;
        return Ok(std::array::from_fn(|k| t[k].eval_hp(&r).with_prec(out)));
    }
    let one = HPReal::from_i64(1, r.prec());
    let (u, w) = ((&one - &r).sqrt(), (&one + &r).sqrt());
    let (sum, diff) = (&u + &w, &u - &w);
    let r2 = &r * &r;
    let ij = eval_ij(&r)?;
    let one_minus_r2 = &one - &r2;
    let g = [
        r.clone(),
        r2.clone(),
        (&(&r.mul_f64(4.0) * &diff) - &(&r2.add_f64(3.0) * &sum)).add_f64(6.0),
        (&(&r2.add_f64(1.0).mul_f64(2.0) * &sum) + &(&(&r * &r2.add_f64(-5.0)) * &diff)).add_f64(-4.0),
        &r * &(&(&r2.add_f64(-5.0) * &ij.i) + &(&one_minus_r2 * &ij.j)),
        &r * &(&ij.i.mul_f64(4.0) - &(&one_minus_r2 * &ij.j)),
    ];
    Ok(g.map(|x| x.with_prec(out)))
}

fn dot(c: &[f64; 6], b: &[HPReal; 6]) -> HPReal {
    let p = b[0].prec();
    c.iter().zip(b).fold(HPReal::zero(p), |acc, (c, b)| &acc + &b.mul_f64(*c))
}

/// f(r) = Σ kᵢ fᵢ(r).
pub fn eval_f(r: &HPReal, k: &KVector) -> Result<HPReal> {
    Ok(dot(&k.0, &basis_f(r)?))
}

/// G(r) = Σ mᵢ gᵢ(r).
#[allow(non_snake_case)]
pub fn eval_G(r: &HPReal, m: &MVector) -> Result<HPReal> {
    Ok(dot(&m.0, &basis_g(r)?))
}

/// Quadrature tolerance matched to the working precision.
fn quad_tol(prec: u32) -> f64 {
    2f64.powi(-(prec as i32 - 8)).max(1e-290)
}

fn hp_zone(c: &PerturbCoeffs, zone: usize, prec: u32) -> ([HPReal; 5], [HPReal; 5]) {
    let (p, q) = c.zone(zone);
    (std::array::from_fn(|k| HPReal::from_rational(&p[k], prec)), std::array::from_fn(|k| HPReal::from_rational(&q[k], prec)))
}

/// (16/3)[∫₀^π T1 dθ + ∫_π^{2π} T2 dθ], with Tᵢ built from the raw Pᵢ, Qᵢ along
/// x = 3r sin θ/(16(1 − r cos θ)), y = (3/8)(−1 + (1 − r cos θ)^(−1/2)).
pub fn averaged_quadrature(r: &HPReal, c: &PerturbCoeffs) -> Result<HPReal> {
    check_r(r)?;
    let out = r.prec();
    let p = out + 32;
    let r = r.with_prec(p);
    let zones = [hp_zone(c, 1, p), hp_zone(c, 2, p)];
    let integrand = |zone: usize| {
        let (pc, qc) = &zones[zone];
        let r = r.clone();
        move |th: &HPReal| {
            let (s, co) = (th.sin(), th.cos());
            let d = (&r * &co).mul_f64(-1.0).add_f64(1.0);
            let sd = d.sqrt();
            let x = (&(&r * &s) / &d).mul_f64(3.0 / 16.0);
            let y = sd.recip().add_f64(-1.0).mul_f64(3.0 / 8.0);
            let mono = MONOMIALS.map(|(i, j)| &x.powi(i) * &y.powi(j));
            let pv = pc.iter().zip(&mono).fold(HPReal::zero(p), |a, (c, m)| &a + &(c * m));
            let qv = qc.iter().zip(&mono).fold(HPReal::zero(p), |a, (c, m)| &a + &(c * m));
            &(&sd * &(&(&r - &co) * &qv)) - &(&d * &(&s * &pv))
        }
    };
    let tol = quad_tol(p);
    let zero = HPReal::zero(p);
    let pi = HPReal::pi(p);
    let two_pi = pi.mul_f64(2.0);
    let a = if c.zone(1).0.iter().chain(c.zone(1).1).all(|x| *x == 0) {
        zero.clone()
    } else {
        quad::integrate(integrand(0), &zero, &pi, tol)
    };
    let b = if c.zone(2).0.iter().chain(c.zone(2).1).all(|x| *x == 0) {
        zero
    } else {
        quad::integrate(integrand(1), &pi, &two_pi, tol)
    };
    Ok((&a + &b).mul_f64(16.0).div_f64(3.0).with_prec(out))
}

/// |F(r) − (1 − r²) ∫₀^r (1 − ξ²)^(−2) G(ξ) dξ| with F = r f.
#[allow(non_snake_case)]
pub fn F_from_G_identity_check(k: &KVector, r: &HPReal) -> Result<f64> {
    check_r(r)?;
    let p = r.prec();
    let m = reduce_to_G(k);
    let f = eval_f(r, k)?;
    let big_f = r * &f;
    let err = std::cell::Cell::new(None);
    let integrand = |xi: &HPReal| {
        let one_minus = (xi * xi).mul_f64(-1.0).add_f64(1.0);
        match eval_G(xi, &m) {
            Ok(g) => &g / &(&one_minus * &one_minus),
            Err(e) => {
                err.set(Some(e));
                HPReal::zero(p)
            }
        }
    };
    // the integral grows like 1/(1 − r²); the tolerance follows it
    let tol = IDENTITY_TOL / (1.0 - r.to_f64().powi(2));
    let integral = quad::integrate(integrand, &HPReal::zero(p), r, tol);
    if let Some(e) = err.take() {
        return Err(e);
    }
    let rhs = &(&HPReal::from_i64(1, p) - &(r * r)) * &integral;
    Ok((&big_f - &rhs).abs().to_f64())
}
