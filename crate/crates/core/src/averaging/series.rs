//! Exact Taylor series at r = 0 of the bases f1..f6 and g1..g6.

use rug::{Integer, Rational};
use serde::Serialize;

use crate::hp::HPReal;

use super::pi::{det, PiPoly};

/// Σ cₙ rⁿ truncated after r^(len − 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub coeffs: Vec<PiPoly>,
}

impl Series {
    fn zeros(len: usize) -> Series {
        Series { coeffs: vec![PiPoly::zero(); len] }
    }

    fn poly(c: &[i64], len: usize) -> Series {
        let mut s = Series::zeros(len);
        for (k, x) in c.iter().enumerate().take(len) {
            s.coeffs[k] = PiPoly::rational(*x);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, n: usize) -> PiPoly {
        self.coeffs.get(n).cloned().unwrap_or_default()
    }

    fn add(&self, o: &Series) -> Series {
        Series { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.add(b)).collect() }
    }

    fn sub(&self, o: &Series) -> Series {
        Series { coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.sub(b)).collect() }
    }

    fn mul(&self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        let mut out = Series::zeros(n);
        for i in 0..n {
            for j in 0..n - i {
                out.coeffs[i + j] = out.coeffs[i + j].add(&self.coeffs[i].mul(&o.coeffs[j]));
            }
        }
        out
    }

    fn scale(&self, q: &PiPoly) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| c.mul(q)).collect() }
    }

    /// Division by r; the constant term must vanish.
    fn div_r(&self) -> Series {
        assert!(self.coeffs[0].is_zero(), "series has a pole at 0");
        Series { coeffs: self.coeffs[1..].to_vec() }
    }

    fn truncate(mut self, len: usize) -> Series {
        self.coeffs.truncate(len);
        self
    }

    pub fn eval_hp(&self, r: &HPReal) -> HPReal {
        let p = r.prec();
        let mut acc = HPReal::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * r) + &c.eval_hp(p);
        }
        acc
    }
}

fn binom(alpha: &Rational, n: u32) -> Rational {
    let mut b = Rational::from(1);
    for k in 0..n {
        b *= Rational::from(alpha - k) / (k + 1);
    }
    b
}

/// (1 + σ r)^α.
fn power(alpha: Rational, sigma: i32, len: usize) -> Series {
    let coeffs = (0..len as u32)
        .map(|n| {
            let sign = if sigma < 0 && n % 2 == 1 { -1 } else { 1 };
            PiPoly::rational(binom(&alpha, n) * sign)
        })
        .collect();
    Series { coeffs }
}

/// ln((1 + r)/(1 − r)) = 2 Σ r^(2k+1)/(2k + 1).
fn log_ratio(len: usize) -> Series {
    let coeffs = (0..len as i64).map(|n| if n % 2 == 1 { PiPoly::ratio(2, n) } else { PiPoly::zero() }).collect();
    Series { coeffs }
}

/// ∫₀^π (1 − r cos θ)^α dθ = π Σ binom(α, 2k) (2k)!/(4ᵏ k!²) r^(2k).
fn cos_moment(alpha: Rational, len: usize) -> Series {
    let coeffs = (0..len as u32)
        .map(|n| {
            if n % 2 == 1 {
                return PiPoly::zero();
            }
            let k = n / 2;
            let central = Rational::from((Integer::from(Integer::binomial_u(2 * k, k)), Integer::from(Integer::u_pow_u(4, k))));
            PiPoly::pi_term(binom(&alpha, n) * central, 1)
        })
        .collect();
    Series { coeffs }
}

struct Atoms {
    len: usize,
    r: Series,
    u: Series,
    w: Series,
    u3: Series,
    w3: Series,
    log: Series,
    i: Series,
    j: Series,
}

impl Atoms {
    fn new(len: usize) -> Atoms {
        let half = Rational::from((1, 2));
        Atoms {
            len,
            r: Series::poly(&[0, 1], len),
            u: power(half.clone(), -1, len),
            w: power(half.clone(), 1, len),
            u3: power(Rational::from((3, 2)), -1, len),
            w3: power(Rational::from((3, 2)), 1, len),
            log: log_ratio(len),
            i: cos_moment(half.clone(), len),
            j: cos_moment(-half, len),
        }
    }

    fn p(&self, c: &[i64]) -> Series {
        Series::poly(c, self.len)
    }
}

/// Series of f1..f6 through r^order.
pub fn f_series(order: usize) -> Vec<Series> {
    let a = Atoms::new(order + 2);
    let len = order + 1;
    let one_minus_r2 = a.p(&[1, 0, -1]);
    let f2 = a.r.scale(&PiPoly::rational(3)).add(&a.u3).sub(&a.w3).div_r();
    let f3 = a.u3.add(&a.w3).sub(&a.p(&[2]));
    let f4 = a.r.scale(&PiPoly::rational(2)).sub(&one_minus_r2.mul(&a.log)).div_r();
    let f5 = a.r.mul(&a.i);
    let f6 = a.i.sub(&one_minus_r2.mul(&a.j)).div_r();
    [a.r.clone(), f2, f3, f4, f5, f6].into_iter().map(|s| s.truncate(len)).collect()
}

/// Series of g1..g6 through r^order.
pub fn g_series(order: usize) -> Vec<Series> {
    let a = Atoms::new(order + 1);
    let (sum, diff) = (a.u.add(&a.w), a.u.sub(&a.w));
    let g3 = a.p(&[6]).add(&a.p(&[0, 4]).mul(&diff)).sub(&a.p(&[3, 0, 1]).mul(&sum));
    let g4 = a.p(&[-4]).add(&a.p(&[2, 0, 2]).mul(&sum)).add(&a.p(&[0, -5, 0, 1]).mul(&diff));
    let g5 = a.p(&[0, -5, 0, 1]).mul(&a.i).add(&a.p(&[0, 1, 0, -1]).mul(&a.j));
    let g6 = a.p(&[0, 4]).mul(&a.i).sub(&a.p(&[0, 1, 0, -1]).mul(&a.j));
    vec![a.r.clone(), a.p(&[0, 0, 1]), g3, g4, g5, g6]
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesTable {
    pub order: usize,
    pub f: Vec<Series>,
    pub g: Vec<Series>,
}

impl SeriesTable {
    pub fn new(order: usize) -> SeriesTable {
        SeriesTable { order, f: f_series(order), g: g_series(order) }
    }

    /// Coefficients of r, r², …, r⁶ for f1..f6 (rows).
    pub fn f_matrix(&self) -> Vec<Vec<PiPoly>> {
        self.f.iter().map(|s| (1..=6).map(|n| s.coeff(n)).collect()).collect()
    }
}

/// Order-6 series of f1..f6 and the determinant of their r¹..r⁶ coefficients.
pub fn taylor_independence() -> (SeriesTable, PiPoly) {
    let t = SeriesTable::new(6);
    let d = det(&t.f_matrix());
    (t, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> PiPoly {
        PiPoly::ratio(n, d)
    }

    fn qpi(n: i64, d: i64) -> PiPoly {
        PiPoly::pi_term(Rational::from((n, d)), 1)
    }

    #[test]
    fn displayed_expansions() {
        let f = f_series(6);
        let z = PiPoly::zero;
        assert_eq!(f[1].coeffs, vec![z(), z(), q(1, 8), z(), q(3, 128), z(), q(9, 1024)]);
        assert_eq!(f[2].coeffs, vec![z(), z(), q(3, 4), z(), q(3, 64), z(), q(7, 512)]);
        assert_eq!(f[3].coeffs, vec![z(), z(), q(4, 3), z(), q(4, 15), z(), q(4, 35)]);
        assert_eq!(f[4].coeffs, vec![z(), qpi(1, 1), z(), qpi(-1, 16), z(), qpi(-15, 1024), z()]);
        assert_eq!(f[5].coeffs, vec![z(), qpi(3, 4), z(), qpi(9, 128), z(), qpi(105, 4096), z()]);
    }

    #[test]
    fn independence_determinant() {
        let (_, d) = taylor_independence();
        assert_eq!(d, PiPoly::pi_term(Rational::from((-685, 7516192768i64)), 2));
        let num = -685.0 * std::f64::consts::PI.powi(2) / 7516192768.0;
        assert!((d.to_f64() / num - 1.0).abs() < 1e-12);
    }

    #[test]
    fn g_series_vanish_at_zero() {
        for s in g_series(5) {
            assert!(s.coeff(0).is_zero());
        }
    }
}
