//! Zero design for f and inversion of the coefficient map.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hp::HPReal;

use super::pi::{det, PiPoly};
use super::{basis_f, eval_f, index, k_from_perturbation, k_matrix, KVector, PerturbCoeffs, PIVOT_COLUMNS};

const DESIGN_PREC: u32 = 128;
/// Smallest accepted σ_min/σ_max of the column-scaled collocation matrix.
const MIN_RELATIVE_SINGULAR_VALUE: f64 = 1e-13;

#[derive(Clone, Debug, Serialize)]
pub struct Design {
    pub targets: Vec<f64>,
    pub k: KVector,
    /// Refined zero next to each target.
    pub zeros: Vec<f64>,
    /// f′ at each refined zero.
    pub slopes: Vec<f64>,
    /// Singular values of the column-scaled collocation matrix.
    pub singular_values: Vec<f64>,
}

fn hp(x: f64) -> HPReal {
    HPReal::from_f64(x, DESIGN_PREC)
}

fn validate(targets: &[f64]) -> Result<Vec<f64>> {
    if targets.is_empty() || targets.len() > 5 {
        return Err(Error::Targets(format!("{} targets, expected 1 to 5", targets.len())));
    }
    if let Some(t) = targets.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::Targets(format!("{t} is not inside (0, 1)")));
    }
    let mut t = targets.to_vec();
    t.sort_by(f64::total_cmp);
    if let Some(w) = t.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Targets(format!("duplicate target {}", w[0])));
    }
    Ok(t)
}

/// Null vector of an n × (n + 1) matrix by Gaussian elimination with complete pivoting.
fn null_vector(mut a: Vec<Vec<HPReal>>) -> Vec<HPReal> {
    let n = a.len();
    let cols = n + 1;
    let mut perm: Vec<usize> = (0..cols).collect();
    for step in 0..n {
        let (mut pi, mut pj, mut best) = (step, step, HPReal::zero(DESIGN_PREC));
        for (i, row) in a.iter().enumerate().skip(step) {
            for (j, x) in row.iter().enumerate().skip(step) {
                if x.abs().0 > best.0 {
                    (pi, pj, best) = (i, j, x.abs());
                }
            }
        }
        a.swap(step, pi);
        for row in a.iter_mut() {
            row.swap(step, pj);
        }
        perm.swap(step, pj);
        let piv = a[step][step].clone();
        for i in step + 1..n {
            let f = &a[i][step] / &piv;
            for j in step..cols {
                let v = &a[i][j] - &(&f * &a[step][j]);
                a[i][j] = v;
            }
        }
    }
    // free variable is the last permuted column
    let mut x = vec![HPReal::zero(DESIGN_PREC); cols];
    x[n] = hp(1.0);
    for i in (0..n).rev() {
        let mut s = HPReal::zero(DESIGN_PREC);
        for j in i + 1..cols {
            s = &s + &(&a[i][j] * &x[j]);
        }
        x[i] = -(&s / &a[i][i]);
    }
    let mut out = vec![HPReal::zero(DESIGN_PREC); cols];
    for (k, p) in perm.iter().enumerate() {
        out[*p] = x[k].clone();
    }
    out
}

fn singular_values(a: &[Vec<HPReal>]) -> Vec<f64> {
    let (n, m) = (a.len(), a[0].len());
    let mut mat = DMatrix::from_fn(n, m, |i, j| a[i][j].to_f64());
    for mut c in mat.column_iter_mut() {
        let s = c.amax();
        if s > 0.0 {
            c /= s;
        }
    }
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Bisection for a sign change of f on [lo, hi].
fn refine(k: &KVector, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = eval_f(&hp(lo), k)?.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval_f(&hp(mid), k)?.signum();
        if fm == 0 {
            return Ok(mid);
        }
        if fm == flo {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn slope(k: &KVector, r: f64) -> Result<f64> {
    let h = 1e-7 * r.min(1.0 - r);
    let d = &eval_f(&hp(r + h), k)? - &eval_f(&hp(r - h), k)?;
    Ok(d.to_f64() / (2.0 * h))
}

/// k with f vanishing at each target: null space of [f_j(t_i)], normalized so
/// that ‖k‖∞ = 1 with the first nonzero component positive. Fewer than five
/// targets use the leading len + 1 basis functions.
pub fn design_zeros(targets: &[f64]) -> Result<Design> {
    let t = validate(targets)?;
    let n = t.len();
    let rows: Vec<Vec<HPReal>> =
        t.par_iter().map(|x| basis_f(&hp(*x)).map(|b| b[..=n].to_vec())).collect::<Result<_>>()?;
    let sv = singular_values(&rows);
    if sv[n - 1] < MIN_RELATIVE_SINGULAR_VALUE * sv[0] {
        return Err(Error::Conditioning { singular_values: sv });
    }
    let v = null_vector(rows);
    let scale = v.iter().fold(HPReal::zero(DESIGN_PREC), |m, x| m.max(x.abs()));
    let first = v.iter().find(|x| x.signum() != 0).map(HPReal::signum).unwrap_or(1);
    let mut k = [0.0; 6];
    for (j, x) in v.iter().enumerate() {
        k[j] = (x / &scale).to_f64() * first as f64;
    }
    let k = KVector(k);
    let mut zeros = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    for (i, x) in t.iter().enumerate() {
        let left = if i == 0 { *x } else { x - t[i - 1] };
        let right = if i + 1 == n { 1.0 - x } else { t[i + 1] - x };
        let d = 1e-3f64.min(0.25 * left.min(right));
        let (a, b) = (x - d, x + d);
        if eval_f(&hp(a), &k)?.signum() * eval_f(&hp(b), &k)?.signum() >= 0 {
            return Err(Error::Conditioning { singular_values: sv });
        }
        let z = refine(&k, a, b)?;
        let s = slope(&k, z)?;
        if s == 0.0 || !s.is_finite() {
            return Err(Error::Conditioning { singular_values: sv });
        }
        zeros.push(z);
        slopes.push(s);
    }
    Ok(Design { targets: t, k, zeros, slopes, singular_values: sv })
}

/// Zeros of f on (0, 1): sign sweep over `points` interior grid points, then bisection.
pub fn zeros_of_f(k: &KVector, points: usize) -> Result<Vec<f64>> {
    let grid: Vec<f64> = (1..=points).map(|i| i as f64 / (points + 1) as f64).collect();
    let signs: Vec<i32> = grid.par_iter().map(|r| eval_f(&hp(*r), k).map(|v| v.signum())).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..grid.len() {
        if signs[i] == 0 {
            out.push(grid[i]);
        } else if i + 1 < grid.len() && signs[i] * signs[i + 1] < 0 {
            out.push(refine(k, grid[i], grid[i + 1])?);
        }
    }
    Ok(out)
}

fn pivot_matrix() -> Vec<Vec<PiPoly>> {
    let k = k_matrix();
    k.iter().map(|row| PIVOT_COLUMNS.iter().map(|c| row[index(c).expect("name")].clone()).collect()).collect()
}

fn with_pivots(vals: impl Iterator<Item = Rational>) -> PerturbCoeffs {
    let mut c = PerturbCoeffs::zero();
    for (name, v) in PIVOT_COLUMNS.iter().zip(vals) {
        c.set(name, v).expect("name");
    }
    c
}

/// Coefficients with only (a10, a01, a20, a11, b10, b01) nonzero whose k equals
/// the given vector to working precision.
pub fn perturbation_from_k(k: &KVector) -> Result<PerturbCoeffs> {
    let a = pivot_matrix();
    let m = DMatrix::from_fn(6, 6, |i, j| a[i][j].to_f64());
    let x = m
        .lu()
        .solve(&DVector::from_column_slice(&k.0))
        .ok_or_else(|| Error::Structure("coefficient map is singular".into()))?;
    let vals: Vec<Rational> = x
        .iter()
        .map(|v| Rational::from_f64(*v).ok_or_else(|| Error::Structure(format!("non-finite coefficient {v}"))))
        .collect::<Result<_>>()?;
    Ok(with_pivots(vals.into_iter()))
}

/// Exact inversion by Cramer's rule; fails when k lies outside the rational
/// image (k1 not a rational multiple of π, or k2..k6 not rational).
pub fn perturbation_from_k_exact(k: &KVector<PiPoly>) -> Result<PerturbCoeffs> {
    let a = pivot_matrix();
    let d = det(&a);
    let d1 = d.coeff(1);
    let mut vals = Vec::with_capacity(6);
    for j in 0..6 {
        let mut aj = a.clone();
        for (i, row) in aj.iter_mut().enumerate() {
            row[j] = k.0[i].clone();
        }
        let n = det(&aj);
        if n.degree().is_some_and(|deg| deg > 1) || n.coeff(0) != 0 {
            return Err(Error::Structure(format!("k has no rational preimage ({} in column {})", n, PIVOT_COLUMNS[j])));
        }
        vals.push(n.coeff(1) / d1.clone());
    }
    let c = with_pivots(vals.into_iter());
    debug_assert_eq!(k_from_perturbation(&c), *k);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_target() {
        let d = design_zeros(&[0.5]).unwrap();
        assert!(eval_f(&hp(0.5), &d.k).unwrap().abs().to_f64() < 1e-15);
        assert!(d.slopes[0] != 0.0);
        assert!((d.k.max_abs() - 1.0).abs() < 1e-15);
        assert!(d.k.0.iter().find(|x| **x != 0.0).unwrap() > &0.0);
    }

    #[test]
    fn target_errors() {
        assert!(matches!(design_zeros(&[0.5, 0.5]), Err(Error::Targets(_))));
        assert!(matches!(design_zeros(&[]), Err(Error::Targets(_))));
        assert!(matches!(design_zeros(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]), Err(Error::Targets(_))));
        assert!(matches!(design_zeros(&[1.0]), Err(Error::Targets(_))));
        assert!(matches!(
            design_zeros(&[0.5, 0.5 + 1e-15, 0.6, 0.7, 0.8]),
            Err(Error::Conditioning { .. })
        ));
    }

    #[test]
    fn five_targets() {
        let t = [0.2, 0.35, 0.5, 0.65, 0.8];
        let d = design_zeros(&t).unwrap();
        for (z, x) in d.zeros.iter().zip(t) {
            assert!((z - x).abs() < 1e-9, "{z} vs {x}");
        }
        let found = zeros_of_f(&d.k, 2000).unwrap();
        assert_eq!(found.len(), 5);
    }

    #[test]
    fn inversion_examples() {
        assert!(perturbation_from_k(&KVector([0.0; 6])).unwrap().is_zero());
        let k = KVector([-std::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let c = perturbation_from_k(&k).unwrap();
        assert!((c.get("a10").unwrap().to_f64() - 1.0).abs() < 1e-15);
        let exact = k_from_perturbation(&PerturbCoeffs::zero().with("a10", 1));
        assert_eq!(perturbation_from_k_exact(&exact).unwrap(), PerturbCoeffs::zero().with("a10", 1));
        let bad = KVector([PiPoly::rational(1), PiPoly::zero(), PiPoly::zero(), PiPoly::zero(), PiPoly::zero(), PiPoly::zero()]);
        assert!(perturbation_from_k_exact(&bad).is_err());
    }

    #[test]
    fn inversion_round_trip() {
        let k = KVector([0.31, -1.7, 0.02, 4.5, -0.66, 1.25]);
        let back = k_from_perturbation(&perturbation_from_k(&k).unwrap()).to_f64();
        for i in 0..6 {
            assert!((back.0[i] - k.0[i]).abs() < 1e-14 * k.max_abs());
        }
    }
}
