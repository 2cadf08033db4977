//! Numeric checks on a grid in (√2 − 1, 1).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ellfun::eval_v;
use crate::error::{Error, Result};
use crate::hp::HPReal;
use crate::poly::QPoly;

use super::{Outcome, Stage5, Stage6};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub points: usize,
    /// Working precision in bits.
    pub precision: u32,
    /// Distance kept from each endpoint.
    pub standoff: f64,
    /// Record wall-clock seconds per check (breaks bit-identical reports).
    #[serde(default)]
    pub record_timing: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { points: 10_000, precision: 192, standoff: 1e-8, record_timing: false }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points < 4 {
            return Err(Error::Config(format!("grid of {} points", self.points)));
        }
        if self.precision < 64 {
            return Err(Error::Config(format!("precision {} bits is below 64", self.precision)));
        }
        if !(self.standoff > 0.0 && self.standoff < 0.05) {
            return Err(Error::Config(format!("standoff {} outside (0, 0.05)", self.standoff)));
        }
        Ok(())
    }

    /// Grid points, geometrically densified toward both endpoints.
    pub fn points(&self) -> Vec<HPReal> {
        let p = self.precision;
        let lo = crate::ellfun::s_lower(p);
        let hi = HPReal::from_i64(1, p);
        let half = (&hi - &lo).mul_f64(0.5);
        let n_left = self.points / 2;
        let n_right = self.points - n_left;
        let ratio = half.to_f64() / self.standoff;
        let dist = |k: usize, n: usize| {
            let t = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
            // the last point of each half stops short of the midpoint
            HPReal::from_f64(self.standoff * ratio.powf(t * (1.0 - 1e-9)), p)
        };
        let mut out: Vec<HPReal> = (0..n_left).map(|k| &lo + &dist(k, n_left)).collect();
        let mut right: Vec<HPReal> = (0..n_right).map(|k| &hi - &dist(k, n_right)).collect();
        right.reverse();
        out.extend(right);
        out
    }

    /// Relative evaluation error assumed for a value of unit scale.
    pub fn unit_error(&self) -> f64 {
        2f64.powi(-(self.precision as i32 - 24))
    }
}

/// Polynomial with coefficients rounded once to a fixed precision.
#[derive(Clone, Debug)]
pub struct HpPoly {
    c: Vec<HPReal>,
}

impl HpPoly {
    pub fn new(p: &QPoly, prec: u32) -> HpPoly {
        HpPoly { c: p.coeffs().iter().map(|x| x.to_hp(prec)).collect() }
    }

    pub fn eval(&self, x: &HPReal) -> HPReal {
        let mut acc = HPReal::zero(x.prec());
        for c in self.c.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
}

pub(crate) struct Branches {
    pub z61: HpPoly,
    pub z62: HpPoly,
    pub z63: HpPoly,
    pub delta: HpPoly,
}

impl Branches {
    pub fn new(s: &Stage6, prec: u32) -> Branches {
        Branches {
            z61: HpPoly::new(s.z61(), prec),
            z62: HpPoly::new(s.z62(), prec),
            z63: HpPoly::new(s.z63(), prec),
            delta: HpPoly::new(&s.delta, prec),
        }
    }

    /// (v₋, v₊) with v₋ > v₊, by the cancellation-free root formula.
    pub fn eval(&self, s: &HPReal) -> (HPReal, HPReal) {
        let (a, b, c) = (self.z63.eval(s), self.z62.eval(s), self.z61.eval(s));
        let sq = self.delta.eval(s).sqrt();
        let q = if b.signum() >= 0 { (&b + &sq).mul_f64(-0.5) } else { (&sq - &b).mul_f64(0.5) };
        let r1 = &q / &a;
        let r2 = &c / &q;
        if r1.0 > r2.0 {
            (r1, r2)
        } else {
            (r2, r1)
        }
    }

    /// Branches from the displayed formula (−Z62 ± √Δ)/(2 Z63).
    pub fn eval_textbook(&self, s: &HPReal) -> (HPReal, HPReal) {
        let (a, b) = (self.z63.eval(s), self.z62.eval(s));
        let sq = self.delta.eval(s).sqrt();
        let den = a.mul_f64(2.0);
        let plus = &(&sq - &b) / &den;
        let minus = &(-&b - sq) / &den;
        (minus, plus)
    }
}

pub(crate) fn u_negative(cfg: &GridConfig, st: &Stage5) -> Result<Outcome> {
    let p = cfg.precision;
    let z51 = HpPoly::new(st.z51(), p);
    let z52 = HpPoly::new(st.z52(), p);
    let eps = cfg.unit_error();
    let rows: Vec<(f64, f64, f64)> = cfg
        .points()
        .par_iter()
        .map(|s| {
            let q = &z51.eval(s) / &z52.eval(s);
            let v = eval_v(s)?;
            let u = &q + &v;
            let scale = q.abs().to_f64() + v.abs().to_f64();
            Ok((s.to_f64(), -u.to_f64(), scale * eps))
        })
        .collect::<Result<_>>()?;
    let (mut margin, mut worst_s, mut ok) = (f64::INFINITY, 0.0, true);
    for &(s, m, err) in &rows {
        ok &= m > 10.0 * err;
        if m < margin {
            margin = m;
            worst_s = s;
        }
    }
    Ok(Outcome::new(
        ok,
        Some(margin),
        format!("U(s) = Z51/Z52 + v(s) < 0 at {} points; min -U = {margin:.3e} at s = {worst_s:.10}", rows.len()),
    ))
}

pub(crate) fn branch_order(cfg: &GridConfig, st: &Stage6) -> Result<Outcome> {
    let p = cfg.precision;
    let br = Branches::new(st, p);
    let eps = cfg.unit_error();
    let rows: Vec<(f64, f64, f64)> = cfg
        .points()
        .par_iter()
        .map(|s| {
            let (vm, vp) = br.eval(s);
            let v = eval_v(s)?;
            let m = (&vm - &v).to_f64().min((&v - &vp).to_f64());
            let scale = vm.abs().to_f64() + vp.abs().to_f64() + v.abs().to_f64();
            Ok((s.to_f64(), m, scale * eps))
        })
        .collect::<Result<_>>()?;
    let (mut margin, mut worst_s, mut ok) = (f64::INFINITY, 0.0, true);
    for &(s, m, err) in &rows {
        ok &= m > 10.0 * err;
        if m < margin {
            margin = m;
            worst_s = s;
        }
    }
    Ok(Outcome::new(
        ok,
        Some(margin),
        format!("v-(s) > v(s) > v+(s) at {} points; min gap {margin:.3e} at s = {worst_s:.10}", rows.len()),
    ))
}

pub(crate) fn vieta(cfg: &GridConfig, st: &Stage6) -> Result<Outcome> {
    let p = cfg.precision;
    let br = Branches::new(st, p);
    let tol = 1e-30f64.max(2f64.powi(-(p as i32) / 2));
    let worst = cfg
        .points()
        .par_iter()
        .map(|s| {
            let (vm, vp) = br.eval_textbook(s);
            let a = br.z63.eval(s);
            let sum = &(&vm + &vp) + &(&br.z62.eval(s) / &a);
            let prod = &(&vm * &vp) - &(&br.z61.eval(s) / &a);
            let scale = vm.abs().to_f64().max(vp.abs().to_f64()).max(1.0);
            (sum.abs().to_f64() / scale).max(prod.abs().to_f64() / (scale * scale))
        })
        .reduce(|| 0.0, f64::max);
    Ok(Outcome::new(
        worst < tol,
        Some(tol - worst),
        format!("v+ + v- = -Z62/Z63 and v+ v- = Z61/Z63 on the grid; worst relative residual {worst:.3e}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_ordered_and_inside() {
        let cfg = GridConfig { points: 200, ..GridConfig::default() };
        let pts = cfg.points();
        assert_eq!(pts.len(), 200);
        for w in pts.windows(2) {
            assert!(w[0].0 < w[1].0);
        }
        let lo = crate::ellfun::s_lower(192);
        assert!((&pts[0] - &lo).to_f64() >= 0.99e-8);
        assert!(1.0 - pts[199].to_f64() >= 0.99e-8);
        assert!(GridConfig { standoff: 0.0, ..cfg.clone() }.validate().is_err());
    }
}
