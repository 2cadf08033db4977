//! Endpoint expansions of U, v and the branches v±.

use crate::ellfun::{eval_v, s_lower};
use crate::error::Result;
use crate::hp::HPReal;

use super::grid::{Branches, GridConfig, HpPoly};
use super::{Outcome, Stage5, Stage6};

const TOL: f64 = 1e-6;

fn prec(cfg: &GridConfig) -> u32 {
    cfg.precision.max(256)
}

/// a + b√2 at precision p.
fn surd(a: f64, b: f64, p: u32) -> HPReal {
    HPReal::sqrt2(p).mul_f64(b).add_f64(a)
}

fn outcome(errs: &[(&str, f64)]) -> Outcome {
    let worst = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let parts: Vec<String> = errs.iter().map(|(n, e)| format!("{n}: {e:.2e}")).collect();
    Outcome::new(worst < TOL, Some(TOL - worst), format!("deviations {} (tolerance {TOL:.0e})", parts.join(", ")))
}

struct UEval {
    z51: HpPoly,
    z52: HpPoly,
}

impl UEval {
    fn new(st: &Stage5, p: u32) -> UEval {
        UEval { z51: HpPoly::new(st.z51(), p), z52: HpPoly::new(st.z52(), p) }
    }

    fn at(&self, s: &HPReal) -> Result<HPReal> {
        Ok(&(&self.z51.eval(s) / &self.z52.eval(s)) + &eval_v(s)?)
    }
}

/// Two Richardson steps for g(h) = c + a h + b h² + …
fn richardson<F: Fn(f64) -> Result<HPReal>>(g: F, h: f64) -> Result<HPReal> {
    let (g0, g1, g2) = (g(h)?, g(h / 2.0)?, g(h / 4.0)?);
    let r0 = &g1.mul_f64(2.0) - &g0;
    let r1 = &g2.mul_f64(2.0) - &g1;
    Ok((&r1.mul_f64(4.0) - &r0).div_f64(3.0))
}

/// U(s) ≈ −(3 + 2√2)/5 · (s − s₀)² near s₀ = √2 − 1.
pub(crate) fn u_at_left(cfg: &GridConfig, st: &Stage5) -> Result<Outcome> {
    let p = prec(cfg);
    let u = UEval::new(st, p);
    let s0 = s_lower(p);
    let est = richardson(
        |h| {
            let hh = HPReal::from_f64(h, p);
            Ok(&u.at(&(&s0 + &hh))? / &(&hh * &hh))
        },
        1e-4,
    )?;
    let want = surd(3.0, 2.0, p).div_f64(-5.0);
    Ok(outcome(&[("(s-s0)^2 coefficient", (&est - &want).abs().to_f64())]))
}

/// U(s) ≈ (1 − 2√2)/(18(1 − s)) − ½ ln(1 − s) as s → 1.
pub(crate) fn u_at_right(cfg: &GridConfig, st: &Stage5) -> Result<Outcome> {
    let p = prec(cfg);
    let u = UEval::new(st, p);
    let one = HPReal::from_i64(1, p);
    let a = surd(1.0, -2.0, p).div_f64(18.0);
    let at = |h: f64| -> Result<(HPReal, HPReal)> {
        let hh = HPReal::from_f64(h, p);
        Ok((u.at(&(&one - &hh))?, hh))
    };
    let (u1, h1) = at(1e-12)?;
    let pole = &h1 * &(&u1 + &h1.ln().mul_f64(0.5));
    let (u2, h2) = at(1e-10)?;
    let rest1 = &u1 - &(&a / &h1);
    let rest2 = &u2 - &(&a / &h2);
    let log_coef = &(&rest2 - &rest1) / &(&h2.ln() - &h1.ln());
    Ok(outcome(&[
        ("1/(1-s) coefficient", (&pole - &a).abs().to_f64()),
        ("ln(1-s) coefficient", log_coef.add_f64(0.5).abs().to_f64()),
    ]))
}

/// v and v± near √2 − 1: common cubic jet, distinct quartic terms, v₋ → 13.
pub(crate) fn v_at_left(cfg: &GridConfig, st: &Stage6) -> Result<Outcome> {
    let p = prec(cfg);
    let br = Branches::new(st, p);
    let s0 = s_lower(p);
    let c2 = surd(3.0, 2.0, p).mul_f64(0.5);
    let c3 = surd(4.0, 3.0, p).mul_f64(-0.25);
    let quartic = |f: &dyn Fn(&HPReal) -> Result<HPReal>| {
        richardson(
            |h| {
                let hh = HPReal::from_f64(h, p);
                let val = f(&(&s0 + &hh))?;
                let h2 = &hh * &hh;
                let jet = &(&c2 * &h2) + &(&c3 * &(&h2 * &hh));
                Ok(&(&val.add_f64(-1.0) - &jet) / &(&h2 * &h2))
            },
            1e-4,
        )
    };
    let qv = quartic(&|s| eval_v(s))?;
    let qp = quartic(&|s| Ok(br.eval(s).1))?;
    let want_v = surd(103.0, 72.0, p).div_f64(32.0);
    let want_p = surd(13.0, 9.0, p).div_f64(8.0);
    let vm = br.eval(&(&s0 + &HPReal::from_f64(1e-9, p))).0;
    Ok(outcome(&[
        ("v quartic", (&qv - &want_v).abs().to_f64()),
        ("v+ quartic", (&qp - &want_p).abs().to_f64()),
        ("v- limit 13", vm.add_f64(-13.0).abs().to_f64()),
    ]))
}

/// v₋ ≈ K/(1 − s) and v ≈ −½ ln(1 − s) as s → 1.
pub(crate) fn v_at_right(cfg: &GridConfig, st: &Stage6) -> Result<Outcome> {
    let p = prec(cfg);
    let br = Branches::new(st, p);
    let one = HPReal::from_i64(1, p);
    let inner = surd(29.0, 9.0, p).mul_f64(35.0).sqrt().mul_f64(2.0).add_f64(35.0);
    let k = &(&surd(181.0, 128.0, p) * &inner) * &surd(-1.0, 1.0, p).powi(6);
    let k = k.div_f64(630.0);
    let h = HPReal::from_f64(1e-10, p);
    let vm = br.eval(&(&one - &h)).0;
    let pole = &h * &vm;
    let h2 = HPReal::from_f64(1e-12, p);
    let v1 = eval_v(&(&one - &h))?;
    let v2 = eval_v(&(&one - &h2))?;
    let log_coef = &(&v1 - &v2) / &(&h.ln() - &h2.ln());
    Ok(outcome(&[
        ("v- pole coefficient", ((&pole - &k) / k.clone()).abs().to_f64()),
        ("v log coefficient", log_coef.add_f64(0.5).abs().to_f64()),
    ]))
}
