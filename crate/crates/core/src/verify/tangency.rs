//! Sign of Φ = Ψ_s ṡ + Ψ_v v̇ along Γ = {v = v(s)} and along the branches of Ψ = 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::ellfun::eval_v;
use crate::error::Result;
use crate::hp::HPReal;
use crate::poly::RootInterval;

use super::grid::{Branches, GridConfig, HpPoly};
use super::{pipeline, sign_changes, Stage6};

#[derive(Clone, Debug, Serialize)]
pub struct BranchScan {
    pub name: String,
    /// Brackets [s_before, s_after] of each sign change.
    pub changes: Vec<(f64, f64)>,
    /// Sign of Φ at the first grid point.
    pub sign_at_left: i32,
}

#[derive(Clone, Debug, Serialize)]
pub struct TangencyReport {
    pub gamma: BranchScan,
    pub plus: BranchScan,
    pub minus: BranchScan,
    pub s0: Option<RootInterval>,
    pub consistent: bool,
}

impl TangencyReport {
    pub fn summary(&self) -> String {
        let n = |b: &BranchScan| b.changes.len();
        format!(
            "sign changes of Phi: {} along v(s), {} along v+, {} along v-; tangency root {}",
            n(&self.gamma),
            n(&self.plus),
            n(&self.minus),
            match &self.s0 {
                Some(iv) => format!("near s = {:.12}", iv.midpoint_f64()),
                None => "not located".into(),
            }
        )
    }
}

fn scan(name: &str, s: &[HPReal], vals: &[HPReal]) -> BranchScan {
    let changes = sign_changes(vals).into_iter().map(|k| (s[k - 1].to_f64(), s[k].to_f64())).collect();
    BranchScan { name: name.into(), changes, sign_at_left: vals.first().map(HPReal::signum).unwrap_or(0) }
}

pub(crate) fn scan_stage(cfg: &GridConfig, st: &Stage6, s0: Option<&RootInterval>) -> Result<TangencyReport> {
    let p = cfg.precision;
    let phi: Vec<HpPoly> = (0..4).map(|k| HpPoly::new(&st.phi_k(k), p)).collect();
    let br = Branches::new(st, p);
    let eval_phi = |s: &HPReal, v: &HPReal| {
        let mut acc = HPReal::zero(p);
        for c in phi.iter().rev() {
            acc = &(&acc * v) + &c.eval(s);
        }
        acc
    };
    let pts = cfg.points();
    let rows: Vec<(HPReal, HPReal, HPReal)> = pts
        .par_iter()
        .map(|s| {
            let (vm, vp) = br.eval(s);
            Ok((eval_phi(s, &eval_v(s)?), eval_phi(s, &vp), eval_phi(s, &vm)))
        })
        .collect::<Result<_>>()?;
    let col = |k: usize| -> Vec<HPReal> {
        rows.iter().map(|r| match k {
            0 => r.0.clone(),
            1 => r.1.clone(),
            _ => r.2.clone(),
        })
        .collect()
    };
    let gamma = scan("v", &pts, &col(0));
    let plus = scan("v+", &pts, &col(1));
    let minus = scan("v-", &pts, &col(2));
    let branch_changes: Vec<(f64, f64)> = plus.changes.iter().chain(&minus.changes).copied().collect();
    let located = match s0 {
        Some(iv) => {
            let (lo, hi) = (iv.lo.to_f64(), iv.hi.to_f64());
            branch_changes.len() == 1 && branch_changes[0].0 <= hi && lo <= branch_changes[0].1
        }
        None => branch_changes.is_empty(),
    };
    let consistent = located && gamma.changes.len() <= 1;
    Ok(TangencyReport { gamma, plus, minus, s0: s0.cloned(), consistent })
}

/// Tangency scan for g1, …, g6.
pub fn tangency_scan(cfg: &GridConfig) -> Result<TangencyReport> {
    cfg.validate()?;
    let st = pipeline::standard()?.stage6()?;
    let s0 = super::locate_s0(&crate::qfield::Sqrt2Rational::from_ratio(1, 1 << 20))?;
    scan_stage(cfg, st, Some(&s0))
}
