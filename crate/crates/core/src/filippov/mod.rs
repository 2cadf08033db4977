//! Direct simulation of the discontinuous system: zone 1 is x > 0 (P1, Q1),
//! zone 2 is x < 0 (P2, Q2), switching line x = 0.

pub mod dopri;

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::PerturbCoeffs;
use crate::error::{Error, Result};

use dopri::{Dense, State};

/// Largest |x| accepted at a located switching event.
pub const EVENT_TOL: f64 = 1e-13;
/// Displacements are computed for r₀ in this range.
pub const R_RANGE: (f64, f64) = (0.05, 0.95);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub eps: f64,
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    /// Integration stops with an error after this many revolutions' worth of time.
    pub max_revolutions: f64,
    pub max_steps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { eps: 1e-3, rtol: 1e-12, atol: 1e-12, h_max: 0.25, max_revolutions: 2.0, max_steps: 200_000 }
    }
}

impl SimConfig {
    pub fn with_eps(eps: f64) -> SimConfig {
        SimConfig { eps, ..SimConfig::default() }
    }

    /// ε = 0 is accepted for unperturbed control runs.
    pub fn validate(&self) -> Result<()> {
        if !(self.eps.abs() <= 1e-2) {
            return Err(Error::Config(format!("|eps| = {} exceeds 1e-2", self.eps.abs())));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.rtol < 1e-3 && self.atol < 1e-3) {
            return Err(Error::Config(format!("tolerances rtol = {}, atol = {}", self.rtol, self.atol)));
        }
        if !(self.h_max > 0.0 && self.max_revolutions > 0.0 && self.max_steps > 0) {
            return Err(Error::Config("h_max, max_revolutions and max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// H4 = (9(x² + y²) + 24y³ + 16y⁴)/(3 + 8y)⁴.
pub fn h4(x: f64, y: f64) -> f64 {
    (9.0 * (x * x + y * y) + 24.0 * y.powi(3) + 16.0 * y.powi(4)) / (3.0 + 8.0 * y).powi(4)
}

/// r = 16 √H4.
pub fn energy_r(x: f64, y: f64) -> f64 {
    16.0 * h4(x, y).sqrt()
}

/// r of a point (0, y) on the section, without the square root.
pub fn section_r(y: f64) -> f64 {
    16.0 * y * (3.0 + 4.0 * y) / (3.0 + 8.0 * y).powi(2)
}

/// x = 3r sin θ/(16(1 − r cos θ)), y = (3/8)(−1 + (1 − r cos θ)^(−1/2)).
pub fn polar(r: f64, theta: f64) -> (f64, f64) {
    let d = 1.0 - r * theta.cos();
    (3.0 * r * theta.sin() / (16.0 * d), 0.375 * (1.0 / d.sqrt() - 1.0))
}

/// Point of the section {x = 0, y > 0} with energy coordinate r.
pub fn section_point(r: f64) -> PhaseState {
    PhaseState { x: 0.0, y: polar(r, 0.0).1, t: 0.0 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Zone {
    /// x > 0
    Right,
    /// x < 0
    Left,
}

impl Zone {
    fn sigma(self) -> f64 {
        match self {
            Zone::Right => 1.0,
            Zone::Left => -1.0,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Zone::Right => 1,
            Zone::Left => 2,
        }
    }
}

/// The two vector fields.
#[derive(Clone, Debug)]
pub struct Field {
    eps: f64,
    p: [[f64; 5]; 2],
    q: [[f64; 5]; 2],
}

impl Field {
    pub fn new(c: &PerturbCoeffs, eps: f64) -> Field {
        let conv = |z: usize| {
            let (p, q) = c.zone(z);
            (std::array::from_fn(|k| p[k].to_f64()), std::array::from_fn(|k| q[k].to_f64()))
        };
        let (p1, q1) = conv(1);
        let (p2, q2) = conv(2);
        Field { eps, p: [p1, p2], q: [q1, q2] }
    }

    pub fn eval(&self, zone: Zone, s: &State) -> State {
        let [x, y] = *s;
        let m = [x, y, x * x, x * y, y * y];
        let z = (zone.index() - 1) as usize;
        let dot = |c: &[f64; 5]| c.iter().zip(&m).map(|(a, b)| a * b).sum::<f64>();
        [
            -y + 16.0 / 3.0 * x * x - 4.0 / 3.0 * y * y + self.eps * dot(&self.p[z]),
            x + 8.0 / 3.0 * x * y + self.eps * dot(&self.q[z]),
        ]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SwitchEvent {
    pub t: f64,
    pub y: f64,
    /// |x| of the polished event state before it is set to 0.
    pub residual: f64,
    pub from: Zone,
    pub to: Zone,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrajPoint {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub zone: Zone,
}

#[derive(Clone, Debug, Serialize)]
pub struct Revolution {
    /// State on the section.
    pub end: PhaseState,
    /// Elapsed time.
    pub period: f64,
    pub switches: Vec<SwitchEvent>,
    pub steps: usize,
}

fn entering_zone(field: &Field, s: &State, t: f64) -> Result<Zone> {
    let (a, b) = (field.eval(Zone::Right, s)[0], field.eval(Zone::Left, s)[0]);
    if a > 0.0 && b > 0.0 {
        Ok(Zone::Right)
    } else if a < 0.0 && b < 0.0 {
        Ok(Zone::Left)
    } else {
        Err(Error::Sliding { t, x: s[0], y: s[1] })
    }
}

fn check_annulus(s: &State, t: f64) -> Result<()> {
    let h = h4(s[0], s[1]);
    if !(3.0 + 8.0 * s[1] > 0.0 && h > 0.0 && h < 1.0 / 256.0) {
        return Err(Error::Escape { t, h });
    }
    Ok(())
}

/// Time offset τ ∈ (0, h] at which σx vanishes, bracketed on the interpolant
/// and then polished by Newton on fresh steps of length τ.
fn locate<F: Fn(&State) -> State>(
    f: &F,
    dense: &Dense,
    y0: &State,
    k1: &State,
    sigma: f64,
) -> (f64, State) {
    let (t0, h) = (dense.t0, dense.h);
    let g = |tau: f64| sigma * dense.at(t0 + tau)[0];
    let mut lo = 0.0;
    if g(lo) <= 0.0 {
        // the step started on the line
        lo = (1..=32).map(|k| h * k as f64 / 64.0).find(|tau| g(*tau) > 0.0).unwrap_or(0.0);
    }
    let mut hi = h;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    let mut s = dopri::step(f, y0, k1, tau).y1;
    for _ in 0..8 {
        if s[0].abs() < 0.1 * EVENT_TOL {
            break;
        }
        let xdot = f(&s)[0];
        tau -= s[0] / xdot;
        s = dopri::step(f, y0, k1, tau).y1;
    }
    (tau, s)
}

/// Integrates from `state` to the next crossing of the section {x = 0, y > 0}.
pub fn step_orbit(state: &PhaseState, c: &PerturbCoeffs, cfg: &SimConfig) -> Result<Revolution> {
    step_orbit_recorded(state, c, cfg, None)
}

/// `step_orbit`, optionally appending every accepted step to `trace`.
pub fn step_orbit_recorded(
    state: &PhaseState,
    c: &PerturbCoeffs,
    cfg: &SimConfig,
    mut trace: Option<&mut Vec<TrajPoint>>,
) -> Result<Revolution> {
    cfg.validate()?;
    let field = Field::new(c, cfg.eps);
    let t_start = state.t;
    let t_limit = t_start + cfg.max_revolutions * 2.0 * PI;
    let mut t = state.t;
    let mut y: State = [state.x, state.y];
    check_annulus(&y, t)?;
    let mut zone = if y[0] > 0.0 {
        Zone::Right
    } else if y[0] < 0.0 {
        Zone::Left
    } else {
        entering_zone(&field, &y, t)?
    };
    let mut k1 = field.eval(zone, &y);
    let mut h = 1e-3f64.min(cfg.h_max);
    let h_min = 1e-14;
    let mut switches = Vec::new();
    let mut steps = 0;
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(TrajPoint { t, x: y[0], y: y[1], zone });
    }
    loop {
        if steps >= cfg.max_steps {
            return Err(Error::Sliding { t, x: y[0], y: y[1] });
        }
        if t > t_limit {
            return Err(Error::NoReturn { t: t - t_start });
        }
        let f = |s: &State| field.eval(zone, s);
        let st = dopri::step(&f, &y, &k1, h);
        let err = dopri::error_norm(&st, &y, cfg.rtol, cfg.atol);
        if !(err <= 1.0) {
            h *= if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            if h < h_min {
                return Err(Error::Sliding { t, x: y[0], y: y[1] });
            }
            continue;
        }
        steps += 1;
        let sigma = zone.sigma();
        if sigma * st.y1[0] < 0.0 {
            let dense = Dense::new(t, h, &y, &st);
            let (tau, s) = locate(&f, &dense, &y, &k1, sigma);
            let residual = s[0].abs();
            t += tau;
            y = [0.0, s[1]];
            check_annulus(&y, t)?;
            let next = entering_zone(&field, &y, t)?;
            if next == zone {
                return Err(Error::Sliding { t, x: 0.0, y: y[1] });
            }
            switches.push(SwitchEvent { t, y: y[1], residual, from: zone, to: next });
            zone = next;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(TrajPoint { t, x: 0.0, y: y[1], zone });
            }
            if y[1] > 0.0 {
                return Ok(Revolution {
                    end: PhaseState { x: 0.0, y: y[1], t },
                    period: t - t_start,
                    switches,
                    steps,
                });
            }
            k1 = field.eval(zone, &y);
            continue;
        }
        t += h;
        y = st.y1;
        k1 = st.k[6];
        check_annulus(&y, t)?;
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(TrajPoint { t, x: y[0], y: y[1], zone });
        }
        let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * grow).min(cfg.h_max);
    }
}

fn check_r0(r0: f64) -> Result<()> {
    // slack for grid endpoints computed in floating point
    if !(R_RANGE.0 - 1e-12..=R_RANGE.1 + 1e-12).contains(&r0) {
        return Err(Error::Domain { what: "r0", value: r0, domain: "[0.05, 0.95]" });
    }
    Ok(())
}

/// Δr = r₁ − r₀ after one return to the section, starting from (0, y(r₀)).
pub fn poincare_displacement(r0: f64, c: &PerturbCoeffs, cfg: &SimConfig) -> Result<f64> {
    check_r0(r0)?;
    let rev = step_orbit(&section_point(r0), c, cfg)?;
    Ok(section_r(rev.end.y) - r0)
}

/// (r₀, Δr) on a uniform grid of `points` values across `window`, inclusive.
pub fn displacement_sweep(c: &PerturbCoeffs, cfg: &SimConfig, window: (f64, f64), points: usize) -> Result<Vec<(f64, f64)>> {
    if points < 2 || !(window.0 < window.1) {
        return Err(Error::Config(format!("sweep of {points} points over {window:?}")));
    }
    let grid: Vec<f64> =
        (0..points).map(|i| window.0 + (window.1 - window.0) * i as f64 / (points - 1) as f64).collect();
    grid.par_iter().map(|r| poincare_displacement(*r, c, cfg).map(|d| (*r, d))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitCycle {
    pub r: f64,
    /// Δr at r.
    pub residual: f64,
    /// Δr > 0 below and < 0 above.
    pub stable: bool,
}

/// Bisection iterations applied to each bracket.
const REFINE_STEPS: usize = 40;
pub const DEFAULT_SCAN_POINTS: usize = 91;

/// Fixed points of the return map in `window`: sign changes of Δr on a scan
/// grid, each refined by bisection.
pub fn find_limit_cycles(
    c: &PerturbCoeffs,
    cfg: &SimConfig,
    window: (f64, f64),
    scan_points: usize,
) -> Result<Vec<LimitCycle>> {
    check_r0(window.0)?;
    check_r0(window.1)?;
    let sweep = displacement_sweep(c, cfg, window, scan_points)?;
    let brackets: Vec<((f64, f64), (f64, f64))> = sweep
        .windows(2)
        .filter(|w| w[0].1 == 0.0 || w[0].1 * w[1].1 < 0.0)
        .map(|w| (w[0], w[1]))
        .collect();
    brackets
        .par_iter()
        .map(|&((mut lo, mut dlo), (mut hi, dhi))| {
            let stable = dlo > 0.0 || (dlo == 0.0 && dhi < 0.0);
            if dlo == 0.0 {
                return Ok(LimitCycle { r: lo, residual: 0.0, stable });
            }
            for _ in 0..REFINE_STEPS {
                let mid = 0.5 * (lo + hi);
                let d = poincare_displacement(mid, c, cfg)?;
                if d == 0.0 {
                    (lo, hi) = (mid, mid);
                    break;
                }
                if d.signum() == dlo.signum() {
                    (lo, dlo) = (mid, d);
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            Ok(LimitCycle { r, residual: poincare_displacement(r, c, cfg)?, stable })
        })
        .collect()
}

pub fn write_trajectory_csv<W: Write>(mut w: W, pts: &[TrajPoint]) -> Result<()> {
    writeln!(w, "t,x,y,zone")?;
    for p in pts {
        writeln!(w, "{:.17e},{:.17e},{:.17e},{}", p.t, p.x, p.y, p.zone.index())?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[(f64, f64)]) -> Result<()> {
    writeln!(w, "r0,dr")?;
    for (r, d) in rows {
        writeln!(w, "{r:.17e},{d:.17e}")?;
    }
    Ok(())
}
