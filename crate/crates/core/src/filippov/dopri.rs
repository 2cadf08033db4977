//! Dormand–Prince 5(4) with the Hairer continuous extension.

pub type State = [f64; 2];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One trial step: the new state, its error estimate and the stage slopes.
pub struct Step {
    pub y1: State,
    pub err: State,
    pub k: [State; 7],
}

pub fn step<F: Fn(&State) -> State>(f: &F, y0: &State, k1: &State, h: f64) -> Step {
    let mut k = [[0.0; 2]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut y = *y0;
        for (j, kj) in k.iter().enumerate().take(s) {
            for d in 0..2 {
                y[d] += h * A[s][j] * kj[d];
            }
        }
        k[s] = f(&y);
    }
    // the seventh stage is evaluated at the 5th-order solution
    let mut y1 = *y0;
    for (j, kj) in k.iter().enumerate().take(6) {
        for d in 0..2 {
            y1[d] += h * A[6][j] * kj[d];
        }
    }
    let mut err = [0.0; 2];
    for (j, kj) in k.iter().enumerate() {
        for d in 0..2 {
            err[d] += h * E[j] * kj[d];
        }
    }
    Step { y1, err, k }
}

/// Weighted RMS error norm.
pub fn error_norm(s: &Step, y0: &State, rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for d in 0..2 {
        let sc = atol + rtol * y0[d].abs().max(s.y1[d].abs());
        acc += (s.err[d] / sc).powi(2);
    }
    (acc / 2.0).sqrt()
}

/// Quartic interpolant over an accepted step.
pub struct Dense {
    rc: [State; 5],
    pub t0: f64,
    pub h: f64,
}

impl Dense {
    pub fn new(t0: f64, h: f64, y0: &State, s: &Step) -> Dense {
        let mut rc = [[0.0; 2]; 5];
        for d in 0..2 {
            let ydiff = s.y1[d] - y0[d];
            let bspl = h * s.k[0][d] - ydiff;
            rc[0][d] = y0[d];
            rc[1][d] = ydiff;
            rc[2][d] = bspl;
            rc[3][d] = ydiff - h * s.k[6][d] - bspl;
            rc[4][d] = h * (0..7).map(|j| D[j] * s.k[j][d]).sum::<f64>();
        }
        Dense { rc, t0, h }
    }

    pub fn at(&self, t: f64) -> State {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; 2];
        for (d, v) in y.iter_mut().enumerate() {
            let r = &self.rc;
            *v = r[0][d] + th * (r[1][d] + th1 * (r[2][d] + th * (r[3][d] + th1 * r[4][d])));
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_step_and_dense() {
        let f = |y: &State| [-y[1], y[0]];
        let y0 = [1.0, 0.0];
        let h = 0.1;
        let s = step(&f, &y0, &f(&y0), h);
        assert!((s.y1[0] - h.cos()).abs() < 1e-8 && (s.y1[1] - h.sin()).abs() < 1e-8);
        let d = Dense::new(0.0, h, &y0, &s);
        let m = d.at(0.05);
        assert!((m[0] - 0.05f64.cos()).abs() < 1e-8 && (m[1] - 0.05f64.sin()).abs() < 1e-8);
        assert_eq!(d.at(0.0), y0);
    }
}
