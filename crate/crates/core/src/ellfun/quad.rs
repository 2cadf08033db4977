//! Adaptive Gauss–Legendre quadrature at arbitrary precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::hp::HPReal;

const NODES: usize = 20;
const MAX_DEPTH: u32 = 60;

type Rule = Arc<Vec<(HPReal, HPReal)>>;

fn rule(n: usize, prec: u32) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache").get(&(n, prec)) {
        return r.clone();
    }
    let r = Arc::new(legendre_rule(n, prec));
    cache.lock().expect("rule cache").insert((n, prec), r.clone());
    r
}

/// Nodes and weights on [−1, 1], by Newton iteration on Pₙ.
fn legendre_rule(n: usize, prec: u32) -> Vec<(HPReal, HPReal)> {
    let wp = prec + 32;
    let one = HPReal::from_i64(1, wp);
    let eps = HPReal::from_i64(2, wp).powi(-(prec as i32) - 8);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut x = HPReal::from_f64(guess, wp);
        let mut dp = one.clone();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, &x);
            let dx = &p / &d;
            x = &x - &dx;
            dp = d;
            if dx.abs().0 < eps.0 {
                let (_, d) = legendre_and_derivative(n, &x);
                dp = d;
                break;
            }
        }
        let w = &HPReal::from_i64(2, wp) / &(&(&one - &(&x * &x)) * &(&dp * &dp));
        out.push((x.with_prec(prec), w.with_prec(prec)));
    }
    out
}

fn legendre_and_derivative(n: usize, x: &HPReal) -> (HPReal, HPReal) {
    let prec = x.prec();
    let mut p0 = HPReal::from_i64(1, prec);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((x * &p1).mul_f64(2.0 * kf - 1.0) - p0.mul_f64(kf - 1.0)).div_f64(kf);
        p0 = p1;
        p1 = p2;
    }
    // Pₙ′ = n(x Pₙ − Pₙ₋₁)/(x² − 1)
    let d = &(&(x * &p1) - &p0).mul_f64(n as f64) / &(x * x).add_f64(-1.0);
    (p1, d)
}

fn gauss<F: Fn(&HPReal) -> HPReal>(f: &F, a: &HPReal, b: &HPReal, r: &[(HPReal, HPReal)]) -> HPReal {
    let half = (b - a).mul_f64(0.5);
    let mid = (a + b).mul_f64(0.5);
    let mut acc = HPReal::zero(a.prec());
    for (x, w) in r {
        acc = &acc + &(w * &f(&(&mid + &(&half * x))));
    }
    &acc * &half
}

/// ∫ₐᵇ f, bisecting until the two-level estimates agree to `tol` on each piece.
/// Precision is taken from `a`.
pub fn integrate<F: Fn(&HPReal) -> HPReal>(f: F, a: &HPReal, b: &HPReal, tol: f64) -> HPReal {
    let prec = a.prec();
    let r = rule(NODES, prec);
    let mut total = HPReal::zero(prec);
    let mut stack = vec![(a.clone(), b.clone(), gauss(&f, a, b, &r), 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = (&lo + &hi).mul_f64(0.5);
        let left = gauss(&f, &lo, &mid, &r);
        let right = gauss(&f, &mid, &hi, &r);
        let split = &left + &right;
        if (&split - &whole).abs().to_f64() <= tol || depth >= MAX_DEPTH {
            total = &total + &split;
        } else {
            stack.push((lo, mid.clone(), left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    total
}

/// Double-precision variant with the same rule.
pub fn integrate_f64<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    let r = RULE.get_or_init(|| rule(NODES, 64).iter().map(|(x, w)| (x.to_f64(), w.to_f64())).collect());
    let g = |lo: f64, hi: f64| {
        let (h, m) = (0.5 * (hi - lo), 0.5 * (hi + lo));
        h * r.iter().map(|(x, w)| w * f(m + h * x)).sum::<f64>()
    };
    let mut total = 0.0;
    let mut stack = vec![(a, b, g(a, b), 0u32)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let (l, rr) = (g(lo, mid), g(mid, hi));
        if (l + rr - whole).abs() <= tol || depth >= MAX_DEPTH {
            total += l + rr;
        } else {
            stack.push((lo, mid, l, depth + 1));
            stack.push((mid, hi, rr, depth + 1));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let r = legendre_rule(NODES, 128);
        let s: f64 = r.iter().map(|(_, w)| w.to_f64()).sum();
        assert!((s - 2.0).abs() < 1e-30);
        let a = HPReal::from_i64(0, 128);
        let b = HPReal::from_i64(1, 128);
        let v = integrate(|x| x.powi(7), &a, &b, 1e-35);
        assert!((v.to_f64() - 0.125).abs() < 1e-30);
    }

    #[test]
    fn transcendental() {
        let a = HPReal::from_i64(0, 192);
        let b = HPReal::pi(192);
        let v = integrate(|x| x.sin(), &a, &b, 1e-45);
        assert!((&v - &HPReal::from_i64(2, 192)).abs().to_f64() < 1e-44);
        let w = integrate_f64(f64::exp, 0.0, 1.0, 1e-15);
        assert!((w - (1f64.exp() - 1.0)).abs() < 1e-14);
    }
}
