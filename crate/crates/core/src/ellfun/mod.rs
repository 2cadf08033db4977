//! Complete elliptic integrals and the functions I(r), J(r), v(s).

pub mod quad;

use crate::error::{Error, Result};
use crate::hp::HPReal;

/// Extra bits carried inside iterations.
const GUARD_BITS: u32 = 32;

/// Precision used when an argument is within this distance of a singular endpoint.
pub const ENDPOINT_DISTANCE: f64 = 1e-6;
pub const ENDPOINT_PREC: u32 = 256;

/// I(r) and J(r) at one point.
#[derive(Clone, Debug)]
pub struct EllPair {
    pub i: HPReal,
    pub j: HPReal,
    pub r: HPReal,
}

/// Complete integrals K(m), E(m) in the parameter convention, by the AGM.
pub fn agm_ke(m: &HPReal) -> Result<(HPReal, HPReal)> {
    let mf = m.to_f64();
    if m.signum() < 0 || m.add_f64(-1.0).signum() >= 0 || !m.is_finite() {
        return Err(Error::Domain { what: "m", value: mf, domain: "[0, 1)" });
    }
    let out_prec = m.prec();
    let prec = out_prec + GUARD_BITS;
    let m = m.with_prec(prec);
    let one = HPReal::from_i64(1, prec);
    let mut a = one.clone();
    let mut b = (&one - &m).sqrt();
    // Σ 2ⁿ cₙ², with c₀² = m
    let mut sum = m.clone();
    let mut pow2 = HPReal::from_i64(1, prec);
    let tol = HPReal::from_i64(2, prec).powi(-(prec as i32));
    for _ in 0..200 {
        let c = (&a - &b).mul_f64(0.5);
        if c.abs().0 <= (&tol * &a).0 {
            break;
        }
        let an = (&a + &b).mul_f64(0.5);
        let bn = (&a * &b).sqrt();
        pow2 = pow2.mul_f64(2.0);
        sum = &sum + &(&pow2 * &(&c * &c));
        a = an;
        b = bn;
    }
    let k = &HPReal::pi(prec) / &a.mul_f64(2.0);
    let e = &k * &(&one - &sum.mul_f64(0.5));
    Ok((k.with_prec(out_prec), e.with_prec(out_prec)))
}

fn escalated(prec: u32, distance: f64) -> u32 {
    if distance < ENDPOINT_DISTANCE {
        prec.max(ENDPOINT_PREC)
    } else {
        prec
    }
}

/// I(r) = ∫₀^π √(1 − r cos θ) dθ and J(r) = ∫₀^π (1 − r cos θ)^(−1/2) dθ.
pub fn eval_ij(r: &HPReal) -> Result<EllPair> {
    let rf = r.to_f64();
    if r.signum() < 0 || r.add_f64(-1.0).signum() >= 0 || !r.is_finite() {
        return Err(Error::Domain { what: "r", value: rf, domain: "[0, 1)" });
    }
    let out = r.prec();
    let prec = escalated(out, (&HPReal::from_i64(1, out) - r).to_f64());
    let r = r.with_prec(prec);
    let one_plus = r.add_f64(1.0);
    let m = &r.mul_f64(2.0) / &one_plus;
    let (k, e) = agm_ke(&m)?;
    let sq = one_plus.sqrt();
    let i = (&sq * &e).mul_f64(2.0);
    let j = &k.mul_f64(2.0) / &sq;
    Ok(EllPair { i: i.with_prec(out), j: j.with_prec(out), r: r.with_prec(out) })
}

/// r(s) = (−1 + 6s² − s⁴)/(1 + s²)².
pub fn r_of_s_hp(s: &HPReal) -> HPReal {
    let s2 = s * s;
    let num = (&s2.mul_f64(6.0) - &(&s2 * &s2)).add_f64(-1.0);
    let den = s2.add_f64(1.0);
    &num / &(&den * &den)
}

pub fn s_lower(prec: u32) -> HPReal {
    HPReal::sqrt2(prec).add_f64(-1.0)
}

/// v(s) = J(r(s))/I(r(s)) on the open interval (√2 − 1, 1).
pub fn eval_v(s: &HPReal) -> Result<HPReal> {
    let out = s.prec();
    let lo = s_lower(out + GUARD_BITS);
    let d_lo = (s - &lo).to_f64();
    let d_hi = 1.0 - s.to_f64();
    if s.0 <= lo.0 || s.add_f64(-1.0).signum() >= 0 {
        return Err(Error::Domain { what: "s", value: s.to_f64(), domain: "(sqrt2 - 1, 1)" });
    }
    let prec = escalated(out, d_lo.min(d_hi));
    let s = s.with_prec(prec);
    let p = eval_ij(&r_of_s_hp(&s))?;
    Ok((&p.j / &p.i).with_prec(out))
}

/// Right side of the Riccati relation dv/ds = N(s, v)/(2s(s⁴ − 1)(1 − 6s² + s⁴)).
pub fn riccati_rhs(s: &HPReal, v: &HPReal) -> HPReal {
    let s2 = s * s;
    let one_plus = s2.add_f64(1.0);
    let one_minus = (&HPReal::from_i64(1, s.prec()) - &s2).powi(2);
    let a = one_plus.powi(4);
    let c = (&s2 * &one_minus).mul_f64(16.0);
    let num = &(&a - &(&c * v).mul_f64(2.0)) + &(&c * &(v * v));
    let quartic = (&s2.mul_f64(-6.0) + &(&s2 * &s2)).add_f64(1.0);
    let den = &(&s.mul_f64(2.0) * &(&s2 * &s2).add_f64(-1.0)) * &quartic;
    &num / &den
}

#[cfg(test)]
mod tests {
    use super::quad::integrate;
    use super::*;

    const P: u32 = 160;

    fn hp(x: f64) -> HPReal {
        HPReal::from_f64(x, P)
    }

    fn ke_quadrature(m: f64) -> (HPReal, HPReal) {
        let m = hp(m);
        let hi = HPReal::pi(P).mul_f64(0.5);
        let k = integrate(|t| (&HPReal::from_i64(1, P) - &(&m * &t.sin().powi(2))).sqrt().recip(), &hp(0.0), &hi, 1e-40);
        let e = integrate(|t| (&HPReal::from_i64(1, P) - &(&m * &t.sin().powi(2))).sqrt(), &hp(0.0), &hi, 1e-40);
        (k, e)
    }

    #[test]
    fn agm_at_zero() {
        let (k, e) = agm_ke(&hp(0.0)).unwrap();
        let half_pi = HPReal::pi(P).mul_f64(0.5);
        assert!((&k - &half_pi).abs().to_f64() < 1e-45);
        assert!((&e - &half_pi).abs().to_f64() < 1e-45);
    }

    #[test]
    fn agm_matches_quadrature() {
        let (k, e) = agm_ke(&hp(0.5)).unwrap();
        let (kq, eq) = ke_quadrature(0.5);
        assert!((&k - &kq).abs().to_f64() < 1e-30);
        assert!((&e - &eq).abs().to_f64() < 1e-30);
    }

    #[test]
    fn agm_log_asymptote() {
        let d = 1e-10;
        let (k, _) = agm_ke(&hp(1.0 - d)).unwrap();
        let approx = 0.5 * (16.0 / d).ln();
        assert!((k.to_f64() - approx).abs() / approx < 1e-6);
        assert!(agm_ke(&hp(1.0)).is_err());
    }

    #[test]
    fn ij_closed_forms() {
        let p = eval_ij(&hp(0.0)).unwrap();
        assert!((&p.i - &HPReal::pi(P)).abs().to_f64() < 1e-45);
        assert!((&p.j - &HPReal::pi(P)).abs().to_f64() < 1e-45);
        let r = hp(0.5);
        let p = eval_ij(&r).unwrap();
        let pi = HPReal::pi(P);
        let iq = integrate(|t| (&HPReal::from_i64(1, P) - &(&r * &t.cos())).sqrt(), &hp(0.0), &pi, 1e-40);
        let jq = integrate(|t| (&HPReal::from_i64(1, P) - &(&r * &t.cos())).sqrt().recip(), &hp(0.0), &pi, 1e-40);
        assert!((&p.i - &iq).abs().to_f64() < 1e-25);
        assert!((&p.j - &jq).abs().to_f64() < 1e-25);
        let p = eval_ij(&hp(0.99)).unwrap();
        assert!(p.j.0 > p.i.0);
        assert!((&p.i * &p.j).0 >= (&pi * &pi).0);
        assert!(eval_ij(&hp(1.0)).is_err());
    }

    #[test]
    fn v_near_lower_endpoint() {
        let s0 = s_lower(P);
        let v = eval_v(&s0.add_f64(1e-9)).unwrap();
        assert!((v.to_f64() - 1.0).abs() < 1e-15);
        assert!(eval_v(&s0.add_f64(-1e-30)).is_err());
        assert!(eval_v(&hp(1.0)).is_err());
    }

    #[test]
    fn v_satisfies_riccati() {
        let s = hp(0.7);
        let h = hp(1e-12);
        let dv = &(&eval_v(&(&s + &h)).unwrap() - &eval_v(&(&s - &h)).unwrap()) / &h.mul_f64(2.0);
        let rhs = riccati_rhs(&s, &eval_v(&s).unwrap());
        assert!(((&dv - &rhs) / rhs.clone()).abs().to_f64() < 1e-15);
    }
}
