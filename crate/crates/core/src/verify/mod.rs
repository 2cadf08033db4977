//! Certification of the Chebyshev property of g1, …, g6 on (0, 1).

mod asymptotic;
mod grid;
pub mod pipeline;
pub mod spots;
mod tangency;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::HPReal;
use crate::poly::{sturm_count, QPoly, RootInterval, SturmSequence};
use crate::qfield::{Sign, Sqrt2Rational};
use crate::symdiff::{degenerate_basis, g_basis, EllExpr, FactorSet, FracPoly, SBasis, SExpr};

pub use grid::{GridConfig, HpPoly};
pub use pipeline::{Pipeline, Stage5, Stage6};
pub use tangency::{tangency_scan, BranchScan, TangencyReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exact symbolic identity.
    Exact,
    Sturm,
    NumericGrid,
    Asymptotic,
    /// Comparison with hand-copied coefficients.
    Fixture,
}

impl Method {
    pub fn is_rigorous(self) -> bool {
        matches!(self, Method::Exact | Method::Sturm | Method::Fixture)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn of(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub method: Method,
    pub statement: String,
    pub verdict: Verdict,
    pub margin: Option<f64>,
    pub seconds: f64,
    /// "exact" or "high-confidence, non-rigorous".
    pub rigor: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub checks: Vec<CheckRecord>,
    pub overall: Verdict,
    /// Isolating interval of the unique tangency root, when found.
    pub s0: Option<RootInterval>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.overall == Verdict::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Which object to certify.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Variant {
    #[default]
    Standard,
    /// g6 replaced by g5.
    DegenerateBasis,
    /// Recomputed Z52 perturbed in one spot coefficient.
    TamperZ52,
}

/// Outcome of one check before timing is attached.
struct Outcome {
    ok: bool,
    margin: Option<f64>,
    statement: String,
}

impl Outcome {
    fn new(ok: bool, margin: Option<f64>, statement: impl Into<String>) -> Outcome {
        Outcome { ok, margin, statement: statement.into() }
    }

    fn failed(e: impl std::fmt::Display) -> Outcome {
        Outcome::new(false, None, format!("not evaluated: {e}"))
    }
}

struct Recorder {
    checks: Vec<CheckRecord>,
    timing: bool,
}

impl Recorder {
    fn run(&mut self, name: &str, method: Method, f: impl FnOnce() -> Result<Outcome>) {
        let t = Instant::now();
        let o = f().unwrap_or_else(Outcome::failed);
        let seconds = if self.timing { t.elapsed().as_secs_f64() } else { 0.0 };
        self.checks.push(CheckRecord {
            name: name.into(),
            method,
            statement: o.statement,
            verdict: Verdict::of(o.ok),
            margin: o.margin.filter(|m| m.is_finite()),
            seconds,
            rigor: if method.is_rigorous() { "exact" } else { "high-confidence, non-rigorous" }.into(),
        });
    }
}

pub fn s_lo() -> Sqrt2Rational {
    Sqrt2Rational::from_ints(-1, 1)
}

pub fn s_hi() -> Sqrt2Rational {
    Sqrt2Rational::one()
}

fn midpoint() -> Sqrt2Rational {
    Sqrt2Rational::from_ratio(7, 10)
}

/// Every factor appearing with nonzero exponent is root-free inside the interval.
fn factors_root_free<F: FactorSet>(f: &FracPoly<F>) -> Result<bool> {
    for (j, &e) in f.exps().iter().enumerate() {
        if e != 0 && sturm_count(&F::factors()[j].poly, &s_lo(), &s_hi())? != 0 {
            return Ok(false);
        }
    }
    Ok(sturm_count(f.num(), &s_lo(), &s_hi())? == 0)
}

/// p has no root in (√2 − 1, 1) and the given sign there.
fn sign_definite(p: &QPoly, want: Sign, label: &str) -> Result<Outcome> {
    let roots = sturm_count(p, &s_lo(), &s_hi())?;
    let sign = p.sign_at(&midpoint());
    let ok = roots == 0 && sign == want;
    let rel = match want {
        Sign::Negative => "< 0",
        _ => "> 0",
    };
    Ok(Outcome::new(ok, None, format!("{label} {rel} on (sqrt2-1, 1): {roots} roots, sign {sign:?} at s = 7/10")))
}

fn sexpr_root_free(e: &SExpr, label: &str) -> Result<Outcome> {
    let only = e.terms().len() == 1 && e.coeff(0, 0).is_some();
    if !only {
        return Ok(Outcome::new(false, None, format!("{label} carries I, J terms")));
    }
    let c = e.coeff(0, 0).expect("checked");
    let ok = factors_root_free(c)?;
    Ok(Outcome::new(
        ok,
        None,
        format!("{label}(s) numerator of degree {:?} and its factors have no root in (sqrt2-1, 1)", c.num().degree()),
    ))
}

/// Cofactor of R after all basis factors are divided out.
pub fn resultant_core(r: &QPoly) -> QPoly {
    FracPoly::<SBasis>::from_poly(r.clone()).num().clone()
}

fn unique_simple_root(st: &Stage6) -> Result<Outcome> {
    let (seq, gcd_deg) = st.core_sturm()?;
    let count = sturm_count_with(seq, &s_lo(), &s_hi())?;
    let simple = gcd_deg == 0 || {
        let g = st.core.gcd(&st.core.derivative());
        sturm_count(&g, &s_lo(), &s_hi())? == 0
    };
    Ok(Outcome::new(
        count == 1 && simple,
        None,
        format!(
            "resultant cofactor of degree {:?}: {count} distinct roots in (sqrt2-1, 1), gcd(R, R') degree {gcd_deg}",
            st.core.degree()
        ),
    ))
}

/// Isolating interval of width at most `width` for the unique root of the
/// resultant in (√2 − 1, 1).
pub fn locate_s0(width: &Sqrt2Rational) -> Result<RootInterval> {
    locate_root(pipeline::standard()?.stage6()?, width)
}

fn sturm_count_with(seq: &SturmSequence, lo: &Sqrt2Rational, hi: &Sqrt2Rational) -> Result<usize> {
    if seq.sign_of_p(lo) == Sign::Zero || seq.sign_of_p(hi) == Sign::Zero {
        return Err(Error::Structure("resultant cofactor vanishes at an endpoint".into()));
    }
    Ok(seq.count_between(lo, hi))
}

fn locate_root(st: &Stage6, width: &Sqrt2Rational) -> Result<RootInterval> {
    let (seq, _) = st.core_sturm()?;
    let (mut lo, mut hi) = (s_lo(), s_hi());
    let n = sturm_count_with(seq, &lo, &hi)?;
    if n != 1 {
        return Err(Error::Structure(format!("{n} roots of the resultant in (sqrt2-1, 1)")));
    }
    let half = Sqrt2Rational::from_ratio(1, 2);
    let nudge = width.mul_rational(&rug::Rational::from((1, 1024)));
    while &(&hi - &lo) > width {
        let mut mid = &(&lo + &hi) * &half;
        if seq.sign_of_p(&mid) == Sign::Zero {
            mid = &mid + &nudge;
        }
        if seq.count_between(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RootInterval { lo, hi, multiplicity_one: true })
}

fn spot_outcome(named: &[(&str, QPoly)]) -> Outcome {
    let mut bad = Vec::new();
    let mut total = 0;
    for (n, p) in named {
        let r = spots::check_spots(n, p);
        total += r.checked;
        if !r.passed() {
            bad.push(format!("{n} (degrees {:?}, factor divides {})", r.mismatched, r.factor_divides));
        }
    }
    let statement = if bad.is_empty() {
        format!("{total} hand-copied coefficients agree with recomputed polynomials")
    } else {
        format!("mismatch in {}", bad.join(", "))
    };
    Outcome::new(bad.is_empty(), None, statement)
}

/// Full certificate for g1, …, g6.
pub fn certify_ect(cfg: &GridConfig) -> Result<CertificateReport> {
    certify_variant(cfg, Variant::Standard)
}

pub fn certify_variant(cfg: &GridConfig, variant: Variant) -> Result<CertificateReport> {
    cfg.validate()?;
    let owned;
    let p: &Pipeline = match variant {
        Variant::DegenerateBasis => {
            owned = Pipeline::compute(&degenerate_basis())?;
            &owned
        }
        _ => pipeline::standard()?,
    };
    let mut st5 = p.stage5.clone();
    if variant == Variant::TamperZ52 {
        if let Ok(s) = st5.as_mut() {
            let mut c = s.z5.polys[1].coeffs().to_vec();
            c[1] += &Sqrt2Rational::one();
            s.z5.polys[1] = QPoly::new(c);
        }
    }
    certify_pipeline(cfg, p, st5.as_ref().map_err(|e| e.clone()), p.stage6.as_ref().map_err(|e| e.clone()))
}

/// Certificate for an arbitrary six-element basis.
pub fn certify_basis(cfg: &GridConfig, basis: &[EllExpr]) -> Result<CertificateReport> {
    cfg.validate()?;
    let p = Pipeline::compute(basis)?;
    certify_pipeline(cfg, &p, p.stage5.as_ref().map_err(|e| e.clone()), p.stage6.as_ref().map_err(|e| e.clone()))
}

fn need<'a, T>(r: &'a std::result::Result<&T, String>) -> Result<&'a T> {
    r.as_ref().map(|x| *x).map_err(|e| Error::Structure(e.clone()))
}

fn certify_pipeline(
    cfg: &GridConfig,
    p: &Pipeline,
    st5: std::result::Result<&Stage5, String>,
    st6: std::result::Result<&Stage6, String>,
) -> Result<CertificateReport> {
    let mut rec = Recorder { checks: Vec::new(), timing: cfg.record_timing };
    let g = g_basis();
    let w = &p.wronskians;

    rec.run("W1", Method::Exact, || {
        Ok(Outcome::new(w[0] == g[0], None, "W1 = r, positive on (0, 1)"))
    });
    rec.run("W2", Method::Exact, || {
        let r2 = EllExpr::from_poly(QPoly::from_ints(&[0, 0, 1]));
        Ok(Outcome::new(w[1] == r2, None, "W2 = r^2, positive on (0, 1)"))
    });
    rec.run("W3", Method::Sturm, || sexpr_root_free(&p.w_s[2], "W3"));
    rec.run("W4", Method::Sturm, || sexpr_root_free(&p.w_s[3], "W4"));

    rec.run("W5 shape", Method::Exact, || {
        let s = need(&st5)?;
        let ok = factors_root_free(&s.z5.prefactor)?;
        Ok(Outcome::new(ok, None, format!("W5 = Z5 (Z51 I + Z52 J), Z5 = {} has no zero or pole inside", s.z5.prefactor)))
    });
    rec.run("Z52 < 0", Method::Sturm, || sign_definite(need(&st5)?.z52(), Sign::Negative, "Z52"));
    rec.run("Zbar < 0", Method::Sturm, || {
        let s = need(&st5)?;
        let mut o = sign_definite(&s.u.zbar, Sign::Negative, "Zbar")?;
        let deg = s.u.zbar.degree();
        o.ok &= deg == Some(56);
        o.statement = format!("{}; degree {deg:?}", o.statement);
        Ok(o)
    });
    rec.run("U < 0", Method::NumericGrid, || grid::u_negative(cfg, need(&st5)?));
    rec.run("U expansion at sqrt2-1", Method::Asymptotic, || asymptotic::u_at_left(cfg, need(&st5)?));
    rec.run("U expansion at 1", Method::Asymptotic, || asymptotic::u_at_right(cfg, need(&st5)?));

    rec.run("W6 shape", Method::Exact, || {
        let s = need(&st6)?;
        let ok = factors_root_free(&s.z6.prefactor)?;
        Ok(Outcome::new(
            ok,
            None,
            format!("W6 = Z6 (Z61 I^2 + Z62 IJ + Z63 J^2), Z6 = {} has no zero or pole inside", s.z6.prefactor),
        ))
    });
    rec.run("Z63 < 0", Method::Sturm, || sign_definite(need(&st6)?.z63(), Sign::Negative, "Z63"));
    rec.run("Delta > 0", Method::Sturm, || sign_definite(&need(&st6)?.delta, Sign::Positive, "Delta"));
    rec.run("phi3 < 0", Method::Sturm, || sign_definite(&need(&st6)?.phi_k(3), Sign::Negative, "phi3"));
    let mut s0 = None;
    rec.run("R unique simple root", Method::Sturm, || {
        let s = need(&st6)?;
        let mut o = unique_simple_root(s)?;
        o.ok &= s.resultant.degree() == Some(250);
        o.statement = format!("{}; full degree {:?}", o.statement, s.resultant.degree());
        if o.ok {
            s0 = Some(locate_root(s, &Sqrt2Rational::from_ratio(1, 1 << 20))?);
        }
        Ok(o)
    });
    rec.run("v- > v > v+", Method::NumericGrid, || grid::branch_order(cfg, need(&st6)?));
    rec.run("Vieta", Method::NumericGrid, || grid::vieta(cfg, need(&st6)?));
    rec.run("v expansion at sqrt2-1", Method::Asymptotic, || asymptotic::v_at_left(cfg, need(&st6)?));
    rec.run("v expansion at 1", Method::Asymptotic, || asymptotic::v_at_right(cfg, need(&st6)?));
    rec.run("tangency scan", Method::NumericGrid, || {
        let s = need(&st6)?;
        let t = tangency::scan_stage(cfg, s, s0.as_ref())?;
        Ok(Outcome::new(t.consistent, None, t.summary()))
    });

    rec.run("spot coefficients", Method::Fixture, || {
        let s5 = need(&st5)?;
        let s6 = need(&st6)?;
        let mut named = vec![
            ("Z51", s5.z51().clone()),
            ("Z52", s5.z52().clone()),
            ("Zbar", s5.u.zbar.clone()),
            ("Z61", s6.z61().clone()),
            ("Z62", s6.z62().clone()),
            ("Z63", s6.z63().clone()),
            ("Delta", s6.delta.clone()),
            ("R", s6.resultant.clone()),
        ];
        for (k, n) in ["Phi0", "Phi1", "Phi2", "Phi3"].iter().enumerate() {
            named.push((n, s6.phi_k(k)));
        }
        Ok(spot_outcome(&named))
    });

    let overall = Verdict::of(rec.checks.iter().all(|c| c.verdict == Verdict::Pass));
    Ok(CertificateReport { checks: rec.checks, overall, s0 })
}

/// Sign changes of f over an ordered grid, with the bracketing indices.
pub(crate) fn sign_changes(vals: &[HPReal]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut last = 0;
    for (k, v) in vals.iter().enumerate() {
        let s = v.signum();
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            out.push(k);
        }
        last = s;
    }
    out
}
