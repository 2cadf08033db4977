//! Every polynomial used by the certificate, recomputed from a function basis.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{resultant_v, QPoly, QPoly2, SturmSequence};
use crate::qfield::Sqrt2Rational;
use crate::symdiff::{FracPoly, SBasis, build_u_du, extract_polys, g_basis, to_s, wronskian, EllExpr, ExtractedPolys, SExpr, UIdentity};

/// Objects derived from W5.
#[derive(Clone, Debug)]
pub struct Stage5 {
    pub z5: ExtractedPolys,
    pub u: UIdentity,
}

impl Stage5 {
    pub fn z51(&self) -> &QPoly {
        &self.z5.polys[0]
    }

    pub fn z52(&self) -> &QPoly {
        &self.z5.polys[1]
    }
}

/// Objects derived from W6.
#[derive(Clone, Debug)]
pub struct Stage6 {
    pub z6: ExtractedPolys,
    /// Ψ = Z61 + Z62 v + Z63 v².
    pub psi: QPoly2,
    /// Σ φ_k v^k, with Φ = 4s(1 − s²) Σ φ_k v^k.
    pub phi: QPoly2,
    pub delta: QPoly,
    /// Res_v(Ψ, Φ).
    pub resultant: QPoly,
    /// R with every basis factor divided out.
    pub core: QPoly,
    core_sturm: OnceLock<std::result::Result<(SturmSequence, usize), String>>,
}

impl Stage6 {
    pub fn z61(&self) -> &QPoly {
        &self.z6.polys[0]
    }

    pub fn z62(&self) -> &QPoly {
        &self.z6.polys[1]
    }

    pub fn z63(&self) -> &QPoly {
        &self.z6.polys[2]
    }

    pub fn phi_k(&self, k: usize) -> QPoly {
        self.phi.coeff(k)
    }

    /// Sturm sequence of the square-free part of `core` and the degree of
    /// gcd(core, core′), built on first use.
    pub fn core_sturm(&self) -> Result<(&SturmSequence, usize)> {
        self.core_sturm
            .get_or_init(|| {
                let seq = SturmSequence::new(&self.core).map_err(|e| e.to_string())?;
                let g = seq.gcd_degree();
                if g == 0 {
                    return Ok((seq, 0));
                }
                let sq = self.core.squarefree_part().map_err(|e| e.to_string())?;
                Ok((SturmSequence::new(&sq).map_err(|e| e.to_string())?, g))
            })
            .as_ref()
            .map(|(s, g)| (s, *g))
            .map_err(|e| Error::Structure(e.clone()))
    }
}

#[derive(Clone, Debug)]
pub struct Pipeline {
    pub wronskians: Vec<EllExpr>,
    pub w_s: Vec<SExpr>,
    pub stage5: std::result::Result<Stage5, String>,
    pub stage6: std::result::Result<Stage6, String>,
}

/// ṡ = 2s(s⁴ − 1)(1 − 6s² + s⁴).
pub fn s_dot() -> QPoly {
    &QPoly::from_ints(&[0, -2, 0, 0, 0, 2]) * &QPoly::from_ints(&[1, 0, -6, 0, 1])
}

/// v̇ = (1 + s²)⁴ − 32 s²(1 − s²)² v + 16 s²(1 − s²)² v².
pub fn v_dot() -> QPoly2 {
    let c = QPoly::from_ints(&[0, 0, 16, 0, -32, 0, 16]);
    QPoly2::new(vec![QPoly::from_ints(&[1, 0, 1]).pow(4), c.scale(&Sqrt2Rational::from_int(-2)), c])
}

fn stage5(w5: &SExpr) -> Result<Stage5> {
    let z5 = extract_polys(w5)?;
    if z5.polys.len() != 2 {
        return Err(Error::Structure("W5 is not linear in I, J".into()));
    }
    let u = build_u_du(&z5.polys[0], &z5.polys[1])?;
    Ok(Stage5 { z5, u })
}

fn stage6(w6: &SExpr) -> Result<Stage6> {
    let z6 = extract_polys(w6)?;
    if z6.polys.len() != 3 {
        return Err(Error::Structure("W6 is not quadratic in I, J".into()));
    }
    let psi = QPoly2::new(z6.polys.clone());
    let big_phi = psi.ds().mul_s(&s_dot()).add(&psi.dv().mul(&v_dot()));
    let phi = big_phi.exact_div_s(&QPoly::from_ints(&[0, 4, 0, -4]))?;
    let (z61, z62, z63) = (&z6.polys[0], &z6.polys[1], &z6.polys[2]);
    let delta = &(z62 * z62) - &(z61 * z63).scale(&Sqrt2Rational::from_int(4));
    let resultant = resultant_v(&psi, &big_phi)?;
    let core = FracPoly::<SBasis>::from_poly(resultant.clone()).num().clone();
    Ok(Stage6 { z6, psi, phi, delta, resultant, core, core_sturm: OnceLock::new() })
}

impl Pipeline {
    pub fn compute(basis: &[EllExpr]) -> Result<Pipeline> {
        if basis.len() != 6 {
            return Err(Error::Structure(format!("basis of {} functions, expected 6", basis.len())));
        }
        let wronskians: Vec<EllExpr> = (1..=6).into_par_iter().map(|k| wronskian(basis, k)).collect::<Result<_>>()?;
        let w_s: Vec<SExpr> = wronskians.iter().map(to_s).collect::<Result<_>>()?;
        let (stage5, stage6) = rayon::join(
            || stage5(&w_s[4]).map_err(|e| e.to_string()),
            || stage6(&w_s[5]).map_err(|e| e.to_string()),
        );
        Ok(Pipeline { wronskians, w_s, stage5, stage6 })
    }

    pub fn stage5(&self) -> Result<&Stage5> {
        self.stage5.as_ref().map_err(|e| Error::Structure(e.clone()))
    }

    pub fn stage6(&self) -> Result<&Stage6> {
        self.stage6.as_ref().map_err(|e| Error::Structure(e.clone()))
    }
}

/// The pipeline for g1, …, g6, computed once per process.
pub fn standard() -> Result<&'static Pipeline> {
    static P: OnceLock<std::result::Result<Pipeline, String>> = OnceLock::new();
    P.get_or_init(|| Pipeline::compute(&g_basis()).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Structure(e.clone()))
}
