//! Hand-copied coefficients used only for comparison with recomputed polynomials.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::QPoly;
use crate::qfield::Sqrt2Rational;

const SPOTS: &str = include_str!("spots.txt");

#[derive(Clone, Debug)]
pub struct Spot {
    pub name: String,
    pub degree: usize,
    pub value: Sqrt2Rational,
}

pub fn spots() -> &'static [Spot] {
    static S: OnceLock<Vec<Spot>> = OnceLock::new();
    S.get_or_init(|| parse_spots(SPOTS).expect("bundled spot table parses"))
}

pub fn parse_spots(text: &str) -> Result<Vec<Spot>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("spot table line {}: {line:?}", n + 1));
        if f.len() != 5 {
            return Err(bad());
        }
        let degree = f[1].parse().map_err(|_| bad())?;
        let k: rug::Integer = f[2].parse().map_err(|_| bad())?;
        let a: rug::Integer = f[3].parse().map_err(|_| bad())?;
        let b: rug::Integer = f[4].parse().map_err(|_| bad())?;
        let value = Sqrt2Rational::new(k.clone() * a, k * b);
        out.push(Spot { name: f[0].to_string(), degree, value });
    }
    Ok(out)
}

/// The displayed factor in front of each cofactor.
pub fn displayed_factor(name: &str) -> Option<QPoly> {
    let p = QPoly::from_ints;
    let one_plus_s2 = p(&[1, 0, 1]);
    let s_one_minus_s2 = p(&[0, 1, 0, -1]);
    let plus = p(&[1, 2, -1]);
    let minus = p(&[1, -2, -1]);
    let k = |c: i64, q: QPoly| q.scale(&Sqrt2Rational::from_int(c));
    Some(match name {
        "Z51" => one_plus_s2.pow(2),
        "Z52" => k(4, s_one_minus_s2),
        "Z61" => one_plus_s2.pow(4),
        "Z62" => k(8, &s_one_minus_s2 * &one_plus_s2.pow(2)),
        "Z63" => k(16, s_one_minus_s2.pow(2)),
        "Zbar" => QPoly::one(),
        "Delta" => k(11520, &(&s_one_minus_s2.pow(2) * &one_plus_s2.pow(4)) * &plus.pow(4)),
        "Phi0" => one_plus_s2.pow(4),
        "Phi1" => k(4, one_plus_s2.pow(2)),
        "Phi2" => k(16, s_one_minus_s2),
        "Phi3" => k(128, s_one_minus_s2.pow(3)),
        "R" => k(
            1_592_524_800,
            &(&(&s_one_minus_s2.pow(6) * &minus.pow(4)) * &one_plus_s2.pow(10)) * &plus.pow(12),
        ),
        _ => return None,
    })
}

/// Outcome of comparing one polynomial with its spot table.
#[derive(Clone, Debug, Serialize)]
pub struct SpotReport {
    pub name: String,
    pub checked: usize,
    pub mismatched: Vec<usize>,
    /// False when the displayed factor does not divide the polynomial.
    pub factor_divides: bool,
}

impl SpotReport {
    pub fn passed(&self) -> bool {
        self.factor_divides && self.mismatched.is_empty() && self.checked > 0
    }
}

pub fn check_spots(name: &str, full: &QPoly) -> SpotReport {
    let mut rep = SpotReport { name: name.into(), checked: 0, mismatched: vec![], factor_divides: false };
    let Some(f) = displayed_factor(name) else { return rep };
    let Ok(inner) = full.exact_div(&f) else { return rep };
    rep.factor_divides = true;
    for s in spots().iter().filter(|s| s.name == name) {
        rep.checked += 1;
        if inner.coeff(s.degree) != s.value {
            rep.mismatched.push(s.degree);
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_parses() {
        let s = spots();
        assert!(s.len() > 50);
        let z = s.iter().find(|s| s.name == "Z51" && s.degree == 0).unwrap();
        assert_eq!(z.value, Sqrt2Rational::from_ints(3077, 2176));
        assert!(parse_spots("Z51 0 1 2").is_err());
    }
}
