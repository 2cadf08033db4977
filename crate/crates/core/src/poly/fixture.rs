//! Plain-text polynomial fixtures: one `degree coeff_rat coeff_surd` triple per line.

use std::collections::BTreeMap;

use rug::Rational;

use super::QPoly;
use crate::error::{Error, Result};
use crate::qfield::Sqrt2Rational;

/// Parses a fixture. Blank lines and `#` comments are skipped; repeated
/// degrees are summed.
pub fn parse_fixture(text: &str) -> Result<QPoly> {
    let mut terms: BTreeMap<usize, Sqrt2Rational> = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [deg, a, b] = parts[..] else {
            return Err(Error::Parse(format!("line {}: expected 3 fields", no + 1)));
        };
        let deg: usize = deg.parse().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
        let a: Rational = a.parse().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
        let b: Rational = b.parse().map_err(|e| Error::Parse(format!("line {}: {e}", no + 1)))?;
        *terms.entry(deg).or_default() += &Sqrt2Rational::new(a, b);
    }
    let n = terms.keys().next_back().map_or(0, |d| d + 1);
    let mut c = vec![Sqrt2Rational::zero(); n];
    for (d, v) in terms {
        c[d] = v;
    }
    Ok(QPoly::new(c))
}

/// Writes the nonzero coefficients in ascending degree.
pub fn write_fixture(p: &QPoly) -> String {
    let mut out = String::new();
    for (d, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            out.push_str(&format!("{d} {} {}\n", c.rat(), c.surd()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_writes() {
        let p = parse_fixture("# z\n0 3077 2176\n2 -1/2 0\n\n").unwrap();
        assert_eq!(p.coeff(0), Sqrt2Rational::from_ints(3077, 2176));
        assert_eq!(p.coeff(2), Sqrt2Rational::from_ratio(-1, 2));
        assert_eq!(parse_fixture(&write_fixture(&p)).unwrap(), p);
        assert!(parse_fixture("1 2").is_err());
    }
}
