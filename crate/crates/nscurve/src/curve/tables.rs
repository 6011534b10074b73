//! Embedded basis data: second-kind numerators and the reference singular
//! parts, stored as versioned text fixtures in the crate.

use super::{parse_xy, CurveSpec, XYPoly};
use crate::ring::WeightedPoly;
use crate::series::PolyRing;

const DR_2_3: &str = include_str!("../../fixtures/dr_2_3.txt");
const DR_3_4: &str = include_str!("../../fixtures/dr_3_4.txt");
const DR_3_5: &str = include_str!("../../fixtures/dr_3_5.txt");
const DR_3_7: &str = include_str!("../../fixtures/dr_3_7.txt");
const DR_4_5: &str = include_str!("../../fixtures/dr_4_5.txt");

const RSING_3_4: &str = include_str!("../../fixtures/rsing_3_4.txt");
const RSING_3_5: &str = include_str!("../../fixtures/rsing_3_5.txt");
const RSING_3_7: &str = include_str!("../../fixtures/rsing_3_7.txt");
const RSING_4_5: &str = include_str!("../../fixtures/rsing_4_5.txt");

/// Fixture text, honoring an on-disk override directory when the
/// `NSCURVE_FIXTURE_DIR` environment variable is set.
fn fixture_text(name: &str, embedded: &'static str) -> String {
    if let Ok(dir) = std::env::var("NSCURVE_FIXTURE_DIR") {
        let path = std::path::Path::new(&dir).join(name);
        if let Ok(s) = std::fs::read_to_string(&path) {
            return s;
        }
    }
    embedded.to_string()
}

pub fn dr_numerators(curve: &CurveSpec) -> Option<Vec<XYPoly<PolyRing>>> {
    let (name, text) = match (curve.n, curve.s) {
        (2, 3) => ("dr_2_3.txt", DR_2_3),
        (3, 4) => ("dr_3_4.txt", DR_3_4),
        (3, 5) => ("dr_3_5.txt", DR_3_5),
        (3, 7) => ("dr_3_7.txt", DR_3_7),
        (4, 5) => ("dr_4_5.txt", DR_4_5),
        _ => return None,
    };
    let text = fixture_text(name, text);
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let p = parse_xy(line, &curve.ring)
            .unwrap_or_else(|e| panic!("bad dr fixture line for {}: {e}", curve.tag()));
        out.push(p.map_coeffs(&curve.ring, |c| curve.apply_lambda(c)));
    }
    assert_eq!(out.len(), curve.genus, "dr fixture component count");
    Some(out)
}

/// Reference singular parts: per component, `(exponent, coefficient)`.
pub fn reference_singular_parts(curve: &CurveSpec) -> Option<Vec<Vec<(i64, WeightedPoly)>>> {
    let (name, text) = match (curve.n, curve.s) {
        (3, 4) => ("rsing_3_4.txt", RSING_3_4),
        (3, 5) => ("rsing_3_5.txt", RSING_3_5),
        (3, 7) => ("rsing_3_7.txt", RSING_3_7),
        (4, 5) => ("rsing_4_5.txt", RSING_4_5),
        _ => return None,
    };
    let text = fixture_text(name, text);
    let mut out: Vec<Vec<(i64, WeightedPoly)>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            out.push(Vec::new());
            continue;
        }
        let (exp, poly) = line
            .split_once(':')
            .unwrap_or_else(|| panic!("bad singular-part fixture line: {line}"));
        let exp: i64 = exp.trim().parse().expect("exponent");
        let p = crate::ring::parse_poly(poly.trim(), &curve.gens)
            .unwrap_or_else(|e| panic!("bad singular-part fixture `{line}`: {e}"));
        out.last_mut().expect("component header").push((exp, p));
    }
    assert_eq!(out.len(), curve.genus, "singular-part component count");
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::super::LambdaMode;
    use super::*;
    use crate::ring::Homogeneity;

    #[test]
    fn numerator_weights_match_components() {
        // wgt(numerator_j) = w_j + 2g - 1
        for (n, s) in [(2u32, 3u32), (3, 4), (3, 5), (3, 7), (4, 5)] {
            let c = CurveSpec::new(n, s, LambdaMode::Symbolic).unwrap();
            let drs = dr_numerators(&c).unwrap();
            for (j, p) in drs.iter().enumerate() {
                let expect = c.gaps[j] + 2 * c.genus as i64 - 1;
                for ((xe, ye), coeff) in p.terms() {
                    let base = *xe as i64 * n as i64 + *ye as i64 * s as i64;
                    match coeff.homogeneity() {
                        Some(Homogeneity::Zero) => {}
                        Some(Homogeneity::Weight(w)) => {
                            assert_eq!(base + w, expect, "({n},{s}) component {}", j + 1)
                        }
                        None => panic!("inhomogeneous coefficient in dr fixture"),
                    }
                }
            }
        }
    }

    #[test]
    fn singular_part_fixtures_are_weight_homogeneous() {
        // coefficient of ξ^k in component j must have weight w_j + k
        for (n, s) in [(3u32, 4u32), (3, 5), (3, 7), (4, 5)] {
            let c = CurveSpec::new(n, s, LambdaMode::Symbolic).unwrap();
            let rs = reference_singular_parts(&c).unwrap();
            for (j, comp) in rs.iter().enumerate() {
                for (k, coeff) in comp {
                    let expect = c.gaps[j] + k;
                    assert!(
                        coeff.homogeneity().map_or(false, |h| h.admits(expect)),
                        "({n},{s}) component {} at ξ^{k}: {coeff}",
                        j + 1
                    );
                }
            }
        }
    }
}
