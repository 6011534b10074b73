//! First and second kind differential bases, the residue pairing, singular
//! parts and the Abel series.

use super::param::ParamExpansion;
use super::{tables, CurveError, CurveSpec, XYPoly};
use crate::ring::{rat, WeightedPoly};
use crate::series::{LaurentSeries, PolyRing, SeriesError};

/// Basis of 1-forms: `g` holomorphic numerators (monomials) and, when
/// embedded data exists, `g` second-kind numerators, all over the common
/// denominator `∂_y f` with measure `dx`.
#[derive(Clone, Debug)]
pub struct DifferentialBasis {
    /// Holomorphic numerators `x^a y^b`, descending Sato weight.
    pub du_numerators: Vec<XYPoly<PolyRing>>,
    /// Second-kind numerators, or `None` for curves without embedded data.
    pub dr_numerators: Option<Vec<XYPoly<PolyRing>>>,
    /// `du_i/dξ` series.
    pub du_series: Vec<LaurentSeries<PolyRing>>,
    /// `dr_i/dξ` series (empty when `dr_numerators` is `None`).
    pub dr_series: Vec<LaurentSeries<PolyRing>>,
}

/// Monomials `x^a y^b` with `a n + b s <= bound`, descending Sato weight.
pub fn monomials_up_to(curve: &CurveSpec, bound: i64) -> Vec<(u16, u16)> {
    let mut v = Vec::new();
    for a in 0..=(bound / curve.n as i64).max(0) {
        for b in 0..=((bound - a * curve.n as i64) / curve.s as i64).max(0) {
            let w = a * curve.n as i64 + b * curve.s as i64;
            if w <= bound {
                v.push((a as u16, b as u16, w));
            }
        }
    }
    v.sort_by_key(|&(_, _, w)| -w);
    // Distinct monomials in a numerical semigroup have distinct weights.
    for pair in v.windows(2) {
        assert_ne!(pair[0].2, pair[1].2, "weight tie in monomial ladder");
    }
    v.into_iter().map(|(a, b, _)| (a, b)).collect()
}

/// Build the basis with series attached, from a parameterization of
/// sufficient order.
pub fn differential_bases(
    curve: &CurveSpec,
    param: &ParamExpansion,
) -> Result<DifferentialBasis, CurveError> {
    let ring = &curve.ring;
    let du_monos = monomials_up_to(curve, 2 * curve.genus as i64 - 2);
    assert_eq!(du_monos.len(), curve.genus);
    let du_numerators: Vec<XYPoly<PolyRing>> = du_monos
        .iter()
        .map(|&(a, b)| XYPoly::monomial(ring, a, b, WeightedPoly::one(&curve.gens)))
        .collect();

    // dx/dξ = n ξ^{-n-1}; common denominator ∂_y f
    let x_prime = LaurentSeries::monomial(
        ring,
        WeightedPoly::constant(&curve.gens, rat(curve.n as i64)),
        -(curve.n as i64) - 1,
    );
    let fy = curve.f.dy().compose_series(&param.x, &param.y);
    let fy_inv = fy.inv()?;
    let measure = x_prime.mul(&fy_inv);

    let du_series: Vec<LaurentSeries<PolyRing>> = du_numerators
        .iter()
        .map(|p| p.compose_series(&param.x, &param.y).mul(&measure))
        .collect();

    let dr_numerators = tables::dr_numerators(curve);
    let dr_series = match &dr_numerators {
        Some(nums) => nums
            .iter()
            .map(|p| p.compose_series(&param.x, &param.y).mul(&measure))
            .collect(),
        None => Vec::new(),
    };

    Ok(DifferentialBasis {
        du_numerators,
        dr_numerators,
        du_series,
        dr_series,
    })
}

/// Abel series `A_i(ξ) = ∫_0^ξ du_i`; component `i` has leading exponent
/// equal to the gap `w_i`.
pub fn abel_series(
    curve: &CurveSpec,
    basis: &DifferentialBasis,
) -> Result<Vec<LaurentSeries<PolyRing>>, CurveError> {
    let mut out = Vec::new();
    for (i, du) in basis.du_series.iter().enumerate() {
        let a = du.integrate()?;
        if let Some(m) = a.leading_exponent() {
            assert_eq!(m, curve.gaps[i], "Abel component leading exponent");
        }
        out.push(a);
    }
    Ok(out)
}

/// Residue pairing matrix `res (∫du_i) dr_j`.
pub fn verify_pairing(
    curve: &CurveSpec,
    basis: &DifferentialBasis,
) -> Result<Vec<Vec<WeightedPoly>>, CurveError> {
    let abel = abel_series(curve, basis)?;
    let mut matrix = Vec::new();
    for a in &abel {
        let mut row = Vec::new();
        for dr in &basis.dr_series {
            row.push(a.mul(dr).residue()?);
        }
        matrix.push(row);
    }
    Ok(matrix)
}

pub fn pairing_is_identity(matrix: &[Vec<WeightedPoly>]) -> bool {
    matrix.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, e)| {
            if i == j {
                e.as_constant().map_or(false, |c| c == rat(1))
            } else {
                e.is_zero()
            }
        })
    })
}

/// The regularized second-kind integral split of one antiderivative
/// vector: `A*(ξ) = r_sing(ξ^{-1}) + c + r_reg(ξ)`.
#[derive(Clone, Debug)]
pub struct RegularizedIntegral {
    /// Pure negative powers.
    pub singular: Vec<LaurentSeries<PolyRing>>,
    /// Symbolic `c_w` generators (or substituted values).
    pub c: Vec<WeightedPoly>,
    /// Part vanishing at `ξ = 0`.
    pub regular: Vec<LaurentSeries<PolyRing>>,
}

impl RegularizedIntegral {
    /// `A*_i(ξ)` with the constant included.
    pub fn full(&self, i: usize) -> LaurentSeries<PolyRing> {
        let ring = self.singular[i].ring().clone();
        let c = LaurentSeries::monomial(&ring, self.c[i].clone(), 0);
        self.singular[i].add(&c).add(&self.regular[i])
    }
}

/// Integrate the second-kind basis and split off singular parts; `c` stays
/// symbolic. Fails with a residue obstruction if any `dr_i` had a `ξ^{-1}`
/// term (second-kind forms are residue-free).
pub fn singular_part(
    curve: &CurveSpec,
    basis: &DifferentialBasis,
) -> Result<RegularizedIntegral, CurveError> {
    let mut singular = Vec::new();
    let mut regular = Vec::new();
    for dr in &basis.dr_series {
        let r = dr.integrate()?;
        let mut sing = LaurentSeries::zero_exact(r.ring());
        let mut reg = LaurentSeries::zero(r.ring(), r.truncation());
        for (k, coeff) in r.terms() {
            if k < 0 {
                sing.add_term(k, coeff);
            } else {
                reg.add_term(k, coeff);
            }
        }
        singular.push(sing);
        regular.push(reg);
    }
    let c = curve.gaps.iter().map(|&w| curve.c_gen(w)).collect();
    Ok(RegularizedIntegral {
        singular,
        c,
        regular,
    })
}

/// Compare computed singular parts against the embedded reference data.
/// Returns mismatches as `(component, exponent, computed, reference)`.
pub fn singular_part_mismatches(
    curve: &CurveSpec,
    reg: &RegularizedIntegral,
) -> Result<Vec<(usize, i64, WeightedPoly, WeightedPoly)>, SeriesError> {
    let Some(reference) = tables::reference_singular_parts(curve) else {
        return Ok(Vec::new());
    };
    let mut bad = Vec::new();
    for (j, comp) in reference.iter().enumerate() {
        let mut expected: std::collections::BTreeMap<i64, WeightedPoly> = Default::default();
        for (k, p) in comp {
            expected.insert(*k, p.clone());
        }
        let sing = &reg.singular[j];
        let lo = sing.leading_exponent().unwrap_or(-1).min(
            expected.keys().next().copied().unwrap_or(-1),
        );
        for k in lo..0 {
            let got = sing.coeff(k)?;
            let want = expected
                .get(&k)
                .cloned()
                .unwrap_or_else(|| WeightedPoly::zero(&curve.gens));
            if got != want {
                bad.push((j + 1, k, got, want));
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::super::{param::expand_at_infinity, LambdaMode};
    use super::*;
    use crate::ring::parse_poly;

    fn setup(n: u32, s: u32, order: i64) -> (CurveSpec, ParamExpansion, DifferentialBasis) {
        let c = CurveSpec::new(n, s, LambdaMode::Symbolic).unwrap();
        let p = expand_at_infinity(&c, order).unwrap();
        let b = differential_bases(&c, &p).unwrap();
        (c, p, b)
    }

    #[test]
    fn du_monomials_34() {
        let (c, _, b) = setup(3, 4, 12);
        let names: Vec<String> = b.du_numerators.iter().map(|p| format!("{p}")).collect();
        assert_eq!(names, vec!["y", "x", "1"]);
        let _ = c;
    }

    #[test]
    fn du_monomials_all_curves() {
        let (_, _, b35) = setup(3, 5, 12);
        let names: Vec<String> = b35.du_numerators.iter().map(|p| format!("{p}")).collect();
        assert_eq!(names, vec!["x^2", "y", "x", "1"]);
        let (_, _, b37) = setup(3, 7, 12);
        let names: Vec<String> = b37.du_numerators.iter().map(|p| format!("{p}")).collect();
        assert_eq!(names, vec!["x*y", "x^3", "y", "x^2", "x", "1"]);
        let (_, _, b45) = setup(4, 5, 12);
        let names: Vec<String> = b45.du_numerators.iter().map(|p| format!("{p}")).collect();
        assert_eq!(names, vec!["y^2", "x*y", "x^2", "y", "x", "1"]);
    }

    #[test]
    fn du_series_34_reference_coefficients() {
        let (c, _, b) = setup(3, 4, 14);
        // du_1 = -1 + 1/9 λ2^2 ξ^4 + O(ξ^6)
        let du1 = &b.du_series[0];
        assert_eq!(du1.coeff(0).unwrap(), parse_poly("-1", &c.gens).unwrap());
        assert!(du1.coeff(1).unwrap().is_zero());
        assert!(du1.coeff(2).unwrap().is_zero());
        assert!(du1.coeff(3).unwrap().is_zero());
        assert_eq!(du1.coeff(4).unwrap(), parse_poly("1/9*λ2^2", &c.gens).unwrap());
        // du_2 = -ξ - 1/3 λ2 ξ^3 + 1/3 λ5 ξ^6 + O(ξ^7)
        let du2 = &b.du_series[1];
        assert_eq!(du2.coeff(1).unwrap(), parse_poly("-1", &c.gens).unwrap());
        assert_eq!(du2.coeff(3).unwrap(), parse_poly("-1/3*λ2", &c.gens).unwrap());
        assert_eq!(du2.coeff(6).unwrap(), parse_poly("1/3*λ5", &c.gens).unwrap());
        // du_3 = ξ^4 + 1/3 λ2 ξ^6 - 1/3 λ5 ξ^9 + O(ξ^10)
        let du3 = &b.du_series[2];
        assert_eq!(du3.coeff(4).unwrap(), parse_poly("1", &c.gens).unwrap());
        assert_eq!(du3.coeff(6).unwrap(), parse_poly("1/3*λ2", &c.gens).unwrap());
        assert_eq!(du3.coeff(9).unwrap(), parse_poly("-1/3*λ5", &c.gens).unwrap());
    }

    #[test]
    fn dr_series_34_reference_coefficients() {
        let (c, _, b) = setup(3, 4, 14);
        // dr_1 = -ξ^{-2} - 1/3 λ2 + 1/3 λ5 ξ^3 + O(ξ^4)
        let dr1 = &b.dr_series[0];
        assert_eq!(dr1.coeff(-2).unwrap(), parse_poly("-1", &c.gens).unwrap());
        assert_eq!(dr1.coeff(0).unwrap(), parse_poly("-1/3*λ2", &c.gens).unwrap());
        assert_eq!(dr1.coeff(3).unwrap(), parse_poly("1/3*λ5", &c.gens).unwrap());
        // dr_2 = -2ξ^{-3} + 2/9 λ2^2 ξ + O(ξ^3)
        let dr2 = &b.dr_series[1];
        assert_eq!(dr2.coeff(-3).unwrap(), parse_poly("-2", &c.gens).unwrap());
        assert_eq!(dr2.coeff(1).unwrap(), parse_poly("2/9*λ2^2", &c.gens).unwrap());
        // dr_3 = 5ξ^{-6} + 1/9 λ2^2 ξ^{-2} + O(1)
        let dr3 = &b.dr_series[2];
        assert_eq!(dr3.coeff(-6).unwrap(), parse_poly("5", &c.gens).unwrap());
        assert_eq!(dr3.coeff(-2).unwrap(), parse_poly("1/9*λ2^2", &c.gens).unwrap());
    }

    #[test]
    fn pairing_identity_all_embedded_curves() {
        for (n, s) in [(2u32, 3u32), (3, 4), (3, 5), (3, 7), (4, 5)] {
            let g = ((n - 1) * (s - 1) / 2) as i64;
            let (c, _, b) = setup(n, s, 2 * g + 2 * (n as i64 + s as i64));
            let m = verify_pairing(&c, &b).unwrap();
            assert!(pairing_is_identity(&m), "pairing for ({n},{s}): {m:?}");
        }
    }

    #[test]
    fn scaled_row_shows_in_pairing() {
        let (c, _, mut b) = setup(3, 4, 16);
        b.dr_series[1] = b.dr_series[1].scale(&rat(2));
        let m = verify_pairing(&c, &b).unwrap();
        assert!(!pairing_is_identity(&m));
        assert_eq!(m[1][1].as_constant().unwrap(), rat(2));
        assert_eq!(m[0][0].as_constant().unwrap(), rat(1));
    }

    #[test]
    fn abel_series_34() {
        let (c, _, b) = setup(3, 4, 14);
        let a = abel_series(&c, &b).unwrap();
        assert_eq!(a[0].coeff(1).unwrap(), parse_poly("-1", &c.gens).unwrap());
        assert_eq!(a[1].coeff(2).unwrap(), parse_poly("-1/2", &c.gens).unwrap());
        assert_eq!(a[2].coeff(5).unwrap(), parse_poly("1/5", &c.gens).unwrap());
    }

    #[test]
    fn monomial_curve_abel_exact() {
        use std::collections::BTreeMap;
        let c = CurveSpec::new(3, 4, LambdaMode::Explicit(BTreeMap::new())).unwrap();
        let p = expand_at_infinity(&c, 14).unwrap();
        let b = differential_bases(&c, &p).unwrap();
        let a = abel_series(&c, &b).unwrap();
        // A = (-ξ, -ξ²/2, ξ⁵/5) exactly up to the working window
        assert_eq!(a[0].terms().len(), 1);
        assert_eq!(a[1].terms().len(), 1);
        assert_eq!(a[2].terms().len(), 1);
    }

    #[test]
    fn singular_parts_match_reference() {
        for (n, s) in [(3u32, 4u32), (3, 5), (3, 7), (4, 5)] {
            let g = ((n - 1) * (s - 1) / 2) as i64;
            let (c, _, b) = setup(n, s, 2 * g + 2 * (n as i64 + s as i64));
            let reg = singular_part(&c, &b).unwrap();
            let bad = singular_part_mismatches(&c, &reg).unwrap();
            assert!(
                bad.is_empty(),
                "({n},{s}) singular-part mismatches: {:?}",
                bad.iter()
                    .map(|(j, k, got, want)| format!("[{j}] ξ^{k}: computed {got}, table {want}"))
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn dr_series_residue_free() {
        for (n, s) in [(2u32, 3u32), (3, 4), (3, 5), (3, 7), (4, 5)] {
            let g = ((n - 1) * (s - 1) / 2) as i64;
            let (_, _, b) = setup(n, s, 2 * g + 2 * (n as i64 + s as i64));
            for dr in &b.dr_series {
                assert!(dr.residue().unwrap().is_zero());
            }
        }
    }

    #[test]
    fn hyperelliptic_parity_23() {
        // every component of the integrated second-kind basis has only odd
        // powers of ξ, so the free constant is forced to zero
        let (_, _, b) = setup(2, 3, 16);
        for dr in &b.dr_series {
            let r = dr.integrate().unwrap();
            for (k, _) in r.terms() {
                assert!(k % 2 != 0, "even power ξ^{k} in hyperelliptic integral");
            }
        }
    }
}
