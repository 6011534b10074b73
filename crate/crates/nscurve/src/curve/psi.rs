//! The primitive-function series: `ψ(ξ) = ξ^g exp{-∫ (A*(ξ)ᵗ dA(ξ) + g ξ^{-1} dξ)}`.
//!
//! The residue pairing forces the `ξ^{-1}` coefficient of the integrand to
//! cancel; a nonzero residue signals a broken basis and surfaces as an
//! error.

use super::basis::{DifferentialBasis, RegularizedIntegral};
use super::{CurveError, CurveSpec};
use crate::series::{LaurentSeries, LogSeries, PolyRing};

/// `log ψ = g log ξ + Σ_{k>=1} p_k(λ, c) ξ^k`, with the regularization
/// unknowns `c` symbolic inside the coefficients.
pub fn log_psi(
    curve: &CurveSpec,
    basis: &DifferentialBasis,
    reg: &RegularizedIntegral,
) -> Result<LogSeries<PolyRing>, CurveError> {
    let ring = &curve.ring;
    let g = curve.genus as i64;
    let mut integrand = LaurentSeries::monomial(
        ring,
        crate::ring::WeightedPoly::constant(&curve.gens, crate::ring::rat(g)),
        -1,
    );
    for i in 0..curve.genus {
        integrand = integrand.add(&reg.full(i).mul(&basis.du_series[i]));
    }
    let analytic = integrand.integrate()?.neg();
    Ok(LogSeries {
        log_multiplicity: g,
        analytic,
    })
}

#[cfg(test)]
mod tests {
    use super::super::basis::{differential_bases, singular_part};
    use super::super::param::expand_at_infinity;
    use super::super::LambdaMode;
    use super::*;
    use crate::ring::parse_poly;

    #[test]
    fn log_psi_34_reference() {
        let c = CurveSpec::new(3, 4, LambdaMode::Symbolic).unwrap();
        let p = expand_at_infinity(&c, 16).unwrap();
        let b = differential_bases(&c, &p).unwrap();
        let reg = singular_part(&c, &b).unwrap();
        let lp = log_psi(&c, &b, &reg).unwrap();
        assert_eq!(lp.log_multiplicity, 3);
        let a = &lp.analytic;
        assert_eq!(a.coeff(1).unwrap(), parse_poly("c1", &c.gens).unwrap());
        assert_eq!(
            a.coeff(2).unwrap(),
            parse_poly("(λ2 + 3*c2)/6", &c.gens).unwrap()
        );
        assert!(a.coeff(3).unwrap().is_zero());
        assert_eq!(
            a.coeff(4).unwrap(),
            parse_poly("λ2*(λ2 + 3*c2)/36", &c.gens).unwrap()
        );
        assert_eq!(
            a.coeff(5).unwrap(),
            parse_poly("-(21*λ5 + 4*c1*λ2^2 + 36*c5)/180", &c.gens).unwrap()
        );
    }

    #[test]
    fn log_psi_35_reference() {
        let c = CurveSpec::new(3, 5, LambdaMode::Symbolic).unwrap();
        let p = expand_at_infinity(&c, 20).unwrap();
        let b = differential_bases(&c, &p).unwrap();
        let reg = singular_part(&c, &b).unwrap();
        let lp = log_psi(&c, &b, &reg).unwrap();
        assert_eq!(lp.log_multiplicity, 4);
        let a = &lp.analytic;
        assert_eq!(
            a.coeff(1).unwrap(),
            parse_poly("-(c1 + 2*λ1/3)", &c.gens).unwrap()
        );
        assert_eq!(
            a.coeff(2).unwrap(),
            parse_poly("-1/2*(c2 - λ1/3*c1 + 2*λ1^2/45)", &c.gens).unwrap()
        );
        assert_eq!(
            a.coeff(4).unwrap(),
            parse_poly(
                "1/4*(c4 + λ1^2/9*c2 - 5*λ1^3/81*c1 - 14*λ1^4/1215 + 2*λ4/3)",
                &c.gens
            )
            .unwrap()
        );
        assert_eq!(
            a.coeff(7).unwrap(),
            parse_poly(
                "-1/7*(c7 - 5*λ1^3/81*c4 + (2*λ4*λ1/9 - 8*λ1^5/729)*c2 \
                 - (2*λ6/3 + 5*λ4*λ1^2/27 - 44*λ1^6/6561)*c1 \
                 + 13/15*λ7 - 29/45*λ6*λ1 - 146/1215*λ4*λ1^3 + 152/98415*λ1^7)",
                &c.gens
            )
            .unwrap()
        );
    }

    #[test]
    fn lambda_zero_collapses_to_pure_log() {
        use std::collections::BTreeMap;
        for (n, s) in [(2u32, 3u32), (3, 4), (3, 5), (3, 7), (4, 5)] {
            let g = ((n - 1) * (s - 1) / 2) as i64;
            let c = CurveSpec::new(n, s, LambdaMode::Explicit(BTreeMap::new())).unwrap();
            let p = expand_at_infinity(&c, 2 * g + 2 * (n as i64 + s as i64)).unwrap();
            let b = differential_bases(&c, &p).unwrap();
            let mut reg = singular_part(&c, &b).unwrap();
            // with c = 0 as well, the analytic part must vanish identically
            for ci in reg.c.iter_mut() {
                *ci = crate::ring::WeightedPoly::zero(&c.gens);
            }
            let lp = log_psi(&c, &b, &reg).unwrap();
            assert_eq!(lp.log_multiplicity, g);
            assert!(
                lp.analytic.is_zero_through_truncation(),
                "({n},{s}): {}",
                lp.analytic
            );
        }
    }
}
