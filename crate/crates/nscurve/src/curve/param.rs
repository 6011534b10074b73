//! Local parameterization of the curve at infinity.
//!
//! With `x(ξ) = -ξ^{-n}`, the second coordinate expands as
//! `y(ξ) = -ξ^{-s}((-1)^s + Σ_{i>=1} μ_i(λ) ξ^i)` and the `μ_i` are fixed
//! order by order by `f(x(ξ), y(ξ)) = 0`. Newton iteration on the series
//! doubles the attained order each step; each division is by a series whose
//! leading coefficient is a nonzero rational.

use super::{CurveError, CurveSpec};
use crate::ring::{rat, WeightedPoly};
use crate::series::{LaurentSeries, PolyRing};

/// Expansion of the affine coordinates at the point at infinity.
#[derive(Clone, Debug)]
pub struct ParamExpansion {
    /// `-ξ^{-n}`, exact.
    pub x: LaurentSeries<PolyRing>,
    /// Known through `O(ξ^{-s+N+1})`.
    pub y: LaurentSeries<PolyRing>,
    /// `μ_1 .. μ_N`.
    pub mu: Vec<WeightedPoly>,
}

/// Solve for the expansion through `μ_N`.
pub fn expand_at_infinity(curve: &CurveSpec, order: i64) -> Result<ParamExpansion, CurveError> {
    assert!(order >= 1, "order must be at least 1");
    let ring = &curve.ring;
    let n = curve.n as i64;
    let s = curve.s as i64;
    let x = LaurentSeries::monomial(ring, WeightedPoly::constant(&curve.gens, rat(-1)), -n);

    let y_trunc = -s + order + 1;
    let lead = if curve.s % 2 == 0 { rat(-1) } else { rat(1) };
    let mut y = LaurentSeries::from_terms(
        ring,
        vec![(-s, WeightedPoly::constant(&curve.gens, lead))],
        y_trunc,
    );

    let f = &curve.f;
    let fy = f.dy();
    let target = -n * s + order + 1;
    for _ in 0..64 {
        let residual = f.compose_series(&x, &y);
        match residual.leading_exponent() {
            None => break,
            Some(m) if m >= target && residual.truncation() >= target => break,
            _ => {}
        }
        let deriv = fy.compose_series(&x, &y);
        let delta = residual.div(&deriv)?;
        if delta.is_zero_through_truncation() {
            break;
        }
        y = y.sub(&delta).truncate_to(y_trunc);
    }

    let residual = f.compose_series(&x, &y);
    if let Some(m) = residual.leading_exponent() {
        assert!(
            m >= target,
            "expansion did not converge: residual at ξ^{m}, wanted ξ^{target}"
        );
    }

    // y = -ξ^{-s}((-1)^s + Σ μ_i ξ^i)  =>  μ_i = -[ξ^{i-s}] y
    let mut mu = Vec::new();
    for i in 1..=order {
        let c = y.coeff(i - s).unwrap_or_else(|_| WeightedPoly::zero(&curve.gens));
        mu.push(c.neg());
    }
    Ok(ParamExpansion { x, y, mu })
}

#[cfg(test)]
mod tests {
    use super::super::LambdaMode;
    use super::*;
    use crate::ring::{parse_poly, ratio};

    #[test]
    fn trigonal_34_parameterization() {
        let c = CurveSpec::new(3, 4, LambdaMode::Symbolic).unwrap();
        let p = expand_at_infinity(&c, 6).unwrap();
        // y(ξ) = ξ^{-4}(-1 + 1/3 λ2 ξ^2 - 1/3 λ5 ξ^5 + O(ξ^6))
        assert_eq!(p.y.coeff(-4).unwrap(), parse_poly("-1", &c.gens).unwrap());
        assert_eq!(p.y.coeff(-3).unwrap(), parse_poly("0", &c.gens).unwrap());
        assert_eq!(p.y.coeff(-2).unwrap(), parse_poly("1/3*λ2", &c.gens).unwrap());
        assert_eq!(p.y.coeff(-1).unwrap(), parse_poly("0", &c.gens).unwrap());
        assert_eq!(p.y.coeff(0).unwrap(), parse_poly("0", &c.gens).unwrap());
        assert_eq!(p.y.coeff(1).unwrap(), parse_poly("-1/3*λ5", &c.gens).unwrap());
        // μ weights: wgt μ_i = i
        for (i, m) in p.mu.iter().enumerate() {
            let w = (i + 1) as i64;
            assert!(m.homogeneity().map_or(false, |h| h.admits(w)), "μ_{w}");
        }
    }

    #[test]
    fn monomial_curve_is_exact() {
        use std::collections::BTreeMap;
        let c = CurveSpec::new(3, 5, LambdaMode::Explicit(BTreeMap::new())).unwrap();
        let p = expand_at_infinity(&c, 8).unwrap();
        for m in &p.mu {
            assert!(m.is_zero());
        }
        // y = -(-1)^s ξ^{-s} = ξ^{-5}
        assert_eq!(p.y.coeff(-5).unwrap().as_constant().unwrap(), rat(1));
    }

    #[test]
    fn residual_vanishes_at_doubled_order() {
        let c = CurveSpec::new(3, 5, LambdaMode::Symbolic).unwrap();
        let p8 = expand_at_infinity(&c, 8).unwrap();
        let p16 = expand_at_infinity(&c, 16).unwrap();
        // earlier coefficients are reproduced bit-exactly at higher order
        for i in 0..8 {
            assert_eq!(p8.mu[i], p16.mu[i], "μ_{}", i + 1);
        }
        let residual = c.f.compose_series(&p16.x, &p16.y);
        assert!(residual.is_zero_through_truncation());
        assert!(residual.truncation() >= -15 + 16 + 1);
    }

    #[test]
    fn mu_values_35() {
        let c = CurveSpec::new(3, 5, LambdaMode::Symbolic).unwrap();
        let p = expand_at_infinity(&c, 8).unwrap();
        // leading deformation has weight 1: μ_1 = -λ1/3
        assert_eq!(p.mu[0], parse_poly("-1/3*λ1", &c.gens).unwrap());
        let _ = ratio(1, 3);
    }
}
