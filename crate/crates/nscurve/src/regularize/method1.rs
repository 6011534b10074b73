//! First algorithm: match `log ψ` against the logarithm of the first
//! non-vanishing sigma derivative along the Abel image and solve the
//! resulting linear system for the constants.

use super::{CurvePipeline, Method, RegError, RegularizationResult};
use crate::ring::{linear_solve, LinearSystem, Rat};
use crate::wp::SigmaData;
use num::traits::One;

pub fn method1_solve(
    pipe: &CurvePipeline,
    data: &SigmaData,
) -> Result<RegularizationResult, RegError> {
    let curve = &pipe.curve;
    let g = curve.genus as i64;
    // the single derivative of Sato weight -(wgt σ) - g
    let d = -curve.sigma_weight() - g;
    assert!(
        curve.gaps.contains(&d),
        "leading derivative index {d} is not a Jacobian coordinate"
    );
    let series = data.derivative(&curve.gaps, &[d as u8]).compose(&pipe.abel)?;
    let lead_exp = series
        .leading_exponent()
        .ok_or_else(|| RegError::Other("sigma derivative vanishes along the image".into()))?;
    if lead_exp != g {
        return Err(RegError::Other(format!(
            "leading sigma derivative has a zero of order {lead_exp}, expected {g}"
        )));
    }
    let lead = series
        .coeff(lead_exp)?
        .as_constant()
        .ok_or_else(|| RegError::Other("non-constant leading coefficient".into()))?;
    let monic = series.scale(&(Rat::one() / lead));
    let sigma_side = monic.log()?;

    // equate coefficient-wise with log ψ and solve for c
    let kmax = (pipe.log_psi.analytic.truncation() - 1).min(sigma_side.analytic.truncation() - 1);
    let mut equations = Vec::new();
    let mut used = Vec::new();
    for k in 1..=kmax {
        let lhs = pipe.log_psi.analytic.coeff(k)?;
        let rhs = sigma_side.analytic.coeff(k)?;
        let eq = lhs.sub(&rhs);
        if !eq.is_zero() {
            used.push(format!("ξ^{k}"));
        }
        equations.push(eq);
    }
    let unknowns = curve.c_indices();
    let solved = linear_solve(&LinearSystem { equations, unknowns })?;
    let c = solved.into_iter().map(|(_, v)| v).collect();
    let result = RegularizationResult {
        curve: (curve.n, curve.s),
        c,
        method: Method::SigmaMatch,
        diagnostics: used,
    };
    result.validate(curve)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::super::CurvePipeline;
    use super::*;
    use crate::curve::{CurveSpec, LambdaMode};
    use crate::ring::parse_poly;
    use crate::wp::sigma_data;

    #[test]
    fn constants_34() {
        let curve = CurveSpec::new(3, 4, LambdaMode::Symbolic).unwrap();
        let pipe = CurvePipeline::build(curve, 10).unwrap();
        let data = sigma_data(&pipe.curve).unwrap();
        let r = method1_solve(&pipe, &data).unwrap();
        assert!(r.c[0].is_zero());
        assert_eq!(r.c[1], parse_poly("-λ2/3", &pipe.curve.gens).unwrap());
        assert_eq!(r.c[2], parse_poly("-λ5/6", &pipe.curve.gens).unwrap());
    }

    #[test]
    fn constants_35() {
        let curve = CurveSpec::new(3, 5, LambdaMode::Symbolic).unwrap();
        let pipe = CurvePipeline::build(curve, 12).unwrap();
        let data = sigma_data(&pipe.curve).unwrap();
        let r = method1_solve(&pipe, &data).unwrap();
        let g = &pipe.curve.gens;
        assert_eq!(r.c[0], parse_poly("-λ1/2", g).unwrap());
        assert_eq!(r.c[1], parse_poly("-4*λ1^2/15", g).unwrap());
        assert_eq!(r.c[2], parse_poly("-λ4/3", g).unwrap());
        assert_eq!(r.c[3], parse_poly("-λ7/6", g).unwrap());
    }

    #[test]
    fn lambda_zero_gives_zero_constants() {
        use std::collections::BTreeMap;
        let curve = CurveSpec::new(3, 4, LambdaMode::Explicit(BTreeMap::new())).unwrap();
        let pipe = CurvePipeline::build(curve, 10).unwrap();
        let data = crate::wp::sigma_data(&pipe.curve).unwrap();
        let r = method1_solve(&pipe, &data).unwrap();
        for ci in &r.c {
            assert!(ci.is_zero());
        }
    }
}
