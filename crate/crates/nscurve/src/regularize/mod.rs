//! The two regularization-constant algorithms, the divisor-sum residue
//! computation, and the derived rational-function relations.

mod bilinear;
mod divisor;
mod method1;

pub use bilinear::{bilinear_lhs, method2_solve, Method2Mode, PhiFunction};
pub use divisor::{derive_relations_rk, divisor_sum, DivisorSumReport, RkReport};
pub use method1::method1_solve;

use crate::curve::{
    abel_series, differential_bases, expand_at_infinity, log_psi, singular_part, CurveError,
    CurveSpec, DifferentialBasis, ParamExpansion, RegularizedIntegral,
};
use crate::ring::WeightedPoly;
use crate::series::{LaurentSeries, LogSeries, PolyRing};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RegError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Series(#[from] crate::series::SeriesError),
    #[error(transparent)]
    Rewrite(#[from] crate::wp::RewriteError),
    #[error(transparent)]
    Solve(#[from] crate::ring::SolveError),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("solved constant is not λ-only: c_{0} = {1}")]
    CNotLambdaOnly(i64, String),
    #[error("symbolic c failed to cancel: {0}")]
    CNotCancelled(String),
    #[error("mismatch beyond an additive constant in component {0}: {1}")]
    MismatchBeyondConstant(usize, String),
    #[error("no sigma expansion embedded for this curve")]
    NoSigmaData,
    #[error("{0}")]
    Other(String),
}

/// Everything the regularization pipelines need about one curve, computed
/// once at a chosen series order.
pub struct CurvePipeline {
    pub curve: CurveSpec,
    pub order: i64,
    pub param: ParamExpansion,
    pub basis: DifferentialBasis,
    pub abel: Vec<LaurentSeries<PolyRing>>,
    pub reg: RegularizedIntegral,
    pub log_psi: LogSeries<PolyRing>,
}

impl CurvePipeline {
    /// `order` controls the attained ξ-window; the default callers use is
    /// `2g + 2` plus whatever margin the pipeline needs.
    pub fn build(curve: CurveSpec, order: i64) -> Result<Self, RegError> {
        // margin so that the differential series reach the requested window
        let expand_order = order + 2 * (curve.n as i64 + curve.s as i64);
        let param = expand_at_infinity(&curve, expand_order)?;
        let basis = differential_bases(&curve, &param)?;
        let abel = abel_series(&curve, &basis)?;
        let reg = singular_part(&curve, &basis)?;
        let log_psi = log_psi(&curve, &basis, &reg)?;
        Ok(CurvePipeline {
            curve,
            order,
            param,
            basis,
            abel,
            reg,
            log_psi,
        })
    }
}

/// Which algorithm produced a regularization constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    SigmaMatch,
    Bilinear,
    Both,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SigmaMatch => "sigma-match",
            Method::Bilinear => "bilinear",
            Method::Both => "both",
        }
    }
}

/// A solved regularization constant vector with solver diagnostics.
#[derive(Clone, Debug)]
pub struct RegularizationResult {
    pub curve: (u32, u32),
    /// One λ-polynomial per gap, in gap order.
    pub c: Vec<WeightedPoly>,
    pub method: Method,
    /// Orders (or ladder stages) that carried information.
    pub diagnostics: Vec<String>,
}

impl RegularizationResult {
    /// Check the invariants every solved constant must satisfy: λ-only
    /// content and weight homogeneity `wgt c_i = w_i`.
    pub fn validate(&self, curve: &CurveSpec) -> Result<(), RegError> {
        for (i, ci) in self.c.iter().enumerate() {
            let w = curve.gaps[i];
            for &u in &curve.c_indices() {
                if ci.contains_gen(u) {
                    return Err(RegError::CNotLambdaOnly(w, ci.to_string()));
                }
            }
            if !ci.homogeneity().map_or(false, |h| h.admits(w)) {
                return Err(RegError::Other(format!(
                    "c_{w} = {ci} is not weight-homogeneous"
                )));
            }
        }
        Ok(())
    }
}
