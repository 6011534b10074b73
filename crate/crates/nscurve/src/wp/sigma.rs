//! Embedded sigma-function expansions and sigma-based verification of the
//! relation sets.
//!
//! `℘` symbols are never built by inverting the sigma series (it vanishes
//! at the origin); every logarithmic derivative is carried as a
//! numerator/denominator pair `(N_ω, σ^{|ω|})` obtained from the quotient
//! rule, and relations are checked after clearing the common `σ` power.

use super::poly::WpPoly;
use super::symbol::SymKind;
use crate::curve::CurveSpec;
use crate::ring::WeightedPoly;
use crate::series::{MultiSeries, PolyRing, SeriesError};
use std::collections::BTreeMap;

const SIGMA_3_4: &str = include_str!("../../fixtures/sigma_3_4.txt");
const SIGMA_3_5: &str = include_str!("../../fixtures/sigma_3_5.txt");

/// Truncated sigma expansion in the Jacobian coordinates `u_w`, graded by
/// total Sato weight of the `u`-part.
#[derive(Clone, Debug)]
pub struct SigmaData {
    pub curve: (u32, u32),
    pub series: MultiSeries<PolyRing>,
    pub max_weight: i64,
}

/// Load the embedded expansion; `None` for curves without one.
pub fn sigma_data(curve: &CurveSpec) -> Option<SigmaData> {
    let (text, window) = match (curve.n, curve.s) {
        (3, 4) => (SIGMA_3_4, 11),
        (3, 5) => (SIGMA_3_5, 16),
        _ => return None,
    };
    let vars: Vec<(String, i64)> = curve.gaps.iter().map(|&w| (format!("u{w}"), w)).collect();
    let mut series = MultiSeries::zero(&curve.ring, vars, window);
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (mono, coeff) = line.split_once(':').expect("sigma fixture line");
        let mut expvec = vec![0u16; curve.gaps.len()];
        for factor in mono.trim().split('*') {
            let factor = factor.trim();
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n, e.parse::<u16>().expect("exponent")),
                None => (factor, 1),
            };
            let w: i64 = name.trim_start_matches('u').parse().expect("u variable");
            let idx = curve
                .gaps
                .iter()
                .position(|&g| g == w)
                .unwrap_or_else(|| panic!("u{w} is not a Jacobian coordinate of {}", curve.tag()));
            expvec[idx] += exp;
        }
        let c = crate::ring::parse_poly(coeff.trim(), &curve.gens)
            .unwrap_or_else(|e| panic!("bad sigma coefficient `{line}`: {e}"));
        series.add_term(expvec, curve.apply_lambda(&c));
    }
    Some(SigmaData {
        curve: (curve.n, curve.s),
        series,
        max_weight: window,
    })
}

impl SigmaData {
    /// `∂_α σ` for a multi-index of gap values.
    pub fn derivative(&self, gaps: &[i64], deriv: &[u8]) -> MultiSeries<PolyRing> {
        let idxs: Vec<usize> = deriv
            .iter()
            .map(|&d| {
                gaps.iter()
                    .position(|&g| g == d as i64)
                    .unwrap_or_else(|| panic!("no Jacobian coordinate u{d}"))
            })
            .collect();
        self.series.derivative_multi(&idxs)
    }
}

/// Report from checking one relation against the sigma expansion.
#[derive(Clone, Debug)]
pub struct SigmaCheckReport {
    /// Number of weight levels of the cleared numerator that were
    /// verifiably zero.
    pub certified_orders: i64,
    /// Leftover terms (empty on success).
    pub residual_terms: usize,
    pub residual_display: String,
}

impl SigmaCheckReport {
    pub fn passed(&self) -> bool {
        self.residual_terms == 0
    }
}

/// Numerators `N_ω` with `∂_ω log σ = N_ω / σ^{|ω|}`, memoized.
pub struct LogDerivatives<'a> {
    pub data: &'a SigmaData,
    pub gaps: Vec<i64>,
    cache: BTreeMap<Vec<u8>, MultiSeries<PolyRing>>,
}

impl<'a> LogDerivatives<'a> {
    pub fn new(data: &'a SigmaData, gaps: Vec<i64>) -> Self {
        LogDerivatives {
            data,
            gaps,
            cache: BTreeMap::new(),
        }
    }

    fn var_index(&self, gap: u8) -> usize {
        self.gaps
            .iter()
            .position(|&g| g == gap as i64)
            .unwrap_or_else(|| panic!("no Jacobian coordinate u{gap}"))
    }

    /// `N_ω` for the sorted index multiset `ω`.
    pub fn numerator(&mut self, omega: &[u8]) -> MultiSeries<PolyRing> {
        assert!(!omega.is_empty());
        let key = omega.to_vec();
        if let Some(n) = self.cache.get(&key) {
            return n.clone();
        }
        let n = if omega.len() == 1 {
            self.data.series.derivative(self.var_index(omega[0]))
        } else {
            // N_{ω∪j} = ∂_j N_ω · σ − |ω| · N_ω · ∂_j σ
            let (rest, last) = omega.split_at(omega.len() - 1);
            let j = last[0];
            let m = rest.len() as i64;
            let n_rest = self.numerator(rest);
            let dj = self.var_index(j);
            let a = n_rest.derivative(dj).mul(&self.data.series);
            let b = n_rest
                .mul(&self.data.series.derivative(dj))
                .scale(&crate::ring::rat(m));
            a.sub(&b)
        };
        self.cache.insert(key, n.clone());
        n
    }
}

/// Substitute the sigma expansion into a relation `E = 0` (a `WpPoly` whose
/// symbols are tag-free `ζ`/`℘`), clear the common power of `σ`, and check
/// the numerator vanishes through every certifiable weight level.
pub fn verify_relation_by_sigma(
    equation: &WpPoly,
    data: &SigmaData,
    curve: &CurveSpec,
) -> Result<SigmaCheckReport, SeriesError> {
    let mut logs = LogDerivatives::new(data, curve.gaps.clone());
    // total σ power per monomial
    let power = |m: &super::poly::WpMonomial| -> i64 {
        m.0.iter().map(|s| s.indices.len() as i64).sum()
    };
    let big_m = equation.terms.keys().map(&power).max().unwrap_or(0);

    let vars = data.series.vars.clone();
    let ring = data.series.ring().clone();
    let mut numerator = MultiSeries::zero(&ring, vars.clone(), crate::series::EXACT);
    for (mono, coeff) in &equation.terms {
        let mut term = MultiSeries::zero(&ring, vars.clone(), crate::series::EXACT);
        term.add_term(vec![0u16; vars.len()], WeightedPoly::one(&curve.gens));
        for sym in &mono.0 {
            match sym.kind {
                SymKind::Zeta | SymKind::Wp => {
                    term = term.mul(&logs.numerator(&sym.indices));
                }
                SymKind::Psum => panic!("three-point symbols cannot be sigma-checked directly"),
            }
        }
        // ℘_ω = −N_ω/σ^{|ω|}: one sign flip per ℘ factor
        let wp_count = mono.0.iter().filter(|s| s.kind == SymKind::Wp).count();
        let sign = if wp_count % 2 == 1 { -1i64 } else { 1 };
        let deficit = big_m - power(mono);
        for _ in 0..deficit {
            term = term.mul(&data.series);
        }
        let mut c = coeff.clone();
        if sign < 0 {
            c = c.neg();
        }
        numerator = numerator.add(&term.scale_elem(&c));
    }

    // expected leading weight if the relation failed outright
    let rel_weight = match equation.homogeneity() {
        Some(crate::ring::Homogeneity::Weight(w)) => w,
        _ => 0,
    };
    let sigma_lead = data.series.leading_weight().unwrap_or(0);
    let floor = big_m * sigma_lead - rel_weight;
    let certified = numerator.weight_trunc - floor;
    Ok(SigmaCheckReport {
        certified_orders: certified.max(0),
        residual_terms: numerator.num_terms(),
        residual_display: format!("{numerator}"),
    })
}
