//! Weight-graded slices of the differential ideal generated by a relation
//! set, and exact projection of polynomials onto them.
//!
//! A constraint `r` of total weight `W` lies in the ideal exactly when it
//! is a rational combination of elements `λ^σ · m · ∂^e(E_i)` of weight
//! `W`, where `E_i` runs over the relation equations, `∂^e` over gap
//! derivatives, and `m` over symbol monomials. Projection sets this up as
//! a sparse linear system over the rationals and eliminates; unknown
//! coefficients of designated generators (regularization constants, φ
//! pieces, additive offsets) ride along as extra columns and must come out
//! uniquely determined.

use super::poly::{WpMonomial, WpPoly};
use super::rewrite::RelationSet;
use super::symbol::{SymKind, WpSymbol};
use crate::ring::{Rat, WeightedPoly};
use num::traits::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IdealError {
    #[error("polynomial is not weight-homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("constraint is not a member of the relation ideal; obstruction at {0}")]
    NotMember(String),
    #[error("unknown {0} is not determined by the constraint")]
    Undetermined(String),
    #[error("constraint is nonlinear in the remaining unknowns: {0}")]
    NonLinear(String),
}

/// All ℘ index multisets (at least two indices) over `gaps` with weight at
/// most `max_weight`.
fn wp_symbols_up_to(gaps: &[i64], max_weight: i64) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = Vec::new();
    fn rec(gaps: &[i64], start: usize, left: i64, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() >= 2 {
            out.push(cur.clone());
        }
        for (gi, &g) in gaps.iter().enumerate().skip(start) {
            if g <= left {
                cur.push(g as u8);
                rec(gaps, gi, left - g, cur, out);
                cur.pop();
            }
        }
    }
    rec(gaps, 0, max_weight, &mut cur, &mut out);
    out
}

/// All ℘ monomials (products of the above symbols) of weight exactly `w`,
/// including the empty monomial when `w == 0`.
fn wp_monomials_of_weight(gaps: &[i64], w: i64) -> Vec<WpMonomial> {
    let symbols: Vec<WpSymbol> = wp_symbols_up_to(gaps, w)
        .into_iter()
        .map(|idx| WpSymbol::wp(&idx))
        .collect();
    let mut out = Vec::new();
    let mut cur: Vec<WpSymbol> = Vec::new();
    fn rec(
        symbols: &[WpSymbol],
        start: usize,
        left: i64,
        cur: &mut Vec<WpSymbol>,
        out: &mut Vec<WpMonomial>,
    ) {
        if left == 0 {
            out.push(WpMonomial::from_symbols(cur.clone()));
            return;
        }
        for (si, s) in symbols.iter().enumerate().skip(start) {
            if s.weight() <= left {
                cur.push(s.clone());
                rec(symbols, si, left - s.weight(), cur, out);
                cur.pop();
            }
        }
    }
    rec(&symbols, 0, w, &mut cur, &mut out);
    out
}

/// Gap-derivative multisets of weight at most `max_weight`.
fn derivative_multisets(gaps: &[i64], max_weight: i64) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut cur: Vec<u8> = Vec::new();
    fn rec(gaps: &[i64], start: usize, left: i64, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        for (gi, &g) in gaps.iter().enumerate().skip(start) {
            if g <= left {
                cur.push(g as u8);
                out.push(cur.clone());
                rec(gaps, gi, left - g, cur, out);
                cur.pop();
            }
        }
    }
    rec(gaps, 0, max_weight, &mut cur, &mut out);
    out
}

/// λ-monomials of weight exactly `w` over the curve's coefficient indices;
/// exponent vectors over the full generator set.
fn lambda_monomials_of_weight(
    curve: &crate::curve::CurveSpec,
    w: i64,
) -> Vec<Vec<u16>> {
    let idxs: Vec<(usize, i64)> = curve
        .lambda_indices
        .iter()
        .map(|&k| {
            (
                curve.gens.index_of(&format!("λ{k}")).unwrap(),
                k,
            )
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = vec![0u16; curve.gens.len()];
    fn rec(
        idxs: &[(usize, i64)],
        start: usize,
        left: i64,
        cur: &mut Vec<u16>,
        out: &mut Vec<Vec<u16>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for (pos, &(gi, wgt)) in idxs.iter().enumerate().skip(start) {
            if wgt <= left {
                cur[gi] += 1;
                rec(idxs, pos, left - wgt, cur, out);
                cur[gi] -= 1;
            }
        }
    }
    rec(&idxs, 0, w, &mut cur, &mut out);
    out
}

/// Sparse exact Gaussian elimination. Rows are `column -> value` maps.
pub struct SparseSystem {
    rows: Vec<BTreeMap<usize, Rat>>,
    pub ncols: usize,
}

impl SparseSystem {
    pub fn new(ncols: usize) -> Self {
        SparseSystem {
            rows: Vec::new(),
            ncols,
        }
    }

    pub fn push_row(&mut self, row: BTreeMap<usize, Rat>) {
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    /// Eliminate columns `0..ncols` in order; returns the reduced rows.
    /// Columns listed in `solve_for` (a tail segment) get values extracted;
    /// rows with support only on `rhs_col` signal inconsistency.
    pub fn eliminate(mut self) -> Vec<BTreeMap<usize, Rat>> {
        let mut reduced: Vec<BTreeMap<usize, Rat>> = Vec::new();
        for col in 0..self.ncols {
            // pick the sparsest row with leading entry in `col`
            let mut best: Option<(usize, usize)> = None;
            for (ri, row) in self.rows.iter().enumerate() {
                if let Some((&lead, _)) = row.iter().next() {
                    if lead == col {
                        let sz = row.len();
                        if best.map_or(true, |(_, b)| sz < b) {
                            best = Some((ri, sz));
                        }
                    }
                }
            }
            let Some((ri, _)) = best else { continue };
            let pivot_row = self.rows.swap_remove(ri);
            let pivot_val = pivot_row[&col].clone();
            for row in self.rows.iter_mut() {
                if let Some(v) = row.get(&col).cloned() {
                    let factor = &v / &pivot_val;
                    for (c, pv) in &pivot_row {
                        let delta = pv * &factor;
                        let entry = row.entry(*c).or_insert_with(Rat::zero);
                        *entry = &*entry - &delta;
                        if entry.is_zero() {
                            row.remove(c);
                        }
                    }
                }
            }
            self.rows.retain(|r| !r.is_empty());
            reduced.push(pivot_row);
        }
        reduced.extend(self.rows);
        reduced
    }
}

/// Generator slice of the differential ideal at one total weight, cached
/// per weight.
pub struct IdealSlices<'a> {
    pub curve: &'a crate::curve::CurveSpec,
    pub rel: &'a RelationSet,
    slices: BTreeMap<i64, Vec<WpPoly>>,
}

impl<'a> IdealSlices<'a> {
    pub fn new(curve: &'a crate::curve::CurveSpec, rel: &'a RelationSet) -> Self {
        IdealSlices {
            curve,
            rel,
            slices: BTreeMap::new(),
        }
    }

    /// Ideal generators of total weight exactly `w` (λ-multipliers
    /// included).
    pub fn slice(&mut self, w: i64) -> &[WpPoly] {
        if !self.slices.contains_key(&w) {
            let mut gens: Vec<WpPoly> = Vec::new();
            let equations: Vec<(i64, WpPoly)> = self
                .rel
                .rules
                .iter()
                .map(|r| {
                    let mut head = WpPoly::zero(&self.rel.gens);
                    head.insert(r.head.clone(), WeightedPoly::one(&self.rel.gens));
                    (r.head.weight(), head.sub(&r.rhs))
                })
                .collect();
            for (we, eq) in &equations {
                for deriv in derivative_multisets(&self.curve.gaps, w - we) {
                    let dw: i64 = deriv.iter().map(|&d| d as i64).sum();
                    let de = if deriv.is_empty() {
                        eq.clone()
                    } else {
                        eq.derivative_multi(&deriv)
                    };
                    let rest = w - we - dw;
                    for mono in wp_monomials_of_weight(&self.curve.gaps, rest) {
                        let mut cof = WpPoly::zero(&self.rel.gens);
                        cof.insert(mono.clone(), WeightedPoly::one(&self.rel.gens));
                        let base = de.mul(&cof);
                        gens.push(base);
                    }
                }
            }
            // λ-multiplied copies are generated lazily at projection time
            self.slices.insert(w, gens);
        }
        &self.slices[&w]
    }
}

/// Outcome of projecting one constraint.
pub struct Projection {
    /// Solved values for the requested unknown generators.
    pub solved: Vec<(usize, WeightedPoly)>,
    /// Additive λ-constant absorbed when offset mode is on.
    pub offset: WeightedPoly,
}

/// Decide membership of `r` (total weight `w`) in
/// `ideal + span{unknown_gens · λ-monomials}` and solve for the unknowns.
/// Every unknown that occurs in `r` must be pinned uniquely.
pub fn project_constraint(
    slices: &mut IdealSlices,
    r: &WpPoly,
    unknowns: &[usize],
) -> Result<Projection, IdealError> {
    project_with_offset(slices, r, unknowns, false)
}

/// Like [`project_constraint`], but also absorbs an additive λ-constant
/// (coefficient of the empty monomial), which is returned.
pub fn project_with_offset(
    slices: &mut IdealSlices,
    r: &WpPoly,
    unknowns: &[usize],
    allow_offset: bool,
) -> Result<Projection, IdealError> {
    let curve = slices.curve;
    let gens_set = curve.gens.clone();
    if r.is_zero() {
        return Ok(Projection {
            solved: Vec::new(),
            offset: WeightedPoly::zero(&slices.curve.gens),
        });
    }
    let w = match r.homogeneity() {
        Some(crate::ring::Homogeneity::Weight(w)) => w,
        Some(crate::ring::Homogeneity::Zero) => {
            return Ok(Projection {
                solved: Vec::new(),
                offset: WeightedPoly::zero(&slices.curve.gens),
            })
        }
        None => return Err(IdealError::NotHomogeneous(r.to_string())),
    };

    // which unknowns actually occur
    let active: Vec<usize> = unknowns
        .iter()
        .copied()
        .filter(|&u| r.terms.values().any(|c| c.contains_gen(u)))
        .collect();
    // linearity in the active unknowns
    for coeff in r.terms.values() {
        if coeff.decompose_linear(&active).is_none() {
            return Err(IdealError::NonLinear(r.to_string()));
        }
    }

    // row space: (℘-monomial, λ-exponent-vector)
    let mut row_of: BTreeMap<(WpMonomial, Vec<u16>), usize> = BTreeMap::new();
    let mut row_key = |m: &WpMonomial, e: &[u16], next: &mut usize| -> usize {
        let key = (m.clone(), e.to_vec());
        *row_of.entry(key).or_insert_with(|| {
            let v = *next;
            *next += 1;
            v
        })
    };
    let mut nrows = 0usize;

    // columns: one per (generator, λ-multiplier), then per (unknown,
    // λ-monomial of complementary weight), then the affine column.
    struct Col {
        kind: ColKind,
    }
    enum ColKind {
        Alpha,
        Gamma { unknown: usize, lam: Vec<u16> },
        Offset { lam: Vec<u16> },
    }
    let mut cols: Vec<Col> = Vec::new();

    // build columns: ideal generators with λ-multipliers
    let mut entries: Vec<Vec<(usize, Rat)>> = Vec::new(); // per column
    let slice_polys: Vec<WpPoly> = slices.slice(w).to_vec();
    // strip λ-free weights: generator total weights may be below w; pad
    // with λ-monomials
    for g in &slice_polys {
        let gw = match g.homogeneity() {
            Some(crate::ring::Homogeneity::Weight(x)) => x,
            _ => continue,
        };
        let pad = w - gw;
        if pad < 0 {
            continue;
        }
        for lam in lambda_monomials_of_weight(curve, pad) {
            let mut colvals: Vec<(usize, Rat)> = Vec::new();
            for (m, coeff) in &g.terms {
                for (le, cv) in coeff.sorted_terms() {
                    let mut full = le.clone();
                    for (i, &x) in lam.iter().enumerate() {
                        full[i] += x;
                    }
                    let rk = row_key(m, &full, &mut nrows);
                    colvals.push((rk, cv.clone()));
                }
            }
            if !colvals.is_empty() {
                entries.push(colvals);
                cols.push(Col { kind: ColKind::Alpha });
            }
        }
    }
    // unknown columns: the value of `u` is Σ γ_τ λ^τ with wgt λ^τ = wgt u
    for &u in &active {
        let uw = gens_set.weight(u);
        for lam in lambda_monomials_of_weight(curve, uw) {
            // the unknown contributes to the empty ℘-monomial? No: it
            // multiplies whatever ℘-monomial its coefficient sits on in r.
            // Treat the unknown column as "value of u = Σ γ λ^τ": its
            // effect on r is substitution; build the column from r's
            // u-linear part.
            let mut colvals: Vec<(usize, Rat)> = Vec::new();
            for (m, coeff) in &r.terms {
                let (us, _rest) = coeff.decompose_linear(&[u]).expect("checked linear");
                // us[0] = coefficient of u in this term's λc-polynomial
                for (le, cv) in us[0].sorted_terms() {
                    let mut full = le.clone();
                    for (i, &x) in lam.iter().enumerate() {
                        full[i] += x;
                    }
                    let rk = row_key(m, &full, &mut nrows);
                    colvals.push((rk, cv.clone()));
                }
            }
            if !colvals.is_empty() {
                entries.push(colvals);
                cols.push(Col {
                    kind: ColKind::Gamma { unknown: u, lam },
                });
            }
        }
    }
    // additive-offset columns on the empty monomial
    if allow_offset {
        let empty = WpMonomial::one();
        for lam in lambda_monomials_of_weight(curve, w) {
            let rk = row_key(&empty, &lam, &mut nrows);
            entries.push(vec![(rk, Rat::from_integer(1.into()))]);
            cols.push(Col {
                kind: ColKind::Offset { lam },
            });
        }
    }

    // affine part: r with unknowns set to zero
    let mut rhs_rows: BTreeMap<usize, Rat> = BTreeMap::new();
    for (m, coeff) in &r.terms {
        let (_us, rest) = coeff.decompose_linear(&active).expect("checked linear");
        for (le, cv) in rest.sorted_terms() {
            let rk = row_key(m, le, &mut nrows);
            let e = rhs_rows.entry(rk).or_insert_with(Rat::zero);
            *e = &*e + cv;
        }
    }

    // assemble: columns 0..ncols are unknown multipliers; the last column
    // carries the affine part. Rows indexed by the slice keys.
    let ncols = cols.len();
    let rhs_col = ncols;
    let mut by_row: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); nrows];
    for (ci, colvals) in entries.iter().enumerate() {
        for (rk, v) in colvals {
            let e = by_row[*rk].entry(ci).or_insert_with(Rat::zero);
            *e = &*e + v;
        }
    }
    for (rk, v) in &rhs_rows {
        by_row[*rk].insert(rhs_col, v.clone());
    }
    let mut sys = SparseSystem::new(ncols + 1);
    for row in by_row {
        sys.push_row(row);
    }
    let reduced = sys.eliminate();

    // Consistency and unknown extraction. Echelon rows are ordered by
    // leading column; α columns come first, so a row led by a γ column can
    // only involve later γ columns and the affine part.
    let mut pivots: std::collections::HashSet<usize> = Default::default();
    let mut values: BTreeMap<usize, Rat> = BTreeMap::new();
    for row in reduced.iter().rev() {
        let Some((&lead, leadv)) = row.iter().next() else { continue };
        if lead == rhs_col {
            return Err(IdealError::NotMember(format!(
                "weight {w}: residual affine row"
            )));
        }
        pivots.insert(lead);
        let mut acc = Rat::zero();
        for (c, v) in row.iter().skip(1) {
            if *c == rhs_col {
                acc = &acc + v;
            } else if let Some(known) = values.get(c) {
                acc = &acc + &(v * known);
            }
        }
        values.insert(lead, -acc / leadv);
    }
    // every nonempty γ column must be a pivot, else the unknown would not
    // be uniquely determined
    for (ci, col) in cols.iter().enumerate() {
        if let ColKind::Gamma { unknown, .. } = &col.kind {
            if !pivots.contains(&ci) {
                return Err(IdealError::Undetermined(
                    gens_set.name(*unknown).to_string(),
                ));
            }
        }
    }

    // gather unknown values: u = Σ γ λ^τ, plus the offset when enabled
    let mut solved: BTreeMap<usize, WeightedPoly> = BTreeMap::new();
    let mut offset = WeightedPoly::zero(&gens_set);
    for (ci, col) in cols.iter().enumerate() {
        match &col.kind {
            ColKind::Gamma { unknown, lam } => {
                let gamma = values.get(&ci).cloned().unwrap_or_else(Rat::zero);
                let entry = solved
                    .entry(*unknown)
                    .or_insert_with(|| WeightedPoly::zero(&gens_set));
                if !gamma.is_zero() {
                    let mut mono = WeightedPoly::zero(&gens_set);
                    mono.insert_term(lam.clone(), gamma);
                    *entry = entry.add(&mono);
                }
            }
            ColKind::Offset { lam } => {
                let gamma = values.get(&ci).cloned().unwrap_or_else(Rat::zero);
                if !gamma.is_zero() {
                    let mut mono = WeightedPoly::zero(&gens_set);
                    mono.insert_term(lam.clone(), -gamma);
                    offset = offset.add(&mono);
                }
            }
            ColKind::Alpha => {}
        }
    }
    Ok(Projection {
        solved: solved.into_iter().collect(),
        offset,
    })
}

/// Pure membership test (no unknowns).
pub fn verify_membership(slices: &mut IdealSlices, r: &WpPoly) -> Result<(), IdealError> {
    let proj = project_constraint(slices, r, &[])?;
    let _ = proj;
    Ok(())
}
