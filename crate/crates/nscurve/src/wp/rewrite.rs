//! Directed rewriting by a curve's Abelian-function relations.
//!
//! Each embedded equation is oriented with its graded-largest monomial as
//! head. Single-symbol heads also rewrite any symbol whose index multiset
//! contains the head's (the replacement is the formally differentiated
//! right-hand side), which is how five-and-more-index `℘` symbols reduce.
//! Reduction always rewrites the largest reducible monomial with the
//! largest applicable head, so normal forms do not depend on the order the
//! rules were listed in.

use super::poly::{parse_wp, WpMonomial, WpPoly};
use super::symbol::{PointTag, SymKind, WpSymbol};
use crate::ring::{GenSet, Homogeneity};
use num::traits::One;
use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("rewriting exceeded the step budget ({0} steps)")]
    NonTerminating(usize),
    #[error("no embedded relation set for the ({0},{1})-curve")]
    UnsupportedCurve(u32, u32),
}

/// One oriented rule `head -> rhs` with the head coefficient normalized
/// away; `rhs` is strictly smaller than `head` term by term.
#[derive(Clone, Debug)]
pub struct Rule {
    pub head: WpMonomial,
    pub rhs: WpPoly,
}

/// A curve's oriented relation set.
#[derive(Clone, Debug)]
pub struct RelationSet {
    pub curve: (u32, u32),
    pub gens: Arc<GenSet>,
    pub rules: Vec<Rule>,
}

impl RelationSet {
    /// Orient a list of equations (each `= 0`) into rules. Equations whose
    /// largest monomial is already a head are first reduced by the earlier
    /// rule for that head, then re-oriented.
    pub fn from_equations(
        curve: (u32, u32),
        gens: &Arc<GenSet>,
        equations: Vec<WpPoly>,
    ) -> Self {
        let mut rules: Vec<Rule> = Vec::new();
        for mut eq in equations {
            loop {
                if eq.is_zero() {
                    break;
                }
                let (head, coeff) = {
                    let (m, c) = eq.leading().expect("nonzero equation");
                    (m.clone(), c.clone())
                };
                match rules.iter().find(|r| r.head == head) {
                    None => {
                        let k = coeff
                            .as_constant()
                            .expect("head coefficient must be a rational constant");
                        // eq = k*head + rest = 0  =>  head -> -rest/k
                        let mut rest = eq.clone();
                        rest.terms.remove(&head);
                        let rhs = rest.scale(&(-num::BigRational::one() / k));
                        for m in rhs.terms.keys() {
                            assert!(
                                *m < head,
                                "({},{}) rule for {head} has non-decreasing term {m}",
                                curve.0,
                                curve.1
                            );
                        }
                        rules.push(Rule { head, rhs });
                        break;
                    }
                    Some(prev) => {
                        // eliminate the shared head and re-orient
                        let k = coeff.as_constant().expect("rational head coefficient");
                        let mut rest = eq.clone();
                        rest.terms.remove(&head);
                        // eq - k*(head - rhs_prev) = rest + k*rhs_prev
                        eq = rest.add(&prev.rhs.scale(&k));
                    }
                }
            }
        }
        RelationSet {
            curve,
            gens: gens.clone(),
            rules,
        }
    }

    /// Conservative completion: join every critical pair (overlapping
    /// product heads, and unions of single-symbol heads) and add any
    /// non-vanishing difference as a new rule. Such differences are
    /// combinations of existing rules, so the generated ideal is unchanged;
    /// the completed set just reaches normal forms the original
    /// orientation could not. Pairs above `weight_cap` are ignored.
    pub fn completed(&self, weight_cap: i64) -> Result<RelationSet, RewriteError> {
        let mut out = self.clone();
        loop {
            let mut additions: Vec<WpPoly> = Vec::new();
            let n = out.rules.len();
            for i in 0..n {
                for j in (i + 1)..n {
                    let (hi, hj) = (&out.rules[i].head, &out.rules[j].head);
                    let pair = if hi.0.len() == 1
                        && hj.0.len() == 1
                        && hi.0[0].kind == SymKind::Wp
                        && hj.0[0].kind == SymKind::Wp
                    {
                        // union of the two index multisets
                        let (ia, ib) = (&hi.0[0].indices, &hj.0[0].indices);
                        let mut union = ia.clone();
                        for &x in ib {
                            let cb = ib.iter().filter(|&&y| y == x).count();
                            let cu = union.iter().filter(|&&y| y == x).count();
                            if cu < cb {
                                union.extend(std::iter::repeat(x).take(cb - cu));
                            }
                        }
                        union.sort_unstable();
                        if union == *ia || union == *ib {
                            None // one head contains the other; engine picks
                        } else {
                            let u = WpSymbol {
                                kind: SymKind::Wp,
                                tag: PointTag::Free,
                                indices: union,
                            };
                            if u.weight() > weight_cap {
                                None
                            } else {
                                let ra = out.rules[i]
                                    .rhs
                                    .derivative_multi(&u.indices_minus(ia));
                                let rb = out.rules[j]
                                    .rhs
                                    .derivative_multi(&u.indices_minus(ib));
                                Some(ra.sub(&rb))
                            }
                        }
                    } else if hi.0.len() >= 2 && hj.0.len() >= 2 {
                        // multiset lcm of the product heads; only when they
                        // genuinely overlap
                        let shared = hi
                            .0
                            .iter()
                            .any(|s| hj.0.iter().any(|t| s == t));
                        if !shared {
                            None
                        } else {
                            let mut union = hi.0.clone();
                            for t in &hj.0 {
                                let ci = hj.0.iter().filter(|x| *x == t).count();
                                let cu = union.iter().filter(|x| *x == t).count();
                                if cu < ci {
                                    union.extend(std::iter::repeat(t.clone()).take(ci - cu));
                                }
                            }
                            let u = WpMonomial::from_symbols(union);
                            if u.weight() > weight_cap {
                                None
                            } else {
                                let cof_i = u.try_remove(hi).expect("divides");
                                let cof_j = u.try_remove(hj).expect("divides");
                                let mut pi = WpPoly::zero(&out.gens);
                                pi.insert(cof_i, crate::ring::WeightedPoly::one(&out.gens));
                                let mut pj = WpPoly::zero(&out.gens);
                                pj.insert(cof_j, crate::ring::WeightedPoly::one(&out.gens));
                                Some(out.rules[i].rhs.mul(&pi).sub(&out.rules[j].rhs.mul(&pj)))
                            }
                        }
                    } else {
                        None
                    };
                    if let Some(diff) = pair {
                        if std::env::var("NSCURVE_DEBUG").is_ok() {
                            eprintln!("[completion] join {} | {}", out.rules[i].head, out.rules[j].head);
                        }
                        let mut red = Reducer::new(&out);
                        red.budget = 2_000_000;
                        let nf = red.reduce(&diff)?;
                        if !nf.is_zero() {
                            additions.push(nf);
                        }
                    }
                }
            }
            if additions.is_empty() {
                return Ok(out);
            }
            let before = out.rules.len();
            let mut eqs: Vec<WpPoly> = Vec::new();
            for r in &out.rules {
                let mut head = WpPoly::zero(&out.gens);
                head.insert(r.head.clone(), crate::ring::WeightedPoly::one(&out.gens));
                eqs.push(head.sub(&r.rhs));
            }
            eqs.extend(additions);
            out = RelationSet::from_equations(self.curve, &self.gens, eqs);
            if out.rules.len() == before || out.rules.len() > 300 {
                return Ok(out);
            }
        }
    }

    /// Weighted-homogeneity audit; returns violations as printable strings.
    pub fn homogeneity_audit(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for rule in &self.rules {
            let w = rule.head.weight();
            for (m, c) in &rule.rhs.terms {
                let ok = match c.homogeneity() {
                    Some(Homogeneity::Zero) => true,
                    Some(Homogeneity::Weight(cw)) => m.weight() + cw == w,
                    None => false,
                };
                if !ok {
                    bad.push(format!(
                        "rule {} has term {}*{} of mismatched weight (head weight {w})",
                        rule.head, c, m
                    ));
                }
            }
        }
        bad
    }

    /// Single-symbol heads (index multisets), smallest first. Expanding a
    /// symbol through the smallest head keeps the expansion stable when
    /// further indices are added, which is what makes formal
    /// differentiation commute with reduction.
    fn single_heads(&self) -> Vec<(usize, &WpSymbol)> {
        let mut v: Vec<(usize, &WpSymbol)> = self
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.head.0.len() == 1 && r.head.0[0].kind == SymKind::Wp)
            .map(|(i, r)| (i, &r.head.0[0]))
            .collect();
        v.sort_by(|(_, a), (_, b)| a.cmp_graded(b));
        v
    }
}

enum Candidate {
    /// Apply a product rule at the given tag: cofactor is `m / head`.
    Product {
        rule: usize,
        tag: PointTag,
        cofactor: WpMonomial,
    },
    /// Expand one symbol via a (possibly differentiated) single-symbol rule.
    Symbol { symbol: WpSymbol },
}

/// Reduction engine with a per-call step budget and a cache of single
/// symbol normal forms.
pub struct Reducer<'a> {
    pub rel: &'a RelationSet,
    /// Normal forms of single symbols, stored tag-free.
    cache: HashMap<(Vec<u8>,), WpPoly>,
    in_progress: std::collections::HashSet<Vec<u8>>,
    pub budget: usize,
}

pub const DEFAULT_BUDGET: usize = 10_000;

impl<'a> Reducer<'a> {
    pub fn new(rel: &'a RelationSet) -> Self {
        Reducer {
            rel,
            cache: HashMap::new(),
            in_progress: Default::default(),
            budget: DEFAULT_BUDGET,
        }
    }

    fn best_candidate(&self, m: &WpMonomial) -> Option<Candidate> {
        let mut best: Option<(WpMonomial, Candidate)> = None;
        let mut consider = |head_key: WpMonomial, cand: Candidate| match &best {
            Some((k, _)) if *k >= head_key => {}
            _ => best = Some((head_key, cand)),
        };
        // product heads, matched at a uniform point tag
        for (i, rule) in self.rel.rules.iter().enumerate() {
            if rule.head.0.len() < 2 {
                continue;
            }
            let mut tags: Vec<PointTag> = m.0.iter().map(|s| s.tag).collect();
            tags.sort();
            tags.dedup();
            for tag in tags {
                let retagged =
                    WpMonomial::from_symbols(rule.head.0.iter().map(|s| s.clone().at(tag)).collect());
                if let Some(cof) = m.try_remove(&retagged) {
                    consider(
                        retagged.clone(),
                        Candidate::Product {
                            rule: i,
                            tag,
                            cofactor: cof,
                        },
                    );
                }
            }
        }
        // single-symbol heads by index-multiset inclusion
        for s in &m.0 {
            if s.kind != SymKind::Wp {
                continue;
            }
            for (_i, h) in self.rel.single_heads() {
                if s.indices_superset_of(&h.indices) {
                    // key: the symbol being rewritten beats smaller product
                    // heads; among rules on the same symbol the loop order
                    // (largest head first) picks the most specific one.
                    consider(
                        WpMonomial::symbol(s.clone()),
                        Candidate::Symbol { symbol: s.clone() },
                    );
                    break;
                }
            }
        }
        best.map(|(_, c)| c)
    }

    /// Fully reduced expansion of a single symbol (tag-free cache).
    /// `Ok(None)` marks a cyclic derivation: the caller leaves the symbol
    /// in place, which keeps the result a valid (if not fully normal)
    /// rewrite of the input.
    fn symbol_nf(&mut self, s: &WpSymbol, steps: &mut usize) -> Result<Option<WpPoly>, RewriteError> {
        let key = (s.indices.clone(),);
        if let Some(p) = self.cache.get(&key) {
            return Ok(Some(p.retag(s.tag)));
        }
        let free = WpSymbol {
            kind: SymKind::Wp,
            tag: PointTag::Free,
            indices: s.indices.clone(),
        };
        // an exact head wins; otherwise expand through the smallest
        // contained head
        let mut chosen: Option<(usize, Vec<u8>)> = None;
        for (i, h) in self.rel.single_heads() {
            if h.indices == free.indices {
                chosen = Some((i, h.indices.clone()));
                break;
            }
        }
        if chosen.is_none() {
            for (i, h) in self.rel.single_heads() {
                if free.indices_superset_of(&h.indices) {
                    chosen = Some((i, h.indices.clone()));
                    break;
                }
            }
        }
        let (rule_idx, pattern) = chosen.expect("symbol_nf called on an irreducible symbol");
        if self.in_progress.contains(&s.indices) {
            return Ok(None);
        }
        self.in_progress.insert(s.indices.clone());
        let extra = free.indices_minus(&pattern);
        let raw = self.rel.rules[rule_idx].rhs.derivative_multi(&extra);
        let nf = self.reduce_inner(raw, steps);
        self.in_progress.remove(&s.indices);
        let nf = nf?;
        // cache only clean results; a form computed under an active cycle
        // may contain symbols that were skipped
        if self.in_progress.is_empty() {
            self.cache.insert(key, nf.clone());
        }
        Ok(Some(nf.retag(s.tag)))
    }

    /// Phase A: replace every symbol containing a single-symbol head by its
    /// (memoized, fully reduced) expansion. Expansions cannot reintroduce
    /// expandable symbols, so one global substitution pass per discovered
    /// symbol suffices.
    fn expand_symbols(&mut self, p: WpPoly, steps: &mut usize) -> Result<WpPoly, RewriteError> {
        let mut p = p;
        let mut skipped: std::collections::HashSet<Vec<u8>> = Default::default();
        loop {
            let mut found: Option<WpSymbol> = None;
            'scan: for (m, _) in p.terms.iter().rev() {
                for s in &m.0 {
                    if s.kind != SymKind::Wp || skipped.contains(&s.indices) {
                        continue;
                    }
                    for (_i, h) in self.rel.single_heads() {
                        if s.indices_superset_of(&h.indices) {
                            found = Some(s.clone());
                            break 'scan;
                        }
                    }
                }
            }
            let Some(sym) = found else {
                return Ok(p);
            };
            *steps += 1;
            if *steps > self.budget {
                return Err(RewriteError::NonTerminating(self.budget));
            }
            let Some(nf) = self.symbol_nf(&sym, steps)? else {
                skipped.insert(sym.indices.clone());
                continue;
            };
            let mut out = WpPoly::zero(&p.gens);
            for (m, coeff) in &p.terms {
                let count = m.0.iter().filter(|s| **s == sym).count();
                if count == 0 {
                    out.insert(m.clone(), coeff.clone());
                    continue;
                }
                let mut rest = m.clone();
                for _ in 0..count {
                    rest = rest.remove_symbol(&sym).unwrap();
                }
                let mut add = WpPoly::zero(&p.gens);
                add.insert(rest, coeff.clone());
                for _ in 0..count {
                    add = add.mul(&nf);
                }
                out = out.add(&add);
            }
            p = out;
        }
    }

    /// Phase B: product-head rewriting, largest monomial first; every step
    /// strictly decreases in the graded order.
    fn reduce_products(&mut self, p: WpPoly, steps: &mut usize) -> Result<WpPoly, RewriteError> {
        let mut p = p;
        let mut done = WpPoly::zero(&p.gens);
        loop {
            let mut target: Option<(WpMonomial, Candidate)> = None;
            for (m, _) in p.terms.iter().rev() {
                if done.terms.contains_key(m) {
                    continue;
                }
                if let Some(c) = self.best_candidate(m) {
                    target = Some((m.clone(), c));
                    break;
                }
            }
            let Some((m, cand)) = target else {
                return Ok(p.add(&done));
            };
            *steps += 1;
            if *steps > self.budget {
                return Err(RewriteError::NonTerminating(self.budget));
            }
            let coeff = p.terms.get(&m).cloned().expect("term present");
            p.terms.remove(&m);
            match cand {
                Candidate::Product { rule, tag, cofactor } => {
                    let rhs = self.rel.rules[rule].rhs.retag(tag);
                    let mut add = rhs;
                    if !cofactor.is_empty() {
                        let mut cof = WpPoly::zero(&p.gens);
                        cof.insert(cofactor, crate::ring::WeightedPoly::one(&p.gens));
                        add = add.mul(&cof);
                    }
                    p = p.add(&add.scale_poly(&coeff));
                }
                Candidate::Symbol { symbol } => {
                    // stray expandable symbol injected by a product rewrite
                    match self.symbol_nf(&symbol, steps)? {
                        Some(nf) => {
                            let rest = m.remove_symbol(&symbol).expect("symbol in monomial");
                            let mut add = nf;
                            if !rest.is_empty() {
                                let mut cof = WpPoly::zero(&p.gens);
                                cof.insert(rest, crate::ring::WeightedPoly::one(&p.gens));
                                add = add.mul(&cof);
                            }
                            p = p.add(&add.scale_poly(&coeff));
                        }
                        None => {
                            done.insert(m, coeff);
                        }
                    }
                }
            }
        }
    }

    fn reduce_inner(&mut self, p: WpPoly, steps: &mut usize) -> Result<WpPoly, RewriteError> {
        let p = self.expand_symbols(p, steps)?;
        self.reduce_products(p, steps)
    }

    /// Reduce to the fixed point of head rewriting.
    pub fn reduce(&mut self, p: &WpPoly) -> Result<WpPoly, RewriteError> {
        let mut steps = 0usize;
        self.reduce_inner(p.clone(), &mut steps)
    }
}

/// Parse fixture text: one equation per line, `LHS = RHS` (or a bare
/// polynomial meaning `= 0`); `#` comments.
pub fn equations_from_text(text: &str, gens: &Arc<GenSet>) -> Vec<WpPoly> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let eq = match line.split_once('=') {
            Some((lhs, rhs)) => {
                let l = parse_wp(lhs.trim(), gens)
                    .unwrap_or_else(|e| panic!("bad relation `{line}`: {e}"));
                let r = parse_wp(rhs.trim(), gens)
                    .unwrap_or_else(|e| panic!("bad relation `{line}`: {e}"));
                l.sub(&r)
            }
            None => parse_wp(line, gens).unwrap_or_else(|e| panic!("bad relation `{line}`: {e}")),
        };
        out.push(eq);
    }
    out
}
