use super::{needs_parens, normalize_order, CoeffRing, LaurentSeries, SeriesError, EXACT};
use crate::ring::Rat;
use std::collections::BTreeMap;
use std::fmt;

/// Weight-truncated multivariate series in variables `u_1..u_g` with
/// positive weights. Stored terms all have total weight strictly below
/// `weight_trunc`; heavier terms are unknown.
#[derive(Clone, Debug)]
pub struct MultiSeries<R: CoeffRing> {
    pub(crate) ring: R,
    /// `(name, weight)` per variable.
    pub vars: Vec<(String, i64)>,
    pub(crate) terms: BTreeMap<Vec<u16>, R::Elem>,
    pub weight_trunc: i64,
}

impl<R: CoeffRing> MultiSeries<R> {
    pub fn zero(ring: &R, vars: Vec<(String, i64)>, weight_trunc: i64) -> Self {
        MultiSeries {
            ring: ring.clone(),
            vars,
            terms: BTreeMap::new(),
            weight_trunc: normalize_order(weight_trunc),
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn term_weight(&self, e: &[u16]) -> i64 {
        e.iter()
            .zip(self.vars.iter())
            .map(|(&k, (_, w))| k as i64 * w)
            .sum()
    }

    pub fn add_term(&mut self, e: Vec<u16>, c: R::Elem) {
        if self.ring.is_zero(&c) || self.term_weight(&e) >= self.weight_trunc {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = self.ring.add(o.get(), &c);
                if self.ring.is_zero(&sum) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero_through_truncation(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &R::Elem)> {
        self.terms.iter()
    }

    /// Smallest total weight among stored terms.
    pub fn leading_weight(&self) -> Option<i64> {
        self.terms.keys().map(|e| self.term_weight(e)).min()
    }

    pub fn coeff(&self, e: &[u16]) -> Result<R::Elem, SeriesError> {
        let w = self.term_weight(e);
        if w >= self.weight_trunc {
            return Err(SeriesError::InsufficientPrecision {
                need: w,
                have: self.weight_trunc,
            });
        }
        Ok(self
            .terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| self.ring.zero()))
    }

    pub fn truncate_to(&self, weight_trunc: i64) -> Self {
        let weight_trunc = normalize_order(weight_trunc.min(self.weight_trunc));
        let mut out = Self::zero(&self.ring, self.vars.clone(), weight_trunc);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.vars, other.vars);
        let mut out = self.truncate_to(other.weight_trunc);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.ring.neg(c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let mut out = Self::zero(&self.ring, self.vars.clone(), self.weight_trunc);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), self.ring.scale(c, r));
        }
        out
    }

    pub fn scale_elem(&self, k: &R::Elem) -> Self {
        let mut out = Self::zero(&self.ring, self.vars.clone(), self.weight_trunc);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), self.ring.mul(c, k));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.vars, other.vars);
        let la = self.leading_weight().unwrap_or(self.weight_trunc.min(EXACT));
        let lb = other.leading_weight().unwrap_or(other.weight_trunc.min(EXACT));
        let trunc = normalize_order(
            (self.weight_trunc.saturating_add(lb)).min(other.weight_trunc.saturating_add(la)),
        );
        let mut out = Self::zero(&self.ring, self.vars.clone(), trunc);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u16> = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                if out.term_weight(&e) >= trunc {
                    continue;
                }
                out.add_term(e, self.ring.mul(c1, c2));
            }
        }
        out
    }

    /// Formal partial derivative in variable `i`; lowers the provable
    /// weight window by that variable's weight.
    pub fn derivative(&self, i: usize) -> Self {
        let w = self.vars[i].1;
        let trunc = if self.weight_trunc >= EXACT {
            EXACT
        } else {
            self.weight_trunc - w
        };
        let mut out = Self::zero(&self.ring, self.vars.clone(), trunc);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, self.ring.scale(c, &Rat::from_integer((e[i] as i64).into())));
        }
        out
    }

    /// Apply a multi-derivative given as variable indices (with repeats).
    pub fn derivative_multi(&self, idxs: &[usize]) -> Self {
        let mut out = self.clone();
        for &i in idxs {
            out = out.derivative(i);
        }
        out
    }

    /// Substitute a Laurent series for each variable. Requires every
    /// component's leading exponent to be at least the variable weight;
    /// the result is then provable to `ξ`-order `weight_trunc` (or better
    /// when the component precision allows no more).
    pub fn compose(&self, point: &[LaurentSeries<R>]) -> Result<LaurentSeries<R>, SeriesError> {
        assert_eq!(point.len(), self.vars.len());
        for (p, (name, w)) in point.iter().zip(self.vars.iter()) {
            if let Some(m) = p.leading_exponent() {
                if m < *w {
                    return Err(SeriesError::Domain(format!(
                        "component for {name} has leading exponent {m} < weight {w}"
                    )));
                }
            } else if p.truncation() < *w {
                return Err(SeriesError::InsufficientPrecision {
                    need: *w,
                    have: p.truncation(),
                });
            }
        }
        // Anything of ξ-order >= the weight window is unknown anyway, so
        // truncate the components first and cache their powers.
        let pts: Vec<LaurentSeries<R>> = point
            .iter()
            .map(|p| p.truncate_to(self.weight_trunc))
            .collect();
        let mut powers: Vec<Vec<LaurentSeries<R>>> = pts
            .iter()
            .map(|p| vec![LaurentSeries::one(&self.ring), p.clone()])
            .collect();
        let mut acc = LaurentSeries::zero(&self.ring, self.weight_trunc);
        for (e, c) in &self.terms {
            let mut term = LaurentSeries::monomial(&self.ring, c.clone(), 0);
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().mul(&pts[i]).truncate_to(self.weight_trunc);
                    powers[i].push(next);
                }
                if k > 0 {
                    term = term.mul(&powers[i][k as usize]);
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// The value at `u = 0` (constant term).
    pub fn constant_term(&self) -> Result<R::Elem, SeriesError> {
        let e = vec![0u16; self.vars.len()];
        self.coeff(&e)
    }
}

impl<R: CoeffRing> PartialEq for MultiSeries<R> {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
            && self.weight_trunc == other.weight_trunc
            && self.terms == other.terms
    }
}

impl<R: CoeffRing> fmt::Display for MultiSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            let mut parts = Vec::new();
            let mut sorted: Vec<(&Vec<u16>, &R::Elem)> = self.terms.iter().collect();
            sorted.sort_by_key(|(e, _)| (self.term_weight(e), (*e).clone()));
            for (e, c) in sorted {
                let mut factors = Vec::new();
                for (i, &k) in e.iter().enumerate() {
                    if k == 1 {
                        factors.push(self.vars[i].0.clone());
                    } else if k > 1 {
                        factors.push(format!("{}^{}", self.vars[i].0, k));
                    }
                }
                let cs = self.ring.display(c);
                let coeff = if needs_parens(&cs) {
                    format!("({cs})")
                } else {
                    cs
                };
                if factors.is_empty() {
                    parts.push(coeff);
                } else if coeff == "1" {
                    parts.push(factors.join("*"));
                } else if coeff == "-1" {
                    parts.push(format!("-{}", factors.join("*")));
                } else {
                    parts.push(format!("{coeff}*{}", factors.join("*")));
                }
            }
            write!(f, "{}", parts.join(" + ").replace("+ -", "- "))?;
        }
        if self.weight_trunc < EXACT {
            write!(f, " + O(weight {})", self.weight_trunc)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::RatField;
    use super::*;
    use crate::ring::rat;

    fn vars() -> Vec<(String, i64)> {
        vec![("u1".into(), 1), ("u2".into(), 2), ("u5".into(), 5)]
    }

    #[test]
    fn derivative_lowers_window() {
        let mut s = MultiSeries::zero(&RatField, vars(), 11);
        s.add_term(vec![0, 0, 1], rat(1)); // u5
        s.add_term(vec![1, 2, 0], rat(1)); // u1 u2^2
        let d = s.derivative(2); // d/du5
        assert_eq!(d.weight_trunc, 6);
        assert_eq!(d.constant_term().unwrap(), rat(1));
    }

    #[test]
    fn compose_weights() {
        // s = u1*u2, point u1 = ξ, u2 = -ξ²/2 + O(ξ^4)
        let mut s = MultiSeries::zero(&RatField, vars(), 9);
        s.add_term(vec![1, 1, 0], rat(2));
        let p1 = LaurentSeries::monomial(&RatField, rat(1), 1);
        let p2 = LaurentSeries::from_terms(&RatField, vec![(2, crate::ring::ratio(-1, 2))], 4);
        let p5 = LaurentSeries::monomial(&RatField, rat(1), 5);
        let c = s.compose(&[p1, p2, p5]).unwrap();
        assert_eq!(c.coeff(3).unwrap(), rat(-1));
        // window capped by the multiseries truncation
        assert!(c.truncation() <= 9);
    }

    #[test]
    fn identity_substitution() {
        let mut s = MultiSeries::zero(&RatField, vars(), 8);
        s.add_term(vec![2, 1, 0], rat(3));
        let sum = s.add(&s.neg());
        assert!(sum.is_zero_through_truncation());
    }
}
