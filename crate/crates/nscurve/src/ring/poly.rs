use super::{is_neg, rat_to_string, GenSet, Rat};
use num::traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Exponent vector over a `GenSet`; always `gens.len()` long.
pub(crate) type ExpVec = Vec<u16>;

/// Weight classification of a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    /// The zero polynomial is homogeneous of every weight.
    Zero,
    /// All terms share this weight.
    Weight(i64),
}

impl Homogeneity {
    /// Whether this classification is compatible with weight `w`.
    pub fn admits(&self, w: i64) -> bool {
        match self {
            Homogeneity::Zero => true,
            Homogeneity::Weight(v) => *v == w,
        }
    }
}

/// Sparse multivariate polynomial over exact rationals in weighted
/// generators. No zero coefficients are stored; term order for printing is
/// graded by weight, then lexicographic.
#[derive(Clone, Debug)]
pub struct WeightedPoly {
    gens: Arc<GenSet>,
    terms: BTreeMap<ExpVec, Rat>,
}

impl PartialEq for WeightedPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for WeightedPoly {}

impl WeightedPoly {
    pub fn zero(gens: &Arc<GenSet>) -> Self {
        WeightedPoly {
            gens: gens.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(gens: &Arc<GenSet>, c: Rat) -> Self {
        let mut p = Self::zero(gens);
        if !c.is_zero() {
            p.terms.insert(vec![0; gens.len()], c);
        }
        p
    }

    pub fn one(gens: &Arc<GenSet>) -> Self {
        Self::constant(gens, Rat::one())
    }

    /// The generator with index `idx` as a polynomial.
    pub fn gen(gens: &Arc<GenSet>, idx: usize) -> Self {
        let mut e = vec![0u16; gens.len()];
        e[idx] = 1;
        let mut p = Self::zero(gens);
        p.terms.insert(e, Rat::one());
        p
    }

    /// Generator looked up by name. Panics if absent.
    pub fn gen_by_name(gens: &Arc<GenSet>, name: &str) -> Self {
        let idx = gens
            .index_of(name)
            .unwrap_or_else(|| panic!("no generator named {name}"));
        Self::gen(gens, idx)
    }

    pub fn monomial(gens: &Arc<GenSet>, pairs: &[(usize, u16)], coeff: Rat) -> Self {
        let mut e = vec![0u16; gens.len()];
        for &(i, k) in pairs {
            e[i] += k;
        }
        let mut p = Self::zero(gens);
        if !coeff.is_zero() {
            p.terms.insert(e, coeff);
        }
        p
    }

    pub fn gens(&self) -> &Arc<GenSet> {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(e, c)| e.iter().all(|&x| x == 0) && c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The constant (exponent-free) coefficient.
    pub fn constant_part(&self) -> Rat {
        let key = vec![0u16; self.gens.len()];
        self.terms.get(&key).cloned().unwrap_or_else(Rat::zero)
    }

    /// If the polynomial is a constant, return it.
    pub fn as_constant(&self) -> Option<Rat> {
        if self.terms.is_empty() {
            return Some(Rat::zero());
        }
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            if e.iter().all(|&x| x == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    fn same_gens(&self, other: &Self) {
        debug_assert!(
            Arc::ptr_eq(&self.gens, &other.gens) || self.gens == other.gens,
            "operands over different generator sets"
        );
    }

    pub(crate) fn insert_term(&mut self, e: ExpVec, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_gens(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_gens(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        WeightedPoly {
            gens: self.gens.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return Self::zero(&self.gens);
        }
        WeightedPoly {
            gens: self.gens.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_gens(other);
        let mut out = Self::zero(&self.gens);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: ExpVec = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.insert_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.gens);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn term_weight(&self, e: &[u16]) -> i64 {
        e.iter()
            .enumerate()
            .map(|(i, &k)| self.gens.weight(i) * k as i64)
            .sum()
    }

    /// Common weight of all terms, if one exists. `None` means the
    /// polynomial mixes weights.
    pub fn homogeneity(&self) -> Option<Homogeneity> {
        let mut seen: Option<i64> = None;
        for e in self.terms.keys() {
            let w = self.term_weight(e);
            match seen {
                None => seen = Some(w),
                Some(v) if v != w => return None,
                _ => {}
            }
        }
        Some(match seen {
            None => Homogeneity::Zero,
            Some(w) => Homogeneity::Weight(w),
        })
    }

    /// Maximum term weight (0 for the zero polynomial).
    pub fn max_weight(&self) -> i64 {
        self.terms.keys().map(|e| self.term_weight(e)).max().unwrap_or(0)
    }

    /// Substitute generators by polynomials. `map[i] = Some(p)` replaces
    /// generator `i` with `p`; `None` leaves it alone. All replacement
    /// polynomials must live over the same generator set as `self`.
    pub fn substitute(&self, map: &[Option<&WeightedPoly>]) -> Self {
        let mut out = Self::zero(&self.gens);
        for (e, c) in &self.terms {
            let mut term = Self::constant(&self.gens, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match map.get(i).copied().flatten() {
                    Some(rep) => term = term.mul(&rep.pow(k as u32)),
                    None => {
                        term = term.mul(&Self::gen(&self.gens, i).pow(k as u32));
                    }
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Substitute a single generator.
    pub fn substitute_gen(&self, idx: usize, value: &WeightedPoly) -> Self {
        let mut map: Vec<Option<&WeightedPoly>> = vec![None; self.gens.len()];
        map[idx] = Some(value);
        self.substitute(&map)
    }

    /// Map this polynomial onto a different generator set by matching
    /// generator names. Panics if a used generator is missing on the target.
    pub fn relabel(&self, target: &Arc<GenSet>) -> Self {
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut t = vec![0u16; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    let j = target
                        .index_of(self.gens.name(i))
                        .unwrap_or_else(|| panic!("target set lacks generator {}", self.gens.name(i)));
                    t[j] = k;
                }
            }
            out.insert_term(t, c.clone());
        }
        out
    }

    /// Degree in one generator.
    pub fn degree_in(&self, idx: usize) -> u16 {
        self.terms.keys().map(|e| e[idx]).max().unwrap_or(0)
    }

    /// Whether the generator occurs at all.
    pub fn contains_gen(&self, idx: usize) -> bool {
        self.terms.keys().any(|e| e[idx] > 0)
    }

    /// Split `self` as `sum_i coeff_i * u_i + rest` for the designated
    /// unknowns. Returns `None` if any term is nonlinear in the unknowns or
    /// a coefficient itself contains an unknown.
    pub fn decompose_linear(&self, unknowns: &[usize]) -> Option<(Vec<WeightedPoly>, WeightedPoly)> {
        let mut coeffs = vec![Self::zero(&self.gens); unknowns.len()];
        let mut rest = Self::zero(&self.gens);
        let pos: BTreeMap<usize, usize> = unknowns.iter().enumerate().map(|(k, &u)| (u, k)).collect();
        for (e, c) in &self.terms {
            let mut hits: Vec<usize> = Vec::new();
            let mut total: u32 = 0;
            for &u in unknowns {
                if e[u] > 0 {
                    hits.push(u);
                    total += e[u] as u32;
                }
            }
            if total == 0 {
                rest.insert_term(e.clone(), c.clone());
            } else if total == 1 {
                let u = hits[0];
                let mut e2 = e.clone();
                e2[u] = 0;
                coeffs[pos[&u]].insert_term(e2, c.clone());
            } else {
                return None;
            }
        }
        Some((coeffs, rest))
    }

    /// Exact division; `None` when `self` is not a polynomial multiple of
    /// `divisor`. Uses graded-lex leading-term elimination, which succeeds
    /// whenever the quotient exists.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        self.same_gens(divisor);
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Self::zero(&self.gens));
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&(Rat::one() / c)));
        }
        let lead = |p: &Self| -> (ExpVec, Rat) {
            let (e, c) = p
                .terms
                .iter()
                .max_by(|(e1, _), (e2, _)| {
                    let w1 = p.term_weight(e1);
                    let w2 = p.term_weight(e2);
                    w1.cmp(&w2).then_with(|| e1.cmp(e2))
                })
                .unwrap();
            (e.clone(), c.clone())
        };
        let (de, dc) = lead(divisor);
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.gens);
        while !rem.is_zero() {
            let (re, rc) = lead(&rem);
            let mut qe = vec![0u16; self.gens.len()];
            for i in 0..qe.len() {
                if re[i] < de[i] {
                    return None;
                }
                qe[i] = re[i] - de[i];
            }
            let qc = &rc / &dc;
            let mut qterm = Self::zero(&self.gens);
            qterm.insert_term(qe, qc);
            rem = rem.sub(&qterm.mul(divisor));
            quot = quot.add(&qterm);
        }
        Some(quot)
    }

    /// Terms in the canonical order (weight-graded descending, then
    /// exponent-lex descending).
    pub fn sorted_terms(&self) -> Vec<(&ExpVec, &Rat)> {
        let mut v: Vec<(&ExpVec, &Rat)> = self.terms.iter().collect();
        v.sort_by(|(e1, _), (e2, _)| {
            let w1 = self.term_weight(e1);
            let w2 = self.term_weight(e2);
            w2.cmp(&w1).then_with(|| e2.cmp(e1))
        });
        v
    }

    fn fmt_term(&self, e: &ExpVec, c: &Rat, lead: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg = is_neg(c);
        let abs = if neg { -c.clone() } else { c.clone() };
        if lead {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        let mut factors: Vec<String> = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            if k == 1 {
                factors.push(self.gens.name(i).to_string());
            } else if k > 1 {
                factors.push(format!("{}^{}", self.gens.name(i), k));
            }
        }
        if factors.is_empty() {
            write!(f, "{}", rat_to_string(&abs))
        } else if abs.is_one() {
            write!(f, "{}", factors.join("*"))
        } else {
            write!(f, "{}*{}", rat_to_string(&abs), factors.join("*"))
        }
    }
}

/// Display adapter (the `Display` impl prints canonical text form).
pub struct WeightedpolyDisplay<'a>(pub &'a WeightedPoly);

impl fmt::Display for WeightedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            self.fmt_term(e, c, i == 0, f)?;
        }
        Ok(())
    }
}

impl fmt::Display for WeightedpolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{rat, ratio, GenSet};
    use super::*;

    fn lam_ring() -> Arc<GenSet> {
        GenSet::new(vec![
            ("λ2".into(), 2),
            ("λ5".into(), 5),
            ("c1".into(), 1),
            ("c2".into(), 2),
            ("c5".into(), 5),
        ])
    }

    #[test]
    fn product_of_generators_adds_weights() {
        let g = lam_ring();
        let l2 = WeightedPoly::gen_by_name(&g, "λ2");
        let sq = l2.mul(&l2);
        assert_eq!(sq.homogeneity(), Some(Homogeneity::Weight(4)));
        assert_eq!(format!("{sq}"), "λ2^2");
    }

    #[test]
    fn subtraction_cancels() {
        let g = lam_ring();
        let l2 = WeightedPoly::gen_by_name(&g, "λ2");
        let c2 = WeightedPoly::gen_by_name(&g, "c2");
        let p = l2.add(&c2.scale(&rat(3)));
        let q = p.sub(&c2.scale(&rat(3)));
        assert_eq!(q, l2);
    }

    #[test]
    fn sixth_of_psi_coefficient_scales_back() {
        let g = lam_ring();
        let l2 = WeightedPoly::gen_by_name(&g, "λ2");
        let c2 = WeightedPoly::gen_by_name(&g, "c2");
        let coeff = l2.add(&c2.scale(&rat(3))).scale(&ratio(1, 6));
        assert_eq!(coeff.scale(&rat(6)), l2.add(&c2.scale(&rat(3))));
    }

    #[test]
    fn homogeneity_detects_mixed_weights() {
        let g = lam_ring();
        let l5 = WeightedPoly::gen_by_name(&g, "λ5");
        let l2 = WeightedPoly::gen_by_name(&g, "λ2");
        let c2 = WeightedPoly::gen_by_name(&g, "c2");
        // λ5 has weight 5, λ2*c2 weight 4: mixed.
        assert_eq!(l5.add(&l2.mul(&c2)).homogeneity(), None);
        // λ2 + 3 c2 is homogeneous of weight 2.
        assert_eq!(
            l2.add(&c2.scale(&rat(3))).homogeneity(),
            Some(Homogeneity::Weight(2))
        );
        // zero admits any weight
        let z = WeightedPoly::zero(&g);
        assert_eq!(z.homogeneity(), Some(Homogeneity::Zero));
        assert!(z.homogeneity().unwrap().admits(7));
    }

    #[test]
    fn exact_division() {
        let g = lam_ring();
        let l2 = WeightedPoly::gen_by_name(&g, "λ2");
        let c1 = WeightedPoly::gen_by_name(&g, "c1");
        let a = l2.add(&c1);
        let b = l2.sub(&c1);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert!(prod.add(&WeightedPoly::one(&g)).div_exact(&a).is_none());
    }

    #[test]
    fn display_canonical_order() {
        let g = lam_ring();
        let l2 = WeightedPoly::gen_by_name(&g, "λ2");
        let c2 = WeightedPoly::gen_by_name(&g, "c2");
        let p = c2.scale(&rat(3)).add(&l2).add(&WeightedPoly::constant(&g, ratio(-1, 2)));
        // weight 2 terms first (λ2 before c2 by lex on exponents), constant last
        assert_eq!(format!("{p}"), "λ2 + 3*c2 - 1/2");
    }
}
