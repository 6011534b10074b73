//! Polynomials in the formal Abelian-function symbols with `WeightedPoly`
//! coefficients — the carrier of every identity in the toolkit.

use super::symbol::{PointTag, SymKind, WpSymbol};
use crate::ring::{rat_to_string, ExprError, GenSet, Rat, WeightedPoly};
use crate::series::{needs_parens_pub, CoeffRing};
use num::traits::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A product of symbols, kept sorted descending in the graded symbol order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct WpMonomial(pub Vec<WpSymbol>);

impl WpMonomial {
    pub fn one() -> Self {
        WpMonomial(Vec::new())
    }

    pub fn symbol(s: WpSymbol) -> Self {
        WpMonomial(vec![s])
    }

    pub fn from_symbols(mut v: Vec<WpSymbol>) -> Self {
        v.sort_by(|a, b| b.cmp_graded(a).then_with(|| b.cmp_raw(a)));
        WpMonomial(v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(|s| s.weight()).sum()
    }

    pub fn level(&self) -> i64 {
        self.0.iter().map(|s| s.level()).sum()
    }

    pub fn high_count(&self) -> usize {
        self.0.iter().filter(|s| s.level() >= 1).count()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Self::from_symbols(v)
    }

    pub fn parity(&self) -> i64 {
        self.0.iter().map(|s| s.parity()).product()
    }

    /// Remove one occurrence of each symbol of `div` from `self`;
    /// `None` when `div` does not divide.
    pub fn try_remove(&self, div: &WpMonomial) -> Option<WpMonomial> {
        let mut mine = self.0.clone();
        for s in &div.0 {
            let k = mine.iter().position(|x| x == s)?;
            mine.remove(k);
        }
        Some(WpMonomial(mine))
    }

    /// Remove a single symbol occurrence.
    pub fn remove_symbol(&self, s: &WpSymbol) -> Option<WpMonomial> {
        let k = self.0.iter().position(|x| x == s)?;
        let mut v = self.0.clone();
        v.remove(k);
        Some(WpMonomial(v))
    }
}

impl WpSymbol {
    /// Total raw tiebreak so the monomial sort is deterministic even among
    /// graded-equal symbols with different tags/kinds.
    pub(crate) fn cmp_raw(&self, other: &Self) -> Ordering {
        (self.kind, self.tag, &self.indices).cmp(&(other.kind, other.tag, &other.indices))
    }
}

impl PartialOrd for WpMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded monomial order: total weight, then total level, then the number
/// of level-positive symbols, then lexicographic comparison of the
/// descending symbol sequences.
impl Ord for WpMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.level().cmp(&other.level()))
            .then_with(|| self.high_count().cmp(&other.high_count()))
            .then_with(|| {
                for (a, b) in self.0.iter().zip(other.0.iter()) {
                    let c = a.cmp_graded(b).then_with(|| a.cmp_raw(b));
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                self.0.len().cmp(&other.0.len())
            })
    }
}

impl fmt::Display for WpMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i + 1;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            if j - i == 1 {
                parts.push(format!("{}", self.0[i]));
            } else {
                parts.push(format!("{}^{}", self.0[i], j - i));
            }
            i = j;
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// Sparse polynomial in Abelian-function symbols over `WeightedPoly`
/// coefficients.
#[derive(Clone, Debug)]
pub struct WpPoly {
    pub gens: Arc<GenSet>,
    pub terms: BTreeMap<WpMonomial, WeightedPoly>,
}

impl PartialEq for WpPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl WpPoly {
    pub fn zero(gens: &Arc<GenSet>) -> Self {
        WpPoly {
            gens: gens.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(gens: &Arc<GenSet>, c: WeightedPoly) -> Self {
        let mut p = Self::zero(gens);
        p.insert(WpMonomial::one(), c);
        p
    }

    pub fn from_symbol(gens: &Arc<GenSet>, s: WpSymbol) -> Self {
        let mut p = Self::zero(gens);
        p.insert(WpMonomial::symbol(s), WeightedPoly::one(gens));
        p
    }

    pub fn insert(&mut self, m: WpMonomial, c: WeightedPoly) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        WpPoly {
            gens: self.gens.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.insert(m1.mul(m2), c1.mul(c2));
            }
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero(&self.gens);
        }
        WpPoly {
            gens: self.gens.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(r))).collect(),
        }
    }

    pub fn scale_poly(&self, k: &WeightedPoly) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.mul(k));
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(&self.gens, WeightedPoly::one(&self.gens));
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

    /// Largest monomial (graded order) with its coefficient.
    pub fn leading(&self) -> Option<(&WpMonomial, &WeightedPoly)> {
        self.terms.iter().next_back()
    }

    /// Formal derivative `∂_{u_i}` (per point argument for tagged symbols):
    /// `∂ζ_j = -℘_{i,j}`, `∂℘_ω = ℘_{ω∪{i}}`. Coefficients are constants.
    pub fn derivative(&self, i: u8) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m, c) in &self.terms {
            for (pos, s) in m.0.iter().enumerate() {
                let rest = {
                    let mut v = m.0.clone();
                    v.remove(pos);
                    WpMonomial(v)
                };
                let (ds, sign) = match s.kind {
                    SymKind::Zeta => {
                        let mut idx = s.indices.clone();
                        idx.push(i);
                        idx.sort_unstable();
                        (
                            WpSymbol {
                                kind: SymKind::Wp,
                                tag: s.tag,
                                indices: idx,
                            },
                            -1i64,
                        )
                    }
                    SymKind::Wp | SymKind::Psum => {
                        let mut idx = s.indices.clone();
                        idx.push(i);
                        idx.sort_unstable();
                        (
                            WpSymbol {
                                kind: s.kind,
                                tag: s.tag,
                                indices: idx,
                            },
                            1,
                        )
                    }
                };
                let term = rest.mul(&WpMonomial::symbol(ds));
                let coeff = if sign < 0 { c.neg() } else { c.clone() };
                out.insert(term, coeff);
            }
        }
        out
    }

    pub fn derivative_multi(&self, idxs: &[u8]) -> Self {
        let mut out = self.clone();
        for &i in idxs {
            out = out.derivative(i);
        }
        out
    }

    /// Sign flip `u -> -u` applied symbol-wise (all point arguments flip;
    /// under `u+v+w = 0` this is consistent for every tag).
    pub fn parity_flip(&self) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m, c) in &self.terms {
            let sign = m.parity();
            out.insert(m.clone(), if sign < 0 { c.neg() } else { c.clone() });
        }
        out
    }

    /// Even and odd parts under the parity flip.
    pub fn parity_split(&self) -> (Self, Self) {
        let flipped = self.parity_flip();
        let even = self.add(&flipped).scale(&crate::ring::ratio(1, 2));
        let odd = self.sub(&flipped).scale(&crate::ring::ratio(1, 2));
        (even, odd)
    }

    /// Substitute generator values inside every coefficient.
    pub fn substitute_coeffs(&self, map: &[Option<&WeightedPoly>]) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.substitute(map));
        }
        out
    }

    /// Replace each symbol by a polynomial (used by the three-point
    /// collapse); symbols not in the map stay.
    pub fn substitute_symbols(&self, rep: &dyn Fn(&WpSymbol) -> Option<WpPoly>) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m, c) in &self.terms {
            let mut term = Self::constant(&self.gens, c.clone());
            for s in &m.0 {
                match rep(s) {
                    Some(p) => term = term.mul(&p),
                    None => term = term.mul(&Self::from_symbol(&self.gens, s.clone())),
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Retag every symbol.
    pub fn retag(&self, tag: PointTag) -> Self {
        let mut out = Self::zero(&self.gens);
        for (m, c) in &self.terms {
            let syms: Vec<WpSymbol> = m.0.iter().map(|s| s.clone().at(tag)).collect();
            out.insert(WpMonomial::from_symbols(syms), c.clone());
        }
        out
    }

    /// Combined (symbol + coefficient) weight classification; `None` when
    /// weights are mixed.
    pub fn homogeneity(&self) -> Option<crate::ring::Homogeneity> {
        use crate::ring::Homogeneity;
        let mut seen: Option<i64> = None;
        for (m, c) in &self.terms {
            let cw = match c.homogeneity()? {
                Homogeneity::Zero => continue,
                Homogeneity::Weight(w) => w,
            };
            let w = m.weight() + cw;
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

    /// The coefficient of the empty monomial.
    pub fn constant_part(&self) -> WeightedPoly {
        self.terms
            .get(&WpMonomial::one())
            .cloned()
            .unwrap_or_else(|| WeightedPoly::zero(&self.gens))
    }

    /// Strip the constant part, returning `(constant, rest)`.
    pub fn split_constant(&self) -> (WeightedPoly, Self) {
        let c = self.constant_part();
        let mut rest = self.clone();
        rest.terms.remove(&WpMonomial::one());
        (c, rest)
    }
}

impl fmt::Display for WpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let cs = format!("{c}");
            let multi = cs.contains(" + ") || cs.contains(" - ");
            let (neg, abs_p) = if multi {
                (false, format!("({cs})"))
            } else if let Some(stripped) = cs.strip_prefix('-') {
                let s = stripped.to_string();
                if needs_parens_pub(&s) {
                    (true, format!("({s})"))
                } else {
                    (true, s)
                }
            } else if needs_parens_pub(&cs) {
                (false, format!("({cs})"))
            } else {
                (false, cs)
            };
            let body = if m.is_empty() {
                abs_p
            } else if abs_p == "1" {
                format!("{m}")
            } else {
                format!("{abs_p}*{m}")
            };
            if first {
                if neg {
                    write!(f, "-{body}")?;
                } else {
                    write!(f, "{body}")?;
                }
                first = false;
            } else if neg {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

/// Coefficient-ring adapter so Laurent series can carry `WpPoly` values.
#[derive(Clone, Debug)]
pub struct WpRing {
    pub gens: Arc<GenSet>,
}

impl WpRing {
    pub fn new(gens: Arc<GenSet>) -> Self {
        WpRing { gens }
    }
}

impl CoeffRing for WpRing {
    type Elem = WpPoly;

    fn zero(&self) -> WpPoly {
        WpPoly::zero(&self.gens)
    }
    fn one(&self) -> WpPoly {
        WpPoly::constant(&self.gens, WeightedPoly::one(&self.gens))
    }
    fn is_zero(&self, a: &WpPoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &WpPoly, b: &WpPoly) -> WpPoly {
        a.add(b)
    }
    fn sub(&self, a: &WpPoly, b: &WpPoly) -> WpPoly {
        a.sub(b)
    }
    fn neg(&self, a: &WpPoly) -> WpPoly {
        a.neg()
    }
    fn mul(&self, a: &WpPoly, b: &WpPoly) -> WpPoly {
        a.mul(b)
    }
    fn scale(&self, a: &WpPoly, r: &Rat) -> WpPoly {
        a.scale(r)
    }
    fn try_inv(&self, a: &WpPoly) -> Option<WpPoly> {
        if a.terms.len() != 1 {
            return None;
        }
        let (m, c) = a.terms.iter().next().unwrap();
        if !m.is_empty() {
            return None;
        }
        let r = c.as_constant()?;
        if r.is_zero() {
            None
        } else {
            Some(WpPoly::constant(
                &self.gens,
                WeightedPoly::constant(&self.gens, Rat::one() / r),
            ))
        }
    }
    fn as_rat(&self, a: &WpPoly) -> Option<Rat> {
        if a.is_zero() {
            return Some(Rat::from_integer(0.into()));
        }
        if a.terms.len() != 1 {
            return None;
        }
        let (m, c) = a.terms.iter().next().unwrap();
        if !m.is_empty() {
            return None;
        }
        c.as_constant()
    }
    fn display(&self, a: &WpPoly) -> String {
        format!("{a}")
    }
}

impl crate::ring::ExprValue for WpPoly {
    fn from_rat(&self, r: Rat) -> Self {
        WpPoly::constant(&self.gens, WeightedPoly::constant(&self.gens, r))
    }
    fn add(&self, other: &Self) -> Self {
        WpPoly::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        WpPoly::mul(self, other)
    }
    fn neg(&self) -> Self {
        WpPoly::neg(self)
    }
    fn pow(&self, n: u32) -> Self {
        WpPoly::pow(self, n)
    }
    fn as_rat(&self) -> Option<Rat> {
        WpRing::new(self.gens.clone()).as_rat(self)
    }
    fn scale(&self, r: &Rat) -> Self {
        WpPoly::scale(self, r)
    }
}

/// Parse a symbol polynomial. Symbols: `℘[1,1,2]`, `ζ[5]`, `𝔭[1,2]` with
/// ASCII aliases `wp`, `zt`, `ps`; optional point tags `|u |v |w |uv`.
/// Other names resolve to ring generators.
pub fn parse_wp(src: &str, gens: &Arc<GenSet>) -> Result<WpPoly, ExprError> {
    use crate::ring::{expr_parser, Tok};
    let proto = WpPoly::zero(gens);
    let gens2 = gens.clone();
    let mut p = expr_parser(src, proto, move |lexer, name: &str| {
        let kind = match name {
            "℘" | "wp" => Some(SymKind::Wp),
            "ζ" | "zt" => Some(SymKind::Zeta),
            "𝔭" | "ps" => Some(SymKind::Psum),
            _ => None,
        };
        match kind {
            Some(kind) => {
                if lexer.next_tok() != Tok::LBracket {
                    return Err(ExprError::Unexpected(lexer.rest()));
                }
                let mut indices: Vec<u8> = Vec::new();
                let mut tag = PointTag::Free;
                loop {
                    match lexer.next_tok() {
                        Tok::Int(n) => {
                            let v: u8 = n.try_into().map_err(|_| ExprError::Unexpected("index".into()))?;
                            indices.push(v);
                        }
                        other => return Err(ExprError::Unexpected(format!("{other:?}"))),
                    }
                    match lexer.next_tok() {
                        Tok::Comma => continue,
                        Tok::RBracket => break,
                        Tok::Pipe => {
                            match lexer.next_tok() {
                                Tok::Sym(t) => {
                                    tag = match t.as_str() {
                                        "u" => PointTag::U,
                                        "v" => PointTag::V,
                                        "w" => PointTag::W,
                                        "uv" => PointTag::Sum,
                                        _ => return Err(ExprError::Unexpected(t)),
                                    };
                                }
                                other => return Err(ExprError::Unexpected(format!("{other:?}"))),
                            }
                            if lexer.next_tok() != Tok::RBracket {
                                return Err(ExprError::Unexpected(lexer.rest()));
                            }
                            break;
                        }
                        other => return Err(ExprError::Unexpected(format!("{other:?}"))),
                    }
                }
                indices.sort_unstable();
                let sym = WpSymbol {
                    kind,
                    tag,
                    indices,
                };
                if sym.kind == SymKind::Zeta {
                    assert_eq!(sym.indices.len(), 1, "ζ takes one index");
                }
                Ok(WpPoly::from_symbol(&gens2, sym))
            }
            None => gens2
                .index_of(name)
                .map(|i| WpPoly::constant(&gens2, WeightedPoly::gen(&gens2, i)))
                .ok_or_else(|| ExprError::UnknownSymbol(name.to_string())),
        }
    });
    p.parse_full()
}

pub(crate) fn _unused_rat_to_string(r: &Rat) -> String {
    rat_to_string(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{parse_poly, rat};

    fn gens() -> Arc<GenSet> {
        GenSet::new(vec![("λ2".into(), 2), ("λ5".into(), 5), ("c1".into(), 1)])
    }

    #[test]
    fn monomial_order_orients_known_heads() {
        // ℘[1,1,1,1] > ℘[1,1]^2 (level), ℘[1,1,1]*℘[1,1,2] > ℘[1,1,1,4] (high count)
        let m1 = WpMonomial::symbol(WpSymbol::wp(&[1, 1, 1, 1]));
        let m2 = WpMonomial::from_symbols(vec![WpSymbol::wp(&[1, 1]), WpSymbol::wp(&[1, 1])]);
        assert!(m1 > m2);
        let m3 = WpMonomial::from_symbols(vec![WpSymbol::wp(&[1, 1, 1]), WpSymbol::wp(&[1, 1, 2])]);
        let m4 = WpMonomial::symbol(WpSymbol::wp(&[1, 1, 1, 4]));
        assert!(m3 > m4);
        // ℘[3,3,3] < ℘[1,1,1]*℘[1,1,1,3] (level dominates at equal weight)
        let m5 = WpMonomial::symbol(WpSymbol::wp(&[3, 3, 3]));
        let m6 = WpMonomial::from_symbols(vec![WpSymbol::wp(&[1, 1, 1]), WpSymbol::wp(&[1, 1, 1, 3])]);
        assert!(m6 > m5);
    }

    #[test]
    fn derivative_rules() {
        let g = gens();
        let z = WpPoly::from_symbol(&g, WpSymbol::zeta(2));
        let dz = z.derivative(1);
        let expect = WpPoly::from_symbol(&g, WpSymbol::wp(&[1, 2])).neg();
        assert_eq!(dz, expect);

        let p = WpPoly::from_symbol(&g, WpSymbol::wp(&[1, 1]));
        let dp = p.derivative(1);
        assert_eq!(dp, WpPoly::from_symbol(&g, WpSymbol::wp(&[1, 1, 1])));

        // product rule
        let prod = z.mul(&p);
        let d = prod.derivative(1);
        let expect = dz.mul(&p).add(&z.mul(&dp));
        assert_eq!(d, expect);
    }

    #[test]
    fn parity_split_roundtrip() {
        let g = gens();
        let p = parse_wp("℘[1,1]*ζ[1] + 3*℘[1,2] - λ2*℘[1,1,1]", &g).unwrap();
        let (even, odd) = p.parity_split();
        assert_eq!(even.add(&odd), p);
        // ζ℘[1,1] is odd; ℘[1,2] even; ℘[1,1,1] odd
        assert_eq!(format!("{even}"), "3*℘[1,2]");
    }

    #[test]
    fn parse_display_roundtrip() {
        let g = gens();
        let p = parse_wp("6*℘[1,1]^2 - 3*℘[2,2] - 4*λ2*℘[1,1] + 𝔭[1|u]*ζ[5|v]", &g).unwrap();
        let s = format!("{p}");
        let q = parse_wp(&s, &g).unwrap();
        assert_eq!(p, q);
        let _ = parse_poly("λ2", &g).unwrap();
        let _ = rat(1);
    }
}
