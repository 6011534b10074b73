//! Bivariate polynomials in the affine coordinates `x`, `y` with
//! coefficients in an arbitrary ring. Used for the curve polynomial, the
//! basis differential numerators, and the rational-function layer of the
//! divisor-sum identities.

use crate::ring::{ExprError, Rat};
use crate::series::{CoeffRing, LaurentSeries};
use std::collections::BTreeMap;
use std::fmt;

/// Sparse polynomial in `x, y` over `R`. Keys are `(x_exp, y_exp)`.
#[derive(Clone, Debug)]
pub struct XYPoly<R: CoeffRing> {
    pub(crate) ring: R,
    pub(crate) terms: BTreeMap<(u16, u16), R::Elem>,
}

impl<R: CoeffRing> PartialEq for XYPoly<R> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<R: CoeffRing> XYPoly<R> {
    pub fn zero(ring: &R) -> Self {
        XYPoly {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &R, c: R::Elem) -> Self {
        let mut p = Self::zero(ring);
        p.insert((0, 0), c);
        p
    }

    pub fn x(ring: &R) -> Self {
        let mut p = Self::zero(ring);
        p.insert((1, 0), ring.one());
        p
    }

    pub fn y(ring: &R) -> Self {
        let mut p = Self::zero(ring);
        p.insert((0, 1), ring.one());
        p
    }

    pub fn monomial(ring: &R, xe: u16, ye: u16, c: R::Elem) -> Self {
        let mut p = Self::zero(ring);
        p.insert((xe, ye), c);
        p
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn insert(&mut self, key: (u16, u16), c: R::Elem) {
        if self.ring.is_zero(&c) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u16, u16), &R::Elem)> {
        self.terms.iter()
    }

    pub fn coeff(&self, xe: u16, ye: u16) -> R::Elem {
        self.terms
            .get(&(xe, ye))
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        XYPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (*k, self.ring.neg(c)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.ring);
        for ((x1, y1), c1) in &self.terms {
            for ((x2, y2), c2) in &other.terms {
                out.insert((x1 + x2, y1 + y2), self.ring.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> Self {
        XYPoly {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter_map(|(k, c)| {
                    let v = self.ring.scale(c, r);
                    if self.ring.is_zero(&v) {
                        None
                    } else {
                        Some((*k, v))
                    }
                })
                .collect(),
        }
    }

    pub fn scale_elem(&self, e: &R::Elem) -> Self {
        let mut out = Self::zero(&self.ring);
        for (k, c) in &self.terms {
            out.insert(*k, self.ring.mul(c, e));
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::constant(&self.ring, self.ring.one());
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

    pub fn dx(&self) -> Self {
        let mut out = Self::zero(&self.ring);
        for ((xe, ye), c) in &self.terms {
            if *xe > 0 {
                out.insert((xe - 1, *ye), self.ring.scale(c, &Rat::from_integer((*xe as i64).into())));
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let mut out = Self::zero(&self.ring);
        for ((xe, ye), c) in &self.terms {
            if *ye > 0 {
                out.insert((*xe, ye - 1), self.ring.scale(c, &Rat::from_integer((*ye as i64).into())));
            }
        }
        out
    }

    pub fn degree_y(&self) -> u16 {
        self.terms.keys().map(|&(_, ye)| ye).max().unwrap_or(0)
    }

    pub fn degree_x(&self) -> u16 {
        self.terms.keys().map(|&(xe, _)| xe).max().unwrap_or(0)
    }

    /// Substitute Laurent series for `x` and `y`.
    pub fn compose_series(
        &self,
        xs: &LaurentSeries<R>,
        ys: &LaurentSeries<R>,
    ) -> LaurentSeries<R> {
        // Horner in y, then powers of x.
        let n = self.degree_y();
        let mut acc: LaurentSeries<R> = LaurentSeries::zero_exact(&self.ring);
        for ye in (0..=n).rev() {
            if ye < n {
                acc = acc.mul(ys);
            }
            // row polynomial in x
            let mut xmax = 0;
            for (&(xe, ye2), _) in &self.terms {
                if ye2 == ye {
                    xmax = xmax.max(xe);
                }
            }
            let mut row: LaurentSeries<R> = LaurentSeries::zero_exact(&self.ring);
            for xe in (0..=xmax).rev() {
                let c = self.coeff(xe, ye);
                if xe < xmax {
                    // nothing: we accumulate via explicit powers below
                }
                if !self.ring.is_zero(&c) {
                    row = row.add(&xs.pow(xe as u32).scale_elem(&c));
                }
            }
            acc = acc.add(&row);
        }
        acc
    }

    /// Reduce modulo a polynomial monic in `y` of degree `n`: rewrites
    /// `y^n -> -(lower terms)` until `deg_y < n`.
    pub fn reduce_mod(&self, f: &XYPoly<R>) -> Self {
        let n = f.degree_y();
        assert!(n > 0, "modulus must involve y");
        let lead = f.coeff(0, n);
        assert!(
            lead == self.ring.one(),
            "modulus must be monic in y"
        );
        // rest = f - y^n  =>  y^n = -rest
        let mut rest = f.clone();
        rest.terms.remove(&(0, n));
        let minus_rest = rest.neg();
        let mut cur = self.clone();
        loop {
            let d = cur.degree_y();
            if d < n {
                return cur;
            }
            let mut high = Self::zero(&self.ring);
            let mut low = Self::zero(&self.ring);
            for ((xe, ye), c) in &cur.terms {
                if *ye >= n {
                    high.insert((*xe, *ye - n), c.clone());
                } else {
                    low.insert((*xe, *ye), c.clone());
                }
            }
            cur = low.add(&high.mul(&minus_rest));
        }
    }

    /// Exact division by `f` when `self = q*f`; `None` otherwise. Only used
    /// to report multiples of the curve polynomial, so `f` must be monic in
    /// `y` with `deg_y(f) >= 1`.
    pub fn div_exact_monic_y(&self, f: &XYPoly<R>) -> Option<Self>
    where
        R::Elem: PartialEq,
    {
        let n = f.degree_y();
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.ring);
        while !rem.is_zero() {
            // leading term by y-degree, then x-degree
            let (&(xe, ye), c) = rem
                .terms
                .iter()
                .max_by_key(|(&(xe, ye), _)| (ye, xe))
                .unwrap();
            if ye < n {
                return None;
            }
            let qt = Self::monomial(&self.ring, xe, ye - n, c.clone());
            rem = rem.sub(&qt.mul(f));
            quot = quot.add(&qt);
        }
        Some(quot)
    }

    pub fn map_coeffs<S: CoeffRing>(
        &self,
        ring: &S,
        mut f: impl FnMut(&R::Elem) -> S::Elem,
    ) -> XYPoly<S> {
        let mut out = XYPoly::zero(ring);
        for (k, c) in &self.terms {
            out.insert(*k, f(c));
        }
        out
    }
}

impl<R: CoeffRing> fmt::Display for XYPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut sorted: Vec<(&(u16, u16), &R::Elem)> = self.terms.iter().collect();
        sorted.sort_by_key(|(&(xe, ye), _)| (std::cmp::Reverse(xe + ye), std::cmp::Reverse(ye)));
        let mut parts = Vec::new();
        for ((xe, ye), c) in sorted {
            let cs = self.ring.display(c);
            let coeff = if crate::series::needs_parens_pub(&cs) {
                format!("({cs})")
            } else {
                cs
            };
            let mut factors = Vec::new();
            match xe {
                0 => {}
                1 => factors.push("x".to_string()),
                _ => factors.push(format!("x^{xe}")),
            }
            match ye {
                0 => {}
                1 => factors.push("y".to_string()),
                _ => factors.push(format!("y^{ye}")),
            }
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
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Parse an `x`,`y` polynomial whose other symbols are generators of the
/// underlying polynomial ring.
pub fn parse_xy(
    src: &str,
    ring: &crate::series::PolyRing,
) -> Result<XYPoly<crate::series::PolyRing>, ExprError> {
    use crate::ring::WeightedPoly;
    let proto = XYPoly::zero(ring);
    let ring2 = ring.clone();
    let mut p = crate::ring::expr_parser(src, proto, move |_lex, name: &str| match name {
        "x" => Ok(XYPoly::x(&ring2)),
        "y" => Ok(XYPoly::y(&ring2)),
        _ => ring2
            .gens
            .index_of(name)
            .map(|i| XYPoly::constant(&ring2, WeightedPoly::gen(&ring2.gens, i)))
            .ok_or_else(|| ExprError::UnknownSymbol(name.to_string())),
    });
    p.parse_full()
}

impl<R: CoeffRing> crate::ring::ExprValue for XYPoly<R> {
    fn from_rat(&self, r: Rat) -> Self {
        XYPoly::constant(&self.ring, self.ring.from_rat(&r))
    }
    fn add(&self, other: &Self) -> Self {
        XYPoly::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        XYPoly::mul(self, other)
    }
    fn neg(&self) -> Self {
        XYPoly::neg(self)
    }
    fn pow(&self, n: u32) -> Self {
        XYPoly::pow(self, n)
    }
    fn as_rat(&self) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::from_integer(0.into()));
        }
        if self.terms.len() != 1 {
            return None;
        }
        let ((xe, ye), c) = self.terms.iter().next().unwrap();
        if *xe != 0 || *ye != 0 {
            return None;
        }
        self.ring.as_rat(c)
    }
    fn scale(&self, r: &Rat) -> Self {
        XYPoly::scale(self, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;
    use crate::series::RatField;

    #[test]
    fn compose_and_reduce() {
        let r = RatField;
        let x = XYPoly::x(&r);
        let y = XYPoly::y(&r);
        // f = y^2 - x^3 (cusp); reduce y^3 => y * x^3... y^2 = x^3
        let f = y.pow(2).sub(&x.pow(3));
        let p = y.pow(3).reduce_mod(&f);
        // y^3 = y * y^2 = y x^3
        let expect = y.mul(&x.pow(3));
        assert_eq!(p, expect);

        let xs = LaurentSeries::monomial(&r, rat(1), -2);
        let ys = LaurentSeries::monomial(&r, rat(1), -3);
        let comp = f.compose_series(&xs, &ys);
        assert!(comp.is_zero_through_truncation());
    }

    #[test]
    fn exact_division_by_monic() {
        let r = RatField;
        let x = XYPoly::x(&r);
        let y = XYPoly::y(&r);
        let f = y.pow(2).sub(&x.pow(3)).add(&XYPoly::constant(&r, rat(7)));
        let q = x.mul(&y).add(&XYPoly::constant(&r, rat(2)));
        let prod = f.mul(&q);
        assert_eq!(prod.div_exact_monic_y(&f).unwrap(), q);
        assert!(prod.add(&x).div_exact_monic_y(&f).is_none());
    }
}
