use super::{needs_parens, normalize_order, sat_add, CoeffRing, SeriesError, EXACT};
use crate::ring::{rat, Rat};
use std::fmt;

/// Truncated Laurent series `sum_{k=min_exp}^{trunc-1} c_k ξ^k + O(ξ^trunc)`.
///
/// Coefficients are stored densely from `min_exp`; the vector never reaches
/// `trunc`. A zero series has an empty vector and `min_exp == trunc`.
#[derive(Clone, Debug)]
pub struct LaurentSeries<R: CoeffRing> {
    pub(crate) ring: R,
    pub(crate) min_exp: i64,
    pub(crate) coeffs: Vec<R::Elem>,
    pub(crate) trunc: i64,
}

impl<R: CoeffRing> LaurentSeries<R> {
    pub fn zero(ring: &R, trunc: i64) -> Self {
        let trunc = normalize_order(trunc);
        LaurentSeries {
            ring: ring.clone(),
            min_exp: trunc,
            coeffs: Vec::new(),
            trunc,
        }
    }

    /// Exact zero (no unknown tail).
    pub fn zero_exact(ring: &R) -> Self {
        Self::zero(ring, EXACT)
    }

    /// A single exact term `c ξ^k`.
    pub fn monomial(ring: &R, c: R::Elem, k: i64) -> Self {
        if ring.is_zero(&c) {
            return Self::zero_exact(ring);
        }
        LaurentSeries {
            ring: ring.clone(),
            min_exp: k,
            coeffs: vec![c],
            trunc: EXACT,
        }
    }

    pub fn one(ring: &R) -> Self {
        Self::monomial(ring, ring.one(), 0)
    }

    /// Build from explicit `(exponent, coefficient)` pairs plus a truncation.
    pub fn from_terms(ring: &R, terms: Vec<(i64, R::Elem)>, trunc: i64) -> Self {
        let mut s = Self::zero(ring, trunc);
        for (k, c) in terms {
            s.add_term(k, c);
        }
        s
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn truncation(&self) -> i64 {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc >= EXACT
    }

    /// Smallest exponent with a nonzero stored coefficient; `None` for a
    /// series with no known nonzero term.
    pub fn leading_exponent(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !self.ring.is_zero(c))
            .map(|i| self.min_exp + i as i64)
    }

    pub fn leading_coeff(&self) -> Option<&R::Elem> {
        self.coeffs.iter().find(|c| !self.ring.is_zero(c))
    }

    /// True when every stored coefficient is zero (the tail may still hide
    /// anything beyond `trunc`).
    pub fn is_zero_through_truncation(&self) -> bool {
        self.coeffs.iter().all(|c| self.ring.is_zero(c))
    }

    fn normalize(&mut self) {
        while let Some(first) = self.coeffs.first() {
            if self.ring.is_zero(first) {
                self.coeffs.remove(0);
                self.min_exp += 1;
            } else {
                break;
            }
        }
        while let Some(last) = self.coeffs.last() {
            if self.ring.is_zero(last) {
                self.coeffs.pop();
            } else {
                break;
            }
        }
        if self.coeffs.is_empty() {
            self.min_exp = self.trunc;
        }
    }

    /// Add `c ξ^k`, ignoring anything at or past the truncation order.
    pub fn add_term(&mut self, k: i64, c: R::Elem) {
        if k >= self.trunc || self.ring.is_zero(&c) {
            return;
        }
        if self.coeffs.is_empty() {
            self.min_exp = k;
            self.coeffs.push(c);
            return;
        }
        if k < self.min_exp {
            let pad = (self.min_exp - k) as usize;
            let mut v = Vec::with_capacity(pad + self.coeffs.len());
            v.push(c);
            for _ in 1..pad {
                v.push(self.ring.zero());
            }
            v.append(&mut self.coeffs);
            self.coeffs = v;
            self.min_exp = k;
        } else {
            let idx = (k - self.min_exp) as usize;
            while self.coeffs.len() <= idx {
                self.coeffs.push(self.ring.zero());
            }
            self.coeffs[idx] = self.ring.add(&self.coeffs[idx], &c);
        }
        self.normalize();
    }

    /// Coefficient of `ξ^k`; errors at or beyond the truncation order.
    pub fn coeff(&self, k: i64) -> Result<R::Elem, SeriesError> {
        if k >= self.trunc {
            return Err(SeriesError::InsufficientPrecision {
                need: k,
                have: self.trunc,
            });
        }
        if k < self.min_exp || k >= self.min_exp + self.coeffs.len() as i64 {
            return Ok(self.ring.zero());
        }
        Ok(self.coeffs[(k - self.min_exp) as usize].clone())
    }

    /// All known terms, `(exponent, coefficient)`, zeros skipped.
    pub fn terms(&self) -> Vec<(i64, R::Elem)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.ring.is_zero(c))
            .map(|(i, c)| (self.min_exp + i as i64, c.clone()))
            .collect()
    }

    pub fn truncate_to(&self, trunc: i64) -> Self {
        let trunc = normalize_order(trunc.min(self.trunc));
        let mut out = Self::zero(&self.ring, trunc);
        for (k, c) in self.terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut out = self.truncate_to(trunc);
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = self.ring.neg(c);
        }
        out
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = self.ring.scale(c, r);
        }
        out.normalize();
        out
    }

    pub fn scale_elem(&self, e: &R::Elem) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = self.ring.mul(c, e);
        }
        out.normalize();
        out
    }

    /// Multiply by `ξ^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        out.min_exp = sat_add(out.min_exp, k);
        out.trunc = sat_add(out.trunc, k);
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        // O(ξ^ta)*[leading ξ^mb] and vice versa bound the provable order.
        let ta = sat_add(self.trunc, other.min_exp);
        let tb = sat_add(other.trunc, self.min_exp);
        let trunc = ta.min(tb);
        let mut out = Self::zero(&self.ring, trunc);
        for (i, a) in self.coeffs.iter().enumerate() {
            if self.ring.is_zero(a) {
                continue;
            }
            let ka = self.min_exp + i as i64;
            for (j, b) in other.coeffs.iter().enumerate() {
                if self.ring.is_zero(b) {
                    continue;
                }
                let kb = other.min_exp + j as i64;
                if ka + kb >= trunc {
                    break;
                }
                out.add_term(ka + kb, self.ring.mul(a, b));
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.ring);
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

    /// Multiplicative inverse. The leading coefficient must be invertible
    /// in the coefficient ring.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let lead_k = self.leading_exponent().ok_or_else(|| {
            SeriesError::NonInvertibleLeading("series with no known nonzero term".into())
        })?;
        let lead = self.coeff(lead_k).unwrap();
        let lead_inv = self
            .ring
            .try_inv(&lead)
            .ok_or_else(|| SeriesError::NonInvertibleLeading(self.ring.display(&lead)))?;
        // f = lead ξ^m (1 + r), 1/f = lead^{-1} ξ^{-m} (1 - r + r² - ...)
        let order = if self.is_exact() {
            // exact input still yields a truncated inverse unless monomial
            if self.coeffs.iter().filter(|c| !self.ring.is_zero(c)).count() == 1 {
                return Ok(Self::monomial(&self.ring, lead_inv, -lead_k));
            }
            // fall back to a generous default window
            64
        } else {
            self.trunc - lead_k
        };
        let monic = self.shift(-lead_k).scale_elem(&lead_inv); // 1 + r, trunc = order
        let mut inv = Self::zero(&self.ring, order);
        inv.add_term(0, self.ring.one());
        // Newton-free direct recurrence: (1+r)^{-1} coefficients
        // b_0 = 1, b_k = -sum_{j=1..k} r_j b_{k-j}
        let mut b: Vec<R::Elem> = vec![self.ring.one()];
        for k in 1..order.max(0) {
            let mut acc = self.ring.zero();
            for j in 1..=k {
                let rj = monic.coeff(j).unwrap_or_else(|_| self.ring.zero());
                if self.ring.is_zero(&rj) {
                    continue;
                }
                acc = self.ring.add(&acc, &self.ring.mul(&rj, &b[(k - j) as usize]));
            }
            let bk = self.ring.neg(&acc);
            b.push(bk.clone());
            inv.add_term(k, bk);
        }
        Ok(inv.scale_elem(&lead_inv).shift(-lead_k))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn derivative(&self) -> Self {
        let trunc = if self.is_exact() { EXACT } else { self.trunc - 1 };
        let mut out = Self::zero(&self.ring, trunc);
        for (k, c) in self.terms() {
            if k == 0 {
                continue;
            }
            out.add_term(k - 1, self.ring.scale(&c, &rat(k)));
        }
        out
    }

    /// Coefficient of `ξ^{-1}`.
    pub fn residue(&self) -> Result<R::Elem, SeriesError> {
        if self.min_exp > -1 {
            return Ok(self.ring.zero());
        }
        self.coeff(-1)
    }

    /// Termwise antiderivative with zero integration constant. Errors if a
    /// `ξ^{-1}` term is present (or cannot be ruled out).
    pub fn integrate(&self) -> Result<Self, SeriesError> {
        let res = self.residue()?;
        if !self.ring.is_zero(&res) {
            return Err(SeriesError::ResidueObstruction {
                coeff: self.ring.display(&res),
            });
        }
        let trunc = if self.is_exact() { EXACT } else { self.trunc + 1 };
        let mut out = Self::zero(&self.ring, trunc);
        for (k, c) in self.terms() {
            debug_assert!(k != -1);
            out.add_term(k + 1, self.ring.scale(&c, &Rat::new(1.into(), (k + 1).into())));
        }
        Ok(out)
    }

    /// Exponential of a series with `min_exp >= 1`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if let Some(m) = self.leading_exponent() {
            if m < 1 {
                return Err(SeriesError::Domain(format!(
                    "exp needs a series vanishing at 0, leading exponent {m}"
                )));
            }
        }
        if self.is_exact() {
            if self.is_zero_through_truncation() {
                return Ok(Self::one(&self.ring));
            }
            // exp of a nonzero polynomial is not polynomial; the caller must
            // truncate first.
            return Err(SeriesError::Domain(
                "exp of an exact nonzero series needs an explicit truncation".into(),
            ));
        }
        let mut e: Vec<R::Elem> = vec![self.ring.one()];
        let n = self.trunc;
        // e' = s' e  =>  k e_k = sum_{j=1..k} j s_j e_{k-j}
        for k in 1..n {
            let mut acc = self.ring.zero();
            for j in 1..=k {
                let sj = self.coeff(j).unwrap_or_else(|_| self.ring.zero());
                if self.ring.is_zero(&sj) {
                    continue;
                }
                let term = self.ring.mul(&sj, &e[(k - j) as usize]);
                acc = self.ring.add(&acc, &self.ring.scale(&term, &rat(j)));
            }
            e.push(self.ring.scale(&acc, &Rat::new(1.into(), k.into())));
        }
        let mut out = Self::zero(&self.ring, n);
        for (k, c) in e.into_iter().enumerate() {
            out.add_term(k as i64, c);
        }
        Ok(out)
    }

    /// Logarithm of a series with leading term `1·ξ^m`; returns the log
    /// multiplicity `m` and the series `log(f/ξ^m)`.
    pub fn log(&self) -> Result<LogSeries<R>, SeriesError> {
        let m = self.leading_exponent().ok_or_else(|| {
            SeriesError::Domain("log of a series with no known nonzero term".into())
        })?;
        let lead = self.coeff(m).unwrap();
        if lead != self.ring.one() {
            return Err(SeriesError::Domain(format!(
                "log needs leading coefficient 1, found {}",
                self.ring.display(&lead)
            )));
        }
        let monic = self.shift(-m); // 1 + r
        let order = if monic.is_exact() { 64 } else { monic.trunc };
        // l' = s'/s with s = 1 + r:  k l_k = k s_k - sum_{j=1..k-1} j l_j s_{k-j}
        let mut l: Vec<R::Elem> = vec![self.ring.zero()];
        for k in 1..order.max(1) {
            let sk = monic.coeff(k).unwrap_or_else(|_| self.ring.zero());
            let mut acc = self.ring.scale(&sk, &rat(k));
            for j in 1..k {
                let skj = monic.coeff(k - j).unwrap_or_else(|_| self.ring.zero());
                if self.ring.is_zero(&skj) {
                    continue;
                }
                let term = self.ring.mul(&l[j as usize], &skj);
                acc = self.ring.sub(&acc, &self.ring.scale(&term, &rat(j)));
            }
            l.push(self.ring.scale(&acc, &Rat::new(1.into(), k.into())));
        }
        let mut analytic = Self::zero(&self.ring, order);
        for (k, c) in l.into_iter().enumerate() {
            analytic.add_term(k as i64, c);
        }
        Ok(LogSeries {
            log_multiplicity: m,
            analytic,
        })
    }

    /// Pretty form `c_m ξ^m + ... + O(ξ^N)`.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (k, c) in self.terms() {
            let cs = self.ring.display(&c);
            let coeff = if needs_parens(&cs) { format!("({cs})") } else { cs };
            let part = match k {
                0 => coeff,
                1 => {
                    if coeff == "1" {
                        "ξ".to_string()
                    } else if coeff == "-1" {
                        "-ξ".to_string()
                    } else {
                        format!("{coeff}*ξ")
                    }
                }
                _ => {
                    if coeff == "1" {
                        format!("ξ^{k}")
                    } else if coeff == "-1" {
                        format!("-ξ^{k}")
                    } else {
                        format!("{coeff}*ξ^{k}")
                    }
                }
            };
            parts.push(part);
        }
        let mut s = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        };
        if !self.is_exact() {
            if s == "0" {
                s = format!("O(ξ^{})", self.trunc);
            } else {
                s = format!("{s} + O(ξ^{})", self.trunc);
            }
        }
        s
    }
}

impl<R: CoeffRing> PartialEq for LaurentSeries<R> {
    fn eq(&self, other: &Self) -> bool {
        self.trunc == other.trunc && self.terms() == other.terms()
    }
}

impl<R: CoeffRing> fmt::Display for LaurentSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

/// `m·log ξ + analytic`, the shape taken by `log ψ`.
#[derive(Clone, Debug)]
pub struct LogSeries<R: CoeffRing> {
    pub log_multiplicity: i64,
    pub analytic: LaurentSeries<R>,
}

impl<R: CoeffRing> LogSeries<R> {
    pub fn add(&self, other: &Self) -> Self {
        LogSeries {
            log_multiplicity: self.log_multiplicity + other.log_multiplicity,
            analytic: self.analytic.add(&other.analytic),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        LogSeries {
            log_multiplicity: self.log_multiplicity - other.log_multiplicity,
            analytic: self.analytic.sub(&other.analytic),
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        LogSeries {
            log_multiplicity: self.log_multiplicity * k,
            analytic: self.analytic.scale(&rat(k)),
        }
    }

    /// `exp(m log ξ + a) = ξ^m exp(a)`.
    pub fn exp(&self) -> Result<LaurentSeries<R>, SeriesError> {
        Ok(self.analytic.exp()?.shift(self.log_multiplicity))
    }

    pub fn render(&self) -> String {
        if self.log_multiplicity == 0 {
            self.analytic.render()
        } else if self.log_multiplicity == 1 {
            format!("log ξ + {}", self.analytic.render())
        } else {
            format!("{}*log ξ + {}", self.log_multiplicity, self.analytic.render())
        }
    }
}

impl<R: CoeffRing> fmt::Display for LogSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::super::RatField;
    use super::*;
    use crate::ring::ratio;

    fn s(terms: Vec<(i64, i64)>, trunc: i64) -> LaurentSeries<RatField> {
        LaurentSeries::from_terms(
            &RatField,
            terms.into_iter().map(|(k, c)| (k, rat(c))).collect(),
            trunc,
        )
    }

    #[test]
    fn mul_truncation_is_tight() {
        // (ξ^{-1}+O(ξ^2)) * (ξ+O(ξ^4)) = 1 + O(ξ^3)
        let a = s(vec![(-1, 1)], 2);
        let b = s(vec![(1, 1)], 4);
        let p = a.mul(&b);
        assert_eq!(p.truncation(), 3);
        assert_eq!(p.coeff(0).unwrap(), rat(1));
        assert!(p.coeff(3).is_err());
    }

    #[test]
    fn exact_square() {
        // (-ξ^{-3})^2 = ξ^{-6} exactly
        let x = LaurentSeries::monomial(&RatField, rat(-1), -3);
        let sq = x.mul(&x);
        assert!(sq.is_exact());
        assert_eq!(sq.coeff(-6).unwrap(), rat(1));
        assert_eq!(sq.terms().len(), 1);
    }

    #[test]
    fn integrate_then_differentiate() {
        let a = s(vec![(4, 1)], 6);
        let int = a.integrate().unwrap();
        assert_eq!(int.coeff(5).unwrap(), ratio(1, 5));
        assert_eq!(int.truncation(), 7);
        let back = int.derivative();
        assert_eq!(back.coeff(4).unwrap(), rat(1));
        assert_eq!(back.truncation(), 6);
    }

    #[test]
    fn residue_obstruction() {
        let a = s(vec![(-1, 2)], 3);
        assert!(matches!(
            a.integrate(),
            Err(SeriesError::ResidueObstruction { .. })
        ));
        assert_eq!(a.residue().unwrap(), rat(2));
    }

    #[test]
    fn log_exp_roundtrip() {
        // log(ξ^3 (1 + aξ)) with a = 2: 3 log ξ + 2ξ - 2ξ² + 8/3 ξ³ ...
        let f = s(vec![(3, 1), (4, 2)], 10);
        let lg = f.log().unwrap();
        assert_eq!(lg.log_multiplicity, 3);
        assert_eq!(lg.analytic.coeff(1).unwrap(), rat(2));
        assert_eq!(lg.analytic.coeff(2).unwrap(), rat(-2));
        let back = lg.exp().unwrap();
        for k in 3..7 {
            assert_eq!(back.coeff(k).unwrap(), f.coeff(k).unwrap(), "coeff {k}");
        }
    }

    #[test]
    fn inversion() {
        let f = s(vec![(1, 1), (2, -3)], 6);
        let inv = f.inv().unwrap();
        let prod = f.mul(&inv);
        assert_eq!(prod.coeff(0).unwrap(), rat(1));
        for k in 1..4 {
            assert_eq!(prod.coeff(k).unwrap(), rat(0));
        }
    }

    #[test]
    fn render_format() {
        let a = s(vec![(-3, -1), (-1, 2)], 2);
        assert_eq!(a.render(), "-ξ^-3 + 2*ξ^-1 + O(ξ^2)");
    }
}
