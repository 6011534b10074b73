//! Truncated series with explicit precision tracking.
//!
//! Truncation order is data, not convention: every operation computes the
//! tightest provable `O(ξ^N)` and the accessors refuse to read coefficients
//! past it. Exact series (polynomials in `ξ`, `ξ^{-1}`) carry the sentinel
//! order [`EXACT`].

mod laurent;
mod multi;

pub use laurent::{LaurentSeries, LogSeries};
pub use multi::MultiSeries;

use crate::ring::{GenSet, Rat, WeightedPoly};
use num::traits::{One, Zero};
use std::fmt;
use std::sync::Arc;

/// Truncation sentinel for exact series. Large enough that sums never
/// overflow an `i64`, huge enough to dominate any real order.
pub const EXACT: i64 = i64::MAX / 4;

pub(crate) fn sat_add(a: i64, b: i64) -> i64 {
    normalize_order(a.saturating_add(b))
}

/// Collapse anything in the sentinel band back onto `EXACT`.
pub(crate) fn normalize_order(t: i64) -> i64 {
    if t > EXACT / 2 {
        EXACT
    } else {
        t
    }
}

/// Coefficient ring abstraction. A ring value is a lightweight handle
/// (usually an `Arc` to shared context) that can build and combine
/// elements.
pub trait CoeffRing: Clone {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, a: &Self::Elem, r: &Rat) -> Self::Elem;
    fn from_rat(&self, r: &Rat) -> Self::Elem {
        self.scale(&self.one(), r)
    }
    /// Multiplicative inverse where available.
    fn try_inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// The element as an exact rational, when it is a constant.
    fn as_rat(&self, a: &Self::Elem) -> Option<Rat>;
    fn display(&self, a: &Self::Elem) -> String;
}

/// Whether a rendered coefficient needs parentheses inside a series term.
pub(crate) fn needs_parens(s: &str) -> bool {
    s.contains('+') || s.chars().skip(1).any(|c| c == '-')
}

/// Crate-public alias used by display impls outside this module.
pub fn needs_parens_pub(s: &str) -> bool {
    needs_parens(s)
}

/// The field of exact rationals.
#[derive(Clone, Debug, Default)]
pub struct RatField;

impl CoeffRing for RatField {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        Rat::zero()
    }
    fn one(&self) -> Rat {
        Rat::one()
    }
    fn is_zero(&self, a: &Rat) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        a + b
    }
    fn sub(&self, a: &Rat, b: &Rat) -> Rat {
        a - b
    }
    fn neg(&self, a: &Rat) -> Rat {
        -a
    }
    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        a * b
    }
    fn scale(&self, a: &Rat, r: &Rat) -> Rat {
        a * r
    }
    fn try_inv(&self, a: &Rat) -> Option<Rat> {
        if a.is_zero() {
            None
        } else {
            Some(Rat::one() / a)
        }
    }
    fn as_rat(&self, a: &Rat) -> Option<Rat> {
        Some(a.clone())
    }
    fn display(&self, a: &Rat) -> String {
        crate::ring::rat_to_string(a)
    }
}

/// Polynomial coefficients over a shared generator set.
#[derive(Clone, Debug)]
pub struct PolyRing {
    pub gens: Arc<GenSet>,
}

impl PolyRing {
    pub fn new(gens: Arc<GenSet>) -> Self {
        PolyRing { gens }
    }
}

impl CoeffRing for PolyRing {
    type Elem = WeightedPoly;

    fn zero(&self) -> WeightedPoly {
        WeightedPoly::zero(&self.gens)
    }
    fn one(&self) -> WeightedPoly {
        WeightedPoly::one(&self.gens)
    }
    fn is_zero(&self, a: &WeightedPoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &WeightedPoly, b: &WeightedPoly) -> WeightedPoly {
        a.add(b)
    }
    fn sub(&self, a: &WeightedPoly, b: &WeightedPoly) -> WeightedPoly {
        a.sub(b)
    }
    fn neg(&self, a: &WeightedPoly) -> WeightedPoly {
        a.neg()
    }
    fn mul(&self, a: &WeightedPoly, b: &WeightedPoly) -> WeightedPoly {
        a.mul(b)
    }
    fn scale(&self, a: &WeightedPoly, r: &Rat) -> WeightedPoly {
        a.scale(r)
    }
    /// Invertible elements are nonzero rational multiples of a single
    /// monomial in at most... here restricted to constants; series division
    /// with monomial leading coefficients is handled at the series layer.
    fn try_inv(&self, a: &WeightedPoly) -> Option<WeightedPoly> {
        let c = a.as_constant()?;
        if c.is_zero() {
            None
        } else {
            Some(WeightedPoly::constant(&self.gens, Rat::one() / c))
        }
    }
    fn as_rat(&self, a: &WeightedPoly) -> Option<Rat> {
        a.as_constant()
    }
    fn display(&self, a: &WeightedPoly) -> String {
        format!("{a}")
    }
}

#[derive(Debug, thiserror::Error, Clone)]
pub enum SeriesError {
    #[error("insufficient precision: need coefficient of order {need}, series only known to O(ξ^{have})")]
    InsufficientPrecision { need: i64, have: i64 },
    #[error("leading coefficient not invertible: {0}")]
    NonInvertibleLeading(String),
    #[error("residue obstruction: nonzero coefficient {coeff} at ξ^-1")]
    ResidueObstruction { coeff: String },
    #[error("domain error: {0}")]
    Domain(String),
}
