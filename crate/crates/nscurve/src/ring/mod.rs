//! Coefficient substrate: exact rationals, weighted generators, sparse
//! multivariate polynomials and fraction-free linear solving.
//!
//! Every symbolic quantity in the toolkit bottoms out in a [`WeightedPoly`]:
//! a sparse polynomial over `BigRational` in a fixed set of named generators,
//! each carrying an integer Sato weight (`λ_j` has weight `j`, a
//! regularization unknown `c_w` has weight `w`).

mod expr;
mod poly;
mod solve;

pub use expr::{expr_parser, parse_poly, ExprError, ExprValue, Lexer, Parser, Tok};
pub use poly::{Homogeneity, WeightedpolyDisplay, WeightedPoly};
pub use solve::{linear_solve, LinearSystem, SolveError};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// Exact rational scalar. All arithmetic in the toolkit is exact; floats
/// never appear.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `p/q`. Panics on `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Render a rational in the canonical `p` / `p/q` form.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `p` or `p/q`.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Rat::new(p, q))
    } else {
        let p: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(p))
    }
}

/// A named symbolic generator with its Sato weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub weight: i64,
}

/// An immutable, shared set of generators. Polynomials over the same
/// `GenSet` (pointer or structural equality) may be combined.
#[derive(Debug, PartialEq, Eq)]
pub struct GenSet {
    gens: Vec<Generator>,
    by_name: BTreeMap<String, usize>,
}

impl GenSet {
    pub fn new(gens: Vec<(String, i64)>) -> Arc<Self> {
        let mut by_name = BTreeMap::new();
        let gens: Vec<Generator> = gens
            .into_iter()
            .map(|(name, weight)| Generator { name, weight })
            .collect();
        for (i, g) in gens.iter().enumerate() {
            let prev = by_name.insert(g.name.clone(), i);
            assert!(prev.is_none(), "duplicate generator name {}", g.name);
        }
        Arc::new(GenSet { gens, by_name })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.gens[idx].name
    }

    pub fn weight(&self, idx: usize) -> i64 {
        self.gens[idx].weight
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Generator)> {
        self.gens.iter().enumerate()
    }
}

impl fmt::Display for GenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.gens.iter().map(|g| g.name.as_str()).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

/// Sign helper used by canonical printers.
pub(crate) fn is_neg(r: &Rat) -> bool {
    r.is_negative()
}
