//! Formal Abelian-function symbols: `ζ_i`, multi-index `℘`, and the
//! three-point sums `𝔭` used by the addition machinery.

use std::cmp::Ordering;
use std::fmt;

/// Which function family a symbol names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymKind {
    /// First logarithmic derivative; exactly one index.
    Zeta,
    /// `℘` with at least two indices.
    Wp,
    /// Three-point sum over `u, v, w` with `u+v+w = 0`.
    Psum,
}

/// Point argument tag. Single-argument contexts use `Free`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointTag {
    Free,
    U,
    V,
    W,
    /// The combined argument `u+v`.
    Sum,
}

impl PointTag {
    pub fn suffix(&self) -> &'static str {
        match self {
            PointTag::Free => "",
            PointTag::U => "|u",
            PointTag::V => "|v",
            PointTag::W => "|w",
            PointTag::Sum => "|uv",
        }
    }
}

/// One formal symbol. Indices are gap values, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WpSymbol {
    pub kind: SymKind,
    pub tag: PointTag,
    pub indices: Vec<u8>,
}

impl WpSymbol {
    pub fn zeta(i: u8) -> Self {
        WpSymbol {
            kind: SymKind::Zeta,
            tag: PointTag::Free,
            indices: vec![i],
        }
    }

    pub fn wp(indices: &[u8]) -> Self {
        let mut v = indices.to_vec();
        v.sort_unstable();
        assert!(v.len() >= 2, "℘ needs at least two indices");
        WpSymbol {
            kind: SymKind::Wp,
            tag: PointTag::Free,
            indices: v,
        }
    }

    pub fn psum(indices: &[u8]) -> Self {
        let mut v = indices.to_vec();
        v.sort_unstable();
        WpSymbol {
            kind: SymKind::Psum,
            tag: PointTag::Free,
            indices: v,
        }
    }

    pub fn at(mut self, tag: PointTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn weight(&self) -> i64 {
        self.indices.iter().map(|&i| i as i64).sum()
    }

    /// Differential order above 2 (zero for `ζ` and two-index `℘`).
    pub fn level(&self) -> i64 {
        (self.indices.len() as i64 - 2).max(0)
    }

    /// Sign under `u -> -u` (per point argument).
    pub fn parity(&self) -> i64 {
        match self.kind {
            SymKind::Zeta => -1,
            SymKind::Wp | SymKind::Psum => {
                if self.indices.len() % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Order used by the rewrite engine: weight, then level, then kind,
    /// then the ascending index vector, then the point tag.
    pub fn cmp_graded(&self, other: &Self) -> Ordering {
        self.weight()
            .cmp(&other.weight())
            .then_with(|| self.level().cmp(&other.level()))
            .then_with(|| self.kind.cmp(&other.kind))
            .then_with(|| self.indices.cmp(&other.indices))
            .then_with(|| self.tag.cmp(&other.tag))
    }

    /// Multiset inclusion of `pattern` indices in `self` indices.
    pub fn indices_superset_of(&self, pattern: &[u8]) -> bool {
        let mut mine = self.indices.clone();
        for p in pattern {
            match mine.iter().position(|x| x == p) {
                Some(k) => {
                    mine.remove(k);
                }
                None => return false,
            }
        }
        true
    }

    /// Indices of `self` minus those of `pattern` (must be a superset).
    pub fn indices_minus(&self, pattern: &[u8]) -> Vec<u8> {
        let mut mine = self.indices.clone();
        for p in pattern {
            let k = mine.iter().position(|x| x == p).expect("superset");
            mine.remove(k);
        }
        mine
    }
}

impl fmt::Display for WpSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.kind {
            SymKind::Zeta => "ζ",
            SymKind::Wp => "℘",
            SymKind::Psum => "𝔭",
        };
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{head}[{}{}]", idx.join(","), self.tag.suffix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_within_equal_weight() {
        // ℘[2,2,2] > ℘[1,1,4]: same weight, same level, index-vector decides
        let a = WpSymbol::wp(&[2, 2, 2]);
        let b = WpSymbol::wp(&[1, 1, 4]);
        assert_eq!(a.cmp_graded(&b), Ordering::Greater);
        // ℘[1,1,2,2] > ℘[1,1,1,3]
        let c = WpSymbol::wp(&[1, 1, 2, 2]);
        let d = WpSymbol::wp(&[1, 1, 1, 3]);
        assert_eq!(c.cmp_graded(&d), Ordering::Greater);
        // weight dominates
        let e = WpSymbol::wp(&[1, 2, 4]);
        let g = WpSymbol::wp(&[1, 2, 2]);
        assert_eq!(e.cmp_graded(&g), Ordering::Greater);
    }

    #[test]
    fn parities() {
        assert_eq!(WpSymbol::zeta(5).parity(), -1);
        assert_eq!(WpSymbol::wp(&[1, 1]).parity(), 1);
        assert_eq!(WpSymbol::wp(&[1, 1, 2]).parity(), -1);
        assert_eq!(WpSymbol::psum(&[1]).parity(), -1);
        assert_eq!(WpSymbol::psum(&[1, 1]).parity(), 1);
    }

    #[test]
    fn multiset_matching() {
        let s = WpSymbol::wp(&[1, 1, 1, 1, 2]);
        assert!(s.indices_superset_of(&[1, 1, 1, 1]));
        assert!(s.indices_superset_of(&[1, 1, 1, 2]));
        assert!(!s.indices_superset_of(&[2, 2]));
        assert_eq!(s.indices_minus(&[1, 1, 1, 2]), vec![1]);
    }
}
