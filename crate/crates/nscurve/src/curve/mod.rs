//! The (n,s)-curve model: gap sequence, curve polynomial, parameterization
//! at infinity, differential bases, singular parts, Abel series and the
//! primitive-function series `log ψ`.

mod basis;
mod param;
mod psi;
pub mod tables;
mod xy;

pub use basis::{
    abel_series, differential_bases, monomials_up_to, pairing_is_identity, singular_part,
    singular_part_mismatches, verify_pairing, DifferentialBasis, RegularizedIntegral,
};
pub use param::{expand_at_infinity, ParamExpansion};
pub use psi::log_psi;
pub use xy::{parse_xy, XYPoly};

use crate::ring::{GenSet, Rat, WeightedPoly};
use crate::series::PolyRing;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("n and s must be coprime with 2 <= n < s, got ({0},{1})")]
    NotCoprime(u32, u32),
    #[error("no embedded second-kind basis for the ({0},{1})-curve")]
    UnsupportedCurveForDr(u32, u32),
    #[error("series error: {0}")]
    Series(#[from] crate::series::SeriesError),
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Weierstrass gap sequence of the semigroup `<n,s>`: the positive integers
/// not representable as `a n + b s`.
pub fn gap_sequence(n: u32, s: u32) -> Vec<i64> {
    let g = ((n - 1) * (s - 1) / 2) as usize;
    let bound = 2 * g; // the largest gap is 2g-1
    let mut representable = vec![false; bound + 1];
    representable[0] = true;
    for k in 1..=bound {
        let mut ok = false;
        if k >= n as usize && representable[k - n as usize] {
            ok = true;
        }
        if k >= s as usize && representable[k - s as usize] {
            ok = true;
        }
        representable[k] = ok;
    }
    let gaps: Vec<i64> = (1..=bound).filter(|&k| !representable[k]).map(|k| k as i64).collect();
    assert_eq!(gaps.len(), g, "gap count must equal the genus");
    gaps
}

/// How the curve coefficients are supplied.
#[derive(Clone, Debug, Default)]
pub enum LambdaMode {
    /// Every λ_j stays a symbolic generator.
    #[default]
    Symbolic,
    /// Explicit rational values per index; missing indices default to 0.
    Explicit(BTreeMap<i64, Rat>),
}

/// An (n,s)-curve together with its coefficient ring.
///
/// The generator set contains the curve coefficients `λ_j`, one
/// regularization unknown `c_w` per gap `w`, and (on the genus-3 trigonal
/// curve) the `α` unknowns used by the addition machinery.
#[derive(Clone, Debug)]
pub struct CurveSpec {
    pub n: u32,
    pub s: u32,
    pub genus: usize,
    pub gaps: Vec<i64>,
    pub gens: Arc<GenSet>,
    pub ring: PolyRing,
    /// λ indices present in the defining polynomial, ascending.
    pub lambda_indices: Vec<i64>,
    lambda_values: Option<BTreeMap<i64, Rat>>,
    /// Defining polynomial `f(x,y)` with coefficients in the ring.
    pub f: XYPoly<PolyRing>,
}

impl CurveSpec {
    pub fn new(n: u32, s: u32, mode: LambdaMode) -> Result<Self, CurveError> {
        if n < 2 || n >= s || gcd(n, s) != 1 {
            return Err(CurveError::NotCoprime(n, s));
        }
        let genus = ((n - 1) * (s - 1) / 2) as usize;
        let gaps = gap_sequence(n, s);

        // λ indices from the template: λ_{ns-in-js} x^i y^j, positive only.
        let mut lambda_indices: Vec<i64> = Vec::new();
        let mut template: Vec<(u16, u16, i64)> = Vec::new();
        for i in 0..=(s - 2) {
            for j in 0..=(n - 2) {
                let k = (n as i64) * (s as i64) - (i as i64) * (n as i64) - (j as i64) * (s as i64);
                if k > 0 {
                    template.push((i as u16, j as u16, k));
                    lambda_indices.push(k);
                }
            }
        }
        lambda_indices.sort_unstable();
        lambda_indices.dedup();

        let mut gen_list: Vec<(String, i64)> = lambda_indices
            .iter()
            .map(|&k| (format!("λ{k}"), k))
            .collect();
        for &w in &gaps {
            gen_list.push((format!("c{w}"), w));
        }
        if (n, s) == (3, 4) {
            for k in [1i64, 2, 3, 5, 6, 9] {
                gen_list.push((format!("α{k}"), k));
            }
        }
        let gens = GenSet::new(gen_list);
        let ring = PolyRing::new(gens.clone());

        let lambda_values = match mode {
            LambdaMode::Symbolic => None,
            LambdaMode::Explicit(m) => Some(m),
        };

        let mut spec = CurveSpec {
            n,
            s,
            genus,
            gaps,
            gens: gens.clone(),
            ring,
            lambda_indices,
            lambda_values,
            f: XYPoly::zero(&PolyRing::new(gens)),
        };

        let mut f = XYPoly::zero(&spec.ring);
        f.insert((0, n as u16), WeightedPoly::one(&spec.gens));
        f.insert((s as u16, 0), WeightedPoly::one(&spec.gens));
        for (i, j, k) in template {
            f.insert((i, j), spec.lambda(k));
        }
        spec.f = f;
        Ok(spec)
    }

    /// The coefficient `λ_k` as a ring element (generator, explicit value,
    /// or zero when the index does not occur for this curve).
    pub fn lambda(&self, k: i64) -> WeightedPoly {
        if !self.lambda_indices.contains(&k) {
            return WeightedPoly::zero(&self.gens);
        }
        match &self.lambda_values {
            Some(vals) => WeightedPoly::constant(
                &self.gens,
                vals.get(&k).cloned().unwrap_or_else(|| Rat::from_integer(0.into())),
            ),
            None => WeightedPoly::gen_by_name(&self.gens, &format!("λ{k}")),
        }
    }

    /// Substitute explicit λ values into a polynomial over this curve's
    /// ring; the identity in symbolic mode.
    pub fn apply_lambda(&self, p: &WeightedPoly) -> WeightedPoly {
        let Some(vals) = &self.lambda_values else {
            return p.clone();
        };
        let consts: Vec<(usize, WeightedPoly)> = self
            .lambda_indices
            .iter()
            .map(|&k| {
                let idx = self.gens.index_of(&format!("λ{k}")).expect("λ generator");
                let v = vals.get(&k).cloned().unwrap_or_else(|| Rat::from_integer(0.into()));
                (idx, WeightedPoly::constant(&self.gens, v))
            })
            .collect();
        let mut map: Vec<Option<&WeightedPoly>> = vec![None; self.gens.len()];
        for (idx, v) in &consts {
            map[*idx] = Some(v);
        }
        p.substitute(&map)
    }

    /// The regularization unknown `c_w` for gap `w`.
    pub fn c_gen(&self, w: i64) -> WeightedPoly {
        WeightedPoly::gen_by_name(&self.gens, &format!("c{w}"))
    }

    pub fn c_gen_index(&self, w: i64) -> usize {
        self.gens.index_of(&format!("c{w}")).expect("c generator")
    }

    /// Indices (into the generator set) of all `c` unknowns, gap order.
    pub fn c_indices(&self) -> Vec<usize> {
        self.gaps.iter().map(|&w| self.c_gen_index(w)).collect()
    }

    /// Sato weight of the sigma function: `-(n²-1)(s²-1)/24`.
    pub fn sigma_weight(&self) -> i64 {
        -((self.n as i64 * self.n as i64 - 1) * (self.s as i64 * self.s as i64 - 1)) / 24
    }

    pub fn tag(&self) -> String {
        format!("({},{})", self.n, self.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_sequences() {
        assert_eq!(gap_sequence(2, 3), vec![1]);
        assert_eq!(gap_sequence(3, 4), vec![1, 2, 5]);
        assert_eq!(gap_sequence(3, 5), vec![1, 2, 4, 7]);
        assert_eq!(gap_sequence(3, 7), vec![1, 2, 4, 5, 8, 11]);
        assert_eq!(gap_sequence(4, 5), vec![1, 2, 3, 6, 7, 11]);
    }

    #[test]
    fn gap_semigroup_duality_below_13() {
        // gaps and the semigroup partition [0, 2g); w_g = 2g-1
        for n in 2..=12u32 {
            for s in (n + 1)..=13u32 {
                if gcd(n, s) != 1 {
                    continue;
                }
                let g = ((n - 1) * (s - 1) / 2) as i64;
                let gaps = gap_sequence(n, s);
                assert_eq!(gaps.len() as i64, g, "({n},{s})");
                if g > 0 {
                    assert_eq!(gaps[0], 1);
                    assert_eq!(*gaps.last().unwrap(), 2 * g - 1, "({n},{s})");
                }
            }
        }
    }

    #[test]
    fn smallest_curve_polynomial() {
        let c = CurveSpec::new(2, 3, LambdaMode::Symbolic).unwrap();
        assert_eq!(c.genus, 1);
        assert_eq!(c.gaps, vec![1]);
        // f = y^2 + x^3 + λ4 x + λ6
        assert_eq!(format!("{}", c.f), "x^3 + y^2 + λ4*x + λ6");
    }

    #[test]
    fn trigonal_curve_polynomial() {
        let c = CurveSpec::new(3, 4, LambdaMode::Symbolic).unwrap();
        assert_eq!(c.genus, 3);
        let f = &c.f;
        assert_eq!(f.coeff(2, 1), c.lambda(2));
        assert_eq!(f.coeff(1, 1), c.lambda(5));
        assert_eq!(f.coeff(2, 0), c.lambda(6));
        assert_eq!(f.coeff(0, 1), c.lambda(8));
        assert_eq!(f.coeff(1, 0), c.lambda(9));
        assert_eq!(f.coeff(0, 0), c.lambda(12));
    }

    #[test]
    fn coprimality_enforced() {
        assert!(CurveSpec::new(2, 4, LambdaMode::Symbolic).is_err());
        assert!(CurveSpec::new(4, 3, LambdaMode::Symbolic).is_err());
    }

    #[test]
    fn genus_six_from_semigroup() {
        let c = CurveSpec::new(4, 5, LambdaMode::Symbolic).unwrap();
        assert_eq!(c.genus, 6);
        assert_eq!(c.gaps, vec![1, 2, 3, 6, 7, 11]);
    }
}
