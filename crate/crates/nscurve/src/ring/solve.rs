//! Fraction-free linear solving over the polynomial ring.
//!
//! Systems are lists of polynomials required to vanish, linear in a
//! designated subset of generators. Elimination is Bareiss-style: every
//! division along the way is exact, so no rational-function intermediates
//! appear.

use super::{GenSet, WeightedPoly};
use std::sync::Arc;
use thiserror::Error;

/// A system of equations `p = 0`, each linear in the unknown generators.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub equations: Vec<WeightedPoly>,
    /// Generator indices of the unknowns, in solve order.
    pub unknowns: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("inconsistent system: equation `{0}` cannot vanish")]
    Inconsistent(String),
    #[error("underdetermined system: {} unknowns free", free.len())]
    Underdetermined {
        solved: Vec<(usize, WeightedPoly)>,
        free: Vec<usize>,
    },
    #[error("equation `{0}` is not linear in the designated unknowns")]
    NonLinear(String),
    #[error("solution for unknown index {0} is not polynomial")]
    NonPolynomial(usize),
}

/// Solve the system, returning `unknown index -> value` pairs in the order
/// the unknowns were given. The values never contain the unknowns solved
/// for, but in the underdetermined case they may reference free unknowns.
pub fn linear_solve(system: &LinearSystem) -> Result<Vec<(usize, WeightedPoly)>, SolveError> {
    let nu = system.unknowns.len();
    if system.equations.is_empty() {
        if nu == 0 {
            return Ok(Vec::new());
        }
        return Err(SolveError::Underdetermined {
            solved: Vec::new(),
            free: system.unknowns.clone(),
        });
    }
    let gens: Arc<GenSet> = system.equations[0].gens().clone();
    let zero = WeightedPoly::zero(&gens);
    let one = WeightedPoly::one(&gens);

    // rows: [coeff_0, ..., coeff_{nu-1}, rhs] with rhs = -remainder
    let mut rows: Vec<Vec<WeightedPoly>> = Vec::new();
    for eq in &system.equations {
        let (coeffs, rest) = eq
            .decompose_linear(&system.unknowns)
            .ok_or_else(|| SolveError::NonLinear(eq.to_string()))?;
        for c in &coeffs {
            for &u in &system.unknowns {
                if c.contains_gen(u) {
                    return Err(SolveError::NonLinear(eq.to_string()));
                }
            }
        }
        let mut row = coeffs;
        row.push(rest.neg());
        rows.push(row);
    }

    // Fraction-free forward elimination with column pivoting.
    let mut prev_pivot = one.clone();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; nu];
    let mut next_row = 0usize;
    for col in 0..nu {
        // choose the structurally smallest nonzero pivot
        let mut best: Option<(usize, usize)> = None; // (row, term count)
        for r in next_row..rows.len() {
            if !rows[r][col].is_zero() {
                let sz = rows[r][col].num_terms();
                if best.map_or(true, |(_, b)| sz < b) {
                    best = Some((r, sz));
                }
            }
        }
        let Some((prow, _)) = best else { continue };
        rows.swap(next_row, prow);
        let pivot = rows[next_row][col].clone();
        for r in next_row + 1..rows.len() {
            if rows[r].iter().all(|p| p.is_zero()) {
                continue;
            }
            let factor = rows[r][col].clone();
            for k in 0..=nu {
                // Bareiss step: (pivot*a - factor*b) / prev_pivot is exact.
                let num = pivot.mul(&rows[r][k]).sub(&factor.mul(&rows[next_row][k]));
                rows[r][k] = if num.is_zero() {
                    zero.clone()
                } else {
                    num.div_exact(&prev_pivot)
                        .expect("fraction-free elimination produced an inexact division")
                };
            }
        }
        pivot_of_col[col] = Some(next_row);
        prev_pivot = pivot;
        next_row += 1;
    }

    // Inconsistency: a fully-eliminated row with nonzero right side.
    for row in rows.iter().skip(next_row) {
        if row[..nu].iter().all(|p| p.is_zero()) && !row[nu].is_zero() {
            return Err(SolveError::Inconsistent(row[nu].to_string()));
        }
    }

    // Back substitution over pivot columns, right to left.
    let mut values: Vec<Option<WeightedPoly>> = vec![None; nu];
    for col in (0..nu).rev() {
        let Some(r) = pivot_of_col[col] else { continue };
        let mut rhs = rows[r][nu].clone();
        for k in col + 1..nu {
            if rows[r][k].is_zero() {
                continue;
            }
            match &values[k] {
                Some(v) => rhs = rhs.sub(&rows[r][k].mul(v)),
                None => {
                    // free unknown: keep it symbolically
                    let u = WeightedPoly::gen(&gens, system.unknowns[k]);
                    rhs = rhs.sub(&rows[r][k].mul(&u));
                }
            }
        }
        let v = rhs
            .div_exact(&rows[r][col])
            .ok_or(SolveError::NonPolynomial(system.unknowns[col]))?;
        values[col] = Some(v);
    }

    let free: Vec<usize> = (0..nu)
        .filter(|&k| pivot_of_col[k].is_none())
        .map(|k| system.unknowns[k])
        .collect();
    let solved: Vec<(usize, WeightedPoly)> = (0..nu)
        .filter_map(|k| values[k].clone().map(|v| (system.unknowns[k], v)))
        .collect();
    if !free.is_empty() {
        return Err(SolveError::Underdetermined { solved, free });
    }
    Ok(solved)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_poly, ratio, GenSet, WeightedPoly};
    use super::*;

    fn reg34_ring() -> Arc<GenSet> {
        GenSet::new(vec![
            ("λ2".into(), 2),
            ("λ5".into(), 5),
            ("c1".into(), 1),
            ("c2".into(), 2),
            ("c5".into(), 5),
        ])
    }

    #[test]
    fn genus_three_constant_system() {
        // c1 = 0, λ2 + 3c2 = 0, (21λ5 + 4c1λ2^2 + 36c5)/180 = λ5/12
        let g = reg34_ring();
        let eqs = vec![
            parse_poly("c1", &g).unwrap(),
            parse_poly("λ2 + 3*c2", &g).unwrap(),
            parse_poly("(21*λ5 + 4*c1*λ2^2 + 36*c5)/180 - λ5/12", &g).unwrap(),
        ];
        let unknowns = vec![
            g.index_of("c1").unwrap(),
            g.index_of("c2").unwrap(),
            g.index_of("c5").unwrap(),
        ];
        let sol = linear_solve(&LinearSystem { equations: eqs.clone(), unknowns }).unwrap();
        assert_eq!(sol[0].1, WeightedPoly::zero(&g));
        assert_eq!(sol[1].1, parse_poly("-1/3*λ2", &g).unwrap());
        assert_eq!(sol[2].1, parse_poly("-1/6*λ5", &g).unwrap());

        // back-substitution reproduces every equation
        let mut map: Vec<Option<&WeightedPoly>> = vec![None; g.len()];
        for (idx, v) in &sol {
            map[*idx] = Some(v);
        }
        for eq in &eqs {
            assert!(eq.substitute(&map).is_zero());
        }
    }

    #[test]
    fn underdetermined_reports_free_unknowns() {
        let g = reg34_ring();
        let eqs = vec![parse_poly("c1", &g).unwrap()];
        let unknowns = vec![g.index_of("c1").unwrap(), g.index_of("c2").unwrap()];
        match linear_solve(&LinearSystem { equations: eqs, unknowns }) {
            Err(SolveError::Underdetermined { solved, free }) => {
                assert_eq!(solved.len(), 1);
                assert!(solved[0].1.is_zero());
                assert_eq!(free, vec![g.index_of("c2").unwrap()]);
            }
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn inconsistent_system_detected() {
        let g = reg34_ring();
        let eqs = vec![
            parse_poly("c1", &g).unwrap(),
            parse_poly("c1 - λ2", &g).unwrap(),
        ];
        let unknowns = vec![g.index_of("c1").unwrap()];
        assert!(matches!(
            linear_solve(&LinearSystem { equations: eqs, unknowns }),
            Err(SolveError::Inconsistent(_))
        ));
    }

    #[test]
    fn polynomial_pivots() {
        // λ2*c1 + λ5*c2 = λ2*λ5 ; c2 = λ2  =>  c1 = λ5 - λ5*λ2/λ2 ... solve exactly:
        // λ2*c1 = λ2*λ5 - λ5*λ2 = 0 => c1 = 0? Use a system with exact polynomial solution.
        let g = reg34_ring();
        let eqs = vec![
            parse_poly("λ2*c1 + λ5*c2 - λ5*λ2", &g).unwrap(),
            parse_poly("c2 - λ2", &g).unwrap(),
        ];
        let unknowns = vec![g.index_of("c1").unwrap(), g.index_of("c2").unwrap()];
        let sol = linear_solve(&LinearSystem { equations: eqs, unknowns }).unwrap();
        assert!(sol[0].1.is_zero());
        assert_eq!(sol[1].1, parse_poly("λ2", &g).unwrap());
    }

    #[test]
    fn rational_scale_check() {
        assert_eq!(ratio(21, 180) - ratio(1, 12), ratio(6, 180));
    }
}
