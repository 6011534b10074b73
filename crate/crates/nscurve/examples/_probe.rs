// Full correction solve: candidate term-shifts on the (3,7) relations,
// sensitivities against every ladder residual order, exact linear solve.
use nscurve::curve::{monomials_up_to, CurveSpec, LambdaMode};
use nscurve::regularize::{bilinear_lhs, CurvePipeline};
use nscurve::ring::{rat, Rat, WeightedPoly};
use nscurve::wp::{equations_from_text, Reducer, RelationSet, WpMonomial, WpPoly};
use num::traits::{One, Zero};
use std::collections::BTreeMap;

fn ladder_residuals(pipe: &CurvePipeline, rel: &RelationSet) -> Vec<(i64, WpPoly)> {
    let curve = &pipe.curve;
    let g = curve.genus as i64;
    let mut red = Reducer::new(rel);
    red.budget = 500_000;
    let lhs = bilinear_lhs(pipe, 2 * g).unwrap();
    let monomials = monomials_up_to(curve, 2 * g);
    let series: Vec<_> = monomials
        .iter()
        .map(|&(a, b)| pipe.param.x.pow(a as u32).mul(&pipe.param.y.pow(b as u32)).truncate_to(1))
        .collect();
    let mut a: Vec<Option<WpPoly>> = vec![None; monomials.len()];
    a[0] = Some(WpPoly::constant(
        &curve.gens,
        WeightedPoly::one(&curve.gens),
    ));
    let mut out = Vec::new();
    for k in (1..=2 * g).rev() {
        let mut eq = lhs.coeff(-k).unwrap();
        let mut unsolved = None;
        for (m, s) in series.iter().enumerate() {
            let sm = s.coeff(-k).unwrap();
            if sm.is_zero() {
                continue;
            }
            match &a[m] {
                Some(am) => eq = eq.sub(&am.scale_poly(&sm)),
                None => unsolved = Some(m),
            }
        }
        if let Some(m) = unsolved {
            let sm = series[m].coeff(-k).unwrap().as_constant().unwrap();
            a[m] = Some(red.reduce(&eq.scale(&(Rat::one() / sm))).unwrap());
        } else {
            out.push((k, red.reduce(&eq).unwrap()));
        }
    }
    out
}

fn main() {
    let curve = CurveSpec::new(3, 7, LambdaMode::Symbolic).unwrap();
    let g = curve.genus as i64;
    let pipe = CurvePipeline::build(curve, 2 * g + 4).unwrap();
    let base_text = std::fs::read_to_string("crates/nscurve/fixtures/relations_3_7.txt").unwrap();
    let load = |text: &str| {
        RelationSet::from_equations((3, 7), &pipe.curve.gens, equations_from_text(text, &pipe.curve.gens))
    };
    let cvals = [("c1", "0"), ("c2", "-2/3*λ2"), ("c4", "-2/7*λ2^2"), ("c5", "-1/2*λ5"), ("c8", "-1/3*λ8"), ("c11", "-1/6*λ11")];
    let subst = |p: &WpPoly| -> WpPoly {
        let mut map: Vec<Option<WeightedPoly>> = vec![None; pipe.curve.gens.len()];
        for (name, val) in &cvals {
            let idx = pipe.curve.gens.index_of(name).unwrap();
            map[idx] = Some(nscurve::ring::parse_poly(val, &pipe.curve.gens).unwrap());
        }
        let mr: Vec<Option<&WeightedPoly>> = map.iter().map(|o| o.as_ref()).collect();
        p.substitute_coeffs(&mr)
    };
    let base: Vec<(i64, WpPoly)> = ladder_residuals(&pipe, &load(&base_text))
        .into_iter()
        .map(|(k, r)| (k, subst(&r)))
        .collect();

    // candidate shifts: even ℘λ-terms on rules 1,2,3,4,6,7,8,9 (0-based
    // non-comment line index, term text)
    let even_terms: &[(usize, &[&str])] = &[
        (0, &["λ2*℘[1,1]", "℘[1,4]", "℘[2,2]", "℘[1,1]^2"]),
        (1, &["λ2*℘[1,2]", "℘[1,4]", "℘[1,1]*℘[1,2]", "λ5"]),
        (2, &["λ2*℘[2,2]", "λ2*℘[1,1]^2", "℘[1,5]", "℘[2,4]", "λ6", "℘[1,2]^2", "℘[1,1]*℘[2,2]"]),
        (3, &["℘[4,4]", "λ2*℘[2,4]", "λ2*℘[1,5]", "℘[1,2]*℘[1,4]", "℘[1,1]*℘[2,4]", "℘[1,1]*℘[1,5]", "λ2^2*℘[1,1]^2", "λ2*℘[1,1]^3", "λ6*℘[1,1]", "λ2*λ6", "λ8", "λ5*℘[1,2]", "℘[1,1]^4", "℘[1,1]*℘[1,2]^2"]),
        (5, &["λ2*℘[1,1,2]", "℘[1,1,4]", "℘[1,1]*℘[1,1,2]", "℘[1,2]*℘[1,1,1]"]),
        (6, &["λ2*℘[1,1]^2", "℘[1,5]", "℘[2,4]", "℘[1,2]^2", "℘[1,1]*℘[2,2]", "℘[1,1]^3"]),
        (7, &["λ2*℘[1,1]*℘[1,2]", "λ2*℘[1,4]", "λ5*℘[1,1]", "℘[2,5]", "℘[1,1]^2*℘[1,2]", "℘[1,1]*℘[1,4]", "℘[1,2]*℘[2,2]"]),
        (8, &["℘[4,4]", "λ2*℘[1,5]", "λ2*℘[2,4]", "λ2*℘[1,1]*℘[2,2]", "λ2*℘[1,2]^2", "λ6*℘[1,1]", "λ5*℘[1,2]", "λ8", "λ2^2*℘[1,1]^2", "℘[1,1]*℘[1,5]", "℘[1,1]*℘[2,4]", "℘[1,2]*℘[1,4]", "℘[2,2]^2", "℘[1,1]^2*℘[2,2]", "℘[1,1]*℘[1,2]^2", "℘[1,1]^4"]),
    ];
    let mut cand_list: Vec<(usize, String)> = Vec::new();
    for (li, terms) in even_terms {
        for t in *terms {
            cand_list.push((*li, t.to_string()));
        }
    }
    println!("{} candidates", cand_list.len());

    // rows: (order k, ℘-monomial, λ-exponent) -> equation over q's
    let mut rows: BTreeMap<(i64, WpMonomial, Vec<u16>), BTreeMap<usize, Rat>> = BTreeMap::new();
    let mut add_poly = |q: usize, k: i64, p: &WpPoly, rows: &mut BTreeMap<(i64, WpMonomial, Vec<u16>), BTreeMap<usize, Rat>>| {
        for (m, coeff) in &p.terms {
            for (le, cv) in coeff.sorted_terms() {
                rows.entry((k, m.clone(), le.clone()))
                    .or_default()
                    .insert(q, cv.clone());
            }
        }
    };
    const RHS: usize = usize::MAX;
    for (k, r) in &base {
        add_poly(RHS, *k, r, &mut rows);
    }
    for (ci, (li, term)) in cand_list.iter().enumerate() {
        let mut lines: Vec<String> = Vec::new();
        let mut noncomment = 0usize;
        for l in base_text.lines() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                lines.push(l.to_string());
                continue;
            }
            if noncomment == *li {
                lines.push(format!("{l} + {term}"));
            } else {
                lines.push(l.to_string());
            }
            noncomment += 1;
        }
        let res = ladder_residuals(&pipe, &load(&lines.join("\n")));
        for (k, r) in res {
            let d = subst(&r).sub(&base.iter().find(|(kk, _)| *kk == k).unwrap().1);
            add_poly(ci, k, &d, &mut rows);
        }
    }
    // solve Σ q_c Δ_c + base = 0  (columns: candidates, then RHS)
    let ncols = cand_list.len();
    let mut sys: Vec<BTreeMap<usize, Rat>> = Vec::new();
    for (_, row) in rows {
        let mut r2: BTreeMap<usize, Rat> = BTreeMap::new();
        for (c, v) in row {
            r2.insert(if c == RHS { ncols } else { c }, v);
        }
        sys.push(r2);
    }
    // gaussian elimination
    let mut pivots: Vec<(usize, BTreeMap<usize, Rat>)> = Vec::new();
    for col in 0..ncols {
        let mut best: Option<(usize, usize)> = None;
        for (ri, row) in sys.iter().enumerate() {
            if let Some((&lead, _)) = row.iter().next() {
                if lead == col {
                    let sz = row.len();
                    if best.map_or(true, |(_, b)| sz < b) {
                        best = Some((ri, sz));
                    }
                }
            }
        }
        let Some((ri, _)) = best else { continue };
        let prow = sys.swap_remove(ri);
        let pval = prow[&col].clone();
        for row in sys.iter_mut() {
            if let Some(v) = row.get(&col).cloned() {
                let f = &v / &pval;
                for (c, pv) in &prow {
                    let delta = pv * &f;
                    let e = row.entry(*c).or_insert_with(Rat::zero);
                    *e = &*e - &delta;
                    if e.is_zero() {
                        row.remove(c);
                    }
                }
            }
        }
        sys.retain(|r| !r.is_empty());
        pivots.push((col, prow));
    }
    let inconsistent = sys.iter().any(|r| r.len() == 1 && r.contains_key(&ncols));
    println!("inconsistent: {inconsistent}; leftover rows: {}", sys.len());
    // back substitute (free = 0)
    let mut vals: BTreeMap<usize, Rat> = BTreeMap::new();
    for (col, row) in pivots.iter().rev() {
        let mut acc = Rat::zero();
        for (c, v) in row.iter() {
            if c == col {
                continue;
            }
            if *c == ncols {
                acc = &acc + v;
            } else if let Some(k) = vals.get(c) {
                acc = &acc + &(v * k);
            }
        }
        vals.insert(*col, -acc / &row[col]);
    }
    for (ci, (li, term)) in cand_list.iter().enumerate() {
        if let Some(v) = vals.get(&ci) {
            if !v.is_zero() {
                println!("correction: rule line {} += ({}) * {}", li + 1, nscurve::ring::rat_to_string(v), term);
            }
        }
    }
    let _ = rat(0);
}
