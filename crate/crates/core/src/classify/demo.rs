use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::field::{Characteristic, Field, FieldElement};
use crate::forms::{canonical_indices, defect_as_form, is_characteristic, realize, DefectForm, SymmetricForm};
use crate::par;
use crate::polarize::defect_table;
use crate::poly::{FunctionTable, MultiExponent, SparsePolynomial, Space};

use super::{classify, table_napp_check, ClassifyError, ClassifyOptions};

/// Outcome of [`quadratic_correspondence_demo`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticDemoReport {
    pub field: String,
    pub d: usize,
    pub characteristic_two: bool,
    /// Symmetric bilinear forms, or alternating ones in characteristic 2.
    pub forms: u64,
    /// Distinct polynomials produced by realizing every form.
    pub realized_distinct: u64,
    pub injective: bool,
    /// Every realized polynomial is a 2-application whose second defect is
    /// the form it came from.
    pub round_trip: bool,
    /// Maps `F^d -> F` vanishing at 0, when all of them were enumerated.
    pub maps_enumerated: Option<u64>,
    /// Those among them satisfying the definition of a 2-application.
    pub applications: Option<u64>,
    /// Every 2-application is a realized form (characteristic not 2).
    pub surjective: Option<bool>,
    /// 2-applications with vanishing second defect (characteristic 2).
    pub kernel: Option<u64>,
    /// `applications = forms * kernel` (characteristic 2).
    pub fibres_match: Option<bool>,
    /// Two distinct reduced polynomials with the same second defect
    /// (characteristic 2).
    pub non_uniqueness: Option<(String, String)>,
}

fn all_assignments(field: &Field, slots: usize, budget: u64, what: &'static str) -> Result<Vec<Vec<FieldElement>>, ClassifyError> {
    let elems = field.elements()?;
    let q = elems.len() as u128;
    let needed = q.checked_pow(slots as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(ClassifyError::BudgetExceeded { what, needed, budget });
    }
    Ok(par::map_range(needed as usize, |mut i| {
        let mut v = vec![field.zero(); slots];
        for slot in v.iter_mut().rev() {
            *slot = elems[i % elems.len()].clone();
            i /= elems.len();
        }
        v
    }))
}

/// Quadratic forms as 2-applications on `F^d`. Outside characteristic 2,
/// realizing symmetric bilinear forms is checked to be a bijection onto the
/// 2-applications; in characteristic 2, realizing alternating forms hits
/// every one of them and the additive 2-applications form the kernel.
pub fn quadratic_correspondence_demo(field: &Field, d: usize, budget: u64) -> Result<QuadraticDemoReport, ClassifyError> {
    let Some(q) = field.order() else {
        return Err(ClassifyError::Precondition("the demo needs a finite field".into()));
    };
    let char_two = field.characteristic() == Characteristic::Prime(2);
    let idx = canonical_indices(2, d);
    let free: Vec<usize> = (0..idx.len()).filter(|&k| !(char_two && idx[k][0] == idx[k][1])).collect();
    let assignments = all_assignments(field, free.len(), budget, "form enumeration")?;
    let forms: Vec<SymmetricForm> = assignments
        .iter()
        .map(|vals| {
            let mut entries: Vec<(Vec<usize>, FieldElement)> = idx.iter().map(|i| (i.clone(), field.zero())).collect();
            for (slot, v) in free.iter().zip(vals) {
                entries[*slot].1 = v.clone();
            }
            SymmetricForm::from_entries(field, 2, d, entries)
        })
        .collect::<Result<_, _>>()?;

    let opts = ClassifyOptions { budget, seed: 0, semantic: false };
    let realized: Vec<(SparsePolynomial, bool)> = par::map_slice(&forms, |phi| -> Result<_, ClassifyError> {
        let alpha = realize(phi)?;
        let tab = alpha.to_table(budget)?;
        let back = matches!(defect_as_form(&tab, 2, budget, 0)?, DefectForm::Linear { form, .. } if form == *phi);
        let is_app = alpha.is_zero() || classify(&alpha, 2, opts)?.is_n_application;
        Ok((alpha, back && is_app))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let round_trip = realized.iter().all(|(_, ok)| *ok);
    let image: HashSet<Vec<(MultiExponent, FieldElement)>> = realized.iter().map(|(a, _)| key(a)).collect();

    let mut report = QuadraticDemoReport {
        field: field.to_string(),
        d,
        characteristic_two: char_two,
        forms: forms.len() as u64,
        realized_distinct: image.len() as u64,
        injective: image.len() == forms.len(),
        round_trip,
        maps_enumerated: None,
        applications: None,
        surjective: None,
        kernel: None,
        fibres_match: None,
        non_uniqueness: None,
    };

    let space = Space::new(field, d, budget)?;
    let maps = (q as u128).checked_pow(space.size() as u32 - 1).unwrap_or(u128::MAX);
    if maps <= budget as u128 {
        let verdicts = par::map_range(maps as usize, |i| -> Result<Option<(SparsePolynomial, bool)>, ClassifyError> {
            let mut values = vec![field.zero(); space.size()];
            let mut rest = i as u64;
            for slot in values.iter_mut().skip(1).rev() {
                *slot = FieldElement::Finite(rest % q);
                rest /= q;
            }
            let tab = FunctionTable::new(space.clone(), values)?;
            if table_napp_check(&tab, 2, budget)?.verdict() != Some(true) {
                return Ok(None);
            }
            let additive = defect_table(&tab, 2, budget)?.is_zero();
            Ok(Some((tab.interpolate(), additive)))
        });
        let apps: Vec<(SparsePolynomial, bool)> =
            verdicts.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
        report.maps_enumerated = Some(maps as u64);
        report.applications = Some(apps.len() as u64);
        if char_two {
            let kernel = apps.iter().filter(|(_, additive)| *additive).count() as u64;
            report.kernel = Some(kernel);
            report.fibres_match = Some(apps.len() as u64 == kernel * forms.len() as u64);
        } else {
            report.surjective = Some(apps.iter().all(|(a, _)| image.contains(&key(a))) && apps.len() == image.len());
        }
    }

    if char_two {
        let phi = forms.iter().find(|f| !f.is_zero()).unwrap_or(&forms[0]);
        let alpha = realize(phi)?;
        let square = SparsePolynomial::monomial(field, MultiExponent::unit(d, 0, 2), field.one());
        let alpha_prime = (&alpha + &square).reduce();
        let same = defect_table(&alpha.to_table(budget)?, 2, budget)? == defect_table(&alpha_prime.to_table(budget)?, 2, budget)?;
        if same && alpha != alpha_prime {
            report.non_uniqueness = Some((alpha.to_string(), alpha_prime.to_string()));
        }
    }
    Ok(report)
}

fn key(f: &SparsePolynomial) -> Vec<(MultiExponent, FieldElement)> {
    f.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// Outcome of [`correspondence_dimension_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub field: String,
    pub d: usize,
    pub n: usize,
    /// Monomials in `tpl(V, n) ∩ dpl(V, n)`.
    pub upper_monomials: u64,
    /// Monomials in `pl(V, n-1) ∩ dpl(V, n)`.
    pub lower_monomials: u64,
    /// Basis values of a symmetric `n`-linear form.
    pub form_unknowns: u64,
    /// Rank of the linear constraints `φ(p*u, e_rest) = 0`.
    pub constraint_rank: u64,
    /// Dimension of the characteristic symmetric `n`-linear forms.
    pub form_dimension: u64,
    /// Number of characteristic forms found by enumeration, when feasible.
    pub enumerated_forms: Option<u64>,
    pub equal: bool,
}

/// Compares the dimension of the characteristic symmetric `n`-linear forms
/// (by rank of the characteristic constraints) with the number of monomials
/// in `tpl ∩ dpl` minus those in `pl_{n-1} ∩ dpl`.
pub fn correspondence_dimension_check(field: &Field, d: usize, n: usize, budget: u64) -> Result<DimensionReport, ClassifyError> {
    if n == 0 || d == 0 {
        return Err(ClassifyError::Precondition("needs n >= 1 and d >= 1".into()));
    }
    // reduced exponents for finite fields; degree at most n over Q
    let top = field.order().map_or(n as u64, |q| q - 1);
    let count = (top as u128 + 1).checked_pow(d as u32).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(ClassifyError::BudgetExceeded { what: "monomial enumeration", needed: count, budget });
    }
    let (mut upper, mut lower) = (0u64, 0u64);
    for i in 1..count as u64 {
        let mut rest = i;
        let exps: Vec<u32> = (0..d)
            .map(|_| {
                let e = rest % (top + 1);
                rest /= top + 1;
                e as u32
            })
            .collect();
        let mono = SparsePolynomial::monomial(field, MultiExponent::new(exps), field.one());
        let dpl = mono.dpl_member(n as u64)?;
        if dpl && mono.tpl_member(n as u64)? {
            upper += 1;
        }
        if dpl && mono.pl_member(n as u64 - 1)? {
            lower += 1;
        }
    }

    let idx = canonical_indices(n, d);
    let unknowns = idx.len();
    let rank = match field.characteristic() {
        Characteristic::Prime(p) if (p as usize) <= n => {
            let p = p as usize;
            let space = Space::new(field, d, budget)?;
            let rests = canonical_indices(n - p, d);
            let work = space.size() as u128 * rests.len() as u128 * (d as u128).pow(p as u32);
            if work > budget as u128 {
                return Err(ClassifyError::BudgetExceeded { what: "constraint matrix", needed: work, budget });
            }
            let rows: Vec<Vec<FieldElement>> = (0..space.size())
                .flat_map(|u| rests.iter().map(move |r| (u, r)))
                .map(|(u, rest)| constraint_row(field, &space.point(u), rest, p, &idx))
                .collect();
            field.rank(&rows)
        }
        _ => 0,
    };
    let form_dimension = (unknowns - rank) as u64;

    let enumerated_forms = match field.order() {
        Some(q) if (q as u128).checked_pow(unknowns as u32).is_some_and(|c| c <= 1 << 16) => {
            let assignments = all_assignments(field, unknowns, budget, "form enumeration")?;
            let hits = par::map_slice(&assignments, |vals| -> Result<bool, ClassifyError> {
                let phi = SymmetricForm::from_entries(field, n, d, idx.iter().cloned().zip(vals.iter().cloned()))?;
                Ok(is_characteristic(&phi, budget)?.is_none())
            });
            let mut k = 0u64;
            for h in hits {
                k += h? as u64;
            }
            Some(k)
        }
        _ => None,
    };
    let by_count = enumerated_forms.is_none_or(|k| Some(k as u128) == field.order().map(|q| (q as u128).pow(form_dimension as u32)));
    Ok(DimensionReport {
        field: field.to_string(),
        d,
        n,
        upper_monomials: upper,
        lower_monomials: lower,
        form_unknowns: unknowns as u64,
        constraint_rank: rank as u64,
        form_dimension,
        enumerated_forms,
        equal: by_count && upper - lower == form_dimension,
    })
}

/// Coefficients of `φ(p*u, e_rest)` in the basis values of `φ`.
fn constraint_row(field: &Field, u: &[FieldElement], rest: &[usize], p: usize, idx: &[Vec<usize>]) -> Vec<FieldElement> {
    let d = u.len();
    let mut row = vec![field.zero(); idx.len()];
    let mut js = vec![0usize; p];
    loop {
        let coef = js.iter().fold(field.one(), |acc, &j| field.mul(&acc, &u[j]));
        if !coef.is_zero() {
            let mut key: Vec<usize> = js.iter().map(|j| j + 1).chain(rest.iter().copied()).collect();
            key.sort_unstable();
            let k = idx.binary_search(&key).expect("canonical index");
            row[k] = field.add(&row[k], &coef);
        }
        let Some(slot) = js.iter().rposition(|&j| j + 1 < d) else { break };
        js[slot] += 1;
        js[slot + 1..].iter_mut().for_each(|j| *j = 0);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUDGET: u64 = 1 << 22;

    #[test]
    fn gf3_plane_bijection() {
        let f = Field::finite(3, 1).unwrap();
        let r = quadratic_correspondence_demo(&f, 2, BUDGET).unwrap();
        assert_eq!(r.forms, 27);
        assert!(r.injective && r.round_trip);
        assert_eq!(r.applications, Some(27));
        assert_eq!(r.surjective, Some(true));
    }

    #[test]
    fn gf2_plane_alternating() {
        let f = Field::finite(2, 1).unwrap();
        let r = quadratic_correspondence_demo(&f, 2, BUDGET).unwrap();
        assert_eq!(r.forms, 2);
        assert!(r.round_trip);
        // linear maps on GF(2)^2
        assert_eq!(r.kernel, Some(4));
        assert_eq!(r.fibres_match, Some(true));
        assert_eq!(r.non_uniqueness, Some(("x1*x2".into(), "x1 + x1*x2".into())));
    }

    #[test]
    fn dimension_examples() {
        let r = correspondence_dimension_check(&Field::finite(2, 1).unwrap(), 2, 2, BUDGET).unwrap();
        assert_eq!((r.upper_monomials - r.lower_monomials, r.form_dimension), (1, 1));
        assert!(r.equal);
        let r = correspondence_dimension_check(&Field::rational(), 2, 2, BUDGET).unwrap();
        assert_eq!((r.upper_monomials, r.lower_monomials, r.form_dimension), (3, 0, 3));
        assert!(r.equal);
        let r = correspondence_dimension_check(&Field::finite(3, 1).unwrap(), 1, 3, BUDGET).unwrap();
        assert_eq!(r.form_dimension, 0);
        assert!(r.equal);
    }

    #[test]
    fn dimension_sweep() {
        for (p, e) in [(2, 1), (2, 2), (3, 1), (5, 1)] {
            let f = Field::finite(p, e).unwrap();
            for d in 1..=3 {
                for n in 1..=4 {
                    let r = correspondence_dimension_check(&f, d, n, BUDGET).unwrap();
                    assert!(r.equal, "{r:?}");
                }
            }
        }
    }
}
