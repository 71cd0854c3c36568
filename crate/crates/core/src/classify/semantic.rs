use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::{Field, FieldElement};
use crate::par;
use crate::polarize::{defect_at_points, defect_table};
use crate::poly::{FunctionTable, SparsePolynomial, DEFAULT_TABLE_BUDGET};

use super::ClassifyError;

/// Default cap on exhaustive work in the semantic check.
pub const DEFAULT_SEMANTIC_BUDGET: u64 = 1 << 22;
/// Largest space on which `α(au) = a^n α(u)` is checked exhaustively.
pub const HOMOGENEITY_POINT_CAP: u64 = 1 << 16;
/// Number of seeded samples beyond the exhaustive range.
pub const SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticProperty {
    /// `α(a u) = a^n α(u)`.
    Homogeneity,
    /// `Δ^n α(u + w, v) = Δ^n α(u, v) + Δ^n α(w, v)`.
    Additivity,
    /// `Δ^n α(a u, v) = a Δ^n α(u, v)`.
    Scaling,
}

/// Where a defining identity fails. Vectors and scalars are printed field
/// elements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticWitness {
    pub property: SemanticProperty,
    pub scalar: Option<String>,
    /// `[u]` for homogeneity; `[u, w, v_2, ..., v_n]` for additivity;
    /// `[u, v_2, ..., v_n]` for scaling.
    pub args: Vec<Vec<String>>,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CheckMode {
    Exhaustive { checked: u64 },
    Sampled { checked: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SemanticCheck {
    Passed { homogeneity: CheckMode, linearity: CheckMode },
    Failed { witness: SemanticWitness },
    Skipped { reason: String },
}

impl SemanticCheck {
    /// `Some(true)` when passed, `Some(false)` when failed.
    pub fn verdict(&self) -> Option<bool> {
        match self {
            SemanticCheck::Passed { .. } => Some(true),
            SemanticCheck::Failed { .. } => Some(false),
            SemanticCheck::Skipped { .. } => None,
        }
    }
}

fn show(field: &Field, v: &[FieldElement]) -> Vec<String> {
    v.iter().map(|x| field.format(x)).collect()
}

fn pow_u128(q: u64, k: usize) -> u128 {
    (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX)
}

/// Checks the definition of an `n`-application on a whole table: `α(au) =
/// a^n α(u)` for all `a, u`, then additivity and scaling of `Δ^n α` in the
/// first slot for all argument tuples.
pub fn table_napp_check(tab: &FunctionTable, n: usize, budget: u64) -> Result<SemanticCheck, ClassifyError> {
    let homogeneity = match table_homogeneity(tab, n)? {
        Ok(mode) => mode,
        Err(witness) => return Ok(SemanticCheck::Failed { witness }),
    };
    Ok(match table_linearity(tab, n, budget)? {
        Ok(linearity) => SemanticCheck::Passed { homogeneity, linearity },
        Err(witness) => SemanticCheck::Failed { witness },
    })
}

fn table_homogeneity(tab: &FunctionTable, n: usize) -> Result<Result<CheckMode, SemanticWitness>, ClassifyError> {
    let space = tab.space();
    let field = space.field();
    let scalars = field.elements()?;
    let size = space.size();
    let found = par::find_first(scalars.len() * size, |i| {
        let (a, u) = (&scalars[i / size], i % size);
        let lhs = tab.get(space.scale(a, u));
        let rhs = field.mul(&field.pow(a, n as u64), tab.get(u));
        (*lhs != rhs).then(|| SemanticWitness {
            property: SemanticProperty::Homogeneity,
            scalar: Some(field.format(a)),
            args: vec![show(field, &space.point(u))],
            lhs: field.format(lhs),
            rhs: field.format(&rhs),
        })
    });
    Ok(match found {
        Some(w) => Err(w),
        None => Ok(CheckMode::Exhaustive { checked: (scalars.len() * size) as u64 }),
    })
}

fn table_linearity(tab: &FunctionTable, n: usize, budget: u64) -> Result<Result<CheckMode, SemanticWitness>, ClassifyError> {
    let space = tab.space();
    let field = space.field();
    let size = space.size();
    let needed = pow_u128(size as u64, n + 1);
    if needed > budget as u128 {
        return Err(ClassifyError::BudgetExceeded { what: "exhaustive linearity check", needed, budget });
    }
    let delta = defect_table(tab, n, budget)?;
    let rest_count = size.pow(n as u32 - 1);
    let values = delta.values();
    let at = |u: usize, rest: usize| &values[u * rest_count + rest];
    let rest_points = |rest: usize| -> Vec<Vec<String>> {
        delta.args(rest).into_iter().skip(1).map(|x| show(field, &space.point(x))).collect()
    };
    let additive = par::find_first(size * size, |uw| {
        let (u, w) = (uw / size, uw % size);
        let s = space.add(u, w);
        (0..rest_count).find_map(|rest| {
            let rhs = field.add(at(u, rest), at(w, rest));
            (*at(s, rest) != rhs).then(|| {
                let mut args = vec![show(field, &space.point(u)), show(field, &space.point(w))];
                args.extend(rest_points(rest));
                SemanticWitness {
                    property: SemanticProperty::Additivity,
                    scalar: None,
                    args,
                    lhs: field.format(at(s, rest)),
                    rhs: field.format(&rhs),
                }
            })
        })
    });
    if let Some(w) = additive {
        return Ok(Err(w));
    }
    let scalars = field.elements()?;
    let scaling = par::find_first(scalars.len() * size, |i| {
        let (a, u) = (&scalars[i / size], i % size);
        let au = space.scale(a, u);
        (0..rest_count).find_map(|rest| {
            let rhs = field.mul(a, at(u, rest));
            (*at(au, rest) != rhs).then(|| {
                let mut args = vec![show(field, &space.point(u))];
                args.extend(rest_points(rest));
                SemanticWitness {
                    property: SemanticProperty::Scaling,
                    scalar: Some(field.format(a)),
                    args,
                    lhs: field.format(at(au, rest)),
                    rhs: field.format(&rhs),
                }
            })
        })
    });
    Ok(match scaling {
        Some(w) => Err(w),
        None => Ok(CheckMode::Exhaustive { checked: (size * size * rest_count + scalars.len() * size * rest_count) as u64 }),
    })
}

fn random_vector(rng: &mut ChaCha8Rng, q: u64, d: usize) -> Vec<FieldElement> {
    (0..d).map(|_| FieldElement::Finite(rng.gen_range(0..q))).collect()
}

/// Checks the definition of an `n`-application on the mapping of `f`,
/// without looking at its monomials. Homogeneity is exhaustive up to
/// [`HOMOGENEITY_POINT_CAP`] points and linearity of `Δ^n` is exhaustive
/// when `q^{(n+1)d}` fits the budget; beyond that each uses [`SAMPLES`]
/// tuples drawn in order from a ChaCha8 stream seeded with `seed`.
pub fn semantic_napp_check(f: &SparsePolynomial, n: usize, budget: u64, seed: u64) -> Result<SemanticCheck, ClassifyError> {
    let field = f.field();
    let Some(q) = field.order() else {
        return Ok(SemanticCheck::Skipped { reason: "the field is infinite".into() });
    };
    if n == 0 {
        return Err(ClassifyError::Precondition("arity n must be at least 1".into()));
    }
    let d = f.nvars();
    let points = pow_u128(q, d);
    let table = if points <= HOMOGENEITY_POINT_CAP as u128 {
        Some(f.to_table(DEFAULT_TABLE_BUDGET.max(HOMOGENEITY_POINT_CAP))?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let homogeneity = match &table {
        Some(tab) => table_homogeneity(tab, n)?,
        None => {
            let samples: Vec<(FieldElement, Vec<FieldElement>)> = (0..SAMPLES)
                .map(|_| (FieldElement::Finite(rng.gen_range(0..q)), random_vector(&mut rng, q, d)))
                .collect();
            let found = par::find_first(samples.len(), |i| {
                let (a, u) = &samples[i];
                let au: Vec<FieldElement> = u.iter().map(|x| field.mul(a, x)).collect();
                let lhs = f.eval_unchecked(&au);
                let rhs = field.mul(&field.pow(a, n as u64), &f.eval_unchecked(u));
                (lhs != rhs).then(|| SemanticWitness {
                    property: SemanticProperty::Homogeneity,
                    scalar: Some(field.format(a)),
                    args: vec![show(field, u)],
                    lhs: field.format(&lhs),
                    rhs: field.format(&rhs),
                })
            });
            match found {
                Some(w) => Err(w),
                None => Ok(CheckMode::Sampled { checked: SAMPLES as u64, seed }),
            }
        }
    };
    let homogeneity = match homogeneity {
        Ok(mode) => mode,
        Err(w) => return Ok(SemanticCheck::Failed { witness: w }),
    };

    let exhaustive = table.is_some() && pow_u128(q, (n + 1) * d) <= budget as u128;
    let linearity = if exhaustive {
        table_linearity(table.as_ref().unwrap(), n, budget)?
    } else {
        sampled_linearity(f, n, &mut rng, q, seed)
    };
    Ok(match linearity {
        Ok(mode) => SemanticCheck::Passed { homogeneity, linearity: mode },
        Err(w) => SemanticCheck::Failed { witness: w },
    })
}

fn sampled_linearity(
    f: &SparsePolynomial,
    n: usize,
    rng: &mut ChaCha8Rng,
    q: u64,
    seed: u64,
) -> Result<CheckMode, SemanticWitness> {
    let field = f.field();
    let d = f.nvars();
    // tuple layout: a, u, w, v_2..v_n
    let samples: Vec<(FieldElement, Vec<Vec<FieldElement>>)> = (0..SAMPLES)
        .map(|_| {
            let a = FieldElement::Finite(rng.gen_range(0..q));
            (a, (0..n + 1).map(|_| random_vector(rng, q, d)).collect())
        })
        .collect();
    let found = par::find_first(samples.len(), |i| {
        let (a, vecs) = &samples[i];
        let (u, w, rest) = (&vecs[0], &vecs[1], &vecs[2..]);
        let with = |first: Vec<FieldElement>| {
            let mut args = vec![first];
            args.extend(rest.iter().cloned());
            defect_at_points(f, &args)
        };
        let du = with(u.clone());
        let dw = with(w.clone());
        let sum: Vec<FieldElement> = u.iter().zip(w).map(|(x, y)| field.add(x, y)).collect();
        let ds = with(sum);
        let rhs = field.add(&du, &dw);
        if ds != rhs {
            return Some(SemanticWitness {
                property: SemanticProperty::Additivity,
                scalar: None,
                args: vecs.iter().map(|v| show(field, v)).collect(),
                lhs: field.format(&ds),
                rhs: field.format(&rhs),
            });
        }
        let scaled: Vec<FieldElement> = u.iter().map(|x| field.mul(a, x)).collect();
        let da = with(scaled);
        let rhs = field.mul(a, &du);
        (da != rhs).then(|| {
            let mut args = vec![show(field, u)];
            args.extend(rest.iter().map(|v| show(field, v)));
            SemanticWitness {
                property: SemanticProperty::Scaling,
                scalar: Some(field.format(a)),
                args,
                lhs: field.format(&da),
                rhs: field.format(&rhs),
            }
        })
    });
    match found {
        Some(w) => Err(w),
        None => Ok(CheckMode::Sampled { checked: SAMPLES as u64, seed }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn square_over_gf3_passes() {
        let f = Field::finite(3, 1).unwrap();
        let g = parse_poly("x1^2", &f, 1).unwrap();
        let r = semantic_napp_check(&g, 2, DEFAULT_SEMANTIC_BUDGET, 0).unwrap();
        assert!(matches!(
            r,
            SemanticCheck::Passed { homogeneity: CheckMode::Exhaustive { .. }, linearity: CheckMode::Exhaustive { .. } }
        ));
    }

    #[test]
    fn cube_over_gf4_fails_scaling() {
        let f = Field::finite(2, 2).unwrap();
        let g = parse_poly("x1^3", &f, 1).unwrap();
        match semantic_napp_check(&g, 2, DEFAULT_SEMANTIC_BUDGET, 0).unwrap() {
            SemanticCheck::Failed { witness } => assert_eq!(witness.property, SemanticProperty::Homogeneity),
            other => panic!("{other:?}"),
        }
        // Δ^3 of x^3 vanishes in characteristic 2
        let r = semantic_napp_check(&g, 3, DEFAULT_SEMANTIC_BUDGET, 0).unwrap();
        assert_eq!(r.verdict(), Some(true));
    }

    #[test]
    fn sampling_is_seeded() {
        let f = Field::finite(2, 2).unwrap();
        let g = parse_poly(super::super::tests::GF4_FIVE_APP, &f, 5).unwrap();
        let a = semantic_napp_check(&g, 5, DEFAULT_SEMANTIC_BUDGET, 11).unwrap();
        assert_eq!(
            a,
            SemanticCheck::Passed {
                homogeneity: CheckMode::Exhaustive { checked: 4096 },
                linearity: CheckMode::Sampled { checked: SAMPLES as u64, seed: 11 },
            }
        );
        assert_eq!(a, semantic_napp_check(&g, 5, DEFAULT_SEMANTIC_BUDGET, 11).unwrap());
    }

    #[test]
    fn sampled_failure_is_found() {
        let f = Field::finite(2, 2).unwrap();
        let g = parse_poly("x1^3*x2", &f, 2).unwrap();
        let r = semantic_napp_check(&g, 3, 16, 5).unwrap();
        assert_eq!(r.verdict(), Some(false));
    }
}
