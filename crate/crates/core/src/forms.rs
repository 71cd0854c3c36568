//! Symmetric `n`-linear forms on `F^d`, stored by their values on
//! non-decreasing basis index tuples, and their realization as polynomials.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Characteristic, Field, FieldElement, FieldError};
use crate::par;
use crate::polarize::{defect_at, PolarizeError};
use crate::poly::{FunctionTable, MultiExponent, PolyError, SparsePolynomial};

/// Number of random tuples used when exhaustive checks exceed the budget.
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Polarize(#[from] PolarizeError),
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("expected vectors of dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("index {index:?} is out of range for dimension {d}")]
    IndexOutOfRange { index: Vec<usize>, d: usize },
    #[error("index {0:?} given twice")]
    DuplicateIndex(Vec<usize>),
    #[error("no value for index {0:?}")]
    MissingIndex(Vec<usize>),
    #[error("arity {n} is not below the characteristic {chr}")]
    ArityNotBelowCharacteristic { n: usize, chr: Characteristic },
    #[error("{what} needs {needed} evaluations, over the budget of {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u64 },
    #[error("arity must be at least 1")]
    ZeroArity,
}

/// Non-decreasing tuples `1 <= i_1 <= ... <= i_n <= d`, in lexicographic order.
pub fn canonical_indices(n: usize, d: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, d: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..=d {
            cur.push(i);
            rec(i, n, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

/// A symmetric `n`-linear form `(F^d)^n -> F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricForm {
    field: Field,
    n: usize,
    d: usize,
    values: BTreeMap<Vec<usize>, FieldElement>,
}

impl SymmetricForm {
    /// The form whose value on `(e_{i_1}, ..., e_{i_n})` is `f(i)` for each
    /// canonical `i`.
    pub fn from_fn(field: &Field, n: usize, d: usize, f: impl Fn(&[usize]) -> FieldElement) -> Self {
        let values = canonical_indices(n, d)
            .into_iter()
            .map(|idx| {
                let v = f(&idx);
                (idx, v)
            })
            .collect();
        SymmetricForm { field: field.clone(), n, d, values }
    }

    pub fn zero(field: &Field, n: usize, d: usize) -> Self {
        Self::from_fn(field, n, d, |_| field.zero())
    }

    /// From explicit entries; each index is sorted, and every canonical index
    /// must occur exactly once.
    pub fn from_entries(
        field: &Field,
        n: usize,
        d: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, FieldElement)>,
    ) -> Result<Self, FormsError> {
        let mut values = BTreeMap::new();
        for (mut idx, v) in entries {
            if idx.len() != n {
                return Err(FormsError::Arity { expected: n, got: idx.len() });
            }
            if idx.iter().any(|&i| i == 0 || i > d) {
                return Err(FormsError::IndexOutOfRange { index: idx, d });
            }
            if !field.contains(&v) {
                return Err(FieldError::ForeignElement { element: format!("{v:?}"), field: field.to_string() }.into());
            }
            idx.sort_unstable();
            if values.insert(idx.clone(), v).is_some() {
                return Err(FormsError::DuplicateIndex(idx));
            }
        }
        if let Some(missing) = canonical_indices(n, d).into_iter().find(|i| !values.contains_key(i)) {
            return Err(FormsError::MissingIndex(missing));
        }
        Ok(SymmetricForm { field: field.clone(), n, d, values })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Entries in lexicographic order of canonical index.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &FieldElement)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(FieldElement::is_zero)
    }

    /// Value on basis vectors `e_{i_1}, ..., e_{i_n}` (one-based, any order).
    pub fn get(&self, idx: &[usize]) -> &FieldElement {
        let mut key = idx.to_vec();
        key.sort_unstable();
        &self.values[&key]
    }

    /// Value at `(t_1 * e_1, ..., t_d * e_d)`.
    fn at_multiplicities(&self, t: &[u32]) -> &FieldElement {
        let idx: Vec<usize> = t.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i + 1, k as usize)).collect();
        &self.values[&idx]
    }

    pub fn to_document(&self) -> FormDocument {
        let values = self
            .values
            .iter()
            .map(|(idx, v)| FormEntry {
                idx: idx.clone(),
                val: match v {
                    FieldElement::Finite(k) => JsonScalar::Int(*k),
                    r => JsonScalar::Text(self.field.format(r)),
                },
            })
            .collect();
        FormDocument { n: self.n, d: self.d, field: self.field.to_string(), values }
    }
}

/// Serialized form: `{n, d, field, values: [{idx, val}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormDocument {
    pub n: usize,
    pub d: usize,
    pub field: String,
    pub values: Vec<FormEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormEntry {
    pub idx: Vec<usize>,
    pub val: JsonScalar,
}

/// A field value in JSON: a number for finite fields, a string for `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonScalar {
    Int(u64),
    Text(String),
}

impl JsonScalar {
    pub fn to_element(&self, field: &Field) -> Result<FieldElement, FieldError> {
        match self {
            JsonScalar::Int(k) => field.parse_element(&k.to_string()),
            JsonScalar::Text(s) => field.parse_element(s),
        }
    }
}

impl FormDocument {
    pub fn to_form(&self) -> Result<SymmetricForm, FormsError> {
        let field: Field = self.field.parse()?;
        let entries = self
            .values
            .iter()
            .map(|e| Ok((e.idx.clone(), e.val.to_element(&field)?)))
            .collect::<Result<Vec<_>, FieldError>>()?;
        SymmetricForm::from_entries(&field, self.n, self.d, entries)
    }
}

fn check_args(phi: &SymmetricForm, args: &[Vec<FieldElement>]) -> Result<(), FormsError> {
    if args.len() != phi.n {
        return Err(FormsError::Arity { expected: phi.n, got: args.len() });
    }
    if let Some(bad) = args.iter().find(|a| a.len() != phi.d) {
        return Err(FormsError::Dimension { expected: phi.d, got: bad.len() });
    }
    for a in args.iter().flatten() {
        if !phi.field.contains(a) {
            return Err(FieldError::ForeignElement { element: format!("{a:?}"), field: phi.field.to_string() }.into());
        }
    }
    Ok(())
}

/// `φ(v_1, ..., v_n)` by full multilinear expansion over the basis.
pub fn form_eval(phi: &SymmetricForm, args: &[Vec<FieldElement>]) -> Result<FieldElement, FormsError> {
    check_args(phi, args)?;
    Ok(eval_unchecked(phi, args))
}

fn eval_unchecked(phi: &SymmetricForm, args: &[Vec<FieldElement>]) -> FieldElement {
    fn rec(
        phi: &SymmetricForm,
        args: &[Vec<FieldElement>],
        k: usize,
        coef: FieldElement,
        idx: &mut Vec<usize>,
        acc: &mut FieldElement,
    ) {
        let field = &phi.field;
        if k == args.len() {
            let v = phi.get(idx);
            if !v.is_zero() {
                *acc = field.add(acc, &field.mul(&coef, v));
            }
            return;
        }
        for (j, a) in args[k].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            idx.push(j + 1);
            rec(phi, args, k + 1, field.mul(&coef, a), idx, acc);
            idx.pop();
        }
    }
    let mut acc = phi.field.zero();
    rec(phi, args, 0, phi.field.one(), &mut Vec::with_capacity(phi.n), &mut acc);
    acc
}

fn basis_vector(field: &Field, d: usize, i: usize) -> Vec<FieldElement> {
    (0..d).map(|j| if j + 1 == i { field.one() } else { field.zero() }).collect()
}

/// A point where a form fails to be characteristic:
/// `φ(p*u, e_{others}) != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicWitness {
    pub u: Vec<FieldElement>,
    /// One-based basis indices of the free arguments.
    pub others: Vec<usize>,
    pub value: FieldElement,
}

/// `None` when `φ` is characteristic, otherwise the first failing `(u, v)`
/// with `u` in point order and the free arguments over basis tuples.
pub fn is_characteristic(phi: &SymmetricForm, budget: u64) -> Result<Option<CharacteristicWitness>, FormsError> {
    let p = match phi.field.characteristic() {
        Characteristic::Infinite => return Ok(None),
        Characteristic::Prime(p) if (phi.n as u64) < p => return Ok(None),
        Characteristic::Prime(p) => p as usize,
    };
    let space = crate::poly::Space::new(&phi.field, phi.d, budget)?;
    let rests = canonical_indices(phi.n - p, phi.d);
    let needed = space.size() as u128 * rests.len() as u128;
    if needed > budget as u128 {
        return Err(FormsError::BudgetExceeded { what: "characteristic check", needed, budget });
    }
    Ok(par::find_first(space.size(), |ui| {
        let u = space.point(ui);
        rests.iter().find_map(|rest| {
            let mut args = vec![u.clone(); p];
            args.extend(rest.iter().map(|&i| basis_vector(&phi.field, phi.d, i)));
            let value = eval_unchecked(phi, &args);
            (!value.is_zero()).then(|| CharacteristicWitness { u: u.clone(), others: rest.clone(), value })
        })
    }))
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// `x = p^a * m` with `p` not dividing `m`.
fn split_p(x: &BigUint, p: u64) -> (u32, BigUint) {
    let p = BigUint::from(p);
    let mut m = x.clone();
    let mut a = 0;
    while !m.is_zero() && (&m % &p).is_zero() {
        m /= &p;
        a += 1;
    }
    (a, m)
}

/// Exponent vectors `t` with `Σ t_i = n` and every `t_i < bound`, in
/// lexicographic order.
fn bounded_compositions(n: u32, d: usize, bound: Option<u32>) -> Vec<Vec<u32>> {
    fn rec(rest: u32, d: usize, bound: Option<u32>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == d {
            if bound.is_none_or(|b| rest < b) {
                cur.push(rest);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        let top = bound.map_or(rest, |b| rest.min(b - 1));
        for t in 0..=top {
            cur.push(t);
            rec(rest - t, d, bound, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(n, d, bound, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// The homogeneous polynomial `α(Σ a_i e_i) = Σ_t a^t / t! * φ(t*e)` over
/// `Σ t = n`, with every `t_i` below the characteristic. The coefficient
/// `1/t!` is the multinomial `n!/t!` formally divided by `n!`.
pub fn realize(phi: &SymmetricForm) -> Result<SparsePolynomial, FormsError> {
    if phi.n == 0 {
        return Err(FormsError::ZeroArity);
    }
    let field = &phi.field;
    let chr = field.characteristic();
    let bound = chr.prime().map(|p| p.min(u32::MAX as u64) as u32);
    let n_fact = factorial(phi.n as u64);
    let mut out = SparsePolynomial::zero(field, phi.d);
    for t in bounded_compositions(phi.n as u32, phi.d, bound) {
        let value = phi.at_multiplicities(&t);
        if value.is_zero() {
            continue;
        }
        let denom = t.iter().fold(BigUint::one(), |acc, &k| acc * factorial(k as u64));
        let multinomial = &n_fact / &denom;
        let coef = match chr {
            Characteristic::Infinite => field.div(&field.from_biguint(&multinomial), &field.from_biguint(&n_fact))?,
            Characteristic::Prime(p) => {
                let (a, m) = split_p(&multinomial, p);
                let (b, m_prime) = split_p(&n_fact, p);
                assert_eq!(a, b, "p-adic valuations of n!/t! and n! differ for t = {t:?}");
                field.div(&field.from_biguint(&m), &field.from_biguint(&m_prime))?
            }
        };
        out.add_term(MultiExponent::new(t), field.mul(&coef, value));
    }
    Ok(out)
}

/// `u ↦ φ(u, ..., u) / n!` expanded symbolically. Needs `n` below the
/// characteristic.
pub fn recover_small_arity(phi: &SymmetricForm) -> Result<SparsePolynomial, FormsError> {
    let field = &phi.field;
    let chr = field.characteristic();
    if !chr.exceeds(phi.n as u64) {
        return Err(FormsError::ArityNotBelowCharacteristic { n: phi.n, chr });
    }
    let inv = field.inv(&field.from_biguint(&factorial(phi.n as u64)))?;
    let mut out = SparsePolynomial::zero(field, phi.d);
    let mut idx = vec![0usize; phi.n];
    loop {
        let mut exps = vec![0u32; phi.d];
        for &j in &idx {
            exps[j] += 1;
        }
        let one_based: Vec<usize> = idx.iter().map(|j| j + 1).collect();
        out.add_term(MultiExponent::new(exps), field.mul(&inv, phi.get(&one_based)));
        // odometer over (0..d)^n
        let Some(slot) = idx.iter().rposition(|&j| j + 1 < phi.d) else { break };
        idx[slot] += 1;
        idx[slot + 1..].iter_mut().for_each(|j| *j = 0);
    }
    Ok(out.reduce())
}

/// Which property a defect failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearityFailure {
    /// `Δ(u+w, v) != Δ(u, v) + Δ(w, v)`.
    Additivity,
    /// `Δ(a u, v) != a Δ(u, v)`.
    Homogeneity,
    /// `Δ(v_1, ..., v_n)` differs from the multilinear extension of its
    /// basis values.
    Extension,
}

/// Concrete failure of `n`-linearity. Arguments are point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearityWitness {
    pub kind: LinearityFailure,
    /// Point indices of the arguments on the left-hand side.
    pub args: Vec<usize>,
    /// The second slot-1 argument `w` for additivity.
    pub other: Option<usize>,
    /// The scalar `a` for homogeneity.
    pub scalar: Option<FieldElement>,
    pub lhs: FieldElement,
    pub rhs: FieldElement,
}

/// How thoroughly the multilinear extension was compared with `Δ^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionCheck {
    pub exhaustive: bool,
    pub tuples: u64,
    /// RNG seed when tuples were sampled.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DefectForm {
    Linear { form: SymmetricForm, extension: ExtensionCheck },
    NotLinear(LinearityWitness),
}

/// Reads `Δ^n α` as a symmetric form: the basis values, then slot-1
/// additivity and homogeneity with the other slots on basis tuples, then a
/// comparison of `Δ^n α` with the multilinear extension of the basis values
/// on all of `V^n` (or on seeded random tuples when that exceeds `budget`).
pub fn defect_as_form(tab: &FunctionTable, n: usize, budget: u64, seed: u64) -> Result<DefectForm, FormsError> {
    if n == 0 {
        return Err(FormsError::ZeroArity);
    }
    if !tab.get(0).is_zero() {
        return Err(PolarizeError::NonzeroAtOrigin.into());
    }
    let space = tab.space();
    let field = space.field();
    let d = space.dim();
    let size = space.size();
    let basis: Vec<usize> = (0..d).map(|i| space.basis(i)).collect();
    let to_points = |idx: &[usize]| idx.iter().map(|&i| basis[i - 1]).collect::<Vec<_>>();

    let form = SymmetricForm::from_fn(field, n, d, |idx| defect_at(tab, &to_points(idx)));

    // g[u][r] = Δ^n(u, basis tuple r)
    let rests = canonical_indices(n - 1, d);
    let needed = (size as u128).pow(2) * rests.len() as u128;
    if needed > budget as u128 {
        return Err(FormsError::BudgetExceeded { what: "slot-1 linearity check", needed, budget });
    }
    let rest_points: Vec<Vec<usize>> = rests.iter().map(|r| to_points(r)).collect();
    let args_of = |u: usize, r: usize| {
        let mut a = vec![u];
        a.extend_from_slice(&rest_points[r]);
        a
    };
    let g: Vec<Vec<FieldElement>> =
        par::map_range(size, |u| (0..rests.len()).map(|r| defect_at(tab, &args_of(u, r))).collect());

    let additivity = par::find_first(size * size, |uw| {
        let (u, w) = (uw / size, uw % size);
        let s = space.add(u, w);
        (0..rests.len()).find_map(|r| {
            let rhs = field.add(&g[u][r], &g[w][r]);
            (g[s][r] != rhs).then(|| LinearityWitness {
                kind: LinearityFailure::Additivity,
                args: args_of(u, r),
                other: Some(w),
                scalar: None,
                lhs: g[s][r].clone(),
                rhs,
            })
        })
    });
    if let Some(w) = additivity {
        return Ok(DefectForm::NotLinear(w));
    }

    let scalars = field.elements()?;
    let homogeneity = par::find_first(scalars.len() * size, |au| {
        let (a, u) = (&scalars[au / size], au % size);
        let au_idx = space.scale(a, u);
        (0..rests.len()).find_map(|r| {
            let rhs = field.mul(a, &g[u][r]);
            (g[au_idx][r] != rhs).then(|| LinearityWitness {
                kind: LinearityFailure::Homogeneity,
                args: args_of(u, r),
                other: None,
                scalar: Some(a.clone()),
                lhs: g[au_idx][r].clone(),
                rhs,
            })
        })
    });
    if let Some(w) = homogeneity {
        return Ok(DefectForm::NotLinear(w));
    }

    let total = (size as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let exhaustive = total <= budget as u128;
    let tuples: Vec<Vec<usize>> = if exhaustive {
        (0..total as usize)
            .map(|mut i| {
                let mut t = vec![0; n];
                for slot in t.iter_mut().rev() {
                    *slot = i % size;
                    i /= size;
                }
                t
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..DEFAULT_SAMPLES).map(|_| (0..n).map(|_| rng.gen_range(0..size)).collect()).collect()
    };
    let mismatch = par::find_first(tuples.len(), |i| {
        let t = &tuples[i];
        let lhs = defect_at(tab, t);
        let points: Vec<Vec<FieldElement>> = t.iter().map(|&x| space.point(x)).collect();
        let rhs = eval_unchecked(&form, &points);
        (lhs != rhs).then(|| LinearityWitness {
            kind: LinearityFailure::Extension,
            args: t.clone(),
            other: None,
            scalar: None,
            lhs,
            rhs,
        })
    });
    if let Some(w) = mismatch {
        return Ok(DefectForm::NotLinear(w));
    }
    let extension = ExtensionCheck { exhaustive, tuples: tuples.len() as u64, seed: (!exhaustive).then_some(seed) };
    Ok(DefectForm::Linear { form, extension })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, DEFAULT_TABLE_BUDGET};

    fn gf(p: u64, e: u32) -> Field {
        Field::finite(p, e).unwrap()
    }

    fn el(f: &Field, k: i64) -> FieldElement {
        f.from_int(k)
    }

    #[test]
    fn canonical_index_count() {
        assert_eq!(canonical_indices(2, 3).len(), 6);
        assert_eq!(canonical_indices(3, 2), vec![vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 2], vec![2, 2, 2]]);
        assert_eq!(canonical_indices(0, 3), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn eval_by_hand() {
        let f = gf(3, 1);
        let phi = SymmetricForm::from_entries(
            &f,
            2,
            2,
            vec![(vec![1, 1], el(&f, 1)), (vec![1, 2], el(&f, 0)), (vec![2, 2], el(&f, 1))],
        )
        .unwrap();
        let v = form_eval(&phi, &[vec![el(&f, 1), el(&f, 1)], vec![el(&f, 1), el(&f, 2)]]).unwrap();
        assert_eq!(v, f.zero());
        let z = form_eval(&phi, &[vec![el(&f, 0), el(&f, 0)], vec![el(&f, 1), el(&f, 2)]]).unwrap();
        assert_eq!(z, f.zero());
        assert!(matches!(form_eval(&phi, &[vec![el(&f, 1), el(&f, 1)]]), Err(FormsError::Arity { .. })));
        assert!(matches!(form_eval(&phi, &[vec![el(&f, 1)], vec![el(&f, 1)]]), Err(FormsError::Dimension { .. })));
    }

    #[test]
    fn entry_validation() {
        let f = gf(2, 1);
        assert!(matches!(
            SymmetricForm::from_entries(&f, 2, 2, vec![(vec![1, 1], f.one())]),
            Err(FormsError::MissingIndex(_))
        ));
        assert!(matches!(
            SymmetricForm::from_entries(&f, 2, 1, vec![(vec![1, 1], f.one()), (vec![1, 1], f.one())]),
            Err(FormsError::DuplicateIndex(_))
        ));
        assert!(matches!(
            SymmetricForm::from_entries(&f, 2, 1, vec![(vec![1, 2], f.one())]),
            Err(FormsError::IndexOutOfRange { .. })
        ));
        let phi = SymmetricForm::from_entries(&f, 2, 2, vec![(vec![2, 1], f.one()), (vec![1, 1], f.zero()), (vec![2, 2], f.zero())]);
        assert_eq!(phi.unwrap().get(&[1, 2]), &f.one());
    }

    #[test]
    fn characteristic_examples() {
        let f = gf(2, 1);
        let phi = SymmetricForm::from_fn(&f, 2, 1, |_| f.one());
        let w = is_characteristic(&phi, 1 << 20).unwrap().unwrap();
        assert_eq!(w.u, vec![f.one()]);
        let alt = SymmetricForm::from_fn(&f, 2, 3, |i| if i[0] == i[1] { f.zero() } else { f.one() });
        assert_eq!(is_characteristic(&alt, 1 << 20).unwrap(), None);
        let q = Field::rational();
        let any = SymmetricForm::from_fn(&q, 3, 2, |_| q.one());
        assert_eq!(is_characteristic(&any, 1).unwrap(), None);
    }

    #[test]
    fn realize_quadratic_gf3() {
        let f = gf(3, 1);
        let phi = SymmetricForm::from_fn(&f, 2, 2, |i| match i {
            [1, 1] => el(&f, 1),
            [1, 2] => el(&f, 2),
            _ => el(&f, 1),
        });
        // a1^2/2 + 2 a1 a2 + a2^2/2 with 1/2 = 2
        assert_eq!(realize(&phi).unwrap(), parse_poly("2*x1^2 + 2*x1*x2 + 2*x2^2", &f, 2).unwrap());
        assert_eq!(recover_small_arity(&phi).unwrap(), realize(&phi).unwrap());
    }

    #[test]
    fn realize_cubic_gf3() {
        let f = gf(3, 1);
        let phi = SymmetricForm::from_fn(&f, 3, 3, |i| match i {
            [1, 1, 2] => el(&f, 1),
            [2, 2, 3] => el(&f, 2),
            [1, 2, 3] => el(&f, 1),
            _ => f.zero(),
        });
        // 1/2 = 2: x1^2 x2 * 2, x2^2 x3 * 2*2 = 1, x1 x2 x3 * 1
        assert_eq!(realize(&phi).unwrap(), parse_poly("2*x1^2*x2 + x2^2*x3 + x1*x2*x3", &f, 3).unwrap());
        assert!(matches!(recover_small_arity(&phi), Err(FormsError::ArityNotBelowCharacteristic { .. })));
    }

    #[test]
    fn realize_alternating_char_two() {
        let f = gf(2, 1);
        let phi = SymmetricForm::from_fn(&f, 2, 3, |i| if i == [1, 2] || i == [2, 3] { f.one() } else { f.zero() });
        assert_eq!(realize(&phi).unwrap(), parse_poly("x1*x2 + x2*x3", &f, 3).unwrap());
    }

    #[test]
    fn recover_over_rationals() {
        let q = Field::rational();
        let phi = SymmetricForm::from_fn(&q, 3, 2, |i| q.from_int(i.iter().sum::<usize>() as i64));
        let a = recover_small_arity(&phi).unwrap();
        assert_eq!(a, realize(&phi).unwrap());
        assert_eq!(a, parse_poly("1/2*x1^3 + 2*x1^2*x2 + 5/2*x1*x2^2 + x2^3", &q, 2).unwrap());
    }

    #[test]
    fn cube_over_gf4_is_not_bilinear() {
        let f = gf(2, 2);
        let tab = parse_poly("x1^3", &f, 1).unwrap().to_table(DEFAULT_TABLE_BUDGET).unwrap();
        match defect_as_form(&tab, 2, 1 << 20, 0).unwrap() {
            DefectForm::NotLinear(w) => {
                assert_eq!(w.kind, LinearityFailure::Homogeneity);
                assert_eq!(w.scalar, Some(FieldElement::Finite(2)));
                assert_ne!(w.lhs, w.rhs);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn alternating_form_round_trip() {
        let f = gf(2, 1);
        let phi = SymmetricForm::from_fn(&f, 2, 3, |i| if i[0] != i[1] && i != [1, 3] { f.one() } else { f.zero() });
        let tab = realize(&phi).unwrap().to_table(DEFAULT_TABLE_BUDGET).unwrap();
        match defect_as_form(&tab, 2, 1 << 20, 0).unwrap() {
            DefectForm::Linear { form, extension } => {
                assert_eq!(form, phi);
                assert!(extension.exhaustive);
                assert_eq!(is_characteristic(&form, 1 << 20).unwrap(), None);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn linear_map_gives_zero_form() {
        let f = gf(3, 1);
        let tab = parse_poly("x1 + 2*x2", &f, 2).unwrap().to_table(DEFAULT_TABLE_BUDGET).unwrap();
        match defect_as_form(&tab, 2, 1 << 20, 0).unwrap() {
            DefectForm::Linear { form, .. } => assert!(form.is_zero()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sampled_extension_records_seed() {
        let f = gf(3, 1);
        let tab = parse_poly("x1*x2*x3", &f, 3).unwrap().to_table(DEFAULT_TABLE_BUDGET).unwrap();
        match defect_as_form(&tab, 3, 5000, 7).unwrap() {
            DefectForm::Linear { extension, .. } => {
                assert!(!extension.exhaustive);
                assert_eq!(extension.seed, Some(7));
                assert_eq!(extension.tuples, DEFAULT_SAMPLES as u64);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn document_round_trip() {
        let q = Field::rational();
        let phi = SymmetricForm::from_fn(&q, 2, 2, |i| q.div(&q.one(), &q.from_int(i[1] as i64 + 1)).unwrap());
        assert_eq!(phi.to_document().to_form().unwrap(), phi);
        let f = gf(5, 1);
        let psi = SymmetricForm::from_fn(&f, 3, 2, |i| f.from_int(i[0] as i64 * 2));
        assert_eq!(psi.to_document().to_form().unwrap(), psi);
    }
}
