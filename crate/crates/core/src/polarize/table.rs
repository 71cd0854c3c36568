use crate::field::{Field, FieldElement};
use crate::par;
use crate::poly::{FunctionTable, SparsePolynomial, Space};

use super::PolarizeError;

/// `Δ^n α` tabulated on all of `V^n`. The tuple `(u_1, ..., u_n)` sits at
/// index `u_1 Q^{n-1} + ... + u_n` with `Q = q^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectTable {
    space: Space,
    n: usize,
    values: Vec<FieldElement>,
}

/// One evaluated argument tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectEntry {
    /// Point indices of the arguments.
    pub args: Vec<usize>,
    pub value: FieldElement,
}

impl DefectTable {
    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn index(&self, args: &[usize]) -> usize {
        let size = self.space.size();
        args.iter().fold(0, |acc, &a| acc * size + a)
    }

    pub fn args(&self, idx: usize) -> Vec<usize> {
        let size = self.space.size();
        let mut out = vec![0; self.n];
        let mut rest = idx;
        for slot in out.iter_mut().rev() {
            *slot = rest % size;
            rest /= size;
        }
        out
    }

    pub fn get(&self, args: &[usize]) -> &FieldElement {
        &self.values[self.index(args)]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(FieldElement::is_zero)
    }

    pub fn entries(&self) -> Vec<DefectEntry> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| DefectEntry { args: self.args(i), value: v.clone() })
            .collect()
    }
}

fn check_table(tab: &FunctionTable, n: usize) -> Result<(), PolarizeError> {
    if n == 0 {
        return Err(PolarizeError::ZeroArity);
    }
    if !tab.get(0).is_zero() {
        return Err(PolarizeError::NonzeroAtOrigin);
    }
    Ok(())
}

fn tuple_count(tab: &FunctionTable, n: usize, budget: u64) -> Result<usize, PolarizeError> {
    let size = tab.space().size() as u128;
    let needed = size.checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(PolarizeError::BudgetExceeded { what: "defect table", needed, budget });
    }
    Ok(needed as usize)
}

/// `Δ^n α(u_1, ..., u_n) = Σ_{∅ ≠ S} (-1)^{n-|S|} α(Σ_{i∈S} u_i)`.
pub fn defect_at(tab: &FunctionTable, args: &[usize]) -> FieldElement {
    let space = tab.space();
    let field = space.field();
    let n = args.len();
    let mut sums = vec![0usize; 1 << n];
    let mut acc = field.zero();
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = space.add(sums[mask & (mask - 1)], args[low]);
        let v = tab.get(sums[mask]);
        if (n - mask.count_ones() as usize).is_multiple_of(2) {
            acc = field.add(&acc, v);
        } else {
            acc = field.sub(&acc, v);
        }
    }
    acc
}

/// Inclusion-exclusion `Δ^n f` at coordinate vectors, evaluating the
/// polynomial directly; usable on spaces too large to tabulate.
pub fn defect_at_points(f: &SparsePolynomial, args: &[Vec<FieldElement>]) -> FieldElement {
    let field = f.field();
    let n = args.len();
    let mut sums: Vec<Vec<FieldElement>> = vec![vec![field.zero(); f.nvars()]; 1 << n];
    let mut acc = field.zero();
    for mask in 1usize..1 << n {
        let low = mask.trailing_zeros() as usize;
        let prev = &sums[mask & (mask - 1)];
        let next: Vec<FieldElement> = prev.iter().zip(&args[low]).map(|(a, b)| field.add(a, b)).collect();
        let v = f.eval_unchecked(&next);
        sums[mask] = next;
        if (n - mask.count_ones() as usize).is_multiple_of(2) {
            acc = field.add(&acc, &v);
        } else {
            acc = field.sub(&acc, &v);
        }
    }
    acc
}

/// `Δ^n α` via the three-term recurrence, recursively from `Δ^1 α = α`.
pub fn recurrence_at(tab: &FunctionTable, args: &[usize]) -> FieldElement {
    if args.len() == 1 {
        return tab.get(args[0]).clone();
    }
    let space = tab.space();
    let field = space.field();
    let mut merged = Vec::with_capacity(args.len() - 1);
    merged.push(space.add(args[0], args[1]));
    merged.extend_from_slice(&args[2..]);
    let mut first = Vec::with_capacity(args.len() - 1);
    first.push(args[0]);
    first.extend_from_slice(&args[2..]);
    let mut second = Vec::with_capacity(args.len() - 1);
    second.push(args[1]);
    second.extend_from_slice(&args[2..]);
    let whole = recurrence_at(tab, &merged);
    field.sub(&field.sub(&whole, &recurrence_at(tab, &first)), &recurrence_at(tab, &second))
}

/// Inclusion-exclusion `Δ^n α` on every tuple of `V^n`.
pub fn defect_table(tab: &FunctionTable, n: usize, budget: u64) -> Result<DefectTable, PolarizeError> {
    check_table(tab, n)?;
    let count = tuple_count(tab, n, budget)?;
    let mut out = DefectTable { space: tab.space().clone(), n, values: Vec::new() };
    out.values = par::map_range(count, |i| defect_at(tab, &out.args(i)));
    Ok(out)
}

/// `Δ^n α` by the recurrence, building `Δ^1, Δ^2, ..., Δ^n` layer by layer.
pub fn defect_table_recurrence(tab: &FunctionTable, n: usize, budget: u64) -> Result<DefectTable, PolarizeError> {
    check_table(tab, n)?;
    tuple_count(tab, n, budget)?;
    let space = tab.space();
    let field = space.field();
    let size = space.size();
    let mut layer: Vec<FieldElement> = tab.values().to_vec();
    for k in 2..=n {
        let prev = &layer;
        let rest_count = size.pow(k as u32 - 2);
        layer = par::map_range(size.pow(k as u32), |idx| {
            let rest = idx % rest_count;
            let u2 = (idx / rest_count) % size;
            let u1 = idx / (rest_count * size);
            let sum = space.add(u1, u2);
            let whole = &prev[sum * rest_count + rest];
            let a = &prev[u1 * rest_count + rest];
            let b = &prev[u2 * rest_count + rest];
            field.sub(&field.sub(whole, a), b)
        });
    }
    Ok(DefectTable { space: space.clone(), n, values: layer })
}

fn check_tuples(tab: &FunctionTable, tuples: &[Vec<usize>]) -> Result<(), PolarizeError> {
    let size = tab.space().size();
    let n = tuples.first().map_or(1, Vec::len);
    check_table(tab, n)?;
    for t in tuples {
        if t.len() != n {
            return Err(PolarizeError::ArityMismatch { expected: n, got: t.len() });
        }
        if let Some(&bad) = t.iter().find(|&&a| a >= size) {
            return Err(PolarizeError::PointOutOfRange { index: bad, size });
        }
    }
    Ok(())
}

/// Inclusion-exclusion `Δ^n α` on an explicit list of argument tuples.
pub fn defect_on_tuples(tab: &FunctionTable, tuples: &[Vec<usize>]) -> Result<Vec<DefectEntry>, PolarizeError> {
    check_tuples(tab, tuples)?;
    Ok(par::map_slice(tuples, |t| DefectEntry { args: t.clone(), value: defect_at(tab, t) }))
}

/// Recurrence `Δ^n α` on an explicit list of argument tuples.
pub fn recurrence_on_tuples(tab: &FunctionTable, tuples: &[Vec<usize>]) -> Result<Vec<DefectEntry>, PolarizeError> {
    check_tuples(tab, tuples)?;
    Ok(par::map_slice(tuples, |t| DefectEntry { args: t.clone(), value: recurrence_at(tab, t) }))
}

/// Field of a defect table, for callers that only hold the table.
pub fn defect_field(t: &DefectTable) -> &Field {
    t.space.field()
}
