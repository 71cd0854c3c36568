use crate::field::{Field, FieldElement};
use crate::par;
use crate::polarize::lucas_binom;

use super::{MultiExponent, PolyError, SparsePolynomial};

/// Default cap on the number of points of a dense table.
pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 20;

/// The finite vector space `F^d` with points indexed `0..q^d` in
/// lexicographic order of coordinate encodings (first coordinate most
/// significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Space {
    field: Field,
    d: usize,
    q: u64,
    size: usize,
}

/// `q^k` if it fits under `budget`.
pub(crate) fn checked_count(q: u64, k: usize, budget: u64, what: &'static str) -> Result<usize, PolyError> {
    let needed = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(PolyError::BudgetExceeded { what, needed, budget });
    }
    Ok(needed as usize)
}

impl Space {
    pub fn new(field: &Field, d: usize, budget: u64) -> Result<Self, PolyError> {
        let q = field.order().ok_or_else(|| PolyError::InfiniteField(field.to_string()))?;
        let size = checked_count(q, d, budget, "function table")?;
        Ok(Space { field: field.clone(), d, q, size })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Number of points, `q^d`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn coords(&self, idx: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.d];
        let mut rest = idx as u64;
        for slot in out.iter_mut().rev() {
            *slot = rest % self.q;
            rest /= self.q;
        }
        out
    }

    pub fn point(&self, idx: usize) -> Vec<FieldElement> {
        self.coords(idx).into_iter().map(FieldElement::Finite).collect()
    }

    pub fn index_of_coords(&self, coords: &[u64]) -> usize {
        coords.iter().fold(0u64, |acc, &c| acc * self.q + c) as usize
    }

    pub fn index(&self, point: &[FieldElement]) -> Result<usize, PolyError> {
        if point.len() != self.d {
            return Err(PolyError::DimensionMismatch { expected: self.d, got: point.len() });
        }
        let mut coords = Vec::with_capacity(self.d);
        for a in point {
            match a {
                FieldElement::Finite(k) if *k < self.q => coords.push(*k),
                _ => return Err(PolyError::Mismatch),
            }
        }
        Ok(self.index_of_coords(&coords))
    }

    /// Index of `e_{i+1}`.
    pub fn basis(&self, i: usize) -> usize {
        self.q.pow((self.d - 1 - i) as u32) as usize
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let sum: Vec<u64> = ca
            .iter()
            .zip(&cb)
            .map(|(&x, &y)| {
                self.field
                    .add(&FieldElement::Finite(x), &FieldElement::Finite(y))
                    .encoding()
                    .unwrap()
            })
            .collect();
        self.index_of_coords(&sum)
    }

    pub fn sum(&self, points: impl IntoIterator<Item = usize>) -> usize {
        points.into_iter().fold(0, |acc, p| self.add(acc, p))
    }

    pub fn scale(&self, a: &FieldElement, v: usize) -> usize {
        let scaled: Vec<u64> = self
            .coords(v)
            .into_iter()
            .map(|x| self.field.mul(a, &FieldElement::Finite(x)).encoding().unwrap())
            .collect();
        self.index_of_coords(&scaled)
    }
}

/// A dense map `F^d -> F` over a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    space: Space,
    values: Vec<FieldElement>,
}

impl FunctionTable {
    pub fn new(space: Space, values: Vec<FieldElement>) -> Result<Self, PolyError> {
        if values.len() != space.size {
            return Err(PolyError::TableLength { len: values.len(), q: space.q });
        }
        if values.iter().any(|v| !space.field.contains(v)) {
            return Err(PolyError::Mismatch);
        }
        Ok(FunctionTable { space, values })
    }

    /// Tabulates `f` over every point of `space`.
    pub fn from_fn(space: Space, f: impl Fn(&[FieldElement]) -> FieldElement + Sync + Send) -> Self {
        let values = par::map_range(space.size, |i| f(&space.point(i)));
        FunctionTable { space, values }
    }

    /// Builds a table from integer encodings; the dimension is inferred from
    /// the length when `d` is `None`.
    pub fn from_encodings(field: &Field, d: Option<usize>, encodings: &[u64], budget: u64) -> Result<Self, PolyError> {
        let q = field.order().ok_or_else(|| PolyError::InfiniteField(field.to_string()))?;
        let d = match d {
            Some(d) => d,
            None => infer_dim(encodings.len(), q).ok_or(PolyError::TableLength { len: encodings.len(), q })?,
        };
        let space = Space::new(field, d, budget)?;
        let values = encodings.iter().map(|&k| FieldElement::Finite(k)).collect();
        Self::new(space, values)
    }

    pub fn encodings(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.encoding().unwrap()).collect()
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn field(&self) -> &Field {
        &self.space.field
    }

    pub fn values(&self) -> &[FieldElement] {
        &self.values
    }

    pub fn get(&self, idx: usize) -> &FieldElement {
        &self.values[idx]
    }

    pub fn at(&self, point: &[FieldElement]) -> Result<&FieldElement, PolyError> {
        Ok(&self.values[self.space.index(point)?])
    }

    /// The unique reduced polynomial realizing this table, by tensor-product
    /// Lagrange interpolation with `L_c(x) = 1 - (x - c)^{q-1}` per axis.
    pub fn interpolate(&self) -> SparsePolynomial {
        let field = &self.space.field;
        let q = self.space.q as usize;
        let d = self.space.d;
        let p = field.characteristic().prime().unwrap();
        let elems = field.elements().unwrap();
        // lagrange[c][k]: coefficient of x^k in L_c
        let lagrange: Vec<Vec<FieldElement>> = elems
            .iter()
            .map(|c| {
                let minus_c = field.neg(c);
                (0..q)
                    .map(|k| {
                        let binom = field.from_int(lucas_binom((q - 1) as u64, k as u64, p) as i64);
                        let term = field.mul(&binom, &field.pow(&minus_c, (q - 1 - k) as u64));
                        if k == 0 {
                            field.sub(&field.one(), &term)
                        } else {
                            field.neg(&term)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut data = self.values.clone();
        for axis in 0..d {
            let stride = q.pow((d - 1 - axis) as u32);
            let block = stride * q;
            let mut next = vec![field.zero(); data.len()];
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    for (c, row) in lagrange.iter().enumerate() {
                        let v = &data[base + offset + c * stride];
                        if v.is_zero() {
                            continue;
                        }
                        for (k, coef) in row.iter().enumerate() {
                            let slot = base + offset + k * stride;
                            next[slot] = field.add(&next[slot], &field.mul(v, coef));
                        }
                    }
                }
            }
            data = next;
        }
        let terms = data.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(idx, c)| {
            let exps = self.space.coords(idx).into_iter().map(|e| e as u32).collect();
            (MultiExponent::new(exps), c)
        });
        SparsePolynomial::from_terms(field, d, terms)
    }
}

fn infer_dim(len: usize, q: u64) -> Option<usize> {
    let mut d = 0;
    let mut size = 1u128;
    while size < len as u128 {
        size *= q as u128;
        d += 1;
    }
    (size == len as u128).then_some(d)
}

impl SparsePolynomial {
    /// Tabulates the polynomial function over `F^d`.
    pub fn to_table(&self, budget: u64) -> Result<FunctionTable, PolyError> {
        let space = Space::new(&self.field, self.d, budget)?;
        Ok(FunctionTable::from_fn(space, |pt| self.eval_unchecked(pt)))
    }
}
