#![allow(dead_code)]

use proptest::prelude::*;

use combpol::poly::{Space, DEFAULT_TABLE_BUDGET};
use combpol::{Field, FieldElement, FunctionTable, MultiExponent, SparsePolynomial};

pub fn gf(p: u64, e: u32) -> Field {
    Field::finite(p, e).unwrap()
}

/// Table from raw encodings, forcing the value at the origin to zero.
pub fn table(field: &Field, d: usize, mut values: Vec<u64>) -> FunctionTable {
    values[0] = 0;
    let space = Space::new(field, d, DEFAULT_TABLE_BUDGET).unwrap();
    FunctionTable::new(space, values.into_iter().map(FieldElement::Finite).collect()).unwrap()
}

/// Raw values of a random map `GF(q)^d -> GF(q)`.
pub fn table_values(q: u64, d: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..q, (q as usize).pow(d as u32))
}

/// Coefficients for every reduced monomial over `GF(q)^d`, zero meaning
/// absent; the constant slot is ignored.
pub fn reduced_coefficients(q: u64, d: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(prop_oneof![3 => Just(0u64), 1 => 1..q], (q as usize).pow(d as u32))
}

pub fn reduced_poly(field: &Field, d: usize, coefs: &[u64]) -> SparsePolynomial {
    let q = field.order().unwrap() as usize;
    let terms = coefs.iter().enumerate().skip(1).filter(|(_, &c)| c != 0).map(|(idx, &c)| {
        let mut rest = idx;
        let exps = (0..d)
            .map(|_| {
                let e = (rest % q) as u32;
                rest /= q;
                e
            })
            .collect();
        (MultiExponent::new(exps), FieldElement::Finite(c))
    });
    SparsePolynomial::from_terms(field, d, terms.collect::<Vec<_>>())
}

/// All argument tuples of length `n` over `size` points, as index vectors.
pub fn tuples(size: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..size.pow(n as u32)).map(move |mut k| {
        (0..n)
            .map(|_| {
                let i = k % size;
                k /= size;
                i
            })
            .collect()
    })
}
