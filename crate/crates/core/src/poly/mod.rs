//! Sparse multivariate polynomials over a [`Field`], their reduction to the
//! unique function representative, and the monomial-wise space tests used by
//! the classifier.

mod parse;
mod table;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::field::{Characteristic, Field, FieldElement, FieldError};
use crate::polarize::p_weight;

pub use parse::{parse_blocked, parse_poly};
pub use table::{FunctionTable, Space, DEFAULT_TABLE_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable x{index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what} needs {needed} entries, over the budget of {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u64 },
    #[error("function tables need a finite field, got {0}")]
    InfiniteField(String),
    #[error("table has {len} entries, which is not a power of the field order {q}")]
    TableLength { len: usize, q: u64 },
    #[error("change-of-basis matrix is singular")]
    SingularMatrix,
    #[error("polynomial has a nonzero constant term")]
    ConstantTerm,
    #[error("polynomial is not reduced: exponent {exponent} is not below {order}")]
    NotReduced { exponent: u32, order: u64 },
    #[error("operands live over different fields or dimensions")]
    Mismatch,
}

/// Exponent tuple `(m_1, ..., m_d)` of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiExponent(Vec<u32>);

impl MultiExponent {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiExponent(exps)
    }

    pub fn zero(d: usize) -> Self {
        MultiExponent(vec![0; d])
    }

    /// `x_i^k`, with `i` zero-based.
    pub fn unit(d: usize, i: usize, k: u32) -> Self {
        let mut v = vec![0; d];
        v[i] = k;
        MultiExponent(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Sum of the `p`-weights of the exponents.
    pub fn p_degree(&self, chr: Characteristic) -> u64 {
        self.0.iter().map(|&e| p_weight(e as u64, chr)).sum()
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiExponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise difference; caller guarantees `other.divides(self)`.
    pub fn minus(&self, other: &MultiExponent) -> MultiExponent {
        MultiExponent(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn plus(&self, other: &MultiExponent) -> MultiExponent {
        MultiExponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Every positive exponent mapped into `[1, q-1]` by congruence mod `q-1`.
    pub fn reduced(&self, q: u64) -> MultiExponent {
        MultiExponent(self.0.iter().map(|&m| reduce_exponent(m, q)).collect())
    }
}

impl fmt::Display for MultiExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

fn reduce_exponent(m: u32, q: u64) -> u32 {
    if m == 0 {
        0
    } else {
        ((m as u64 - 1) % (q - 1) + 1) as u32
    }
}

/// A polynomial in `d` variables with nonzero coefficients stored in
/// lexicographic exponent order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsePolynomial {
    field: Field,
    d: usize,
    terms: BTreeMap<MultiExponent, FieldElement>,
}

impl SparsePolynomial {
    pub fn zero(field: &Field, d: usize) -> Self {
        SparsePolynomial { field: field.clone(), d, terms: BTreeMap::new() }
    }

    pub fn constant(field: &Field, d: usize, c: FieldElement) -> Self {
        Self::monomial(field, MultiExponent::zero(d), c)
    }

    pub fn monomial(field: &Field, m: MultiExponent, c: FieldElement) -> Self {
        let mut p = Self::zero(field, m.len());
        p.add_term(m, c);
        p
    }

    /// The coordinate function `x_{i+1}`.
    pub fn variable(field: &Field, d: usize, i: usize) -> Self {
        Self::monomial(field, MultiExponent::unit(d, i, 1), field.one())
    }

    /// Collects terms, merging like exponents and dropping zeros.
    pub fn from_terms(field: &Field, d: usize, terms: impl IntoIterator<Item = (MultiExponent, FieldElement)>) -> Self {
        let mut p = Self::zero(field, d);
        for (m, c) in terms {
            assert_eq!(m.len(), d, "multiexponent length must equal the variable count");
            p.add_term(m, c);
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: MultiExponent, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let sum = self.field.add(old, &c);
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiExponent, &FieldElement)> {
        self.terms.iter()
    }

    /// `M(f)`: the multiexponents with nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = &MultiExponent> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &MultiExponent) -> FieldElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coefficient(&MultiExponent::zero(self.d))
    }

    /// The single-term summands of `self`.
    pub fn monomials(&self) -> impl Iterator<Item = SparsePolynomial> + '_ {
        self.terms.iter().map(|(m, c)| SparsePolynomial::monomial(&self.field, m.clone(), c.clone()))
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let terms = self.terms.iter().map(|(m, x)| (m.clone(), self.field.mul(x, c)));
        Self::from_terms(&self.field, self.d, terms)
    }

    fn check_compatible(&self, other: &Self) {
        assert!(self.field == other.field && self.d == other.d, "{}", PolyError::Mismatch);
    }

    pub fn pow(&self, k: u32) -> Self {
        self.pow_with(k, false)
    }

    /// Powering that optionally reduces after every product; reduction is
    /// compatible with multiplication, so the reduced result is unchanged.
    fn pow_with(&self, k: u32, reduce_steps: bool) -> Self {
        let step = |p: Self| if reduce_steps { p.reduce() } else { p };
        let mut acc = Self::constant(&self.field, self.d, self.field.one());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = step(&acc * &base);
            }
            k >>= 1;
            if k > 0 {
                base = step(&base * &base);
            }
        }
        acc
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms.keys().map(|m| m.total_degree() as i64).max().unwrap_or(-1)
    }

    /// Largest sum of `p`-weights over the monomials; `-1` for zero.
    pub fn p_degree(&self) -> i64 {
        let chr = self.field.characteristic();
        self.terms.keys().map(|m| m.p_degree(chr) as i64).max().unwrap_or(-1)
    }

    /// The unique representative with every exponent below `q`. Identity
    /// over the rationals.
    pub fn reduce(&self) -> Self {
        match self.field.order() {
            None => self.clone(),
            Some(q) => {
                let terms = self.terms.iter().map(|(m, c)| (m.reduced(q), c.clone()));
                Self::from_terms(&self.field, self.d, terms)
            }
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.first_unreduced().is_none()
    }

    fn first_unreduced(&self) -> Option<(u32, u64)> {
        let q = self.field.order()?;
        self.terms.keys().flat_map(|m| m.0.iter()).find(|&&e| e as u64 >= q).map(|&e| (e, q))
    }

    pub(crate) fn require_reduced(&self) -> Result<(), PolyError> {
        match self.first_unreduced() {
            Some((exponent, order)) => Err(PolyError::NotReduced { exponent, order }),
            None => Ok(()),
        }
    }

    pub(crate) fn require_no_constant(&self) -> Result<(), PolyError> {
        if self.constant_term().is_zero() {
            Ok(())
        } else {
            Err(PolyError::ConstantTerm)
        }
    }

    /// Value at a point, with `0^0 = 1`.
    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if point.len() != self.d {
            return Err(PolyError::DimensionMismatch { expected: self.d, got: point.len() });
        }
        if let Some(bad) = point.iter().find(|a| !self.field.contains(a)) {
            return Err(FieldError::ForeignElement { element: format!("{bad:?}"), field: self.field.to_string() }.into());
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    v = f.mul(&v, &f.pow(x, e as u64));
                    if v.is_zero() {
                        break;
                    }
                }
            }
            acc = f.add(&acc, &v);
        }
        acc
    }

    /// Substitutes `images[j]` for `x_{j+1}`. All images share one field and
    /// variable count, which becomes the variable count of the result.
    pub fn substitute(&self, images: &[SparsePolynomial]) -> Result<Self, PolyError> {
        self.substitute_with(images, false)
    }

    fn substitute_with(&self, images: &[SparsePolynomial], reduce_steps: bool) -> Result<Self, PolyError> {
        if images.len() != self.d {
            return Err(PolyError::DimensionMismatch { expected: self.d, got: images.len() });
        }
        let target_d = images.first().map_or(0, |g| g.d);
        if images.iter().any(|g| g.d != target_d || g.field != self.field) {
            return Err(PolyError::Mismatch);
        }
        let mut cache: HashMap<(usize, u32), SparsePolynomial> = HashMap::new();
        let mut out = Self::zero(&self.field, target_d);
        for (m, c) in &self.terms {
            let mut prod = Self::constant(&self.field, target_d, c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let power = cache.entry((j, e)).or_insert_with(|| images[j].pow_with(e, reduce_steps));
                prod = &prod * power;
                if reduce_steps {
                    prod = prod.reduce();
                }
            }
            out = &out + &prod;
        }
        Ok(out)
    }

    /// The reduced polynomial realizing the same mapping with respect to the
    /// basis `e*_i = sum_j c[i][j] e_j`.
    pub fn change_of_basis(&self, c: &[Vec<FieldElement>]) -> Result<Self, PolyError> {
        if c.len() != self.d || c.iter().any(|row| row.len() != self.d) {
            return Err(PolyError::DimensionMismatch { expected: self.d, got: c.len() });
        }
        if c.iter().flatten().any(|x| !self.field.contains(x)) {
            return Err(PolyError::Mismatch);
        }
        if self.field.rank(c) < self.d {
            return Err(PolyError::SingularMatrix);
        }
        // coordinate j in the old basis is sum_i a_i c[i][j]
        let images: Vec<SparsePolynomial> = (0..self.d)
            .map(|j| {
                let terms = (0..self.d).map(|i| (MultiExponent::unit(self.d, i, 1), c[i][j].clone()));
                Self::from_terms(&self.field, self.d, terms)
            })
            .collect();
        Ok(self.substitute_with(&images, self.field.is_finite())?.reduce())
    }

    /// Every exponent of every monomial is below the characteristic.
    pub fn is_totally_reduced(&self) -> bool {
        match self.field.characteristic() {
            Characteristic::Infinite => true,
            Characteristic::Prime(p) => self.terms.keys().all(|m| m.0.iter().all(|&e| (e as u64) < p)),
        }
    }

    pub fn is_homogeneous_of_degree(&self, n: u64) -> bool {
        self.terms.keys().all(|m| m.total_degree() == n)
    }

    /// A monomial whose combinatorial degree exceeds `n`, if any.
    pub fn pl_violation(&self, n: u64) -> Result<Option<MultiExponent>, PolyError> {
        self.require_reduced()?;
        self.require_no_constant()?;
        let chr = self.field.characteristic();
        Ok(self.terms.keys().find(|m| m.p_degree(chr) > n).cloned())
    }

    /// A monomial blocking membership in `tpl(V, n)`: either its combinatorial
    /// degree exceeds `n`, or it equals `n` and the monomial is not totally
    /// reduced.
    pub fn tpl_violation(&self, n: u64) -> Result<Option<MultiExponent>, PolyError> {
        if let Some(m) = self.pl_violation(n)? {
            return Ok(Some(m));
        }
        let chr = self.field.characteristic();
        Ok(self
            .terms
            .keys()
            .find(|m| m.p_degree(chr) == n && !chr_bounds(m, chr))
            .cloned())
    }

    /// A monomial whose degree is zero or not congruent to `n` modulo `q-1`
    /// (over the rationals: not equal to `n`).
    pub fn dpl_violation(&self, n: u64) -> Result<Option<MultiExponent>, PolyError> {
        self.require_reduced()?;
        let modulus = self.field.order().map(|q| q - 1);
        Ok(self
            .terms
            .keys()
            .find(|m| {
                let deg = m.total_degree();
                let ok = match modulus {
                    Some(k) => deg != 0 && (deg as i128 - n as i128).rem_euclid(k as i128) == 0,
                    None => deg != 0 && deg == n,
                };
                !ok
            })
            .cloned())
    }

    pub fn pl_member(&self, n: u64) -> Result<bool, PolyError> {
        Ok(self.pl_violation(n)?.is_none())
    }

    pub fn tpl_member(&self, n: u64) -> Result<bool, PolyError> {
        Ok(self.tpl_violation(n)?.is_none())
    }

    pub fn dpl_member(&self, n: u64) -> Result<bool, PolyError> {
        Ok(self.dpl_violation(n)?.is_none())
    }

    /// Renders the polynomial with custom variable names (zero-based index).
    pub fn display_with(&self, name: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            if m.is_zero() || *c != self.field.one() {
                factors.push(self.field.format(c));
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(name(i)),
                    _ => factors.push(format!("{}^{}", name(i), e)),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

fn chr_bounds(m: &MultiExponent, chr: Characteristic) -> bool {
    m.0.iter().all(|&e| chr.exceeds(e as u64))
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&|i| format!("x{}", i + 1)))
    }
}

impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn add(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        self.check_compatible(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn neg(self) -> SparsePolynomial {
        self.scale(&self.field.neg(&self.field.one()))
    }
}

impl Sub for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn sub(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        self + &(-rhs)
    }
}

impl Mul for &SparsePolynomial {
    type Output = SparsePolynomial;

    fn mul(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        self.check_compatible(rhs);
        let f = &self.field;
        let mut out = SparsePolynomial::zero(f, self.d);
        for (m, c) in &self.terms {
            for (n, e) in &rhs.terms {
                out.add_term(m.plus(n), f.mul(c, e));
            }
        }
        out
    }
}
