//! Exact arithmetic in `GF(p^e)` and in the rational field.
//!
//! The rational field stands in for characteristic infinity: every statement
//! of the form "`n < chr F`" is true over it.
//!
//! Finite-field elements are stored by their integer encoding
//! `k = c_0 + c_1 p + ... + c_{e-1} p^{e-1}`, where `c_0 + c_1 t + ...` is the
//! residue class in `GF(p)[t] / modulus`.  The modulus is the first monic
//! irreducible of degree `e` when candidates are listed in lexicographic
//! order of their coefficient tuples `(c_0, ..., c_{e-1})`, so equal `(p, e)`
//! always give identical arithmetic.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest order for which multiplication goes through log/exp tables.
const LOG_TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("the rational field only admits extension degree 1")]
    RationalExtension,
    #[error("field order {p}^{e} does not fit in 64 bits")]
    TooLarge { p: u64, e: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operand {element} does not belong to {field}")]
    ForeignElement { element: String, field: String },
    #[error("the rational field cannot be enumerated")]
    NotEnumerable,
    #[error("invalid field spec `{0}` (expected `p^e`, `p` or `Q`)")]
    BadSpec(String),
    #[error("invalid element literal `{literal}` for {field}")]
    BadElement { literal: String, field: String },
}

/// Characteristic of a field; the rationals have characteristic `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Characteristic {
    Prime(u64),
    Infinite,
}

impl Characteristic {
    pub fn prime(self) -> Option<u64> {
        match self {
            Characteristic::Prime(p) => Some(p),
            Characteristic::Infinite => None,
        }
    }

    /// `n < chr F`, with every integer below infinity.
    pub fn exceeds(self, n: u64) -> bool {
        match self {
            Characteristic::Prime(p) => n < p,
            Characteristic::Infinite => true,
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Characteristic::Prime(p) => write!(f, "{p}"),
            Characteristic::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of some [`Field`]. It does not carry its field; the field
/// methods interpret it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Finite(u64),
    Rational(BigRational),
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Finite(k) => *k == 0,
            FieldElement::Rational(r) => r.is_zero(),
        }
    }

    /// Integer encoding of a finite-field element.
    pub fn encoding(&self) -> Option<u64> {
        match self {
            FieldElement::Finite(k) => Some(*k),
            FieldElement::Rational(_) => None,
        }
    }
}

/// Binary field operation selector for [`Field::arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug)]
struct LogTables {
    /// `exp[i] = g^i` for `0 <= i < 2(q-1)`.
    exp: Vec<u64>,
    /// `log[g^i] = i`; `log[0]` is unused.
    log: Vec<u32>,
}

#[derive(Debug)]
struct Galois {
    p: u64,
    e: u32,
    q: u64,
    /// Monic modulus, `modulus[i]` is the coefficient of `t^i`, length `e + 1`.
    modulus: Vec<u64>,
    logs: Option<LogTables>,
}

#[derive(Debug)]
enum Kind {
    Rational,
    Finite(Galois),
}

/// A field specification: either `GF(p^e)` or `Q`. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Kind>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Kind::Rational => write!(f, "Field(Q)"),
            Kind::Finite(g) => write!(f, "Field({}^{}, modulus {:?})", g.p, g.e, g.modulus),
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.0, &*other.0) {
            (Kind::Rational, Kind::Rational) => true,
            (Kind::Finite(a), Kind::Finite(b)) => a.p == b.p && a.e == b.e && a.modulus == b.modulus,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Kind::Rational => write!(f, "Q"),
            Kind::Finite(g) => write!(f, "{}^{}", g.p, g.e),
        }
    }
}

impl FromStr for Field {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::rational());
        }
        let bad = || FieldError::BadSpec(s.to_string());
        let (p, e) = match s.split_once('^') {
            Some((p, e)) => (p.trim(), e.trim()),
            None => (s, "1"),
        };
        let p: u64 = p.parse().map_err(|_| bad())?;
        let e: u32 = e.parse().map_err(|_| bad())?;
        Field::finite(p, e)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `m` over `GF(p)`; both are
/// little-endian coefficient vectors.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let sub = (lead as u128 * c as u128 % p as u128) as u64;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for k in 0..count {
            let mut divisor = Vec::with_capacity(d + 1);
            let mut rest = k;
            for _ in 0..d {
                divisor.push(rest % p);
                rest /= p;
            }
            divisor.push(1);
            if poly_rem(m, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u64, e: u32) -> Vec<u64> {
    if e == 1 {
        return vec![0, 1];
    }
    let e = e as usize;
    let count = p.pow(e as u32);
    for k in 0..count {
        // c_{e-1} varies fastest, so (c_0, ..., c_{e-1}) runs in lex order.
        let mut coeffs = vec![0u64; e + 1];
        let mut rest = k;
        for i in (0..e).rev() {
            coeffs[i] = rest % p;
            rest /= p;
        }
        coeffs[e] = 1;
        if coeffs[0] != 0 && is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

impl Galois {
    fn new(p: u64, e: u32) -> Result<Self, FieldError> {
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= 1 << 32 {
            return Err(FieldError::TooLarge { p, e });
        }
        let q = p.checked_pow(e).ok_or(FieldError::TooLarge { p, e })?;
        let modulus = least_irreducible(p, e);
        let mut gf = Galois { p, e, q, modulus, logs: None };
        if q <= LOG_TABLE_LIMIT {
            gf.logs = Some(gf.build_logs());
        }
        Ok(gf)
    }

    fn build_logs(&self) -> LogTables {
        let n = (self.q - 1) as usize;
        let mut candidate = if self.q == 2 { 1 } else { 2 };
        loop {
            let mut exp = Vec::with_capacity(2 * n);
            let mut x = 1u64;
            let mut primitive = true;
            for i in 0..n {
                if i > 0 && x == 1 {
                    primitive = false;
                    break;
                }
                exp.push(x);
                x = self.mul_slow(x, candidate);
            }
            if primitive && x == 1 {
                let mut log = vec![0u32; self.q as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                let doubled: Vec<u64> = exp.iter().chain(exp.iter()).copied().collect();
                return LogTables { exp: doubled, log };
            }
            candidate += 1;
        }
    }

    fn digits(&self, k: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut rest = k;
        for _ in 0..self.e {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    fn undigits(&self, digits: &[u64]) -> u64 {
        digits.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            return (a + b) % self.p;
        }
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.e {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place = place.wrapping_mul(self.p);
        }
        out
    }

    fn neg(&self, a: u64) -> u64 {
        if self.p == 2 {
            return a;
        }
        if self.e == 1 {
            return (self.p - a) % self.p;
        }
        let d: Vec<u64> = self.digits(a).into_iter().map(|c| (self.p - c) % self.p).collect();
        self.undigits(&d)
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        if self.e == 1 {
            return (a as u128 * b as u128 % self.p as u128) as u64;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let p = self.p as u128;
        let mut prod = vec![0u64; 2 * self.e as usize - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p) as u64;
            }
        }
        self.undigits(&poly_rem(&prod, &self.modulus, self.p))
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.logs {
            Some(t) => t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize],
            None => self.mul_slow(a, b),
        }
    }

    fn pow(&self, a: u64, k: u64) -> u64 {
        if k == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.logs {
            let n = self.q - 1;
            let idx = (t.log[a as usize] as u128 * (k % n) as u128 % n as u128) as usize;
            return t.exp[idx];
        }
        let (mut base, mut k, mut acc) = (a, k, 1u64);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    fn inv(&self, a: u64) -> Option<u64> {
        if a == 0 {
            return None;
        }
        match &self.logs {
            Some(t) => {
                let n = (self.q - 1) as usize;
                Some(t.exp[(n - t.log[a as usize] as usize) % n])
            }
            None => Some(self.pow(a, self.q - 2)),
        }
    }
}

impl Field {
    /// `GF(p^e)`.
    pub fn finite(p: u64, e: u32) -> Result<Self, FieldError> {
        Ok(Field(Arc::new(Kind::Finite(Galois::new(p, e)?))))
    }

    /// The rational field (characteristic infinity).
    pub fn rational() -> Self {
        Field(Arc::new(Kind::Rational))
    }

    /// Builds a field from a characteristic and an extension degree.
    pub fn new(chr: Characteristic, e: u32) -> Result<Self, FieldError> {
        match chr {
            Characteristic::Prime(p) => Field::finite(p, e),
            Characteristic::Infinite if e == 1 => Ok(Field::rational()),
            Characteristic::Infinite if e == 0 => Err(FieldError::ZeroDegree),
            Characteristic::Infinite => Err(FieldError::RationalExtension),
        }
    }

    fn gf(&self) -> Option<&Galois> {
        match &*self.0 {
            Kind::Finite(g) => Some(g),
            Kind::Rational => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.gf().is_some()
    }

    pub fn characteristic(&self) -> Characteristic {
        match self.gf() {
            Some(g) => Characteristic::Prime(g.p),
            None => Characteristic::Infinite,
        }
    }

    /// `q = p^e`, or `None` for the rationals.
    pub fn order(&self) -> Option<u64> {
        self.gf().map(|g| g.q)
    }

    /// Extension degree over the prime field (1 for `Q`).
    pub fn degree(&self) -> u32 {
        self.gf().map_or(1, |g| g.e)
    }

    /// Little-endian coefficients of the monic modulus; `[0, 1]` for prime fields.
    pub fn modulus(&self) -> Option<&[u64]> {
        self.gf().map(|g| g.modulus.as_slice())
    }

    pub fn zero(&self) -> FieldElement {
        match self.gf() {
            Some(_) => FieldElement::Finite(0),
            None => FieldElement::Rational(BigRational::zero()),
        }
    }

    pub fn one(&self) -> FieldElement {
        match self.gf() {
            Some(_) => FieldElement::Finite(1),
            None => FieldElement::Rational(BigRational::one()),
        }
    }

    /// The image of an integer under `Z -> F`.
    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match self.gf() {
            Some(g) => {
                let r = n.mod_floor_u64(g.p);
                FieldElement::Finite(r)
            }
            None => FieldElement::Rational(BigRational::from_integer(n.clone())),
        }
    }

    pub fn from_biguint(&self, n: &BigUint) -> FieldElement {
        self.from_bigint(&BigInt::from(n.clone()))
    }

    /// The element `t` (a generator of the extension over the prime field).
    pub fn generator(&self) -> Option<FieldElement> {
        self.gf().map(|g| FieldElement::Finite(if g.e == 1 { 1 } else { g.p }))
    }

    pub fn contains(&self, a: &FieldElement) -> bool {
        match (self.gf(), a) {
            (Some(g), FieldElement::Finite(k)) => *k < g.q,
            (None, FieldElement::Rational(_)) => true,
            _ => false,
        }
    }

    fn foreign(&self, a: &FieldElement) -> FieldError {
        FieldError::ForeignElement { element: format!("{a:?}"), field: self.to_string() }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (self.gf(), a, b) {
            (Some(g), FieldElement::Finite(x), FieldElement::Finite(y)) => FieldElement::Finite(g.add(*x, *y)),
            (None, FieldElement::Rational(x), FieldElement::Rational(y)) => FieldElement::Rational(x + y),
            _ => panic!("{}", self.foreign(a)),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        match (self.gf(), a) {
            (Some(g), FieldElement::Finite(x)) => FieldElement::Finite(g.neg(*x)),
            (None, FieldElement::Rational(x)) => FieldElement::Rational(-x),
            _ => panic!("{}", self.foreign(a)),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (self.gf(), a, b) {
            (Some(g), FieldElement::Finite(x), FieldElement::Finite(y)) => FieldElement::Finite(g.mul(*x, *y)),
            (None, FieldElement::Rational(x), FieldElement::Rational(y)) => FieldElement::Rational(x * y),
            _ => panic!("{}", self.foreign(a)),
        }
    }

    /// `a^k` with `0^0 = 1`.
    pub fn pow(&self, a: &FieldElement, k: u64) -> FieldElement {
        match (self.gf(), a) {
            (Some(g), FieldElement::Finite(x)) => FieldElement::Finite(g.pow(*x, k)),
            (None, FieldElement::Rational(x)) => {
                let exp = i32::try_from(k).expect("rational exponent out of range");
                FieldElement::Rational(num_traits::Pow::pow(x, exp))
            }
            _ => panic!("{}", self.foreign(a)),
        }
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match (self.gf(), a) {
            (Some(g), FieldElement::Finite(x)) => Ok(FieldElement::Finite(g.inv(*x).unwrap())),
            (None, FieldElement::Rational(x)) => Ok(FieldElement::Rational(x.recip())),
            _ => Err(self.foreign(a)),
        }
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Checked binary operation: rejects operands from another field.
    pub fn arith(&self, a: &FieldElement, b: &FieldElement, op: Op) -> Result<FieldElement, FieldError> {
        for x in [a, b] {
            if !self.contains(x) {
                return Err(self.foreign(x));
            }
        }
        match op {
            Op::Add => Ok(self.add(a, b)),
            Op::Sub => Ok(self.sub(a, b)),
            Op::Mul => Ok(self.mul(a, b)),
            Op::Div => self.div(a, b),
        }
    }

    /// All `q` elements in encoding order `0, 1, ..., q-1`.
    pub fn elements(&self) -> Result<Vec<FieldElement>, FieldError> {
        match self.gf() {
            Some(g) => Ok((0..g.q).map(FieldElement::Finite).collect()),
            None => Err(FieldError::NotEnumerable),
        }
    }

    /// Text encoding: decimal `k` for finite fields, `num/den` (or `num`) for `Q`.
    pub fn format(&self, a: &FieldElement) -> String {
        match a {
            FieldElement::Finite(k) => k.to_string(),
            FieldElement::Rational(r) if r.is_integer() => r.numer().to_string(),
            FieldElement::Rational(r) => format!("{}/{}", r.numer(), r.denom()),
        }
    }

    pub fn parse_element(&self, s: &str) -> Result<FieldElement, FieldError> {
        let s = s.trim();
        let bad = || FieldError::BadElement { literal: s.to_string(), field: self.to_string() };
        match self.gf() {
            Some(g) => {
                let k: u64 = s.parse().map_err(|_| bad())?;
                if k >= g.q {
                    return Err(bad());
                }
                Ok(FieldElement::Finite(k))
            }
            None => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s, "1"),
                };
                let num: BigInt = num.parse().map_err(|_| bad())?;
                let den: BigInt = den.parse().map_err(|_| bad())?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(FieldElement::Rational(BigRational::new(num, den)))
            }
        }
    }

    /// Element in the prime subfield, if it is one; returns its residue.
    pub fn prime_residue(&self, a: &FieldElement) -> Option<BigInt> {
        match (self.gf(), a) {
            (Some(g), FieldElement::Finite(k)) if *k < g.p => Some(BigInt::from(*k)),
            (None, FieldElement::Rational(r)) if r.is_integer() => Some(r.numer().clone()),
            _ => None,
        }
    }

    /// Sum of a sequence of elements.
    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a FieldElement>) -> FieldElement {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    /// Rank of a matrix by Gaussian elimination.
    pub fn rank(&self, rows: &[Vec<FieldElement>]) -> usize {
        let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(pivot) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = self.inv(&m[rank][c]).unwrap();
            let pivot_row: Vec<FieldElement> = m[rank].iter().map(|x| self.mul(x, &inv)).collect();
            for (r, row) in m.iter_mut().enumerate() {
                if r == rank || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = self.sub(x, &self.mul(&factor, y));
                }
            }
            m[rank] = pivot_row;
            rank += 1;
            if rank == m.len() {
                break;
            }
        }
        rank
    }
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let m = BigInt::from(p);
        let r = ((self % &m) + &m) % &m;
        r.abs().to_u64().unwrap()
    }
}
