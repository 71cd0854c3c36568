use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::field::{Characteristic, Field, FieldElement};
use crate::par;
use crate::poly::{MultiExponent, SparsePolynomial};

use super::chains::{exact_binom, lucas_binom};
use super::PolarizeError;

/// Default cap on the number of expanded terms in the symbolic oracle.
pub const DEFAULT_EXPANSION_BUDGET: u64 = 200_000_000;

/// The formal `n`-th defect of a polynomial in `d` variables: a polynomial
/// in `n * d` variables, variable `(i, j)` being coordinate `j` of block `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalDefect {
    n: usize,
    base_d: usize,
    poly: SparsePolynomial,
}

impl FormalDefect {
    pub fn new(n: usize, base_d: usize, poly: SparsePolynomial) -> Self {
        assert_eq!(poly.nvars(), n * base_d);
        FormalDefect { n, base_d, poly }
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn base_dim(&self) -> usize {
        self.base_d
    }

    pub fn poly(&self) -> &SparsePolynomial {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// The polynomial with blocks reordered: block `i` of the result is block
    /// `perm[i]` of `self`.
    pub fn permute_blocks(&self, perm: &[usize]) -> SparsePolynomial {
        let d = self.base_d;
        let terms = self.poly.terms().map(|(m, c)| {
            let src = m.as_slice();
            let mut out = vec![0; src.len()];
            for (i, &from) in perm.iter().enumerate() {
                out[i * d..(i + 1) * d].copy_from_slice(&src[from * d..(from + 1) * d]);
            }
            (MultiExponent::new(out), c.clone())
        });
        SparsePolynomial::from_terms(self.poly.field(), self.poly.nvars(), terms)
    }
}

impl fmt::Display for FormalDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.base_d;
        f.write_str(&self.poly.display_with(&|v| format!("x{}_{}", v / d + 1, v % d + 1)))
    }
}

fn check_input(f: &SparsePolynomial, n: usize) -> Result<(), PolarizeError> {
    if n == 0 {
        return Err(PolarizeError::ZeroArity);
    }
    if !f.constant_term().is_zero() {
        return Err(PolarizeError::ConstantTerm);
    }
    Ok(())
}

fn binom_u128(a: u128, b: u128) -> u128 {
    let b = b.min(a - b);
    (0..b).fold(1u128, |acc, i| acc.saturating_mul(a - i) / (i + 1))
}

/// Number of terms the literal expansion of `n`-th defect produces before
/// cancellation.
pub fn expansion_size(f: &SparsePolynomial, n: usize) -> u128 {
    let mut total = 0u128;
    for m in f.support() {
        for k in 1..=n as u128 {
            let per_subset = m
                .as_slice()
                .iter()
                .fold(1u128, |acc, &e| acc.saturating_mul(binom_u128(e as u128 + k - 1, k - 1)));
            total = total.saturating_add(binom_u128(n as u128, k).saturating_mul(per_subset));
        }
    }
    total
}

/// Compositions of `total` into `parts` non-negative parts with their
/// multinomial coefficients.
fn compositions(total: u32, parts: usize) -> Vec<(Vec<u32>, BigUint)> {
    fn rec(rest: u32, parts: usize, prefix: &mut Vec<u32>, coef: BigUint, out: &mut Vec<(Vec<u32>, BigUint)>) {
        if parts == 1 {
            prefix.push(rest);
            out.push((prefix.clone(), coef));
            prefix.pop();
            return;
        }
        for r in 0..=rest {
            prefix.push(r);
            rec(rest - r, parts - 1, prefix, &coef * exact_binom(rest as u64, r as u64), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::with_capacity(parts), BigUint::one(), &mut out);
    out
}

/// Terms of `f(x_1 + ... + x_k)` over `k * d` variables, by the multinomial
/// theorem applied coordinatewise.
fn expand_block_sum(f: &SparsePolynomial, k: usize) -> HashMap<Vec<u32>, FieldElement> {
    let field = f.field();
    let d = f.nvars();
    let mut out: HashMap<Vec<u32>, FieldElement> = HashMap::new();
    for (m, c) in f.terms() {
        // per coordinate j: list of (block exponents, multinomial)
        let per_coord: Vec<Vec<(Vec<u32>, FieldElement)>> = m
            .as_slice()
            .iter()
            .map(|&e| {
                compositions(e, k)
                    .into_iter()
                    .map(|(parts, coef)| (parts, field.from_biguint(&coef)))
                    .filter(|(_, coef)| !coef.is_zero())
                    .collect()
            })
            .collect();
        let mut exps = vec![0u32; k * d];
        product(&per_coord, 0, d, &mut exps, c.clone(), field, &mut out);
    }
    out.retain(|_, v| !v.is_zero());
    out
}

fn product(
    per_coord: &[Vec<(Vec<u32>, FieldElement)>],
    j: usize,
    d: usize,
    exps: &mut Vec<u32>,
    coef: FieldElement,
    field: &Field,
    out: &mut HashMap<Vec<u32>, FieldElement>,
) {
    if j == per_coord.len() {
        accumulate(out, exps.clone(), coef, field);
        return;
    }
    for (parts, c) in &per_coord[j] {
        for (b, &r) in parts.iter().enumerate() {
            exps[b * d + j] = r;
        }
        product(per_coord, j + 1, d, exps, field.mul(&coef, c), field, out);
    }
    for b in 0..exps.len() / d {
        exps[b * d + j] = 0;
    }
}

fn accumulate(map: &mut HashMap<Vec<u32>, FieldElement>, key: Vec<u32>, c: FieldElement, field: &Field) {
    match map.get_mut(&key) {
        Some(v) => *v = field.add(v, &c),
        None => {
            map.insert(key, c);
        }
    }
}

/// Subsets of `{0..n}` of size `k`, each as an increasing list.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// The formal `n`-th defect: the alternating sum of `f` over all nonempty
/// subset sums of `n` block variables, expanded exactly and not reduced.
pub fn formal_defect(f: &SparsePolynomial, n: usize) -> Result<FormalDefect, PolarizeError> {
    formal_defect_budgeted(f, n, DEFAULT_EXPANSION_BUDGET)
}

pub fn formal_defect_budgeted(f: &SparsePolynomial, n: usize, budget: u64) -> Result<FormalDefect, PolarizeError> {
    check_input(f, n)?;
    let needed = expansion_size(f, n);
    if needed > budget as u128 {
        return Err(PolarizeError::BudgetExceeded { what: "formal expansion", needed, budget });
    }
    let field = f.field();
    let d = f.nvars();
    let partials = par::map_range(n, |idx| {
        let k = idx + 1;
        let expansion = expand_block_sum(f, k);
        let negate = (n - k) % 2 == 1;
        let mut acc: HashMap<Vec<u32>, FieldElement> = HashMap::new();
        for subset in subsets(n, k) {
            for (key, c) in &expansion {
                let mut full = vec![0u32; n * d];
                for (b, &target) in subset.iter().enumerate() {
                    full[target * d..(target + 1) * d].copy_from_slice(&key[b * d..(b + 1) * d]);
                }
                let c = if negate { field.neg(c) } else { c.clone() };
                accumulate(&mut acc, full, c, field);
            }
        }
        acc
    });
    let mut total: HashMap<Vec<u32>, FieldElement> = HashMap::new();
    for part in partials {
        for (key, c) in part {
            accumulate(&mut total, key, c, field);
        }
    }
    let poly = SparsePolynomial::from_terms(field, n * d, total.into_iter().map(|(k, c)| (MultiExponent::new(k), c)));
    Ok(FormalDefect::new(n, d, poly))
}

/// The `s`-th defect of a single monomial by summing over all chains
/// `m = m_1 > ... > m_s > 0` of `binom(m_1, m_2) ... binom(m_{s-1}, m_s)`
/// times `x_1^{m_s} x_2^{m_{s-1} - m_s} ... x_s^{m_1 - m_2}`.
pub fn formal_defect_via_chains(mono: &SparsePolynomial, s: usize) -> Result<FormalDefect, PolarizeError> {
    if mono.len() != 1 {
        return Err(PolarizeError::NotMonomial(mono.len()));
    }
    if s == 0 {
        return Err(PolarizeError::ZeroArity);
    }
    let (m, c) = mono.terms().next().map(|(m, c)| (m.clone(), c.clone())).unwrap();
    if m.is_zero() {
        return Err(PolarizeError::ConstantTerm);
    }
    let field = mono.field();
    let d = mono.nvars();
    let below = strictly_below(&m);
    let mut out = SparsePolynomial::zero(field, s * d);
    let mut chain = vec![m.clone()];
    chain_walk(&below, s, &mut chain, &mut |links| {
        let mut coef = BigUint::one();
        for w in links.windows(2) {
            for (&a, &b) in w[0].as_slice().iter().zip(w[1].as_slice()) {
                coef *= exact_binom(a as u64, b as u64);
            }
        }
        let value = field.mul(&c, &field.from_biguint(&coef));
        if value.is_zero() {
            return;
        }
        let mut exps = vec![0u32; s * d];
        // block 1 gets m_s, block k gets m_{s-k+1} - m_{s-k+2}
        for block in 0..s {
            let idx = s - 1 - block;
            let part = if block == 0 { links[idx].clone() } else { links[idx].minus(&links[idx + 1]) };
            exps[block * d..(block + 1) * d].copy_from_slice(part.as_slice());
        }
        out.add_term(MultiExponent::new(exps), value);
    });
    Ok(FormalDefect::new(s, d, out))
}

/// All nonzero multiexponents componentwise at most `m`.
fn strictly_below(m: &MultiExponent) -> Vec<MultiExponent> {
    let mut out = vec![Vec::new()];
    for &e in m.as_slice() {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (0..=e).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(MultiExponent::new).filter(|v| !v.is_zero()).collect()
}

fn chain_walk(below: &[MultiExponent], s: usize, chain: &mut Vec<MultiExponent>, visit: &mut dyn FnMut(&[MultiExponent])) {
    if chain.len() == s {
        visit(chain);
        return;
    }
    let last = chain.last().unwrap().clone();
    for next in below {
        if next.divides(&last) && *next != last {
            chain.push(next.clone());
            chain_walk(below, s, chain, visit);
            chain.pop();
        }
    }
}

/// Combinatorial degree by the `p`-weight formula; `-1` for zero.
pub fn comb_degree(f: &SparsePolynomial) -> Result<i64, PolarizeError> {
    if !f.constant_term().is_zero() {
        return Err(PolarizeError::ConstantTerm);
    }
    Ok(f.p_degree())
}

/// `Δ^{k+1}` from `Δ^k` by the formal recurrence
/// `Δ^k(y_1 + y_2, y_3, ...) - Δ^k(y_1, y_3, ...) - Δ^k(y_2, y_3, ...)`:
/// the first block exponent `m` of every term splits as `r + (m - r)` with
/// `0 != r != m`, the two extreme splits cancelling the subtracted terms.
fn next_defect(prev: &FormalDefect, budget: u64, produced: &mut u64) -> Result<FormalDefect, PolarizeError> {
    let field = prev.poly.field();
    let d = prev.base_d;
    let k = prev.n;
    let chr = field.characteristic();
    let mut acc: HashMap<Vec<u32>, FieldElement> = HashMap::new();
    for (m, c) in prev.poly.terms() {
        let first = &m.as_slice()[..d];
        let rest = &m.as_slice()[d..];
        let splits: u128 = first.iter().map(|&e| e as u128 + 1).product();
        *produced = produced.saturating_add(splits.min(u64::MAX as u128) as u64);
        if *produced > budget {
            return Err(PolarizeError::BudgetExceeded { what: "formal recurrence", needed: *produced as u128, budget });
        }
        let mut r = vec![0u32; d];
        loop {
            if r.iter().any(|&x| x > 0) && r.as_slice() != first {
                let mut coef = c.clone();
                for (&a, &b) in first.iter().zip(&r) {
                    let binom = match chr {
                        Characteristic::Prime(p) => field.from_int(lucas_binom(a as u64, b as u64, p) as i64),
                        Characteristic::Infinite => field.from_biguint(&exact_binom(a as u64, b as u64)),
                    };
                    coef = field.mul(&coef, &binom);
                    if coef.is_zero() {
                        break;
                    }
                }
                if !coef.is_zero() {
                    let mut key = Vec::with_capacity((k + 1) * d);
                    key.extend_from_slice(&r);
                    key.extend(first.iter().zip(&r).map(|(a, b)| a - b));
                    key.extend_from_slice(rest);
                    accumulate(&mut acc, key, coef, field);
                }
            }
            let Some(j) = (0..d).rev().find(|&j| r[j] < first[j]) else { break };
            r[j] += 1;
            r[j + 1..].iter_mut().for_each(|x| *x = 0);
        }
    }
    let poly = SparsePolynomial::from_terms(field, (k + 1) * d, acc.into_iter().map(|(k, c)| (MultiExponent::new(k), c)));
    Ok(FormalDefect::new(k + 1, d, poly))
}

/// The formal `n`-th defect by iterating the three-term recurrence from
/// `Δ^1 f = f`. Agrees with [`formal_defect`] term for term.
pub fn formal_defect_recurrence(f: &SparsePolynomial, n: usize, budget: u64) -> Result<FormalDefect, PolarizeError> {
    check_input(f, n)?;
    let mut produced = 0u64;
    let mut cur = FormalDefect::new(1, f.nvars(), f.clone());
    while cur.n < n {
        cur = next_defect(&cur, budget, &mut produced)?;
    }
    Ok(cur)
}

/// Combinatorial degree by symbolic polarization: the `n` with a nonzero
/// formal `n`-th defect and a vanishing `(n+1)`-st one. Defects are built by
/// the formal recurrence; `budget` caps the number of generated terms.
pub fn comb_degree_oracle(f: &SparsePolynomial, budget: u64) -> Result<i64, PolarizeError> {
    if !f.constant_term().is_zero() {
        return Err(PolarizeError::ConstantTerm);
    }
    if f.is_zero() {
        return Ok(-1);
    }
    let mut produced = 0u64;
    let mut cur = FormalDefect::new(1, f.nvars(), f.clone());
    loop {
        let next = next_defect(&cur, budget, &mut produced)?;
        if next.is_zero() {
            return Ok(cur.n as i64);
        }
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_blocked, parse_poly};

    fn gf(p: u64, e: u32) -> Field {
        Field::finite(p, e).unwrap()
    }

    #[test]
    fn cube_in_char_two() {
        let f = gf(2, 2);
        let a = parse_poly("x1^3", &f, 1).unwrap();
        let d = formal_defect(&a, 2).unwrap();
        assert_eq!(d.poly(), &parse_blocked("x1_1*x2_1^2 + x1_1^2*x2_1", &f, 2, 1).unwrap());
        assert_eq!(formal_defect_via_chains(&a, 2).unwrap(), d);
    }

    #[test]
    fn bilinear_monomial() {
        for f in [gf(2, 1), gf(5, 1), Field::rational()] {
            let a = parse_poly("x1*x2", &f, 2).unwrap();
            let d = formal_defect(&a, 2).unwrap();
            assert_eq!(d.to_string(), "x1_2*x2_1 + x1_1*x2_2");
            assert_eq!(formal_defect_via_chains(&a, 2).unwrap(), d);
        }
    }

    #[test]
    fn first_defect_is_the_polynomial() {
        let f = gf(3, 1);
        let a = parse_poly("2*x1^2*x2", &f, 2).unwrap();
        assert_eq!(formal_defect(&a, 1).unwrap().poly(), &a);
        assert_eq!(formal_defect_via_chains(&a, 1).unwrap().poly(), &a);
    }

    #[test]
    fn vanishes_past_p_degree() {
        let f = gf(3, 1);
        let a = parse_poly("x1^7*x2^4", &f, 2).unwrap();
        assert!(formal_defect(&a, 6).unwrap().is_zero());
        assert!(!formal_defect(&a, 5).unwrap().is_zero());
    }

    #[test]
    fn oracle_examples() {
        let f = gf(2, 1);
        let a = parse_poly("x1 + x1^2", &f, 1).unwrap();
        assert_eq!(comb_degree_oracle(&a, DEFAULT_EXPANSION_BUDGET).unwrap(), 1);
        assert_eq!(comb_degree(&a).unwrap(), 1);
        let z = SparsePolynomial::zero(&f, 2);
        assert_eq!(comb_degree_oracle(&z, DEFAULT_EXPANSION_BUDGET).unwrap(), -1);
        assert_eq!(comb_degree(&z).unwrap(), -1);
        let g = parse_poly("x1^7*x2^4", &gf(3, 1), 2).unwrap();
        assert_eq!(comb_degree_oracle(&g, DEFAULT_EXPANSION_BUDGET).unwrap(), 5);
    }

    #[test]
    fn errors() {
        let f = gf(3, 1);
        let a = parse_poly("1 + x1", &f, 1).unwrap();
        assert_eq!(formal_defect(&a, 2), Err(PolarizeError::ConstantTerm));
        assert_eq!(comb_degree(&a), Err(PolarizeError::ConstantTerm));
        let two = parse_poly("x1 + x2", &f, 2).unwrap();
        assert_eq!(formal_defect_via_chains(&two, 2), Err(PolarizeError::NotMonomial(2)));
        let big = parse_poly("x1^8*x2^8*x3^8", &Field::rational(), 3).unwrap();
        assert!(matches!(formal_defect_budgeted(&big, 9, 1000), Err(PolarizeError::BudgetExceeded { .. })));
        assert!(matches!(comb_degree_oracle(&big, 1000), Err(PolarizeError::BudgetExceeded { .. })));
    }

    #[test]
    fn recurrence_matches_literal_expansion() {
        for (text, f, d) in [
            ("x1^3*x2 + 2*x2^2", gf(5, 1), 2),
            ("x1^3 + x1*x2^2", gf(2, 2), 2),
            ("x1^2*x2*x3", Field::rational(), 3),
            ("x1^4 + x2^3*x1", gf(3, 1), 2),
        ] {
            let a = parse_poly(text, &f, d).unwrap();
            for n in 1..=5 {
                let lit = formal_defect(&a, n).unwrap();
                assert_eq!(formal_defect_recurrence(&a, n, DEFAULT_EXPANSION_BUDGET).unwrap(), lit, "{text} n={n}");
            }
        }
    }

    #[test]
    fn block_symmetry() {
        let f = gf(5, 1);
        let a = parse_poly("x1^3*x2 + 2*x2^2", &f, 2).unwrap();
        let d = formal_defect(&a, 3).unwrap();
        for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
            assert_eq!(&d.permute_blocks(&perm), d.poly());
        }
    }
}
