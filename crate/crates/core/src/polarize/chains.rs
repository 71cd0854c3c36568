use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::field::Characteristic;
use crate::poly::MultiExponent;

use super::PolarizeError;

/// `p`-weight of `t`: the sum of its base-`p` digits; `t` itself when `p` is
/// infinite.
pub fn p_weight(t: u64, chr: Characteristic) -> u64 {
    match chr {
        Characteristic::Infinite => t,
        Characteristic::Prime(p) => {
            let (mut t, mut sum) = (t, 0);
            while t > 0 {
                sum += t % p;
                t /= p;
            }
            sum
        }
    }
}

fn small_binom(a: u64, b: u64, p: u64) -> u64 {
    if b > a {
        return 0;
    }
    let mut num = 1u128;
    let mut den = 1u128;
    let p = p as u128;
    for i in 0..b as u128 {
        num = num * ((a as u128 - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    // den is a unit because every factor is below p
    let mut inv = 1u128;
    let (mut base, mut e) = (den, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            inv = inv * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    (num * inv % p) as u64
}

/// `binom(a, b) mod p` as the product of digit binomials.
pub fn lucas_binom(a: u64, b: u64, p: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    let mut acc = 1u64;
    while b > 0 || a > 0 {
        let (ad, bd) = (a % p, b % p);
        if bd > ad {
            return 0;
        }
        acc = ((acc as u128 * small_binom(ad, bd, p) as u128) % p as u128) as u64;
        a /= p;
        b /= p;
    }
    acc % p
}

/// Exact `binom(a, b)`.
pub(crate) fn exact_binom(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        acc = acc * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    acc
}

/// Whether `binom(m, n) = prod_i binom(m_i, n_i)` is nonzero in a field of
/// the given characteristic.
pub fn multi_binom_nonzero(m: &MultiExponent, n: &MultiExponent, chr: Characteristic) -> bool {
    m.as_slice().iter().zip(n.as_slice()).all(|(&a, &b)| match chr {
        Characteristic::Infinite => b <= a,
        Characteristic::Prime(p) => lucas_binom(a as u64, b as u64, p) != 0,
    })
}

/// A strictly decreasing chain `m_1 > m_2 > ... > m_s > 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RegularChain(Vec<Vec<u32>>);

impl RegularChain {
    pub fn new(links: Vec<MultiExponent>) -> Self {
        RegularChain(links.into_iter().map(|m| m.as_slice().to_vec()).collect())
    }

    pub fn links(&self) -> Vec<MultiExponent> {
        self.0.iter().map(|v| MultiExponent::new(v.clone())).collect()
    }

    /// Number of nonzero links.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The last nonzero link.
    pub fn terminal(&self) -> Option<MultiExponent> {
        self.0.last().map(|v| MultiExponent::new(v.clone()))
    }

    /// Strictly decreasing, ends above zero, and every consecutive
    /// generalized binomial is nonzero.
    pub fn is_regular(&self, chr: Characteristic) -> bool {
        let links = self.links();
        let decreasing = links.windows(2).all(|w| w[1].divides(&w[0]) && w[1] != w[0]);
        let positive = links.last().is_none_or(|m| !m.is_zero());
        decreasing && positive && links.windows(2).all(|w| multi_binom_nonzero(&w[0], &w[1], chr))
    }
}

impl fmt::Display for RegularChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let links = self.links();
        for m in &links {
            write!(f, "{m}>")?;
        }
        let d = links.first().map_or(0, MultiExponent::len);
        write!(f, "{}", MultiExponent::zero(d))
    }
}

/// Result of [`longest_regular_chains`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainReport {
    pub length: u64,
    pub chains: Option<Vec<RegularChain>>,
}

/// Base-`p` digits of `t`, least significant first (`[t]` for infinity).
fn digits(t: u64, chr: Characteristic) -> Vec<u64> {
    match chr {
        Characteristic::Infinite => vec![t],
        Characteristic::Prime(p) => {
            let mut out = Vec::new();
            let mut t = t;
            while t > 0 {
                out.push(t % p);
                t /= p;
            }
            out
        }
    }
}

fn place(chr: Characteristic, k: usize) -> u64 {
    match chr {
        Characteristic::Infinite => 1,
        Characteristic::Prime(p) => p.pow(k as u32),
    }
}

/// Length of the longest regular chains for `m`, i.e. the sum of the
/// `p`-weights of its exponents, optionally with every such chain.
///
/// Chains are produced by lowering one base-`p` digit of one exponent by one
/// at each step, coordinates in increasing order and higher digits first.
pub fn longest_regular_chains(
    m: &MultiExponent,
    chr: Characteristic,
    enumerate_all: bool,
) -> Result<ChainReport, PolarizeError> {
    if m.is_zero() {
        return Err(PolarizeError::ZeroExponent);
    }
    let length = m.p_degree(chr);
    let chains = enumerate_all.then(|| {
        let mut out = Vec::new();
        let mut path = vec![m.clone()];
        descend(m, chr, &mut path, &mut out);
        out
    });
    if let Some(all) = &chains {
        for c in all {
            debug_assert_eq!(c.len() as u64, length);
            debug_assert!(c.is_regular(chr), "chain {c} is not regular");
        }
    }
    Ok(ChainReport { length, chains })
}

fn descend(m: &MultiExponent, chr: Characteristic, path: &mut Vec<MultiExponent>, out: &mut Vec<RegularChain>) {
    if m.is_zero() {
        path.pop();
        out.push(RegularChain::new(path.clone()));
        path.push(m.clone());
        return;
    }
    for (i, &e) in m.as_slice().iter().enumerate() {
        let ds = digits(e as u64, chr);
        for k in (0..ds.len()).rev() {
            if ds[k] == 0 {
                continue;
            }
            let mut next = m.as_slice().to_vec();
            next[i] -= place(chr, k) as u32;
            let next = MultiExponent::new(next);
            path.push(next.clone());
            descend(&next, chr, path, out);
            path.pop();
        }
    }
}

/// A one-hot terminal link `x_var^power` of a longest regular chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LastLink {
    /// One-based coordinate.
    pub var: usize,
    pub power: u64,
}

/// Every terminal link occurring among the longest regular chains for `m`.
/// All powers equal 1 exactly when `x^m` is totally reduced.
pub fn last_link_profile(m: &MultiExponent, chr: Characteristic) -> Result<BTreeSet<LastLink>, PolarizeError> {
    if m.is_zero() {
        return Err(PolarizeError::ZeroExponent);
    }
    let mut out = BTreeSet::new();
    for (i, &e) in m.as_slice().iter().enumerate() {
        for (k, &dig) in digits(e as u64, chr).iter().enumerate() {
            if dig > 0 {
                out.insert(LastLink { var: i + 1, power: place(chr, k) });
            }
        }
    }
    Ok(out)
}
