use crate::field::Field;
use crate::poly::{MultiExponent, SparsePolynomial};

use super::ClassifyError;

/// Lexicographically least `(a_0, ..., a_{e-1})` with
/// `Σ a_i p^i = n + q - 1` and `Σ a_i < n`.
pub fn counterexample_digits(p: u64, e: u32, n: u64) -> Option<Vec<u64>> {
    let q = p.checked_pow(e)?;
    let target = n.checked_add(q - 1)?;
    let places: Vec<u64> = (0..e).map(|i| p.pow(i)).collect();
    fn rec(i: usize, rest: u64, budget: u64, places: &[u64], cur: &mut Vec<u64>) -> bool {
        if i + 1 == places.len() {
            if rest.is_multiple_of(places[i]) && rest / places[i] <= budget {
                cur.push(rest / places[i]);
                return true;
            }
            return false;
        }
        for a in 0..=(rest / places[i]).min(budget) {
            cur.push(a);
            if rec(i + 1, rest - a * places[i], budget - a, places, cur) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::with_capacity(e as usize);
    rec(0, target, n - 1, &places, &mut cur).then_some(cur)
}

/// A non-homogeneous `n`-application over `GF(q)^d`, `q = p^e`:
/// `x_1 ⋯ x_n` plus the product over consecutive variables where the next
/// `a_i` variables are raised to `p^i`, for the digits of
/// [`counterexample_digits`]. Its degree is `n + q - 1`.
pub fn construct_counterexample(field: &Field, n: u64, d: usize) -> Result<SparsePolynomial, ClassifyError> {
    let (Some(p), Some(q)) = (field.characteristic().prime(), field.order()) else {
        return Err(ClassifyError::Precondition("needs a finite field".into()));
    };
    let e = field.degree();
    if e < 2 {
        return Err(ClassifyError::Precondition(format!(
            "needs a proper extension field (e >= 2); over {field} every n-application is homogeneous of degree n"
        )));
    }
    if n < 5 {
        return Err(ClassifyError::Precondition(format!(
            "n = {n} < 5: if n < 5 then the n-applications are exactly the homogeneous polynomials of degree n"
        )));
    }
    if n < q {
        return Err(ClassifyError::Precondition(format!("needs n >= q, got n = {n} < q = {q}")));
    }
    if (d as u64) < n {
        return Err(ClassifyError::Precondition(format!("needs d >= n, got d = {d} < n = {n}")));
    }
    let digits = counterexample_digits(p, e, n)
        .ok_or_else(|| ClassifyError::Precondition(format!("no digit representation of {} found", n + q - 1)))?;
    let mut head = vec![0u32; d];
    head[..n as usize].iter_mut().for_each(|x| *x = 1);
    let mut tail = vec![0u32; d];
    let mut next = 0usize;
    for (i, &a) in digits.iter().enumerate() {
        for slot in &mut tail[next..next + a as usize] {
            *slot = p.pow(i as u32) as u32;
        }
        next += a as usize;
    }
    let one = field.one();
    Ok(SparsePolynomial::from_terms(
        field,
        d,
        [(MultiExponent::new(head), one.clone()), (MultiExponent::new(tail), one)],
    ))
}
