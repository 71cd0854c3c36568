use crate::field::{Field, FieldElement};

use super::{MultiExponent, PolyError, SparsePolynomial};

/// Parses `terms joined by '+'`, each term an optional coefficient literal
/// (or a bare `-`) followed by `*`-separated powers `xK^E`. Whitespace is
/// ignored.
pub fn parse_poly(text: &str, field: &Field, d: usize) -> Result<SparsePolynomial, PolyError> {
    parse_inner(text, field, d, None)
}

/// Like [`parse_poly`] but additionally accepts block variables `xI_J`
/// (block `I`, coordinate `J`, both one-based) in a polynomial over
/// `blocks * block_dim` variables.
pub fn parse_blocked(text: &str, field: &Field, blocks: usize, block_dim: usize) -> Result<SparsePolynomial, PolyError> {
    parse_inner(text, field, blocks * block_dim, Some(block_dim))
}

fn parse_inner(text: &str, field: &Field, d: usize, block_dim: Option<usize>) -> Result<SparsePolynomial, PolyError> {
    let compact: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(PolyError::Syntax { pos: 0, msg: "empty polynomial".into() });
    }
    let mut out = SparsePolynomial::zero(field, d);
    for term in split_on(&compact, '+') {
        let (m, c) = parse_term(term, field, d, block_dim, text.len())?;
        out.add_term(m, c);
    }
    Ok(out)
}

fn split_on(chars: &[(usize, char)], sep: char) -> Vec<&[(usize, char)]> {
    chars.split(|&(_, c)| c == sep).collect()
}

fn as_string(chars: &[(usize, char)]) -> String {
    chars.iter().map(|&(_, c)| c).collect()
}

fn parse_term(
    term: &[(usize, char)],
    field: &Field,
    d: usize,
    block_dim: Option<usize>,
    end: usize,
) -> Result<(MultiExponent, FieldElement), PolyError> {
    let Some(&(start, _)) = term.first() else {
        return Err(PolyError::Syntax { pos: end, msg: "empty term".into() });
    };
    let mut exps = vec![0u32; d];
    let mut coeff = field.one();
    // a leading minus directly before a variable negates the term
    let term = match term {
        [(_, '-'), (_, 'x'), ..] => {
            coeff = field.neg(&coeff);
            &term[1..]
        }
        _ => term,
    };
    for factor in split_on(term, '*') {
        let Some(&(pos, first)) = factor.first() else {
            return Err(PolyError::Syntax { pos: start, msg: "empty factor".into() });
        };
        if first == 'x' {
            let (var, e) = parse_power(&factor[1..], pos, d, block_dim)?;
            exps[var] = exps[var].checked_add(e).ok_or(PolyError::Syntax { pos, msg: "exponent overflow".into() })?;
        } else {
            let lit = field.parse_element(&as_string(factor))?;
            coeff = field.mul(&coeff, &lit);
        }
    }
    Ok((MultiExponent::new(exps), coeff))
}

fn parse_power(rest: &[(usize, char)], pos: usize, d: usize, block_dim: Option<usize>) -> Result<(usize, u32), PolyError> {
    let s = as_string(rest);
    let (name, exp) = match s.split_once('^') {
        Some((n, e)) => (n.to_string(), Some(e.to_string())),
        None => (s.clone(), None),
    };
    let bad = |msg: &str| PolyError::Syntax { pos, msg: format!("{msg} in `x{s}`") };
    let index = match (name.split_once('_'), block_dim) {
        (Some((block, coord)), Some(bd)) => {
            let block: usize = block.parse().map_err(|_| bad("bad block index"))?;
            let coord: usize = coord.parse().map_err(|_| bad("bad coordinate index"))?;
            if block == 0 || coord == 0 || coord > bd {
                return Err(bad("block variable out of range"));
            }
            (block - 1) * bd + coord
        }
        (Some(_), None) => return Err(bad("block variables are not allowed here")),
        (None, _) => name.parse().map_err(|_| bad("bad variable index"))?,
    };
    if index == 0 || index > d {
        return Err(PolyError::VariableOutOfRange { index, dim: d });
    }
    let e = match exp {
        Some(e) => e.parse().map_err(|_| bad("bad exponent"))?,
        None => 1,
    };
    Ok((index - 1, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_application_has_two_terms() {
        let f = Field::finite(2, 2).unwrap();
        let g = parse_poly("x1*x2*x3*x4*x5 + x1^2*x2^2*x3^2*x4^2", &f, 5).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.coefficient(&MultiExponent::new(vec![2, 2, 2, 2, 0])), f.one());
    }

    #[test]
    fn zero_and_cancellation() {
        let f = Field::finite(3, 1).unwrap();
        assert!(parse_poly("0", &f, 2).unwrap().is_zero());
        assert!(parse_poly("2*x1^2 + x1^2", &f, 1).unwrap().is_zero());
        assert!(parse_poly(" 2 * x1 ^ 2+x1^2 ", &f, 1).unwrap().is_zero());
    }

    #[test]
    fn unary_minus() {
        let f = Field::finite(3, 1).unwrap();
        assert_eq!(parse_poly("-x1^2 + x2", &f, 2).unwrap(), parse_poly("2*x1^2 + x2", &f, 2).unwrap());
        let q = Field::rational();
        assert!(parse_poly("-x1 + x1", &q, 1).unwrap().is_zero());
        assert!(matches!(parse_poly("--x1", &q, 1), Err(PolyError::Field(_))));
    }

    #[test]
    fn errors() {
        let f = Field::finite(3, 1).unwrap();
        assert_eq!(parse_poly("x3", &f, 2), Err(PolyError::VariableOutOfRange { index: 3, dim: 2 }));
        assert!(matches!(parse_poly("x1 +", &f, 2), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_poly("x1^", &f, 2), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_poly("7*x1", &f, 2), Err(PolyError::Field(_))));
        assert!(matches!(parse_poly("", &f, 2), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_poly("x1_1", &f, 2), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn block_variables() {
        let f = Field::finite(2, 1).unwrap();
        let g = parse_blocked("x1_1*x2_2 + x1_2*x2_1", &f, 2, 2).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.support().any(|m| m.as_slice() == [1, 0, 0, 1]));
    }
}
