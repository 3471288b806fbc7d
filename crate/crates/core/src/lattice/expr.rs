//! Lattice expressions: `U`, `U(m)`, `A_n`, `D_n`, `E6`, `E7`, `E8`, literal
//! Gram matrices like `[[2,1],[1,2]]`, any of them scaled by `(m)`, joined
//! with `+` into an orthogonal sum.

use num_bigint::BigInt;

use super::LatticeError;
use crate::matrix::{IntMatrix, JsonInt};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Hyperbolic,
    A(usize),
    D(usize),
    E(usize),
    Literal(IntMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub atom: Atom,
    pub scale: i64,
}

/// Parsed orthogonal sum of atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeExpr {
    pub terms: Vec<Term>,
}

impl LatticeExpr {
    pub fn parse(input: &str) -> Result<Self, LatticeError> {
        let src: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if src.is_empty() {
            return Err(LatticeError::Parse("empty lattice expression".into()));
        }
        let terms = split_top_level(&src)?
            .into_iter()
            .map(parse_term)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LatticeExpr { terms })
    }

    /// Block-diagonal Gram matrix; root lattices are negative definite.
    pub fn gram(&self) -> Result<IntMatrix, LatticeError> {
        let blocks = self
            .terms
            .iter()
            .map(|t| {
                let base = match &t.atom {
                    Atom::Hyperbolic => IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]]),
                    Atom::A(n) => negative_cartan(*n, &a_edges(*n)),
                    Atom::D(n) => negative_cartan(*n, &d_edges(*n)),
                    Atom::E(n) => negative_cartan(*n, &e_edges(*n)),
                    Atom::Literal(m) => {
                        if !m.is_symmetric() {
                            return Err(LatticeError::Validation(
                                "literal Gram matrix is not symmetric".into(),
                            ));
                        }
                        m.clone()
                    }
                };
                Ok(scale(&base, t.scale))
            })
            .collect::<Result<Vec<_>, LatticeError>>()?;
        Ok(IntMatrix::block_diagonal(&blocks))
    }
}

fn scale(m: &IntMatrix, k: i64) -> IntMatrix {
    if k == 1 {
        return m.clone();
    }
    let rows = m
        .to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|x| x * BigInt::from(k)).collect())
        .collect();
    IntMatrix::from_rows(rows).expect("square")
}

fn split_top_level(src: &str) -> Result<Vec<&str>, LatticeError> {
    let mut parts = Vec::new();
    let mut depth: i32 = 0;
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(LatticeError::Parse(format!("unbalanced brackets in {src:?}")));
                }
            }
            '+' if depth == 0 => {
                parts.push(&src[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(LatticeError::Parse(format!("unbalanced brackets in {src:?}")));
    }
    parts.push(&src[start..]);
    if parts.iter().any(|p| p.is_empty()) {
        return Err(LatticeError::Parse(format!("empty term in {src:?}")));
    }
    Ok(parts)
}

fn parse_term(term: &str) -> Result<Term, LatticeError> {
    // optional trailing "(m)" scaling
    let (body, scale) = match term.strip_suffix(')').and_then(|t| t.rfind('(').map(|i| (t, i))) {
        Some((t, i)) => {
            let k: i64 = t[i + 1..]
                .parse()
                .map_err(|_| LatticeError::Parse(format!("bad scaling in {term:?}")))?;
            if k == 0 {
                return Err(LatticeError::Parse(format!("zero scaling in {term:?}")));
            }
            (&t[..i], k)
        }
        None => (term, 1),
    };
    let atom = if body.starts_with('[') {
        let rows: Vec<Vec<JsonInt>> = serde_json::from_str(body)
            .map_err(|e| LatticeError::Parse(format!("bad literal {body:?}: {e}")))?;
        let m = IntMatrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| x.0).collect())
                .collect(),
        )
        .map_err(|e| LatticeError::Parse(e.to_string()))?;
        if !m.is_square() || m.rows() == 0 {
            return Err(LatticeError::Validation(format!(
                "literal Gram matrix must be square and non-empty, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        Atom::Literal(m)
    } else if body == "U" {
        Atom::Hyperbolic
    } else {
        let (kind, rest) = body.split_at(1);
        let n: usize = rest
            .trim_start_matches('_')
            .parse()
            .map_err(|_| LatticeError::Parse(format!("unknown lattice atom {body:?}")))?;
        match kind {
            "A" if n >= 1 => Atom::A(n),
            "D" if n >= 2 => Atom::D(n),
            "E" if (6..=8).contains(&n) => Atom::E(n),
            _ => return Err(LatticeError::Parse(format!("unknown lattice atom {body:?}"))),
        }
    };
    Ok(Term { atom, scale })
}

fn negative_cartan(n: usize, edges: &[(usize, usize)]) -> IntMatrix {
    let mut m = IntMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = BigInt::from(-2);
    }
    for &(a, b) in edges {
        m[(a, b)] = BigInt::from(1);
        m[(b, a)] = BigInt::from(1);
    }
    m
}

fn a_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

/// Chain `0 - 1 - ... - (n-2)` with node `n-1` hanging off `n-3`.
fn d_edges(n: usize) -> Vec<(usize, usize)> {
    if n == 2 {
        return Vec::new();
    }
    let mut e: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
    e.push((n - 3, n - 1));
    e
}

/// Bourbaki numbering, zero-based: chain 0-2-3-4-..., node 1 on node 3.
fn e_edges(n: usize) -> Vec<(usize, usize)> {
    let mut e = vec![(0, 2), (1, 3)];
    e.extend((3..n).map(|i| (i - 1, i)));
    e
}
