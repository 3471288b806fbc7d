use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Isometry, IsometryError};
use crate::lattice::GramLattice;
use crate::matrix::{rational_kernel, rref, to_rational};

/// Rational subspace of `Q^n`, stored as reduced row echelon rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<BigRational>>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn span(ambient: usize, vectors: Vec<Vec<BigRational>>) -> Self {
        let basis = if vectors.is_empty() { Vec::new() } else { rref(vectors) };
        Subspace { ambient, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    /// Remainder of `v` after eliminating the pivot columns.
    fn reduce(&self, v: &[BigRational]) -> Vec<BigRational> {
        let mut r = v.to_vec();
        for row in &self.basis {
            let p = row.iter().position(|x| !x.is_zero()).expect("nonzero row");
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                *x -= &f * y;
            }
        }
        r
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    pub fn contains_integer(&self, v: &[BigInt]) -> bool {
        self.contains(&to_rational(v))
    }

    /// Adds `v` if it is new; returns whether the dimension grew.
    fn insert(&mut self, v: &[BigRational]) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        let r: Vec<BigRational> = r.into_iter().map(|x| x * &inv).collect();
        for row in self.basis.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                *x -= &f * y;
            }
        }
        let at = self
            .basis
            .iter()
            .position(|row| row.iter().position(|x| !x.is_zero()).unwrap() > p)
            .unwrap_or(self.basis.len());
        self.basis.insert(at, r);
        true
    }
}

fn check_dims(gens: &[Isometry], n: usize) -> Result<(), IsometryError> {
    for g in gens {
        if g.matrix().rows() != n {
            return Err(IsometryError::Dimension {
                expected: n,
                found: g.matrix().rows(),
            });
        }
    }
    Ok(())
}

/// Smallest subspace containing `v` and stable under every generator.
pub fn orbit_span(gens: &[Isometry], v: &[BigRational]) -> Result<Subspace, IsometryError> {
    let n = v.len();
    check_dims(gens, n)?;
    let mut span = Subspace::zero(n);
    let mut queue: Vec<Vec<BigRational>> = vec![v.to_vec()];
    while let Some(x) = queue.pop() {
        if !span.insert(&x) {
            continue;
        }
        if span.is_full() {
            break;
        }
        for g in gens {
            let gx = g.apply_rational(&x);
            if !span.contains(&gx) {
                queue.push(gx);
            }
        }
    }
    Ok(span)
}

/// Common fixed vectors: the intersection of the kernels of `g - I`.
pub fn fixed_subspace(gens: &[Isometry]) -> Result<Subspace, IsometryError> {
    let first = gens.first().ok_or(IsometryError::Empty)?;
    let n = first.matrix().rows();
    check_dims(gens, n)?;
    let mut rows = Vec::new();
    for g in gens {
        let d = g.matrix().sub_identity();
        for i in 0..n {
            rows.push(to_rational(d.row(i)));
        }
    }
    let kernel = rational_kernel(rows, n);
    Ok(Subspace::span(n, kernel))
}

impl Subspace {
    /// Whether every basis vector is orthogonal to `e` under `gram`.
    pub fn is_orthogonal_to(&self, lattice: &GramLattice, e: &[BigInt]) -> bool {
        let er = to_rational(e);
        self.basis
            .iter()
            .all(|b| lattice.inner_rational(b, &er).is_zero())
    }
}
