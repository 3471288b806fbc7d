//! Integral isometries of a [`GramLattice`]: validation, orientation tests,
//! Eichler transvections, parabolic groups and invariant-subspace probes.

mod eichler;
mod parabolic;
mod subspace;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

pub use eichler::eichler;
pub use parabolic::{parabolic_group, ParabolicGroup};
pub use subspace::{fixed_subspace, orbit_span, Subspace};

use crate::lattice::{GramLattice, LatticeError};
use crate::matrix::{IntMatrix, JsonInt, MatrixError};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum IsometryError {
    #[error("matrix does not preserve the form")]
    NotIsometry,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not integral: {0}")]
    Integrality(String),
    #[error("empty generator list")]
    Empty,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// An integer matrix certified to preserve the form of its lattice. The
/// matrix acts on coordinate columns: `x -> M x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    matrix: IntMatrix,
    lattice: Arc<GramLattice>,
    det: i8,
    cone_preserving: bool,
}

impl Isometry {
    /// Checks `M^T G M = G`, then records the determinant and whether the
    /// positive cone is preserved.
    pub fn validate(matrix: IntMatrix, lattice: &Arc<GramLattice>) -> Result<Self, IsometryError> {
        let n = lattice.rank();
        if !matrix.is_square() || matrix.rows() != n {
            return Err(IsometryError::Dimension {
                expected: n,
                found: matrix.rows().max(matrix.cols()),
            });
        }
        let Some(v) = lattice.cone_reference() else {
            return Err(LatticeError::NoCone(lattice.signature()).into());
        };
        let g = lattice.gram();
        let pulled = matrix.transpose().checked_mul(g)?.checked_mul(&matrix)?;
        if &pulled != g {
            return Err(IsometryError::NotIsometry);
        }
        let d = matrix.det()?;
        let det = if d.is_one() {
            1
        } else if d == -BigInt::one() {
            -1
        } else {
            unreachable!("form-preserving matrix over a nondegenerate lattice has det {d}")
        };
        let mv = matrix.mul_vec(v);
        let cone_preserving = lattice.inner(&mv, v).is_positive();
        Ok(Isometry {
            matrix,
            lattice: Arc::clone(lattice),
            det,
            cone_preserving,
        })
    }

    pub fn identity(lattice: &Arc<GramLattice>) -> Result<Self, IsometryError> {
        Self::validate(IntMatrix::identity(lattice.rank()), lattice)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.matrix
    }

    pub fn lattice(&self) -> &Arc<GramLattice> {
        &self.lattice
    }

    pub fn det(&self) -> i8 {
        self.det
    }

    pub fn is_cone_preserving(&self) -> bool {
        self.cone_preserving
    }

    /// Determinant one and preserves the positive cone.
    pub fn in_so_plus(&self) -> bool {
        self.det == 1 && self.cone_preserving
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    pub fn apply_rational(&self, x: &[BigRational]) -> Vec<BigRational> {
        self.matrix.mul_rat_vec(x)
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry, IsometryError> {
        self.same_lattice(other)?;
        Ok(Isometry {
            matrix: self.matrix.checked_mul(&other.matrix)?,
            lattice: Arc::clone(&self.lattice),
            det: self.det * other.det,
            cone_preserving: self.cone_preserving == other.cone_preserving,
        })
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            matrix: self.matrix.inverse_unimodular().expect("isometries are unimodular"),
            lattice: Arc::clone(&self.lattice),
            det: self.det,
            cone_preserving: self.cone_preserving,
        }
    }

    pub fn pow(&self, k: i32) -> Isometry {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let k = k.unsigned_abs();
        Isometry {
            matrix: base.matrix.pow(k),
            lattice: Arc::clone(&self.lattice),
            det: if k % 2 == 0 { 1 } else { self.det },
            cone_preserving: base.cone_preserving || k % 2 == 0,
        }
    }

    /// Whether `(g - I)^k = 0`.
    pub fn is_unipotent_of_order(&self, k: u32) -> bool {
        self.matrix.sub_identity().pow(k).is_zero()
    }

    pub fn commutes_with(&self, other: &Isometry) -> bool {
        self.matrix.checked_mul(&other.matrix).ok() == other.matrix.checked_mul(&self.matrix).ok()
    }

    fn same_lattice(&self, other: &Isometry) -> Result<(), IsometryError> {
        if self.lattice.gram() != other.lattice.gram() {
            return Err(IsometryError::Precondition(
                "isometries act on different lattices".into(),
            ));
        }
        Ok(())
    }
}

/// A list of generators together with the isotropic vector they fix, if
/// known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    pub e: Option<Vec<BigInt>>,
    pub generators: Vec<Isometry>,
}

impl GeneratorSet {
    pub fn new(e: Option<Vec<BigInt>>, generators: Vec<Isometry>) -> Self {
        GeneratorSet { e, generators }
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn to_data(&self) -> GeneratorSetData {
        GeneratorSetData {
            e: self.e.as_ref().map(|v| v.iter().cloned().map(JsonInt).collect()),
            generators: self.generators.iter().map(|g| g.matrix.clone()).collect(),
        }
    }

    pub fn from_data(data: &GeneratorSetData, lattice: &Arc<GramLattice>) -> Result<Self, IsometryError> {
        let generators = data
            .generators
            .iter()
            .map(|m| Isometry::validate(m.clone(), lattice))
            .collect::<Result<Vec<_>, _>>()?;
        let e = data.e.as_ref().map(|v| v.iter().map(|x| x.0.clone()).collect::<Vec<_>>());
        if let Some(e) = &e {
            if e.len() != lattice.rank() {
                return Err(IsometryError::Dimension {
                    expected: lattice.rank(),
                    found: e.len(),
                });
            }
            if generators.iter().any(|g| &g.apply(e) != e) {
                return Err(IsometryError::Precondition(
                    "a generator does not fix the stated vector e".into(),
                ));
            }
        }
        Ok(GeneratorSet { e, generators })
    }
}

/// Serialized generator set: `{e, generators}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSetData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<JsonInt>>,
    pub generators: Vec<IntMatrix>,
}
