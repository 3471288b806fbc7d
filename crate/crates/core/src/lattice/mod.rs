//! Even hyperbolic lattices given by integer Gram matrices.

mod expr;
mod isotropic;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use expr::{Atom, LatticeExpr, Term};
pub use isotropic::{find_isotropic, find_isotropic_with_budget, DEFAULT_ISOTROPIC_BUDGET};

use crate::intpoly::{char_poly, squarefree_decomposition, SturmSequence};
use crate::matrix::{json_int, json_int_vec, primitive_integer, IntMatrix};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("cannot parse lattice: {0}")]
    Parse(String),
    #[error("invalid lattice: {0}")]
    Validation(String),
    #[error("degenerate Gram matrix (rank {rank} < {dim})")]
    Degenerate { rank: usize, dim: usize },
    #[error("lattice has no positive cone: signature {0}")]
    NoCone(Signature),
    #[error("search too large: {0}")]
    TooLarge(String),
}

/// Inertia `(n+, n0, n-)` of a real symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct Signature {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

impl Signature {
    pub fn new(positive: usize, zero: usize, negative: usize) -> Self {
        Signature {
            positive,
            zero,
            negative,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.positive == 1 && self.zero == 0 && self.negative >= 1
    }
}

impl From<[usize; 3]> for Signature {
    fn from(v: [usize; 3]) -> Self {
        Signature::new(v[0], v[1], v[2])
    }
}

impl From<Signature> for [usize; 3] {
    fn from(s: Signature) -> Self {
        [s.positive, s.zero, s.negative]
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.positive, self.zero, self.negative)
    }
}

/// Elementary divisors of the discriminant group `L^* / L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminantProfile {
    #[serde(with = "json_int_vec")]
    pub elementary_divisors: Vec<BigInt>,
    #[serde(with = "json_int")]
    pub group_order: BigInt,
    /// `(p, sigma)` when the group is `(Z/p)^(2 sigma)` for a prime `p`.
    pub p_elementary_sigma: Option<(u64, usize)>,
}

/// Exact inertia of a symmetric integer matrix, from the characteristic
/// polynomial: zero roots by the power of `t` dividing it, the rest by
/// Sturm counts on each squarefree factor weighted by multiplicity.
pub fn inertia(gram: &IntMatrix) -> Signature {
    let cp = char_poly(gram).expect("square Gram matrix");
    let zero = cp.coeffs().iter().take_while(|c| c.is_zero()).count();
    let rest = crate::intpoly::IntPolynomial::new(cp.coeffs()[zero..].to_vec());
    let origin = BigRational::zero();
    let (mut pos, mut neg) = (0, 0);
    for (f, m) in squarefree_decomposition(&rest) {
        let seq = SturmSequence::new(&f).expect("nonzero factor");
        pos += m as usize * seq.count_above(&origin);
        neg += m as usize * seq.count_below(&origin);
    }
    Signature::new(pos, zero, neg)
}

/// Symmetric integer bilinear form on `Z^n` with its signature and, for
/// hyperbolic forms, a reference vector picking the positive cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    name: String,
    gram: IntMatrix,
    signature: Signature,
    cone_reference: Option<Vec<BigInt>>,
}

impl GramLattice {
    pub fn new(name: impl Into<String>, gram: IntMatrix) -> Result<Self, LatticeError> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(LatticeError::Validation(format!(
                "Gram matrix must be square and non-empty, got {}x{}",
                gram.rows(),
                gram.cols()
            )));
        }
        if !gram.is_symmetric() {
            return Err(LatticeError::Validation("Gram matrix is not symmetric".into()));
        }
        let signature = inertia(&gram);
        let mut lattice = GramLattice {
            name: name.into(),
            gram,
            signature,
            cone_reference: None,
        };
        if signature.is_hyperbolic() {
            lattice.cone_reference = Some(lattice.default_cone_reference());
        }
        Ok(lattice)
    }

    /// Parses and assembles a lattice expression such as `U+E8+E8+D4`.
    pub fn build(expr: &str) -> Result<Self, LatticeError> {
        let gram = LatticeExpr::parse(expr)?.gram()?;
        Self::new(expr.trim(), gram)
    }

    /// Like [`GramLattice::build`] but rejects odd diagonal entries.
    pub fn build_even(expr: &str) -> Result<Self, LatticeError> {
        let l = Self::build(expr)?;
        if !l.is_even() {
            return Err(LatticeError::Validation(format!(
                "{expr} has an odd diagonal entry"
            )));
        }
        Ok(l)
    }

    pub fn with_cone_reference(mut self, v: Vec<BigInt>) -> Result<Self, LatticeError> {
        if !self.signature.is_hyperbolic() {
            return Err(LatticeError::NoCone(self.signature));
        }
        if v.len() != self.rank() {
            return Err(LatticeError::Validation(format!(
                "cone reference has length {}, lattice rank is {}",
                v.len(),
                self.rank()
            )));
        }
        if !self.norm(&v).is_positive() {
            return Err(LatticeError::Validation(
                "cone reference must have positive square".into(),
            ));
        }
        self.cone_reference = Some(v);
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.signature.is_hyperbolic()
    }

    pub fn cone_reference(&self) -> Option<&[BigInt]> {
        self.cone_reference.as_deref()
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn inner(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let gy = self.gram.mul_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.inner(x, x)
    }

    pub fn inner_rational(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let gy = self.gram.mul_rat_vec(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn det(&self) -> BigInt {
        self.gram.det().expect("square")
    }

    pub fn discriminant(&self) -> Result<DiscriminantProfile, LatticeError> {
        let diag = self.gram.smith_diagonal();
        let rank = diag.iter().filter(|d| !d.is_zero()).count();
        if rank < self.rank() {
            return Err(LatticeError::Degenerate {
                rank,
                dim: self.rank(),
            });
        }
        let mut divisors: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_one()).collect();
        divisors.sort();
        let group_order = divisors.iter().fold(BigInt::one(), |acc, d| acc * d);
        let p_elementary_sigma = match divisors.first() {
            Some(p)
                if divisors.len() % 2 == 0
                    && divisors.iter().all(|d| d == p)
                    && p.to_u64().is_some_and(is_prime) =>
            {
                Some((p.to_u64().unwrap(), divisors.len() / 2))
            }
            _ => None,
        };
        Ok(DiscriminantProfile {
            elementary_divisors: divisors,
            group_order,
            p_elementary_sigma,
        })
    }

    /// Hex SHA-256 of the Gram matrix JSON; identifies the form, not the name.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&self.gram).expect("serializable");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    /// `e + f` of the first hyperbolic-plane block when there is one,
    /// otherwise a positive vector from rational diagonalisation.
    fn default_cone_reference(&self) -> Vec<BigInt> {
        let n = self.rank();
        for i in 0..n.saturating_sub(1) {
            let m = &self.gram[(i, i + 1)];
            let isolated = |k: usize| {
                (0..n).all(|j| j == i || j == i + 1 || self.gram[(k, j)].is_zero())
            };
            if self.gram[(i, i)].is_zero()
                && self.gram[(i + 1, i + 1)].is_zero()
                && m.is_positive()
                && isolated(i)
                && isolated(i + 1)
            {
                let mut v = vec![BigInt::zero(); n];
                v[i] = BigInt::one();
                v[i + 1] = BigInt::one();
                return v;
            }
        }
        if let Some(i) = (0..n).find(|&i| self.gram[(i, i)].is_positive()) {
            let mut v = vec![BigInt::zero(); n];
            v[i] = BigInt::one();
            return v;
        }
        // Gram-Schmidt over Q; some orthogonal basis vector is positive.
        let mut basis: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
        for i in 0..n {
            let mut v = vec![BigRational::zero(); n];
            v[i] = BigRational::one();
            let mut w = v.clone();
            for (b, bb) in &basis {
                let c = self.inner_rational(&v, b) / bb;
                for (wk, bk) in w.iter_mut().zip(b) {
                    *wk -= &c * bk;
                }
            }
            let ww = self.inner_rational(&w, &w);
            if ww.is_positive() {
                return primitive_integer(&w);
            }
            if !ww.is_zero() {
                basis.push((w, ww));
            }
        }
        // Degenerate pivots can hide the positive direction; fall back to
        // small sums of basis vectors.
        for i in 0..n {
            for j in 0..n {
                for s in [1i64, -1] {
                    let mut v = vec![BigInt::zero(); n];
                    v[i] += 1;
                    v[j] += s;
                    if self.norm(&v).is_positive() {
                        return v;
                    }
                }
            }
        }
        unreachable!("hyperbolic lattice without a small positive vector")
    }
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// JSON form: `{name, gram, cone_reference}`.
#[derive(Serialize, Deserialize)]
struct LatticeFile {
    name: String,
    gram: IntMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_int_vec")]
    cone_reference: Option<Vec<BigInt>>,
}

mod opt_int_vec {
    use crate::matrix::JsonInt;
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|x| JsonInt(x.clone())).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        Ok(Option::<Vec<JsonInt>>::deserialize(d)?
            .map(|v| v.into_iter().map(|x| x.0).collect()))
    }
}

impl Serialize for GramLattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LatticeFile {
            name: self.name.clone(),
            gram: self.gram.clone(),
            cone_reference: self.cone_reference.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GramLattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = LatticeFile::deserialize(d)?;
        let l = GramLattice::new(f.name, f.gram).map_err(D::Error::custom)?;
        match f.cone_reference {
            Some(v) => l.with_cone_reference(v).map_err(D::Error::custom),
            None => Ok(l),
        }
    }
}
