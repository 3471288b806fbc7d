use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Isometry, IsometryError};
use crate::lattice::GramLattice;
use crate::matrix::{gcd_of, IntMatrix};

/// Eichler transvection `x -> x + (x,e) a - (x,a) e - ((a,a)/2)(x,e) e`
/// for primitive isotropic `e` and `a` orthogonal to `e`.
pub fn eichler(
    lattice: &Arc<GramLattice>,
    e: &[BigInt],
    a: &[BigInt],
) -> Result<Isometry, IsometryError> {
    let n = lattice.rank();
    for v in [e, a] {
        if v.len() != n {
            return Err(IsometryError::Dimension {
                expected: n,
                found: v.len(),
            });
        }
    }
    if !lattice.norm(e).is_zero() {
        return Err(IsometryError::Precondition("e is not isotropic".into()));
    }
    if !gcd_of(e).is_one() {
        return Err(IsometryError::Precondition("e is not primitive".into()));
    }
    if !lattice.inner(e, a).is_zero() {
        return Err(IsometryError::Precondition("a is not orthogonal to e".into()));
    }
    let aa = lattice.norm(a);
    if aa.is_odd() {
        return Err(IsometryError::Integrality(format!(
            "(a,a) = {aa} is odd, so (a,a)/2 is not an integer"
        )));
    }
    let half = aa / 2;
    let ge = lattice.gram().mul_vec(e);
    let ga = lattice.gram().mul_vec(a);
    // M = I + a (Ge)^T - e (Ga)^T - half e (Ge)^T
    let mut m = IntMatrix::identity(n);
    for j in 0..n {
        if ge[j].is_zero() && ga[j].is_zero() {
            continue;
        }
        for i in 0..n {
            let d: BigInt = &a[i] * &ge[j] - &e[i] * &ga[j] - &half * &e[i] * &ge[j];
            if !d.is_zero() {
                m[(i, j)] += d;
            }
        }
    }
    Isometry::validate(m, lattice)
}
