use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{IntPolynomial, PolyError};
use crate::matrix::IntMatrix;

/// `det(tI - M)` by Berkowitz's division-free algorithm.
///
/// Works over the integers directly, so the result is exact for any entry
/// size. Cost is O(n^4) ring operations.
pub fn char_poly(m: &IntMatrix) -> Result<IntPolynomial, PolyError> {
    if !m.is_square() {
        return Err(PolyError::Dimension(format!(
            "characteristic polynomial of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    // descending coefficients of the char poly of the leading k x k block
    let mut p: Vec<BigInt> = vec![BigInt::one()];
    for k in 0..n {
        // Toeplitz column: 1, -a_kk, -R C, -R M C, ..., -R M^(k-1) C
        let mut col = Vec::with_capacity(k + 2);
        col.push(BigInt::one());
        col.push(-m[(k, k)].clone());
        let mut v: Vec<BigInt> = (0..k).map(|i| m[(i, k)].clone()).collect();
        for step in 0..k {
            let rv: BigInt = (0..k)
                .filter(|&j| !v[j].is_zero())
                .map(|j| &m[(k, j)] * &v[j])
                .sum();
            col.push(-rv);
            if step + 1 < k {
                v = (0..k)
                    .map(|i| {
                        (0..k)
                            .filter(|&j| !v[j].is_zero())
                            .map(|j| &m[(i, j)] * &v[j])
                            .sum()
                    })
                    .collect();
            }
        }
        let mut next = vec![BigInt::zero(); k + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, pj) in p.iter().enumerate().take(i + 1) {
                if !pj.is_zero() && !col[i - j].is_zero() {
                    *slot += &col[i - j] * pj;
                }
            }
        }
        p = next;
    }
    p.reverse();
    Ok(IntPolynomial::new(p))
}
