//! Cheap necessary condition for a full-degree Salem factor: neither `1` nor
//! `-1` is an eigenvalue. Checked as full rank of `M - I` and `M + I` modulo
//! a large prime. Singular matrices stay singular mod p; a nonsingular one
//! is wrongly dropped only when p divides its determinant.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::matrix::IntMatrix;

const P: u64 = (1 << 61) - 1;

fn residue(x: &BigInt) -> u64 {
    let r = x % BigInt::from(P);
    let r = r.to_i64().expect("residue fits");
    if r < 0 {
        (r + P as i64) as u64
    } else {
        r as u64
    }
}

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

fn full_rank(mut a: Vec<Vec<u64>>) -> bool {
    let n = a.len();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| a[i][c] != 0) else {
            return false;
        };
        a.swap(c, p);
        let inv = pow(a[c][c], P - 2);
        for i in c + 1..n {
            if a[i][c] == 0 {
                continue;
            }
            let f = mul(a[i][c], inv);
            for j in c..n {
                let s = mul(f, a[c][j]);
                a[i][j] = (a[i][j] + P - s) % P;
            }
        }
    }
    true
}

/// False when `M` certainly has eigenvalue `1` or `-1`.
pub(crate) fn no_unit_eigenvalues(m: &IntMatrix) -> bool {
    let n = m.rows();
    let base: Vec<Vec<u64>> = (0..n)
        .map(|i| m.row(i).iter().map(residue).collect())
        .collect();
    let shifted = |s: u64| {
        let mut a = base.clone();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = (row[i] + s) % P;
        }
        a
    };
    full_rank(shifted(P - 1)) && full_rank(shifted(1))
}
