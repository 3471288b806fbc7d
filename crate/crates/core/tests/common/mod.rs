//! Reference computations written without the library's algorithms.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use salemforge::matrix::IntMatrix;

pub type Mat = Vec<Vec<BigInt>>;

pub fn rows(m: &IntMatrix) -> Mat {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect()).collect()
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..k).fold(BigInt::zero(), |s, t| s + &a[i][t] * &b[t][j]))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn is_zero(a: &Mat) -> bool {
    a.iter().flatten().all(Zero::is_zero)
}

pub fn apply(a: &Mat, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|r| r.iter().zip(v).fold(BigInt::zero(), |s, (x, y)| s + x * y))
        .collect()
}

pub fn form(g: &Mat, x: &[BigInt], y: &[BigInt]) -> BigInt {
    x.iter().zip(apply(g, y)).fold(BigInt::zero(), |s, (a, b)| s + a * b)
}

/// Characteristic polynomial `det(tI - A)` by Faddeev-LeVerrier over Q,
/// ascending coefficients.
pub fn faddeev_leverrier(a: &Mat) -> Vec<BigInt> {
    let n = a.len();
    let q: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for t in 0..n {
                    if !m[t][j].is_zero() {
                        s += &q[i][t] * &m[t][j];
                    }
                }
                next[i][j] = s;
            }
            next[i][i] += &c[n - k + 1];
        }
        m = next;
        // c_{n-k} = -tr(A M_k) / k
        let mut tr = BigRational::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &q[i][t] * &m[t][i];
            }
        }
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    c.into_iter()
        .map(|x| {
            assert!(x.is_integer());
            x.to_integer()
        })
        .collect()
}

pub fn totient(n: u64) -> u64 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Exact quotient of ascending-coefficient integer polynomials.
pub fn poly_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for k in (0..q.len()).rev() {
        let c = &r[k + dd] / &lead;
        for (i, d) in den.iter().enumerate() {
            r[k + i] -= &c * d;
        }
        q[k] = c;
    }
    assert!(r.iter().all(Zero::is_zero), "inexact division");
    q
}

/// `Phi_n = (t^n - 1) / prod_{d | n, d < n} Phi_d`.
pub fn cyclotomic(n: u64) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = poly_div(&p, &cyclotomic(d));
        }
    }
    p
}

/// Every `n` with `phi(n) <= d`; complete because `phi(n) >= sqrt(n/2)`.
pub fn totient_indices(d: u64) -> Vec<u64> {
    (1..=2 * d * d + 2).filter(|&n| totient(n) <= d).collect()
}

pub fn eval(p: &[i64], x: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(BigInt::from(*c)))
}

/// Bisection on a sign change of `p` inside `[lo, hi]` down to `width`.
pub fn bisect(p: &[i64], mut lo: BigRational, mut hi: BigRational, width: &BigRational) -> (BigRational, BigRational) {
    let slo = eval(p, &lo).signum();
    assert!(!slo.is_zero() && slo != eval(p, &hi).signum(), "no sign change");
    let two = BigRational::from_integer(BigInt::from(2));
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        if eval(p, &mid).signum() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.numer().to_f64().unwrap() / x.denom().to_f64().unwrap()
}

/// Dominant eigenvalue modulus by normalized power iteration in `f64`.
pub fn power_iteration(a: &Mat, steps: usize) -> f64 {
    let n = a.len();
    let scale = a.iter().flatten().map(|x| x.abs()).max().unwrap().to_f64().unwrap().max(1.0);
    let f: Vec<Vec<f64>> = a
        .iter()
        .map(|r| r.iter().map(|x| x.to_f64().unwrap() / scale).collect())
        .collect();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.37 * i as f64).collect();
    let mut lam = 0.0;
    for _ in 0..steps {
        let w: Vec<f64> = (0..n).map(|i| (0..n).map(|j| f[i][j] * v[j]).sum()).collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        lam = norm / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    lam * scale
}
