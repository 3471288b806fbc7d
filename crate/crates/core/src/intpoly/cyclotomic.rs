use super::{IntPolynomial, PolyError};

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    factorize(n)
        .into_iter()
        .fold(1, |acc, (p, e)| acc * (p - 1) * p.pow(e - 1))
}

pub fn mobius(n: u64) -> i32 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The n-th cyclotomic polynomial via the Möbius product
/// `prod_{d | n} (t^d - 1)^{mu(n/d)}`, assembled with exact division.
pub fn cyclotomic(n: u64) -> Result<IntPolynomial, PolyError> {
    if n == 0 {
        return Err(PolyError::Domain("cyclotomic index must be positive".into()));
    }
    let mut num = IntPolynomial::one();
    let mut den = IntPolynomial::one();
    for d in (1..=n).filter(|d| n % d == 0) {
        let f = IntPolynomial::t_pow_minus_one(d as usize);
        match mobius(n / d) {
            1 => num = &num * &f,
            -1 => den = &den * &f,
            _ => {}
        }
    }
    let (q, r) = num.div_rem_monic(&den)?;
    debug_assert!(r.is_zero());
    Ok(q)
}

/// Every `Phi_n` with `phi(n) <= max_degree`, sorted by `n`.
///
/// Scans `n = 1..=2 D^2`; this is complete because `phi(n) >= sqrt(n/2)`.
pub fn cyclotomics_up_to_degree(max_degree: usize) -> Vec<(u64, IntPolynomial)> {
    let d = max_degree as u64;
    (1..=2 * d * d)
        .filter(|&n| euler_phi(n) <= d)
        .map(|n| (n, cyclotomic(n).expect("n >= 1")))
        .collect()
}

/// Precomputed cyclotomic list for repeated classification.
#[derive(Clone, Debug)]
pub struct CyclotomicTable {
    max_degree: usize,
    entries: Vec<(u64, IntPolynomial)>,
}

impl CyclotomicTable {
    pub fn new(max_degree: usize) -> Self {
        CyclotomicTable {
            max_degree,
            entries: cyclotomics_up_to_degree(max_degree),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn entries(&self) -> &[(u64, IntPolynomial)] {
        &self.entries
    }

    pub fn get(&self, n: u64) -> Option<&IntPolynomial> {
        self.entries.iter().find(|(k, _)| *k == n).map(|(_, p)| p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Totient by direct gcd counting, independent of the factorisation.
    fn phi_by_counting(n: u64) -> u64 {
        (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u64
    }

    #[test]
    fn totient_matches_counting() {
        for n in 1..500 {
            assert_eq!(euler_phi(n), phi_by_counting(n), "n = {n}");
        }
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1).unwrap(), IntPolynomial::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(2).unwrap(), IntPolynomial::from_i64(&[1, 1]));
        assert_eq!(
            cyclotomic(12).unwrap(),
            IntPolynomial::from_i64(&[1, 0, -1, 0, 1])
        );
        assert!(matches!(cyclotomic(0), Err(PolyError::Domain(_))));
    }

    #[test]
    fn phi_12_by_dividing_out_lower_indices() {
        let mut p = IntPolynomial::t_pow_minus_one(12);
        for d in [1, 2, 3, 4, 6] {
            p = p.exact_div(&cyclotomic(d).unwrap()).unwrap();
        }
        assert_eq!(p, cyclotomic(12).unwrap());
    }

    #[test]
    fn enumeration_counts() {
        let one: Vec<u64> = cyclotomics_up_to_degree(1).iter().map(|e| e.0).collect();
        assert_eq!(one, vec![1, 2]);
        let two: Vec<u64> = cyclotomics_up_to_degree(2).iter().map(|e| e.0).collect();
        assert_eq!(two, vec![1, 2, 3, 4, 6]);
        // oracle: gcd-counting totient over an independent range
        let expected = (1..=10_000u64).filter(|&n| phi_by_counting_fast(n) <= 22).count();
        assert_eq!(expected, 43);
        assert_eq!(cyclotomics_up_to_degree(22).len(), expected);
    }

    fn phi_by_counting_fast(n: u64) -> u64 {
        // counting is quadratic; n > 1000 always has phi(n) > 22, checked cheaply
        if n > 1000 {
            return u64::MAX;
        }
        phi_by_counting(n)
    }

    #[test]
    fn each_entry_divides_t_n_minus_one() {
        for (n, p) in cyclotomics_up_to_degree(12) {
            assert!(p.degree().unwrap() <= 12);
            assert_eq!(p.degree().unwrap() as u64, euler_phi(n));
            assert!(p.divides(&IntPolynomial::t_pow_minus_one(n as usize)));
        }
    }
}
