use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::salem::{trace_polynomial, SalemClassification};
use super::sturm::root_bound;
use super::PolyError;
use crate::rational::{decimal_ceil, decimal_floor, ln_bounds, rational_string, sqrt_bounds};

pub const DEFAULT_LOG_DIGITS: u32 = 12;

/// Rational enclosure of a spectral radius plus decimal bounds on its
/// natural log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyInterval {
    #[serde(with = "rational_string")]
    pub lower: BigRational,
    #[serde(with = "rational_string")]
    pub upper: BigRational,
    /// `ln(lower)` rounded down to `digits` decimals.
    pub log_lower: String,
    /// `ln(upper)` rounded up to `digits` decimals.
    pub log_upper: String,
    pub digits: u32,
}

impl EntropyInterval {
    pub fn exact_one(digits: u32) -> Self {
        let zero = decimal_floor(&BigRational::zero(), digits);
        EntropyInterval {
            lower: BigRational::one(),
            upper: BigRational::one(),
            log_lower: zero.clone(),
            log_upper: zero,
            digits,
        }
    }

    fn from_bounds(lower: BigRational, upper: BigRational, digits: u32) -> Self {
        let (log_lo, _) = ln_bounds(&lower, digits);
        let (_, log_hi) = ln_bounds(&upper, digits);
        EntropyInterval {
            log_lower: decimal_floor(&log_lo, digits),
            log_upper: decimal_ceil(&log_hi, digits),
            lower,
            upper,
            digits,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn is_zero_entropy(&self) -> bool {
        self.lower.is_one() && self.upper.is_one()
    }
}

/// Certified spectral radius with logs printed to [`DEFAULT_LOG_DIGITS`].
pub fn spectral_radius(
    c: &SalemClassification,
    tol: &BigRational,
) -> Result<EntropyInterval, PolyError> {
    spectral_radius_with_digits(c, tol, DEFAULT_LOG_DIGITS)
}

/// Isolates the Salem number through its trace `y = a + 1/a > 2`, by
/// bisection on the trace polynomial, then maps back with
/// `a = (y + sqrt(y^2 - 4)) / 2` rounding outward.
pub fn spectral_radius_with_digits(
    c: &SalemClassification,
    tol: &BigRational,
    digits: u32,
) -> Result<EntropyInterval, PolyError> {
    if !tol.is_positive() {
        return Err(PolyError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let Some(salem) = &c.salem_factor else {
        return Ok(EntropyInterval::exact_one(digits));
    };
    let t = trace_polynomial(salem)?;
    let four = BigRational::from_integer(BigInt::from(4));
    let two = BigRational::from_integer(BigInt::from(2));
    // T(2) < 0 and T > 0 beyond the root bound; the only sign change on
    // (2, B] is the Salem trace.
    let mut lo = two.clone();
    let mut hi = BigRational::from_integer(root_bound(&t));
    if t.sign_at(&lo) >= 0 || t.sign_at(&hi) <= 0 {
        return Err(PolyError::Shape(
            "trace polynomial has no isolated root above 2".into(),
        ));
    }
    let mut bits = 8;
    while BigRational::new(BigInt::one(), BigInt::one() << bits) * BigRational::from_integer(8.into())
        > *tol
    {
        bits += 1;
    }
    loop {
        let (s_lo, _) = sqrt_bounds(&(&lo * &lo - &four), bits);
        let (_, s_hi) = sqrt_bounds(&(&hi * &hi - &four), bits);
        let lam_lo = (&lo + s_lo) / &two;
        let lam_hi = (&hi + s_hi) / &two;
        if &lam_hi - &lam_lo <= *tol {
            return Ok(EntropyInterval::from_bounds(lam_lo, lam_hi, digits));
        }
        let mid = (&lo + &hi) / &two;
        match t.sign_at(&mid) {
            0 => {
                lo = mid.clone();
                hi = mid;
            }
            s if s > 0 => hi = mid,
            _ => lo = mid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intpoly::{classify, cyclotomic, IntPolynomial};

    fn tol6() -> BigRational {
        BigRational::new(1.into(), 1_000_000.into())
    }

    /// Float bisection on the polynomial itself, independent of the trace
    /// transform.
    fn float_bisect(p: &IntPolynomial, mut lo: f64, mut hi: f64) -> f64 {
        let eval = |x: f64| {
            p.coeffs()
                .iter()
                .rev()
                .fold(0.0, |acc, c| acc * x + c.to_string().parse::<f64>().unwrap())
        };
        let s_lo = eval(lo).signum();
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if eval(m).signum() == s_lo {
                lo = m;
            } else {
                hi = m;
            }
        }
        lo
    }

    fn to_f64(x: &BigRational) -> f64 {
        x.numer().to_string().parse::<f64>().unwrap() / x.denom().to_string().parse::<f64>().unwrap()
    }

    #[test]
    fn cyclotomic_product_has_zero_entropy() {
        let c = classify(&cyclotomic(1).unwrap().pow(22), 22).unwrap();
        let e = spectral_radius(&c, &tol6()).unwrap();
        assert!(e.is_zero_entropy());
        assert_eq!(e.log_lower, "0.000000000000");
    }

    #[test]
    fn lehmer_number_enclosure() {
        let lehmer = IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let c = classify(&lehmer, 10).unwrap();
        let e = spectral_radius(&c, &tol6()).unwrap();
        assert!(e.width() <= tol6());
        let oracle = float_bisect(&lehmer, 1.0, 2.0);
        assert!((oracle - 1.176_280_818_259_917).abs() < 1e-12);
        assert!(to_f64(&e.lower) <= oracle && oracle <= to_f64(&e.upper));
        // ln(1.1762808182599175) = 0.16235761200773...
        assert!(e.log_lower.as_str() <= "0.162357612007");
        assert!(e.log_upper.as_str() >= "0.162357612008");
        assert!(e.lower > BigRational::one());
    }

    #[test]
    fn golden_square() {
        let p = IntPolynomial::from_i64(&[1, -3, 1]);
        let e = spectral_radius(&classify(&p, 2).unwrap(), &tol6()).unwrap();
        let exact = (3.0 + 5f64.sqrt()) / 2.0;
        assert!(to_f64(&e.lower) <= exact && exact <= to_f64(&e.upper));
        assert!(e.width() <= tol6());
    }

    #[test]
    fn rejects_non_positive_tolerance() {
        let p = IntPolynomial::from_i64(&[1, -3, 1]);
        let c = classify(&p, 2).unwrap();
        assert!(matches!(
            spectral_radius(&c, &BigRational::zero()),
            Err(PolyError::Domain(_))
        ));
    }

    #[test]
    fn integer_trace_root_is_handled() {
        // t^2 - 6t + 1 has trace y = 6 exactly; the bisection can land on it
        let p = IntPolynomial::from_i64(&[1, -6, 1]);
        let e = spectral_radius(&classify(&p, 2).unwrap(), &BigRational::new(1.into(), 1000.into())).unwrap();
        let exact = 3.0 + 8f64.sqrt();
        assert!(to_f64(&e.lower) <= exact && exact <= to_f64(&e.upper));
    }
}
