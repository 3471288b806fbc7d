//! Rational helpers: parsing, formatting, rigorous square-root and
//! logarithm enclosures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("cannot parse {input:?} as a rational number")]
pub struct ParseRationalError {
    pub input: String,
}

/// Accepts `p/q`, plain integers, decimals and scientific notation such as
/// `1e-6`. The value is exact: `0.1` is `1/10`.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let err = || ParseRationalError { input: s.to_string() };
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| err())?;
    let digits = digits / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

/// `p/q` or `p` for integers.
pub fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Serde adapter storing a `BigRational` as its `p/q` string.
pub mod rational_string {
    use super::{format_rational, parse_rational};
    use num_rational::BigRational;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

fn pow10(k: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), k as usize)
}

/// `floor(x * 10^digits) / 10^digits` written in decimal.
pub fn decimal_floor(x: &BigRational, digits: u32) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    write_decimal(scaled.floor().to_integer(), digits)
}

/// `ceil(x * 10^digits) / 10^digits` written in decimal.
pub fn decimal_ceil(x: &BigRational, digits: u32) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    write_decimal(scaled.ceil().to_integer(), digits)
}

fn write_decimal(n: BigInt, digits: u32) -> String {
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let d = digits as usize;
    let padded = if s.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - s.len()), s)
    } else {
        s
    };
    let (int, frac) = padded.split_at(padded.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Rational enclosure `lo <= sqrt(x) <= hi` with `hi - lo <= 2^-bits`.
pub fn sqrt_bounds(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    assert!(!x.is_negative(), "square root of a negative number");
    let (n, d) = (x.numer(), x.denom());
    // sqrt(n/d) = sqrt(n d) / d
    let scale = BigInt::one() << bits;
    let radicand = n * d * &scale * &scale;
    let s = radicand.sqrt();
    let den = d * &scale;
    let lo = BigRational::new(s.clone(), den.clone());
    let hi = if &s * &s == radicand {
        lo.clone()
    } else {
        BigRational::new(s + 1, den)
    };
    (lo, hi)
}

/// Bounds on `2 atanh(z) = ln((1+z)/(1-z))` for `0 <= z <= 1/3`, to within
/// `eps`. The odd power series is summed in fixed point with `bits`
/// fractional bits, rounding down for the lower sum and up for the upper
/// one; the tail after the last term is at most
/// `2 z^(2N+3) / ((2N+3)(1 - z^2)) <= 2.25 z^(2N+3)`.
fn two_atanh_bounds(z: &BigRational, eps: &BigRational) -> (BigRational, BigRational) {
    if z.is_zero() {
        return (BigRational::zero(), BigRational::zero());
    }
    // enough bits that eps is at least 2^16 units in the last place
    let mut bits: usize = 16;
    while BigRational::new(BigInt::one() << 16, BigInt::one() << bits) > *eps {
        bits += 1;
    }
    let scale = BigInt::one() << bits;
    let scaled = z * BigRational::from_integer(scale.clone());
    let (z_lo, z_hi) = (scaled.floor().to_integer(), scaled.ceil().to_integer());
    let ceil_div = |a: &BigInt, b: &BigInt| -> BigInt { -((-a).div_floor(b)) };
    let z2_lo = (&z_lo * &z_lo) >> bits;
    let z2_hi = ceil_div(&(&z_hi * &z_hi), &scale);
    let (mut p_lo, mut p_hi) = (z_lo, z_hi);
    let (mut sum_lo, mut sum_hi) = (BigInt::zero(), BigInt::zero());
    let limit = BigInt::one() << 14;
    let mut k: u64 = 0;
    loop {
        let d = BigInt::from(2 * k + 1);
        sum_lo += (&p_lo * 2u32).div_floor(&d);
        sum_hi += ceil_div(&(&p_hi * 2u32), &d);
        p_lo = (&p_lo * &z2_lo) >> bits;
        p_hi = ceil_div(&(&p_hi * &z2_hi), &scale);
        k += 1;
        // 2.25 z^(2k+1) in units, rounded up
        let tail = ceil_div(&(&p_hi * 9u32), &BigInt::from(4));
        if tail <= limit {
            let den = scale.clone();
            return (
                BigRational::new(sum_lo, den.clone()),
                BigRational::new(sum_hi + tail, den),
            );
        }
    }
}

/// Rigorous rational bounds on `ln(x)` for `x >= 1`, width below
/// `10^-(digits + 2)`.
pub fn ln_bounds(x: &BigRational, digits: u32) -> (BigRational, BigRational) {
    assert!(x >= &BigRational::one(), "ln_bounds needs x >= 1");
    if x.is_one() {
        return (BigRational::zero(), BigRational::zero());
    }
    // x = 2^k y with 1 <= y < 2
    let k = x.floor().to_integer().bits() - 1;
    let y = x / BigRational::from_integer(BigInt::one() << k);
    let eps = BigRational::new(BigInt::one(), pow10(digits + 3));
    let (l2_lo, l2_hi) = if k == 0 {
        (BigRational::zero(), BigRational::zero())
    } else {
        let eps2 = &eps / BigRational::from_integer(BigInt::from(k));
        two_atanh_bounds(&BigRational::new(1.into(), 3.into()), &eps2)
    };
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let (y_lo, y_hi) = two_atanh_bounds(&z, &eps);
    let kq = BigRational::from_integer(BigInt::from(k));
    (&kq * l2_lo + y_lo, &kq * l2_hi + y_hi)
}

/// Decimal form of an integer-valued rational or of `p/q` rounded to
/// `digits` places, for display only.
pub fn approx_decimal(x: &BigRational, digits: u32) -> String {
    let scaled = x * BigRational::from_integer(pow10(digits));
    let r = scaled.round().to_integer();
    write_decimal(r, digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("1/1000000").unwrap(), r(1, 1_000_000));
        assert_eq!(parse_rational("1e-6").unwrap(), r(1, 1_000_000));
        assert_eq!(parse_rational("0.000001").unwrap(), r(1, 1_000_000));
        assert_eq!(parse_rational("-2.5").unwrap(), r(-5, 2));
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational("1.5E2").unwrap(), r(150, 1));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn decimal_rounding_directions() {
        let x = r(2, 3);
        assert_eq!(decimal_floor(&x, 4), "0.6666");
        assert_eq!(decimal_ceil(&x, 4), "0.6667");
        assert_eq!(decimal_floor(&r(-1, 3), 2), "-0.34");
        assert_eq!(decimal_floor(&r(5, 1), 0), "5");
        assert_eq!(decimal_floor(&r(1, 1000), 2), "0.00");
    }

    #[test]
    fn sqrt_enclosures() {
        let (lo, hi) = sqrt_bounds(&r(2, 1), 30);
        assert!(&lo * &lo <= r(2, 1) && &hi * &hi >= r(2, 1));
        assert!(&hi - &lo <= BigRational::new(1.into(), BigInt::one() << 30));
        let (lo, hi) = sqrt_bounds(&r(9, 4), 10);
        assert_eq!(lo, r(3, 2));
        assert_eq!(hi, r(3, 2));
    }

    #[test]
    fn ln_enclosures_against_known_values() {
        // ln 2 = 0.693147180559945309417...
        let (lo, hi) = ln_bounds(&r(2, 1), 15);
        assert!(decimal_floor(&lo, 15).starts_with("0.69314718055994"));
        assert!(decimal_ceil(&hi, 15).starts_with("0.69314718055994"));
        // ln 10 = 2.302585092994045684...
        let (lo, hi) = ln_bounds(&r(10, 1), 12);
        assert_eq!(decimal_floor(&lo, 12), "2.302585092994");
        assert_eq!(decimal_ceil(&hi, 12), "2.302585092995");
        let (lo, hi) = ln_bounds(&r(1, 1), 12);
        assert!(lo.is_zero() && hi.is_zero());
        // large argument: ln(10^30) = 69.07755278982137...
        let big = BigRational::from_integer(pow10(30));
        let (lo, hi) = ln_bounds(&big, 10);
        assert_eq!(decimal_floor(&lo, 10), "69.0775527898");
        assert!(&hi - &lo < r(1, 1_000_000_000));
    }
}
