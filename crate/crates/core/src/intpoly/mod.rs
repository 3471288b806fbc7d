//! Exact integer polynomials and the Salem machinery built on them.
//!
//! [`IntPolynomial`] stores coefficients in ascending degree order. The
//! submodules add characteristic polynomials, cyclotomic enumeration,
//! Sturm counting, Salem classification and certified spectral radii.

mod charpoly;
mod cyclotomic;
mod radius;
mod salem;
mod sturm;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use charpoly::char_poly;
pub use cyclotomic::{
    cyclotomic, cyclotomics_up_to_degree, euler_phi, mobius, CyclotomicTable,
};
pub use radius::{spectral_radius, spectral_radius_with_digits, EntropyInterval, DEFAULT_LOG_DIGITS};
pub use salem::{
    classify, is_reciprocal, reciprocal_from_trace, trace_polynomial, ClassificationKind,
    Classifier, SalemClassification,
};
pub use sturm::{root_bound, squarefree_decomposition, squarefree_part, sturm_count, SturmSequence};

use crate::matrix::JsonInt;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("interval error: lower end {lower} is not below upper end {upper}")]
    Interval { lower: String, upper: String },
    #[error("division is not exact")]
    InexactDivision,
}

/// Dense polynomial with arbitrary-precision integer coefficients.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector and `degree()` is `None` for it.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `t^k`
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPolynomial { coeffs: c }
    }

    /// `t^k - 1`
    pub fn t_pow_minus_one(k: usize) -> Self {
        let mut p = Self::monomial(k);
        p.coeffs[0] -= 1;
        Self::new(p.coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `t^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides by the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    /// Sign of the value at a rational point without building the full
    /// rational value: evaluates `den^deg * P(num/den)` over the integers.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let Some(d) = self.degree() else { return 0 };
        let (num, den) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        // Horner on the homogenised form: sum c_k num^k den^(d-k)
        let mut num_pow = BigInt::one();
        let mut terms = Vec::with_capacity(d + 1);
        for c in &self.coeffs {
            terms.push(c * &num_pow);
            num_pow *= num;
        }
        for t in terms.into_iter().rev() {
            acc += t * &den_pow;
            den_pow *= den;
        }
        sign_of(&acc)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Division by a divisor whose leading coefficient is ±1.
    pub fn div_rem_monic(&self, d: &IntPolynomial) -> Result<(Self, Self), PolyError> {
        let dd = d
            .degree()
            .ok_or_else(|| PolyError::Domain("division by the zero polynomial".into()))?;
        let lead = d.leading().unwrap().clone();
        if !lead.abs().is_one() {
            return Err(PolyError::Shape(
                "divisor leading coefficient must be a unit".into(),
            ));
        }
        let mut r = self.coeffs.clone();
        let Some(n) = self.degree().filter(|&n| n >= dd) else {
            return Ok((Self::zero(), self.clone()));
        };
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &r[k + dd] * &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            q[k] = c;
        }
        Ok((Self::new(q), Self::new(r)))
    }

    /// Exact quotient over the integers; fails when the division leaves a
    /// remainder or a non-integral coefficient.
    pub fn exact_div(&self, d: &IntPolynomial) -> Result<Self, PolyError> {
        let dd = d
            .degree()
            .ok_or_else(|| PolyError::Domain("division by the zero polynomial".into()))?;
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let n = self.degree().unwrap();
        if n < dd {
            return Err(PolyError::InexactDivision);
        }
        let lead = d.leading().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let (c, rem) = r[k + dd].div_rem(lead);
            if !rem.is_zero() {
                return Err(PolyError::InexactDivision);
            }
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            q[k] = c;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return Err(PolyError::InexactDivision);
        }
        Ok(Self::new(q))
    }

    pub fn divides(&self, other: &IntPolynomial) -> bool {
        other.exact_div(self).is_ok()
    }

    /// Formats with the given variable name, highest degree first.
    pub fn display_with(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 || !mag.is_one() {
                out.push_str(&mag.to_string());
            }
            out.push_str(&mono);
        }
        out
    }
}

pub(crate) fn sign_of(x: &BigInt) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("t"))
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// JSON form: array of decimal strings, ascending degree. Plain JSON
/// numbers are accepted on input as well.
impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<JsonInt> = Vec::deserialize(d).map_err(D::Error::custom)?;
        Ok(IntPolynomial::new(raw.into_iter().map(|x| x.0).collect()))
    }
}
