//! Sturm sequences over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{IntPolynomial, PolyError};

/// Polynomial over the rationals, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub(crate) fn from_int(p: &IntPolynomial) -> Self {
        RatPoly(
            p.coeffs()
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    fn trim(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn derivative(&self) -> Self {
        RatPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
                .collect(),
        )
        .trim()
    }

    fn rem(&self, d: &RatPoly) -> RatPoly {
        let mut r = self.0.clone();
        let dd = d.degree();
        let lead = d.0.last().unwrap().clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.last().unwrap() / &lead;
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        RatPoly(r).trim()
    }

    fn div(&self, d: &RatPoly) -> RatPoly {
        let mut r = self.0.clone();
        let dd = d.degree();
        if r.len() <= dd {
            return RatPoly(Vec::new());
        }
        let lead = d.0.last().unwrap().clone();
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            q[k] = c;
        }
        RatPoly(q).trim()
    }

    fn monic(self) -> Self {
        match self.0.last().cloned() {
            Some(l) => RatPoly(self.0.into_iter().map(|c| c / &l).collect()),
            None => self,
        }
    }

    fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn sign_at(&self, x: &BigRational) -> i32 {
        let v = self
            .0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c);
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }

    fn sign_at_pos_inf(&self) -> i32 {
        self.0.last().map_or(0, |c| if c.is_positive() { 1 } else { -1 })
    }

    fn sign_at_neg_inf(&self) -> i32 {
        let s = self.sign_at_pos_inf();
        if self.degree() % 2 == 0 {
            s
        } else {
            -s
        }
    }

    /// Clear denominators and content; leading coefficient positive.
    pub(crate) fn to_primitive_int(&self) -> IntPolynomial {
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        IntPolynomial::new(
            self.0
                .iter()
                .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
                .collect(),
        )
        .primitive_part()
    }
}

/// `P / gcd(P, P')` as a primitive integer polynomial.
pub fn squarefree_part(p: &IntPolynomial) -> IntPolynomial {
    if p.degree().unwrap_or(0) == 0 {
        return p.primitive_part();
    }
    let rp = RatPoly::from_int(p);
    let g = rp.gcd(&rp.derivative());
    rp.div(&g).to_primitive_int()
}

/// Yun's algorithm: factors `f_i` (primitive, pairwise coprime) with
/// `P = c * prod f_i^i`. Only factors of positive degree are returned.
pub fn squarefree_decomposition(p: &IntPolynomial) -> Vec<(IntPolynomial, u32)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = RatPoly::from_int(p);
    let fp = f.derivative();
    let mut a = f.gcd(&fp);
    let mut b = f.div(&a);
    let mut c = fp.div(&a);
    let mut d = RatPoly(
        c.0.iter()
            .zip(b.derivative().0.iter().chain(std::iter::repeat(&BigRational::zero())))
            .map(|(x, y)| x - y)
            .collect(),
    )
    .trim();
    let mut i = 1;
    while b.degree() > 0 {
        a = b.gcd(&d);
        if a.degree() > 0 {
            out.push((a.to_primitive_int(), i));
        }
        b = b.div(&a);
        c = d.div(&a);
        let bp = b.derivative();
        let len = c.0.len().max(bp.0.len());
        d = RatPoly(
            (0..len)
                .map(|k| {
                    c.0.get(k).cloned().unwrap_or_else(BigRational::zero)
                        - bp.0.get(k).cloned().unwrap_or_else(BigRational::zero)
                })
                .collect(),
        )
        .trim();
        i += 1;
    }
    out
}

/// An integer `B > 0` with every real root of `p` in `(-B, B)`.
pub fn root_bound(p: &IntPolynomial) -> BigInt {
    let Some(lead) = p.leading() else {
        return BigInt::one();
    };
    let max = p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default();
    // Cauchy: |x| <= 1 + max|c_i| / |lead|
    BigInt::from(2) + max / lead.abs()
}

/// Sturm sequence of the squarefree part of a polynomial.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<RatPoly>,
}

impl SturmSequence {
    pub fn new(p: &IntPolynomial) -> Result<Self, PolyError> {
        if p.is_zero() {
            return Err(PolyError::Domain("Sturm sequence of the zero polynomial".into()));
        }
        let s0 = RatPoly::from_int(&squarefree_part(p));
        let mut seq = vec![s0.clone()];
        let mut prev = s0.clone();
        let mut cur = s0.derivative();
        while !cur.is_zero() {
            seq.push(cur.clone());
            let r = prev.rem(&cur);
            prev = cur;
            cur = RatPoly(r.0.into_iter().map(|c| -c).collect());
        }
        Ok(SturmSequence { seq })
    }

    fn changes(signs: impl Iterator<Item = i32>) -> usize {
        let mut last = 0;
        let mut n = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
        n
    }

    fn changes_at(&self, x: &BigRational) -> usize {
        Self::changes(self.seq.iter().map(|p| p.sign_at(x)))
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> Result<usize, PolyError> {
        if a >= b {
            return Err(PolyError::Interval {
                lower: a.to_string(),
                upper: b.to_string(),
            });
        }
        Ok(self.changes_at(a) - self.changes_at(b))
    }

    /// Distinct real roots in `(a, +inf)`.
    pub fn count_above(&self, a: &BigRational) -> usize {
        self.changes_at(a) - Self::changes(self.seq.iter().map(RatPoly::sign_at_pos_inf))
    }

    /// Distinct real roots in `(-inf, b]`.
    pub fn count_below(&self, b: &BigRational) -> usize {
        Self::changes(self.seq.iter().map(RatPoly::sign_at_neg_inf)) - self.changes_at(b)
    }

    pub fn count_real(&self) -> usize {
        Self::changes(self.seq.iter().map(RatPoly::sign_at_neg_inf))
            - Self::changes(self.seq.iter().map(RatPoly::sign_at_pos_inf))
    }
}

/// Number of distinct real roots of `p` in the half-open interval `(a, b]`.
pub fn sturm_count(p: &IntPolynomial, a: &BigRational, b: &BigRational) -> Result<usize, PolyError> {
    if a >= b {
        return Err(PolyError::Interval {
            lower: a.to_string(),
            upper: b.to_string(),
        });
    }
    SturmSequence::new(p)?.count(a, b)
}
