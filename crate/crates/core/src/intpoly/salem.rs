//! Cyclotomic/Salem decomposition of characteristic polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cyclotomic::CyclotomicTable;
use super::sturm::{root_bound, SturmSequence};
use super::{IntPolynomial, PolyError};

pub fn is_reciprocal(p: &IntPolynomial) -> bool {
    let c = p.coeffs();
    !c.is_empty() && c.iter().eq(c.iter().rev())
}

/// The monic degree-`d` polynomial `T` with `P(x) = x^d T(x + 1/x)`.
///
/// Uses `x^j + x^-j = D_j(x + 1/x)` with `D_0 = 2`, `D_1 = y`,
/// `D_{j+1} = y D_j - D_{j-1}`.
pub fn trace_polynomial(p: &IntPolynomial) -> Result<IntPolynomial, PolyError> {
    let deg = p
        .degree()
        .ok_or_else(|| PolyError::Shape("zero polynomial has no trace polynomial".into()))?;
    if deg == 0 || deg % 2 == 1 {
        return Err(PolyError::Shape(format!(
            "trace polynomial needs positive even degree, got {deg}"
        )));
    }
    if !p.is_monic() {
        return Err(PolyError::Shape("trace polynomial needs a monic input".into()));
    }
    if !is_reciprocal(p) {
        return Err(PolyError::Shape("polynomial is not reciprocal".into()));
    }
    if p.eval(&BigInt::one()).is_zero() || p.eval(&-BigInt::one()).is_zero() {
        return Err(PolyError::Shape("polynomial has a root at 1 or -1".into()));
    }
    let d = deg / 2;
    let y = IntPolynomial::monomial(1);
    let mut prev = IntPolynomial::constant(BigInt::from(2)); // D_0
    let mut cur = y.clone(); // D_1
    let mut t = IntPolynomial::constant(p.coeff(d));
    for j in 1..=d {
        t = &t + &(&cur * &IntPolynomial::constant(p.coeff(d + j)));
        let next = &(&y * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    Ok(t)
}

/// Inverse of [`trace_polynomial`]: expands `x^d T(x + 1/x)` by the
/// binomial theorem.
pub fn reciprocal_from_trace(t: &IntPolynomial) -> IntPolynomial {
    let Some(d) = t.degree() else {
        return IntPolynomial::zero();
    };
    let mut out = vec![BigInt::zero(); 2 * d + 1];
    for (k, c) in t.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        // x^d (x + 1/x)^k = sum_i C(k, i) x^(d + k - 2i)
        let mut binom = BigInt::one();
        for i in 0..=k {
            out[d + k - 2 * i] += c * &binom;
            binom = binom * BigInt::from(k - i) / BigInt::from(i + 1);
        }
    }
    IntPolynomial::new(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassificationKind {
    CyclotomicProduct,
    Salem,
    Mixed,
    NotOPlusShape,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SalemClassification {
    pub kind: ClassificationKind,
    /// `(n, multiplicity)` pairs, ascending in `n`.
    pub cyclotomic_factors: Vec<(u64, u32)>,
    pub salem_factor: Option<IntPolynomial>,
    pub salem_degree: Option<usize>,
    /// What is left after removing the cyclotomic factors; equals the Salem
    /// factor when there is one and `1` for cyclotomic products.
    pub remainder: IntPolynomial,
}

impl SalemClassification {
    /// Product of the recorded factors; equals the classified polynomial.
    pub fn reconstruct(&self, table: &CyclotomicTable) -> IntPolynomial {
        self.cyclotomic_factors
            .iter()
            .fold(self.remainder.clone(), |acc, &(n, m)| {
                let phi = table
                    .get(n)
                    .cloned()
                    .unwrap_or_else(|| super::cyclotomic(n).expect("n >= 1"));
                &acc * &phi.pow(m)
            })
    }

    pub fn has_salem_factor(&self) -> bool {
        self.salem_factor.is_some()
    }
}

/// Classifier with a cached cyclotomic table.
#[derive(Clone, Debug)]
pub struct Classifier {
    table: CyclotomicTable,
    allow_quadratic: bool,
}

impl Classifier {
    pub fn new(max_degree: usize) -> Self {
        Classifier {
            table: CyclotomicTable::new(max_degree),
            allow_quadratic: true,
        }
    }

    /// Rejects degree-2 Salem factors (the classical `deg >= 4` convention).
    pub fn strict(mut self) -> Self {
        self.allow_quadratic = false;
        self
    }

    pub fn table(&self) -> &CyclotomicTable {
        &self.table
    }

    pub fn classify(&self, p: &IntPolynomial) -> Result<SalemClassification, PolyError> {
        let deg = p
            .degree()
            .filter(|&d| d >= 1)
            .ok_or_else(|| PolyError::Shape("classification needs degree >= 1".into()))?;
        if !p.is_monic() {
            return Err(PolyError::Shape("classification needs a monic polynomial".into()));
        }
        if deg > self.table.max_degree() {
            return Err(PolyError::Shape(format!(
                "degree {deg} exceeds the cyclotomic table bound {}",
                self.table.max_degree()
            )));
        }

        // ascending n, each to full multiplicity
        let mut rest = p.clone();
        let mut factors = Vec::new();
        for (n, phi) in self.table.entries() {
            if phi.degree().unwrap() > rest.degree().unwrap_or(0) {
                continue;
            }
            let mut mult = 0;
            loop {
                let (q, r) = rest.div_rem_monic(phi)?;
                if !r.is_zero() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                factors.push((*n, mult));
            }
            if rest.is_one() {
                break;
            }
        }

        if rest.is_one() {
            return Ok(SalemClassification {
                kind: ClassificationKind::CyclotomicProduct,
                cyclotomic_factors: factors,
                salem_factor: None,
                salem_degree: None,
                remainder: rest,
            });
        }

        let kind = if self.is_salem_remainder(&rest) {
            if factors.is_empty() {
                ClassificationKind::Salem
            } else {
                ClassificationKind::Mixed
            }
        } else {
            ClassificationKind::NotOPlusShape
        };
        let salem = (kind != ClassificationKind::NotOPlusShape).then(|| rest.clone());
        Ok(SalemClassification {
            kind,
            cyclotomic_factors: factors,
            salem_degree: salem.as_ref().and_then(IntPolynomial::degree),
            salem_factor: salem,
            remainder: rest,
        })
    }

    /// Root-location test for a remainder with every cyclotomic factor
    /// already divided out.
    ///
    /// Irreducibility needs no factoring here. Suppose `R = A B` with monic
    /// integer factors and the root `a > 1` in `A`. If `1/a` is in `B`, then
    /// `|B(0)|` is a product of moduli all equal to 1 except `1/a`, so it is
    /// a nonzero integer below 1, impossible. Otherwise every root of `B` is
    /// on the unit circle, so `B` is a product of cyclotomic polynomials by
    /// Kronecker's theorem; those were all removed, so `B = 1`.
    fn is_salem_remainder(&self, r: &IntPolynomial) -> bool {
        let Some(deg) = r.degree() else { return false };
        if deg % 2 == 1 || deg == 0 || (!self.allow_quadratic && deg == 2) {
            return false;
        }
        let Ok(t) = trace_polynomial(r) else {
            return false;
        };
        let d = deg / 2;
        let Ok(seq) = SturmSequence::new(&t) else {
            return false;
        };
        // real roots must be simple: the squarefree part must keep full degree
        if seq.count_real() != d {
            return false;
        }
        let two = BigRational::from_integer(BigInt::from(2));
        let bound = BigRational::from_integer(root_bound(&t));
        let above = seq.count(&two, &bound).unwrap_or(0);
        let inside = seq.count(&-two.clone(), &two).unwrap_or(0);
        above == 1 && inside == d - 1
    }
}

/// One-shot classification with a fresh cyclotomic table of size
/// `max_degree`.
pub fn classify(p: &IntPolynomial, max_degree: usize) -> Result<SalemClassification, PolyError> {
    Classifier::new(max_degree).classify(p)
}
