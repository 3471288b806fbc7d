use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Letter, SearchConfig, SearchStats};
use crate::intpoly::{
    char_poly, spectral_radius_with_digits, Classifier, EntropyInterval, IntPolynomial,
    SalemClassification, SturmSequence,
};
use crate::isometry::{GeneratorSet, GeneratorSetData};
use crate::lattice::GramLattice;
use crate::matrix::IntMatrix;
use crate::rational::{ln_bounds, parse_rational};

pub const CERTIFICATE_SCHEMA: u32 = 1;

/// Everything needed to re-check a search result from scratch: the lattice,
/// the generator sets, the word and the claimed algebraic data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SalemCertificate {
    pub schema: u32,
    pub lattice: GramLattice,
    pub lattice_hash: String,
    pub generator_sets: Vec<GeneratorSetData>,
    pub search: SearchConfig,
    pub word: Vec<Letter>,
    pub matrix: IntMatrix,
    pub char_poly: IntPolynomial,
    pub classification: SalemClassification,
    pub entropy: EntropyInterval,
    pub full_degree: bool,
    pub non_liftable_flag: bool,
    pub stats: SearchStats,
}

impl SalemCertificate {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        lattice: &GramLattice,
        sets: &[GeneratorSet],
        cfg: &SearchConfig,
        word: Vec<Letter>,
        matrix: IntMatrix,
        char_poly: IntPolynomial,
        classification: SalemClassification,
        entropy: EntropyInterval,
        stats: SearchStats,
    ) -> Self {
        let rank = lattice.rank();
        let full_degree = classification.salem_degree == Some(rank);
        SalemCertificate {
            schema: CERTIFICATE_SCHEMA,
            lattice: lattice.clone(),
            lattice_hash: lattice.hash(),
            generator_sets: sets.iter().map(GeneratorSet::to_data).collect(),
            search: cfg.clone(),
            word,
            matrix,
            char_poly,
            classification,
            entropy,
            full_degree,
            non_liftable_flag: full_degree && rank == 22,
            stats,
        }
    }

    pub fn salem_degree(&self) -> Option<usize> {
        self.classification.salem_degree
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub field: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub mismatches: Vec<Mismatch>,
}

struct Report(Vec<Mismatch>);

impl Report {
    fn fail(&mut self, field: &str, detail: impl Into<String>) {
        self.0.push(Mismatch {
            field: field.into(),
            detail: detail.into(),
        });
    }

    fn finish(self) -> VerifyReport {
        VerifyReport {
            ok: self.0.is_empty(),
            mismatches: self.0,
        }
    }
}

/// Re-checks a certificate against its embedded lattice and generators.
pub fn verify(cert: &SalemCertificate) -> VerifyReport {
    let lattice = Arc::new(cert.lattice.clone());
    let mut sets = Vec::new();
    for (i, data) in cert.generator_sets.iter().enumerate() {
        match GeneratorSet::from_data(data, &lattice) {
            Ok(s) => sets.push(s),
            Err(e) => {
                let mut r = Report(Vec::new());
                r.fail("generator_sets", format!("set {i}: {e}"));
                return r.finish();
            }
        }
    }
    verify_with(cert, &lattice, &sets)
}

/// Re-checks a certificate against a given lattice and generator sets.
pub fn verify_with(cert: &SalemCertificate, lattice: &Arc<GramLattice>, sets: &[GeneratorSet]) -> VerifyReport {
    let mut r = Report(Vec::new());
    let n = lattice.rank();
    if cert.schema != CERTIFICATE_SCHEMA {
        r.fail("schema", format!("unsupported schema {}", cert.schema));
    }
    if cert.lattice_hash != lattice.hash() {
        r.fail("lattice_hash", format!("certificate {} but lattice {}", cert.lattice_hash, lattice.hash()));
    }
    if cert.lattice.gram() != lattice.gram() {
        r.fail("lattice", "embedded Gram matrix differs from the given lattice");
    }
    let data: Vec<GeneratorSetData> = sets.iter().map(GeneratorSet::to_data).collect();
    if data != cert.generator_sets {
        r.fail("generator_sets", "embedded generators differ from the given sets");
    }
    for g in sets.iter().flat_map(|s| &s.generators) {
        if !g.in_so_plus() {
            r.fail("generator_sets", "a generator is not in SO+");
            break;
        }
    }

    // word product
    let mut product = IntMatrix::identity(n);
    let mut word_ok = true;
    for (k, l) in cert.word.iter().enumerate() {
        let Some(g) = sets.get(l.set).and_then(|s| s.generators.get(l.gen)) else {
            r.fail("word", format!("letter {k} {:?} names a missing generator", l));
            word_ok = false;
            break;
        };
        if l.exp == 0 {
            r.fail("word", format!("letter {k} has exponent 0"));
            word_ok = false;
            break;
        }
        product = product.checked_mul(g.pow(l.exp).matrix()).expect("square");
    }
    if word_ok && product != cert.matrix {
        r.fail("matrix", matrix_diff(&cert.matrix, &product));
    }

    let cp = match char_poly(&cert.matrix) {
        Ok(cp) => cp,
        Err(e) => {
            r.fail("matrix", e.to_string());
            return r.finish();
        }
    };
    if cp != cert.char_poly {
        r.fail("char_poly", format!("certificate {} but recomputed {}", cert.char_poly, cp));
    }
    let class = match Classifier::new(n).classify(&cp) {
        Ok(c) => c,
        Err(e) => {
            r.fail("classification", e.to_string());
            return r.finish();
        }
    };
    if class != cert.classification {
        r.fail(
            "classification",
            format!("certificate {:?} but recomputed {:?}", cert.classification.kind, class.kind),
        );
    }
    let full_degree = class.salem_degree == Some(n);
    if cert.full_degree != full_degree {
        r.fail("full_degree", format!("certificate {} but recomputed {full_degree}", cert.full_degree));
    }
    let non_liftable = full_degree && n == 22;
    if cert.non_liftable_flag != non_liftable {
        r.fail(
            "non_liftable_flag",
            format!("certificate {} but recomputed {non_liftable}", cert.non_liftable_flag),
        );
    }
    check_entropy(&mut r, &cert.entropy, &class);
    r.finish()
}

fn matrix_diff(claimed: &IntMatrix, actual: &IntMatrix) -> String {
    if claimed.rows() != actual.rows() || claimed.cols() != actual.cols() {
        return format!(
            "word product is {}x{}, certificate matrix is {}x{}",
            actual.rows(),
            actual.cols(),
            claimed.rows(),
            claimed.cols()
        );
    }
    let mut diffs = Vec::new();
    let mut count = 0;
    for i in 0..actual.rows() {
        for j in 0..actual.cols() {
            if claimed[(i, j)] != actual[(i, j)] {
                count += 1;
                if diffs.len() < 5 {
                    diffs.push(format!("({i},{j}): certificate {} vs product {}", claimed[(i, j)], actual[(i, j)]));
                }
            }
        }
    }
    format!("word product differs in {count} entries: {}", diffs.join("; "))
}

/// Accepts any interval that provably contains the spectral radius, with log
/// strings that provably bracket its logarithm.
fn check_entropy(r: &mut Report, e: &EntropyInterval, class: &SalemClassification) {
    if e.lower > e.upper {
        r.fail("entropy", "lower bound exceeds upper bound");
        return;
    }
    let (Ok(log_lo), Ok(log_hi)) = (parse_rational(&e.log_lower), parse_rational(&e.log_upper)) else {
        r.fail("entropy", "log bounds are not decimal numbers");
        return;
    };
    let one = BigRational::one();
    let Some(salem) = &class.salem_factor else {
        if !e.contains(&one) {
            r.fail("entropy", "spectral radius 1 lies outside the interval");
        }
        if log_lo > BigRational::zero() || log_hi < BigRational::zero() {
            r.fail("entropy", "log bounds exclude 0");
        }
        return;
    };
    // the Salem root is the only root of the factor above 1
    let seq = SturmSequence::new(salem).expect("nonzero factor");
    let from = if e.lower > one { e.lower.clone() } else { one.clone() };
    let mut hits = if e.upper > from {
        seq.count(&from, &e.upper).unwrap_or(0)
    } else {
        0
    };
    if e.lower > one && salem.sign_at(&e.lower) == 0 {
        hits += 1;
    }
    if hits == 0 {
        r.fail("entropy", "interval does not contain the Salem root");
        return;
    }
    let tight = spectral_radius_with_digits(
        class,
        &BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 40)),
        40,
    )
    .expect("Salem factor present");
    let (ln_lo, _) = ln_bounds(&tight.lower, 40);
    let (_, ln_hi) = ln_bounds(&tight.upper, 40);
    if log_lo > ln_lo {
        r.fail("entropy", format!("log_lower {} exceeds the logarithm", e.log_lower));
    }
    if log_hi < ln_hi {
        r.fail("entropy", format!("log_upper {} is below the logarithm", e.log_upper));
    }
}
