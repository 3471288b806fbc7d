//! Word search in generator sets for an isometry whose characteristic
//! polynomial has a Salem factor, with self-contained certificates.

mod alphabet;
mod certificate;
mod prefilter;
mod words;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use certificate::{verify, verify_with, Mismatch, SalemCertificate, VerifyReport, CERTIFICATE_SCHEMA};

use crate::intpoly::{
    char_poly, spectral_radius, Classifier, EntropyInterval, IntPolynomial, PolyError,
    SalemClassification,
};
use crate::isometry::{fixed_subspace, GeneratorSet, Isometry, IsometryError};
use crate::lattice::GramLattice;
use crate::rational::rational_string;
use alphabet::Alphabet;
use words::{Bfs, Event, Limits, RandomWalk};

/// Words examined by one strategy before `mix` switches to the other.
const MIX_CHUNK: u64 = 1000;

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error("search exhausted after {} words{}", .stats.words_examined, if *.degenerate { " (all generators fix a common vector)" } else { "" })]
    Exhausted { stats: SearchStats, degenerate: bool },
    #[error("entropy is only defined for cone-preserving isometries")]
    NotConePreserving,
    #[error(transparent)]
    Isometry(#[from] IsometryError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Strategy {
    #[serde(rename = "bfs")]
    #[value(name = "bfs")]
    Bfs,
    #[serde(rename = "rw")]
    #[value(name = "rw")]
    RandomWalk,
    #[serde(rename = "mix")]
    #[value(name = "mix")]
    Interleaved,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub max_word_length: usize,
    pub max_words: u64,
    pub rng_seed: u64,
    #[serde(with = "rational_string")]
    pub tol: BigRational,
    pub require_full_degree: bool,
    pub max_exponent: u32,
    pub entry_bits: u64,
    pub restart_probability: f64,
    pub batch_size: usize,
    /// Thread count; does not affect the result.
    #[serde(skip, default = "one")]
    pub workers: usize,
}

fn one() -> usize {
    1
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Interleaved,
            max_word_length: 64,
            max_words: 1_000_000,
            rng_seed: 0,
            tol: BigRational::new(BigInt::from(1), BigInt::from(1_000_000)),
            require_full_degree: true,
            max_exponent: 3,
            entry_bits: 4096,
            restart_probability: 0.1,
            batch_size: 64,
            workers: 1,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let fail = |m: &str| Err(SearchError::Config(m.to_string()));
        if self.max_word_length == 0 {
            return fail("max_word_length must be positive");
        }
        if self.max_words == 0 {
            return fail("max_words must be positive");
        }
        if !self.tol.is_positive() {
            return fail("tol must be positive");
        }
        if self.max_exponent == 0 {
            return fail("max_exponent must be positive");
        }
        if self.entry_bits < 64 {
            return fail("entry_bits must be at least 64");
        }
        if !(self.restart_probability > 0.0 && self.restart_probability < 1.0) {
            return fail("restart_probability must lie in (0, 1)");
        }
        if self.batch_size == 0 || self.workers == 0 {
            return fail("batch_size and workers must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub words_examined: u64,
    pub distinct: u64,
    pub dedup_hits: u64,
    pub guard_aborts: u64,
    pub prefiltered: u64,
    pub classified: u64,
}

/// One step of a word: generator `gen` of set `set` raised to `exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct Letter {
    pub set: usize,
    pub gen: usize,
    pub exp: i32,
}

impl From<[i64; 3]> for Letter {
    fn from(v: [i64; 3]) -> Self {
        Letter {
            set: v[0] as usize,
            gen: v[1] as usize,
            exp: v[2] as i32,
        }
    }
}

impl From<Letter> for [i64; 3] {
    fn from(l: Letter) -> Self {
        [l.set as i64, l.gen as i64, l.exp as i64]
    }
}

/// Classifies `char_poly(g)` and isolates its spectral radius.
pub fn entropy_of(g: &Isometry, tol: &BigRational) -> Result<EntropyInterval, SearchError> {
    if !g.is_cone_preserving() {
        return Err(SearchError::NotConePreserving);
    }
    let n = g.matrix().rows();
    let c = Classifier::new(n).classify(&char_poly(g.matrix())?)?;
    Ok(spectral_radius(&c, tol)?)
}

enum Source {
    Bfs,
    Walk,
}

struct Pending {
    source: Source,
    event: Event,
}

enum Outcome {
    Skipped,
    Prefiltered,
    Classified {
        char_poly: IntPolynomial,
        class: SalemClassification,
    },
}

fn check_sets(sets: &[GeneratorSet], lattice: &Arc<GramLattice>) -> Result<(), SearchError> {
    if sets.is_empty() || sets.iter().all(GeneratorSet::is_empty) {
        return Err(SearchError::Config("no generators".into()));
    }
    for g in sets.iter().flat_map(|s| &s.generators) {
        if g.lattice().gram() != lattice.gram() {
            return Err(SearchError::Config("generator over a different lattice".into()));
        }
        if !g.in_so_plus() {
            return Err(SearchError::Config("every generator must lie in SO+".into()));
        }
    }
    Ok(())
}

/// Explores words until one has a Salem factor (of degree equal to the rank
/// when `require_full_degree`). The reported word is the first success in
/// the deterministic candidate order, independent of `workers`.
pub fn salem_search(
    sets: &[GeneratorSet],
    lattice: &Arc<GramLattice>,
    cfg: &SearchConfig,
) -> Result<SalemCertificate, SearchError> {
    cfg.validate()?;
    check_sets(sets, lattice)?;
    let n = lattice.rank();
    if cfg.require_full_degree && n % 2 == 1 {
        return Err(SearchError::Config(format!(
            "a full-degree Salem factor needs even rank, lattice has rank {n}"
        )));
    }
    if cfg.require_full_degree {
        let all: Vec<Isometry> = sets.iter().flat_map(|s| s.generators.clone()).collect();
        let fixed = fixed_subspace(&all)?;
        if fixed.dim() > 0 {
            log::warn!(
                "degenerate configuration: all generators fix a {}-dimensional subspace",
                fixed.dim()
            );
            return Err(SearchError::Exhausted {
                stats: SearchStats::default(),
                degenerate: true,
            });
        }
    }

    let alphabet = Alphabet::new(sets, cfg.max_exponent, n);
    if alphabet.len() > u16::MAX as usize {
        return Err(SearchError::Config("too many letters".into()));
    }
    let classifier = Classifier::new(n);
    let limits = Limits {
        max_len: cfg.max_word_length,
        entry_bits: cfg.entry_bits,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SearchError::Config(e.to_string()))?;

    let mut bfs = matches!(cfg.strategy, Strategy::Bfs | Strategy::Interleaved).then(|| Bfs::new(n));
    let mut walk = matches!(cfg.strategy, Strategy::RandomWalk | Strategy::Interleaved)
        .then(|| RandomWalk::new(n, ChaCha8Rng::seed_from_u64(cfg.rng_seed), cfg.restart_probability));
    let mut bfs_live = bfs.is_some();
    let mut stats = SearchStats::default();
    let mut issued: u64 = 0;

    loop {
        let mut batch: Vec<Pending> = Vec::new();
        let mut candidates = 0;
        let mut ended = false;
        while candidates < cfg.batch_size && issued < cfg.max_words {
            let use_bfs = match (bfs_live, &walk) {
                (true, Some(_)) => (issued / MIX_CHUNK) % 2 == 0,
                (true, None) => true,
                _ => false,
            };
            let pending = if use_bfs {
                match bfs.as_mut().unwrap().next_event(&alphabet, &limits) {
                    Some(event) => Pending {
                        source: Source::Bfs,
                        event,
                    },
                    None => {
                        bfs_live = false;
                        if walk.is_none() {
                            ended = true;
                            break;
                        }
                        continue;
                    }
                }
            } else {
                Pending {
                    source: Source::Walk,
                    event: walk.as_mut().unwrap().next_event(&alphabet, &limits),
                }
            };
            issued += 1;
            if matches!(pending.event, Event::Candidate { .. }) {
                candidates += 1;
            }
            batch.push(pending);
        }

        let outcomes: Vec<Outcome> = pool.install(|| {
            batch
                .par_iter()
                .map(|p| match &p.event {
                    Event::Candidate { matrix, .. } => {
                        if cfg.require_full_degree && !prefilter::no_unit_eigenvalues(matrix) {
                            return Ok(Outcome::Prefiltered);
                        }
                        let cp = char_poly(matrix)?;
                        let class = classifier.classify(&cp)?;
                        Ok(Outcome::Classified {
                            char_poly: cp,
                            class,
                        })
                    }
                    _ => Ok(Outcome::Skipped),
                })
                .collect::<Result<Vec<_>, PolyError>>()
        })?;

        for (p, outcome) in batch.iter().zip(outcomes) {
            stats.words_examined += 1;
            match (&p.event, outcome) {
                (Event::Duplicate, _) => stats.dedup_hits += 1,
                (Event::GuardAbort, _) => stats.guard_aborts += 1,
                (Event::Candidate { .. }, Outcome::Prefiltered) => {
                    stats.distinct += 1;
                    stats.prefiltered += 1;
                }
                (Event::Candidate { node, matrix }, Outcome::Classified { char_poly, class }) => {
                    stats.distinct += 1;
                    stats.classified += 1;
                    let hit = match class.salem_degree {
                        Some(d) => !cfg.require_full_degree || d == n,
                        None => false,
                    };
                    if hit {
                        let arena = match p.source {
                            Source::Bfs => bfs.as_ref().map(|b| b.arena()),
                            Source::Walk => walk.as_ref().map(|w| w.arena()),
                        }
                        .expect("source still alive");
                        let word = arena.word(*node).into_iter().map(|l| alphabet.letter(l)).collect();
                        let entropy = spectral_radius(&class, &cfg.tol)?;
                        return Ok(SalemCertificate::assemble(
                            lattice,
                            sets,
                            cfg,
                            word,
                            matrix.clone(),
                            char_poly,
                            class,
                            entropy,
                            stats,
                        ));
                    }
                }
                (Event::Candidate { .. }, Outcome::Skipped) => unreachable!(),
            }
        }
        if ended || issued >= cfg.max_words {
            return Err(SearchError::Exhausted {
                stats,
                degenerate: false,
            });
        }
    }
}

#[cfg(test)]
mod tests;
