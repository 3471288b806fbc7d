//! End-to-end runs on catalog lattices: two parabolic groups, one search,
//! and the certificate persisted next to the configuration that produced it.
//!
//! Layout under the output directory:
//!
//! ```text
//! certs/<entry>/<timestamp>-<seed>.json          certificate
//! certs/<entry>/<timestamp>-<seed>.config.json   RunConfig + entry
//! certs/<entry>/<timestamp>-<seed>.exhausted.json  stats, when nothing was found
//! certs/<entry>/latest                           file name of the newest run
//! ```

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::catalog::{find_entry, CatalogEntry, CatalogError};
use crate::isometry::{parabolic_group, GeneratorSet, IsometryError};
use crate::lattice::{find_isotropic_with_budget, GramLattice, LatticeError, DEFAULT_ISOTROPIC_BUDGET};
use crate::matrix::json_int_vec;
use crate::rational::rational_string;
use crate::search::{salem_search, verify, SalemCertificate, SearchConfig, SearchError, SearchStats, Strategy};

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("invalid run configuration: {0}")]
    Config(String),
    #[error("unsupported lattice {entry}: {reason}")]
    Unsupported { entry: String, reason: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
    #[error("search exhausted after {} words; stats written to {}", .stats.words_examined, .path.display())]
    Exhausted { stats: SearchStats, degenerate: bool, path: PathBuf },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("certificate failed verification: {0}")]
    Unverified(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {detail}")]
    Format { path: PathBuf, detail: String },
    #[error("replay of {0} produced a different certificate")]
    ReplayMismatch(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    /// Extra catalog entries (JSON array), consulted before the built-ins.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog_file: Option<PathBuf>,
    pub seed: u64,
    #[serde(with = "rational_string")]
    pub tol: BigRational,
    pub budget: u64,
    pub workers: usize,
    pub strategy: Strategy,
    pub max_word_length: usize,
    pub height_bound: u32,
    pub isotropic_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SearchConfig::default();
        RunConfig {
            out_dir: PathBuf::from("."),
            catalog_file: None,
            seed: s.rng_seed,
            tol: s.tol,
            budget: s.max_words,
            workers: 1,
            strategy: s.strategy,
            max_word_length: s.max_word_length,
            height_bound: 1,
            isotropic_budget: DEFAULT_ISOTROPIC_BUDGET,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), DemoError> {
        let fail = |m: &str| Err(DemoError::Config(m.into()));
        if !self.tol.is_positive() {
            return fail("tol must be positive");
        }
        if self.budget == 0 {
            return fail("budget must be positive");
        }
        if self.workers == 0 {
            return fail("workers must be positive");
        }
        if self.max_word_length == 0 {
            return fail("max_word_length must be positive");
        }
        if self.height_bound == 0 {
            return fail("height_bound must be positive");
        }
        if self.isotropic_budget == 0 {
            return fail("isotropic_budget must be positive");
        }
        self.search_config().validate()?;
        Ok(())
    }

    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            strategy: self.strategy,
            max_word_length: self.max_word_length,
            max_words: self.budget,
            rng_seed: self.seed,
            tol: self.tol.clone(),
            workers: self.workers,
            ..SearchConfig::default()
        }
    }
}

/// What is written next to each certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub entry: String,
    pub config: RunConfig,
    #[serde(with = "vec_of_int_vec")]
    pub isotropic: Vec<Vec<BigInt>>,
}

mod vec_of_int_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::matrix::JsonInt;

    pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|r| r.iter().cloned().map(JsonInt).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        Ok(Vec::<Vec<JsonInt>>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.0).collect())
            .collect())
    }
}

#[derive(Serialize)]
struct ExhaustedRecord<'a> {
    entry: &'a str,
    seed: u64,
    degenerate: bool,
    stats: &'a SearchStats,
    #[serde(with = "json_int_vec")]
    e1: Vec<BigInt>,
    #[serde(with = "json_int_vec")]
    e2: Vec<BigInt>,
}

#[derive(Clone, Debug)]
pub struct DemoRun {
    pub certificate: SalemCertificate,
    pub certificate_path: PathBuf,
    pub config_path: PathBuf,
}

/// The lattice, its two smallest isotropic vectors and their parabolic groups.
pub struct DemoSetup {
    pub lattice: Arc<GramLattice>,
    pub isotropic: Vec<Vec<BigInt>>,
    pub sets: Vec<GeneratorSet>,
}

pub fn resolve_entry(name: &str, cfg: &RunConfig) -> Result<CatalogEntry, DemoError> {
    if let Some(path) = &cfg.catalog_file {
        let key: String = name.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(e) = crate::catalog::load_entries(path)?.into_iter().find(|e| e.name == key) {
            return Ok(e);
        }
    }
    Ok(find_entry(name)?)
}

pub fn prepare(entry: &CatalogEntry, cfg: &RunConfig) -> Result<DemoSetup, DemoError> {
    let lattice = Arc::new(entry.build()?);
    let n = lattice.rank();
    let unsupported = |reason: String| DemoError::Unsupported {
        entry: entry.name.clone(),
        reason,
    };
    if n < 4 {
        return Err(unsupported(format!("rank {n} < 4")));
    }
    if n % 2 == 1 {
        return Err(unsupported(format!("odd rank {n} admits no full-degree Salem factor")));
    }
    let iso = find_isotropic_with_budget(&lattice, cfg.height_bound, cfg.isotropic_budget)?;
    if iso.len() < 2 {
        return Err(unsupported(format!(
            "fewer than two primitive isotropic vectors of height <= {}",
            cfg.height_bound
        )));
    }
    let isotropic: Vec<Vec<BigInt>> = iso.into_iter().take(2).collect();
    let sets = isotropic
        .iter()
        .map(|e| parabolic_group(&lattice, e).map(|g| g.to_generator_set()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DemoSetup {
        lattice,
        isotropic,
        sets,
    })
}

/// Runs the search for a catalog entry without touching the filesystem.
pub fn search_entry(entry: &CatalogEntry, cfg: &RunConfig) -> Result<(DemoSetup, Result<SalemCertificate, SearchError>), DemoError> {
    cfg.validate()?;
    let setup = prepare(entry, cfg)?;
    log::info!(
        "{}: rank {}, isotropic {:?} and {:?}, {} + {} generators",
        entry.name,
        setup.lattice.rank(),
        setup.isotropic[0],
        setup.isotropic[1],
        setup.sets[0].len(),
        setup.sets[1].len()
    );
    let result = salem_search(&setup.sets, &setup.lattice, &cfg.search_config());
    Ok((setup, result))
}

/// Builds the entry, searches, verifies and persists the certificate and
/// its configuration.
pub fn run_demo(entry_name: &str, cfg: &RunConfig) -> Result<DemoRun, DemoError> {
    let entry = resolve_entry(entry_name, cfg)?;
    let (setup, result) = search_entry(&entry, cfg)?;
    let dir = cfg.out_dir.join("certs").join(dir_name(&entry.name));
    create_dir(&dir)?;
    let stem = unique_stem(&dir, cfg.seed);
    match result {
        Ok(cert) => {
            let report = verify(&cert);
            if !report.ok {
                return Err(DemoError::Unverified(format!("{:?}", report.mismatches)));
            }
            let record = RunRecord {
                entry: entry.name.clone(),
                config: cfg.clone(),
                isotropic: setup.isotropic,
            };
            let config_path = dir.join(format!("{stem}.config.json"));
            let certificate_path = dir.join(format!("{stem}.json"));
            write_atomic(&config_path, pretty(&record).as_bytes())?;
            write_atomic(&certificate_path, cert.to_json().as_bytes())?;
            write_atomic(&dir.join("latest"), format!("{stem}.json\n").as_bytes())?;
            Ok(DemoRun {
                certificate: cert,
                certificate_path,
                config_path,
            })
        }
        Err(SearchError::Exhausted { stats, degenerate }) => {
            let path = dir.join(format!("{stem}.exhausted.json"));
            let record = ExhaustedRecord {
                entry: &entry.name,
                seed: cfg.seed,
                degenerate,
                stats: &stats,
                e1: setup.isotropic[0].clone(),
                e2: setup.isotropic[1].clone(),
            };
            write_atomic(&path, pretty(&record).as_bytes())?;
            Err(DemoError::Exhausted {
                stats,
                degenerate,
                path,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// The config file stored next to a certificate.
pub fn config_path_for(cert_path: &Path) -> PathBuf {
    let name = cert_path.file_name().and_then(|s| s.to_str()).unwrap_or_default();
    let stem = name.strip_suffix(".json").unwrap_or(name);
    cert_path.with_file_name(format!("{stem}.config.json"))
}

/// Re-runs a persisted demo single-worker with its stored configuration and
/// checks the new certificate is byte-identical to the stored one.
pub fn replay(cert_path: &Path) -> Result<SalemCertificate, DemoError> {
    let stored = read(cert_path)?;
    let config_path = config_path_for(cert_path);
    let record: RunRecord = serde_json::from_str(&read(&config_path)?).map_err(|e| DemoError::Format {
        path: config_path.clone(),
        detail: e.to_string(),
    })?;
    let cfg = RunConfig {
        workers: 1,
        ..record.config
    };
    let entry = resolve_entry(&record.entry, &cfg)?;
    let (_, result) = search_entry(&entry, &cfg)?;
    let cert = result?;
    if cert.to_json() != stored {
        return Err(DemoError::ReplayMismatch(cert_path.to_path_buf()));
    }
    Ok(cert)
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn dir_name(entry: &str) -> String {
    entry
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "+-_".contains(c) { c } else { '_' })
        .collect()
}

fn unique_stem(dir: &Path, seed: u64) -> String {
    let ts = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
    let mut stem = format!("{ts}-{seed}");
    let mut k = 1;
    while [".json", ".exhausted.json"].iter().any(|s| dir.join(format!("{stem}{s}")).exists()) {
        stem = format!("{ts}.{k}-{seed}");
        k += 1;
    }
    stem
}

fn create_dir(dir: &Path) -> Result<(), DemoError> {
    fs::create_dir_all(dir).map_err(|source| DemoError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn read(path: &Path) -> Result<String, DemoError> {
    fs::read_to_string(path).map_err(|source| DemoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to a temporary sibling, syncs, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DemoError> {
    let io = |source| DemoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}
