//! Reading lattices, matrices, polynomials and generator sets from command
//! line arguments: a file path, a catalog name, a lattice expression or
//! inline JSON.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::catalog::{find_entry, CatalogError};
use crate::isometry::{GeneratorSet, GeneratorSetData, IsometryError};
use crate::lattice::{GramLattice, LatticeError};
use crate::matrix::{IntMatrix, JsonInt};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{what}: {detail}")]
    Json { what: String, detail: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Isometry(#[from] IsometryError),
    #[error("generator file lattice {found} differs from {expected}")]
    LatticeMismatch { expected: String, found: String },
}

pub fn read_file(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Inline JSON when `arg` starts with `[` or `{`, otherwise a file path.
pub fn json_arg<T: DeserializeOwned>(arg: &str) -> Result<T, InputError> {
    let t = arg.trim_start();
    let (text, what) = if t.starts_with('[') || t.starts_with('{') {
        (arg.to_string(), "inline JSON".to_string())
    } else {
        (read_file(Path::new(arg))?, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|e| InputError::Json {
        what,
        detail: e.to_string(),
    })
}

/// An existing file, or anything that looks like a path, holds lattice
/// JSON; otherwise `arg` is a catalog name or a lattice expression.
pub fn load_lattice(arg: &str) -> Result<GramLattice, InputError> {
    if Path::new(arg).is_file() || arg.ends_with(".json") || arg.contains('/') {
        return json_arg(arg);
    }
    match find_entry(arg) {
        Ok(entry) => Ok(entry.build()?),
        Err(CatalogError::Unknown(_) | CatalogError::NotPrime(_)) => Ok(GramLattice::build(arg)?),
        Err(e) => Err(e.into()),
    }
}

pub fn load_matrix(arg: &str) -> Result<IntMatrix, InputError> {
    json_arg(arg)
}

/// Lattice reference inside a generator file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeRef {
    Named(String),
    Inline(GramLattice),
}

impl LatticeRef {
    pub fn resolve(&self) -> Result<GramLattice, InputError> {
        match self {
            LatticeRef::Named(s) => load_lattice(s),
            LatticeRef::Inline(l) => Ok(l.clone()),
        }
    }
}

/// Generator-set JSON: `{lattice, e, generators}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub lattice: LatticeRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e: Option<Vec<JsonInt>>,
    pub generators: Vec<IntMatrix>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(GeneratorFile),
    Many(Vec<GeneratorFile>),
}

impl GeneratorFile {
    pub fn new(lattice: &GramLattice, set: &GeneratorSet) -> Self {
        let data = set.to_data();
        GeneratorFile {
            lattice: LatticeRef::Inline(lattice.clone()),
            e: data.e,
            generators: data.generators,
        }
    }

    pub fn to_set(&self, lattice: &Arc<GramLattice>) -> Result<GeneratorSet, InputError> {
        let own = self.lattice.resolve()?;
        if own.gram() != lattice.gram() {
            return Err(InputError::LatticeMismatch {
                expected: lattice.name().into(),
                found: own.name().into(),
            });
        }
        let data = GeneratorSetData {
            e: self.e.clone(),
            generators: self.generators.clone(),
        };
        Ok(GeneratorSet::from_data(&data, lattice)?)
    }
}

/// Generator sets from files holding one set or an array of sets, all over
/// `lattice`.
pub fn load_generator_sets(args: &[String], lattice: &Arc<GramLattice>) -> Result<Vec<GeneratorSet>, InputError> {
    let mut sets = Vec::new();
    for arg in args {
        let files = match json_arg::<OneOrMany>(arg)? {
            OneOrMany::One(f) => vec![f],
            OneOrMany::Many(v) => v,
        };
        for f in files {
            sets.push(f.to_set(lattice)?);
        }
    }
    Ok(sets)
}
