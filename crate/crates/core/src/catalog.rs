//! Named lattices with the invariants they are expected to have. Every
//! build recomputes the profile and refuses to hand out a lattice that
//! drifted from it.

use std::path::Path;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::lattice::{GramLattice, LatticeError, Signature};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0:?}")]
    Unknown(String),
    #[error("catalog entry {name}: expected profile {expected}, computed {found}")]
    ProfileMismatch {
        name: String,
        expected: String,
        found: String,
    },
    #[error("catalog entry {name}: {source}")]
    Lattice {
        name: String,
        #[source]
        source: LatticeError,
    },
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("cannot read catalog file {path}: {detail}")]
    Read { path: String, detail: String },
}

/// Rank, signature, parity and discriminant group of a lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub rank: usize,
    pub signature: Signature,
    pub even: bool,
    pub divisors: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_sigma: Option<(u64, usize)>,
}

impl Profile {
    pub fn of(l: &GramLattice) -> Result<Self, LatticeError> {
        let d = l.discriminant()?;
        let divisors = d
            .elementary_divisors
            .iter()
            .map(|x| {
                x.to_u64()
                    .ok_or_else(|| LatticeError::TooLarge(format!("elementary divisor {x}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Profile {
            rank: l.rank(),
            signature: l.signature(),
            even: l.is_even(),
            divisors,
            p_sigma: d.p_elementary_sigma,
        })
    }
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rank {}, signature {}, {}, divisors {:?}",
            self.rank,
            self.signature,
            if self.even { "even" } else { "odd" },
            self.divisors
        )?;
        if let Some((p, s)) = self.p_sigma {
            write!(f, ", (p, sigma) = ({p}, {s})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub expr: String,
    pub expected: Profile,
    pub note: String,
}

impl CatalogEntry {
    /// Builds the lattice and checks it against the expected profile.
    pub fn build(&self) -> Result<GramLattice, CatalogError> {
        let wrap = |source| CatalogError::Lattice {
            name: self.name.clone(),
            source,
        };
        let l = GramLattice::build(&self.expr).map_err(wrap)?.renamed(&self.name);
        let found = Profile::of(&l).map_err(wrap)?;
        if found != self.expected {
            return Err(CatalogError::ProfileMismatch {
                name: self.name.clone(),
                expected: self.expected.to_string(),
                found: found.to_string(),
            });
        }
        Ok(l)
    }
}

fn entry(name: &str, rank: usize, even: bool, divisors: &[u64], p_sigma: Option<(u64, usize)>, note: &str) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        expr: name.into(),
        expected: Profile {
            rank,
            signature: Signature::new(1, 0, rank - 1),
            even,
            divisors: divisors.to_vec(),
            p_sigma,
        },
        note: note.into(),
    }
}

/// `U(p)+E8+E8`: rank 18, discriminant `(Z/p)^2`.
pub fn u_p_e8_e8(p: u64) -> Result<CatalogEntry, CatalogError> {
    if !(p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)) {
        return Err(CatalogError::NotPrime(p));
    }
    Ok(entry(
        &format!("U({p})+E8+E8"),
        18,
        true,
        &[p, p],
        Some((p, 1)),
        "rank 18, (Z/p)^2-elementary family",
    ))
}

pub fn catalog_list() -> Vec<CatalogEntry> {
    let mut list = vec![
        entry("U", 2, true, &[], None, "hyperbolic plane, unimodular"),
        entry("U+E8", 10, true, &[], None, "even unimodular, rank 10"),
        CatalogEntry {
            expected: Profile {
                signature: Signature::new(2, 0, 2),
                ..entry("U+U", 4, true, &[], None, "").expected
            },
            ..entry("U+U", 4, true, &[], None, "signature (2,2): two positive directions, no positive cone")
        },
        entry("U+A2", 4, true, &[3], None, "rank 4 hyperbolic, discriminant Z/3"),
        entry(
            "U+E8+E8+D4",
            22,
            true,
            &[2, 2],
            Some((2, 1)),
            "rank 22, discriminant (Z/2)^2; profile of NS(X(2)), isomorphism not certified",
        ),
    ];
    for p in [2, 3, 5] {
        list.push(u_p_e8_e8(p).expect("prime"));
    }
    list
}

/// Looks up a built-in entry, then the `U(p)+E8+E8` family for any prime.
pub fn find_entry(name: &str) -> Result<CatalogEntry, CatalogError> {
    let key: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(e) = catalog_list().into_iter().find(|e| e.name == key) {
        return Ok(e);
    }
    if let Some(p) = key
        .strip_prefix("U(")
        .and_then(|s| s.strip_suffix(")+E8+E8"))
        .and_then(|s| s.parse::<u64>().ok())
    {
        return u_p_e8_e8(p);
    }
    Err(CatalogError::Unknown(name.into()))
}

/// Reads user-supplied entries (a JSON array) and validates each one.
pub fn load_entries(path: &Path) -> Result<Vec<CatalogEntry>, CatalogError> {
    let read = |detail: String| CatalogError::Read {
        path: path.display().to_string(),
        detail,
    };
    let text = std::fs::read_to_string(path).map_err(|e| read(e.to_string()))?;
    let entries: Vec<CatalogEntry> = serde_json::from_str(&text).map_err(|e| read(e.to_string()))?;
    for e in &entries {
        e.build()?;
    }
    Ok(entries)
}
