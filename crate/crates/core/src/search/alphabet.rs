use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::Zero;

use super::Letter;
use crate::isometry::GeneratorSet;
use crate::matrix::IntMatrix;

struct LetterData {
    letter: Letter,
    matrix: IntMatrix,
    /// Nonzero entries `(i, j, d)` of `L - I`.
    delta: Vec<(usize, usize, BigInt)>,
}

/// Generator powers `g^k`, `1 <= |k| <= max_exponent`, indexed in the order
/// set, generator, then `+1, -1, +2, -2, ...`.
pub(crate) struct Alphabet {
    letters: Vec<LetterData>,
    abelian: Vec<bool>,
    n: usize,
}

impl Alphabet {
    pub(crate) fn new(sets: &[GeneratorSet], max_exponent: u32, n: usize) -> Self {
        let mut letters = Vec::new();
        for (s, set) in sets.iter().enumerate() {
            for (j, g) in set.generators.iter().enumerate() {
                let inv = g.inverse();
                for k in 1..=max_exponent as i32 {
                    for (exp, base) in [(k, g), (-k, &inv)] {
                        let matrix = base.matrix().pow(k as u32);
                        let delta = sparse_delta(&matrix);
                        letters.push(LetterData {
                            letter: Letter { set: s, gen: j, exp },
                            matrix,
                            delta,
                        });
                    }
                }
            }
        }
        let abelian = sets
            .iter()
            .map(|set| {
                let gs = &set.generators;
                gs.iter()
                    .enumerate()
                    .all(|(i, g)| gs[i + 1..].iter().all(|h| g.commutes_with(h)))
            })
            .collect();
        Alphabet { letters, abelian, n }
    }

    pub(crate) fn len(&self) -> usize {
        self.letters.len()
    }

    pub(crate) fn letter(&self, i: u16) -> Letter {
        self.letters[i as usize].letter
    }

    /// Whether `next` may follow `prev`: never the same generator twice in a
    /// row, and in canonical mode commuting runs must be increasing.
    pub(crate) fn follows(&self, prev: Option<u16>, next: u16, canonical: bool) -> bool {
        let Some(p) = prev else { return true };
        let (a, b) = (self.letter(p), self.letter(next));
        if a.set != b.set {
            return true;
        }
        if a.gen == b.gen {
            return false;
        }
        !(canonical && self.abelian[a.set] && b.gen < a.gen)
    }

    /// `m * L` through the sparse difference `L - I`.
    pub(crate) fn apply(&self, m: &IntMatrix, l: u16) -> IntMatrix {
        let mut out = m.clone();
        for (i, j, d) in &self.letters[l as usize].delta {
            for r in 0..self.n {
                let x = &m[(r, *i)];
                if !x.is_zero() {
                    out[(r, *j)] += x * d;
                }
            }
        }
        out
    }

    pub(crate) fn product(&self, word: &[u16]) -> IntMatrix {
        word.iter()
            .fold(IntMatrix::identity(self.n), |m, &l| self.apply(&m, l))
    }

    pub(crate) fn matrix(&self, l: u16) -> &IntMatrix {
        &self.letters[l as usize].matrix
    }
}

fn sparse_delta(m: &IntMatrix) -> Vec<(usize, usize, BigInt)> {
    let n = m.rows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let mut d = m[(i, j)].clone();
            if i == j {
                d -= 1;
            }
            if !d.is_zero() {
                out.push((i, j, d));
            }
        }
    }
    out
}

pub(crate) fn matrix_hash(m: &IntMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    m.hash(&mut h);
    h.finish()
}
