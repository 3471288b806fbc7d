//! Height-bounded search for primitive isotropic vectors.
//!
//! The Gram matrix is split into connected blocks (indices linked by a
//! nonzero off-diagonal entry). Each block's box `[-h, h]^k` is tabulated by
//! norm, and the tables are combined with interval pruning so that only
//! norm-zero combinations are ever assembled.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{GramLattice, LatticeError};

pub const DEFAULT_ISOTROPIC_BUDGET: usize = 10_000_000;

struct BlockTable {
    indices: Vec<usize>,
    by_norm: BTreeMap<i128, Vec<Vec<i64>>>,
    min: i128,
    max: i128,
}

fn components(l: &GramLattice) -> Vec<Vec<usize>> {
    let n = l.rank();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut comp = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            for j in 0..n {
                if !seen[j] && i != j && !l.gram()[(i, j)].is_zero() {
                    seen[j] = true;
                    comp.push(j);
                }
            }
            k += 1;
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

fn tabulate(
    l: &GramLattice,
    indices: Vec<usize>,
    h: i64,
    budget: usize,
) -> Result<BlockTable, LatticeError> {
    let k = indices.len();
    let side = (2 * h + 1) as u128;
    let count = side.checked_pow(k as u32).unwrap_or(u128::MAX);
    if count > budget as u128 {
        return Err(LatticeError::TooLarge(format!(
            "block of rank {k} at height {h} has {count} vectors, budget {budget}"
        )));
    }
    let g: Vec<Vec<i128>> = indices
        .iter()
        .map(|&i| {
            indices
                .iter()
                .map(|&j| {
                    l.gram()[(i, j)].to_i128().ok_or_else(|| {
                        LatticeError::TooLarge("Gram entry exceeds 128 bits".into())
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut by_norm: BTreeMap<i128, Vec<Vec<i64>>> = BTreeMap::new();
    let mut x = vec![-h; k];
    loop {
        let mut q: i128 = 0;
        for a in 0..k {
            if x[a] == 0 {
                continue;
            }
            let row: i128 = (0..k).map(|b| g[a][b] * x[b] as i128).sum();
            q += x[a] as i128 * row;
        }
        by_norm.entry(q).or_default().push(x.clone());
        // odometer
        let mut pos = k;
        loop {
            if pos == 0 {
                let min = *by_norm.keys().next().unwrap();
                let max = *by_norm.keys().next_back().unwrap();
                return Ok(BlockTable {
                    indices,
                    by_norm,
                    min,
                    max,
                });
            }
            pos -= 1;
            if x[pos] < h {
                x[pos] += 1;
                break;
            }
            x[pos] = -h;
        }
    }
}

/// All primitive isotropic vectors with coordinates in `[-h, h]`, first
/// nonzero coordinate positive, sorted lexicographically.
pub fn find_isotropic(l: &GramLattice, height_bound: u32) -> Result<Vec<Vec<BigInt>>, LatticeError> {
    find_isotropic_with_budget(l, height_bound, DEFAULT_ISOTROPIC_BUDGET)
}

pub fn find_isotropic_with_budget(
    l: &GramLattice,
    height_bound: u32,
    budget: usize,
) -> Result<Vec<Vec<BigInt>>, LatticeError> {
    if !l.is_hyperbolic() {
        return Err(LatticeError::NoCone(l.signature()));
    }
    if height_bound == 0 {
        return Ok(Vec::new());
    }
    let h = height_bound as i64;
    let tables = components(l)
        .into_iter()
        .map(|c| tabulate(l, c, h, budget))
        .collect::<Result<Vec<_>, _>>()?;

    // suffix ranges of attainable norms
    let m = tables.len();
    let mut suffix_min = vec![0i128; m + 1];
    let mut suffix_max = vec![0i128; m + 1];
    for i in (0..m).rev() {
        suffix_min[i] = suffix_min[i + 1] + tables[i].min;
        suffix_max[i] = suffix_max[i + 1] + tables[i].max;
    }

    let n = l.rank();
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut current = vec![0i64; n];
    combine(
        &tables,
        0,
        0,
        &suffix_min,
        &suffix_max,
        &mut current,
        &mut out,
        budget,
    )?;

    let mut found: Vec<Vec<i64>> = out
        .into_iter()
        .filter(|v| {
            let first = v.iter().find(|&&c| c != 0);
            first.is_some_and(|&c| c > 0) && v.iter().fold(0i64, |g, &c| g.gcd(&c)) == 1
        })
        .collect();
    found.sort();
    Ok(found
        .into_iter()
        .map(|v| v.into_iter().map(BigInt::from).collect())
        .collect())
}

#[allow(clippy::too_many_arguments)]
fn combine(
    tables: &[BlockTable],
    block: usize,
    partial: i128,
    suffix_min: &[i128],
    suffix_max: &[i128],
    current: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
    budget: usize,
) -> Result<(), LatticeError> {
    if block == tables.len() {
        if partial == 0 {
            if out.len() >= budget {
                return Err(LatticeError::TooLarge(format!(
                    "more than {budget} isotropic vectors"
                )));
            }
            out.push(current.clone());
        }
        return Ok(());
    }
    let t = &tables[block];
    let need = -partial;
    let lo = need - suffix_max[block + 1];
    let hi = need - suffix_min[block + 1];
    for (&q, vecs) in t.by_norm.range(lo..=hi) {
        for v in vecs {
            for (&i, &c) in t.indices.iter().zip(v) {
                current[i] = c;
            }
            combine(
                tables,
                block + 1,
                partial + q,
                suffix_min,
                suffix_max,
                current,
                out,
                budget,
            )?;
        }
    }
    for &i in &t.indices {
        current[i] = 0;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;


    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Full box enumeration, no block structure.
    fn brute_force(l: &GramLattice, h: i64) -> Vec<Vec<BigInt>> {
        let n = l.rank();
        let mut x = vec![-h; n];
        let mut out = Vec::new();
        'outer: loop {
            let v = big(&x);
            let first = x.iter().find(|&&c| c != 0);
            if first.is_some_and(|&c| c > 0)
                && x.iter().fold(0i64, |g, &c| g.gcd(&c)) == 1
                && l.norm(&v).is_zero()
            {
                out.push(v);
            }
            for pos in (0..n).rev() {
                if x[pos] < h {
                    x[pos] += 1;
                    continue 'outer;
                }
                x[pos] = -h;
            }
            break;
        }
        out.sort();
        out
    }

    #[test]
    fn hyperbolic_plane() {
        let l = GramLattice::build("U").unwrap();
        let found = find_isotropic(&l, 1).unwrap();
        assert_eq!(found, vec![big(&[0, 1]), big(&[1, 0])]);
    }

    #[test]
    fn u_plus_e8_matches_brute_force() {
        let l = GramLattice::build("U+E8").unwrap();
        let found = find_isotropic(&l, 1).unwrap();
        assert_eq!(found, brute_force(&l, 1));
        // the standard U vectors come first
        assert_eq!(found[0], big(&[0, 1, 0, 0, 0, 0, 0, 0, 0, 0]));
        assert_eq!(found[1], big(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 0]));
        // (1, 1, r) with r a root of E8 inside the box is isotropic too
        assert!(found.len() > 2);
        for v in &found {
            assert!(l.norm(v).is_zero());
        }
    }

    #[test]
    fn coupled_blocks_match_brute_force() {
        let l = GramLattice::build("U(2)+A2+[[-2,1],[1,-4]]").unwrap();
        assert_eq!(find_isotropic(&l, 2).unwrap(), brute_force(&l, 2));
    }

    #[test]
    fn definite_lattice_has_no_cone() {
        let l = GramLattice::build("[[2]]").unwrap();
        assert!(matches!(find_isotropic(&l, 1), Err(LatticeError::NoCone(_))));
    }

    #[test]
    fn budget_is_enforced() {
        let l = GramLattice::build("U+E8").unwrap();
        assert!(matches!(
            find_isotropic_with_budget(&l, 3, 1000),
            Err(LatticeError::TooLarge(_))
        ));
    }

    #[test]
    fn rank_22_bound_1_is_fast_and_starts_with_u() {
        let l = GramLattice::build("U+E8+E8+D4").unwrap();
        let found = find_isotropic(&l, 1).unwrap();
        let mut e = vec![BigInt::zero(); 22];
        e[1] = BigInt::from(1);
        assert_eq!(found[0], e);
        e[1] = BigInt::zero();
        e[0] = BigInt::from(1);
        assert_eq!(found[1], e);
    }
}
