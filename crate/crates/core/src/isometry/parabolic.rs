use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{eichler, GeneratorSet, Isometry, IsometryError};
use crate::lattice::{GramLattice, LatticeError};
use crate::matrix::{ext_gcd, gcd_of, rref, to_rational, IntMatrix};

/// Primitive isotropic `e` with the free abelian unipotent group generated
/// by the transvections `E(e, w_j)` over an integral basis `e, w_1, ..., w_r`
/// of `e^perp`.
#[derive(Clone, Debug)]
pub struct ParabolicGroup {
    pub e: Vec<BigInt>,
    pub generators: Vec<Isometry>,
    /// `e, w_1, ..., w_r, u` with `(e, u) = 1`.
    pub basis_witness: Vec<Vec<BigRational>>,
    /// `w`-coordinates of `g(u)` for each generator `g`.
    pub b_vectors: Vec<Vec<BigRational>>,
    w: Vec<Vec<BigInt>>,
}

impl ParabolicGroup {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// The integral vectors `w_1, ..., w_r`.
    pub fn basis_w(&self) -> &[Vec<BigInt>] {
        &self.w
    }

    pub fn u(&self) -> &[BigRational] {
        self.basis_witness.last().expect("basis contains u")
    }

    pub fn to_generator_set(&self) -> GeneratorSet {
        GeneratorSet::new(Some(self.e.clone()), self.generators.clone())
    }
}

fn unit(n: usize, i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    v[i] = BigInt::one();
    v
}

/// Columns `i`, `j` replaced by `p*ci + q*cj` and `r*ci + s*cj`.
fn mix_columns(cols: &mut [Vec<BigInt>], i: usize, j: usize, m: [&BigInt; 4]) {
    let [p, q, r, s] = m;
    let (ci, cj) = (cols[i].clone(), cols[j].clone());
    cols[i] = ci.iter().zip(&cj).map(|(a, b)| p * a + q * b).collect();
    cols[j] = ci.iter().zip(&cj).map(|(a, b)| r * a + s * b).collect();
}

pub fn parabolic_group(
    lattice: &Arc<GramLattice>,
    e: &[BigInt],
) -> Result<ParabolicGroup, IsometryError> {
    let n = lattice.rank();
    if !lattice.is_hyperbolic() {
        return Err(LatticeError::NoCone(lattice.signature()).into());
    }
    if e.len() != n {
        return Err(IsometryError::Dimension {
            expected: n,
            found: e.len(),
        });
    }
    if e.iter().all(Zero::is_zero) || !lattice.norm(e).is_zero() {
        return Err(IsometryError::Precondition("e is not isotropic".into()));
    }
    if !gcd_of(e).is_one() {
        return Err(IsometryError::Precondition("e is not primitive".into()));
    }

    // Column operations on the identity bring the row (Ge)^T to (g, 0, ..., 0);
    // the remaining columns then span e^perp over Z.
    let mut c = lattice.gram().mul_vec(e);
    let mut cols: Vec<Vec<BigInt>> = (0..n).map(|i| unit(n, i)).collect();
    for j in 1..n {
        if c[j].is_zero() {
            continue;
        }
        let (g, s, t) = ext_gcd(&c[0], &c[j]);
        let (a, b) = (&c[0] / &g, &c[j] / &g);
        mix_columns(&mut cols, 0, j, [&s, &t, &-b, &a]);
        c[0] = g;
        c[j] = BigInt::zero();
    }
    let divisibility = c[0].clone();

    // Coordinates of e in the kernel basis, then fold them into column 1.
    let u_mat = IntMatrix::from_rows((0..n).map(|i| cols.iter().map(|col| col[i].clone()).collect()).collect())?;
    let mut y = u_mat.inverse_unimodular()?.mul_vec(e);
    debug_assert!(y[0].is_zero());
    for j in 2..n {
        if y[j].is_zero() {
            continue;
        }
        let (g, s, t) = ext_gcd(&y[1], &y[j]);
        let (a, b) = (&y[1] / &g, &y[j] / &g);
        // e = y1 k1 + yj kj = g (a k1 + b kj); the pair (a k1 + b kj, -t k1 + s kj)
        // has determinant s a + t b = 1.
        mix_columns(&mut cols, 1, j, [&a, &b, &-t, &s]);
        y[1] = g;
        y[j] = BigInt::zero();
    }
    if y[1].is_negative() {
        cols[1] = cols[1].iter().map(|x| -x).collect();
    }
    debug_assert_eq!(cols[1], e);

    let w: Vec<Vec<BigInt>> = cols[2..].to_vec();
    let u: Vec<BigRational> = cols[0]
        .iter()
        .map(|x| BigRational::new(x.clone(), divisibility.clone()))
        .collect();

    let generators = w
        .iter()
        .map(|wj| eichler(lattice, e, wj))
        .collect::<Result<Vec<_>, _>>()?;

    let mut basis_witness = vec![to_rational(e)];
    basis_witness.extend(w.iter().map(|wj| to_rational(wj)));
    basis_witness.push(u);

    let b_vectors = generators
        .iter()
        .map(|g| {
            let image = g.apply_rational(basis_witness.last().unwrap());
            coordinates(&basis_witness, &image)[1..n - 1].to_vec()
        })
        .collect::<Vec<_>>();
    if rref(b_vectors.clone()).len() != b_vectors.len() {
        return Err(IsometryError::Precondition(
            "translation vectors are linearly dependent".into(),
        ));
    }

    Ok(ParabolicGroup {
        e: e.to_vec(),
        generators,
        basis_witness,
        b_vectors,
        w,
    })
}

/// Coordinates of `x` in a basis of `Q^n` given as row vectors.
fn coordinates(basis: &[Vec<BigRational>], x: &[BigRational]) -> Vec<BigRational> {
    let n = basis.len();
    // rows of the augmented system B^T c = x
    let rows: Vec<Vec<BigRational>> = (0..x.len())
        .map(|i| {
            let mut r: Vec<BigRational> = basis.iter().map(|b| b[i].clone()).collect();
            r.push(x[i].clone());
            r
        })
        .collect();
    let reduced = rref(rows);
    let mut c = vec![BigRational::zero(); n];
    for row in &reduced {
        if let Some(p) = row[..n].iter().position(|v| !v.is_zero()) {
            c[p] = row[n].clone();
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e_first(n: usize) -> Vec<BigInt> {
        unit(n, 0)
    }

    fn check_group(l: &Arc<GramLattice>, e: &[BigInt], r: usize) -> ParabolicGroup {
        let pg = parabolic_group(l, e).unwrap();
        assert_eq!(pg.rank(), r);
        for g in &pg.generators {
            assert_eq!(g.apply(e), e);
            assert_eq!(g.det(), 1);
            assert!(g.in_so_plus());
            assert!(g.is_unipotent_of_order(3));
        }
        for (i, g) in pg.generators.iter().enumerate() {
            for h in &pg.generators[i + 1..] {
                assert!(g.commutes_with(h));
            }
        }
        // basis witness: (e, w_j) = 0, (e, u) = 1, and w_j orthogonal to e
        let er = to_rational(e);
        for w in &pg.basis_witness[..pg.basis_witness.len() - 1] {
            assert!(l.inner_rational(&er, w).is_zero());
        }
        assert!(l.inner_rational(&er, pg.u()).is_one());
        assert_eq!(rref(pg.basis_witness.clone()).len(), l.rank());
        for (j, b) in pg.b_vectors.iter().enumerate() {
            assert!(b.iter().any(|x| !x.is_zero()));
            assert!(b[j].is_one());
        }
        pg
    }

    #[test]
    fn hyperbolic_plane_has_trivial_group() {
        let l = Arc::new(GramLattice::build("U").unwrap());
        let pg = check_group(&l, &e_first(2), 0);
        assert!(pg.generators.is_empty());
    }

    #[test]
    fn u_plus_e8_has_eight_generators() {
        let l = Arc::new(GramLattice::build("U+E8").unwrap());
        check_group(&l, &e_first(10), 8);
        check_group(&l, &unit(10, 1), 8);
    }

    #[test]
    fn rank_22_has_twenty_generators() {
        let l = Arc::new(GramLattice::build("U+E8+E8+D4").unwrap());
        check_group(&l, &e_first(22), 20);
    }

    #[test]
    fn non_standard_isotropic_vector() {
        // (1, 1, r) with r an E8 root is isotropic and primitive
        let l = Arc::new(GramLattice::build("U+E8").unwrap());
        let mut e = vec![BigInt::zero(); 10];
        e[0] = BigInt::one();
        e[1] = BigInt::one();
        e[2] = BigInt::one();
        assert!(l.norm(&e).is_zero());
        check_group(&l, &e, 8);
        let l = Arc::new(GramLattice::build("U(2)+A2").unwrap());
        let e: Vec<BigInt> = [1, 2, 2, 0].iter().map(|&x| BigInt::from(x)).collect();
        assert!(l.norm(&e).is_zero());
        let pg = check_group(&l, &e, 2);
        // (Ge) has gcd 2 here, so u is not integral
        assert!(pg.u().iter().any(|x| !x.is_integer()));
    }

    #[test]
    fn rejects_bad_vectors() {
        let l = Arc::new(GramLattice::build("U+E8").unwrap());
        let mut e = e_first(10);
        e[0] = BigInt::from(2);
        assert!(matches!(parabolic_group(&l, &e), Err(IsometryError::Precondition(_))));
        let mut e = e_first(10);
        e[1] = BigInt::one();
        assert!(matches!(parabolic_group(&l, &e), Err(IsometryError::Precondition(_))));
        let uu = Arc::new(GramLattice::build("U+U").unwrap());
        assert!(matches!(
            parabolic_group(&uu, &e_first(4)),
            Err(IsometryError::Lattice(LatticeError::NoCone(_)))
        ));
    }
}
