//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use salemforge::catalog::find_entry;
use salemforge::demo::{self, RunConfig};
use salemforge::intpoly::{
    cyclotomics_up_to_degree, spectral_radius, sturm_count, ClassificationKind, Classifier, IntPolynomial,
};
use salemforge::isometry::{eichler, orbit_span, parabolic_group, Isometry};
use salemforge::lattice::{find_isotropic, GramLattice};
use salemforge::matrix::IntMatrix;
use salemforge::rational::parse_rational;
use salemforge::search::{entropy_of, verify, SalemCertificate, SearchConfig};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn int_poly(c: Vec<BigInt>) -> IntPolynomial {
    IntPolynomial::new(c)
}

/// Persisted demo runs shared by the reproducibility criterion.
struct Shared {
    out_dir: PathBuf,
    runs: Vec<PathBuf>,
}

fn degree_22(shared: &mut Shared) -> Outcome {
    let cfg = RunConfig {
        out_dir: shared.out_dir.clone(),
        budget: 1_000_000,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let run = demo::run_demo("U+E8+E8+D4", &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    shared.runs.push(run.certificate_path.clone());
    let cert = &run.certificate;
    check(cert.salem_degree() == Some(22), || format!("Salem degree {:?}", cert.salem_degree()))?;
    check(cert.non_liftable_flag, || "non_liftable_flag not set".into())?;
    check(cert.stats.words_examined <= 1_000_000, || "budget exceeded".into())?;
    check(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    check(verify(cert).ok, || format!("{:?}", verify(cert).mismatches))?;
    // oracle: characteristic polynomial and dominant eigenvalue of the matrix
    let m = rows(&cert.matrix);
    let cp = faddeev_leverrier(&m);
    check(int_poly(cp.clone()) == cert.char_poly, || "char poly differs from oracle".into())?;
    check(cp.iter().eq(cp.iter().rev()), || "char poly not reciprocal".into())?;
    let lam = power_iteration(&m, 20_000);
    let (lo, hi) = (to_f64(&cert.entropy.lower), to_f64(&cert.entropy.upper));
    check(lo - 1e-9 <= lam && lam <= hi + 1e-9, || format!("power iteration {lam} outside [{lo}, {hi}]"))?;
    // an irreducible char poly makes every nonzero vector cyclic
    let l = Arc::new(cert.lattice.clone());
    let g = Isometry::validate(cert.matrix.clone(), &l).map_err(|e| e.to_string())?;
    let mut v = vec![BigRational::zero(); 22];
    v[0] = BigRational::one();
    let span = orbit_span(&[g], &v).map_err(|e| e.to_string())?;
    check(span.is_full(), || format!("orbit span of e1 has dim {}", span.dim()))?;
    Ok(format!(
        "degree 22 after {} words in {:.1?}, word length {}, entropy in [{}, {}]",
        cert.stats.words_examined,
        elapsed,
        cert.word.len(),
        cert.entropy.log_lower,
        cert.entropy.log_upper
    ))
}

fn degree_4_u_plus_u(shared: &mut Shared) -> Outcome {
    let cfg = RunConfig {
        out_dir: shared.out_dir.clone(),
        budget: 10_000,
        ..RunConfig::default()
    };
    let start = Instant::now();
    let run = demo::run_demo("U+U", &cfg).map_err(|e| format!("demo U+U: {e}"))?;
    let elapsed = start.elapsed();
    let cert = &run.certificate;
    check(cert.salem_degree() == Some(4), || format!("Salem degree {:?}", cert.salem_degree()))?;
    check(elapsed <= Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    check(verify(cert).ok, || "verification failed".into())?;
    Ok(format!("degree 4 after {} words", cert.stats.words_examined))
}

fn random_words_u_e8(_: &mut Shared) -> Outcome {
    let l = Arc::new(GramLattice::build("U+E8").map_err(|e| e.to_string())?);
    let iso = find_isotropic(&l, 1).map_err(|e| e.to_string())?;
    let mut gens: Vec<Isometry> = Vec::new();
    for e in &iso[..2] {
        let p = parabolic_group(&l, e).map_err(|e| e.to_string())?;
        for g in p.generators {
            gens.push(g.inverse());
            gens.push(g);
        }
    }
    check(gens.iter().all(Isometry::in_so_plus), || "generator outside SO+".into())?;
    let classifier = Classifier::new(10);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut salem = 0;
    for k in 0..1000 {
        let len = rng.gen_range(1..=8);
        let mut m = identity(10);
        for _ in 0..len {
            m = mul(&m, &rows(gens[rng.gen_range(0..gens.len())].matrix()));
        }
        let cp = int_poly(faddeev_leverrier(&m));
        let c = classifier.classify(&cp).map_err(|e| format!("word {k}: {e}"))?;
        check(c.kind != ClassificationKind::NotOPlusShape, || format!("word {k}: not O+ shape"))?;
        check(c.reconstruct(classifier.table()) == cp, || format!("word {k}: reconstruction"))?;
        // oracle: at most one real root above 1 across the whole char poly
        let above = sturm_count(&cp, &BigRational::one(), &BigRational::from_integer(BigInt::from(1u64 << 40)))
            .map_err(|e| e.to_string())?;
        check(above <= 1, || format!("word {k}: {above} roots above 1"))?;
        check(c.has_salem_factor() == (above == 1), || format!("word {k}: Salem factor vs roots"))?;
        salem += c.has_salem_factor() as usize;
    }
    Ok(format!("1000 words, {salem} with a Salem factor, 0 failures"))
}

fn orbit_spans(_: &mut Shared) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut report = Vec::new();
    for expr in ["U+A2", "U+E8", "U+E8+E8+D4"] {
        let l = Arc::new(GramLattice::build(expr).map_err(|e| e.to_string())?);
        let n = l.rank();
        let gram = rows(l.gram());
        let e = find_isotropic(&l, 1).map_err(|e| e.to_string())?[0].clone();
        let gens = parabolic_group(&l, &e).map_err(|e| e.to_string())?.generators;
        // x with (x, e) != 0, used to project into e^perp
        let x: Vec<BigInt> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect::<Vec<_>>())
            .find(|x| !form(&gram, x, &e).is_zero())
            .unwrap();
        let xe = form(&gram, &x, &e);
        let (mut inside, mut outside) = (0, 0);
        while inside < 100 || outside < 100 {
            let v: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-3..=3))).collect();
            let ve = form(&gram, &v, &e);
            let (seed, want_full) = if inside < 100 {
                let w: Vec<BigInt> = v.iter().zip(&x).map(|(vi, xi)| &xe * vi - &ve * xi).collect();
                (w, false)
            } else if !ve.is_zero() {
                (v, true)
            } else {
                continue;
            };
            if seed.iter().all(Zero::is_zero) {
                continue;
            }
            let q: Vec<BigRational> = seed.iter().cloned().map(BigRational::from_integer).collect();
            let span = orbit_span(&gens, &q).map_err(|e| e.to_string())?;
            if want_full {
                check(span.is_full(), || format!("{expr}: seed outside e^perp spans dim {}", span.dim()))?;
                outside += 1;
            } else {
                check(form(&gram, &seed, &e).is_zero(), || "projection oracle".into())?;
                let eq: Vec<BigRational> = gram
                    .iter()
                    .map(|r| r.iter().zip(&e).fold(BigRational::zero(), |s, (a, b)| s + BigRational::from_integer(a * b)))
                    .collect();
                for b in span.basis() {
                    let ip = b.iter().zip(&eq).fold(BigRational::zero(), |s, (a, c)| s + a * c);
                    check(ip.is_zero(), || format!("{expr}: orbit span leaves e^perp"))?;
                }
                inside += 1;
            }
        }
        report.push(format!("rank {n}"));
    }
    Ok(format!("{}: 100 seeds inside and 100 outside e^perp each, 0 failures", report.join(", ")))
}

fn salem_calibration(_: &mut Shared) -> Outcome {
    let lehmer = [1i64, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1];
    let p = IntPolynomial::from_i64(&lehmer);
    let c = Classifier::new(10).classify(&p).map_err(|e| e.to_string())?;
    check(c.kind == ClassificationKind::Salem && c.salem_degree == Some(10), || format!("Lehmer: {:?}", c.kind))?;
    let tol = rat(1, 1_000_000);
    let lehmer_r = spectral_radius(&c, &tol).map_err(|e| e.to_string())?;
    check(lehmer_r.width() <= tol, || "Lehmer interval too wide".into())?;
    let (olo, ohi) = bisect(&lehmer, rat(11, 10), rat(13, 10), &rat(1, 1_000_000_000_000));
    let mid = (&olo + &ohi) / BigRational::from_integer(BigInt::from(2));
    check(lehmer_r.contains(&mid), || format!("oracle root {} outside interval", to_f64(&mid)))?;
    let published = parse_rational("1.17628081825991750").unwrap();
    check((&mid - &published).abs() < rat(1, 1_000_000_000), || "oracle disagrees with published value".into())?;

    let classifier = Classifier::new(22);
    let indices = totient_indices(22);
    for &n in &indices {
        let phi = int_poly(cyclotomic(n));
        let c = classifier.classify(&phi).map_err(|e| format!("Phi_{n}: {e}"))?;
        check(c.kind == ClassificationKind::CyclotomicProduct && c.cyclotomic_factors == vec![(n, 1)], || {
            format!("Phi_{n}: {:?} {:?}", c.kind, c.cyclotomic_factors)
        })?;
    }

    let quad = IntPolynomial::from_i64(&[1, -3, 1]);
    let c = Classifier::new(2).classify(&quad).map_err(|e| e.to_string())?;
    check(c.kind == ClassificationKind::Salem, || "t^2-3t+1 not Salem".into())?;
    let r = spectral_radius(&c, &tol).map_err(|e| e.to_string())?;
    // lower <= (3+sqrt5)/2 <= upper, exactly: (2x-3)^2 against 5
    let five = BigRational::from_integer(BigInt::from(5));
    let three = BigRational::from_integer(BigInt::from(3));
    let two = BigRational::from_integer(BigInt::from(2));
    let lo = &two * &r.lower - &three;
    let hi = &two * &r.upper - &three;
    check(!lo.is_positive() || &lo * &lo <= five, || "lower bound above (3+sqrt5)/2".into())?;
    check(hi.is_positive() && &hi * &hi >= five, || "upper bound below (3+sqrt5)/2".into())?;
    Ok(format!(
        "Lehmer in [{:.12}, {:.12}] (oracle {:.15}); {} cyclotomics with phi(n) <= 22; (3+sqrt5)/2 enclosed",
        to_f64(&lehmer_r.lower),
        to_f64(&lehmer_r.upper),
        to_f64(&mid),
        indices.len()
    ))
}

fn cyclotomic_enumeration(_: &mut Shared) -> Outcome {
    let two = cyclotomics_up_to_degree(2);
    check(two.len() == 5, || format!("D = 2 gives {}", two.len()))?;
    let list = cyclotomics_up_to_degree(22);
    let oracle = totient_indices(22);
    check(list.len() == oracle.len(), || format!("D = 22 gives {}, oracle {}", list.len(), oracle.len()))?;
    for ((n, p), m) in list.iter().zip(&oracle) {
        check(n == m, || format!("index {n} vs oracle {m}"))?;
        check(*p == int_poly(cyclotomic(*n)), || format!("Phi_{n} differs from oracle"))?;
    }
    Ok(format!("D = 2: 5, D = 22: {} (oracle {})", list.len(), oracle.len()))
}

fn transvections(_: &mut Shared) -> Outcome {
    let names = ["U+A2", "U+E8", "U+E8+E8+D4", "U(2)+E8+E8", "U(3)+E8+E8", "U(5)+E8+E8"];
    let mut lattices = Vec::new();
    for name in names {
        let l = Arc::new(find_entry(name).and_then(|e| e.build()).map_err(|e| e.to_string())?);
        let iso = find_isotropic(&l, 1).map_err(|e| e.to_string())?;
        lattices.push((l, iso));
    }
    let tol = SearchConfig::default().tol;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..1000 {
        let (l, iso) = &lattices[k % lattices.len()];
        let n = l.rank();
        let gram = rows(l.gram());
        let e = &iso[rng.gen_range(0..iso.len())];
        let x: Vec<BigInt> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect::<Vec<_>>())
            .find(|x| !form(&gram, x, e).is_zero())
            .unwrap();
        let xe = form(&gram, &x, e);
        let mut perp = || -> Vec<BigInt> {
            let v: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect();
            let ve = form(&gram, &v, e);
            v.iter().zip(&x).map(|(vi, xi)| &xe * vi - &ve * xi).collect()
        };
        let (a, b) = (perp(), perp());
        let ab: Vec<BigInt> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
        let fail = |what: &str| format!("{} transvection {k}: {what}", l.name());
        let ga = eichler(l, e, &a).map_err(|err| fail(&err.to_string()))?;
        let gb = eichler(l, e, &b).map_err(|err| fail(&err.to_string()))?;
        let gab = eichler(l, e, &ab).map_err(|err| fail(&err.to_string()))?;
        let (ma, mb, mab) = (rows(ga.matrix()), rows(gb.matrix()), rows(gab.matrix()));
        check(mul(&ma, &mb) == mab, || fail("additivity"))?;
        // oracle formula x + (x,e)a - (x,a)e - (a,a)/2 (x,e)e on a random x
        let y: Vec<BigInt> = (0..n).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect();
        let (ye, ya, aa) = (form(&gram, &y, e), form(&gram, &y, &a), form(&gram, &a, &a));
        let half = &aa / 2;
        let expect: Vec<BigInt> = (0..n)
            .map(|i| &y[i] + &ye * &a[i] - &ya * &e[i] - &half * &ye * &e[i])
            .collect();
        check(apply(&ma, &y) == expect, || fail("formula"))?;
        let d = sub(&ma, &identity(n));
        check(is_zero(&mul(&mul(&d, &d), &d)), || fail("(g - I)^3 != 0"))?;
        check(mul(&mul(&transpose(&ma), &gram), &ma) == gram, || fail("not an isometry"))?;
        let det = IntMatrix::from_rows(ma.clone()).unwrap().det().unwrap();
        check(det.is_one(), || fail("det != 1"))?;
        let c = l.cone_reference().unwrap().to_vec();
        check(form(&gram, &apply(&ma, &c), &c).is_positive(), || fail("cone not preserved"))?;
        check(ga.in_so_plus(), || fail("library says not SO+"))?;
        let ent = entropy_of(&ga, &tol).map_err(|err| fail(&err.to_string()))?;
        check(ent.is_zero_entropy(), || fail("nonzero entropy"))?;
    }
    Ok(format!("1000 transvections over {} lattices, 0 failures", names.len()))
}

fn reproducibility(shared: &mut Shared) -> Outcome {
    let cfg = RunConfig {
        out_dir: shared.out_dir.clone(),
        budget: 10_000,
        workers: 4,
        seed: 11,
        ..RunConfig::default()
    };
    let run = demo::run_demo("U+A2", &cfg).map_err(|e| e.to_string())?;
    shared.runs.push(run.certificate_path);
    check(!shared.runs.is_empty(), || "no persisted runs".into())?;
    let mut names = Vec::new();
    for path in &shared.runs {
        let stored = std::fs::read(path).map_err(|e| e.to_string())?;
        let replayed: SalemCertificate = demo::replay(path).map_err(|e| e.to_string())?;
        check(replayed.to_json().as_bytes() == stored.as_slice(), || format!("{} differs", path.display()))?;
        names.push(path.parent().unwrap().file_name().unwrap().to_string_lossy().into_owned());
    }
    Ok(format!("{} persisted demos ({}) re-run single-worker byte-identical", names.len(), names.join(", ")))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut shared = Shared {
        out_dir: dir.path().to_path_buf(),
        runs: Vec::new(),
    };
    let criteria: [(&str, fn(&mut Shared) -> Outcome); 8] = [
        ("degree-22 Salem certificate on U+E8+E8+D4", degree_22),
        ("degree-4 Salem certificate on U+U", degree_4_u_plus_u),
        ("1000 random words over U+E8", random_words_u_e8),
        ("orbit spans on ranks 4, 10, 22", orbit_spans),
        ("Salem detector calibration", salem_calibration),
        ("cyclotomic enumeration", cyclotomic_enumeration),
        ("transvection algebra", transvections),
        ("byte-identical reruns", reproducibility),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut shared)))
            .unwrap_or_else(|p| {
                Err(p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into()))
            });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
