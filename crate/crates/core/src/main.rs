use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use salemforge::catalog::{catalog_list, find_entry, load_entries, CatalogEntry, Profile};
use salemforge::demo::{self, write_atomic, DemoError, RunConfig};
use salemforge::inputs::{self, GeneratorFile, InputError};
use salemforge::intpoly::{
    char_poly, cyclotomics_up_to_degree, spectral_radius, spectral_radius_with_digits, Classifier,
    EntropyInterval, IntPolynomial, SalemClassification, DEFAULT_LOG_DIGITS,
};
use salemforge::isometry::{parabolic_group, Isometry, IsometryError};
use salemforge::lattice::{find_isotropic_with_budget, GramLattice, LatticeError, DEFAULT_ISOTROPIC_BUDGET};
use salemforge::matrix::{json_int_vec, JsonInt};
use salemforge::rational::{approx_decimal, parse_rational};
use salemforge::search::{salem_search, verify, SalemCertificate, SearchConfig, SearchError, Strategy};

#[derive(Parser)]
#[command(name = "salemforge", version, about = "Exact hyperbolic lattice isometries and Salem certificates")]
struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and inspect lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Characteristic polynomials, Salem classification, spectral radii.
    #[command(subcommand)]
    Poly(PolyCmd),
    /// Check isometries and build parabolic groups.
    #[command(subcommand)]
    Isometry(IsometryCmd),
    /// Search for Salem words and verify certificates.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Built-in lattices.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Search a catalog lattice end to end and persist the certificate.
    Demo(DemoArgs),
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Lattice JSON from an expression like U+E8+E8+D4.
    Build {
        expr: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank, signature, parity, determinant, cone reference.
    Info { lattice: String },
    /// Discriminant group.
    Disc { lattice: String },
    /// Primitive isotropic vectors with coordinates in [-bound, bound].
    Isotropic {
        lattice: String,
        #[arg(long, default_value_t = 1)]
        bound: u32,
        #[arg(long, default_value_t = DEFAULT_ISOTROPIC_BUDGET)]
        budget: usize,
    },
}

#[derive(Subcommand)]
enum PolyCmd {
    /// Classify a polynomial (JSON coefficient array, ascending degree).
    Classify {
        poly: String,
        /// Reject degree-2 Salem polynomials.
        #[arg(long)]
        strict: bool,
    },
    /// Certified spectral radius of the Salem factor.
    Radius {
        poly: String,
        #[arg(long, default_value = "1/1000000")]
        tol: String,
        #[arg(long, default_value_t = DEFAULT_LOG_DIGITS)]
        digits: u32,
    },
    /// Characteristic polynomial of an integer matrix.
    Charpoly { matrix: String },
    /// All cyclotomic polynomials of degree at most D.
    Cyclotomics {
        #[arg(long)]
        degree: usize,
    },
}

#[derive(Subcommand)]
enum IsometryCmd {
    /// Validate a matrix as an isometry of a lattice.
    Check { lattice: String, matrix: String },
    /// Eichler transvections fixing a primitive isotropic vector.
    Parabolic {
        lattice: String,
        #[arg(long)]
        e: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Search words in the generator sets for a Salem factor.
    Salem(SalemArgs),
    /// Re-check a certificate from scratch.
    Verify { certificate: PathBuf },
}

#[derive(Args)]
struct SalemArgs {
    #[arg(long)]
    lattice: String,
    /// Generator file (one set or an array of sets); repeatable.
    #[arg(long, required = true)]
    gens: Vec<String>,
    #[arg(long, value_enum, default_value = "mix")]
    strategy: Strategy,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 64)]
    max_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "1/1000000")]
    tol: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 3)]
    max_exp: u32,
    /// Accept Salem factors of any degree.
    #[arg(long)]
    any_degree: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CatalogCmd {
    List {
        /// Extra entries (JSON array), validated on load.
        #[arg(long)]
        file: Option<PathBuf>,
    },
    Show { name: String },
}

#[derive(Args)]
struct DemoArgs {
    /// Catalog entry, e.g. U+E8+E8+D4.
    #[arg(required_unless_present = "replay")]
    entry: Option<String>,
    /// Re-run a persisted certificate single-worker and compare bytes.
    #[arg(long, conflicts_with = "entry")]
    replay: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value = "1/1000000")]
    tol: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, value_enum, default_value = "mix")]
    strategy: Strategy,
    #[arg(long, default_value_t = 64)]
    max_len: usize,
    #[arg(long, default_value_t = 1)]
    height_bound: u32,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    catalog: Option<PathBuf>,
}

enum Failure {
    Validation(String),
    /// A validation failure whose JSON report is already on stdout.
    Rejected(String),
    Exhausted(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) | Failure::Rejected(_) => 2,
            Failure::Exhausted(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Rejected(m) | Failure::Exhausted(m) | Failure::Io(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Io { .. } => Failure::Io(e.to_string()),
            _ => invalid(e),
        }
    }
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        invalid(e)
    }
}

impl From<IsometryError> for Failure {
    fn from(e: IsometryError) -> Self {
        invalid(e)
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Exhausted { .. } => Failure::Exhausted(e.to_string()),
            _ => invalid(e),
        }
    }
}

impl From<DemoError> for Failure {
    fn from(e: DemoError) -> Self {
        match e {
            DemoError::Io { .. } => Failure::Io(e.to_string()),
            DemoError::Exhausted { .. } | DemoError::Search(SearchError::Exhausted { .. }) => {
                Failure::Exhausted(e.to_string())
            }
            _ => invalid(e),
        }
    }
}

type CliResult = Result<(), Failure>;

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, value: Value, human: impl FnOnce() -> String) {
        if self.json {
            say(&serde_json::to_string_pretty(&value).expect("serializable"));
        } else {
            say(&human());
        }
    }
}

/// Prints a line, ignoring a closed stdout.
fn say(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn write_out(path: &Path, text: &str) -> CliResult {
    write_atomic(path, text.as_bytes()).map_err(Failure::from)
}

fn rational_arg(s: &str) -> Result<BigRational, Failure> {
    parse_rational(s).map_err(invalid)
}

fn entropy_text(e: &EntropyInterval) -> String {
    format!(
        "spectral radius in [{}, {}] (~{}), entropy in [{}, {}]",
        e.lower,
        e.upper,
        approx_decimal(&e.lower, 12),
        e.log_lower,
        e.log_upper
    )
}

fn classification_text(c: &SalemClassification) -> String {
    let mut s = format!("kind: {}", to_value(&c.kind).as_str().unwrap_or_default());
    if !c.cyclotomic_factors.is_empty() {
        let f: Vec<String> = c
            .cyclotomic_factors
            .iter()
            .map(|(n, m)| if *m == 1 { format!("Phi_{n}") } else { format!("Phi_{n}^{m}") })
            .collect();
        s += &format!("\ncyclotomic factors: {}", f.join(" "));
    }
    if let Some(p) = &c.salem_factor {
        s += &format!("\nSalem factor (degree {}): {p}", c.salem_degree.unwrap_or(0));
    }
    s
}

fn vector(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

fn lattice_cmd(cmd: LatticeCmd, out: &Out) -> CliResult {
    match cmd {
        LatticeCmd::Build { expr, name, out: file } => {
            let mut l = GramLattice::build(&expr)?;
            if let Some(n) = name {
                l = l.renamed(n);
            }
            let text = pretty(&l);
            if let Some(path) = file {
                write_out(&path, &text)?;
                out.emit(json!({"written": path}), || format!("wrote {}", path.display()));
            } else {
                out.emit(to_value(&l), || text.trim_end().to_string());
            }
        }
        LatticeCmd::Info { lattice } => {
            let l = inputs::load_lattice(&lattice)?;
            let sig = l.signature();
            let cone = l.cone_reference().map(|v| v.iter().cloned().map(JsonInt).collect::<Vec<_>>());
            let value = json!({
                "name": l.name(),
                "rank": l.rank(),
                "signature": sig,
                "even": l.is_even(),
                "hyperbolic": l.is_hyperbolic(),
                "det": JsonInt(l.det()),
                "cone_reference": cone,
                "hash": l.hash(),
            });
            out.emit(value, || {
                format!(
                    "name: {}\nrank: {}\nsignature (+,0,-): {}\neven: {}\nhyperbolic: {}\ndet: {}\ncone reference: {}\nhash: {}",
                    l.name(),
                    l.rank(),
                    sig,
                    l.is_even(),
                    l.is_hyperbolic(),
                    l.det(),
                    l.cone_reference().map_or("none".into(), vector),
                    l.hash()
                )
            });
        }
        LatticeCmd::Disc { lattice } => {
            let l = inputs::load_lattice(&lattice)?;
            let d = l.discriminant()?;
            out.emit(to_value(&d), || {
                let divs: Vec<String> = d.elementary_divisors.iter().map(ToString::to_string).collect();
                let mut s = format!(
                    "elementary divisors: [{}]\ngroup order: {}",
                    divs.join(", "),
                    d.group_order
                );
                if let Some((p, sigma)) = d.p_elementary_sigma {
                    s += &format!("\n{p}-elementary, sigma = {sigma}");
                }
                s
            });
        }
        LatticeCmd::Isotropic { lattice, bound, budget } => {
            let l = inputs::load_lattice(&lattice)?;
            let iso = find_isotropic_with_budget(&l, bound, budget)?;
            let rows: Vec<Vec<JsonInt>> = iso.iter().map(|v| v.iter().cloned().map(JsonInt).collect()).collect();
            out.emit(json!({"bound": bound, "count": iso.len(), "vectors": rows}), || {
                let mut s = format!("{} primitive isotropic vectors with height <= {bound}", iso.len());
                for v in &iso {
                    s += &format!("\n{}", vector(v));
                }
                s
            });
        }
    }
    Ok(())
}

fn poly_cmd(cmd: PolyCmd, out: &Out) -> CliResult {
    match cmd {
        PolyCmd::Classify { poly, strict } => {
            let p: IntPolynomial = inputs::json_arg(&poly)?;
            let n = p.degree().unwrap_or(0).max(1);
            let mut classifier = Classifier::new(n);
            if strict {
                classifier = classifier.strict();
            }
            let c = classifier.classify(&p).map_err(invalid)?;
            let radius = match c.kind {
                salemforge::intpoly::ClassificationKind::NotOPlusShape => None,
                _ => Some(spectral_radius(&c, &SearchConfig::default().tol).map_err(invalid)?),
            };
            out.emit(json!({"classification": c, "entropy": radius}), || {
                let mut s = format!("polynomial: {p}\n{}", classification_text(&c));
                if let Some(e) = &radius {
                    s += &format!("\n{}", entropy_text(e));
                }
                s
            });
        }
        PolyCmd::Radius { poly, tol, digits } => {
            let p: IntPolynomial = inputs::json_arg(&poly)?;
            let tol = rational_arg(&tol)?;
            let c = Classifier::new(p.degree().unwrap_or(0).max(1)).classify(&p).map_err(invalid)?;
            let e = spectral_radius_with_digits(&c, &tol, digits).map_err(invalid)?;
            out.emit(to_value(&e), || entropy_text(&e));
        }
        PolyCmd::Charpoly { matrix } => {
            let m = inputs::load_matrix(&matrix)?;
            let p = char_poly(&m).map_err(invalid)?;
            out.emit(to_value(&p), || p.to_string());
        }
        PolyCmd::Cyclotomics { degree } => {
            let list = cyclotomics_up_to_degree(degree);
            let value: Vec<Value> = list.iter().map(|(n, p)| json!({"n": n, "poly": p})).collect();
            out.emit(json!({"degree": degree, "count": list.len(), "polynomials": value}), || {
                let mut s = format!("{} cyclotomic polynomials of degree <= {degree}", list.len());
                for (n, p) in &list {
                    s += &format!("\nPhi_{n} = {p}");
                }
                s
            });
        }
    }
    Ok(())
}

fn isometry_cmd(cmd: IsometryCmd, out: &Out) -> CliResult {
    match cmd {
        IsometryCmd::Check { lattice, matrix } => {
            let l = Arc::new(inputs::load_lattice(&lattice)?);
            let g = Isometry::validate(inputs::load_matrix(&matrix)?, &l)?;
            let cp = char_poly(g.matrix()).map_err(invalid)?;
            let c = Classifier::new(l.rank()).classify(&cp).map_err(invalid)?;
            let entropy = if g.is_cone_preserving() {
                Some(spectral_radius(&c, &SearchConfig::default().tol).map_err(invalid)?)
            } else {
                None
            };
            out.emit(
                json!({
                    "det": g.det(),
                    "cone_preserving": g.is_cone_preserving(),
                    "so_plus": g.in_so_plus(),
                    "unipotent_order_3": g.is_unipotent_of_order(3),
                    "char_poly": cp,
                    "classification": c,
                    "entropy": entropy,
                }),
                || {
                    let mut s = format!(
                        "isometry of {}\ndet: {}\ncone preserving: {}\nin SO+: {}\n(g - I)^3 = 0: {}\nchar poly: {cp}\n{}",
                        l.name(),
                        g.det(),
                        g.is_cone_preserving(),
                        g.in_so_plus(),
                        g.is_unipotent_of_order(3),
                        classification_text(&c)
                    );
                    if let Some(e) = &entropy {
                        s += &format!("\n{}", entropy_text(e));
                    }
                    s
                },
            );
        }
        IsometryCmd::Parabolic { lattice, e, out: file } => {
            let l = Arc::new(inputs::load_lattice(&lattice)?);
            let e: Vec<JsonInt> = inputs::json_arg(&e)?;
            let e: Vec<BigInt> = e.into_iter().map(|x| x.0).collect();
            let group = parabolic_group(&l, &e)?;
            let gens = GeneratorFile::new(&l, &group.to_generator_set());
            #[derive(Serialize)]
            struct W<'a>(#[serde(with = "json_int_vec")] &'a [BigInt]);
            let w: Vec<W> = group.basis_w().iter().map(|v| W(v)).collect();
            if let Some(path) = &file {
                write_out(path, &pretty(&gens))?;
            }
            let value = json!({
                "e": e.iter().cloned().map(JsonInt).collect::<Vec<_>>(),
                "rank": group.rank(),
                "w": w,
                "generators": if file.is_some() { Value::Null } else { to_value(&gens) },
                "written": file,
            });
            out.emit(value, || {
                let mut s = format!("parabolic group at e = {} of rank {}", vector(&e), group.rank());
                for (i, v) in group.basis_w().iter().enumerate() {
                    s += &format!("\nw_{} = {}", i + 1, vector(v));
                }
                match &file {
                    Some(p) => s += &format!("\nwrote {}", p.display()),
                    None => s += &format!("\n{}", pretty(&gens).trim_end()),
                }
                s
            });
        }
    }
    Ok(())
}

fn search_cmd(cmd: SearchCmd, out: &Out) -> CliResult {
    match cmd {
        SearchCmd::Salem(a) => {
            let l = Arc::new(inputs::load_lattice(&a.lattice)?);
            let sets = inputs::load_generator_sets(&a.gens, &l)?;
            let cfg = SearchConfig {
                strategy: a.strategy,
                max_word_length: a.max_len,
                max_words: a.budget,
                rng_seed: a.seed,
                tol: rational_arg(&a.tol)?,
                require_full_degree: !a.any_degree,
                max_exponent: a.max_exp,
                workers: a.workers,
                ..SearchConfig::default()
            };
            let cert = salem_search(&sets, &l, &cfg)?;
            report_certificate(&cert, a.out.as_deref(), out)?;
        }
        SearchCmd::Verify { certificate } => {
            let text = inputs::read_file(&certificate)?;
            let cert: SalemCertificate = serde_json::from_str(&text).map_err(|e| {
                invalid(format!("{}: {e}", certificate.display()))
            })?;
            let report = verify(&cert);
            out.emit(to_value(&report), || {
                if report.ok {
                    format!("{}: certificate verified", certificate.display())
                } else {
                    let lines: Vec<String> = report
                        .mismatches
                        .iter()
                        .map(|m| format!("  {}: {}", m.field, m.detail))
                        .collect();
                    format!("{}: verification FAILED\n{}", certificate.display(), lines.join("\n"))
                }
            });
            if !report.ok {
                return Err(Failure::Rejected("certificate failed verification".into()));
            }
        }
    }
    Ok(())
}

fn report_certificate(cert: &SalemCertificate, file: Option<&Path>, out: &Out) -> CliResult {
    if let Some(path) = file {
        write_out(path, &cert.to_json())?;
    }
    let summary = || {
        let mut s = format!(
            "Salem factor of degree {} found after {} words\nword length: {}\nSalem factor: {}\n{}\nfull degree: {}\nnon-liftable flag: {}",
            cert.salem_degree().unwrap_or(0),
            cert.stats.words_examined,
            cert.word.len(),
            cert.classification.salem_factor.as_ref().map_or(String::new(), ToString::to_string),
            entropy_text(&cert.entropy),
            cert.full_degree,
            cert.non_liftable_flag
        );
        if let Some(p) = file {
            s += &format!("\nwrote {}", p.display());
        }
        s
    };
    if out.json && file.is_none() {
        say(cert.to_json().trim_end());
    } else {
        out.emit(
            json!({
                "salem_degree": cert.salem_degree(),
                "word_length": cert.word.len(),
                "entropy": cert.entropy,
                "full_degree": cert.full_degree,
                "non_liftable_flag": cert.non_liftable_flag,
                "stats": cert.stats,
                "written": file,
            }),
            summary,
        );
    }
    Ok(())
}

fn entry_value(e: &CatalogEntry) -> Value {
    json!({"name": e.name, "expr": e.expr, "expected": e.expected, "note": e.note})
}

fn catalog_cmd(cmd: CatalogCmd, out: &Out) -> CliResult {
    match cmd {
        CatalogCmd::List { file } => {
            let mut entries = catalog_list();
            if let Some(path) = file {
                entries.extend(load_entries(&path).map_err(invalid)?);
            }
            for e in &entries {
                e.build().map_err(invalid)?;
            }
            let value: Vec<Value> = entries.iter().map(entry_value).collect();
            out.emit(Value::Array(value), || {
                entries
                    .iter()
                    .map(|e| format!("{:<14} {}", e.name, e.expected))
                    .collect::<Vec<_>>()
                    .join("\n")
            });
        }
        CatalogCmd::Show { name } => {
            let e = find_entry(&name).map_err(invalid)?;
            let l = e.build().map_err(invalid)?;
            let computed = Profile::of(&l)?;
            out.emit(json!({"entry": entry_value(&e), "computed": computed, "lattice": l}), || {
                format!(
                    "{}\nexpression: {}\nexpected: {}\ncomputed: {computed}\n{}",
                    e.name, e.expr, e.expected, e.note
                )
            });
        }
    }
    Ok(())
}

fn demo_cmd(a: DemoArgs, out: &Out) -> CliResult {
    if let Some(path) = a.replay {
        let cert = demo::replay(&path)?;
        out.emit(json!({"replayed": path, "identical": true, "salem_degree": cert.salem_degree()}), || {
            format!("{}: re-run reproduced an identical certificate", path.display())
        });
        return Ok(());
    }
    let entry = a.entry.expect("clap enforces entry or --replay");
    let cfg = RunConfig {
        out_dir: a.out_dir,
        catalog_file: a.catalog,
        seed: a.seed,
        tol: rational_arg(&a.tol)?,
        budget: a.budget,
        workers: a.workers,
        strategy: a.strategy,
        max_word_length: a.max_len,
        height_bound: a.height_bound,
        ..RunConfig::default()
    };
    let run = demo::run_demo(&entry, &cfg)?;
    let cert = &run.certificate;
    out.emit(
        json!({
            "entry": entry,
            "certificate": run.certificate_path,
            "config": run.config_path,
            "salem_degree": cert.salem_degree(),
            "word_length": cert.word.len(),
            "entropy": cert.entropy,
            "non_liftable_flag": cert.non_liftable_flag,
            "stats": cert.stats,
        }),
        || {
            format!(
                "{entry}: Salem factor of degree {} after {} words (word length {})\n{}\nnon-liftable flag: {}\ncertificate: {}\nconfig: {}",
                cert.salem_degree().unwrap_or(0),
                cert.stats.words_examined,
                cert.word.len(),
                entropy_text(&cert.entropy),
                cert.non_liftable_flag,
                run.certificate_path.display(),
                run.config_path.display()
            )
        },
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = Out { json: cli.json };
    let result = match cli.command {
        Command::Lattice(c) => lattice_cmd(c, &out),
        Command::Poly(c) => poly_cmd(c, &out),
        Command::Isometry(c) => isometry_cmd(c, &out),
        Command::Search(c) => search_cmd(c, &out),
        Command::Catalog(c) => catalog_cmd(c, &out),
        Command::Demo(a) => demo_cmd(a, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if out.json && !matches!(f, Failure::Rejected(_)) {
                say(&json!({"error": f.message(), "exit_code": f.code()}).to_string());
            }
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
