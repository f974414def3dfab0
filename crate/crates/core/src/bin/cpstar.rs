//! Command-line front end over the algebra and morphism file formats.
//!
//! Every report-producing command prints a human-readable check list followed
//! by a fenced machine-readable JSON block, and exits with:
//!
//! * `0` — every requested check passed;
//! * `1` — the input was well-formed but at least one check failed;
//! * `2` — the input could not be parsed, was mis-shaped for the command,
//!   or a flag was invalid (also used by the argument parser itself).
//!
//! `--tol` overrides both the equality and the positivity tolerance. Algebra
//! references inside morphism files resolve against the morphism file's
//! directory and then the directory named by the `CPSTAR_CORPUS` environment
//! variable.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cpstar_core::backends::{cup, Backend, Morphism, ObjectRef};
use cpstar_core::classify::{
    concrete_cp_oracle, extract_groupoid, relation_respects_inverses, wedderburn,
};
use cpstar_core::corpus;
use cpstar_core::cpm::perfect_square_side;
use cpstar_core::cpstar::{
    check_cpstar, check_cpstar_convolution, CpCertificate, CpCheck, CpDiagnostic, CpStarMorphism,
    CpStarObject,
};
use cpstar_core::format::{load_algebra, load_algebra_parts, load_morphism, serialize_algebra, MorphismFile};
use cpstar_core::frobenius::{pants, FrobeniusAlgebra};
use cpstar_core::numeric::{ComplexMatrix, Tolerance};
use cpstar_core::report::Report;
use cpstar_core::selftest::{run_selftest, Level};
use cpstar_core::splitdag::functor_f_object;
use cpstar_core::stoch::{extract_povm, StochObject};
use cpstar_core::Result;
use serde_json::json;

#[derive(Parser)]
#[command(name = "cpstar", version, about = "Verify, classify, and check algebras and channels")]
struct Cli {
    /// Override both tolerances (equality and positivity) with one value.
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the algebra laws of an `.alg` file and solve for its normaliser.
    Verify {
        /// Algebra file to verify.
        file: PathBuf,
    },
    /// Decompose an algebra: matrix blocks (fhilb) or a groupoid (rel).
    Classify {
        /// Algebra file to classify.
        file: PathBuf,
    },
    /// Run the complete-positivity checkers on a `.mor` file.
    CheckCp {
        /// Morphism file to check.
        file: PathBuf,
        /// Run a single checker instead of all three.
        #[arg(long, value_enum)]
        method: Option<Method>,
    },
    /// Print a generated full matrix (or relational) algebra to stdout.
    Embed {
        /// Dimension (fhilb) or set size (rel) of the underlying object.
        #[arg(long)]
        pants: usize,
        /// Backend to generate the algebra in.
        #[arg(long, value_enum, default_value_t = BackendArg::Fhilb)]
        backend: BackendArg,
    },
    /// Extract the measurement family of a morphism file and check it.
    Povm {
        /// Measurement morphism (`.mor`) with a classical target algebra.
        file: PathBuf,
    },
    /// Build the splitting idempotent of an algebra and report its rank.
    Split {
        /// Algebra file to split.
        file: PathBuf,
    },
    /// Run the bundled acceptance checks.
    Selftest {
        /// quick: reduced samples; full: complete budgets with clock limits.
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
    },
    /// Write the bundled algebra and morphism files into a directory.
    Corpus {
        /// Directory to populate (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Positivity of the rearranged lift (the default checker).
    Rearrange,
    /// Positivity of the morphism's name in the convolution algebra.
    Convolution,
    /// Independent route: block coordinates (fhilb) / inverse pairs (rel).
    Oracle,
}

impl Method {
    fn label(self) -> &'static str {
        match self {
            Method::Rearrange => "rearrangement positivity",
            Method::Convolution => "convolution positivity",
            Method::Oracle => "independent oracle",
        }
    }

    fn key(self) -> &'static str {
        match self {
            Method::Rearrange => "rearrange",
            Method::Convolution => "convolution",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Fhilb,
    Rel,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

/// What a command produced: a check report, or plain text for stdout.
enum Outcome {
    Report(Report),
    Plain(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = match cli.tol {
        Some(t) => match Tolerance::uniform(t) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => Tolerance::default(),
    };
    match run(cli.command, tol) {
        Ok(Outcome::Report(report)) => {
            print!("{}", report.render());
            ExitCode::from(report.exit_code() as u8)
        }
        Ok(Outcome::Plain(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, tol: Tolerance) -> Result<Outcome> {
    match command {
        Command::Verify { file } => cmd_verify(&file, tol).map(Outcome::Report),
        Command::Classify { file } => cmd_classify(&file, tol).map(Outcome::Report),
        Command::CheckCp { file, method } => cmd_check_cp(&file, method, tol).map(Outcome::Report),
        Command::Embed { pants, backend } => cmd_embed(pants, backend, tol).map(Outcome::Plain),
        Command::Povm { file } => cmd_povm(&file, tol).map(Outcome::Report),
        Command::Split { file } => cmd_split(&file, tol).map(Outcome::Report),
        Command::Selftest { level } => cmd_selftest(level, tol).map(Outcome::Report),
        Command::Corpus { out } => cmd_corpus(&out, tol).map(Outcome::Report),
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(path: &Path, tol: Tolerance) -> Result<Report> {
    let (name, mult, unit) = load_algebra_parts(path)?;
    let mut report = Report::new(format!("verify {}", path.display()));
    report.note("algebra", json!(name));

    let alg = match FrobeniusAlgebra::new(mult, unit, tol) {
        Ok(alg) => alg,
        Err(e) => {
            report.push("associativity, unit, and Frobenius laws", false, e.to_string());
            return Ok(report);
        }
    };
    report.push(
        "associativity, unit, and Frobenius laws",
        true,
        format!("hold on the dimension-{} carrier", alg.dim()),
    );

    let dagger_ok = alg.comult().equal(&alg.mult().dagger(), tol)
        && alg.counit().equal(&alg.unit().dagger(), tol);
    report.push(
        "comultiplication is the multiplication's dagger",
        dagger_ok,
        "comult = mult† and counit = unit†",
    );

    report.push(
        "symmetric",
        alg.is_symmetric(),
        if alg.is_symmetric() {
            "counit ∘ mult is invariant under swapping the arguments"
        } else {
            "counit ∘ mult changes when the arguments are swapped"
        },
    );

    // Speciality is recorded, not required: the full matrix algebras are not
    // special, yet are perfectly good inputs.
    report.push(
        "speciality recorded",
        true,
        if alg.is_special() { "∇∘∆ = id holds" } else { "∇∘∆ = id does not hold" },
    );
    report.note("special", json!(alg.is_special()));
    report.note("commutative", json!(alg.is_commutative()));

    match alg.solve_normaliser(tol) {
        Ok(z) => {
            report.push("normaliser", true, describe_normaliser(&z)?);
            if let Ok(m) = z.matrix() {
                let diag: Vec<f64> = (0..alg.dim()).map(|i| m.get(i, i).re).collect();
                report.note("normaliser_diagonal", json!(diag));
            }
        }
        Err(e) => report.push("normaliser", false, e.to_string()),
    }
    Ok(report)
}

fn describe_normaliser(z: &Morphism) -> Result<String> {
    match z.backend() {
        Backend::FHilb => {
            let m = z.matrix()?;
            let mut off = 0.0f64;
            let mut diag = Vec::with_capacity(m.rows());
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    if r == c {
                        diag.push(format!("{:.6}", m.get(r, c).re));
                    } else {
                        off = off.max(m.get(r, c).norm());
                    }
                }
            }
            if off <= 1e-12 {
                Ok(format!("solved; diagonal ≈ [{}]", diag.join(", ")))
            } else {
                Ok(format!("solved; non-diagonal, ‖z‖∞ = {:.6}", m.norm_inf()))
            }
        }
        Backend::Rel => Ok("solved; the identity relation".into()),
    }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn cmd_classify(path: &Path, tol: Tolerance) -> Result<Report> {
    let (name, alg) = load_algebra(path, tol)?;
    let mut report = Report::new(format!("classify {}", path.display()));
    report.note("algebra", json!(name));
    report.note("backend", json!(alg.backend().to_string()));

    match alg.backend() {
        Backend::FHilb => match wedderburn(&alg, tol) {
            Ok(dec) => {
                let dims = dec.factor_dims().to_vec();
                let covered: usize = dims.iter().map(|d| d * d).sum();
                report.push("matrix-block decomposition", true, format!("factors {dims:?}"));
                report.push(
                    "blocks account for the whole algebra",
                    covered == alg.dim(),
                    format!("Σ n_k² = {covered}, dim = {}", alg.dim()),
                );
                report.note("factors", json!(dims));
            }
            Err(e) => report.push("matrix-block decomposition", false, e.to_string()),
        },
        Backend::Rel => match extract_groupoid(&alg) {
            Ok(g) => {
                report.push(
                    "groupoid extraction",
                    true,
                    format!("{} objects, {} morphisms", g.object_count(), g.morphism_count()),
                );
                report.push(
                    "morphisms account for the whole carrier",
                    g.morphism_count() == alg.dim(),
                    format!("{} morphisms, carrier size {}", g.morphism_count(), alg.dim()),
                );
                report.note("objects", json!(g.object_count()));
                report.note("morphisms", json!(g.morphism_count()));
            }
            Err(e) => report.push("groupoid extraction", false, e.to_string()),
        },
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// check-cp
// ---------------------------------------------------------------------------

fn cmd_check_cp(path: &Path, method: Option<Method>, tol: Tolerance) -> Result<Report> {
    let file = load_morphism(path, tol)?;
    let mut report = Report::new(match method {
        Some(m) => format!("check-cp --method={} {}", m.key(), path.display()),
        None => format!("check-cp {}", path.display()),
    });
    report.note("morphism", json!(file.name));
    report.note("source", json!(file.source_ref));
    report.note("target", json!(file.target_ref));

    let methods = match method {
        Some(m) => vec![m],
        None => vec![Method::Rearrange, Method::Convolution, Method::Oracle],
    };
    let mut verdicts = Vec::new();
    for m in &methods {
        let (passed, detail) = run_checker(*m, &file, tol)?;
        report.push(m.label(), passed, detail);
        report.note(m.key(), json!(passed));
        verdicts.push(passed);
    }
    if verdicts.len() > 1 {
        let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
        report.push(
            "checker verdicts agree",
            agree,
            format!("{} methods, verdicts {:?}", verdicts.len(), verdicts),
        );
    }
    Ok(report)
}

fn run_checker(method: Method, file: &MorphismFile, tol: Tolerance) -> Result<(bool, String)> {
    match method {
        Method::Rearrange => {
            let check = check_cpstar(&file.morphism, &file.source, &file.target, tol)?;
            Ok(describe_check(&check, "min rearrangement eigenvalue"))
        }
        Method::Convolution => {
            let check = check_cpstar_convolution(&file.morphism, &file.source, &file.target, tol)?;
            Ok(describe_check(&check, "min convolution eigenvalue"))
        }
        Method::Oracle => match file.morphism.backend() {
            Backend::FHilb => {
                let dec_a = wedderburn(&file.source, tol)?;
                let dec_b = wedderburn(&file.target, tol)?;
                let verdict = concrete_cp_oracle(&file.morphism, &dec_a, &dec_b, tol)?;
                let detail = if verdict.is_cp {
                    format!(
                        "completely positive; min Choi eigenvalue ≈ {:.3}",
                        verdict.min_choi_eigenvalue
                    )
                } else {
                    format!(
                        "rejected: min Choi eigenvalue ≈ {:.3}",
                        verdict.min_choi_eigenvalue
                    )
                };
                Ok((verdict.is_cp, detail))
            }
            Backend::Rel => {
                let g = extract_groupoid(&file.source)?;
                let h = extract_groupoid(&file.target)?;
                let ok = relation_respects_inverses(file.morphism.relation()?, &g, &h)?;
                let detail = if ok {
                    "relation is closed under the inverse pairing".to_string()
                } else {
                    "rejected: relation is not closed under the inverse pairing".to_string()
                };
                Ok((ok, detail))
            }
        },
    }
}

fn describe_check(check: &CpCheck, eigen_phrase: &str) -> (bool, String) {
    match check {
        CpCheck::Accept(cert) => (true, describe_certificate(cert)),
        CpCheck::Reject(d) => (false, describe_diagnostic(d, eigen_phrase)),
    }
}

fn describe_certificate(cert: &CpCertificate) -> String {
    match cert {
        CpCertificate::Kraus { ancilla_dim, .. } => format!(
            "completely positive; factors through a dimension-{ancilla_dim} ancilla"
        ),
        CpCertificate::RelClosure { pairs_checked } => format!(
            "completely positive; closure verified over {pairs_checked} pairs"
        ),
    }
}

fn describe_diagnostic(d: &CpDiagnostic, eigen_phrase: &str) -> String {
    match d.min_eigenvalue {
        Some(ev) => format!("rejected: {eigen_phrase} ≈ {ev:.3}"),
        None => format!("rejected: {}", d.reason),
    }
}

// ---------------------------------------------------------------------------
// embed
// ---------------------------------------------------------------------------

fn cmd_embed(n: usize, backend: BackendArg, tol: Tolerance) -> Result<String> {
    let (backend, name) = match backend {
        BackendArg::Fhilb => (Backend::FHilb, format!("pants{n}")),
        BackendArg::Rel => (Backend::Rel, format!("rel_pants{n}")),
    };
    let alg = pants(ObjectRef::checked(backend, n)?, tol)?;
    serialize_algebra(&name, &alg)
}

// ---------------------------------------------------------------------------
// povm
// ---------------------------------------------------------------------------

fn cmd_povm(path: &Path, tol: Tolerance) -> Result<Report> {
    let file = load_morphism(path, tol)?;
    let mut report = Report::new(format!("povm {}", path.display()));
    report.note("morphism", json!(file.name));

    let side = perfect_square_side(file.source.dim()).ok_or_else(|| {
        cpstar_core::Error::ShapeMismatch(format!(
            "measurement source has dimension {}, which is not a doubled carrier",
            file.source.dim()
        ))
    })?;
    let x = ObjectRef::new(file.morphism.backend(), side);
    let source = CpStarObject::new(file.source.clone(), tol)?;
    let target = CpStarObject::new(file.target.clone(), tol)?;
    let classical = StochObject::new(target.clone(), tol)?;
    let outcomes = classical.dim();

    let measurement = match CpStarMorphism::new(file.morphism.clone(), &source, &target, tol) {
        Ok(m) => {
            report.push("completely positive", true, "measurement certifies");
            m
        }
        Err(e) => {
            report.push("completely positive", false, e.to_string());
            return Ok(report);
        }
    };

    match extract_povm(&measurement, x, &classical, tol) {
        Ok(povm) => {
            report.push(
                "elements are positive",
                true,
                format!("{outcomes} outcomes, each a positive element"),
            );
            // The extraction already enforced completeness; recompute the
            // defect so the report carries the number.
            let mut total = ComplexMatrix::zeros(x.dim * x.dim, 1);
            for e in povm.elements() {
                total = total.add(e.matrix()?)?;
            }
            let defect = total.sub(cup(x).matrix()?)?.norm_inf();
            report.push(
                "completeness",
                defect <= tol.eq_tol,
                format!("‖ΣEᵢ − I‖∞ = {defect:.3e}"),
            );
            report.note("outcomes", json!(outcomes));
            report.note("completeness_defect", json!(defect));
            if file.morphism.backend() == Backend::FHilb {
                let mut ops = Vec::with_capacity(outcomes);
                for i in 0..outcomes {
                    let op = povm.operator(i)?;
                    let rows: Vec<Vec<[f64; 2]>> = (0..op.rows())
                        .map(|r| (0..op.cols()).map(|c| {
                            let v = op.get(r, c);
                            [v.re, v.im]
                        }).collect())
                        .collect();
                    ops.push(json!(rows));
                }
                report.note("elements", json!(ops));
            }
        }
        Err(e) => report.push("measurement family extracted", false, e.to_string()),
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

fn cmd_split(path: &Path, tol: Tolerance) -> Result<Report> {
    let (name, alg) = load_algebra(path, tol)?;
    let dim = alg.dim();
    let backend = alg.backend();
    let mut report = Report::new(format!("split {}", path.display()));
    report.note("algebra", json!(name));

    let object = match CpStarObject::new(alg, tol) {
        Ok(o) => o,
        Err(e) => {
            report.push("normaliser", false, e.to_string());
            return Ok(report);
        }
    };
    match functor_f_object(&object, tol) {
        Ok(idem) => {
            let carrier = idem.base().carrier().dim;
            report.push(
                "splitting idempotent",
                true,
                format!("p∘p = p = p†, completely positive on the {carrier}-dimensional doubled carrier"),
            );
            report.note("carrier", json!(carrier));
            if backend == Backend::FHilb {
                let rank = idem.rank()?;
                report.push(
                    "rank equals the algebra dimension",
                    rank == dim,
                    format!("rank {rank}, dimension {dim}"),
                );
                report.note("rank", json!(rank));
            } else {
                let pairs = idem.morphism().relation()?.pairs.len();
                report.push(
                    "relational idempotent recorded",
                    true,
                    format!("{pairs} pairs on the doubled carrier"),
                );
                report.note("pairs", json!(pairs));
            }
        }
        Err(e) => report.push("splitting idempotent", false, e.to_string()),
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// selftest / corpus
// ---------------------------------------------------------------------------

fn cmd_selftest(level: LevelArg, tol: Tolerance) -> Result<Report> {
    let (level, label) = match level {
        LevelArg::Quick => (Level::Quick, "quick"),
        LevelArg::Full => (Level::Full, "full"),
    };
    let mut report = Report::new(format!("selftest --level={label}"));
    report.note("level", json!(label));
    for outcome in run_selftest(level, tol) {
        report.push(
            format!("{:2}. {}", outcome.index, outcome.label),
            outcome.passed,
            format!("[{:6.2}s] {}", outcome.seconds, outcome.detail),
        );
    }
    Ok(report)
}

fn cmd_corpus(out: &Path, tol: Tolerance) -> Result<Report> {
    let files = corpus::write_corpus(out, tol)?;
    let mut report = Report::new(format!("corpus --out {}", out.display()));
    report.push(
        "bundled files written",
        true,
        format!("{} files under {}", files.len(), out.display()),
    );
    report.note(
        "files",
        json!(files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>()),
    );
    Ok(report)
}
