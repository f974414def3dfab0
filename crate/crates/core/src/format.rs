//! Line-oriented text formats for algebras (`.alg`) and morphisms (`.mor`).
//!
//! Both formats are plain UTF-8, one record per line, whitespace-separated
//! fields, `#` starting a comment. Floating-point fields are written with
//! the shortest decimal expansion that round-trips, so serialize → parse is
//! the identity bit for bit.
//!
//! # Algebra files
//!
//! ```text
//! name pants2            # optional; defaults to the file stem
//! backend fhilb          # fhilb | rel
//! dim 4                  # or: carrier <label...> (dimension = label count)
//! unit 1 0 0 0 0 0 1 0   # fhilb: dim (re, im) pairs — the unit's coefficients
//! mult 0 0 0 1 0         # fhilb: i j k re im — coefficient of e_k in e_i·e_j
//! ```
//!
//! Relational algebras list `unit` as element indices and `mult` as index
//! triples `i j k` meaning the pair `((i,j), k)` belongs to the
//! multiplication relation. Only nonzero/present entries are written. The
//! parsed structure is validated through [`FrobeniusAlgebra::new`], so a
//! file that parses but fails the algebra laws is rejected.
//!
//! # Morphism files
//!
//! ```text
//! name transpose2
//! source pants2          # see "Algebra references" below
//! target pants2
//! row 0 1 0 0 0 0 0 0 0  # fhilb: target row index, then source-dim (re, im) pairs
//! ```
//!
//! Relational morphisms list `pair s t` lines instead of rows. Rows that are
//! absent are zero; the matrix shape is target-dim × source-dim.
//!
//! # Algebra references
//!
//! `source`/`target` accept, in order of precedence:
//!
//! 1. an inline generator — `pants(n)` and `diagonal(n)` on the matrix
//!    backend, `rel_pants(n)` on the relational one;
//! 2. a path ending in `.alg`, relative to the morphism file's directory;
//! 3. a bare name, resolved as `<name>.alg` next to the morphism file and
//!    then under the directory named by the `CPSTAR_CORPUS` environment
//!    variable.

use std::env;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::backends::{Backend, Morphism, ObjectRef, Relation};
use crate::error::Error;
use crate::frobenius::{diagonal_algebra, pants, FrobeniusAlgebra};
use crate::numeric::{composite, split, Complex64, ComplexMatrix, Tolerance};
use crate::Result;

/// Environment variable naming the fallback directory for algebra lookups.
pub const CORPUS_ENV: &str = "CPSTAR_CORPUS";

/// A parsed morphism file: the map together with its resolved endpoint
/// algebras and the references that named them.
#[derive(Debug, Clone)]
pub struct MorphismFile {
    pub name: String,
    pub source_ref: String,
    pub target_ref: String,
    pub source: FrobeniusAlgebra,
    pub target: FrobeniusAlgebra,
    pub morphism: Morphism,
}

/// Render an algebra in the `.alg` format.
pub fn serialize_algebra(name: &str, alg: &FrobeniusAlgebra) -> Result<String> {
    let n = alg.dim();
    let mut out = String::new();
    writeln!(out, "name {name}").unwrap();
    match alg.backend() {
        Backend::FHilb => {
            writeln!(out, "backend fhilb").unwrap();
            writeln!(out, "dim {n}").unwrap();
            let unit = alg.unit().matrix()?;
            let mut line = String::from("unit");
            for i in 0..n {
                let c = unit.get(i, 0);
                write!(line, " {} {}", c.re, c.im).unwrap();
            }
            writeln!(out, "{line}").unwrap();
            let mult = alg.mult().matrix()?;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let c = mult.get(k, composite(i, j, n));
                        if c.re != 0.0 || c.im != 0.0 {
                            writeln!(out, "mult {i} {j} {k} {} {}", c.re, c.im).unwrap();
                        }
                    }
                }
            }
        }
        Backend::Rel => {
            writeln!(out, "backend rel").unwrap();
            writeln!(out, "dim {n}").unwrap();
            let unit = alg.unit().relation()?;
            let mut line = String::from("unit");
            for &(_, i) in &unit.pairs {
                write!(line, " {i}").unwrap();
            }
            writeln!(out, "{line}").unwrap();
            for &(src, k) in &alg.mult().relation()?.pairs {
                let (i, j) = split(src, n);
                writeln!(out, "mult {i} {j} {k}").unwrap();
            }
        }
    }
    Ok(out)
}

/// Parse the `.alg` format and validate the result as a dagger Frobenius
/// algebra. Returns the `name` field, if present, alongside the algebra.
pub fn parse_algebra(text: &str, tol: Tolerance) -> Result<(Option<String>, FrobeniusAlgebra)> {
    let (name, mult, unit) = parse_algebra_parts(text)?;
    Ok((name, FrobeniusAlgebra::new(mult, unit, tol)?))
}

/// Parse the `.alg` format down to its raw multiplication and unit, with
/// shape and index validation only. The algebra laws are *not* checked here;
/// callers that want to report on each law individually (rather than reject
/// the file outright) start from these parts.
pub fn parse_algebra_parts(text: &str) -> Result<(Option<String>, Morphism, Morphism)> {
    let mut name = None;
    let mut backend = None;
    let mut dim = None;
    let mut unit_fields: Option<Vec<String>> = None;
    let mut mult_lines: Vec<(usize, Vec<String>)> = Vec::new();

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let mut fields = split_record(raw);
        let Some(keyword) = fields.first().cloned() else {
            continue;
        };
        fields.remove(0);
        match keyword.as_str() {
            "name" => name = Some(expect_one(&fields, line_no, "name")?),
            "backend" => {
                backend = Some(match expect_one(&fields, line_no, "backend")?.as_str() {
                    "fhilb" => Backend::FHilb,
                    "rel" => Backend::Rel,
                    other => {
                        return Err(Error::Parse(format!(
                            "line {line_no}: unknown backend {other:?} (expected fhilb or rel)"
                        )))
                    }
                })
            }
            "dim" => dim = Some(parse_usize(&expect_one(&fields, line_no, "dim")?, line_no)?),
            "carrier" => {
                if fields.is_empty() {
                    return Err(Error::Parse(format!(
                        "line {line_no}: carrier needs at least one label"
                    )));
                }
                dim = Some(fields.len());
            }
            "unit" => unit_fields = Some(fields),
            "mult" => mult_lines.push((line_no, fields)),
            other => {
                return Err(Error::Parse(format!(
                    "line {line_no}: unknown record {other:?} in an algebra file"
                )))
            }
        }
    }

    let backend =
        backend.ok_or_else(|| Error::Parse("algebra file is missing a backend line".into()))?;
    let n = dim.ok_or_else(|| Error::Parse("algebra file is missing a dim line".into()))?;
    if n == 0 {
        return Err(Error::Parse("dim must be ≥ 1".into()));
    }
    let unit_fields =
        unit_fields.ok_or_else(|| Error::Parse("algebra file is missing a unit line".into()))?;

    let (mult, unit) = match backend {
        Backend::FHilb => {
            if unit_fields.len() != 2 * n {
                return Err(Error::Parse(format!(
                    "unit line has {} fields, expected {} (re, im pairs for dimension {n})",
                    unit_fields.len(),
                    2 * n
                )));
            }
            let mut coeffs = Vec::with_capacity(n);
            for pair in unit_fields.chunks(2) {
                coeffs.push(Complex64::new(parse_f64(&pair[0], 0)?, parse_f64(&pair[1], 0)?));
            }
            let mut mult = ComplexMatrix::zeros(n, n * n);
            for (line_no, fields) in &mult_lines {
                if fields.len() != 5 {
                    return Err(Error::Parse(format!(
                        "line {line_no}: fhilb mult records are `mult i j k re im`"
                    )));
                }
                let i = parse_index(&fields[0], n, *line_no)?;
                let j = parse_index(&fields[1], n, *line_no)?;
                let k = parse_index(&fields[2], n, *line_no)?;
                let re = parse_f64(&fields[3], *line_no)?;
                let im = parse_f64(&fields[4], *line_no)?;
                mult.set(k, composite(i, j, n), Complex64::new(re, im));
            }
            (
                Morphism::from_matrix(n * n, n, mult)?,
                Morphism::point(&coeffs),
            )
        }
        Backend::Rel => {
            let unit_subset: Vec<usize> = unit_fields
                .iter()
                .map(|f| parse_index(f, n, 0))
                .collect::<Result<_>>()?;
            let mut pairs = Vec::with_capacity(mult_lines.len());
            for (line_no, fields) in &mult_lines {
                if fields.len() != 3 {
                    return Err(Error::Parse(format!(
                        "line {line_no}: rel mult records are `mult i j k`"
                    )));
                }
                let i = parse_index(&fields[0], n, *line_no)?;
                let j = parse_index(&fields[1], n, *line_no)?;
                let k = parse_index(&fields[2], n, *line_no)?;
                pairs.push((composite(i, j, n), k));
            }
            (
                Morphism::from_relation(Relation::new(n * n, n, pairs)?),
                Morphism::point_rel(n, unit_subset)?,
            )
        }
    };

    Ok((name, mult, unit))
}

/// Prefix an error with the file it came from, without stacking a second
/// "parse error" label when the inner error already carries one.
fn at_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => Error::Parse(format!("{}: {other}", path.display())),
    }
}

/// Read an algebra file from disk; the name defaults to the file stem when
/// the file has no `name` line.
pub fn load_algebra(path: &Path, tol: Tolerance) -> Result<(String, FrobeniusAlgebra)> {
    let text = std::fs::read_to_string(path)?;
    let (name, alg) = parse_algebra(&text, tol)
        .map_err(|e| at_path(path, e))?;
    Ok((name.unwrap_or_else(|| file_stem(path)), alg))
}

/// Read an algebra file down to its raw parts (see [`parse_algebra_parts`]);
/// the name defaults to the file stem.
pub fn load_algebra_parts(path: &Path) -> Result<(String, Morphism, Morphism)> {
    let text = std::fs::read_to_string(path)?;
    let (name, mult, unit) = parse_algebra_parts(&text)
        .map_err(|e| at_path(path, e))?;
    Ok((name.unwrap_or_else(|| file_stem(path)), mult, unit))
}

/// Render a morphism in the `.mor` format against the given endpoint
/// references (names, paths, or inline generators — they are written out
/// verbatim).
pub fn serialize_morphism(
    name: &str,
    source_ref: &str,
    target_ref: &str,
    m: &Morphism,
) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "name {name}").unwrap();
    writeln!(out, "source {source_ref}").unwrap();
    writeln!(out, "target {target_ref}").unwrap();
    match m.backend() {
        Backend::FHilb => {
            let mat = m.matrix()?;
            for r in 0..m.target.dim {
                let mut line = format!("row {r}");
                for c in 0..m.source.dim {
                    let v = mat.get(r, c);
                    write!(line, " {} {}", v.re, v.im).unwrap();
                }
                writeln!(out, "{line}").unwrap();
            }
        }
        Backend::Rel => {
            for &(s, t) in &m.relation()?.pairs {
                writeln!(out, "pair {s} {t}").unwrap();
            }
        }
    }
    Ok(out)
}

/// Parse the `.mor` format, resolving the endpoint algebras relative to
/// `base_dir` (usually the directory of the file being read).
pub fn parse_morphism(text: &str, base_dir: Option<&Path>, tol: Tolerance) -> Result<MorphismFile> {
    let mut name = None;
    let mut source_ref = None;
    let mut target_ref = None;
    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    let mut rel_pairs: Vec<(usize, usize)> = Vec::new();

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let mut fields = split_record(raw);
        let Some(keyword) = fields.first().cloned() else {
            continue;
        };
        fields.remove(0);
        match keyword.as_str() {
            "name" => name = Some(expect_one(&fields, line_no, "name")?),
            "source" => source_ref = Some(expect_one(&fields, line_no, "source")?),
            "target" => target_ref = Some(expect_one(&fields, line_no, "target")?),
            "row" => {
                if fields.is_empty() {
                    return Err(Error::Parse(format!(
                        "line {line_no}: row records are `row i re im ...`"
                    )));
                }
                let r = parse_usize(&fields[0], line_no)?;
                rows.push((r, fields[1..].to_vec()));
            }
            "pair" => {
                if fields.len() != 2 {
                    return Err(Error::Parse(format!(
                        "line {line_no}: pair records are `pair source target`"
                    )));
                }
                rel_pairs.push((parse_usize(&fields[0], line_no)?, parse_usize(&fields[1], line_no)?));
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {line_no}: unknown record {other:?} in a morphism file"
                )))
            }
        }
    }

    let source_ref =
        source_ref.ok_or_else(|| Error::Parse("morphism file is missing a source line".into()))?;
    let target_ref =
        target_ref.ok_or_else(|| Error::Parse("morphism file is missing a target line".into()))?;
    let (_, source) = resolve_algebra(&source_ref, base_dir, tol)?;
    let (_, target) = resolve_algebra(&target_ref, base_dir, tol)?;
    if source.backend() != target.backend() {
        return Err(Error::Parse(format!(
            "source algebra is {} but target algebra is {}",
            source.backend(),
            target.backend()
        )));
    }

    let (n, m) = (source.dim(), target.dim());
    let morphism = match source.backend() {
        Backend::FHilb => {
            let mut mat = ComplexMatrix::zeros(m, n);
            for (r, fields) in &rows {
                if *r >= m {
                    return Err(Error::Parse(format!(
                        "row index {r} out of range for target dimension {m}"
                    )));
                }
                if fields.len() != 2 * n {
                    return Err(Error::Parse(format!(
                        "row {r} has {} numeric fields, expected {} for source dimension {n}",
                        fields.len(),
                        2 * n
                    )));
                }
                for (c, pair) in fields.chunks(2).enumerate() {
                    mat.set(
                        *r,
                        c,
                        Complex64::new(parse_f64(&pair[0], 0)?, parse_f64(&pair[1], 0)?),
                    );
                }
            }
            Morphism::from_matrix(n, m, mat)?
        }
        Backend::Rel => Morphism::from_relation(Relation::new(n, m, rel_pairs)?),
    };

    Ok(MorphismFile {
        name: name.unwrap_or_else(|| "anonymous".into()),
        source_ref,
        target_ref,
        source,
        target,
        morphism,
    })
}

/// Read a morphism file from disk; endpoint names resolve next to the file
/// first. The name defaults to the file stem.
pub fn load_morphism(path: &Path, tol: Tolerance) -> Result<MorphismFile> {
    let text = std::fs::read_to_string(path)?;
    let mut parsed = parse_morphism(&text, path.parent(), tol)
        .map_err(|e| at_path(path, e))?;
    if parsed.name == "anonymous" {
        parsed.name = file_stem(path);
    }
    Ok(parsed)
}

/// Resolve an algebra reference: inline generator, `.alg` path, or bare
/// name looked up next to `base_dir` and then under [`CORPUS_ENV`].
pub fn resolve_algebra(
    reference: &str,
    base_dir: Option<&Path>,
    tol: Tolerance,
) -> Result<(String, FrobeniusAlgebra)> {
    let mut dirs = Vec::new();
    if let Some(dir) = base_dir {
        dirs.push(dir.to_path_buf());
    }
    if let Some(corpus) = env::var_os(CORPUS_ENV) {
        dirs.push(PathBuf::from(corpus));
    }
    resolve_in(reference, &dirs, tol)
}

/// Reference resolution against an explicit search path (exposed for the
/// command-line driver and the tests).
pub fn resolve_in(
    reference: &str,
    dirs: &[PathBuf],
    tol: Tolerance,
) -> Result<(String, FrobeniusAlgebra)> {
    if let Some(alg) = inline_generator(reference, tol)? {
        return Ok((reference.to_string(), alg));
    }
    if reference.ends_with(".alg") {
        let path = Path::new(reference);
        if path.is_absolute() {
            return load_algebra(path, tol);
        }
        for dir in dirs {
            let candidate = dir.join(path);
            if candidate.exists() {
                return load_algebra(&candidate, tol);
            }
        }
        return Err(Error::Parse(format!(
            "algebra file {reference:?} not found relative to the search path"
        )));
    }
    for dir in dirs {
        let candidate = dir.join(format!("{reference}.alg"));
        if candidate.exists() {
            return load_algebra(&candidate, tol);
        }
    }
    Err(Error::Parse(format!(
        "algebra {reference:?} not found: no inline generator of that name, and no \
         {reference}.alg next to the input or under ${CORPUS_ENV}"
    )))
}

/// `pants(n)`, `diagonal(n)`, `rel_pants(n)` — the generators accepted
/// inline wherever an algebra reference is expected.
fn inline_generator(reference: &str, tol: Tolerance) -> Result<Option<FrobeniusAlgebra>> {
    let Some((head, rest)) = reference.split_once('(') else {
        return Ok(None);
    };
    let Some(arg) = rest.strip_suffix(')') else {
        return Ok(None);
    };
    let n: usize = arg
        .parse()
        .map_err(|_| Error::Parse(format!("inline generator argument {arg:?} is not a size")))?;
    match head {
        "pants" => Ok(Some(pants(ObjectRef::new(Backend::FHilb, n), tol)?)),
        "diagonal" => Ok(Some(diagonal_algebra(n, tol)?)),
        "rel_pants" => Ok(Some(pants(ObjectRef::new(Backend::Rel, n), tol)?)),
        other => Err(Error::Parse(format!(
            "unknown inline generator {other:?} (expected pants, diagonal, or rel_pants)"
        ))),
    }
}

fn split_record(raw: &str) -> Vec<String> {
    let content = raw.split('#').next().unwrap_or("");
    content.split_whitespace().map(str::to_string).collect()
}

fn expect_one(fields: &[String], line_no: usize, keyword: &str) -> Result<String> {
    if fields.len() != 1 {
        return Err(Error::Parse(format!(
            "line {line_no}: {keyword} takes exactly one field"
        )));
    }
    Ok(fields[0].clone())
}

fn parse_usize(tok: &str, line_no: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("line {line_no}: expected an index, got {tok:?}")))
}

fn parse_index(tok: &str, bound: usize, line_no: usize) -> Result<usize> {
    let v = parse_usize(tok, line_no)?;
    if v >= bound {
        return Err(Error::Parse(format!(
            "line {line_no}: index {v} out of range (dimension {bound})"
        )));
    }
    Ok(v)
}

fn parse_f64(tok: &str, line_no: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("line {line_no}: expected a number, got {tok:?}")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!(
            "line {line_no}: non-finite number {tok:?}"
        )));
    }
    Ok(v)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "anonymous".into())
}
