//! Python bindings: algebras, morphisms, the positivity checkers, the
//! classical (stochastic) fragment, and the splitting construction.
//!
//! The module mirrors the command-line surface at library granularity —
//! build or load algebras, wrap matrices or relations as morphisms, and ask
//! the same questions the CLI asks. Matrix entries cross the boundary as
//! Python complex numbers; relational data as index pairs.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cpstar_core::backends::{Backend, Morphism as CoreMorphism, ObjectRef, Relation};
use cpstar_core::classify::{
    concrete_cp_oracle, extract_groupoid, relation_respects_inverses, wedderburn,
};
use cpstar_core::corpus;
use cpstar_core::cpm::perfect_square_side;
use cpstar_core::cpstar::{
    check_cpstar, check_cpstar_convolution, CpCheck, CpStarMorphism, CpStarObject,
};
use cpstar_core::format;
use cpstar_core::frobenius::{diagonal_algebra, pants, FrobeniusAlgebra};
use cpstar_core::numeric::{ComplexMatrix, Tolerance};
use cpstar_core::selftest::{run_selftest, Level};
use cpstar_core::splitdag::functor_f_object;
use cpstar_core::stoch::{
    born, extract_povm, from_stochastic_matrix, operator_point, to_stochastic_matrix, StochObject,
};

fn pyerr(e: cpstar_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn tolerance(tol: f64) -> PyResult<Tolerance> {
    Tolerance::uniform(tol).map_err(pyerr)
}

fn backend_from_str(s: &str) -> PyResult<Backend> {
    match s {
        "fhilb" => Ok(Backend::FHilb),
        "rel" => Ok(Backend::Rel),
        other => Err(PyValueError::new_err(format!(
            "unknown backend {other:?} (expected 'fhilb' or 'rel')"
        ))),
    }
}

fn backend_str(b: Backend) -> &'static str {
    match b {
        Backend::FHilb => "fhilb",
        Backend::Rel => "rel",
    }
}

fn matrix_entries(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect())
        .collect()
}

fn matrix_from_entries(entries: &[Vec<Complex64>]) -> PyResult<ComplexMatrix> {
    let rows = entries.len();
    let cols = entries.first().map(|r| r.len()).unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(PyValueError::new_err("entries must be a non-empty rectangle"));
    }
    if entries.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("entries must be rectangular"));
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (r, row) in entries.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            m.set(r, c, v);
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Algebra
// ---------------------------------------------------------------------------

/// A dagger Frobenius algebra in one of the two backends.
#[pyclass(frozen, module = "cpstar_py")]
struct Algebra {
    name: String,
    inner: FrobeniusAlgebra,
}

#[pymethods]
impl Algebra {
    /// The full matrix algebra (endomorphisms of an `n`-dimensional object).
    #[staticmethod]
    #[pyo3(signature = (n, backend = "fhilb", tol = 1e-9))]
    fn pants(n: usize, backend: &str, tol: f64) -> PyResult<Algebra> {
        let backend = backend_from_str(backend)?;
        let alg = pants(
            ObjectRef::checked(backend, n).map_err(pyerr)?,
            tolerance(tol)?,
        )
        .map_err(pyerr)?;
        let name = match backend {
            Backend::FHilb => format!("pants{n}"),
            Backend::Rel => format!("rel_pants{n}"),
        };
        Ok(Algebra { name, inner: alg })
    }

    /// The commutative algebra of functions on `n` points.
    #[staticmethod]
    #[pyo3(signature = (n, tol = 1e-9))]
    fn diagonal(n: usize, tol: f64) -> PyResult<Algebra> {
        Ok(Algebra {
            name: format!("diag{n}"),
            inner: diagonal_algebra(n, tolerance(tol)?).map_err(pyerr)?,
        })
    }

    /// Load an `.alg` file (validated on load).
    #[staticmethod]
    #[pyo3(signature = (path, tol = 1e-9))]
    fn load(path: &str, tol: f64) -> PyResult<Algebra> {
        let (name, inner) =
            format::load_algebra(std::path::Path::new(path), tolerance(tol)?).map_err(pyerr)?;
        Ok(Algebra { name, inner })
    }

    /// Parse the `.alg` text format (validated on parse).
    #[staticmethod]
    #[pyo3(signature = (text, tol = 1e-9))]
    fn parse(text: &str, tol: f64) -> PyResult<Algebra> {
        let (name, inner) = format::parse_algebra(text, tolerance(tol)?).map_err(pyerr)?;
        Ok(Algebra { name: name.unwrap_or_else(|| "anonymous".into()), inner })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.name
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn backend(&self) -> &'static str {
        backend_str(self.inner.backend())
    }

    #[getter]
    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }

    #[getter]
    fn is_special(&self) -> bool {
        self.inner.is_special()
    }

    #[getter]
    fn is_commutative(&self) -> bool {
        self.inner.is_commutative()
    }

    /// The multiplication `A⊗A → A`.
    fn mult(&self) -> Morphism {
        Morphism { inner: self.inner.mult().clone() }
    }

    /// The unit `I → A`.
    fn unit(&self) -> Morphism {
        Morphism { inner: self.inner.unit().clone() }
    }

    /// Solve for the central positive normaliser.
    #[pyo3(signature = (tol = 1e-9))]
    fn normaliser(&self, tol: f64) -> PyResult<Morphism> {
        Ok(Morphism {
            inner: self.inner.solve_normaliser(tolerance(tol)?).map_err(pyerr)?,
        })
    }

    /// Structure of the algebra: `{"backend": "fhilb", "factors": [...]}` for
    /// a matrix-block decomposition, `{"backend": "rel", "objects": ...,
    /// "morphisms": ...}` for a groupoid extraction.
    #[pyo3(signature = (tol = 1e-9))]
    fn classify<'py>(&self, py: Python<'py>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
        let out = PyDict::new(py);
        out.set_item("backend", self.backend())?;
        match self.inner.backend() {
            Backend::FHilb => {
                let dec = wedderburn(&self.inner, tolerance(tol)?).map_err(pyerr)?;
                out.set_item("factors", dec.factor_dims().to_vec())?;
            }
            Backend::Rel => {
                let g = extract_groupoid(&self.inner).map_err(pyerr)?;
                out.set_item("objects", g.object_count())?;
                out.set_item("morphisms", g.morphism_count())?;
            }
        }
        Ok(out)
    }

    /// Render the `.alg` text format.
    fn serialize(&self) -> PyResult<String> {
        format::serialize_algebra(&self.name, &self.inner).map_err(pyerr)
    }

    fn __repr__(&self) -> String {
        format!(
            "Algebra(name={:?}, backend={:?}, dim={})",
            self.name,
            self.backend(),
            self.dim()
        )
    }
}

// ---------------------------------------------------------------------------
// Morphism
// ---------------------------------------------------------------------------

/// A morphism of one of the two backends: a complex matrix or a relation.
#[pyclass(frozen, module = "cpstar_py")]
struct Morphism {
    inner: CoreMorphism,
}

#[pymethods]
impl Morphism {
    /// Wrap a dense matrix (rows × columns = target × source) as a linear map.
    #[staticmethod]
    fn from_entries(entries: Vec<Vec<Complex64>>) -> PyResult<Morphism> {
        let m = matrix_from_entries(&entries)?;
        Ok(Morphism {
            inner: CoreMorphism::from_matrix(m.cols(), m.rows(), m).map_err(pyerr)?,
        })
    }

    /// Wrap a pair list as a relation between sets of the given sizes.
    #[staticmethod]
    fn from_pairs(
        source_size: usize,
        target_size: usize,
        pairs: Vec<(usize, usize)>,
    ) -> PyResult<Morphism> {
        Ok(Morphism {
            inner: CoreMorphism::from_relation(
                Relation::new(source_size, target_size, pairs).map_err(pyerr)?,
            ),
        })
    }

    /// The identity on an algebra's carrier.
    #[staticmethod]
    fn identity(algebra: &Algebra) -> Morphism {
        Morphism { inner: CoreMorphism::identity(algebra.inner.carrier()) }
    }

    #[getter]
    fn backend(&self) -> &'static str {
        backend_str(self.inner.backend())
    }

    #[getter]
    fn source_dim(&self) -> usize {
        self.inner.source.dim
    }

    #[getter]
    fn target_dim(&self) -> usize {
        self.inner.target.dim
    }

    /// Matrix entries (linear maps only), row-major, as Python complex.
    fn entries(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(matrix_entries(self.inner.matrix().map_err(pyerr)?))
    }

    /// Relation pairs (relations only) as `(source, target)` tuples.
    fn pairs(&self) -> PyResult<Vec<(usize, usize)>> {
        Ok(self.inner.relation().map_err(pyerr)?.pairs.iter().copied().collect())
    }

    fn dagger(&self) -> Morphism {
        Morphism { inner: self.inner.dagger() }
    }

    /// Composition in diagram order: apply `self` first, then `next`.
    fn then(&self, next: &Morphism) -> PyResult<Morphism> {
        Ok(Morphism { inner: self.inner.then(&next.inner).map_err(pyerr)? })
    }

    fn tensor(&self, other: &Morphism) -> PyResult<Morphism> {
        Ok(Morphism { inner: self.inner.tensor(&other.inner).map_err(pyerr)? })
    }

    #[pyo3(signature = (other, tol = 1e-9))]
    fn equal(&self, other: &Morphism, tol: f64) -> PyResult<bool> {
        Ok(self.inner.equal(&other.inner, tolerance(tol)?))
    }

    fn __repr__(&self) -> String {
        format!(
            "Morphism(backend={:?}, {} -> {})",
            self.backend(),
            self.source_dim(),
            self.target_dim()
        )
    }
}

// ---------------------------------------------------------------------------
// Module functions
// ---------------------------------------------------------------------------

/// Load a `.mor` file: returns `(name, source, target, morphism)` with the
/// endpoint algebras resolved the same way the CLI resolves them.
#[pyfunction]
#[pyo3(signature = (path, tol = 1e-9))]
fn load_morphism(path: &str, tol: f64) -> PyResult<(String, Algebra, Algebra, Morphism)> {
    let file =
        format::load_morphism(std::path::Path::new(path), tolerance(tol)?).map_err(pyerr)?;
    Ok((
        file.name,
        Algebra { name: file.source_ref, inner: file.source },
        Algebra { name: file.target_ref, inner: file.target },
        Morphism { inner: file.morphism },
    ))
}

/// Run one of the complete-positivity checkers on `f : A → B`.
///
/// Returns `{"accepted": bool, "detail": str, "min_eigenvalue": float|None}`.
/// Methods: `"rearrange"` (positivity of the rearranged lift),
/// `"convolution"` (positivity of the name in the convolution algebra),
/// `"oracle"` (block coordinates on fhilb, inverse closure on rel).
#[pyfunction]
#[pyo3(signature = (f, source, target, method = "rearrange", tol = 1e-9))]
fn check_cp<'py>(
    py: Python<'py>,
    f: &Morphism,
    source: &Algebra,
    target: &Algebra,
    method: &str,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let tol = tolerance(tol)?;
    let out = PyDict::new(py);
    let (accepted, detail, eigenvalue) = match method {
        "rearrange" | "convolution" => {
            let check = if method == "rearrange" {
                check_cpstar(&f.inner, &source.inner, &target.inner, tol).map_err(pyerr)?
            } else {
                check_cpstar_convolution(&f.inner, &source.inner, &target.inner, tol)
                    .map_err(pyerr)?
            };
            match check {
                CpCheck::Accept(_) => (true, "completely positive".to_string(), None),
                CpCheck::Reject(d) => (false, d.reason.clone(), d.min_eigenvalue),
            }
        }
        "oracle" => match f.inner.backend() {
            Backend::FHilb => {
                let dec_a = wedderburn(&source.inner, tol).map_err(pyerr)?;
                let dec_b = wedderburn(&target.inner, tol).map_err(pyerr)?;
                let v = concrete_cp_oracle(&f.inner, &dec_a, &dec_b, tol).map_err(pyerr)?;
                let detail = if v.is_cp {
                    "completely positive".to_string()
                } else {
                    format!("min Choi eigenvalue ≈ {:.3}", v.min_choi_eigenvalue)
                };
                (v.is_cp, detail, Some(v.min_choi_eigenvalue))
            }
            Backend::Rel => {
                let g = extract_groupoid(&source.inner).map_err(pyerr)?;
                let h = extract_groupoid(&target.inner).map_err(pyerr)?;
                let ok = relation_respects_inverses(f.inner.relation().map_err(pyerr)?, &g, &h)
                    .map_err(pyerr)?;
                let detail = if ok {
                    "relation is closed under the inverse pairing".to_string()
                } else {
                    "relation is not closed under the inverse pairing".to_string()
                };
                (ok, detail, None)
            }
        },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method {other:?} (expected 'rearrange', 'convolution', or 'oracle')"
            )))
        }
    };
    out.set_item("accepted", accepted)?;
    out.set_item("detail", detail)?;
    out.set_item("min_eigenvalue", eigenvalue)?;
    Ok(out)
}

/// Interpret a column-stochastic matrix as a morphism between the function
/// algebras on `cols` and `rows` points.
#[pyfunction]
#[pyo3(signature = (matrix, tol = 1e-9))]
fn stochastic_to_morphism(matrix: Vec<Vec<f64>>, tol: f64) -> PyResult<Morphism> {
    let tol = tolerance(tol)?;
    let entries: Vec<Vec<Complex64>> = matrix
        .iter()
        .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    let w = matrix_from_entries(&entries)?;
    let source = stoch_object(w.cols(), tol)?;
    let target = stoch_object(w.rows(), tol)?;
    let f = from_stochastic_matrix(&w, &source, &target, tol).map_err(pyerr)?;
    Ok(Morphism { inner: f.morphism().clone() })
}

/// Read a morphism between function algebras back as a column-stochastic
/// matrix (real entries).
#[pyfunction]
#[pyo3(signature = (f, tol = 1e-9))]
fn morphism_to_stochastic(f: &Morphism, tol: f64) -> PyResult<Vec<Vec<f64>>> {
    let tol = tolerance(tol)?;
    let source = stoch_object(f.inner.source.dim, tol)?;
    let target = stoch_object(f.inner.target.dim, tol)?;
    let certified = CpStarMorphism::new(
        f.inner.clone(),
        source.object(),
        target.object(),
        tol,
    )
    .map_err(pyerr)?;
    let w = to_stochastic_matrix(&certified, &source, &target, tol).map_err(pyerr)?;
    Ok((0..w.rows())
        .map(|r| (0..w.cols()).map(|c| w.get(r, c).re).collect())
        .collect())
}

fn stoch_object(n: usize, tol: Tolerance) -> PyResult<StochObject> {
    let alg = diagonal_algebra(n, tol).map_err(pyerr)?;
    let obj = CpStarObject::new(alg, tol).map_err(pyerr)?;
    StochObject::new(obj, tol).map_err(pyerr)
}

/// Extract the measurement family of `f : pants(X) → A` (A the function
/// algebra on the outcomes). Returns `{"outcomes", "completeness_defect",
/// "elements"}` with each element an operator matrix on `X`.
#[pyfunction]
#[pyo3(signature = (f, source, target, tol = 1e-9))]
fn povm<'py>(
    py: Python<'py>,
    f: &Morphism,
    source: &Algebra,
    target: &Algebra,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let tol = tolerance(tol)?;
    let side = perfect_square_side(source.inner.dim()).ok_or_else(|| {
        PyValueError::new_err("measurement source is not a doubled carrier")
    })?;
    let x = ObjectRef::new(f.inner.backend(), side);
    let src = CpStarObject::new(source.inner.clone(), tol).map_err(pyerr)?;
    let tgt = CpStarObject::new(target.inner.clone(), tol).map_err(pyerr)?;
    let classical = StochObject::new(tgt.clone(), tol).map_err(pyerr)?;
    let certified = CpStarMorphism::new(f.inner.clone(), &src, &tgt, tol).map_err(pyerr)?;
    let family = extract_povm(&certified, x, &classical, tol).map_err(pyerr)?;

    let mut total = ComplexMatrix::zeros(side * side, 1);
    for e in family.elements() {
        total = total.add(e.matrix().map_err(pyerr)?).map_err(pyerr)?;
    }
    let defect = total
        .sub(cpstar_core::backends::cup(x).matrix().map_err(pyerr)?)
        .map_err(pyerr)?
        .norm_inf();

    let out = PyDict::new(py);
    out.set_item("outcomes", family.elements().len())?;
    out.set_item("completeness_defect", defect)?;
    let mut ops = Vec::with_capacity(family.elements().len());
    for i in 0..family.elements().len() {
        ops.push(matrix_entries(&family.operator(i).map_err(pyerr)?));
    }
    out.set_item("elements", ops)?;
    Ok(out)
}

/// Outcome distribution of measuring the density operator `rho` with the
/// measurement `f : pants(X) → A`.
#[pyfunction]
#[pyo3(signature = (f, source, target, rho, tol = 1e-9))]
fn born_distribution(
    f: &Morphism,
    source: &Algebra,
    target: &Algebra,
    rho: Vec<Vec<Complex64>>,
    tol: f64,
) -> PyResult<Vec<f64>> {
    let tol = tolerance(tol)?;
    let src = CpStarObject::new(source.inner.clone(), tol).map_err(pyerr)?;
    let tgt = CpStarObject::new(target.inner.clone(), tol).map_err(pyerr)?;
    let classical = StochObject::new(tgt.clone(), tol).map_err(pyerr)?;
    let certified = CpStarMorphism::new(f.inner.clone(), &src, &tgt, tol).map_err(pyerr)?;
    let state = operator_point(&matrix_from_entries(&rho)?).map_err(pyerr)?;
    let dist = born(&certified, &state, &classical, tol).map_err(pyerr)?;
    Ok(dist.weights().to_vec())
}

/// Rank of the splitting idempotent of an algebra (linear backend only);
/// always equals the algebra dimension.
#[pyfunction]
#[pyo3(signature = (algebra, tol = 1e-9))]
fn split_rank(algebra: &Algebra, tol: f64) -> PyResult<usize> {
    let tol = tolerance(tol)?;
    let obj = CpStarObject::new(algebra.inner.clone(), tol).map_err(pyerr)?;
    let idem = functor_f_object(&obj, tol).map_err(pyerr)?;
    idem.rank().map_err(pyerr)
}

/// Run the bundled acceptance checks; returns one dict per criterion.
#[pyfunction]
#[pyo3(signature = (level = "quick", tol = 1e-9))]
fn selftest<'py>(py: Python<'py>, level: &str, tol: f64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let level = match level {
        "quick" => Level::Quick,
        "full" => Level::Full,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown level {other:?} (expected 'quick' or 'full')"
            )))
        }
    };
    let tol = tolerance(tol)?;
    let mut out = Vec::new();
    for o in run_selftest(level, tol) {
        let d = PyDict::new(py);
        d.set_item("index", o.index)?;
        d.set_item("label", o.label)?;
        d.set_item("passed", o.passed)?;
        d.set_item("detail", o.detail)?;
        d.set_item("seconds", o.seconds)?;
        out.push(d);
    }
    Ok(out)
}

/// Write the bundled fixture files into a directory; returns the paths.
#[pyfunction]
#[pyo3(signature = (out_dir, tol = 1e-9))]
fn write_corpus(out_dir: &str, tol: f64) -> PyResult<Vec<String>> {
    let files = corpus::write_corpus(std::path::Path::new(out_dir), tolerance(tol)?)
        .map_err(pyerr)?;
    Ok(files.into_iter().map(|p| p.display().to_string()).collect())
}

#[pymodule]
fn cpstar_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_class::<Morphism>()?;
    m.add_function(wrap_pyfunction!(load_morphism, m)?)?;
    m.add_function(wrap_pyfunction!(check_cp, m)?)?;
    m.add_function(wrap_pyfunction!(stochastic_to_morphism, m)?)?;
    m.add_function(wrap_pyfunction!(morphism_to_stochastic, m)?)?;
    m.add_function(wrap_pyfunction!(povm, m)?)?;
    m.add_function(wrap_pyfunction!(born_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(split_rank, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add_function(wrap_pyfunction!(write_corpus, m)?)?;
    Ok(())
}
