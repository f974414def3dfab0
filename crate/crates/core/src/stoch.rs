//! The classical fragment: commutative objects, the stochastic-matrix
//! correspondence, measurement extraction, outcome probabilities, and
//! preparations.
//!
//! A commutative FHilb object with a full basis of copyable points behaves
//! like a finite set of outcomes. Certified normalised morphisms between two
//! such objects are exactly column-stochastic matrices once expressed in the
//! copyable bases ([`to_stochastic_matrix`] / [`from_stochastic_matrix`]).
//! Measurements `pants(X) → A` yield positive-operator families summing to
//! the identity operator ([`extract_povm`]); states paired with measurements
//! yield outcome distributions ([`born`]), cross-checked against the trace
//! pairing; distributions pushed through preparations yield certified
//! positive elements ([`prepare`]).
//!
//! Copyable points are ordered lexicographically by rounded coordinates (the
//! convention of the point search), so all matrices here are reproducible.
//! Column sums are asserted against the counit identity rather than
//! rescaled: a commutative algebra whose copyable points do not have unit
//! counit weight fails [`to_stochastic_matrix`] loudly with the offending
//! weights in the message instead of being silently renormalised.

use crate::backends::{cup, Backend, Morphism, ObjectRef};
use crate::cpm::perfect_square_side;
use crate::cpstar::{is_normalised, is_positive_element, CpStarMorphism, CpStarObject};
use crate::error::Error;
use crate::frobenius::pants;
use crate::numeric::{composite, invert, Complex64, ComplexMatrix, Tolerance};
use crate::Result;

/// Seed for the copyable-point search; fixed so bases are stable across
/// calls and runs.
const POINT_SEED: u64 = 0x0c1a551c;

/// A commutative object with its full basis of copyable points.
#[derive(Debug, Clone)]
pub struct StochObject {
    object: CpStarObject,
    points: Vec<Morphism>,
}

impl StochObject {
    /// Wrap a commutative object, finding and caching its copyable points.
    /// Fails with `NotCommutative` if the algebra is not commutative or the
    /// points do not form a full basis.
    pub fn new(object: CpStarObject, tol: Tolerance) -> Result<StochObject> {
        let algebra = object.algebra();
        if !algebra.is_commutative() {
            return Err(Error::NotCommutative(
                "classical objects need a commutative algebra".into(),
            ));
        }
        let points = algebra.copyable_points(tol, POINT_SEED)?;
        if algebra.backend() == Backend::FHilb && points.len() != algebra.dim() {
            return Err(Error::NotCommutative(format!(
                "found {} copyable points on a {}-dimensional algebra; a full basis is required",
                points.len(),
                algebra.dim()
            )));
        }
        Ok(StochObject { object, points })
    }

    pub fn object(&self) -> &CpStarObject {
        &self.object
    }

    pub fn algebra(&self) -> &crate::frobenius::FrobeniusAlgebra {
        self.object.algebra()
    }

    /// The copyable points, in the fixed lexicographic order.
    pub fn points(&self) -> &[Morphism] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.object.algebra().dim()
    }

    /// The invertible matrix whose columns are the copyable points.
    fn basis_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, self.points.len());
        for (j, p) in self.points.iter().enumerate() {
            let coords = p.matrix()?;
            for i in 0..n {
                m.set(i, j, coords.get(i, 0));
            }
        }
        Ok(m)
    }
}

/// A family of positive elements of an endomorphism algebra summing to the
/// identity operator.
#[derive(Debug, Clone)]
pub struct Povm {
    base: ObjectRef,
    elements: Vec<Morphism>,
}

impl Povm {
    /// The measured object `X`.
    pub fn base(&self) -> ObjectRef {
        self.base
    }

    /// Elements as points of the doubled carrier `X*⊗X`, one per outcome.
    pub fn elements(&self) -> &[Morphism] {
        &self.elements
    }

    /// Element `i` as an operator on `X`.
    pub fn operator(&self, i: usize) -> Result<ComplexMatrix> {
        point_operator(&self.elements[i], self.base.dim)
    }
}

/// Nonnegative weights over the copyable points of a classical object,
/// summing to one.
#[derive(Debug, Clone)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    /// Validate weights: nonnegative and summing to one within tolerance.
    pub fn new(weights: Vec<f64>, tol: Tolerance) -> Result<Distribution> {
        if weights.iter().any(|w| *w < -tol.eq_tol) {
            return Err(Error::NotStochastic(format!(
                "negative weight in distribution: {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol.eq_tol {
            return Err(Error::NotStochastic(format!(
                "distribution weights sum to {total}, expected 1"
            )));
        }
        Ok(Distribution { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The point-mass distribution on outcome `i` of `n`.
    pub fn point_mass(i: usize, n: usize) -> Distribution {
        let mut weights = vec![0.0; n];
        weights[i] = 1.0;
        Distribution { weights }
    }
}

/// Express a certified normalised morphism between classical objects in the
/// copyable bases: `W = Y⁻¹ · F · X`. Entries must be (numerically) real and
/// nonnegative, and every column must sum to one; violations are
/// `NotStochastic`. The returned matrix has real entries.
pub fn to_stochastic_matrix(
    f: &CpStarMorphism,
    a: &StochObject,
    b: &StochObject,
    tol: Tolerance,
) -> Result<ComplexMatrix> {
    if a.algebra().backend() != Backend::FHilb || b.algebra().backend() != Backend::FHilb {
        return Err(Error::NotCommutative(
            "the stochastic correspondence is a matrix-backend construction".into(),
        ));
    }
    if !is_normalised(f.morphism(), a.algebra(), b.algebra(), tol)? {
        return Err(Error::NotNormalised(
            "morphism does not preserve the counit".into(),
        ));
    }
    let x = a.basis_matrix()?;
    let y = b.basis_matrix()?;
    let w = invert(&y, tol)?.matmul(f.morphism().matrix()?)?.matmul(&x)?;

    for c in 0..w.cols() {
        let mut sum = 0.0;
        for r in 0..w.rows() {
            let v = w.get(r, c);
            if v.im.abs() > tol.eq_tol || v.re < -tol.eq_tol {
                return Err(Error::NotStochastic(format!(
                    "entry ({r},{c}) = {v} is not a nonnegative real"
                )));
            }
            sum += v.re;
        }
        if (sum - 1.0).abs() > tol.eq_tol {
            let weights: Vec<f64> = b
                .points()
                .iter()
                .map(|p| {
                    p.then(b.algebra().counit())
                        .and_then(|s| s.scalar_value())
                        .map(|s| s.re)
                        .unwrap_or(f64::NAN)
                })
                .collect();
            return Err(Error::NotStochastic(format!(
                "column {c} sums to {sum}, expected 1 (target basis counit weights: {weights:?})"
            )));
        }
    }
    Ok(ComplexMatrix::from_fn(w.rows(), w.cols(), |r, c| {
        Complex64::new(w.get(r, c).re.max(0.0), 0.0)
    }))
}

/// Build and certify the morphism with matrix `W = Y · S · X⁻¹` from a
/// column-stochastic `S` expressed in the copyable bases.
pub fn from_stochastic_matrix(
    s: &ComplexMatrix,
    a: &StochObject,
    b: &StochObject,
    tol: Tolerance,
) -> Result<CpStarMorphism> {
    if s.rows() != b.dim() || s.cols() != a.dim() {
        return Err(Error::ShapeMismatch(format!(
            "stochastic matrix is {}×{}, objects need {}×{}",
            s.rows(),
            s.cols(),
            b.dim(),
            a.dim()
        )));
    }
    for c in 0..s.cols() {
        let mut sum = 0.0;
        for r in 0..s.rows() {
            let v = s.get(r, c);
            if v.im.abs() > tol.eq_tol || v.re < -tol.eq_tol {
                return Err(Error::NotStochastic(format!(
                    "entry ({r},{c}) = {v} is not a nonnegative real"
                )));
            }
            sum += v.re;
        }
        if (sum - 1.0).abs() > tol.eq_tol {
            return Err(Error::NotStochastic(format!(
                "column {c} sums to {sum}, expected 1"
            )));
        }
    }
    let x = a.basis_matrix()?;
    let y = b.basis_matrix()?;
    let m = y.matmul(s)?.matmul(&invert(&x, tol)?)?;
    let f = Morphism::from_matrix(a.dim(), b.dim(), m)?;
    CpStarMorphism::new(f, a.object(), b.object(), tol)
}

/// Extract the measurement family of a certified normalised morphism
/// `P : pants(X) → A`: elements `E_i = P† ∘ x_i` over the copyable points
/// `x_i` of `A`. Each element is re-verified positive, and the family must
/// sum to the cup (the identity operator on `X`), else
/// `CompletenessFailure`.
pub fn extract_povm(
    p: &CpStarMorphism,
    x: ObjectRef,
    a: &StochObject,
    tol: Tolerance,
) -> Result<Povm> {
    let carrier = ObjectRef::new(x.backend, x.dim * x.dim);
    if p.morphism().source != carrier {
        return Err(Error::ShapeMismatch(format!(
            "measurement source has dimension {}, expected the doubled carrier {}",
            p.morphism().source.dim,
            carrier.dim
        )));
    }
    let pants_alg = pants(x, tol)?;
    if !is_normalised(p.morphism(), &pants_alg, a.algebra(), tol)? {
        return Err(Error::NotNormalised(
            "measurement does not preserve the counit".into(),
        ));
    }

    let back = p.morphism().dagger();
    let mut elements = Vec::new();
    for (i, point) in a.points().iter().enumerate() {
        let e = point.then(&back)?;
        let verdict = is_positive_element(&e, &pants_alg, tol)?;
        if !verdict.is_accept() {
            return Err(Error::CertificateFailure(format!(
                "measurement element {i} is not a positive element: {}",
                verdict.diagnostic().map(|d| d.reason.clone()).unwrap_or_default()
            )));
        }
        elements.push(e);
    }

    let mut total = ComplexMatrix::zeros(carrier.dim, 1);
    for e in &elements {
        total = total.add(e.matrix()?)?;
    }
    let expected = cup(x);
    let deviation = total.sub(expected.matrix()?)?.norm_inf();
    if deviation > tol.eq_tol {
        return Err(Error::CompletenessFailure(format!(
            "measurement elements sum off the identity operator by {deviation:.3e}"
        )));
    }

    Ok(Povm {
        base: x,
        elements,
    })
}

/// Outcome distribution of measuring the state `rho` (a normalised positive
/// element of `pants(X)`, given as a point of the doubled carrier) with
/// `P : pants(X) → A`: the coefficients of `P∘rho` in the copyable basis.
/// The result is cross-checked outcome by outcome against the trace pairing
/// with the extracted measurement family.
pub fn born(
    p: &CpStarMorphism,
    rho: &Morphism,
    a: &StochObject,
    tol: Tolerance,
) -> Result<Distribution> {
    let side = perfect_square_side(p.morphism().source.dim).ok_or_else(|| {
        Error::ShapeMismatch(
            "measurement source is not a doubled carrier (dimension is not a square)".into(),
        )
    })?;
    let x = ObjectRef::new(p.morphism().source.backend, side);

    let image = rho.then(p.morphism())?;
    let coeffs = invert(&a.basis_matrix()?, tol)?.matmul(image.matrix()?)?;
    let mut weights = Vec::with_capacity(a.dim());
    for i in 0..coeffs.rows() {
        let v = coeffs.get(i, 0);
        if v.im.abs() > tol.eq_tol {
            return Err(Error::CertificateFailure(format!(
                "outcome weight {i} = {v} is not real"
            )));
        }
        weights.push(v.re);
    }

    // Independent evaluation: Tr(E_i ρ) with the extracted elements.
    let povm = extract_povm(p, x, a, tol)?;
    let rho_op = point_operator(rho, side)?;
    for (i, w) in weights.iter().enumerate() {
        let expected = povm.operator(i)?.matmul(&rho_op)?.trace();
        if (expected.re - w).abs() > tol.eq_tol * 10.0 || expected.im.abs() > tol.eq_tol {
            return Err(Error::CertificateFailure(format!(
                "outcome {i}: basis coefficient {w} disagrees with trace pairing {expected}"
            )));
        }
    }

    Distribution::new(weights, tol)
}

/// Push a distribution through a certified normalised preparation
/// `E : A → pants(X)`: the image of the mixture `Σ dᵢ·xᵢ`, re-verified as a
/// positive element of the endomorphism algebra with unit trace.
pub fn prepare(
    e: &CpStarMorphism,
    d: &Distribution,
    a: &StochObject,
    tol: Tolerance,
) -> Result<Morphism> {
    if d.weights().len() != a.points().len() {
        return Err(Error::ShapeMismatch(format!(
            "distribution has {} weights for {} outcomes",
            d.weights().len(),
            a.points().len()
        )));
    }
    let side = perfect_square_side(e.morphism().target.dim).ok_or_else(|| {
        Error::ShapeMismatch(
            "preparation target is not a doubled carrier (dimension is not a square)".into(),
        )
    })?;
    let x = ObjectRef::new(e.morphism().target.backend, side);
    let pants_alg = pants(x, tol)?;
    if !is_normalised(e.morphism(), a.algebra(), &pants_alg, tol)? {
        return Err(Error::NotNormalised(
            "preparation does not preserve the counit".into(),
        ));
    }

    let n = a.dim();
    let mut mixture = ComplexMatrix::zeros(n, 1);
    for (w, point) in d.weights().iter().zip(a.points()) {
        mixture = mixture.add(&point.matrix()?.scale(Complex64::new(*w, 0.0)))?;
    }
    let state = Morphism::point(mixture.entries()).then(e.morphism())?;

    let verdict = is_positive_element(&state, &pants_alg, tol)?;
    if !verdict.is_accept() {
        return Err(Error::CertificateFailure(format!(
            "prepared state is not a positive element: {}",
            verdict.diagnostic().map(|d| d.reason.clone()).unwrap_or_default()
        )));
    }
    let trace = state
        .then(pants_alg.counit())?
        .scalar_value()?;
    if (trace.re - 1.0).abs() > tol.eq_tol * 10.0 || trace.im.abs() > tol.eq_tol {
        return Err(Error::CertificateFailure(format!(
            "prepared state has trace {trace}, expected 1"
        )));
    }
    Ok(state)
}

/// Read a point of the doubled carrier as an operator on `X`:
/// entry `(a,b)` is coordinate `(a,b)` of the point.
pub fn point_operator(p: &Morphism, side: usize) -> Result<ComplexMatrix> {
    let coords = p.matrix()?;
    if coords.rows() != side * side || coords.cols() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "expected a point of dimension {}, got {}×{}",
            side * side,
            coords.rows(),
            coords.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(side, side, |a, b| {
        coords.get(composite(a, b, side), 0)
    }))
}

/// Write an operator on `X` as a point of the doubled carrier (the inverse
/// of [`point_operator`]).
pub fn operator_point(op: &ComplexMatrix) -> Result<Morphism> {
    if op.rows() != op.cols() {
        return Err(Error::ShapeMismatch(format!(
            "operator must be square, got {}×{}",
            op.rows(),
            op.cols()
        )));
    }
    let side = op.rows();
    let coords: Vec<Complex64> = (0..side * side)
        .map(|idx| op.get(idx / side, idx % side))
        .collect();
    Ok(Morphism::point(&coords))
}
