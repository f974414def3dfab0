//! Concrete dagger compact categories.
//!
//! Two backends share one [`Morphism`] interface:
//!
//! * **FHilb** — finite-dimensional complex Hilbert spaces; a morphism
//!   `A → B` is a `dim(B) × dim(A)` complex matrix acting on column vectors.
//! * **Rel** — finite sets and relations; a morphism `A → B` is a set of
//!   pairs `(a, b)` with `a` a source element and `b` a target element.
//!
//! Objects are self-dual in both backends, so the dagger-compact structure
//! ([`cup`], [`cap`], [`swap`]) needs no explicit dual objects; an
//! [`ObjectRef`] is just a backend tag plus a dimension (set size for Rel).
//! Composite objects use the global index convention from [`crate::numeric`]:
//! the left tensor factor is most significant.
//!
//! The conjugation functor is entrywise complex conjugation on FHilb and the
//! identity on Rel (a relation has no scalar data to conjugate; with respect
//! to the fixed self-duality its matrix over the Booleans is its own
//! conjugate). Transpose — conjugation composed with dagger — is therefore
//! the converse relation on Rel.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::Error;
use crate::numeric::{composite, kron, Complex64, ComplexMatrix, Tolerance};
use crate::Result;

/// Which concrete category a morphism or object lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Finite-dimensional complex Hilbert spaces and linear maps.
    FHilb,
    /// Finite sets and relations.
    Rel,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::FHilb => write!(f, "fhilb"),
            Backend::Rel => write!(f, "rel"),
        }
    }
}

/// An object of one of the backends: a dimension (FHilb) or a set size (Rel).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ObjectRef {
    pub backend: Backend,
    pub dim: usize,
}

impl ObjectRef {
    /// Build an object. Dimension zero is rejected: both backends are used
    /// as positive-dimensional categories (the scalar `cap∘cup` on a carrier
    /// must be positive definite), so the empty object never appears.
    pub fn new(backend: Backend, dim: usize) -> Self {
        assert!(dim >= 1, "zero-dimensional objects are not representable");
        ObjectRef { backend, dim }
    }

    /// Fallible variant of [`ObjectRef::new`] for parse-time validation.
    pub fn checked(backend: Backend, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ShapeMismatch(
                "objects must have dimension ≥ 1 (positive-dimensionality)".into(),
            ));
        }
        Ok(ObjectRef { backend, dim })
    }

    /// The monoidal unit of the backend (dimension 1 / singleton set).
    pub fn unit(backend: Backend) -> Self {
        ObjectRef { backend, dim: 1 }
    }

    /// Tensor product of objects; backends must match.
    pub fn tensor(&self, other: &ObjectRef) -> Result<ObjectRef> {
        if self.backend != other.backend {
            return Err(Error::BackendMismatch(format!(
                "cannot tensor a {} object with a {} object",
                self.backend, other.backend
            )));
        }
        Ok(ObjectRef { backend: self.backend, dim: self.dim * other.dim })
    }

    /// The dual object. Objects are self-dual in both backends.
    pub fn dual(&self) -> ObjectRef {
        *self
    }
}

/// A finite relation between `{0..source_size}` and `{0..target_size}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub source_size: usize,
    pub target_size: usize,
    /// Sorted set of `(source element, target element)` pairs.
    pub pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new(
        source_size: usize,
        target_size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if source_size == 0 || target_size == 0 {
            return Err(Error::ShapeMismatch(
                "relations act on sets of size ≥ 1 (positive-dimensionality)".into(),
            ));
        }
        let pairs: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        for &(a, b) in &pairs {
            if a >= source_size || b >= target_size {
                return Err(Error::ShapeMismatch(format!(
                    "pair ({a}, {b}) out of range for a {source_size} → {target_size} relation"
                )));
            }
        }
        Ok(Relation { source_size, target_size, pairs })
    }

    pub fn identity(size: usize) -> Self {
        Relation {
            source_size: size,
            target_size: size,
            pairs: (0..size).map(|i| (i, i)).collect(),
        }
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    /// Relational composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Relation) -> Result<Relation> {
        if other.target_size != self.source_size {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose {} → {} after {} → {}",
                self.source_size, self.target_size, other.source_size, other.target_size
            )));
        }
        let mut pairs = BTreeSet::new();
        for &(a, b) in &other.pairs {
            for &(bp, c) in &self.pairs {
                if b == bp {
                    pairs.insert((a, c));
                }
            }
        }
        Ok(Relation { source_size: other.source_size, target_size: self.target_size, pairs })
    }

    /// Product relation on composite indices (left factor most significant).
    pub fn tensor(&self, other: &Relation) -> Relation {
        let mut pairs = BTreeSet::new();
        for &(a1, b1) in &self.pairs {
            for &(a2, b2) in &other.pairs {
                pairs.insert((
                    composite(a1, a2, other.source_size),
                    composite(b1, b2, other.target_size),
                ));
            }
        }
        Relation {
            source_size: self.source_size * other.source_size,
            target_size: self.target_size * other.target_size,
            pairs,
        }
    }

    /// Converse relation: swap every pair.
    pub fn converse(&self) -> Relation {
        Relation {
            source_size: self.target_size,
            target_size: self.source_size,
            pairs: self.pairs.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }

    /// View as a 0/1 matrix in the usual target × source orientation.
    pub fn to_complex_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.target_size, self.source_size, |b, a| {
            if self.pairs.contains(&(a, b)) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Read a relation back off a matrix: an entry is present when its
    /// modulus exceeds one half, so genuine 0/1 matrices round-trip exactly.
    pub fn from_boolean_matrix(m: &ComplexMatrix) -> Result<Relation> {
        let mut pairs = BTreeSet::new();
        for b in 0..m.rows() {
            for a in 0..m.cols() {
                if m.get(b, a).norm() > 0.5 {
                    pairs.insert((a, b));
                }
            }
        }
        Relation::new(m.cols(), m.rows(), pairs)
    }
}

/// The data of a morphism in one of the backends.
#[derive(Debug, Clone, PartialEq)]
pub enum MorphismPayload {
    Matrix(ComplexMatrix),
    Relation(Relation),
}

/// A morphism between [`ObjectRef`]s in a fixed backend.
#[derive(Debug, Clone, PartialEq)]
pub struct Morphism {
    pub source: ObjectRef,
    pub target: ObjectRef,
    payload: MorphismPayload,
}

impl Morphism {
    /// Wrap a `dim(target) × dim(source)` matrix as an FHilb morphism.
    pub fn from_matrix(source_dim: usize, target_dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != target_dim || matrix.cols() != source_dim {
            return Err(Error::ShapeMismatch(format!(
                "a {source_dim} → {target_dim} linear map needs a {target_dim}×{source_dim} matrix, got {}×{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Morphism {
            source: ObjectRef::new(Backend::FHilb, source_dim),
            target: ObjectRef::new(Backend::FHilb, target_dim),
            payload: MorphismPayload::Matrix(matrix),
        })
    }

    /// Wrap a relation as a Rel morphism.
    pub fn from_relation(relation: Relation) -> Self {
        Morphism {
            source: ObjectRef::new(Backend::Rel, relation.source_size),
            target: ObjectRef::new(Backend::Rel, relation.target_size),
            payload: MorphismPayload::Relation(relation),
        }
    }

    pub fn backend(&self) -> Backend {
        self.source.backend
    }

    pub fn payload(&self) -> &MorphismPayload {
        &self.payload
    }

    /// Borrow the matrix payload; errors on a Rel morphism.
    pub fn matrix(&self) -> Result<&ComplexMatrix> {
        match &self.payload {
            MorphismPayload::Matrix(m) => Ok(m),
            MorphismPayload::Relation(_) => Err(Error::BackendMismatch(
                "expected a linear map, found a relation".into(),
            )),
        }
    }

    /// Borrow the relation payload; errors on an FHilb morphism.
    pub fn relation(&self) -> Result<&Relation> {
        match &self.payload {
            MorphismPayload::Relation(r) => Ok(r),
            MorphismPayload::Matrix(_) => Err(Error::BackendMismatch(
                "expected a relation, found a linear map".into(),
            )),
        }
    }

    /// Identity morphism on an object.
    pub fn identity(obj: ObjectRef) -> Self {
        match obj.backend {
            Backend::FHilb => Morphism {
                source: obj,
                target: obj,
                payload: MorphismPayload::Matrix(ComplexMatrix::identity(obj.dim)),
            },
            Backend::Rel => Morphism {
                source: obj,
                target: obj,
                payload: MorphismPayload::Relation(Relation::identity(obj.dim)),
            },
        }
    }

    /// A scalar as an endo-morphism of the monoidal unit. For Rel, any scalar
    /// with modulus above `0.5` counts as `true` (pair present).
    pub fn scalar(backend: Backend, value: Complex64) -> Self {
        let unit = ObjectRef::unit(backend);
        match backend {
            Backend::FHilb => {
                let mut m = ComplexMatrix::zeros(1, 1);
                m.set(0, 0, value);
                Morphism { source: unit, target: unit, payload: MorphismPayload::Matrix(m) }
            }
            Backend::Rel => {
                let pairs: Vec<(usize, usize)> =
                    if value.norm() > 0.5 { vec![(0, 0)] } else { vec![] };
                Morphism {
                    source: unit,
                    target: unit,
                    payload: MorphismPayload::Relation(Relation::new(1, 1, pairs).unwrap()),
                }
            }
        }
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        if self.backend() != other.backend() {
            return Err(Error::BackendMismatch(format!(
                "cannot compose a {} morphism with a {} morphism",
                self.backend(),
                other.backend()
            )));
        }
        if self.source != other.target {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose: inner objects have dims {} and {}",
                self.source.dim, other.target.dim
            )));
        }
        let payload = match (&self.payload, &other.payload) {
            (MorphismPayload::Matrix(g), MorphismPayload::Matrix(f)) => {
                MorphismPayload::Matrix(g.matmul(f)?)
            }
            (MorphismPayload::Relation(g), MorphismPayload::Relation(f)) => {
                MorphismPayload::Relation(g.compose(f)?)
            }
            _ => unreachable!("backend tags agree but payloads differ"),
        };
        Ok(Morphism { source: other.source, target: self.target, payload })
    }

    /// Diagrammatic-order composition: `other ∘ self` (apply `self` first).
    pub fn then(&self, other: &Morphism) -> Result<Morphism> {
        other.compose(self)
    }

    /// A point `I → A` of an FHilb object from its coefficient vector.
    pub fn point(coeffs: &[Complex64]) -> Self {
        let n = coeffs.len();
        let mut m = ComplexMatrix::zeros(n, 1);
        for (i, &v) in coeffs.iter().enumerate() {
            m.set(i, 0, v);
        }
        Morphism::from_matrix(1, n, m).expect("n×1 point matrix")
    }

    /// A point `I → A` of a Rel object from the subset it relates `0` to.
    pub fn point_rel(size: usize, subset: impl IntoIterator<Item = usize>) -> Result<Self> {
        let pairs: Vec<(usize, usize)> = subset.into_iter().map(|s| (0, s)).collect();
        Ok(Morphism::from_relation(Relation::new(1, size, pairs)?))
    }

    /// Tensor product, left factor most significant in composite indices.
    pub fn tensor(&self, other: &Morphism) -> Result<Morphism> {
        if self.backend() != other.backend() {
            return Err(Error::BackendMismatch(format!(
                "cannot tensor a {} morphism with a {} morphism",
                self.backend(),
                other.backend()
            )));
        }
        let source = self.source.tensor(&other.source)?;
        let target = self.target.tensor(&other.target)?;
        let payload = match (&self.payload, &other.payload) {
            (MorphismPayload::Matrix(a), MorphismPayload::Matrix(b)) => {
                MorphismPayload::Matrix(kron(a, b))
            }
            (MorphismPayload::Relation(a), MorphismPayload::Relation(b)) => {
                MorphismPayload::Relation(a.tensor(b))
            }
            _ => unreachable!("backend tags agree but payloads differ"),
        };
        Ok(Morphism { source, target, payload })
    }

    /// Dagger: conjugate transpose on FHilb, converse on Rel.
    pub fn dagger(&self) -> Morphism {
        let payload = match &self.payload {
            MorphismPayload::Matrix(m) => MorphismPayload::Matrix(m.dagger()),
            MorphismPayload::Relation(r) => MorphismPayload::Relation(r.converse()),
        };
        Morphism { source: self.target, target: self.source, payload }
    }

    /// Conjugation functor `f ↦ f_*` from `A* → B*`: entrywise conjugation on
    /// FHilb, the identity on Rel. Since objects are self-dual, the result
    /// keeps the same source and target.
    pub fn conjugate(&self) -> Morphism {
        let payload = match &self.payload {
            MorphismPayload::Matrix(m) => MorphismPayload::Matrix(m.conjugate()),
            MorphismPayload::Relation(r) => MorphismPayload::Relation(r.clone()),
        };
        Morphism { source: self.source, target: self.target, payload }
    }

    /// Transpose `f ↦ f*` (dagger of the conjugate): plain matrix transpose on
    /// FHilb, converse on Rel.
    pub fn transpose(&self) -> Morphism {
        self.conjugate().dagger()
    }

    /// Equality up to `tol.eq_tol` (exact set equality on Rel).
    pub fn equal(&self, other: &Morphism, tol: Tolerance) -> bool {
        if self.backend() != other.backend()
            || self.source != other.source
            || self.target != other.target
        {
            return false;
        }
        match (&self.payload, &other.payload) {
            (MorphismPayload::Matrix(a), MorphismPayload::Matrix(b)) => a.approx_eq(b, tol.eq_tol),
            (MorphismPayload::Relation(a), MorphismPayload::Relation(b)) => a == b,
            _ => false,
        }
    }

    /// Extract the scalar value of a morphism on the monoidal unit.
    pub fn scalar_value(&self) -> Result<Complex64> {
        if self.source.dim != 1 || self.target.dim != 1 {
            return Err(Error::ShapeMismatch(format!(
                "scalar extraction needs a 1 → 1 morphism, got {} → {}",
                self.source.dim, self.target.dim
            )));
        }
        match &self.payload {
            MorphismPayload::Matrix(m) => Ok(m.get(0, 0)),
            MorphismPayload::Relation(r) => Ok(if r.contains(0, 0) {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }),
        }
    }
}

/// The cup `I → A* ⊗ A` of the fixed self-duality: the composite basis state
/// `Σ_i (i, i)` — a `dim² × 1` matrix with ones on diagonal pairs, or the
/// relation `{(0, (i, i))}`.
pub fn cup(obj: ObjectRef) -> Morphism {
    let n = obj.dim;
    match obj.backend {
        Backend::FHilb => {
            let mut m = ComplexMatrix::zeros(n * n, 1);
            for i in 0..n {
                m.set(composite(i, i, n), 0, Complex64::new(1.0, 0.0));
            }
            Morphism {
                source: ObjectRef::unit(obj.backend),
                target: obj.dual().tensor(&obj).expect("same backend"),
                payload: MorphismPayload::Matrix(m),
            }
        }
        Backend::Rel => {
            let pairs = (0..n).map(|i| (0, composite(i, i, n)));
            Morphism {
                source: ObjectRef::unit(obj.backend),
                target: obj.dual().tensor(&obj).expect("same backend"),
                payload: MorphismPayload::Relation(Relation::new(1, n * n, pairs).unwrap()),
            }
        }
    }
}

/// The cap `A* ⊗ A → I`: dagger of [`cup`].
pub fn cap(obj: ObjectRef) -> Morphism {
    cup(obj).dagger()
}

/// The symmetry `A ⊗ B → B ⊗ A` on composite indices.
pub fn swap(a: ObjectRef, b: ObjectRef) -> Result<Morphism> {
    if a.backend != b.backend {
        return Err(Error::BackendMismatch(format!(
            "cannot swap a {} object with a {} object",
            a.backend, b.backend
        )));
    }
    let source = a.tensor(&b)?;
    let target = b.tensor(&a)?;
    match a.backend {
        Backend::FHilb => {
            let mut m = ComplexMatrix::zeros(target.dim, source.dim);
            for i in 0..a.dim {
                for j in 0..b.dim {
                    m.set(composite(j, i, a.dim), composite(i, j, b.dim), Complex64::new(1.0, 0.0));
                }
            }
            Ok(Morphism { source, target, payload: MorphismPayload::Matrix(m) })
        }
        Backend::Rel => {
            let mut pairs = BTreeSet::new();
            for i in 0..a.dim {
                for j in 0..b.dim {
                    pairs.insert((composite(i, j, b.dim), composite(j, i, a.dim)));
                }
            }
            Ok(Morphism {
                source,
                target,
                payload: MorphismPayload::Relation(Relation {
                    source_size: source.dim,
                    target_size: target.dim,
                    pairs,
                }),
            })
        }
    }
}

/// Inner product `⟨x, y⟩ = x† ∘ y` of two points `I → A`, antilinear in `x`.
pub fn inner(x: &Morphism, y: &Morphism) -> Result<Complex64> {
    x.dagger().compose(y)?.scalar_value()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn relational_composition_chains_through_the_middle_set() {
        // f: 2 → 2 sends 1 ↦ 0; g sends 0 ↦ 1; g∘f sends 1 ↦ 1.
        let f = Relation::new(2, 2, [(1, 0)]).unwrap();
        let g = Relation::new(2, 2, [(0, 1)]).unwrap();
        let gf = g.compose(&f).unwrap();
        assert_eq!(gf, Relation::new(2, 2, [(1, 1)]).unwrap());
    }

    #[test]
    fn relation_tensor_uses_left_most_significant_indices() {
        let f = Relation::new(2, 2, [(0, 1)]).unwrap();
        let g = Relation::new(3, 3, [(2, 0)]).unwrap();
        let fg = f.tensor(&g);
        // (0,2) ↦ (1,0): composite 0·3+2 = 2 ↦ 1·3+0 = 3.
        assert_eq!(fg, Relation::new(6, 6, [(2, 3)]).unwrap());
    }

    #[test]
    fn dagger_is_converse_on_rel_and_adjoint_on_fhilb() {
        let r = Morphism::from_relation(Relation::new(2, 3, [(0, 2), (1, 0)]).unwrap());
        let rd = r.dagger();
        assert_eq!(*rd.relation().unwrap(), Relation::new(3, 2, [(2, 0), (0, 1)]).unwrap());

        let m = Morphism::from_matrix(
            2,
            2,
            ComplexMatrix::from_vec(
                2,
                2,
                vec![
                    Complex64::new(1.0, 2.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(3.0, 0.0),
                    Complex64::new(0.0, -1.0),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        let md = m.dagger();
        assert_eq!(md.matrix().unwrap().get(0, 1), Complex64::new(3.0, 0.0));
        assert_eq!(md.matrix().unwrap().get(1, 0), Complex64::new(0.0, 0.0));
        assert_eq!(md.matrix().unwrap().get(0, 0), Complex64::new(1.0, -2.0));
    }

    #[test]
    fn conjugation_is_identity_on_rel_so_transpose_is_converse() {
        let r = Morphism::from_relation(Relation::new(2, 2, [(0, 1)]).unwrap());
        assert!(r.conjugate().equal(&r, Tolerance::default()));
        assert_eq!(*r.transpose().relation().unwrap(), Relation::new(2, 2, [(1, 0)]).unwrap());
    }

    #[test]
    fn cap_after_cup_is_the_dimension_scalar() {
        for backend in [Backend::FHilb, Backend::Rel] {
            let a = ObjectRef::new(backend, 3);
            let loop_scalar = cap(a).compose(&cup(a)).unwrap();
            let v = loop_scalar.scalar_value().unwrap();
            match backend {
                Backend::FHilb => assert_eq!(v, Complex64::new(3.0, 0.0)),
                Backend::Rel => assert_eq!(v, one()),
            }
        }
    }

    #[test]
    fn snake_identity_holds_in_both_backends() {
        // (cap ⊗ id) ∘ (id ⊗ cup) = id with self-dual objects.
        for backend in [Backend::FHilb, Backend::Rel] {
            let a = ObjectRef::new(backend, 3);
            let id = Morphism::identity(a);
            let bend_up = id.tensor(&cup(a)).unwrap();
            let bend_down = cap(a).tensor(&id).unwrap();
            let snake = bend_down.compose(&bend_up).unwrap();
            assert!(snake.equal(&id, Tolerance::default()), "snake failed on {backend}");
        }
    }

    #[test]
    fn swap_is_an_involution_and_acts_on_composite_indices() {
        for backend in [Backend::FHilb, Backend::Rel] {
            let a = ObjectRef::new(backend, 2);
            let b = ObjectRef::new(backend, 3);
            let s = swap(a, b).unwrap();
            let s_back = swap(b, a).unwrap();
            let round = s_back.compose(&s).unwrap();
            assert!(round.equal(&Morphism::identity(a.tensor(&b).unwrap()), Tolerance::default()));
        }
        // Frozen index check on FHilb: (i,j) = (1,2) over 2⊗3 ↦ (2,1) over 3⊗2.
        let s = swap(ObjectRef::new(Backend::FHilb, 2), ObjectRef::new(Backend::FHilb, 3)).unwrap();
        assert_eq!(s.matrix().unwrap().get(2 * 2 + 1, 1 * 3 + 2), one());
    }

    #[test]
    fn composing_across_backends_is_rejected() {
        let f = Morphism::identity(ObjectRef::new(Backend::FHilb, 2));
        let g = Morphism::identity(ObjectRef::new(Backend::Rel, 2));
        assert!(matches!(g.compose(&f), Err(Error::BackendMismatch(_))));
        assert!(matches!(g.tensor(&f), Err(Error::BackendMismatch(_))));
    }

    #[test]
    fn equality_respects_the_equality_tolerance() {
        let id = Morphism::identity(ObjectRef::new(Backend::FHilb, 2));
        let mut nearly = ComplexMatrix::identity(2);
        nearly.set(0, 0, Complex64::new(1.0 + 1e-12, 0.0));
        let close = Morphism::from_matrix(2, 2, nearly).unwrap();
        assert!(id.equal(&close, Tolerance::default()));
        assert!(!id.equal(&close, Tolerance::new(1e-13, 1e-13).unwrap()));
    }
}
