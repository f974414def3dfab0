//! Channel-shaped morphisms over a bare object, and the embedding of that
//! picture into the algebra picture.
//!
//! An object here is nothing but an object `X` of the backend; a morphism
//! `X → Y` is a map `X*⊗X → Y*⊗Y` that passes the same complete-positivity
//! test the algebra checkers use ([`check_cpm`]). Embedding sends `X` to its
//! endomorphism algebra `pants(X)` with normaliser, and leaves morphisms
//! untouched — so faithfulness is structural, and well-definedness is an
//! executable assertion: every certified channel must recertify between the
//! pants algebras ([`embed_morphism`]), and [`fullness_probe`] drives the
//! converse direction on random and exhaustive samples.
//!
//! The tensor product interleaves legs; [`monoidal_structure_map`] is the
//! index permutation `(X⊗Y)*⊗(X⊗Y) → (X*⊗X)⊗(Y*⊗Y)` realising it, certified
//! as a unitary *-homomorphism. Its associativity and unit coherences are
//! verified at sampled finite dimensions in the test suite (triple products
//! up to dimension 2 and unit legs on either side); the full coherence
//! family beyond those instances is not enumerated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backends::{Backend, Morphism, ObjectRef, Relation};
use crate::cpstar::{
    channel_positivity, check_cpstar, check_star_homomorphism, CpCertificate, CpCheck,
    CpStarMorphism, CpStarObject,
};
use crate::error::Error;
use crate::frobenius::{pants, product_algebra};
use crate::numeric::{composite, reshuffle_inv, split, Complex64, ComplexMatrix, Tolerance};
use crate::Result;

/// An object of the channel picture: a bare positive-dimensional object of
/// the backend. Its morphisms live on the doubled carrier `X*⊗X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CpmObject {
    base: ObjectRef,
}

impl CpmObject {
    pub fn new(base: ObjectRef) -> CpmObject {
        CpmObject { base }
    }

    /// The underlying object `X`.
    pub fn base(&self) -> ObjectRef {
        self.base
    }

    /// The doubled carrier `X*⊗X` morphisms act on.
    pub fn carrier(&self) -> ObjectRef {
        ObjectRef::new(self.base.backend, self.base.dim * self.base.dim)
    }

    /// Tensor of objects is the tensor of the bases.
    pub fn tensor(&self, other: &CpmObject) -> Result<CpmObject> {
        if self.base.backend != other.base.backend {
            return Err(Error::BackendMismatch(
                "cannot tensor objects from different backends".into(),
            ));
        }
        Ok(CpmObject::new(ObjectRef::new(
            self.base.backend,
            self.base.dim * other.base.dim,
        )))
    }
}

/// A certified channel-shaped morphism `X*⊗X → Y*⊗Y`.
#[derive(Debug, Clone)]
pub struct CpmMorphism {
    source: CpmObject,
    target: CpmObject,
    morphism: Morphism,
    certificate: CpCertificate,
}

impl CpmMorphism {
    /// Certify `h : X*⊗X → Y*⊗Y`; rejection is an error.
    pub fn new(h: Morphism, x: &CpmObject, y: &CpmObject, tol: Tolerance) -> Result<CpmMorphism> {
        match check_cpm(&h, x, y, tol)? {
            CpCheck::Accept(certificate) => Ok(CpmMorphism {
                source: *x,
                target: *y,
                morphism: h,
                certificate,
            }),
            CpCheck::Reject(d) => Err(Error::NotValidated(format!(
                "channel fails the complete-positivity check: {}",
                d.reason
            ))),
        }
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn source(&self) -> &CpmObject {
        &self.source
    }

    pub fn target(&self) -> &CpmObject {
        &self.target
    }

    pub fn certificate(&self) -> &CpCertificate {
        &self.certificate
    }
}

/// Decide complete positivity of `h : X*⊗X → Y*⊗Y` directly on the doubled
/// carriers: positive-semidefiniteness of the rearrangement with factor
/// recovery on FHilb, the two exhaustive closure conditions on Rel.
pub fn check_cpm(h: &Morphism, x: &CpmObject, y: &CpmObject, tol: Tolerance) -> Result<CpCheck> {
    if h.source != x.carrier() || h.target != y.carrier() {
        return Err(Error::ShapeMismatch(format!(
            "channel endpoints {}→{} do not match the doubled carriers {}→{}",
            h.source.dim,
            h.target.dim,
            x.carrier().dim,
            y.carrier().dim,
        )));
    }
    channel_positivity(h, x.base.dim, y.base.dim, tol)
}

/// Compose certified channels, recertifying the composite.
pub fn compose_cpm(g: &CpmMorphism, f: &CpmMorphism, tol: Tolerance) -> Result<CpmMorphism> {
    if f.target != g.source {
        return Err(Error::ShapeMismatch(
            "compose_cpm needs the middle objects to agree".into(),
        ));
    }
    let m = f.morphism.then(&g.morphism)?;
    CpmMorphism::new(m, &f.source, &g.target, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "composite of certified channels failed recertification: {e}"
        ))
    })
}

/// Dagger of a certified channel, recertified in the reverse direction.
pub fn dagger_cpm(f: &CpmMorphism, tol: Tolerance) -> Result<CpmMorphism> {
    CpmMorphism::new(f.morphism.dagger(), &f.target, &f.source, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "dagger of a certified channel failed recertification: {e}"
        ))
    })
}

/// Embed an object: the endomorphism algebra on `X` with its solved
/// normaliser.
pub fn embed_object(x: &CpmObject, tol: Tolerance) -> Result<CpStarObject> {
    CpStarObject::new(pants(x.base, tol)?, tol)
}

/// Embed a certified channel as a morphism between the embedded objects.
/// The underlying map is unchanged; the algebra-side checker re-runs and
/// must accept, so a rejection here means one of the two checkers is wrong.
pub fn embed_morphism(m: &CpmMorphism, tol: Tolerance) -> Result<CpStarMorphism> {
    let source = embed_object(&m.source, tol)?;
    let target = embed_object(&m.target, tol)?;
    CpStarMorphism::new(m.morphism.clone(), &source, &target, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "certified channel failed recertification between its endomorphism algebras: {e}"
        ))
    })
}

/// The raw leg-interleaving permutation `(X⊗Y)*⊗(X⊗Y) → (X*⊗X)⊗(Y*⊗Y)`:
/// the composite index `((i_x,i_y),(j_x,j_y))` goes to `((i_x,j_x),(i_y,j_y))`.
fn interleaving_permutation(x: usize, y: usize, backend: Backend) -> Result<Morphism> {
    let n = x * y;
    let dim = n * n;
    let out_of = |input: usize| -> usize {
        let (i, j) = split(input, n);
        let (ix, iy) = split(i, y);
        let (jx, jy) = split(j, y);
        composite(composite(ix, jx, x), composite(iy, jy, y), y * y)
    };
    match backend {
        Backend::FHilb => {
            let mut m = ComplexMatrix::zeros(dim, dim);
            for input in 0..dim {
                m.set(out_of(input), input, Complex64::new(1.0, 0.0));
            }
            Morphism::from_matrix(dim, dim, m)
        }
        Backend::Rel => {
            let pairs: Vec<_> = (0..dim).map(|input| (input, out_of(input))).collect();
            Ok(Morphism::from_relation(Relation::new(dim, dim, pairs)?))
        }
    }
}

/// The structure map of the tensor product, certified: the interleaving
/// permutation as a unitary *-homomorphism from the endomorphism algebra of
/// `X⊗Y` to the product of the endomorphism algebras of `X` and `Y`, wrapped
/// as a certified morphism between the embedded objects.
pub fn monoidal_structure_map(
    x: &CpmObject,
    y: &CpmObject,
    tol: Tolerance,
) -> Result<CpStarMorphism> {
    if x.base.backend != y.base.backend {
        return Err(Error::BackendMismatch(
            "structure map needs both objects in the same backend".into(),
        ));
    }
    let backend = x.base.backend;
    let phi = interleaving_permutation(x.base.dim, y.base.dim, backend)?;

    let joint = pants(ObjectRef::new(backend, x.base.dim * y.base.dim), tol)?;
    let factors = product_algebra(&pants(x.base, tol)?, &pants(y.base, tol)?, tol)?;

    let id = Morphism::identity(phi.source);
    if !phi.then(&phi.dagger())?.equal(&id, tol)
        || !phi.dagger().then(&phi)?.equal(&id, tol)
    {
        return Err(Error::CertificateFailure(
            "structure map is not unitary".into(),
        ));
    }
    let hom = check_star_homomorphism(&phi, &joint, &factors, tol)?;
    if !hom.holds() {
        return Err(Error::CertificateFailure(format!(
            "structure map fails the *-homomorphism check: {hom:?}"
        )));
    }

    let source = CpStarObject::new(joint, tol)?;
    let target = CpStarObject::new(factors, tol)?;
    CpStarMorphism::new(phi, &source, &target, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "unitary *-homomorphism failed the complete-positivity check: {e}"
        ))
    })
}

/// Tensor of certified channels: conjugate the plain tensor by the
/// interleaving permutations on both sides, recertify.
pub fn cpm_tensor(f: &CpmMorphism, g: &CpmMorphism, tol: Tolerance) -> Result<CpmMorphism> {
    let backend = f.source.base.backend;
    if backend != g.source.base.backend {
        return Err(Error::BackendMismatch(
            "cannot tensor channels from different backends".into(),
        ));
    }
    let source = f.source.tensor(&g.source)?;
    let target = f.target.tensor(&g.target)?;
    let phi_source = interleaving_permutation(f.source.base.dim, g.source.base.dim, backend)?;
    let phi_target = interleaving_permutation(f.target.base.dim, g.target.base.dim, backend)?;
    let h = phi_source
        .then(&f.morphism.tensor(&g.morphism)?)?
        .then(&phi_target.dagger())?;
    CpmMorphism::new(h, &source, &target, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "tensor of certified channels failed recertification: {e}"
        ))
    })
}

/// Side length of a perfect square. Embedded objects have carrier dimension
/// `dim(X)²`, so an algebra whose dimension returns `None` here — the
/// five-dimensional two-block algebra is the standard example — is not
/// isomorphic to any embedded object: the embedding is not essentially
/// surjective.
pub fn perfect_square_side(dim: usize) -> Option<usize> {
    let side = (dim as f64).sqrt().round() as usize;
    (side * side == dim).then_some(side)
}

/// Outcome of [`fullness_probe`]: counts of the samples driven through both
/// checkers and the first disagreement, if any.
#[derive(Debug, Clone)]
pub struct FullnessReport {
    /// Constructed-positive samples accepted by both checkers.
    pub constructed_accepted: usize,
    /// Unconstrained samples on which the two checkers agreed.
    pub raw_agreed: usize,
    /// Total samples driven through both checkers.
    pub samples: usize,
    /// First sample the checkers disagreed on, if any.
    pub first_disagreement: Option<String>,
}

impl FullnessReport {
    pub fn agree(&self) -> bool {
        self.first_disagreement.is_none()
    }
}

/// Drive the channel checker and the algebra checker against each other
/// between `pants(X)` and `pants(Y)`.
///
/// Per round, two samples: a channel constructed positive by design (FHilb:
/// un-rearranged Gram matrix; Rel: random relation closed under the two
/// positivity conditions), on which both checkers must accept; and an
/// unconstrained random map, on which they must agree either way. A
/// constructed sample failing its own construction is reported as an error,
/// not a disagreement.
pub fn fullness_probe(
    x: &CpmObject,
    y: &CpmObject,
    samples: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<FullnessReport> {
    let backend = x.base.backend;
    if backend != y.base.backend {
        return Err(Error::BackendMismatch(
            "fullness probe needs both objects in the same backend".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = pants(x.base, tol)?;
    let b = pants(y.base, tol)?;
    let (n, m) = (x.base.dim, y.base.dim);

    let mut constructed_accepted = 0;
    let mut raw_agreed = 0;
    let mut total = 0;
    let mut first_disagreement = None;

    for s in 0..samples {
        let constructed = match backend {
            Backend::FHilb => {
                let g = ComplexMatrix::from_fn(n * m, n * m, |_, _| {
                    Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
                });
                let choi = g.dagger().matmul(&g)?;
                Morphism::from_matrix(n * n, m * m, reshuffle_inv(&choi, (n, m))?)?
            }
            Backend::Rel => random_positive_closure(n, m, &mut rng)?,
        };
        let by_channel = check_cpm(&constructed, x, y, tol)?;
        if !by_channel.is_accept() {
            return Err(Error::CertificateFailure(format!(
                "constructed positive channel failed its own positivity check (sample {s})"
            )));
        }
        let by_algebra = check_cpstar(&constructed, &a, &b, tol)?;
        total += 1;
        if by_algebra.is_accept() {
            constructed_accepted += 1;
        } else if first_disagreement.is_none() {
            first_disagreement = Some(format!(
                "constructed positive channel {s} rejected by the algebra checker"
            ));
        }

        let raw = random_raw(n * n, m * m, backend, &mut rng)?;
        let v1 = check_cpm(&raw, x, y, tol)?.is_accept();
        let v2 = check_cpstar(&raw, &a, &b, tol)?.is_accept();
        total += 1;
        if v1 == v2 {
            raw_agreed += 1;
        } else if first_disagreement.is_none() {
            first_disagreement = Some(format!(
                "raw sample {s}: channel checker says {v1}, algebra checker says {v2}"
            ));
        }
    }

    Ok(FullnessReport {
        constructed_accepted,
        raw_agreed,
        samples: total,
        first_disagreement,
    })
}

/// Exhaustively compare the two checkers over every relation
/// `X*⊗X → Y*⊗Y` in Rel. Feasible only for tiny sets (the count is
/// `2^(x²y²)`); returns (relations checked, first disagreement).
pub fn rel_agreement_exhaustive(
    x: usize,
    y: usize,
    tol: Tolerance,
) -> Result<(usize, Option<String>)> {
    let (sn, tn) = (x * x, y * y);
    let cells = sn * tn;
    assert!(cells <= 20, "exhaustive sweep is bounded to 2^20 relations");
    let xo = CpmObject::new(ObjectRef::new(Backend::Rel, x));
    let yo = CpmObject::new(ObjectRef::new(Backend::Rel, y));
    let a = pants(xo.base, tol)?;
    let b = pants(yo.base, tol)?;
    let mut checked = 0;
    let mut first_disagreement = None;
    for mask in 0..(1usize << cells) {
        let pairs: Vec<(usize, usize)> = (0..cells)
            .filter(|c| mask & (1 << c) != 0)
            .map(|c| (c / tn, c % tn))
            .collect();
        let h = Morphism::from_relation(Relation::new(sn, tn, pairs)?);
        let v1 = check_cpm(&h, &xo, &yo, tol)?.is_accept();
        let v2 = check_cpstar(&h, &a, &b, tol)?.is_accept();
        checked += 1;
        if v1 != v2 && first_disagreement.is_none() {
            first_disagreement = Some(format!(
                "relation mask {mask}: channel checker says {v1}, algebra checker says {v2}"
            ));
        }
    }
    Ok((checked, first_disagreement))
}

/// A random relation closed under the two Rel positivity conditions: start
/// from a sparse random relation and saturate (adding the swapped pair and
/// the diagonal implication) until nothing new appears.
fn random_positive_closure(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Morphism> {
    let (sn, tn) = (n * n, m * m);
    let mut grid = vec![vec![false; tn]; sn];
    for row in grid.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.random::<f64>() < 0.25;
        }
    }
    loop {
        let mut changed = false;
        for src in 0..sn {
            for tgt in 0..tn {
                if !grid[src][tgt] {
                    continue;
                }
                let (ap, a) = split(src, n);
                let (bp, b) = split(tgt, m);
                let additions = [
                    (composite(a, ap, n), composite(b, bp, m)),
                    (composite(a, a, n), composite(b, b, m)),
                ];
                for (s2, t2) in additions {
                    if !grid[s2][t2] {
                        grid[s2][t2] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut pairs = Vec::new();
    for (src, row) in grid.iter().enumerate() {
        for (tgt, &on) in row.iter().enumerate() {
            if on {
                pairs.push((src, tgt));
            }
        }
    }
    Ok(Morphism::from_relation(Relation::new(sn, tn, pairs)?))
}

/// A random unconstrained morphism on the doubled carriers.
fn random_raw(sn: usize, tn: usize, backend: Backend, rng: &mut ChaCha8Rng) -> Result<Morphism> {
    match backend {
        Backend::FHilb => {
            let f = ComplexMatrix::from_fn(tn, sn, |_, _| {
                Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
            });
            Morphism::from_matrix(sn, tn, f)
        }
        Backend::Rel => {
            let mut pairs = Vec::new();
            for s in 0..sn {
                for t in 0..tn {
                    if rng.random::<f64>() < 0.3 {
                        pairs.push((s, t));
                    }
                }
            }
            Ok(Morphism::from_relation(Relation::new(sn, tn, pairs)?))
        }
    }
}
