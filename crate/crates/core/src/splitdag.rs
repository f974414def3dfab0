//! Idempotent splitting over the channel picture, and the canonical functor
//! into it from the algebra picture.
//!
//! Objects are dagger idempotents: certified channels `p` with
//! `p∘p = p = p†` ([`DaggerIdempotent`]); morphisms are channels absorbed by
//! their endpoint idempotents, `f = q∘f∘p` ([`SplitMorphism`]). Every
//! algebra-with-normaliser yields such an idempotent
//! ([`functor_f_object`], the representation sandwiched between normaliser
//! legs), and every certified algebra morphism a split morphism
//! ([`functor_f_morphism`]). On endomorphism algebras this functor is
//! naturally isomorphic to the evident inclusion of the channel picture;
//! [`fl_vs_inclusion_probe`] drives that square numerically and reports the
//! witnessing isometries.
//!
//! Scalar roots of central elements — needed to move normaliser factors
//! around — are taken blockwise through the factor decomposition in the
//! matrix backend ([`central_sqrt`]); the relational backend searches
//! exhaustively at small sizes and reports `NoSquareRoot` honestly when the
//! search is exhausted or out of range.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backends::{Backend, Morphism, Relation};
use crate::classify::wedderburn;
use crate::cpm::{check_cpm, CpmObject};
use crate::cpstar::{CpCertificate, CpCheck, CpStarMorphism, CpStarObject};
use crate::error::Error;
use crate::frobenius::{pants, FrobeniusAlgebra};
use crate::numeric::{invert, reshuffle_inv, Complex64, ComplexMatrix, Tolerance};
use crate::Result;

/// Size cap for the exhaustive relational square-root search: relations on
/// a carrier of size `n` form a space of `2^(n²)` candidates.
const REL_SQRT_LIMIT: usize = 4;

/// A certified channel `p : X*⊗X → X*⊗X` with `p∘p = p = p†`.
#[derive(Debug, Clone)]
pub struct DaggerIdempotent {
    base: CpmObject,
    p: Morphism,
    certificate: CpCertificate,
}

impl DaggerIdempotent {
    /// Verify idempotence, self-adjointness, and complete positivity.
    pub fn new(p: Morphism, base: CpmObject, tol: Tolerance) -> Result<DaggerIdempotent> {
        if p.source != base.carrier() || p.target != base.carrier() {
            return Err(Error::ShapeMismatch(format!(
                "idempotent endpoints {}→{} do not match the doubled carrier {}",
                p.source.dim,
                p.target.dim,
                base.carrier().dim
            )));
        }
        if !p.then(&p)?.equal(&p, tol) {
            return Err(Error::NotValidated("p∘p ≠ p".into()));
        }
        if !p.dagger().equal(&p, tol) {
            return Err(Error::NotValidated("p ≠ p†".into()));
        }
        match check_cpm(&p, &base, &base, tol)? {
            CpCheck::Accept(certificate) => Ok(DaggerIdempotent {
                base,
                p,
                certificate,
            }),
            CpCheck::Reject(d) => Err(Error::NotValidated(format!(
                "idempotent fails the complete-positivity check: {}",
                d.reason
            ))),
        }
    }

    /// The object of the channel picture the idempotent lives on.
    pub fn base(&self) -> &CpmObject {
        &self.base
    }

    pub fn morphism(&self) -> &Morphism {
        &self.p
    }

    pub fn certificate(&self) -> &CpCertificate {
        &self.certificate
    }

    /// Rank of the idempotent (matrix backend): eigenvalues are exactly 0
    /// and 1, so the rank is the rounded trace.
    pub fn rank(&self) -> Result<usize> {
        let t = self.p.matrix()?.trace();
        Ok(t.re.round() as usize)
    }
}

/// A channel absorbed by its endpoint idempotents: `f = q∘f∘p`.
#[derive(Debug, Clone)]
pub struct SplitMorphism {
    source: DaggerIdempotent,
    target: DaggerIdempotent,
    morphism: Morphism,
    certificate: CpCertificate,
}

impl SplitMorphism {
    /// Verify membership and complete positivity, then wrap.
    pub fn new(
        f: Morphism,
        source: DaggerIdempotent,
        target: DaggerIdempotent,
        tol: Tolerance,
    ) -> Result<SplitMorphism> {
        if !split_membership(&f, &source, &target, tol)? {
            return Err(Error::MembershipFailure(
                "morphism is not absorbed by its endpoint idempotents: q∘f∘p ≠ f".into(),
            ));
        }
        match check_cpm(&f, &source.base, &target.base, tol)? {
            CpCheck::Accept(certificate) => Ok(SplitMorphism {
                source,
                target,
                morphism: f,
                certificate,
            }),
            CpCheck::Reject(d) => Err(Error::NotValidated(format!(
                "split morphism fails the complete-positivity check: {}",
                d.reason
            ))),
        }
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn source(&self) -> &DaggerIdempotent {
        &self.source
    }

    pub fn target(&self) -> &DaggerIdempotent {
        &self.target
    }

    pub fn certificate(&self) -> &CpCertificate {
        &self.certificate
    }
}

/// Whether `f` is absorbed by the idempotents: `q∘f∘p = f` within
/// tolerance.
pub fn split_membership(
    f: &Morphism,
    p: &DaggerIdempotent,
    q: &DaggerIdempotent,
    tol: Tolerance,
) -> Result<bool> {
    if f.source != p.base.carrier() || f.target != q.base.carrier() {
        return Err(Error::ShapeMismatch(format!(
            "morphism endpoints {}→{} do not match the idempotent carriers {}→{}",
            f.source.dim,
            f.target.dim,
            p.base.carrier().dim,
            q.base.carrier().dim
        )));
    }
    Ok(p.p.then(f)?.then(&q.p)?.equal(f, tol))
}

/// Compose split morphisms; membership of the composite is re-verified
/// (`MembershipFailure` would indicate a broken idempotent) and the
/// complete-positivity certificate recomputed.
pub fn compose_split(g: &SplitMorphism, f: &SplitMorphism, tol: Tolerance) -> Result<SplitMorphism> {
    if !f.target.p.equal(&g.source.p, tol) {
        return Err(Error::ShapeMismatch(
            "compose_split needs the middle idempotents to agree".into(),
        ));
    }
    let m = f.morphism.then(&g.morphism)?;
    SplitMorphism::new(m, f.source.clone(), g.target.clone(), tol)
}

/// Square root of a central positive-definite element: given the
/// multiplication operator `c = L_γ` of a central `γ`, return `g = L_δ`
/// with `g∘g = c` and `δ` central.
///
/// Matrix backend: `γ` is resolved against the primitive central
/// idempotents and rooted blockwise; a block weight that is not a strictly
/// positive real is `NoSquareRoot`. Relational backend: exhaustive search
/// over relations on the carrier (bounded; the identity case short-circuits),
/// requiring the root to be self-adjoint and central as well.
pub fn central_sqrt(alg: &FrobeniusAlgebra, c: &Morphism, tol: Tolerance) -> Result<Morphism> {
    let n = alg.dim();
    if c.source != alg.carrier() || c.target != alg.carrier() {
        return Err(Error::ShapeMismatch(
            "central_sqrt expects an endomorphism of the carrier".into(),
        ));
    }
    match alg.backend() {
        Backend::FHilb => {
            // Recover the point γ = c(η) and confirm c is its multiplication
            // operator.
            let gamma = alg.unit().then(c)?;
            let l_gamma = alg.left_mult_matrix(gamma.matrix()?)?;
            if !l_gamma.approx_eq(c.matrix()?, tol.eq_tol * l_gamma.norm_inf().max(1.0)) {
                return Err(Error::NotValidated(
                    "central_sqrt needs a multiplication operator L_γ".into(),
                ));
            }

            let dec = wedderburn(alg, tol)?;
            let k = dec.factor_dims().len();
            let mut basis = ComplexMatrix::zeros(n, k);
            for (j, idem) in dec.central_idempotents().iter().enumerate() {
                let coords = idem.matrix()?;
                for i in 0..n {
                    basis.set(i, j, coords.get(i, 0));
                }
            }
            // Solve basis·w = γ by the normal equations; a nonzero residual
            // means γ is outside the centre.
            let gram = basis.dagger().matmul(&basis)?;
            let rhs = basis.dagger().matmul(gamma.matrix()?)?;
            let weights = invert(&gram, tol)?.matmul(&rhs)?;
            let residual = basis.matmul(&weights)?.sub(gamma.matrix()?)?.norm_inf();
            if residual > tol.eq_tol * 10.0 {
                return Err(Error::NotValidated(format!(
                    "element is not central: residual {residual:.3e} against the centre basis"
                )));
            }

            let mut root_point = ComplexMatrix::zeros(n, 1);
            for (j, idem) in dec.central_idempotents().iter().enumerate() {
                let w = weights.get(j, 0);
                if w.im.abs() > tol.eq_tol || w.re <= tol.eq_tol {
                    return Err(Error::NoSquareRoot(format!(
                        "block {j} has weight {w}; a strictly positive real is required"
                    )));
                }
                let scale = Complex64::new(w.re.sqrt(), 0.0);
                root_point = root_point.add(&idem.matrix()?.scale(scale))?;
            }
            let g = Morphism::from_matrix(n, n, alg.left_mult_matrix(&root_point)?)?;
            if !g.then(&g)?.equal(c, tol) {
                return Err(Error::CertificateFailure(
                    "blockwise root fails g∘g = c".into(),
                ));
            }
            Ok(g)
        }
        Backend::Rel => {
            let id = Morphism::identity(alg.carrier());
            if c.equal(&id, tol) {
                return Ok(id);
            }
            if n > REL_SQRT_LIMIT {
                return Err(Error::NoSquareRoot(format!(
                    "relational root search is bounded to carriers of size ≤ {REL_SQRT_LIMIT}, got {n}"
                )));
            }
            let cells = n * n;
            for mask in 0..(1u64 << cells) {
                let pairs: Vec<(usize, usize)> = (0..cells)
                    .filter(|cell| mask >> cell & 1 == 1)
                    .map(|cell| (cell / n, cell % n))
                    .collect();
                let g = Morphism::from_relation(Relation::new(n, n, pairs)?);
                if g.then(&g)?.equal(c, tol)
                    && g.dagger().equal(&g, tol)
                    && commutes_with_mult(alg, &g)?
                {
                    return Ok(g);
                }
            }
            Err(Error::NoSquareRoot(
                "exhaustive relational search found no self-adjoint central root".into(),
            ))
        }
    }
}

/// Whether an endomorphism slides through the multiplication on either leg:
/// `g∘∇ = ∇∘(g⊗id) = ∇∘(id⊗g)`.
fn commutes_with_mult(alg: &FrobeniusAlgebra, g: &Morphism) -> Result<bool> {
    let id = Morphism::identity(alg.carrier());
    let after = alg.mult().then(g)?;
    let left = g.tensor(&id)?.then(alg.mult())?;
    let right = id.tensor(g)?.then(alg.mult())?;
    let tol = Tolerance::default();
    Ok(after.equal(&left, tol) && after.equal(&right, tol))
}

/// The idempotent attached to an algebra-with-normaliser: the carrier's
/// representation composed with its dagger, sandwiched between the
/// normaliser's conjugate and the normaliser,
/// `p = action ∘ coaction ∘ (z̄ ⊗ z)`.
///
/// The equal central form `action ∘ z∘z ∘ coaction` (the normaliser slides
/// through the representation) is computed too and the two must agree; both
/// idempotence and self-adjointness are verified, and the result is
/// certified completely positive.
pub fn functor_f_object(a: &CpStarObject, tol: Tolerance) -> Result<DaggerIdempotent> {
    let alg = a.algebra();
    let z = a.normaliser();
    let action = alg.action()?;
    let coaction = alg.coaction()?;

    let sandwich = z.conjugate().tensor(z)?;
    let p = sandwich.then(&coaction)?.then(&action)?;

    let central_form = coaction.then(z)?.then(z)?.then(&action)?;
    if !p.equal(&central_form, tol) {
        return Err(Error::CertificateFailure(
            "the normaliser does not slide through the representation: the two idempotent forms disagree".into(),
        ));
    }

    let base = CpmObject::new(alg.carrier());
    DaggerIdempotent::new(p, base, tol).map_err(|e| {
        Error::CertificateFailure(format!("attached idempotent failed verification: {e}"))
    })
}

/// The action of the functor on a certified morphism:
/// `F(f) = action ∘ z_B ∘ f ∘ z_A ∘ coaction`, verified to be absorbed by
/// the attached idempotents and certified completely positive.
pub fn functor_f_morphism(f: &CpStarMorphism, tol: Tolerance) -> Result<SplitMorphism> {
    let source = functor_f_object(f.source(), tol)?;
    let target = functor_f_object(f.target(), tol)?;
    let a = f.source().algebra();
    let b = f.target().algebra();
    let m = a
        .coaction()?
        .then(f.source().normaliser())?
        .then(f.morphism())?
        .then(f.target().normaliser())?
        .then(&b.action()?)?;
    SplitMorphism::new(m, source, target, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "functor image of a certified morphism failed verification: {e}"
        ))
    })
}

/// The transport pair of an object: the isometry `u = action ∘ z` into the
/// doubled carrier and its retraction `v = z ∘ coaction`, with `v∘u = id`
/// and `u∘v` the attached idempotent.
pub fn transport_pair(a: &CpStarObject, tol: Tolerance) -> Result<(Morphism, Morphism)> {
    let alg = a.algebra();
    let z = a.normaliser();
    let u = z.then(&alg.action()?)?;
    let v = alg.coaction()?.then(z)?;
    let id = Morphism::identity(alg.carrier());
    if !u.then(&v)?.equal(&id, tol) {
        return Err(Error::CertificateFailure(
            "transport pair fails v∘u = id".into(),
        ));
    }
    Ok((u, v))
}

/// Recover the algebra-level morphism from a doubled-carrier channel:
/// `f = v_B ∘ h ∘ u_A`. For `h = F(f)` this inverts the functor exactly;
/// combined with membership and complete positivity of `h` it realises the
/// equivalence between the two pictures, which the tests drive both ways.
pub fn compress_split(
    h: &Morphism,
    a: &CpStarObject,
    b: &CpStarObject,
    tol: Tolerance,
) -> Result<Morphism> {
    let (u_a, _) = transport_pair(a, tol)?;
    let (_, v_b) = transport_pair(b, tol)?;
    u_a.then(h)?.then(&v_b)
}

/// Report of [`fl_vs_inclusion_probe`].
#[derive(Debug, Clone)]
pub struct FlProbeReport {
    /// The isometry witnessing the isomorphism at the source object.
    pub witness_source: Morphism,
    /// The isometry witnessing the isomorphism at the target object.
    pub witness_target: Morphism,
    /// Samples on which the naturality square commuted.
    pub commuted: usize,
    /// Total samples driven.
    pub samples: usize,
    /// Largest deviation of the two sides of the square.
    pub max_deviation: f64,
    /// First sample that failed to commute, if any.
    pub first_failure: Option<String>,
}

impl FlProbeReport {
    pub fn commutes(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Compare the functor applied to embedded channels against the canonical
/// inclusion of the channel picture, on endomorphism algebras.
///
/// The isomorphism witnesses are the transport isometries `u = action∘z`;
/// the probe verifies `v∘u = id` and `u∘v = p` at both endpoints, then
/// drives random completely positive channels `h : X*⊗X → Y*⊗Y` through the
/// naturality square `F(h)∘u_X = u_Y∘h`.
pub fn fl_vs_inclusion_probe(
    x: &CpmObject,
    y: &CpmObject,
    samples: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<FlProbeReport> {
    if x.base().backend != Backend::FHilb || y.base().backend != Backend::FHilb {
        return Err(Error::BackendMismatch(
            "the inclusion probe drives matrix-backend channels".into(),
        ));
    }
    let a = CpStarObject::new(pants(x.base(), tol)?, tol)?;
    let b = CpStarObject::new(pants(y.base(), tol)?, tol)?;
    let (u_x, v_x) = transport_pair(&a, tol)?;
    let (u_y, _) = transport_pair(&b, tol)?;

    let p_x = functor_f_object(&a, tol)?;
    if !v_x.then(&u_x)?.equal(p_x.morphism(), tol) {
        return Err(Error::CertificateFailure(
            "transport pair fails u∘v = p at the source".into(),
        ));
    }

    let (n, m) = (x.base().dim, y.base().dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_deviation: f64 = 0.0;
    let mut commuted = 0;
    let mut first_failure = None;

    for s in 0..samples {
        let g = ComplexMatrix::from_fn(n * m, n * m, |_, _| {
            Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
        });
        let choi = g.dagger().matmul(&g)?;
        let h = Morphism::from_matrix(n * n, m * m, reshuffle_inv(&choi, (n, m))?)?;

        let certified = CpStarMorphism::new(h.clone(), &a, &b, tol).map_err(|e| {
            Error::CertificateFailure(format!(
                "constructed positive channel failed certification (sample {s}): {e}"
            ))
        })?;
        let through_functor = functor_f_morphism(&certified, tol)?;

        let lhs = u_x.then(through_functor.morphism())?;
        let rhs = h.then(&u_y)?;
        let deviation = lhs.matrix()?.sub(rhs.matrix()?)?.norm_inf();
        max_deviation = max_deviation.max(deviation);
        if deviation <= tol.eq_tol {
            commuted += 1;
        } else if first_failure.is_none() {
            first_failure = Some(format!(
                "sample {s}: naturality square deviates by {deviation:.3e}"
            ));
        }
    }

    Ok(FlProbeReport {
        witness_source: u_x,
        witness_target: u_y,
        commuted,
        samples,
        max_deviation,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::ObjectRef;
    use crate::corpus;
    use crate::cpstar::check_cpstar;
    use crate::frobenius::diagonal_algebra;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn object(alg: FrobeniusAlgebra) -> CpStarObject {
        CpStarObject::new(alg, tol()).unwrap()
    }

    fn scaled_identity(n: usize, s: f64) -> Morphism {
        Morphism::from_matrix(
            n,
            n,
            ComplexMatrix::identity(n).scale(Complex64::new(s, 0.0)),
        )
        .unwrap()
    }

    #[test]
    fn scalar_root_on_the_endomorphism_algebra() {
        let alg = corpus::pants_fhilb(2, tol()).unwrap();
        let c = scaled_identity(4, 0.5);
        let g = central_sqrt(&alg, &c, tol()).unwrap();
        let expected = scaled_identity(4, 0.5f64.sqrt());
        assert!(g.equal(&expected, tol()));
    }

    #[test]
    fn blockwise_root_on_the_two_block_algebra() {
        let alg = corpus::c_plus_m2(tol()).unwrap();
        let dec = wedderburn(&alg, tol()).unwrap();
        // c = L_γ with γ = 1·(first idempotent) + 1/2·(second idempotent).
        let gamma = dec.central_idempotents()[0]
            .matrix()
            .unwrap()
            .add(
                &dec.central_idempotents()[1]
                    .matrix()
                    .unwrap()
                    .scale(Complex64::new(0.5, 0.0)),
            )
            .unwrap();
        let c = Morphism::from_matrix(5, 5, alg.left_mult_matrix(&gamma).unwrap()).unwrap();
        let g = central_sqrt(&alg, &c, tol()).unwrap();
        assert!(g.then(&g).unwrap().equal(&c, tol()));

        let expected_gamma = dec.central_idempotents()[0]
            .matrix()
            .unwrap()
            .add(
                &dec.central_idempotents()[1]
                    .matrix()
                    .unwrap()
                    .scale(Complex64::new(0.5f64.sqrt(), 0.0)),
            )
            .unwrap();
        let expected =
            Morphism::from_matrix(5, 5, alg.left_mult_matrix(&expected_gamma).unwrap()).unwrap();
        assert!(g.equal(&expected, tol()));
    }

    #[test]
    fn non_positive_blocks_have_no_root() {
        let alg = diagonal_algebra(2, tol()).unwrap();
        let mut m = ComplexMatrix::zeros(2, 2);
        m.set(0, 0, Complex64::new(1.0, 0.0));
        m.set(1, 1, Complex64::new(-0.25, 0.0));
        let c = Morphism::from_matrix(2, 2, m).unwrap();
        assert!(matches!(
            central_sqrt(&alg, &c, tol()).unwrap_err(),
            Error::NoSquareRoot(_)
        ));
    }

    #[test]
    fn relational_identity_root_is_the_identity() {
        let algs = corpus::standard_algebras(tol()).unwrap();
        let (_, z2) = algs
            .iter()
            .find(|(name, _)| name == "rel_z2")
            .expect("relational two-element group algebra in the corpus");
        let id = Morphism::identity(z2.carrier());
        let g = central_sqrt(z2, &id, tol()).unwrap();
        assert!(g.equal(&id, tol()));
    }

    #[test]
    fn relational_swap_has_no_root() {
        let algs = corpus::standard_algebras(tol()).unwrap();
        let (_, z2) = algs.iter().find(|(name, _)| name == "rel_z2").unwrap();
        let swap = Morphism::from_relation(Relation::new(2, 2, [(0, 1), (1, 0)]).unwrap());
        assert!(matches!(
            central_sqrt(z2, &swap, tol()).unwrap_err(),
            Error::NoSquareRoot(_)
        ));
    }

    #[test]
    fn special_algebras_get_the_plain_representation_idempotent() {
        let a = object(diagonal_algebra(2, tol()).unwrap());
        let idem = functor_f_object(&a, tol()).unwrap();
        let alg = a.algebra();
        let expected = alg
            .coaction()
            .unwrap()
            .then(&alg.action().unwrap())
            .unwrap();
        assert!(idem.morphism().equal(&expected, tol()));
        assert_eq!(idem.rank().unwrap(), 2);
    }

    #[test]
    fn idempotent_ranks_match_the_algebra_dimensions() {
        let pants2 = object(corpus::pants_fhilb(2, tol()).unwrap());
        let idem = functor_f_object(&pants2, tol()).unwrap();
        assert_eq!(idem.morphism().source.dim, 16);
        assert_eq!(idem.rank().unwrap(), 4);

        let five = object(corpus::c_plus_m2(tol()).unwrap());
        let idem = functor_f_object(&five, tol()).unwrap();
        assert_eq!(idem.morphism().source.dim, 25);
        assert_eq!(idem.rank().unwrap(), 5);
    }

    #[test]
    fn functor_sends_identities_to_the_idempotents() {
        let a = object(corpus::c_plus_m2(tol()).unwrap());
        let id = CpStarMorphism::new(
            Morphism::identity(a.algebra().carrier()),
            &a,
            &a,
            tol(),
        )
        .unwrap();
        let split = functor_f_morphism(&id, tol()).unwrap();
        let idem = functor_f_object(&a, tol()).unwrap();
        assert!(split.morphism().equal(idem.morphism(), tol()));
    }

    #[test]
    fn functor_preserves_composition() {
        let a = object(corpus::pants_fhilb(2, tol()).unwrap());
        let f = CpStarMorphism::new(corpus::depolarizing(0.4).unwrap(), &a, &a, tol()).unwrap();
        let g = CpStarMorphism::new(corpus::dephasing(2).unwrap(), &a, &a, tol()).unwrap();
        let composite = CpStarMorphism::new(
            f.morphism().then(g.morphism()).unwrap(),
            &a,
            &a,
            tol(),
        )
        .unwrap();

        let ff = functor_f_morphism(&f, tol()).unwrap();
        let fg = functor_f_morphism(&g, tol()).unwrap();
        let direct = functor_f_morphism(&composite, tol()).unwrap();
        let composed = compose_split(&fg, &ff, tol()).unwrap();
        assert!(direct.morphism().equal(composed.morphism(), tol()));
    }

    #[test]
    fn functor_image_of_a_star_homomorphism_stays_certified() {
        let pants2 = object(corpus::pants_fhilb(2, tol()).unwrap());
        let diag = object(diagonal_algebra(2, tol()).unwrap());
        let measure =
            CpStarMorphism::new(corpus::decoherence(2).unwrap(), &pants2, &diag, tol()).unwrap();
        let split = functor_f_morphism(&measure, tol()).unwrap();
        assert!(split_membership(
            split.morphism(),
            split.source(),
            split.target(),
            tol()
        )
        .unwrap());
    }

    #[test]
    fn idempotent_is_the_identity_of_its_split_object() {
        let a = object(corpus::pants_fhilb(2, tol()).unwrap());
        let idem = functor_f_object(&a, tol()).unwrap();
        let as_morphism = SplitMorphism::new(
            idem.morphism().clone(),
            idem.clone(),
            idem.clone(),
            tol(),
        )
        .unwrap();
        let squared = compose_split(&as_morphism, &as_morphism, tol()).unwrap();
        assert!(squared.morphism().equal(idem.morphism(), tol()));
    }

    #[test]
    fn sandwiching_any_channel_gives_a_member() {
        let a = object(corpus::pants_fhilb(2, tol()).unwrap());
        let idem = functor_f_object(&a, tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let g = ComplexMatrix::from_fn(4, 4, |_, _| {
                Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
            });
            let choi = g.dagger().matmul(&g).unwrap();
            let h = Morphism::from_matrix(
                16,
                16,
                crate::numeric::kron(&choi, &ComplexMatrix::identity(4)),
            )
            .unwrap();
            let sandwiched = idem
                .morphism()
                .then(&h)
                .unwrap()
                .then(idem.morphism())
                .unwrap();
            assert!(split_membership(&sandwiched, &idem, &idem, tol()).unwrap());
        }
    }

    #[test]
    fn compression_inverts_the_functor() {
        let a = object(corpus::pants_fhilb(2, tol()).unwrap());
        let f = CpStarMorphism::new(corpus::depolarizing(0.3).unwrap(), &a, &a, tol()).unwrap();
        let split = functor_f_morphism(&f, tol()).unwrap();
        let recovered = compress_split(split.morphism(), &a, &a, tol()).unwrap();
        assert!(recovered.equal(f.morphism(), tol()));
    }

    #[test]
    fn membership_and_positivity_characterise_the_functor_image() {
        // Sampled two-way equivalence: h is absorbed-and-positive exactly
        // when the compressed morphism passes the algebra-side check.
        let a = object(corpus::pants_fhilb(2, tol()).unwrap());
        let idem = functor_f_object(&a, tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut in_image = 0;
        for s in 0..12 {
            let m = ComplexMatrix::from_fn(16, 16, |_, _| {
                Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
            });
            // Three sample classes: positive channels sandwiched into
            // membership (in the image by construction, since the idempotent
            // is itself positive), arbitrary matrices sandwiched (members,
            // rarely positive), and raw matrices (rarely members).
            let raw = if s % 3 == 0 {
                let choi = m.dagger().matmul(&m).unwrap();
                Morphism::from_matrix(16, 16, reshuffle_inv(&choi, (4, 4)).unwrap()).unwrap()
            } else {
                Morphism::from_matrix(16, 16, m).unwrap()
            };
            let h = if s % 3 < 2 {
                idem.morphism()
                    .then(&raw)
                    .unwrap()
                    .then(idem.morphism())
                    .unwrap()
            } else {
                raw
            };
            let member = split_membership(&h, &idem, &idem, tol()).unwrap();
            let positive = check_cpm(&h, idem.base(), idem.base(), tol())
                .unwrap()
                .is_accept();
            let recovered = compress_split(&h, &a, &a, tol()).unwrap();
            let algebra_side = check_cpstar(&recovered, a.algebra(), a.algebra(), tol())
                .unwrap()
                .is_accept();
            if member && positive {
                in_image += 1;
                assert!(
                    algebra_side,
                    "sample {s}: absorbed positive channel rejected by the algebra checker"
                );
            }
            if member && !positive {
                assert!(
                    !algebra_side,
                    "sample {s}: non-positive member accepted by the algebra checker"
                );
            }
        }
        // The sandwiched samples are members by construction; a few of them
        // should also be positive — and if none were, the equivalence above
        // would be vacuous.
        assert!(in_image >= 1, "no sample landed in the functor image");
    }

    #[test]
    fn inclusion_probe_commutes_for_identity_and_random_channels() {
        let x = CpmObject::new(ObjectRef::new(Backend::FHilb, 2));
        let y = CpmObject::new(ObjectRef::new(Backend::FHilb, 3));
        let report = fl_vs_inclusion_probe(&x, &y, 8, 23, tol()).unwrap();
        assert!(report.commutes(), "{:?}", report.first_failure);
        assert!(report.max_deviation < 1e-8);

        // Scalar objects: everything is 1-dimensional and commutes exactly.
        let unit = CpmObject::new(ObjectRef::new(Backend::FHilb, 1));
        let report = fl_vs_inclusion_probe(&unit, &unit, 3, 23, tol()).unwrap();
        assert!(report.commutes());
        assert!(report.max_deviation < 1e-12);
    }
}
