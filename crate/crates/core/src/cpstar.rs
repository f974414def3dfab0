//! Complete positivity for morphisms between dagger Frobenius algebras.
//!
//! A morphism `f : A → B` between algebra carriers is *completely positive*
//! here when its lift `action_B ∘ f ∘ coaction_A : A*⊗A → B*⊗B` admits an
//! ancilla factorisation. That membership test is decided by
//! [`channel_positivity`]:
//!
//! * **FHilb** — rearrange the lifted matrix into its Choi form and test
//!   positive semidefiniteness; acceptance comes with a Kraus witness
//!   recovered by factoring the rearrangement, and the witness is replayed
//!   against the input before it is returned.
//! * **Rel** — check the two closure conditions (swap symmetry of pairs and
//!   the diagonal implication) exhaustively.
//!
//! A second, independently computable route to the same verdict is
//! [`check_cpstar_convolution`]: `f` is completely positive iff its name
//! (the vectorised matrix) is a positive element of `B ⊗ A°`, where `A°` is
//! the conjugate algebra. The two routes must agree; the test suite and the
//! acceptance gate enforce this.
//!
//! On top of the checkers sit the certified wrappers: [`CpStarObject`]
//! (algebra + verified normaliser) and [`CpStarMorphism`] (morphism +
//! certificate), with [`compose_cp`] / [`tensor_cp`] / [`dagger_cp`]
//! recomputing certificates rather than assuming closure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backends::{Backend, Morphism, MorphismPayload};
use crate::classify::{wedderburn, FactorDecomposition};
use crate::error::Error;
use crate::frobenius::{
    dual_algebra, product_algebra, trivial_algebra, verify_normaliser, FrobeniusAlgebra,
};
use crate::numeric::{
    composite, psd_factor_rank, reshuffle, reshuffle_inv, split, Complex64, ComplexMatrix,
    Tolerance,
};
use crate::Result;

/// Relative tolerance for replaying a recovered Kraus witness against the
/// channel it came from. Factoring costs about half the significand, so this
/// sits well above `eq_tol` while still catching wrong witnesses.
const REBUILD_REL_TOL: f64 = 1e-7;

/// Evidence that a channel-shaped morphism admits an ancilla factorisation.
#[derive(Debug, Clone)]
pub enum CpCertificate {
    /// FHilb: a map `g : A → X⊗B` with the channel equal to the conjugate
    /// sandwich of `g`; `X` has dimension `ancilla_dim` (the numerical rank
    /// of the rearrangement, floored at one).
    Kraus {
        ancilla_dim: usize,
        kraus: ComplexMatrix,
    },
    /// Rel: both closure conditions checked exhaustively over the relation's
    /// pairs.
    RelClosure { pairs_checked: usize },
}

/// Why a channel-shaped morphism was rejected.
#[derive(Debug, Clone)]
pub struct CpDiagnostic {
    /// Human-readable failure description.
    pub reason: String,
    /// FHilb: smallest eigenvalue of the rearrangement, when it was computed.
    pub min_eigenvalue: Option<f64>,
    /// FHilb: the rearrangement's deviation from Hermitianity.
    pub hermitian_deviation: Option<f64>,
}

/// Outcome of a complete-positivity check.
#[derive(Debug, Clone)]
pub enum CpCheck {
    Accept(CpCertificate),
    Reject(CpDiagnostic),
}

impl CpCheck {
    pub fn is_accept(&self) -> bool {
        matches!(self, CpCheck::Accept(_))
    }

    pub fn certificate(&self) -> Option<&CpCertificate> {
        match self {
            CpCheck::Accept(c) => Some(c),
            CpCheck::Reject(_) => None,
        }
    }

    pub fn diagnostic(&self) -> Option<&CpDiagnostic> {
        match self {
            CpCheck::Accept(_) => None,
            CpCheck::Reject(d) => Some(d),
        }
    }
}

/// The lift of `f : A → B` to channel shape: `action_B ∘ f ∘ coaction_A`,
/// a morphism `A*⊗A → B*⊗B`.
pub fn lift(f: &Morphism, a: &FrobeniusAlgebra, b: &FrobeniusAlgebra) -> Result<Morphism> {
    if f.source != a.carrier() || f.target != b.carrier() {
        return Err(Error::ShapeMismatch(format!(
            "lift needs f : A → B on the carriers; got {} → {} between carriers of dimension {} and {}",
            f.source.dim,
            f.target.dim,
            a.dim(),
            b.dim()
        )));
    }
    a.coaction()?.then(f)?.then(&b.action()?)
}

/// Decide whether a channel-shaped morphism `h : A*⊗A → B*⊗B` (with
/// `dim A = n`, `dim B = m`) admits an ancilla factorisation.
pub fn channel_positivity(h: &Morphism, n: usize, m: usize, tol: Tolerance) -> Result<CpCheck> {
    if h.source.dim != n * n || h.target.dim != m * m {
        return Err(Error::ShapeMismatch(format!(
            "channel over ({n}, {m}) must map {0} → {1}, got {2} → {3}",
            n * n,
            m * m,
            h.source.dim,
            h.target.dim
        )));
    }
    match h.payload() {
        MorphismPayload::Matrix(hm) => {
            let choi = reshuffle(hm, (n, m))?;
            let report = crate::numeric::is_psd(&choi, tol);
            if !report.is_psd {
                let reason = if report.min_eigenvalue == f64::NEG_INFINITY {
                    format!(
                        "rearrangement is not Hermitian (deviation {:.3e})",
                        report.hermitian_deviation
                    )
                } else {
                    format!(
                        "rearrangement has a negative eigenvalue ({:.6e})",
                        report.min_eigenvalue
                    )
                };
                return Ok(CpCheck::Reject(CpDiagnostic {
                    reason,
                    min_eigenvalue: (report.min_eigenvalue != f64::NEG_INFINITY)
                        .then_some(report.min_eigenvalue),
                    hermitian_deviation: Some(report.hermitian_deviation),
                }));
            }
            let (factor, rank) = psd_factor_rank(&choi, tol)?;
            let ancilla = rank.max(1);
            // Reindex rows (x, (b,a)) to the map g : A → X⊗B.
            let kraus = ComplexMatrix::from_fn(ancilla * m, n, |row, a_idx| {
                let (x, b_idx) = split(row, m);
                if x < rank {
                    factor.get(x, composite(b_idx, a_idx, n))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let rebuilt = kraus_to_channel(&kraus, ancilla, n, m)?;
            let scale = hm.norm_inf().max(1.0);
            if !rebuilt.approx_eq(hm, REBUILD_REL_TOL * scale) {
                return Err(Error::CertificateFailure(
                    "recovered Kraus witness does not replay to the original channel".into(),
                ));
            }
            Ok(CpCheck::Accept(CpCertificate::Kraus { ancilla_dim: ancilla, kraus }))
        }
        MorphismPayload::Relation(r) => {
            let idx = |p: usize, q: usize, d: usize| composite(p, q, d);
            for &(src, tgt) in &r.pairs {
                let (ap, a) = split(src, n);
                let (bp, b) = split(tgt, m);
                if !r.contains(idx(a, ap, n), idx(b, bp, m)) {
                    return Ok(CpCheck::Reject(CpDiagnostic {
                        reason: format!(
                            "pair symmetry fails: (({ap},{a}) → ({bp},{b})) present without (({a},{ap}) → ({b},{bp}))"
                        ),
                        min_eigenvalue: None,
                        hermitian_deviation: None,
                    }));
                }
                if !r.contains(idx(a, a, n), idx(b, b, m)) {
                    return Ok(CpCheck::Reject(CpDiagnostic {
                        reason: format!(
                            "diagonal implication fails: (({ap},{a}) → ({bp},{b})) present without (({a},{a}) → ({b},{b}))"
                        ),
                        min_eigenvalue: None,
                        hermitian_deviation: None,
                    }));
                }
            }
            Ok(CpCheck::Accept(CpCertificate::RelClosure { pairs_checked: r.pairs.len() }))
        }
    }
}

/// Replay a Kraus witness `g : A → X⊗B` into the channel it certifies:
/// `out[(b′,b),(a′,a)] = Σ_x conj(g[(x,b′),a′]) · g[(x,b),a]`.
pub fn kraus_to_channel(
    g: &ComplexMatrix,
    ancilla: usize,
    n: usize,
    m: usize,
) -> Result<ComplexMatrix> {
    if g.rows() != ancilla * m || g.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "Kraus witness must be {}×{n}, got {}×{}",
            ancilla * m,
            g.rows(),
            g.cols()
        )));
    }
    Ok(ComplexMatrix::from_fn(m * m, n * n, |row, col| {
        let (bp, b) = split(row, m);
        let (ap, a) = split(col, n);
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..ancilla {
            acc += g.get(composite(x, bp, m), ap).conj() * g.get(composite(x, b, m), a);
        }
        acc
    }))
}

/// The complete-positivity check: lift `f` to channel shape and decide
/// membership.
pub fn check_cpstar(
    f: &Morphism,
    a: &FrobeniusAlgebra,
    b: &FrobeniusAlgebra,
    tol: Tolerance,
) -> Result<CpCheck> {
    channel_positivity(&lift(f, a, b)?, a.dim(), b.dim(), tol)
}

/// The name of `f : A → B`: the point of `B ⊗ A` with coefficients
/// `q[(b,a)] = f[b,a]` (the vectorised matrix; for relations, the pair set
/// flattened to a subset).
pub fn name(f: &Morphism) -> Result<Morphism> {
    let n = f.source.dim;
    match f.payload() {
        MorphismPayload::Matrix(fm) => {
            let m = f.target.dim;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); m * n];
            for b in 0..m {
                for a in 0..n {
                    coeffs[composite(b, a, n)] = fm.get(b, a);
                }
            }
            Ok(Morphism::point(&coeffs))
        }
        MorphismPayload::Relation(r) => {
            let size = f.target.dim * n;
            let subset: Vec<usize> =
                r.pairs.iter().map(|&(a, b)| composite(b, a, n)).collect();
            Morphism::point_rel(size, subset)
        }
    }
}

/// The convolution form of the complete-positivity check: `f` is completely
/// positive iff its name is a positive element of `B ⊗ A°` with `A°` the
/// conjugate algebra. Computed independently of [`check_cpstar`]; the two
/// must agree.
pub fn check_cpstar_convolution(
    f: &Morphism,
    a: &FrobeniusAlgebra,
    b: &FrobeniusAlgebra,
    tol: Tolerance,
) -> Result<CpCheck> {
    if f.source != a.carrier() || f.target != b.carrier() {
        return Err(Error::ShapeMismatch(
            "convolution check needs f : A → B on the carriers".into(),
        ));
    }
    let host = product_algebra(b, &dual_algebra(a, tol)?, tol)?;
    is_positive_element(&name(f)?, &host, tol)
}

/// Whether a point `I → A` is a positive element: a completely positive
/// morphism out of the trivial one-dimensional algebra.
pub fn is_positive_element(
    p: &Morphism,
    a: &FrobeniusAlgebra,
    tol: Tolerance,
) -> Result<CpCheck> {
    let unit = trivial_algebra(a.backend(), tol)?;
    check_cpstar(p, &unit, a, tol)
}

/// Whether `f : A → B` preserves counits: `ε_B ∘ f = ε_A` within tolerance.
pub fn is_normalised(
    f: &Morphism,
    a: &FrobeniusAlgebra,
    b: &FrobeniusAlgebra,
    tol: Tolerance,
) -> Result<bool> {
    Ok(f.then(b.counit())?.equal(a.counit(), tol))
}

/// Componentwise report of the *-homomorphism conditions.
#[derive(Debug, Clone, Copy)]
pub struct StarHomReport {
    /// `f ∘ ∇_A = ∇_B ∘ (f⊗f)`.
    pub multiplicative: bool,
    /// `f ∘ η_A = η_B`.
    pub unital: bool,
    /// `f ∘ S_A = S_B ∘ f_*` (the involution's structure maps intertwine).
    pub star_compatible: bool,
}

impl StarHomReport {
    /// All three conditions hold.
    pub fn holds(&self) -> bool {
        self.multiplicative && self.unital && self.star_compatible
    }
}

/// Check the three *-homomorphism conditions as morphism equalities.
/// *-homomorphisms are always completely positive, and the test suite holds
/// this implementation to that.
pub fn check_star_homomorphism(
    f: &Morphism,
    a: &FrobeniusAlgebra,
    b: &FrobeniusAlgebra,
    tol: Tolerance,
) -> Result<StarHomReport> {
    if f.source != a.carrier() || f.target != b.carrier() {
        return Err(Error::ShapeMismatch(
            "homomorphism check needs f : A → B on the carriers".into(),
        ));
    }
    let multiplicative = a.mult().then(f)?.equal(&f.tensor(f)?.then(b.mult())?, tol);
    let unital = a.unit().then(f)?.equal(b.unit(), tol);
    let star_compatible = a
        .star_structure()?
        .then(f)?
        .equal(&f.conjugate().then(&b.star_structure()?)?, tol);
    Ok(StarHomReport { multiplicative, unital, star_compatible })
}

/// An algebra paired with its verified normaliser.
#[derive(Debug, Clone)]
pub struct CpStarObject {
    algebra: FrobeniusAlgebra,
    normaliser: Morphism,
}

impl CpStarObject {
    /// Solve for the normaliser and wrap the algebra.
    pub fn new(algebra: FrobeniusAlgebra, tol: Tolerance) -> Result<Self> {
        let normaliser = algebra.solve_normaliser(tol)?;
        Ok(CpStarObject { algebra, normaliser })
    }

    /// Wrap an algebra with a caller-supplied normaliser, re-verifying it.
    pub fn from_parts(
        algebra: FrobeniusAlgebra,
        normaliser: Morphism,
        tol: Tolerance,
    ) -> Result<Self> {
        verify_normaliser(&algebra, &normaliser, tol)?;
        Ok(CpStarObject { algebra, normaliser })
    }

    pub fn algebra(&self) -> &FrobeniusAlgebra {
        &self.algebra
    }

    pub fn normaliser(&self) -> &Morphism {
        &self.normaliser
    }

    /// Tensor of objects: the product algebra, whose normaliser is the
    /// tensor of the normalisers (re-verified rather than assumed).
    pub fn tensor(&self, other: &CpStarObject, tol: Tolerance) -> Result<CpStarObject> {
        CpStarObject::from_parts(
            product_algebra(&self.algebra, &other.algebra, tol)?,
            self.normaliser.tensor(&other.normaliser)?,
            tol,
        )
    }
}

/// A morphism together with its complete-positivity certificate.
#[derive(Debug, Clone)]
pub struct CpStarMorphism {
    source: CpStarObject,
    target: CpStarObject,
    morphism: Morphism,
    certificate: CpCertificate,
}

impl CpStarMorphism {
    /// Certify `f` as completely positive between two objects.
    pub fn new(
        f: Morphism,
        source: &CpStarObject,
        target: &CpStarObject,
        tol: Tolerance,
    ) -> Result<Self> {
        match check_cpstar(&f, source.algebra(), target.algebra(), tol)? {
            CpCheck::Accept(certificate) => Ok(CpStarMorphism {
                source: source.clone(),
                target: target.clone(),
                morphism: f,
                certificate,
            }),
            CpCheck::Reject(d) => Err(Error::NotValidated(format!(
                "morphism fails the complete-positivity check: {}",
                d.reason
            ))),
        }
    }

    pub fn morphism(&self) -> &Morphism {
        &self.morphism
    }

    pub fn source(&self) -> &CpStarObject {
        &self.source
    }

    pub fn target(&self) -> &CpStarObject {
        &self.target
    }

    pub fn certificate(&self) -> &CpCertificate {
        &self.certificate
    }
}

/// Compose certified morphisms; the composite's certificate is recomputed
/// from scratch and must verify, turning closure under composition into an
/// executable assertion.
pub fn compose_cp(
    g: &CpStarMorphism,
    f: &CpStarMorphism,
    tol: Tolerance,
) -> Result<CpStarMorphism> {
    if !f.target.algebra.same_structure(&g.source.algebra, tol) {
        return Err(Error::ShapeMismatch(
            "compose_cp needs the middle objects to carry the same algebra".into(),
        ));
    }
    let m = f.morphism.then(&g.morphism)?;
    CpStarMorphism::new(m, &f.source, &g.target, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "composite of certified morphisms failed recertification: {e}"
        ))
    })
}

/// Tensor certified morphisms between the product objects, recertifying.
pub fn tensor_cp(
    f: &CpStarMorphism,
    g: &CpStarMorphism,
    tol: Tolerance,
) -> Result<CpStarMorphism> {
    let source = f.source.tensor(&g.source, tol)?;
    let target = f.target.tensor(&g.target, tol)?;
    let m = f.morphism.tensor(&g.morphism)?;
    CpStarMorphism::new(m, &source, &target, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "tensor of certified morphisms failed recertification: {e}"
        ))
    })
}

/// Dagger of a certified morphism, recertified in the reverse direction.
pub fn dagger_cp(f: &CpStarMorphism, tol: Tolerance) -> Result<CpStarMorphism> {
    CpStarMorphism::new(f.morphism.dagger(), &f.target, &f.source, tol).map_err(|e| {
        Error::CertificateFailure(format!(
            "dagger of a certified morphism failed recertification: {e}"
        ))
    })
}

/// Report of the positive-element transport probe.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    /// Verdict of the lift-based checker on `f` itself.
    pub check_accepts: bool,
    /// Whether every probed positive element stayed positive under `f⊗id`.
    pub probe_accepts: bool,
    /// Number of positive elements pushed through `f⊗id`.
    pub witnesses_checked: usize,
    /// Description of the first transported element that failed positivity.
    pub first_violation: Option<String>,
}

impl ProbeReport {
    /// The two characterisations agree on this morphism.
    pub fn agree(&self) -> bool {
        self.check_accepts == self.probe_accepts
    }
}

/// Probe the equivalence between the lift-based check and transport of
/// positive elements: for each ancilla `X = C¹..C^max_dim`, push sampled
/// positive elements of `A ⊗ End(X)` — plus, where the block structure of
/// `A` admits it, a canonical entangled element that is decisive — through
/// `f⊗id` and test positivity on the other side.
pub fn pos_elems_equivalence_probe(
    f: &Morphism,
    a: &FrobeniusAlgebra,
    b: &FrobeniusAlgebra,
    max_dim: usize,
    tol: Tolerance,
    seed: u64,
) -> Result<ProbeReport> {
    const SAMPLES_PER_DIM: usize = 4;
    let check_accepts = check_cpstar(f, a, b, tol)?.is_accept();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decomposition: Option<FactorDecomposition> = match a.backend() {
        Backend::FHilb => Some(wedderburn(a, tol)?),
        Backend::Rel => None,
    };
    let mut witnesses_checked = 0;
    let mut first_violation = None;

    for x_dim in 1..=max_dim.max(1) {
        let ancilla = crate::frobenius::pants(
            crate::backends::ObjectRef::new(a.backend(), x_dim),
            tol,
        )?;
        let ap = product_algebra(a, &ancilla, tol)?;
        let bp = product_algebra(b, &ancilla, tol)?;
        let f_ext = f.tensor(&Morphism::identity(ancilla.carrier()))?;

        // The decisive witness goes first so a failure is reported against
        // it deterministically; the sampled ones broaden coverage.
        let mut witnesses: Vec<(String, Morphism)> = Vec::new();
        if let Some(dec) = &decomposition {
            if dec.embedding_dimension() == x_dim {
                witnesses.push((
                    format!("canonical entangled element at X = {x_dim}"),
                    canonical_entangled_element(dec)?,
                ));
            }
        }
        for s in 0..SAMPLES_PER_DIM {
            let r = random_point(ap.dim(), a.backend(), &mut rng)?;
            let q = ap.mult_points(&ap.star_point(&r)?, &r)?;
            witnesses.push((format!("sampled star-square {s} at X = {x_dim}"), q));
        }

        for (label, q) in witnesses {
            if !is_positive_element(&q, &ap, tol)?.is_accept() {
                return Err(Error::CertificateFailure(format!(
                    "constructed positive element failed its own positivity check ({label})"
                )));
            }
            witnesses_checked += 1;
            let pushed = q.then(&f_ext)?;
            if !is_positive_element(&pushed, &bp, tol)?.is_accept()
                && first_violation.is_none()
            {
                first_violation = Some(label);
            }
        }
    }

    Ok(ProbeReport {
        check_accepts,
        probe_accepts: first_violation.is_none(),
        witnesses_checked,
        first_violation,
    })
}

/// The canonical entangled positive element of `A ⊗ End(C^N)`, `N = Σ n_k`:
/// compress the maximally entangled projector of `End(C^N) ⊗ End(C^N)`
/// through the block-diagonal conditional expectation on the left leg. Its
/// transport detects every non-completely-positive map out of `A`.
fn canonical_entangled_element(dec: &FactorDecomposition) -> Result<Morphism> {
    let big = dec.embedding_dimension();
    let n2 = big * big;
    // Entangled projector as a point of End(C^N) ⊗ End(C^N):
    // q[((i,j),(k,l))] = δ_ik δ_jl.
    let mut omega = ComplexMatrix::zeros(n2 * n2, 1);
    for i in 0..big {
        for j in 0..big {
            omega.set(
                composite(composite(i, j, big), composite(i, j, big), n2),
                0,
                Complex64::new(1.0, 0.0),
            );
        }
    }
    let compress = dec.compress_matrix()?;
    let id = ComplexMatrix::identity(n2);
    let element = crate::numeric::kron(&compress, &id).matmul(&omega)?;
    Ok(Morphism::point(element.entries()))
}

/// A uniform random point of an `n`-dimensional carrier.
pub fn random_point(n: usize, backend: Backend, rng: &mut ChaCha8Rng) -> Result<Morphism> {
    match backend {
        Backend::FHilb => {
            let coeffs: Vec<Complex64> = (0..n)
                .map(|_| {
                    Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
                })
                .collect();
            Ok(Morphism::point(&coeffs))
        }
        Backend::Rel => {
            let subset: Vec<usize> = (0..n).filter(|_| rng.random::<bool>()).collect();
            Morphism::point_rel(n, subset)
        }
    }
}

/// A random completely positive morphism `A → B`, built concretely: draw a
/// random positive Choi matrix over the ambient full matrix algebras, read
/// off the corresponding super-operator, and compress it onto the block
/// coordinates. Composition of completely positive pieces, so the checkers
/// must accept it.
pub fn random_cp_morphism(
    dec_a: &FactorDecomposition,
    dec_b: &FactorDecomposition,
    rng: &mut ChaCha8Rng,
) -> Result<Morphism> {
    let (na, nb) = (dec_a.embedding_dimension(), dec_b.embedding_dimension());
    let d = na * nb;
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    });
    let choi = g.dagger().matmul(&g)?;
    let super_map = reshuffle_inv(&choi, (na, nb))?;
    let f = dec_b
        .compress_matrix()?
        .matmul(&super_map)?
        .matmul(&dec_a.embed_matrix()?)?;
    Morphism::from_matrix(dec_a.carrier().dim, dec_b.carrier().dim, f)
}

/// A random morphism `A → B` with no positivity structure at all.
pub fn random_morphism(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<Morphism> {
    let f = ComplexMatrix::from_fn(m, n, |_, _| {
        Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    });
    Morphism::from_matrix(n, m, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::concrete_cp_oracle;
    use crate::corpus;
    use crate::frobenius::diagonal_algebra;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn identity_is_accepted_on_every_standard_algebra() {
        for (name, alg) in corpus::standard_algebras(tol()).unwrap() {
            let id = Morphism::identity(alg.carrier());
            let check = check_cpstar(&id, &alg, &alg, tol()).unwrap();
            assert!(check.is_accept(), "identity rejected on {name}");
            let conv = check_cpstar_convolution(&id, &alg, &alg, tol()).unwrap();
            assert!(conv.is_accept(), "convolution form rejected identity on {name}");
        }
    }

    #[test]
    fn transpose_is_rejected_by_all_three_routes() {
        let alg = corpus::pants_fhilb(2, tol()).unwrap();
        let t = corpus::transpose_map(2).unwrap();

        let check = check_cpstar(&t, &alg, &alg, tol()).unwrap();
        let diag = check.diagnostic().expect("transpose must be rejected");
        assert!(diag.min_eigenvalue.unwrap() <= -0.5);

        let conv = check_cpstar_convolution(&t, &alg, &alg, tol()).unwrap();
        assert!(!conv.is_accept());

        let dec = wedderburn(&alg, tol()).unwrap();
        let oracle = concrete_cp_oracle(&t, &dec, &dec, tol()).unwrap();
        assert!(!oracle.is_cp);
    }

    #[test]
    fn lift_of_the_diagonal_counit_is_the_pair_diagonal_row() {
        let alg = diagonal_algebra(2, tol()).unwrap();
        let lifted = lift(alg.counit(), &alg, &crate::frobenius::trivial_algebra(Backend::FHilb, tol()).unwrap()).unwrap();
        let expected = ComplexMatrix::from_fn(1, 4, |_, c| {
            let (i, k) = split(c, 2);
            if i == k {
                one()
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        assert!(lifted.matrix().unwrap().approx_eq(&expected, 1e-12));
    }

    #[test]
    fn rel_lift_of_identity_relates_composition_compatible_pairs() {
        // On the two-element group, (a′,a) relates to (b′,b) exactly when
        // a′+a = b′+b (inverses are trivial), giving an 8-pair relation.
        let alg = corpus::groupoid_algebra_rel(&crate::classify::Groupoid::cyclic(2), tol())
            .unwrap();
        let id = Morphism::identity(alg.carrier());
        let lifted = lift(&id, &alg, &alg).unwrap();
        let r = lifted.relation().unwrap();
        for ap in 0..2usize {
            for a in 0..2usize {
                for bp in 0..2usize {
                    for b in 0..2usize {
                        let related =
                            r.contains(composite(ap, a, 2), composite(bp, b, 2));
                        assert_eq!(related, (ap + a) % 2 == (bp + b) % 2);
                    }
                }
            }
        }
    }

    #[test]
    fn rel_collapse_onto_the_identity_fails_the_diagonal_implication() {
        let alg = corpus::groupoid_algebra_rel(&crate::classify::Groupoid::cyclic(2), tol())
            .unwrap();
        let bad = corpus::rel_bad_morphism().unwrap();
        let check = check_cpstar(&bad, &alg, &alg, tol()).unwrap();
        assert!(!check.is_accept());
        let good = Morphism::identity(alg.carrier());
        assert!(check_cpstar(&good, &alg, &alg, tol()).unwrap().is_accept());
    }

    #[test]
    fn positive_elements_behave_on_points() {
        let diag = diagonal_algebra(2, tol()).unwrap();
        // The unit is positive; the (1,−1) point is not.
        assert!(is_positive_element(diag.unit(), &diag, tol()).unwrap().is_accept());
        let signed = Morphism::point(&[one(), -one()]);
        assert!(!is_positive_element(&signed, &diag, tol()).unwrap().is_accept());

        // The maximally mixed density matrix is a positive, normalised
        // point of the qubit endomorphism algebra.
        let pants2 = corpus::pants_fhilb(2, tol()).unwrap();
        let rho = Morphism::point(&[
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
        ]);
        assert!(is_positive_element(&rho, &pants2, tol()).unwrap().is_accept());
        let unit_alg = crate::frobenius::trivial_algebra(Backend::FHilb, tol()).unwrap();
        assert!(is_normalised(&rho, &unit_alg, &pants2, tol()).unwrap());
    }

    #[test]
    fn star_homomorphism_conditions_separate_identity_from_transpose() {
        let alg = corpus::pants_fhilb(2, tol()).unwrap();
        let id = Morphism::identity(alg.carrier());
        assert!(check_star_homomorphism(&id, &alg, &alg, tol()).unwrap().holds());

        let t = corpus::transpose_map(2).unwrap();
        let report = check_star_homomorphism(&t, &alg, &alg, tol()).unwrap();
        assert!(!report.multiplicative, "transposition is an antihomomorphism");
        assert!(report.unital);
    }

    #[test]
    fn certified_morphisms_survive_composition_tensor_and_dagger() {
        let alg = corpus::pants_fhilb(2, tol()).unwrap();
        let dec = wedderburn(&alg, tol()).unwrap();
        let obj = CpStarObject::new(alg, tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = CpStarMorphism::new(
            random_cp_morphism(&dec, &dec, &mut rng).unwrap(),
            &obj,
            &obj,
            tol(),
        )
        .unwrap();
        let g = CpStarMorphism::new(
            random_cp_morphism(&dec, &dec, &mut rng).unwrap(),
            &obj,
            &obj,
            tol(),
        )
        .unwrap();
        compose_cp(&g, &f, tol()).unwrap();
        tensor_cp(&f, &g, tol()).unwrap();
        dagger_cp(&f, tol()).unwrap();
    }

    #[test]
    fn random_verdicts_agree_across_all_three_routes() {
        let a = diagonal_algebra(2, tol()).unwrap();
        let b = corpus::pants_fhilb(2, tol()).unwrap();
        let dec_a = wedderburn(&a, tol()).unwrap();
        let dec_b = wedderburn(&b, tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..10 {
            let f = if i % 2 == 0 {
                random_cp_morphism(&dec_a, &dec_b, &mut rng).unwrap()
            } else {
                random_morphism(2, 4, &mut rng).unwrap()
            };
            let v1 = check_cpstar(&f, &a, &b, tol()).unwrap().is_accept();
            let v2 = check_cpstar_convolution(&f, &a, &b, tol()).unwrap().is_accept();
            let v3 = concrete_cp_oracle(&f, &dec_a, &dec_b, tol()).unwrap().is_cp;
            assert_eq!(v1, v2, "lift vs convolution disagree on sample {i}");
            assert_eq!(v1, v3, "lift vs concrete oracle disagree on sample {i}");
            if i % 2 == 0 {
                assert!(v1, "constructed completely positive sample {i} was rejected");
            }
        }
    }

    #[test]
    fn probe_agrees_with_the_checker_both_ways() {
        let alg = corpus::pants_fhilb(2, tol()).unwrap();
        let id = Morphism::identity(alg.carrier());
        let report = pos_elems_equivalence_probe(&id, &alg, &alg, 2, tol(), 3).unwrap();
        assert!(report.check_accepts && report.probe_accepts && report.agree());

        // The transpose is positive on unentangled elements but the
        // canonical entangled element at X = 2 catches it.
        let t = corpus::transpose_map(2).unwrap();
        let report = pos_elems_equivalence_probe(&t, &alg, &alg, 2, tol(), 3).unwrap();
        assert!(!report.check_accepts);
        assert!(!report.probe_accepts, "no probed element caught the transpose");
        assert!(report.agree());
        assert!(report.first_violation.unwrap().contains("canonical"));
    }
}
