//! Classification of algebras in the two backends.
//!
//! **FHilb.** Every dagger Frobenius algebra on a finite-dimensional complex
//! Hilbert space splits as a direct sum of full matrix blocks. [`wedderburn`]
//! finds that splitting numerically: compute the centre, cut it into minimal
//! central idempotents with a generic central element, build a matrix-unit
//! basis inside each block, and record the change of basis. Every structural
//! claim along the way is re-verified before the decomposition is returned,
//! so downstream consumers can rely on the coordinates: the normaliser can be
//! read off the block data ([`normaliser_from_factors`]) and complete
//! positivity can be decided by a textbook Choi-matrix test in block
//! coordinates ([`concrete_cp_oracle`]).
//!
//! **Rel.** Special dagger Frobenius algebras over finite sets are exactly
//! the composition tables of finite groupoids. [`extract_groupoid`] recovers
//! the groupoid (validating every axiom), [`groupoid_to_algebra`] goes the
//! other way, and [`relation_respects_inverses`] is the condition on a
//! relation between two groupoids that plays the role of complete positivity
//! on that side.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backends::{Backend, Morphism, ObjectRef, Relation};
use crate::error::Error;
use crate::numeric::{
    composite, eig_hermitian, invert, is_psd, kron, reshuffle, Complex64, ComplexMatrix,
    PsdReport, Tolerance,
};
use crate::frobenius::FrobeniusAlgebra;
use crate::Result;

/// Number of independent random draws before the decomposition gives up.
const DECOMPOSITION_ATTEMPTS: u64 = 16;

/// Number of random draws when hunting a nonzero partial isometry between
/// two corners of one block.
const ISOMETRY_ATTEMPTS: u64 = 16;

/// Base seed for the deterministic random search.
const DECOMPOSITION_SEED: u64 = 0x57ed;

/// Relative eigenvalue cutoff below which a direction counts as part of the
/// kernel of the commutator system (the centre).
const KERNEL_REL_TOL: f64 = 1e-8;

/// Relative gap that separates eigenvalue clusters of a generic element.
const CLUSTER_GAP: f64 = 1e-6;

/// A block dimension must be a perfect square to within this tolerance of
/// its square root.
const INTEGRALITY_TOL: f64 = 1e-6;

/// Scale-relative tolerance for the internal structural verifications
/// (idempotency, matrix-unit relations, multiplication transport).
const VERIFY_REL_TOL: f64 = 1e-7;

/// Looser Hermitianity gate used for matrices assembled from verified data;
/// roundoff from repeated multiplications can exceed the default `eq_tol`
/// without signalling anything structural.
fn loose(tol: Tolerance) -> Tolerance {
    Tolerance::new(1e-6_f64.max(tol.eq_tol), tol.psd_tol).expect("static tolerance bounds")
}

/// Orthonormal basis of the centre `{x : xy = yx for all y}` of an FHilb
/// algebra, as `n×1` coefficient vectors.
///
/// The centre is the kernel of the stacked system `L_{e_j} − R_{e_j}` over
/// all basis elements `e_j`; the kernel is read off the small eigenvalues of
/// the system's Gram matrix.
pub fn center(alg: &FrobeniusAlgebra, tol: Tolerance) -> Result<Vec<ComplexMatrix>> {
    if alg.backend() != Backend::FHilb {
        return Err(Error::BackendMismatch(
            "the centre computation needs linear structure; classify relations via extract_groupoid".into(),
        ));
    }
    let n = alg.dim();
    let mult = alg.mult().matrix()?;
    // m[(b,c), j] = coefficient of e_b in e_j·e_c − e_c·e_j.
    let m = ComplexMatrix::from_fn(n * n, n, |row, j| {
        let (b, c) = crate::numeric::split(row, n);
        mult.get(b, composite(j, c, n)) - mult.get(b, composite(c, j, n))
    });
    let gram = m.dagger().matmul(&m)?;
    let (values, vectors) = eig_hermitian(&gram, loose(tol))?;
    let max = values.last().copied().unwrap_or(0.0).max(1.0);
    let mut basis = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v <= KERNEL_REL_TOL * max {
            basis.push(column(&vectors, i));
        }
    }
    Ok(basis)
}

/// A verified splitting of an FHilb algebra into full matrix blocks.
///
/// `iso` maps carrier coordinates to block coordinates; within a block of
/// size `m`, coordinate `i·m + j` is the `(i,j)` matrix unit, and blocks are
/// laid out in `factor_dims` order. `iso_inv` is its inverse, whose columns
/// are the matrix units expressed in the carrier basis.
#[derive(Debug, Clone)]
pub struct FactorDecomposition {
    carrier: ObjectRef,
    factor_dims: Vec<usize>,
    central_idempotents: Vec<Morphism>,
    block_scales: Vec<f64>,
    iso: ComplexMatrix,
    iso_inv: ComplexMatrix,
}

impl FactorDecomposition {
    /// The carrier object of the decomposed algebra.
    pub fn carrier(&self) -> ObjectRef {
        self.carrier
    }

    /// Sizes `n_k` of the matrix blocks `M_{n_k}`, sorted ascending.
    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    /// The minimal central idempotents, one point `I → A` per block, in
    /// `factor_dims` order.
    pub fn central_idempotents(&self) -> &[Morphism] {
        &self.central_idempotents
    }

    /// Per-block scale `c_k = 1/‖e^{(k)}_{ij}‖`: the common reciprocal norm
    /// of the block's matrix units in the carrier's inner product. Equals 1
    /// exactly when the matrix units are orthonormal.
    pub fn block_scales(&self) -> &[f64] {
        &self.block_scales
    }

    /// Change of basis from carrier coordinates to block coordinates.
    pub fn iso(&self) -> &ComplexMatrix {
        &self.iso
    }

    /// Inverse change of basis; column `t` is matrix unit `t` in carrier
    /// coordinates.
    pub fn iso_inv(&self) -> &ComplexMatrix {
        &self.iso_inv
    }

    /// Dimension `N = Σ n_k` of the smallest full matrix algebra the block
    /// algebra embeds into block-diagonally.
    pub fn embedding_dimension(&self) -> usize {
        self.factor_dims.iter().sum()
    }

    /// The linear map taking carrier coordinates to the vectorised entries
    /// of an `N×N` matrix (`N = Σ n_k`), embedding the algebra
    /// block-diagonally. An algebra homomorphism onto its image.
    pub fn embed_matrix(&self) -> Result<ComplexMatrix> {
        block_embedding_isometry(&self.factor_dims).matmul(&self.iso)
    }

    /// One-sided inverse of [`FactorDecomposition::embed_matrix`]: compress a
    /// vectorised `N×N` matrix back to carrier coordinates by keeping the
    /// diagonal blocks (the trace-preserving conditional expectation onto the
    /// embedded subalgebra, in coordinates).
    pub fn compress_matrix(&self) -> Result<ComplexMatrix> {
        self.iso_inv.matmul(&block_embedding_isometry(&self.factor_dims).dagger())
    }
}

/// The isometry sending block coordinate `(k, i, j)` to the vectorised entry
/// `(off_k + i, off_k + j)` of an `N×N` matrix, `N = Σ dims`, where `off_k`
/// is the partial sum of the first `k` dims. Columns are orthonormal.
pub fn block_embedding_isometry(dims: &[usize]) -> ComplexMatrix {
    let n_total: usize = dims.iter().map(|m| m * m).sum();
    let big: usize = dims.iter().sum();
    let mut t = ComplexMatrix::zeros(big * big, n_total);
    let mut col = 0;
    let mut off = 0;
    for &m in dims {
        for i in 0..m {
            for j in 0..m {
                t.set(composite(off + i, off + j, big), col, Complex64::new(1.0, 0.0));
                col += 1;
            }
        }
        off += m;
    }
    t
}

/// Split an FHilb algebra into full matrix blocks, verifying the result.
///
/// The search is randomised but deterministic (fixed seeds) and every
/// structural claim is checked before returning: idempotency, orthogonality
/// and completeness of the central idempotents, the matrix-unit relations,
/// compatibility of the involution with blockwise conjugate-transpose, and
/// transport of the multiplication onto the reference block product.
/// Failures that indicate a retryable unlucky draw are retried up to
/// [`DECOMPOSITION_ATTEMPTS`] times; a block whose dimension is not a perfect
/// square aborts immediately with [`Error::NonIntegralFactor`].
pub fn wedderburn(alg: &FrobeniusAlgebra, tol: Tolerance) -> Result<FactorDecomposition> {
    if alg.backend() != Backend::FHilb {
        return Err(Error::BackendMismatch(
            "matrix-block decomposition applies to FHilb algebras; use extract_groupoid for Rel".into(),
        ));
    }
    let centre = center(alg, tol)?;
    if centre.is_empty() {
        return Err(Error::ClassificationFailed(
            "empty centre: the unit should always be central".into(),
        ));
    }
    let mut last = String::new();
    for attempt in 0..DECOMPOSITION_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(DECOMPOSITION_SEED.wrapping_add(attempt));
        match try_decomposition(alg, &centre, &mut rng, tol) {
            Ok(dec) => return Ok(dec),
            Err(Error::NonIntegralFactor { block_dim }) => {
                return Err(Error::NonIntegralFactor { block_dim })
            }
            Err(e) => last = e.to_string(),
        }
    }
    Err(Error::ClassificationFailed(format!(
        "no decomposition after {DECOMPOSITION_ATTEMPTS} randomised attempts; last failure: {last}"
    )))
}

fn try_decomposition(
    alg: &FrobeniusAlgebra,
    centre: &[ComplexMatrix],
    rng: &mut ChaCha8Rng,
    tol: Tolerance,
) -> Result<FactorDecomposition> {
    let n = alg.dim();
    let star_map = alg.star_structure()?.matrix()?.clone();
    let unit = alg.unit().matrix()?.clone();

    let idempotents = minimal_central_idempotents(alg, centre, &star_map, &unit, rng, tol)?;

    // Work out each block's linear dimension and ambient basis, then its
    // matrix-unit basis.
    let mut blocks = Vec::new();
    for p in &idempotents {
        let lp = alg.left_mult_matrix(p)?;
        let (values, vectors) = eig_hermitian(&lp, loose(tol))?;
        let rank = values.iter().filter(|&&v| v > 0.5).count();
        let root = (rank as f64).sqrt();
        if (root - root.round()).abs() > INTEGRALITY_TOL || root.round() < 1.0 {
            return Err(Error::NonIntegralFactor { block_dim: rank });
        }
        let m = root.round() as usize;
        let cols: Vec<usize> =
            (0..n).filter(|&i| values[i] > 0.5).collect();
        let ambient = ComplexMatrix::from_fn(n, rank, |r, c| vectors.get(r, cols[c]));
        let units = block_matrix_units(alg, p, m, &ambient, &star_map, rng)?;
        blocks.push((m, p.clone(), units));
    }
    let total: usize = blocks.iter().map(|(m, _, _)| m * m).sum();
    if total != n {
        return Err(Error::ClassificationFailed(format!(
            "block dimensions sum to {total}, carrier has dimension {n}"
        )));
    }

    // Deterministic block order: by size, then by the idempotent's
    // coefficients.
    blocks.sort_by(|(ma, pa, _), (mb, pb, _)| {
        ma.cmp(mb).then_with(|| lex_key(pa).cmp(&lex_key(pb)))
    });

    // Assemble the change of basis and verify the multiplication transports
    // onto the reference block product.
    let mut b = ComplexMatrix::zeros(n, n);
    let mut col = 0;
    let mut scales = Vec::new();
    for (m, _, units) in &blocks {
        let mut norms = Vec::new();
        for i in 0..*m {
            for j in 0..*m {
                let u = &units[i * m + j];
                for r in 0..n {
                    b.set(r, col, u.get(r, 0));
                }
                norms.push(norm2(u));
                col += 1;
            }
        }
        let max = norms.iter().cloned().fold(0.0, f64::max);
        let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        if max - min > 1e-6 * max {
            return Err(Error::ClassificationFailed(format!(
                "matrix-unit norms inside one block spread from {min} to {max}"
            )));
        }
        scales.push(1.0 / norms[0]);
    }
    let iso = invert(&b, tol)?;

    let dims: Vec<usize> = blocks.iter().map(|(m, _, _)| *m).collect();
    let reference = reference_block_mult(&dims);
    let lhs = alg.mult().matrix()?.matmul(&kron(&b, &b))?;
    let rhs = b.matmul(&reference)?;
    let scale = lhs.norm_inf().max(1.0);
    if !lhs.approx_eq(&rhs, VERIFY_REL_TOL * scale) {
        return Err(Error::ClassificationFailed(
            "multiplication does not transport onto the block product in the computed basis".into(),
        ));
    }
    let unit_block = iso.matmul(&unit)?;
    let mut expected_unit = ComplexMatrix::zeros(n, 1);
    let mut off = 0;
    for &m in &dims {
        for i in 0..m {
            expected_unit.set(off + i * m + i, 0, Complex64::new(1.0, 0.0));
        }
        off += m * m;
    }
    if !unit_block.approx_eq(&expected_unit, VERIFY_REL_TOL * 10.0) {
        return Err(Error::ClassificationFailed(
            "the unit does not map to the identity of the block product".into(),
        ));
    }

    Ok(FactorDecomposition {
        carrier: alg.carrier(),
        factor_dims: dims,
        central_idempotents: blocks
            .iter()
            .map(|(_, p, _)| Morphism::point(p.entries()))
            .collect(),
        block_scales: scales,
        iso,
        iso_inv: b,
    })
}

/// Cut the centre into minimal idempotents: take a generic star-fixed
/// central element, split the centre along its eigenvalues, rescale each
/// eigenvector to an idempotent, and verify the lot.
fn minimal_central_idempotents(
    alg: &FrobeniusAlgebra,
    centre: &[ComplexMatrix],
    star_map: &ComplexMatrix,
    unit: &ComplexMatrix,
    rng: &mut ChaCha8Rng,
    tol: Tolerance,
) -> Result<Vec<ComplexMatrix>> {
    let n = alg.dim();
    let k = centre.len();
    if k == 1 {
        // A single block: the only central idempotent is the unit.
        return Ok(vec![unit.clone()]);
    }
    let z = ComplexMatrix::from_fn(n, k, |r, c| centre[c].get(r, 0));

    // Generic star-fixed central element.
    let mut a = ComplexMatrix::zeros(n, 1);
    for c in centre {
        let coeff = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
        a = a.add(&c.scale(coeff))?;
    }
    let h = a.add(&star_el(star_map, &a))?;

    // Multiplication by h restricted to the centre (which it preserves), in
    // the orthonormal centre basis.
    let lh = alg.left_mult_matrix(&h)?;
    let restricted = z.dagger().matmul(&lh)?.matmul(&z)?;
    let (values, vectors) = eig_hermitian(&restricted, loose(tol))?;
    let spread = (values[k - 1] - values[0]).max(1.0);
    for w in values.windows(2) {
        if w[1] - w[0] <= CLUSTER_GAP * spread {
            return Err(Error::ClassificationFailed(
                "generic central element has clustered eigenvalues; retrying".into(),
            ));
        }
    }

    let mut idempotents = Vec::new();
    for i in 0..k {
        let v = z.matmul(&column(&vectors, i))?;
        let vv = mul_el(alg, &v, &v)?;
        let s = vdot(&v, &vv) / vdot(&v, &v);
        if s.norm() < 1e-8 {
            return Err(Error::ClassificationFailed(
                "eigenvector of the generic central element squares to zero".into(),
            ));
        }
        idempotents.push(v.scale(Complex64::new(1.0, 0.0) / s));
    }

    // Verify: idempotent, star-fixed, mutually orthogonal, complete.
    let scale: f64 = idempotents.iter().map(norm2).fold(1.0, f64::max);
    let vt = VERIFY_REL_TOL * scale * scale;
    let mut sum = ComplexMatrix::zeros(n, 1);
    for (i, p) in idempotents.iter().enumerate() {
        let pp = mul_el(alg, p, p)?;
        if !pp.approx_eq(p, vt) {
            return Err(Error::ClassificationFailed(
                "central eigenvector does not rescale to an idempotent".into(),
            ));
        }
        if !star_el(star_map, p).approx_eq(p, vt) {
            return Err(Error::ClassificationFailed(
                "central idempotent is not fixed by the involution".into(),
            ));
        }
        for q in idempotents.iter().skip(i + 1) {
            let pq = mul_el(alg, p, q)?;
            if pq.norm_inf() > vt {
                return Err(Error::ClassificationFailed(
                    "central idempotents are not mutually orthogonal".into(),
                ));
            }
        }
        sum = sum.add(p)?;
    }
    if !sum.approx_eq(unit, vt) {
        return Err(Error::ClassificationFailed(
            "central idempotents do not sum to the unit".into(),
        ));
    }
    Ok(idempotents)
}

/// Build the `m²` matrix units of one block: split the block along a generic
/// star-fixed element into `m` rank-one corners, connect the first corner to
/// each other corner by a normalised partial isometry, and fill in the rest
/// multiplicatively. All matrix-unit relations are verified.
fn block_matrix_units(
    alg: &FrobeniusAlgebra,
    p: &ComplexMatrix,
    m: usize,
    ambient: &ComplexMatrix,
    star_map: &ComplexMatrix,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ComplexMatrix>> {
    let n = alg.dim();
    if m == 1 {
        return Ok(vec![p.clone()]);
    }

    // Generic star-fixed element of the block.
    let raw = ComplexMatrix::from_fn(n, 1, |_, _| {
        Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    });
    let herm = raw.add(&star_el(star_map, &raw))?;
    let a = mul_el(alg, p, &mul_el(alg, &herm, p)?)?;

    // Left multiplication by `a` restricted to the block must show exactly m
    // eigenvalue clusters of multiplicity m each.
    let la = alg.left_mult_matrix(&a)?;
    let restricted = ambient.dagger().matmul(&la)?.matmul(ambient)?;
    let (values, _) = eig_hermitian(&restricted, loose(Tolerance::default()))?;
    let clusters = cluster(&values);
    if clusters.len() != m || clusters.iter().any(|c| c.len() != m) {
        return Err(Error::ClassificationFailed(format!(
            "generic block element did not split into {m} clusters of {m}; retrying"
        )));
    }
    let mu: Vec<f64> =
        clusters.iter().map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();

    // Spectral idempotents of `a` inside the algebra, by Lagrange
    // interpolation with the block unit `p` playing the role of 1.
    let mut corners = Vec::new();
    for i in 0..m {
        let mut f = p.clone();
        for j in 0..m {
            if j == i {
                continue;
            }
            let shifted = mul_el(alg, &f, &a.sub(&p.scale(Complex64::new(mu[j], 0.0)))?)?;
            f = shifted.scale(Complex64::new(1.0 / (mu[i] - mu[j]), 0.0));
        }
        corners.push(f);
    }
    let cscale: f64 = corners.iter().map(norm2).fold(1.0, f64::max);
    let vt = VERIFY_REL_TOL * cscale * cscale;
    let mut sum = ComplexMatrix::zeros(n, 1);
    for (i, f) in corners.iter().enumerate() {
        let ff = mul_el(alg, f, f)?;
        if !ff.approx_eq(f, vt) {
            return Err(Error::ClassificationFailed(
                "spectral corner of the block is not idempotent".into(),
            ));
        }
        for g in corners.iter().skip(i + 1) {
            if mul_el(alg, f, g)?.norm_inf() > vt {
                return Err(Error::ClassificationFailed(
                    "spectral corners of the block are not orthogonal".into(),
                ));
            }
        }
        sum = sum.add(f)?;
    }
    if !sum.approx_eq(p, vt) {
        return Err(Error::ClassificationFailed(
            "spectral corners do not sum to the block idempotent".into(),
        ));
    }

    // Partial isometries from corner 0 to each corner j.
    let mut first_row = vec![corners[0].clone()];
    for j in 1..m {
        let mut found = None;
        for _ in 0..ISOMETRY_ATTEMPTS {
            let y = ComplexMatrix::from_fn(n, 1, |_, _| {
                Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
            });
            let u = mul_el(alg, &corners[0], &mul_el(alg, &y, &corners[j])?)?;
            let w = mul_el(alg, &star_el(star_map, &u), &u)?;
            let c = vdot(&corners[j], &w) / vdot(&corners[j], &corners[j]);
            if c.re < 1e-8 || c.im.abs() > 1e-7 * (1.0 + c.re) {
                continue;
            }
            if !w.approx_eq(&corners[j].scale(c), VERIFY_REL_TOL * (1.0 + c.norm()) * cscale) {
                return Err(Error::ClassificationFailed(
                    "corner-to-corner transporter is not a scaled partial isometry".into(),
                ));
            }
            found = Some(u.scale(Complex64::new(1.0 / c.re.sqrt(), 0.0)));
            break;
        }
        first_row.push(found.ok_or_else(|| {
            Error::ClassificationFailed(format!(
                "no nonzero transporter from corner 0 to corner {j} after {ISOMETRY_ATTEMPTS} draws"
            ))
        })?);
    }

    // units[i*m + j] = star(first_row[i]) · first_row[j].
    let mut units = Vec::with_capacity(m * m);
    for i in 0..m {
        let si = star_el(star_map, &first_row[i]);
        for j in 0..m {
            units.push(mul_el(alg, &si, &first_row[j])?);
        }
    }

    // Verify the matrix-unit relations and the star.
    let uscale: f64 = units.iter().map(norm2).fold(1.0, f64::max);
    let ut = VERIFY_REL_TOL * uscale * uscale * (m as f64);
    for i in 0..m {
        for j in 0..m {
            if !star_el(star_map, &units[i * m + j]).approx_eq(&units[j * m + i], ut) {
                return Err(Error::ClassificationFailed(
                    "involution does not transpose the matrix units".into(),
                ));
            }
            for q in 0..m {
                for l in 0..m {
                    let prod = mul_el(alg, &units[i * m + j], &units[q * m + l])?;
                    let expect = if j == q {
                        units[i * m + l].clone()
                    } else {
                        ComplexMatrix::zeros(n, 1)
                    };
                    if !prod.approx_eq(&expect, ut) {
                        return Err(Error::ClassificationFailed(
                            "matrix-unit product relations fail".into(),
                        ));
                    }
                }
            }
        }
    }
    let mut diag = ComplexMatrix::zeros(n, 1);
    for i in 0..m {
        diag = diag.add(&units[i * m + i])?;
    }
    if !diag.approx_eq(p, ut) {
        return Err(Error::ClassificationFailed(
            "diagonal matrix units do not sum to the block idempotent".into(),
        ));
    }
    Ok(units)
}

/// Multiplication of `⊕_k M_{n_k}` in matrix-unit coordinates.
fn reference_block_mult(dims: &[usize]) -> ComplexMatrix {
    let n: usize = dims.iter().map(|m| m * m).sum();
    let mut r = ComplexMatrix::zeros(n, n * n);
    let mut off = 0;
    for &m in dims {
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    r.set(
                        off + i * m + l,
                        composite(off + i * m + j, off + j * m + l, n),
                        Complex64::new(1.0, 0.0),
                    );
                }
            }
        }
        off += m * m;
    }
    r
}

/// The normaliser read off a factor decomposition: on the block of size
/// `n_k` with matrix-unit norm `1/c_k`, the normaliser is the scalar
/// `(c_k² n_k)^{-1/2}`. The result is re-verified against all defining
/// properties before being returned.
pub fn normaliser_from_factors(
    alg: &FrobeniusAlgebra,
    dec: &FactorDecomposition,
    tol: Tolerance,
) -> Result<Morphism> {
    let n = alg.dim();
    if dec.carrier != alg.carrier() {
        return Err(Error::ShapeMismatch(
            "decomposition belongs to a different carrier".into(),
        ));
    }
    let mut zeta = ComplexMatrix::zeros(n, 1);
    for (k, p) in dec.central_idempotents.iter().enumerate() {
        let c = dec.block_scales[k];
        let nk = dec.factor_dims[k] as f64;
        let s = 1.0 / (c * c * nk).sqrt();
        zeta = zeta.add(&p.matrix()?.scale(Complex64::new(s, 0.0)))?;
    }
    let z = Morphism::from_matrix(n, n, alg.left_mult_matrix(&zeta)?)?;
    crate::frobenius::verify_normaliser(alg, &z, tol)?;
    Ok(z)
}

/// Verdict of the concrete complete-positivity test.
#[derive(Debug, Clone, Copy)]
pub struct OracleVerdict {
    /// True iff the Choi matrix of the extended map is positive
    /// semidefinite within tolerance.
    pub is_cp: bool,
    /// Smallest eigenvalue of that Choi matrix.
    pub min_choi_eigenvalue: f64,
    /// Its deviation from Hermitianity.
    pub hermitian_deviation: f64,
}

/// Decide complete positivity of `f : A → B` by brute concreteness: embed
/// both algebras block-diagonally into full matrix algebras, extend `f` to a
/// super-operator on the ambient matrices via the block-diagonal compression
/// (a completely positive conditional expectation, so the extension is
/// completely positive exactly when `f` is), and test its Choi matrix for
/// positivity. Entirely independent of the diagrammatic machinery.
pub fn concrete_cp_oracle(
    f: &Morphism,
    dec_a: &FactorDecomposition,
    dec_b: &FactorDecomposition,
    tol: Tolerance,
) -> Result<OracleVerdict> {
    if f.source != dec_a.carrier || f.target != dec_b.carrier {
        return Err(Error::ShapeMismatch(format!(
            "morphism is {} → {}, decompositions cover {} and {}",
            f.source.dim, f.target.dim, dec_a.carrier.dim, dec_b.carrier.dim
        )));
    }
    let embed_b = dec_b.embed_matrix()?;
    let compress_a = dec_a.compress_matrix()?;
    let super_map = embed_b.matmul(f.matrix()?)?.matmul(&compress_a)?;
    let choi = reshuffle(
        &super_map,
        (dec_a.embedding_dimension(), dec_b.embedding_dimension()),
    )?;
    let report: PsdReport = is_psd(&choi, tol);
    Ok(OracleVerdict {
        is_cp: report.is_psd,
        min_choi_eigenvalue: report.min_eigenvalue,
        hermitian_deviation: report.hermitian_deviation,
    })
}

// ---------------------------------------------------------------------------
// Groupoids.
// ---------------------------------------------------------------------------

/// A finite groupoid presented by its composition table.
///
/// Morphisms are indices `0..morphism_count`; `compose[g][h]` is `g∘h`
/// (apply `h` first) where defined. Objects are represented by their
/// identity morphisms, so `dom`/`cod` return identity indices. Every axiom
/// is validated on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Groupoid {
    compose: Vec<Vec<Option<usize>>>,
    identities: Vec<usize>,
    inverse: Vec<usize>,
    dom: Vec<usize>,
    cod: Vec<usize>,
}

impl Groupoid {
    /// Validate a composition table and set of identities as a groupoid.
    ///
    /// Checks: table shape; identity laws with a unique identity on each
    /// side of every morphism; composability exactly when domain meets
    /// codomain; domain/codomain propagation through composites;
    /// associativity; and a unique two-sided inverse for every morphism.
    pub fn new(compose: Vec<Vec<Option<usize>>>, identities: Vec<usize>) -> Result<Self> {
        let n = compose.len();
        if n == 0 {
            return Err(Error::NotAGroupoid("a groupoid here has at least one morphism".into()));
        }
        if compose.iter().any(|row| row.len() != n) {
            return Err(Error::NotAGroupoid("composition table is not square".into()));
        }
        for (g, row) in compose.iter().enumerate() {
            for (h, entry) in row.iter().enumerate() {
                if let Some(x) = entry {
                    if *x >= n {
                        return Err(Error::NotAGroupoid(format!(
                            "composite {g}∘{h} = {x} is out of range"
                        )));
                    }
                }
            }
        }
        let mut identities = identities;
        identities.sort_unstable();
        identities.dedup();
        if identities.iter().any(|&u| u >= n) {
            return Err(Error::NotAGroupoid("identity index out of range".into()));
        }
        if identities.is_empty() {
            return Err(Error::NotAGroupoid("no identities given".into()));
        }

        // Identity laws and unique domain/codomain identities.
        let mut dom = vec![usize::MAX; n];
        let mut cod = vec![usize::MAX; n];
        for g in 0..n {
            let rights: Vec<usize> = identities
                .iter()
                .copied()
                .filter(|&u| compose[g][u].is_some())
                .collect();
            if rights.len() != 1 {
                return Err(Error::NotAGroupoid(format!(
                    "morphism {g} composes with {} identities on the right, wanted exactly 1",
                    rights.len()
                )));
            }
            if compose[g][rights[0]] != Some(g) {
                return Err(Error::NotAGroupoid(format!(
                    "identity {} fails the right unit law on {g}",
                    rights[0]
                )));
            }
            dom[g] = rights[0];
            let lefts: Vec<usize> = identities
                .iter()
                .copied()
                .filter(|&u| compose[u][g].is_some())
                .collect();
            if lefts.len() != 1 {
                return Err(Error::NotAGroupoid(format!(
                    "morphism {g} composes with {} identities on the left, wanted exactly 1",
                    lefts.len()
                )));
            }
            if compose[lefts[0]][g] != Some(g) {
                return Err(Error::NotAGroupoid(format!(
                    "identity {} fails the left unit law on {g}",
                    lefts[0]
                )));
            }
            cod[g] = lefts[0];
        }

        // Composability must be governed by domain and codomain, and
        // composites must have the induced domain and codomain.
        for g in 0..n {
            for h in 0..n {
                match compose[g][h] {
                    Some(gh) => {
                        if dom[g] != cod[h] {
                            return Err(Error::NotAGroupoid(format!(
                                "{g}∘{h} is defined but dom({g}) ≠ cod({h})"
                            )));
                        }
                        if dom[gh] != dom[h] || cod[gh] != cod[g] {
                            return Err(Error::NotAGroupoid(format!(
                                "{g}∘{h} has the wrong domain or codomain"
                            )));
                        }
                    }
                    None => {
                        if dom[g] == cod[h] {
                            return Err(Error::NotAGroupoid(format!(
                                "{g}∘{h} should be defined (dom meets cod) but is not"
                            )));
                        }
                    }
                }
            }
        }

        // Associativity on every composable triple.
        for g in 0..n {
            for h in 0..n {
                let Some(gh) = compose[g][h] else { continue };
                for l in 0..n {
                    let Some(hl) = compose[h][l] else { continue };
                    if compose[gh][l] != compose[g][hl] {
                        return Err(Error::NotAGroupoid(format!(
                            "associativity fails on ({g}, {h}, {l})"
                        )));
                    }
                }
            }
        }

        // Unique two-sided inverses.
        let mut inverse = vec![usize::MAX; n];
        for g in 0..n {
            let candidates: Vec<usize> = (0..n)
                .filter(|&h| {
                    compose[h][g] == Some(dom[g]) && compose[g][h] == Some(cod[g])
                })
                .collect();
            if candidates.len() != 1 {
                return Err(Error::NotAGroupoid(format!(
                    "morphism {g} has {} two-sided inverses, wanted exactly 1",
                    candidates.len()
                )));
            }
            inverse[g] = candidates[0];
        }

        Ok(Groupoid { compose, identities, inverse, dom, cod })
    }

    /// Number of morphisms.
    pub fn morphism_count(&self) -> usize {
        self.compose.len()
    }

    /// Number of objects (identity morphisms).
    pub fn object_count(&self) -> usize {
        self.identities.len()
    }

    /// The identity morphisms, sorted ascending.
    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    /// `g∘h` (apply `h` first), if composable.
    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.compose[g][h]
    }

    /// The inverse of `g`.
    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// The identity at the domain of `g`.
    pub fn dom(&self, g: usize) -> usize {
        self.dom[g]
    }

    /// The identity at the codomain of `g`.
    pub fn cod(&self, g: usize) -> usize {
        self.cod[g]
    }

    /// The cyclic group of order `n` as a one-object groupoid.
    pub fn cyclic(n: usize) -> Groupoid {
        assert!(n >= 1);
        let compose = (0..n)
            .map(|g| (0..n).map(|h| Some((g + h) % n)).collect())
            .collect();
        Groupoid::new(compose, vec![0]).expect("cyclic groups are groupoids")
    }

    /// The Klein four-group as a one-object groupoid (indices compose by
    /// xor).
    pub fn klein_four() -> Groupoid {
        let compose = (0..4).map(|g| (0..4).map(|h| Some(g ^ h)).collect()).collect();
        Groupoid::new(compose, vec![0]).expect("the four-group is a groupoid")
    }

    /// The indiscrete groupoid on `n` objects: exactly one morphism
    /// `(x₁, x₂)` from `x₂` to `x₁` for every ordered pair, composing as
    /// `(x₁, x₂)∘(x₂, x₃) = (x₁, x₃)`, indexed `x₁·n + x₂`.
    pub fn indiscrete(n: usize) -> Groupoid {
        assert!(n >= 1);
        let idx = |a: usize, b: usize| composite(a, b, n);
        let mut compose = vec![vec![None; n * n]; n * n];
        for x1 in 0..n {
            for x2 in 0..n {
                for x3 in 0..n {
                    compose[idx(x1, x2)][idx(x2, x3)] = Some(idx(x1, x3));
                }
            }
        }
        let identities = (0..n).map(|x| idx(x, x)).collect();
        Groupoid::new(compose, identities).expect("indiscrete categories are groupoids")
    }

    /// Disjoint union, with `other`'s morphisms shifted past `self`'s.
    pub fn disjoint_union(&self, other: &Groupoid) -> Groupoid {
        let na = self.morphism_count();
        let nb = other.morphism_count();
        let n = na + nb;
        let mut compose = vec![vec![None; n]; n];
        for g in 0..na {
            for h in 0..na {
                compose[g][h] = self.compose[g][h];
            }
        }
        for g in 0..nb {
            for h in 0..nb {
                compose[na + g][na + h] = other.compose[g][h].map(|x| na + x);
            }
        }
        let mut identities = self.identities.clone();
        identities.extend(other.identities.iter().map(|&u| na + u));
        Groupoid::new(compose, identities).expect("disjoint unions of groupoids are groupoids")
    }
}

/// Recover the groupoid underlying a special dagger Frobenius algebra in
/// Rel: basis elements are the morphisms, the multiplication is the
/// composition table (must be single-valued), the unit is the set of
/// identities. All groupoid axioms are re-validated.
pub fn extract_groupoid(alg: &FrobeniusAlgebra) -> Result<Groupoid> {
    if alg.backend() != Backend::Rel {
        return Err(Error::BackendMismatch(
            "groupoid extraction reads a relational algebra; FHilb algebras classify via wedderburn".into(),
        ));
    }
    if !alg.is_special() {
        return Err(Error::NotAGroupoid(
            "the algebra is not special, so its multiplication cannot be a composition table".into(),
        ));
    }
    let n = alg.dim();
    let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
    for &(src, tgt) in &alg.mult().relation()?.pairs {
        let (g, h) = crate::numeric::split(src, n);
        if let Some(prev) = table[g][h] {
            return Err(Error::NotAGroupoid(format!(
                "multiplication relates ({g}, {h}) to both {prev} and {tgt}"
            )));
        }
        table[g][h] = Some(tgt);
    }
    let identities: Vec<usize> =
        alg.unit().relation()?.pairs.iter().map(|&(_, t)| t).collect();
    Groupoid::new(table, identities)
}

/// The Rel algebra of a groupoid: morphisms are basis elements, composition
/// is multiplication, identities form the unit. The result passes full
/// algebra validation (associativity, unit laws, the Frobenius law).
pub fn groupoid_to_algebra(g: &Groupoid, tol: Tolerance) -> Result<FrobeniusAlgebra> {
    let n = g.morphism_count();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if let Some(xy) = g.compose(x, y) {
                pairs.push((composite(x, y, n), xy));
            }
        }
    }
    let mult = Morphism::from_relation(Relation::new(n * n, n, pairs)?);
    let unit = Morphism::point_rel(n, g.identities().to_vec())?;
    FrobeniusAlgebra::new(mult, unit, tol)
}

/// Whether a relation between the morphism sets of two groupoids respects
/// inverses: whenever `x R y`, also `x⁻¹ R y⁻¹` and
/// `id_dom(x) R id_dom(y)`. (Closure under inverses makes the first
/// condition an equivalence.)
pub fn relation_respects_inverses(r: &Relation, g: &Groupoid, h: &Groupoid) -> Result<bool> {
    if r.source_size != g.morphism_count() || r.target_size != h.morphism_count() {
        return Err(Error::ShapeMismatch(format!(
            "relation is {}×{}, groupoids have {} and {} morphisms",
            r.source_size,
            r.target_size,
            g.morphism_count(),
            h.morphism_count()
        )));
    }
    for &(x, y) in &r.pairs {
        if !r.contains(g.inverse(x), h.inverse(y)) {
            return Ok(false);
        }
        if !r.contains(g.dom(x), h.dom(y)) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Element arithmetic helpers (coefficients as n×1 matrices).
// ---------------------------------------------------------------------------

fn mul_el(
    alg: &FrobeniusAlgebra,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    alg.left_mult_matrix(x)?.matmul(y)
}

fn star_el(star_map: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    star_map
        .matmul(&x.conjugate())
        .expect("star structure map matches the carrier dimension")
}

fn vdot(x: &ComplexMatrix, y: &ComplexMatrix) -> Complex64 {
    x.dagger().matmul(y).expect("vectors share a dimension").get(0, 0)
}

fn norm2(x: &ComplexMatrix) -> f64 {
    vdot(x, x).re.sqrt()
}

fn column(m: &ComplexMatrix, j: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), 1, |r, _| m.get(r, j))
}

fn lex_key(x: &ComplexMatrix) -> Vec<(i64, i64)> {
    x.entries()
        .iter()
        .map(|c| ((c.re / 1e-9).round() as i64, (c.im / 1e-9).round() as i64))
        .collect()
}

/// Group sorted values into clusters separated by a relative gap.
fn cluster(values: &[f64]) -> Vec<Vec<f64>> {
    let spread = (values[values.len() - 1] - values[0]).max(1.0);
    let gap = CLUSTER_GAP * spread;
    let mut out: Vec<Vec<f64>> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some(last) if v - *last.last().unwrap() <= gap => last.push(v),
            _ => out.push(vec![v]),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{swap, Backend};
    use crate::frobenius::{diagonal_algebra, direct_sum_algebra, pants, FrobeniusAlgebra};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn pants_fhilb(m: usize) -> FrobeniusAlgebra {
        pants(ObjectRef::new(Backend::FHilb, m), tol()).unwrap()
    }

    /// Group algebra of the two-element group with plain (unnormalised)
    /// convolution: e_g · e_h = e_{g+h}, η = e_0.
    fn z2_convolution() -> FrobeniusAlgebra {
        let mut m = ComplexMatrix::zeros(2, 4);
        m.set(0, 0, one());
        m.set(1, 1, one());
        m.set(1, 2, one());
        m.set(0, 3, one());
        let mult = Morphism::from_matrix(4, 2, m).unwrap();
        let unit = Morphism::point(&[one(), Complex64::new(0.0, 0.0)]);
        FrobeniusAlgebra::new(mult, unit, tol()).unwrap()
    }

    #[test]
    fn centre_of_pants_is_one_dimensional() {
        let alg = pants_fhilb(2);
        let basis = center(&alg, tol()).unwrap();
        assert_eq!(basis.len(), 1);
        // The centre of a full matrix block is spanned by the identity
        // matrix, i.e. the cup vector (1,0,0,1)/√2 up to phase.
        let v = &basis[0];
        assert!(v.get(1, 0).norm() < 1e-9);
        assert!(v.get(2, 0).norm() < 1e-9);
        assert!((v.get(0, 0) - v.get(3, 0)).norm() < 1e-9);
    }

    #[test]
    fn centre_of_a_diagonal_algebra_is_everything() {
        let alg = diagonal_algebra(3, tol()).unwrap();
        assert_eq!(center(&alg, tol()).unwrap().len(), 3);
    }

    #[test]
    fn diagonal_algebra_splits_into_unit_blocks() {
        let alg = diagonal_algebra(4, tol()).unwrap();
        let dec = wedderburn(&alg, tol()).unwrap();
        assert_eq!(dec.factor_dims(), &[1, 1, 1, 1]);
        for &c in dec.block_scales() {
            assert!((c - 1.0).abs() < 1e-9);
        }
        let id = dec.iso().matmul(dec.iso_inv()).unwrap();
        assert!(id.approx_eq(&ComplexMatrix::identity(4), 1e-9));
    }

    #[test]
    fn pants_is_a_single_full_block() {
        let alg = pants_fhilb(2);
        let dec = wedderburn(&alg, tol()).unwrap();
        assert_eq!(dec.factor_dims(), &[2]);
        assert!((dec.block_scales()[0] - 1.0).abs() < 1e-9);
        // Normaliser agreement: both routes must give 2^{-1/2}·id.
        let from_factors = normaliser_from_factors(&alg, &dec, tol()).unwrap();
        let direct = alg.solve_normaliser(tol()).unwrap();
        assert!(from_factors.equal(&direct, Tolerance::new(1e-9, 1e-9).unwrap()));
        let expected = ComplexMatrix::identity(4).scale(Complex64::new(0.5f64.sqrt(), 0.0));
        assert!(from_factors.matrix().unwrap().approx_eq(&expected, 1e-9));
    }

    #[test]
    fn block_sum_recovers_both_blocks_and_the_skewed_normaliser() {
        // C ⊕ M₂ on a five-dimensional carrier.
        let alg = direct_sum_algebra(
            &diagonal_algebra(1, tol()).unwrap(),
            &pants_fhilb(2),
            tol(),
        )
        .unwrap();
        let dec = wedderburn(&alg, tol()).unwrap();
        assert_eq!(dec.factor_dims(), &[1, 2]);
        let z = normaliser_from_factors(&alg, &dec, tol()).unwrap();
        let zm = z.matrix().unwrap();
        let mut expected = ComplexMatrix::identity(5).scale(Complex64::new(0.5f64.sqrt(), 0.0));
        expected.set(0, 0, one());
        assert!(zm.approx_eq(&expected, 1e-9));
        let direct = alg.solve_normaliser(tol()).unwrap();
        assert!(zm.approx_eq(direct.matrix().unwrap(), 1e-9));
    }

    #[test]
    fn convolution_scales_are_detected_and_corrected_for() {
        // Plain two-element-group convolution: two scalar blocks whose
        // idempotents (e₀±e₁)/2 have norm 1/√2, so both block scales are √2
        // and the normaliser is 2^{-1/2}·id rather than id.
        let alg = z2_convolution();
        let dec = wedderburn(&alg, tol()).unwrap();
        assert_eq!(dec.factor_dims(), &[1, 1]);
        for &c in dec.block_scales() {
            assert!((c - 2.0f64.sqrt()).abs() < 1e-9);
        }
        let z = normaliser_from_factors(&alg, &dec, tol()).unwrap();
        let expected = ComplexMatrix::identity(2).scale(Complex64::new(0.5f64.sqrt(), 0.0));
        assert!(z.matrix().unwrap().approx_eq(&expected, 1e-9));
        let direct = alg.solve_normaliser(tol()).unwrap();
        assert!(z.matrix().unwrap().approx_eq(direct.matrix().unwrap(), 1e-9));
    }

    #[test]
    fn normalisers_agree_on_a_three_block_sum() {
        let alg = direct_sum_algebra(
            &direct_sum_algebra(&pants_fhilb(1), &pants_fhilb(2), tol()).unwrap(),
            &pants_fhilb(3),
            tol(),
        )
        .unwrap();
        let dec = wedderburn(&alg, tol()).unwrap();
        assert_eq!(dec.factor_dims(), &[1, 2, 3]);
        let z = normaliser_from_factors(&alg, &dec, tol()).unwrap();
        let direct = alg.solve_normaliser(tol()).unwrap();
        assert!(z
            .matrix()
            .unwrap()
            .approx_eq(direct.matrix().unwrap(), 1e-9));
    }

    #[test]
    fn oracle_accepts_the_identity_and_rejects_the_transpose() {
        let alg = pants_fhilb(2);
        let dec = wedderburn(&alg, tol()).unwrap();
        let id = Morphism::identity(alg.carrier());
        let verdict = concrete_cp_oracle(&id, &dec, &dec, tol()).unwrap();
        assert!(verdict.is_cp);

        // Transposition E_ij ↦ E_ji is the swap matrix in pair coordinates;
        // it is positive but famously not completely positive, with Choi
        // eigenvalue −1.
        let transpose = swap(
            ObjectRef::new(Backend::FHilb, 2),
            ObjectRef::new(Backend::FHilb, 2),
        )
        .unwrap();
        let verdict = concrete_cp_oracle(&transpose, &dec, &dec, tol()).unwrap();
        assert!(!verdict.is_cp);
        assert!(verdict.min_choi_eigenvalue <= -0.5);
    }

    #[test]
    fn groupoid_validation_rejects_a_broken_table() {
        // Start from the cyclic group of order 3 and corrupt one entry.
        let mut compose: Vec<Vec<Option<usize>>> = (0..3)
            .map(|g| (0..3).map(|h| Some((g + h) % 3)).collect())
            .collect();
        compose[1][1] = Some(0); // 1∘1 should be 2
        let err = Groupoid::new(compose, vec![0]).unwrap_err();
        assert!(matches!(err, Error::NotAGroupoid(_)));
    }

    #[test]
    fn pants_in_rel_extracts_the_indiscrete_groupoid() {
        let alg = pants(ObjectRef::new(Backend::Rel, 2), tol()).unwrap();
        let g = extract_groupoid(&alg).unwrap();
        assert_eq!(g.morphism_count(), 4);
        assert_eq!(g.identities(), &[0, 3]);
        // Morphism (x₁,x₂) points from x₂ to x₁: index 1 = (0,1) has domain
        // at object 1 (identity 3) and codomain at object 0 (identity 0).
        assert_eq!(g.dom(1), 3);
        assert_eq!(g.cod(1), 0);
        assert_eq!(g.inverse(1), 2);
        assert_eq!(g, Groupoid::indiscrete(2));
    }

    #[test]
    fn groupoids_round_trip_through_their_algebras() {
        let samples = vec![
            Groupoid::cyclic(1),
            Groupoid::cyclic(2),
            Groupoid::cyclic(4),
            Groupoid::klein_four(),
            Groupoid::indiscrete(2),
            Groupoid::cyclic(2).disjoint_union(&Groupoid::indiscrete(2)),
        ];
        for g in samples {
            let alg = groupoid_to_algebra(&g, tol()).unwrap();
            assert!(alg.is_special());
            let back = extract_groupoid(&alg).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn inverse_respect_catches_the_classic_violations() {
        let z2 = Groupoid::cyclic(2);
        // {(g, e)} misses the identity-pair condition.
        let bad = Relation::new(2, 2, [(1, 0)]).unwrap();
        assert!(!relation_respects_inverses(&bad, &z2, &z2).unwrap());
        // The graph of the identity map passes.
        let good = Relation::new(2, 2, [(0, 0), (1, 1)]).unwrap();
        assert!(relation_respects_inverses(&good, &z2, &z2).unwrap());
        // Inverse-closure failure on the three-element group.
        let z3 = Groupoid::cyclic(3);
        let open = Relation::new(3, 3, [(0, 0), (1, 2)]).unwrap();
        assert!(!relation_respects_inverses(&open, &z3, &z3).unwrap());
        let closed = Relation::new(3, 3, [(0, 0), (1, 2), (2, 1)]).unwrap();
        assert!(relation_respects_inverses(&closed, &z3, &z3).unwrap());
    }

    #[test]
    fn extraction_rejects_linear_algebras() {
        let err = extract_groupoid(&diagonal_algebra(2, tol()).unwrap()).unwrap_err();
        assert!(matches!(err, Error::BackendMismatch(_)));
    }
}
