//! Ready-made algebras, channels and groupoids.
//!
//! Everything the command-line tools, the self-test suite and the
//! integration tests exercise lives here under stable names, so the same
//! objects can be regenerated on disk, loaded back, and referred to in
//! reports.

use crate::backends::{swap, Backend, Morphism, ObjectRef, Relation};
use crate::classify::{groupoid_to_algebra, Groupoid};
use crate::frobenius::{
    diagonal_algebra, direct_sum_algebra, pants, FrobeniusAlgebra,
};
use crate::numeric::{composite, Complex64, ComplexMatrix, Tolerance};
use crate::Result;

/// The endomorphism algebra of `Cᵐ` (FHilb).
pub fn pants_fhilb(m: usize, tol: Tolerance) -> Result<FrobeniusAlgebra> {
    pants(ObjectRef::new(Backend::FHilb, m), tol)
}

/// The indiscrete-groupoid algebra on an `m`-element set (Rel).
pub fn pants_rel(m: usize, tol: Tolerance) -> Result<FrobeniusAlgebra> {
    pants(ObjectRef::new(Backend::Rel, m), tol)
}

/// `C ⊕ M₂` on a five-dimensional carrier: one scalar block followed by one
/// full 2×2 block.
pub fn c_plus_m2(tol: Tolerance) -> Result<FrobeniusAlgebra> {
    direct_sum_algebra(&diagonal_algebra(1, tol)?, &pants_fhilb(2, tol)?, tol)
}

/// Plain (unnormalised) convolution algebra of a groupoid over C: basis
/// elements multiply by composing, `η` is the sum of the identities.
pub fn groupoid_algebra_fhilb(g: &Groupoid, tol: Tolerance) -> Result<FrobeniusAlgebra> {
    let n = g.morphism_count();
    let mut m = ComplexMatrix::zeros(n, n * n);
    for x in 0..n {
        for y in 0..n {
            if let Some(xy) = g.compose(x, y) {
                m.set(xy, composite(x, y, n), Complex64::new(1.0, 0.0));
            }
        }
    }
    let mut unit = vec![Complex64::new(0.0, 0.0); n];
    for &u in g.identities() {
        unit[u] = Complex64::new(1.0, 0.0);
    }
    FrobeniusAlgebra::new(
        Morphism::from_matrix(n * n, n, m)?,
        Morphism::point(&unit),
        tol,
    )
}

/// The same construction over Rel (composition table as a relation).
pub fn groupoid_algebra_rel(g: &Groupoid, tol: Tolerance) -> Result<FrobeniusAlgebra> {
    groupoid_to_algebra(g, tol)
}

/// The standard algebra corpus, as `(name, algebra)` pairs. Names double as
/// file stems when the corpus is written to disk.
pub fn standard_algebras(tol: Tolerance) -> Result<Vec<(String, FrobeniusAlgebra)>> {
    let z2 = Groupoid::cyclic(2);
    let z3 = Groupoid::cyclic(3);
    let v4 = Groupoid::klein_four();
    Ok(vec![
        ("pants1".into(), pants_fhilb(1, tol)?),
        ("pants2".into(), pants_fhilb(2, tol)?),
        ("pants3".into(), pants_fhilb(3, tol)?),
        ("diag2".into(), diagonal_algebra(2, tol)?),
        ("diag3".into(), diagonal_algebra(3, tol)?),
        ("diag4".into(), diagonal_algebra(4, tol)?),
        ("c_plus_m2".into(), c_plus_m2(tol)?),
        ("conv_z2".into(), groupoid_algebra_fhilb(&z2, tol)?),
        ("conv_z3".into(), groupoid_algebra_fhilb(&z3, tol)?),
        ("conv_v4".into(), groupoid_algebra_fhilb(&v4, tol)?),
        ("rel_z2".into(), groupoid_algebra_rel(&z2, tol)?),
        ("rel_z3".into(), groupoid_algebra_rel(&z3, tol)?),
        ("rel_v4".into(), groupoid_algebra_rel(&v4, tol)?),
        ("rel_indiscrete2".into(), pants_rel(2, tol)?),
        ("rel_indiscrete3".into(), pants_rel(3, tol)?),
    ])
}

/// Every disjoint union of cyclic groups, the four-group and indiscrete
/// groupoids with at most four morphisms, as `(name, groupoid)` pairs.
pub fn standard_groupoids() -> Vec<(String, Groupoid)> {
    let z1 = Groupoid::cyclic(1);
    let z2 = Groupoid::cyclic(2);
    let z3 = Groupoid::cyclic(3);
    vec![
        ("z1".into(), z1.clone()),
        ("z2".into(), z2.clone()),
        ("z3".into(), z3.clone()),
        ("z4".into(), Groupoid::cyclic(4)),
        ("v4".into(), Groupoid::klein_four()),
        ("z1_z1".into(), z1.disjoint_union(&z1)),
        ("z1_z2".into(), z1.disjoint_union(&z2)),
        ("z1_z3".into(), z1.disjoint_union(&z3)),
        ("z2_z2".into(), z2.disjoint_union(&z2)),
        ("z1_z1_z1".into(), z1.disjoint_union(&z1).disjoint_union(&z1)),
        ("z1_z1_z2".into(), z1.disjoint_union(&z1).disjoint_union(&z2)),
        (
            "z1_z1_z1_z1".into(),
            z1.disjoint_union(&z1).disjoint_union(&z1).disjoint_union(&z1),
        ),
        ("indiscrete2".into(), Groupoid::indiscrete(2)),
    ]
}

/// Transposition `E_ij ↦ E_ji` on the endomorphism algebra of `Cᵐ`: the
/// classic positive-but-not-completely-positive map. In pair coordinates it
/// is the swap matrix.
pub fn transpose_map(m: usize) -> Result<Morphism> {
    swap(
        ObjectRef::new(Backend::FHilb, m),
        ObjectRef::new(Backend::FHilb, m),
    )
}

/// Qubit depolarising channel with parameter `lambda` on the endomorphism
/// algebra of C²: `X ↦ λX + (1−λ)·Tr(X)·I/2`. Completely positive for
/// `λ ∈ [−1/3, 1]`.
pub fn depolarizing(lambda: f64) -> Result<Morphism> {
    let m = ComplexMatrix::from_fn(4, 4, |row, col| {
        let (i, j) = crate::numeric::split(row, 2);
        let (k, l) = crate::numeric::split(col, 2);
        let direct = if i == k && j == l { lambda } else { 0.0 };
        let mixing = if i == j && k == l { (1.0 - lambda) / 2.0 } else { 0.0 };
        Complex64::new(direct + mixing, 0.0)
    });
    Morphism::from_matrix(4, 4, m)
}

/// Full decoherence onto a chosen basis: the measurement
/// `E_nd(Cⁿ) → Cⁿ` reading off the diagonal, `E_kl ↦ δ_kl e_k`.
pub fn decoherence(n: usize) -> Result<Morphism> {
    let m = ComplexMatrix::from_fn(n, n * n, |i, col| {
        let (k, l) = crate::numeric::split(col, n);
        if k == l && k == i {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Morphism::from_matrix(n * n, n, m)
}

/// Full dephasing as an endo-channel on the endomorphism algebra:
/// `E_kl ↦ δ_kl E_kk` (diagonal kept, coherences killed).
pub fn dephasing(n: usize) -> Result<Morphism> {
    let m = ComplexMatrix::from_fn(n * n, n * n, |row, col| {
        if row == col {
            let (k, l) = crate::numeric::split(row, n);
            if k == l {
                return Complex64::new(1.0, 0.0);
            }
        }
        Complex64::new(0.0, 0.0)
    });
    Morphism::from_matrix(n * n, n * n, m)
}

/// A noisy two-outcome qubit measurement: the diagonal is read off with
/// visibility 0.8 and white noise 0.1 on each outcome.
pub fn noisy_measurement() -> Result<Morphism> {
    let m = ComplexMatrix::from_fn(2, 4, |i, col| {
        let (k, l) = crate::numeric::split(col, 2);
        let mut v = 0.0;
        if k == l {
            v += 0.1;
            if k == i {
                v += 0.8;
            }
        }
        Complex64::new(v, 0.0)
    });
    Morphism::from_matrix(4, 2, m)
}

/// The named measurement corpus: channels from an endomorphism algebra to a
/// diagonal algebra, i.e. quantum-to-classical maps.
pub fn measurement_corpus() -> Result<Vec<(String, Morphism)>> {
    Ok(vec![
        ("decoherence2".into(), decoherence(2)?),
        ("decoherence3".into(), decoherence(3)?),
        ("noisy_measurement2".into(), noisy_measurement()?),
    ])
}

/// A column-stochastic 2×2 matrix as a map between diagonal algebras.
pub fn stochastic_example() -> Result<Morphism> {
    let mut m = ComplexMatrix::zeros(2, 2);
    m.set(0, 0, Complex64::new(0.3, 0.0));
    m.set(1, 0, Complex64::new(0.7, 0.0));
    m.set(0, 1, Complex64::new(0.7, 0.0));
    m.set(1, 1, Complex64::new(0.3, 0.0));
    Morphism::from_matrix(2, 2, m)
}

/// The trace functional on the endomorphism algebra of `Cᵐ` (its counit),
/// as a morphism to the trivial algebra's carrier.
pub fn trace_map(m: usize, tol: Tolerance) -> Result<Morphism> {
    Ok(pants_fhilb(m, tol)?.counit().clone())
}

/// A relation on the two-element group sending the non-identity to the
/// identity — the textbook failure of the inverse-respecting condition.
pub fn rel_bad_morphism() -> Result<Morphism> {
    Ok(Morphism::from_relation(Relation::new(2, 2, [(1, 0)])?))
}

/// Write the whole corpus to `dir` in the text formats: every algebra from
/// [`standard_algebras`] (plus the one-point relational algebra), and the
/// named channels with their endpoints referenced by algebra name. Returns
/// the written paths.
pub fn write_corpus(dir: &std::path::Path, tol: Tolerance) -> Result<Vec<std::path::PathBuf>> {
    use crate::format::{serialize_algebra, serialize_morphism};

    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let mut algebras = standard_algebras(tol)?;
    algebras.push(("rel_indiscrete1".into(), pants_rel(1, tol)?));
    for (name, alg) in &algebras {
        let path = dir.join(format!("{name}.alg"));
        std::fs::write(&path, serialize_algebra(name, alg)?)?;
        written.push(path);
    }

    let morphisms: Vec<(&str, &str, &str, Morphism)> = vec![
        ("transpose2", "pants2", "pants2", transpose_map(2)?),
        ("depolarizing2", "pants2", "pants2", depolarizing(0.5)?),
        ("decoherence2", "pants2", "diag2", decoherence(2)?),
        ("decoherence3", "pants3", "diag3", decoherence(3)?),
        ("noisy_measurement2", "pants2", "diag2", noisy_measurement()?),
        ("stochastic2x2", "diag2", "diag2", stochastic_example()?),
        ("rel_bad", "rel_z2", "rel_z2", rel_bad_morphism()?),
    ];
    for (name, source, target, m) in &morphisms {
        let path = dir.join(format!("{name}.mor"));
        std::fs::write(&path, serialize_morphism(name, source, target, m)?)?;
        written.push(path);
    }

    Ok(written)
}
