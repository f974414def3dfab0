//! Complex matrix kernel.
//!
//! Everything upstream (algebra checks, complete-positivity tests, the
//! classification) reduces to a small set of dense complex-matrix operations
//! collected here. Index conventions are load-bearing and global:
//!
//! * storage is row-major;
//! * a composite index over a tensor product `A ⊗ B` is `i·dim(B) + j`, i.e.
//!   the **left** factor is most significant;
//! * the rearrangement [`reshuffle`] of a channel-shaped matrix
//!   `h : A*⊗A → B*⊗B` is `C[(b′,a′),(b,a)] = h[(b′,b),(a′,a)]`, which turns
//!   "h admits a Kraus-pair factorisation" into "C is positive semidefinite".
//!
//! Eigendecomposition of Hermitian matrices is delegated to `nalgebra`; the
//! rest is written out directly so that the index conventions stay visible.

use nalgebra::DMatrix;

use crate::error::Error;
use crate::Result;

/// Complex scalar used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;

/// Numerical tolerances for equality and positivity decisions.
///
/// `eq_tol` bounds entrywise deviations in morphism equalities; `psd_tol`
/// bounds how negative an eigenvalue may be while still counting as zero.
/// Both must be strictly positive and at most `1e-3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub psd_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eq_tol: 1e-9, psd_tol: 1e-9 }
    }
}

impl Tolerance {
    /// Build a tolerance pair, enforcing `0 < tol ≤ 1e-3` for both fields.
    pub fn new(eq_tol: f64, psd_tol: f64) -> Result<Self> {
        for (name, value) in [("eq_tol", eq_tol), ("psd_tol", psd_tol)] {
            if !(value > 0.0) {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be strictly positive, got {value}"
                )));
            }
            if value > 1e-3 {
                return Err(Error::InvalidTolerance(format!(
                    "{name} must be at most 1e-3, got {value}"
                )));
            }
        }
        Ok(Tolerance { eq_tol, psd_tol })
    }

    /// Same value for both tolerances.
    pub fn uniform(tol: f64) -> Result<Self> {
        Tolerance::new(tol, tol)
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// Composite index into a tensor product: left factor most significant.
#[inline]
pub fn composite(left: usize, right: usize, right_dim: usize) -> usize {
    left * right_dim + right
}

/// Inverse of [`composite`]: split `idx` into `(left, right)`.
#[inline]
pub fn split(idx: usize, right_dim: usize) -> (usize, usize) {
    (idx / right_dim, idx % right_dim)
}

impl ComplexMatrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from a row-major entry vector.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {rows}×{cols} = {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(ComplexMatrix { rows, cols, entries })
    }

    /// Build from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let v = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        ComplexMatrix::from_vec(rows, cols, v)
    }

    /// Build entrywise from a closure.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = ComplexMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}×{} by {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    /// Entrywise sum.
    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip(other, |a, b| a + b)
    }

    /// Entrywise difference.
    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(
        &self,
        other: &ComplexMatrix,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "shapes {}×{} and {}×{} differ",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, entries })
    }

    /// Scalar multiple.
    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        let entries = self.entries.iter().map(|&a| s * a).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Transpose (no conjugation).
    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// Entrywise complex conjugate (no transposition).
    pub fn conjugate(&self) -> ComplexMatrix {
        let entries = self.entries.iter().map(|a| a.conj()).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex64 {
        debug_assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Max-modulus entry norm.
    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Entrywise approximate equality: `max |a - b| ≤ tol`.
    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// Deviation from being Hermitian: `max |a - a†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        dev
    }
}

/// Kronecker product. Composite indices put the left factor most significant:
/// `kron(a,b)[(i·rb + k), (j·cb + l)] = a[i,j] · b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(
                        composite(i, k, b.rows()),
                        composite(j, l, b.cols()),
                        aij * b.get(k, l),
                    );
                }
            }
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order with matching orthonormal
/// eigenvectors as the columns of the second component. Requires
/// `‖a − a†‖ ≤ tol.eq_tol`; the computation itself runs on the Hermitian part
/// `(a + a†)/2` so that roundoff in the input cannot leak into the output.
pub fn eig_hermitian(a: &ComplexMatrix, tol: Tolerance) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dev = a.hermitian_deviation();
    if !(dev <= tol.eq_tol) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = a.rows();
    let h = DMatrix::from_fn(n, n, |r, c| (a.get(r, c) + a.get(c, r).conj()) * 0.5);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors =
        ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy)]
pub struct PsdReport {
    /// Deviation from Hermitianity, `max |a − a†|`.
    pub hermitian_deviation: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    /// True iff Hermitian within `eq_tol` and `min_eigenvalue ≥ −psd_tol`.
    pub is_psd: bool,
}

/// Test positive semidefiniteness; never errors, reports what it saw.
pub fn is_psd(a: &ComplexMatrix, tol: Tolerance) -> PsdReport {
    let dev = a.hermitian_deviation();
    if !(dev <= tol.eq_tol) {
        return PsdReport { hermitian_deviation: dev, min_eigenvalue: f64::NEG_INFINITY, is_psd: false };
    }
    match eig_hermitian(a, tol) {
        Ok((values, _)) => {
            let min = values.first().copied().unwrap_or(0.0);
            PsdReport { hermitian_deviation: dev, min_eigenvalue: min, is_psd: min >= -tol.psd_tol }
        }
        Err(_) => PsdReport {
            hermitian_deviation: dev,
            min_eigenvalue: f64::NEG_INFINITY,
            is_psd: false,
        },
    }
}

/// Factor a positive-semidefinite matrix as `a = h† · h` (square `h`).
///
/// Eigenvalues within `psd_tol` of zero are clamped to zero before taking
/// square roots, so `h` may be rank-deficient; see [`psd_factor_rank`] for the
/// rank-truncated variant.
pub fn psd_factor(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let report = is_psd(a, tol);
    if !report.is_psd {
        return Err(Error::NotPsd { min_eigenvalue: report.min_eigenvalue });
    }
    let (values, vectors) = eig_hermitian(a, tol)?;
    let n = a.rows();
    // h = Λ^{1/2} V†  so that  h†h = V Λ V† = a.
    let mut h = vectors.dagger();
    for (r, &lambda) in values.iter().enumerate() {
        let root = Complex64::new(lambda.max(0.0).sqrt(), 0.0);
        for c in 0..n {
            let v = h.get(r, c) * root;
            h.set(r, c, v);
        }
    }
    Ok(h)
}

/// Rank-truncated PSD factor: `a = g† · g` with `g` having one row per
/// eigenvalue exceeding `psd_tol`. Returns `(g, rank)`.
pub fn psd_factor_rank(a: &ComplexMatrix, tol: Tolerance) -> Result<(ComplexMatrix, usize)> {
    let report = is_psd(a, tol);
    if !report.is_psd {
        return Err(Error::NotPsd { min_eigenvalue: report.min_eigenvalue });
    }
    let (values, vectors) = eig_hermitian(a, tol)?;
    let n = a.rows();
    let kept: Vec<usize> = (0..n).filter(|&i| values[i] > tol.psd_tol).collect();
    let rank = kept.len();
    let g = ComplexMatrix::from_fn(rank, n, |r, c| {
        vectors.get(c, kept[r]).conj() * values[kept[r]].sqrt()
    });
    Ok((g, rank))
}

/// Inverse square root of a positive-definite matrix: the unique positive
/// `s` with `s · a · s = 1`. Errors with [`Error::Singular`] when the smallest
/// eigenvalue does not clear `psd_tol`.
pub fn psd_inv_sqrt(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let (values, vectors) = eig_hermitian(a, tol)?;
    let min = values.first().copied().unwrap_or(0.0);
    if min < tol.psd_tol {
        return Err(Error::Singular { min_eigenvalue: min });
    }
    spectral_apply(&values, &vectors, |l| 1.0 / l.sqrt())
}

/// Principal square root of a positive-semidefinite matrix.
pub fn psd_sqrt(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let report = is_psd(a, tol);
    if !report.is_psd {
        return Err(Error::NotPsd { min_eigenvalue: report.min_eigenvalue });
    }
    let (values, vectors) = eig_hermitian(a, tol)?;
    spectral_apply(&values, &vectors, |l| l.max(0.0).sqrt())
}

/// Apply a real function to the spectrum: `V f(Λ) V†`.
fn spectral_apply(
    values: &[f64],
    vectors: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix> {
    let n = vectors.rows();
    let mut scaled = vectors.clone();
    for c in 0..n {
        let fv = Complex64::new(f(values[c]), 0.0);
        for r in 0..n {
            let v = scaled.get(r, c) * fv;
            scaled.set(r, c, v);
        }
    }
    scaled.matmul(&vectors.dagger())
}

/// Rearrangement of a channel-shaped matrix.
///
/// For `h : A*⊗A → B*⊗B` with `dim A = n`, `dim B = m` (so `h` is `m²×n²`),
/// produces the `(m·n)×(m·n)` matrix `C[(b′,a′),(b,a)] = h[(b′,b),(a′,a)]`.
/// `C` is positive semidefinite exactly when `h` admits a factorisation
/// `h[(b′,b),(a′,a)] = Σ_x conj(g[(x,b′),a′]) · g[(x,b),a]`, and the factor is
/// recoverable from [`psd_factor_rank`] applied to `C`.
pub fn reshuffle(h: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (n, m) = dims;
    if h.rows() != m * m || h.cols() != n * n {
        return Err(Error::ShapeMismatch(format!(
            "reshuffle expects a {}×{} matrix for dims (n={n}, m={m}), got {}×{}",
            m * m,
            n * n,
            h.rows(),
            h.cols()
        )));
    }
    let mut c = ComplexMatrix::zeros(m * n, m * n);
    for bp in 0..m {
        for ap in 0..n {
            for b in 0..m {
                for a in 0..n {
                    c.set(
                        composite(bp, ap, n),
                        composite(b, a, n),
                        h.get(composite(bp, b, m), composite(ap, a, n)),
                    );
                }
            }
        }
    }
    Ok(c)
}

/// Inverse of [`reshuffle`]: rebuild the `m²×n²` channel matrix from its
/// `(m·n)×(m·n)` rearrangement. For `n = m` this is the same index map, making
/// `reshuffle` an involution there.
pub fn reshuffle_inv(c: &ComplexMatrix, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (n, m) = dims;
    if c.rows() != m * n || c.cols() != m * n {
        return Err(Error::ShapeMismatch(format!(
            "inverse reshuffle expects a {}×{} matrix for dims (n={n}, m={m}), got {}×{}",
            m * n,
            m * n,
            c.rows(),
            c.cols()
        )));
    }
    let mut h = ComplexMatrix::zeros(m * m, n * n);
    for bp in 0..m {
        for b in 0..m {
            for ap in 0..n {
                for a in 0..n {
                    h.set(
                        composite(bp, b, m),
                        composite(ap, a, n),
                        c.get(composite(bp, ap, n), composite(b, a, n)),
                    );
                }
            }
        }
    }
    Ok(h)
}

/// General (non-Hermitian) inverse via Gaussian elimination with partial
/// pivoting. Errors when a pivot falls below `tol.psd_tol`.
pub fn invert(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    if a.rows() != a.cols() {
        return Err(Error::ShapeMismatch(format!(
            "cannot invert a {}×{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut work = a.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let mut pivot = col;
        for r in col + 1..n {
            if work.get(r, col).norm() > work.get(pivot, col).norm() {
                pivot = r;
            }
        }
        let p = work.get(pivot, col);
        if p.norm() < tol.psd_tol {
            return Err(Error::Singular { min_eigenvalue: p.norm() });
        }
        if pivot != col {
            for c in 0..n {
                let (a1, a2) = (work.get(col, c), work.get(pivot, c));
                work.set(col, c, a2);
                work.set(pivot, c, a1);
                let (b1, b2) = (inv.get(col, c), inv.get(pivot, c));
                inv.set(col, c, b2);
                inv.set(pivot, c, b1);
            }
        }
        let p = work.get(col, col);
        for c in 0..n {
            work.set(col, c, work.get(col, c) / p);
            inv.set(col, c, inv.get(col, c) / p);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = work.get(r, col);
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..n {
                let wv = work.get(r, c) - factor * work.get(col, c);
                work.set(r, c, wv);
                let iv = inv.get(r, c) - factor * inv.get(col, c);
                inv.set(r, c, iv);
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tolerance_defaults_and_bounds() {
        let t = Tolerance::default();
        assert_eq!(t.eq_tol, 1e-9);
        assert_eq!(t.psd_tol, 1e-9);
        assert!(Tolerance::new(1e-2, 1e-9).is_err(), "eq_tol above the 1e-3 cap");
        assert!(Tolerance::new(1e-9, 0.0).is_err(), "zero tolerance");
        assert!(Tolerance::new(-1e-9, 1e-9).is_err(), "negative tolerance");
        assert!(Tolerance::new(1e-3, 1e-3).is_ok(), "cap itself is allowed");
    }

    #[test]
    fn kron_of_basis_projectors_lands_on_expected_composite_index() {
        // e0e0ᵀ ⊗ e1e1ᵀ over C²⊗C²: single 1 at row 0·2+1 = 1, col 1.
        let mut e00 = ComplexMatrix::zeros(2, 2);
        e00.set(0, 0, c(1.0, 0.0));
        let mut e11 = ComplexMatrix::zeros(2, 2);
        e11.set(1, 1, c(1.0, 0.0));
        let k = kron(&e00, &e11);
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(1, 1, c(1.0, 0.0));
        assert!(k.approx_eq(&expected, 0.0));
    }

    #[test]
    fn kron_respects_left_most_significant_convention() {
        let a = ComplexMatrix::from_fn(2, 2, |r, s| c((10 * r + s) as f64, 0.0));
        let b = ComplexMatrix::from_fn(3, 3, |r, s| c((100 * r + s) as f64, 1.0));
        let k = kron(&a, &b);
        for (i, j, p, q) in [(0usize, 1usize, 2usize, 0usize), (1, 1, 1, 2)] {
            assert_eq!(k.get(3 * i + p, 3 * j + q), a.get(i, j) * b.get(p, q));
        }
    }

    #[test]
    fn eig_hermitian_on_pauli_x_gives_plus_minus_one() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let (values, vectors) = eig_hermitian(&x, Tolerance::default()).unwrap();
        assert!((values[0] + 1.0).abs() < 1e-12);
        assert!((values[1] - 1.0).abs() < 1e-12);
        // Reconstruction V Λ V† = a.
        let mut lambda = ComplexMatrix::zeros(2, 2);
        lambda.set(0, 0, c(values[0], 0.0));
        lambda.set(1, 1, c(values[1], 0.0));
        let recon = vectors.matmul(&lambda).unwrap().matmul(&vectors.dagger()).unwrap();
        assert!(recon.approx_eq(&x, 1e-12));
        // Orthonormality.
        let gram = vectors.dagger().matmul(&vectors).unwrap();
        assert!(gram.approx_eq(&ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn eig_hermitian_rejects_non_hermitian_input() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            eig_hermitian(&m, Tolerance::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn indefinite_matrix_reports_min_eigenvalue_minus_one() {
        // [[1,2],[2,1]] has eigenvalues {3, −1}.
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        let report = is_psd(&m, Tolerance::default());
        assert!(!report.is_psd);
        assert!((report.min_eigenvalue + 1.0).abs() < 1e-12);
    }

    #[test]
    fn psd_factor_recovers_rank_deficient_matrix() {
        let m = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 0.0]).unwrap();
        let h = psd_factor(&m, Tolerance::default()).unwrap();
        let back = h.dagger().matmul(&h).unwrap();
        assert!(back.approx_eq(&m, 1e-9 * (1.0 + m.norm_inf())));
        let (g, rank) = psd_factor_rank(&m, Tolerance::default()).unwrap();
        assert_eq!(rank, 1);
        assert!(g.dagger().matmul(&g).unwrap().approx_eq(&m, 1e-9));
    }

    #[test]
    fn psd_inv_sqrt_of_diagonal_is_reciprocal_roots() {
        let m = ComplexMatrix::from_real(2, 2, &[4.0, 0.0, 0.0, 9.0]).unwrap();
        let s = psd_inv_sqrt(&m, Tolerance::default()).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 1.0 / 3.0]).unwrap();
        assert!(s.approx_eq(&expected, 1e-12));
        // s·a·s = 1 with the strict-positivity failure reported as Singular.
        let sas = s.matmul(&m).unwrap().matmul(&s).unwrap();
        assert!(sas.approx_eq(&ComplexMatrix::identity(2), 1e-12));
        let degenerate = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            psd_inv_sqrt(&degenerate, Tolerance::default()),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn reshuffle_of_identity_channel_has_eigenvalues_two_and_zeros() {
        // h = id on C²⊗C² viewed as a channel matrix: C = u·uᵀ with
        // u the indicator of diagonal pairs, so eigenvalues {2, 0, 0, 0}.
        let h = ComplexMatrix::identity(4);
        let cshape = reshuffle(&h, (2, 2)).unwrap();
        // Brute-force oracle: C[(b',a'),(b,a)] = h[(b',b),(a',a)].
        for bp in 0..2 {
            for ap in 0..2 {
                for b in 0..2 {
                    for a in 0..2 {
                        assert_eq!(
                            cshape.get(composite(bp, ap, 2), composite(b, a, 2)),
                            h.get(composite(bp, b, 2), composite(ap, a, 2))
                        );
                    }
                }
            }
        }
        let (values, _) = eig_hermitian(&cshape, Tolerance::default()).unwrap();
        let expected = [0.0, 0.0, 0.0, 2.0];
        for (v, e) in values.iter().zip(expected.iter()) {
            assert!((v - e).abs() < 1e-12, "eigenvalues {values:?}");
        }
    }

    #[test]
    fn reshuffle_is_an_involution_on_square_channel_shapes() {
        let h = ComplexMatrix::from_fn(9, 9, |r, s| c((r * 9 + s) as f64, (r + s) as f64));
        let once = reshuffle(&h, (3, 3)).unwrap();
        let twice = reshuffle(&once, (3, 3)).unwrap();
        assert!(twice.approx_eq(&h, 0.0));
        // And reshuffle_inv undoes reshuffle at rectangular dims.
        let g = ComplexMatrix::from_fn(4, 9, |r, s| c((r + s) as f64, r as f64));
        let shuffled = reshuffle(&g, (3, 2)).unwrap();
        let back = reshuffle_inv(&shuffled, (3, 2)).unwrap();
        assert!(back.approx_eq(&g, 0.0));
    }

    #[test]
    fn invert_recovers_identity() {
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, 1.0), c(1.0, -1.0)],
        )
        .unwrap();
        let inv = invert(&m, Tolerance::default()).unwrap();
        let prod = m.matmul(&inv).unwrap();
        assert!(prod.approx_eq(&ComplexMatrix::identity(2), 1e-12));
        let singular = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(invert(&singular, Tolerance::default()).is_err());
    }
}
