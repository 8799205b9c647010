//! Small dense linear algebra shared by the other modules.
//!
//! Everything here works on matrices of at most a few dozen rows; the
//! heavy lifting (symmetric eigenvalues, SVD, QR) is delegated to
//! `nalgebra`. What this module adds is the sorting and tolerance policy
//! the rest of the crate relies on.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Dense real matrix, row/column indexed from zero.
pub type Mat = DMatrix<f64>;

/// Relative tolerance for rank, kernel and equality decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest number of rows or columns any operation in this crate needs.
pub const MAX_DIM: usize = 21;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Eigen-decomposition of a symmetric matrix with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct SymSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are the eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: Mat,
}

impl SymSpectrum {
    /// `Q diag(λ) Qᵀ`.
    pub fn reconstruct(&self) -> Mat {
        let d = Mat::from_diagonal(&DVector::from_vec(self.eigenvalues.clone()));
        &self.eigenvectors * d * self.eigenvectors.transpose()
    }

    /// Applies `f` to the eigenvalues and reassembles the matrix.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Mat {
        let d = Mat::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|&x| f(x)),
        ));
        &self.eigenvectors * d * self.eigenvectors.transpose()
    }
}

/// Largest absolute entry.
pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest absolute entry of `m - mᵀ`.
pub fn asymmetry(m: &Mat) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Largest absolute entry of `m + mᵀ` (zero for skew matrices).
pub fn skewness_defect(m: &Mat) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
        }
    }
    worst
}

/// Symmetric eigen-decomposition, eigenvalues ascending.
///
/// The input may be asymmetric by at most `1e-12 * (1 + max|m|)`; the
/// symmetric part is what gets decomposed.
pub fn sym_eig(m: &Mat) -> Result<SymSpectrum, NumericsError> {
    if m.nrows() != m.ncols() {
        return Err(NumericsError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let asym = asymmetry(m);
    if asym > 1e-12 * (1.0 + max_abs(m)) {
        return Err(NumericsError::NotSymmetric(asym));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(SymSpectrum { eigenvalues: Vec::new(), eigenvectors: Mat::zeros(0, 0) });
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).clone_owned();
        // first nonzero entry positive, so repeated calls agree
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SymSpectrum { eigenvalues, eigenvectors })
}

/// Singular values in descending order.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `tol * max(1, σ_max)`.
pub fn numerical_rank(m: &Mat, tol: f64) -> usize {
    let sv = singular_values(m);
    let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
    sv.iter().filter(|&&s| s > tol * scale).count()
}

/// Number of singular values at or below `tol * max(1, σ_max)`, counted
/// over `min(rows, cols)` singular values.
pub fn kernel_dim(m: &Mat, tol: f64) -> usize {
    m.nrows().min(m.ncols()) - numerical_rank(m, tol)
}

/// Deterministic orthogonal matrix: QR of a seeded Gaussian matrix with
/// the signs of `R`'s diagonal absorbed into `Q` (Haar distributed).
pub fn random_orthogonal(n: usize, seed: u64) -> Mat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_orthogonal_with(n, &mut rng)
}

/// As [`random_orthogonal`], drawing from a caller-supplied generator.
pub fn random_orthogonal_with<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Mat {
    let g = gaussian_matrix(n, n, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Matrix of independent standard normal entries.
pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Mat {
    Mat::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Orthonormal basis (as columns) of the column span of `m`, obtained by
/// projecting the standard basis vectors onto the span in index order and
/// running Gram–Schmidt on the projections that survive.
///
/// The result depends only on the span, not on how `m` was presented.
pub fn canonical_span_basis(m: &Mat, tol: f64) -> Mat {
    let n = m.nrows();
    if n == 0 || m.ncols() == 0 {
        return Mat::zeros(n, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol * smax.max(1.0))
        .collect();
    let mut basis = Mat::zeros(n, keep.len());
    for (dst, &src) in keep.iter().enumerate() {
        basis.set_column(dst, &u.column(src));
    }
    let projector = &basis * basis.transpose();
    gram_schmidt_from_projector(&projector, keep.len())
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `basis` (which must have orthonormal columns), built the same way as
/// [`canonical_span_basis`].
pub fn canonical_complement_basis(basis: &Mat) -> Mat {
    let n = basis.nrows();
    let projector = Mat::identity(n, n) - basis * basis.transpose();
    gram_schmidt_from_projector(&projector, n - basis.ncols())
}

fn gram_schmidt_from_projector(projector: &Mat, rank: usize) -> Mat {
    let n = projector.nrows();
    let mut residuals: Vec<DVector<f64>> = (0..n).map(|i| projector.column(i).clone_owned()).collect();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(rank);
    while out.len() < rank {
        let norms: Vec<f64> = residuals.iter().map(|v| v.norm()).collect();
        let top = norms.iter().copied().fold(0.0_f64, f64::max);
        if top <= 1e-12 {
            break;
        }
        // first index whose residual is within a factor two of the largest
        let idx = norms.iter().position(|&x| x >= 0.5 * top).expect("top is attained");
        let v = residuals[idx].clone() / norms[idx];
        for r in residuals.iter_mut() {
            let d = r.dot(&v);
            *r -= &v * d;
        }
        out.push(v);
    }
    let mut m = Mat::zeros(n, out.len());
    for (j, v) in out.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Symmetric positive semi-definite square root.
pub fn sym_sqrt(m: &Mat) -> Result<Mat, NumericsError> {
    Ok(sym_eig(m)?.map(|x| x.max(0.0).sqrt()))
}

/// Inverse symmetric square root; eigenvalues must be positive.
pub fn sym_inv_sqrt(m: &Mat) -> Result<Mat, NumericsError> {
    Ok(sym_eig(m)?.map(|x| 1.0 / x.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_eigenvalues() {
        let s = sym_eig(&Mat::identity(2, 2)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_is_sorted() {
        let (alpha, beta) = (0.25, 3.0);
        let m = Mat::from_diagonal(&DVector::from_vec(vec![beta, alpha]));
        let s = sym_eig(&m).unwrap();
        assert_eq!(s.eigenvalues, vec![alpha, beta]);
    }

    #[test]
    fn two_by_two_matches_quadratic_formula() {
        let (x, y, z) = (0.7, 0.3, 0.2);
        let m = Mat::from_row_slice(2, 2, &[x, z, z, y]);
        let s = sym_eig(&m).unwrap();
        // roots of λ² − (x+y)λ + (xy − z²)
        let tr: f64 = x + y;
        let det = x * y - z * z;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let lo = (tr - disc) / 2.0;
        let hi = (tr + disc) / 2.0;
        assert!((s.eigenvalues[0] - lo).abs() < 1e-14);
        assert!((s.eigenvalues[1] - hi).abs() < 1e-14);
        assert!((s.eigenvalues[0] + s.eigenvalues[1] - tr).abs() < 1e-10);
        assert!((s.eigenvalues[0] * s.eigenvalues[1] - det).abs() < 1e-10);
        assert!(max_abs(&(s.reconstruct() - &m)) < 1e-12);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Mat::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(sym_eig(&m), Err(NumericsError::NotSymmetric(_))));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_dim(&Mat::zeros(6, 6), 1e-9), 6);
        assert_eq!(kernel_dim(&Mat::identity(6, 6), 1e-9), 0);
        let v = DVector::from_vec(vec![1.0, 2.0, -1.0, 0.5, 0.0, 3.0]).normalize();
        let outer = &v * v.transpose();
        assert_eq!(kernel_dim(&outer, 1e-9), 5);
        assert_eq!(numerical_rank(&outer, 1e-9), 1);
    }

    #[test]
    fn orthogonal_examples() {
        let q1 = random_orthogonal(1, 3);
        assert!((q1[(0, 0)].abs() - 1.0).abs() < 1e-15);
        for seed in 0..20 {
            let q = random_orthogonal(4, seed);
            let err = max_abs(&(q.transpose() * &q - Mat::identity(4, 4)));
            assert!(err <= 1e-12, "seed {seed}: {err}");
        }
        assert_eq!(random_orthogonal(5, 42), random_orthogonal(5, 42));
        assert_ne!(random_orthogonal(5, 42), random_orthogonal(5, 43));
    }

    #[test]
    fn span_basis_prefers_standard_vectors() {
        // span of e5, e6 presented through a rotated frame
        let mut m = Mat::zeros(6, 2);
        m[(4, 0)] = 0.6;
        m[(5, 0)] = 0.8;
        m[(4, 1)] = -0.8;
        m[(5, 1)] = 0.6;
        let b = canonical_span_basis(&m, 1e-9);
        assert_eq!(b.ncols(), 2);
        assert!((b[(4, 0)] - 1.0).abs() < 1e-12);
        assert!((b[(5, 1)] - 1.0).abs() < 1e-12);
        let c = canonical_complement_basis(&b);
        assert_eq!(c.ncols(), 4);
        for i in 0..4 {
            assert!((c[(i, i)] - 1.0).abs() < 1e-12);
        }
    }
}
