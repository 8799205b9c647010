//! Structure constants of brackets on ℝⁿ, n ≤ 6.
//!
//! A bracket is stored on the orthonormal basis `e_0 .. e_{n-1}` as the
//! coefficients `c(e_i, e_j) = Σ_k c[i,j,k] e_k` for `i < j`; the pairs
//! `(i, j)` are ordered lexicographically, which is also the coordinate
//! order used for Λ²ℝⁿ everywhere else in the crate.

mod degenerate;
mod jmap;
mod salamon;

pub use degenerate::{degeneration_search, DegenerationOutcome, DegenerationWitness, Shear};
pub use jmap::{jmap, JMap};
pub use salamon::{format_salamon, parse_salamon};

use nalgebra::DVector;
use thiserror::Error;

use crate::numerics::{self, Mat, DEFAULT_TOL};

/// Largest supported dimension.
pub const MAX_BRACKET_DIM: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BracketError {
    #[error("parse error at item {item}: {reason}")]
    Parse { item: usize, reason: String },
    #[error("coefficient {value} of c(e{i},e{j}) along e{k} is not ±1")]
    NotUnitCoefficients { i: usize, j: usize, k: usize, value: f64 },
    #[error("bracket is not 2-step nilpotent (defect {0:e})")]
    NotTwoStep(f64),
    #[error("commutator is not central (defect {0:e})")]
    CommutatorNotCentral(f64),
    #[error("matrix is singular or badly conditioned (condition number {0:e})")]
    SingularMatrix(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported dimension {0} (at most {MAX_BRACKET_DIM})")]
    UnsupportedDimension(usize),
}

/// Position of the pair `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)` with `i < j < n`, lexicographically.
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Antisymmetric bilinear map ℝⁿ × ℝⁿ → ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct LieBracket {
    dim: usize,
    coeffs: Vec<f64>,
}

impl LieBracket {
    /// The zero bracket on ℝⁿ.
    pub fn zero(dim: usize) -> Self {
        let n_pairs = dim * dim.saturating_sub(1) / 2;
        Self { dim, coeffs: vec![0.0; n_pairs * dim] }
    }

    /// Builds a bracket from `(i, j, k, value)` entries meaning
    /// `c(e_i, e_j)` has `value` along `e_k` (0-based). Entries with `i > j`
    /// are stored with flipped sign; repeated entries add up.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self, BracketError> {
        if dim > MAX_BRACKET_DIM {
            return Err(BracketError::UnsupportedDimension(dim));
        }
        let mut c = Self::zero(dim);
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(BracketError::DimensionMismatch(i.max(j).max(k) + 1, dim));
            }
            c.add(i, j, k, v);
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Raw coefficient vector, pair-major (`pair_index * dim + k`).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `e_k` in `c(e_i, e_j)`, any `i, j`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coeffs[pair_index(self.dim, i, j) * self.dim + k],
            std::cmp::Ordering::Greater => -self.coeffs[pair_index(self.dim, j, i) * self.dim + k],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Sets the coefficient of `e_k` in `c(e_i, e_j)` (and implicitly in
    /// `c(e_j, e_i)`). Ignored when `i == j`.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coeffs[pair_index(self.dim, i, j) * self.dim + k] = value,
            std::cmp::Ordering::Greater => self.coeffs[pair_index(self.dim, j, i) * self.dim + k] = -value,
            std::cmp::Ordering::Equal => {}
        }
    }

    fn add(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let cur = self.get(i, j, k);
        self.set(i, j, k, cur + value);
    }

    /// `c(e_i, e_j)` as a vector.
    pub fn basis_bracket(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_fn(self.dim, |k, _| self.get(i, j, k))
    }

    /// `c(u, v)`.
    pub fn apply(&self, u: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::<f64>::zeros(n);
        for (i, j) in pairs(n) {
            let w = u[i] * v[j] - u[j] * v[i];
            if w == 0.0 {
                continue;
            }
            let base = pair_index(n, i, j) * n;
            for k in 0..n {
                out[k] += w * self.coeffs[base + k];
            }
        }
        out
    }

    /// Matrix of `c` as a linear map Λ²ℝⁿ → ℝⁿ (columns indexed by pairs).
    pub fn as_matrix(&self) -> Mat {
        let n = self.dim;
        let np = n * n.saturating_sub(1) / 2;
        Mat::from_fn(n, np, |k, p| self.coeffs[p * n + k])
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self { dim: self.dim, coeffs: self.coeffs.iter().map(|x| x * s).collect() }
    }

    /// Zero-extension to ℝᵐ, `m ≥ n` (direct sum with an abelian factor).
    pub fn extend_to(&self, m: usize) -> Result<Self, BracketError> {
        if m < self.dim {
            return Err(BracketError::DimensionMismatch(self.dim, m));
        }
        if m > MAX_BRACKET_DIM {
            return Err(BracketError::UnsupportedDimension(m));
        }
        let mut out = Self::zero(m);
        for (i, j) in pairs(self.dim) {
            for k in 0..self.dim {
                out.set(i, j, k, self.get(i, j, k));
            }
        }
        Ok(out)
    }

    /// Largest coefficient difference to `other` (same dimension).
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.coeffs.iter().zip(&other.coeffs).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()))
    }

    /// Nonzero coefficients `(i, j, k, value)` with `i < j`.
    pub fn nonzero_entries(&self, tol: f64) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for (i, j) in pairs(n) {
            for k in 0..n {
                let v = self.get(i, j, k);
                if v.abs() > tol {
                    out.push((i, j, k, v));
                }
            }
        }
        out
    }
}

/// Largest norm of the cyclic Jacobi sum over basis triples.
pub fn jacobi_defect(c: &LieBracket) -> f64 {
    let n = c.dim();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let mut sum = DVector::<f64>::zeros(n);
                for m in 0..n {
                    let (cij, cli, cjl) = (c.get(i, j, m), c.get(l, i, m), c.get(j, l, m));
                    for k in 0..n {
                        sum[k] += cij * c.get(m, l, k) + cli * c.get(m, j, k) + cjl * c.get(m, i, k);
                    }
                }
                worst = worst.max(sum.norm());
            }
        }
    }
    worst
}

/// Largest norm of `c(c(e_i, e_j), e_l)` over basis triples.
pub fn two_step_defect(c: &LieBracket) -> f64 {
    let n = c.dim();
    let mut worst = 0.0_f64;
    for (i, j) in pairs(n) {
        for l in 0..n {
            let mut out = DVector::<f64>::zeros(n);
            for m in 0..n {
                let cij = c.get(i, j, m);
                if cij == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += cij * c.get(m, l, k);
                }
            }
            worst = worst.max(out.norm());
        }
    }
    worst
}

/// Whether every double bracket vanishes, relative to the coefficient
/// scale.
pub fn is_two_step(c: &LieBracket) -> bool {
    is_two_step_tol(c, DEFAULT_TOL)
}

pub fn is_two_step_tol(c: &LieBracket, tol: f64) -> bool {
    let scale = c.max_abs().max(1.0);
    two_step_defect(c) <= tol * scale * scale
}

/// Dimension of the commutator `Im c`.
pub fn stratum(c: &LieBracket) -> Result<usize, BracketError> {
    stratum_tol(c, DEFAULT_TOL)
}

pub fn stratum_tol(c: &LieBracket, tol: f64) -> Result<usize, BracketError> {
    if !is_two_step_tol(c, tol) {
        return Err(BracketError::NotTwoStep(two_step_defect(c)));
    }
    Ok(numerics::numerical_rank(&c.as_matrix(), tol))
}

/// `(g·c)(u, v) = g c(g⁻¹u, g⁻¹v)`.
pub fn gl_action(g: &Mat, c: &LieBracket) -> Result<LieBracket, BracketError> {
    let n = c.dim();
    if g.nrows() != n || g.ncols() != n {
        return Err(BracketError::DimensionMismatch(g.nrows(), n));
    }
    let sv = numerics::singular_values(g);
    let (smax, smin) = (sv.first().copied().unwrap_or(0.0), sv.last().copied().unwrap_or(0.0));
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond < 1e12) {
        return Err(BracketError::SingularMatrix(cond));
    }
    let ginv = g.clone().try_inverse().ok_or(BracketError::SingularMatrix(cond))?;
    let mut out = LieBracket::zero(n);
    for (i, j) in pairs(n) {
        let u = ginv.column(i).clone_owned();
        let v = ginv.column(j).clone_owned();
        let w = g * c.apply(&u, &v);
        for k in 0..n {
            out.set(i, j, k, w[k]);
        }
    }
    Ok(out)
}
