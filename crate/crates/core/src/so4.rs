//! The splitting so(4) ≅ ℝ³₋ ⊕ ℝ³₊ into anti-self-dual and self-dual
//! parts.
//!
//! The basis element `e_1^±` (resp. `e_2^±`, `e_3^±`) is the skew matrix
//! obtained by setting ξ = 1 (resp. ψ, χ) and the other parameters to 0 in
//!
//! ```text
//!        ⎡ 0   ξ   ψ   χ ⎤            ⎡ 0   ξ   ψ   χ ⎤
//!   −:   ⎢−ξ   0  −χ   ψ ⎥       +:   ⎢−ξ   0   χ  −ψ ⎥
//!        ⎢−ψ   χ   0  −ξ ⎥            ⎢−ψ  −χ   0   ξ ⎥
//!        ⎣−χ  −ψ   ξ   0 ⎦            ⎣−χ   ψ  −ξ   0 ⎦
//! ```
//!
//! i.e. `e_1^∓ = E₁₂ ∓ E₃₄`, `e_2^∓ = E₁₃ ± E₂₄`, `e_3^∓ = E₁₄ ∓ E₂₃` with
//! `E_ab = e_a e_bᵀ − e_b e_aᵀ`. All six are orthonormal for
//! `⟨X, Y⟩ = ¼ tr(XᵀY)`.

use nalgebra::{Matrix3, Matrix4, Vector3};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum So4Error {
    #[error("matrix is not skew-symmetric (defect {0:e})")]
    NotSkew(f64),
}

const SKEW_TOL: f64 = 1e-12;

/// Coordinates of a skew 4×4 matrix in the basis `e_i^-`, `e_i^+`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SplitVector {
    pub minus: Vector3<f64>,
    pub plus: Vector3<f64>,
}

impl SplitVector {
    pub fn new(minus: [f64; 3], plus: [f64; 3]) -> Self {
        Self { minus: Vector3::from(minus), plus: Vector3::from(plus) }
    }

    /// Norm for the product making `e_i^±` orthonormal.
    pub fn norm(&self) -> f64 {
        (self.minus.norm_squared() + self.plus.norm_squared()).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.minus - other.minus).amax().max((self.plus - other.plus).amax())
    }
}

fn skew_defect4(x: &Matrix4<f64>) -> f64 {
    (x + x.transpose()).amax()
}

/// `E_ab` with `(a, b) = +1`, `(b, a) = −1`.
fn elementary(a: usize, b: usize) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(a, b)] = 1.0;
    m[(b, a)] = -1.0;
    m
}

/// `e_i^-` for `i ∈ {0, 1, 2}`.
pub fn minus_basis(i: usize) -> Matrix4<f64> {
    unsplit(&SplitVector { minus: Vector3::ith(i, 1.0), plus: Vector3::zeros() })
}

/// `e_i^+` for `i ∈ {0, 1, 2}`.
pub fn plus_basis(i: usize) -> Matrix4<f64> {
    unsplit(&SplitVector { minus: Vector3::zeros(), plus: Vector3::ith(i, 1.0) })
}

/// Coordinates of a skew matrix in the `e^±` basis.
pub fn split(x: &Matrix4<f64>) -> Result<SplitVector, So4Error> {
    let defect = skew_defect4(x);
    if defect > SKEW_TOL * (1.0 + x.amax()) {
        return Err(So4Error::NotSkew(defect));
    }
    Ok(split_unchecked(x))
}

/// [`split`] without the skew check; reads only the upper triangle.
pub fn split_unchecked(x: &Matrix4<f64>) -> SplitVector {
    let (x12, x13, x14) = (x[(0, 1)], x[(0, 2)], x[(0, 3)]);
    let (x23, x24, x34) = (x[(1, 2)], x[(1, 3)], x[(2, 3)]);
    SplitVector {
        minus: Vector3::new(0.5 * (x12 - x34), 0.5 * (x13 + x24), 0.5 * (x14 - x23)),
        plus: Vector3::new(0.5 * (x12 + x34), 0.5 * (x13 - x24), 0.5 * (x14 + x23)),
    }
}

/// Inverse of [`split`].
pub fn unsplit(v: &SplitVector) -> Matrix4<f64> {
    let (m, p) = (&v.minus, &v.plus);
    elementary(0, 1) * (m[0] + p[0])
        + elementary(2, 3) * (p[0] - m[0])
        + elementary(0, 2) * (m[1] + p[1])
        + elementary(1, 3) * (m[1] - p[1])
        + elementary(0, 3) * (m[2] + p[2])
        + elementary(1, 2) * (p[2] - m[2])
}

/// Conjugation by `diag(−1, 1, 1, 1)`, read back in split coordinates.
pub fn apply_tau(v: &SplitVector) -> SplitVector {
    let d = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0));
    split_unchecked(&(d * unsplit(v) * d))
}

/// `⟨X, Y⟩ = ¼ tr(XᵀY)`.
pub fn inner(x: &Matrix4<f64>, y: &Matrix4<f64>) -> f64 {
    0.25 * (x.transpose() * y).trace()
}

/// so(3) → so(4) induced by ℝ³ ↪ ℝ⁴ onto the last three coordinates.
///
/// With this placement the image splits as `plus = −minus`.
pub fn embed_so3(x: &Matrix3<f64>) -> Result<Matrix4<f64>, So4Error> {
    let defect = (x + x.transpose()).amax();
    if defect > SKEW_TOL * (1.0 + x.amax()) {
        return Err(So4Error::NotSkew(defect));
    }
    let mut out = Matrix4::zeros();
    out.fixed_view_mut::<3, 3>(1, 1).copy_from(x);
    Ok(out)
}
