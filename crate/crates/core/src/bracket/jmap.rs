use nalgebra::DVector;

use super::{is_two_step, two_step_defect, BracketError, LieBracket};
use crate::numerics::{self, Mat, DEFAULT_TOL};

/// Metric adjoint of a 2-step bracket: for each orthonormal basis vector
/// `z` of the commutator, the skew endomorphism `j(z)` of the orthogonal
/// complement `h` defined by `⟨y, j(z)x⟩ = ⟨c(x, y), z⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct JMap {
    /// Orthonormal basis of `Im c`, as columns in ℝⁿ coordinates.
    pub z_basis: Mat,
    /// Orthonormal basis of `h = (Im c)^⊥`, as columns.
    pub h_basis: Mat,
    /// `j(z_m)` written in the `h_basis` frame.
    pub maps: Vec<Mat>,
}

impl JMap {
    /// A map given directly by its skew matrices, with `h = ℝ^{h_dim}` and
    /// `z = ℝᵏ` placed as the first and last coordinates of ℝ^{h_dim+k}.
    pub fn from_maps(h_dim: usize, maps: Vec<Mat>) -> Self {
        let k = maps.len();
        let n = h_dim + k;
        let h_basis = Mat::identity(n, n).columns(0, h_dim).clone_owned();
        let z_basis = Mat::identity(n, n).columns(h_dim, k).clone_owned();
        Self { z_basis, h_basis, maps }
    }

    pub fn k(&self) -> usize {
        self.maps.len()
    }

    pub fn h_dim(&self) -> usize {
        self.h_basis.ncols()
    }

    /// `Tr(j*j)` for the product `¼ tr(XᵀY)` on skew matrices.
    pub fn trace_norm(&self) -> f64 {
        self.maps.iter().map(|m| 0.25 * m.norm_squared()).sum()
    }

    /// `s·j`.
    pub fn scaled(&self, s: f64) -> Self {
        Self { maps: self.maps.iter().map(|m| m * s).collect(), ..self.clone() }
    }

    /// `z ↦ j(q z)` for a k×k matrix `q`.
    pub fn precompose(&self, q: &Mat) -> Self {
        let k = self.k();
        assert_eq!((q.nrows(), q.ncols()), (k, k), "precompose: shape");
        let maps = (0..k)
            .map(|col| {
                let mut acc = Mat::zeros(self.h_dim(), self.h_dim());
                for m in 0..k {
                    acc += &self.maps[m] * q[(m, col)];
                }
                acc
            })
            .collect();
        Self { maps, ..self.clone() }
    }

    /// `z ↦ r j(z) rᵀ` for an orthogonal `r` on `h`.
    pub fn conjugate(&self, r: &Mat) -> Self {
        let maps = self.maps.iter().map(|m| r * m * r.transpose()).collect();
        Self { maps, ..self.clone() }
    }

    /// Largest deviation from skew-symmetry over all `j(z)`.
    pub fn skew_defect(&self) -> f64 {
        self.maps.iter().map(numerics::skewness_defect).fold(0.0, f64::max)
    }

    /// Rebuilds the bracket on ℝⁿ from the frames and the maps.
    pub fn to_bracket(&self) -> LieBracket {
        let n = self.h_basis.nrows();
        let hd = self.h_dim();
        // c(h_a, h_b) = Σ_m j(z_m)[b][a] z_m
        let mut on_h = vec![DVector::<f64>::zeros(n); hd * hd];
        for (m, jm) in self.maps.iter().enumerate() {
            let z = self.z_basis.column(m);
            for a in 0..hd {
                for b in 0..hd {
                    let w = jm[(b, a)];
                    if w != 0.0 {
                        on_h[a * hd + b] += z * w;
                    }
                }
            }
        }
        let mut c = LieBracket::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                let mut v = DVector::<f64>::zeros(n);
                for a in 0..hd {
                    let hia = self.h_basis[(i, a)];
                    if hia == 0.0 {
                        continue;
                    }
                    for b in 0..hd {
                        let w = hia * self.h_basis[(j, b)];
                        if w != 0.0 {
                            v += &on_h[a * hd + b] * w;
                        }
                    }
                }
                for k in 0..n {
                    c.set(i, j, k, v[k]);
                }
            }
        }
        c
    }
}

/// Extracts the metric adjoint of a 2-step bracket.
///
/// The commutator basis is obtained by projecting `e_1, …, e_n` onto
/// `Im c` in index order and orthonormalizing, so brackets whose
/// commutator is spanned by standard vectors keep those vectors.
pub fn jmap(c: &LieBracket) -> Result<JMap, BracketError> {
    if !is_two_step(c) {
        return Err(BracketError::NotTwoStep(two_step_defect(c)));
    }
    let n = c.dim();
    let z_basis = numerics::canonical_span_basis(&c.as_matrix(), DEFAULT_TOL);
    let scale = c.max_abs().max(1.0);
    let mut worst = 0.0_f64;
    for m in 0..z_basis.ncols() {
        let z = z_basis.column(m).clone_owned();
        for l in 0..n {
            let e = DVector::from_fn(n, |i, _| if i == l { 1.0 } else { 0.0 });
            worst = worst.max(c.apply(&z, &e).norm());
        }
    }
    if worst > DEFAULT_TOL * scale {
        return Err(BracketError::CommutatorNotCentral(worst));
    }
    let h_basis = numerics::canonical_complement_basis(&z_basis);
    let hd = h_basis.ncols();
    let maps = (0..z_basis.ncols())
        .map(|m| {
            let z = z_basis.column(m).clone_owned();
            let mut jm = Mat::zeros(hd, hd);
            for a in 0..hd {
                for b in a + 1..hd {
                    let ha = h_basis.column(a).clone_owned();
                    let hb = h_basis.column(b).clone_owned();
                    // ⟨e_b, j e_a⟩ = ⟨c(h_a, h_b), z⟩
                    let v = c.apply(&ha, &hb).dot(&z);
                    jm[(b, a)] = v;
                    jm[(a, b)] = -v;
                }
            }
            jm
        })
        .collect();
    Ok(JMap { z_basis, h_basis, maps })
}
