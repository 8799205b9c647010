//! Invariants of a metric 2-step algebra under the orthogonal group, and
//! the metric-level constructions around them: reconstruction of the
//! reduced coefficients, the pushforward metric on `Im c*`, the
//! straight-line retraction onto isometric `j`, and trace normalization.
//!
//! Throughout, skew matrices carry the product `g₀(X, Y) = ¼ tr(XᵀY)`,
//! which makes the split basis `e_i^±` orthonormal.

use nalgebra::{Matrix3, Matrix4};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bracket::{jmap, BracketError, JMap, LieBracket};
use crate::numerics::{self, Mat, NumericsError, DEFAULT_TOL};
use crate::so4::{self, SplitVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModuliError {
    #[error("unsupported codomain so({h_dim}) for a {k}-dimensional commutator")]
    UnsupportedCodomain { h_dim: usize, k: usize },
    #[error("t = {t} lies outside [{lo}, {hi}]")]
    Infeasible { t: f64, lo: f64, hi: f64 },
    #[error("the zero map cannot be normalized")]
    ZeroMap,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// The τ-class of `(α₋, β₋, α₊, β₊, t)`, stored in canonical order.
///
/// For a 3-dimensional commutator both spectra have three entries
/// `ω ≤ α ≤ β` and coincide; `omega` then carries the smallest one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModuliPoint {
    pub alpha_minus: f64,
    pub beta_minus: f64,
    pub alpha_plus: f64,
    pub beta_plus: f64,
    pub t: f64,
    pub stratum: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

impl ModuliPoint {
    pub fn new(alpha_minus: f64, beta_minus: f64, alpha_plus: f64, beta_plus: f64, t: f64) -> Self {
        Self { alpha_minus, beta_minus, alpha_plus, beta_plus, t, stratum: 2, omega: None }
    }

    pub fn tuple(&self) -> [f64; 5] {
        [self.alpha_minus, self.beta_minus, self.alpha_plus, self.beta_plus, self.t]
    }

    /// Largest coordinate difference, `omega` included when both have it.
    pub fn distance(&self, other: &Self) -> f64 {
        let base = self.tuple().iter().zip(other.tuple()).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
        match (self.omega, other.omega) {
            (Some(x), Some(y)) => base.max((x - y).abs()),
            _ => base,
        }
    }

    /// `α₋ + β₋ + α₊ + β₊`, equal to `Tr(j*j)` for k ≤ 2.
    pub fn spectral_sum(&self) -> f64 {
        self.alpha_minus + self.beta_minus + self.alpha_plus + self.beta_plus
    }

    /// Exchanges the two factors.
    pub fn swapped(&self) -> Self {
        Self {
            alpha_minus: self.alpha_plus,
            beta_minus: self.beta_plus,
            alpha_plus: self.alpha_minus,
            beta_plus: self.beta_minus,
            ..*self
        }
    }
}

/// Reduced coefficients of a `k = 2` map: in the split bases
///
/// ```text
///   j(e₁) = a₋ e₁⁻ + p e₁⁺,     j(e₂) = b₋ e₂⁻ + r e₁⁺ + q e₂⁺.
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct CanonicalForm {
    pub a_minus: f64,
    pub b_minus: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl CanonicalForm {
    pub fn new(a_minus: f64, b_minus: f64, p: f64, q: f64, r: f64) -> Self {
        Self { a_minus, b_minus, p, q, r }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.a_minus, self.b_minus, self.p, self.q, self.r]
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.as_array().iter().zip(other.as_array()).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()))
    }

    /// The two components as 3×2 matrices (rows `e_i^±`, columns `e₁, e₂`).
    pub fn split_j(&self) -> SplitJ {
        let mut minus = Mat::zeros(3, 2);
        let mut plus = Mat::zeros(3, 2);
        minus[(0, 0)] = self.a_minus;
        minus[(1, 1)] = self.b_minus;
        plus[(0, 0)] = self.p;
        plus[(0, 1)] = self.r;
        plus[(1, 1)] = self.q;
        SplitJ { minus, plus }
    }

    /// The map ℝ² → so(4) with these coefficients.
    pub fn to_jmap(&self) -> JMap {
        self.split_j().to_jmap()
    }
}

/// The two components `j₋, j₊ : ℝᵏ → ℝ³` of a map into so(4), as 3×k
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitJ {
    pub minus: Mat,
    pub plus: Mat,
}

impl SplitJ {
    pub fn k(&self) -> usize {
        self.minus.ncols()
    }

    pub fn column(&self, m: usize) -> SplitVector {
        SplitVector {
            minus: self.minus.fixed_view::<3, 1>(0, m).into_owned(),
            plus: self.plus.fixed_view::<3, 1>(0, m).into_owned(),
        }
    }

    pub fn from_columns(cols: &[SplitVector]) -> Self {
        let k = cols.len();
        let mut minus = Mat::zeros(3, k);
        let mut plus = Mat::zeros(3, k);
        for (m, v) in cols.iter().enumerate() {
            for i in 0..3 {
                minus[(i, m)] = v.minus[i];
                plus[(i, m)] = v.plus[i];
            }
        }
        Self { minus, plus }
    }

    /// `j₋*j₋` (k×k).
    pub fn gram_minus(&self) -> Mat {
        self.minus.transpose() * &self.minus
    }

    /// `j₊*j₊` (k×k).
    pub fn gram_plus(&self) -> Mat {
        self.plus.transpose() * &self.plus
    }

    /// `j*j = j₋*j₋ + j₊*j₊`.
    pub fn gram(&self) -> Mat {
        self.gram_minus() + self.gram_plus()
    }

    /// The same map with `j(z)` conjugated by `diag(−1, 1, 1, 1)`.
    pub fn tau(&self) -> Self {
        let cols: Vec<SplitVector> = (0..self.k()).map(|m| so4::apply_tau(&self.column(m))).collect();
        Self::from_columns(&cols)
    }

    /// Back to skew 4×4 matrices on `h = ℝ⁴`, `z = ℝᵏ`.
    pub fn to_jmap(&self) -> JMap {
        let maps = (0..self.k())
            .map(|m| {
                let x = so4::unsplit(&self.column(m));
                Mat::from_fn(4, 4, |a, b| x[(a, b)])
            })
            .collect();
        JMap::from_maps(4, maps)
    }
}

/// Places each `j(z)` in so(4): so(2), so(3) are padded via
/// [`so4::embed_so3`]; for `k = 1` a map into so(5) is first conjugated so
/// that a kernel vector becomes the last basis vector.
pub fn split_jmap(j: &JMap) -> Result<SplitJ, ModuliError> {
    let (hd, k) = (j.h_dim(), j.k());
    let to_so4 = |m: &Mat| -> Result<Matrix4<f64>, ModuliError> {
        match hd {
            0 | 1 => Ok(Matrix4::zeros()),
            2 | 3 => {
                let mut x = Matrix3::zeros();
                for a in 0..hd {
                    for b in 0..hd {
                        x[(a, b)] = m[(a, b)];
                    }
                }
                Ok(so4::embed_so3(&x).map_err(|_| ModuliError::InvalidArgument("j(z) is not skew".into()))?)
            }
            4 => Ok(Matrix4::from_fn(|a, b| m[(a, b)])),
            5 if k == 1 => {
                let svd = m.clone().svd(false, true);
                let vt = svd.v_t.expect("right singular vectors requested");
                let smallest = (0..5)
                    .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))
                    .expect("nonempty");
                let kernel = Mat::from_fn(5, 1, |i, _| vt[(smallest, i)]);
                let frame = numerics::canonical_complement_basis(&kernel);
                let reduced = frame.transpose() * m * &frame;
                Ok(Matrix4::from_fn(|a, b| reduced[(a, b)]))
            }
            _ => Err(ModuliError::UnsupportedCodomain { h_dim: hd, k }),
        }
    };
    if k > 3 {
        return Err(ModuliError::UnsupportedCodomain { h_dim: hd, k });
    }
    let cols = j
        .maps
        .iter()
        .map(|m| to_so4(m).map(|x| so4::split_unchecked(&x)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SplitJ::from_columns(&cols))
}

fn ascending_spectrum(m: &Mat) -> Result<Vec<f64>, ModuliError> {
    Ok(numerics::sym_eig(m)?.eigenvalues.into_iter().map(|x| x.max(0.0)).collect())
}

/// Invariants read straight off a split map, before τ-canonicalization.
pub fn raw_invariants(s: &SplitJ) -> Result<ModuliPoint, ModuliError> {
    let k = s.k();
    let gm = s.gram_minus();
    let gp = s.gram_plus();
    let t = (&gp * &gm).trace();
    let spec_m = ascending_spectrum(&gm)?;
    let spec_p = ascending_spectrum(&gp)?;
    let point = match k {
        0 => ModuliPoint { stratum: 0, ..ModuliPoint::new(0.0, 0.0, 0.0, 0.0, 0.0) },
        1 => ModuliPoint { stratum: 1, ..ModuliPoint::new(0.0, spec_m[0], 0.0, spec_p[0], t) },
        2 => ModuliPoint::new(spec_m[0], spec_m[1], spec_p[0], spec_p[1], t),
        3 => ModuliPoint {
            stratum: 3,
            omega: Some(spec_m[0]),
            ..ModuliPoint::new(spec_m[1], spec_m[2], spec_p[1], spec_p[2], t)
        },
        _ => return Err(ModuliError::UnsupportedCodomain { h_dim: 4, k }),
    };
    Ok(point)
}

/// `(α₋, β₋, α₊, β₊, t)` of a metric adjoint, τ-canonicalized.
pub fn invariants(j: &JMap) -> Result<ModuliPoint, ModuliError> {
    Ok(canonicalize_tau(&raw_invariants(&split_jmap(j)?)?))
}

/// Invariants of `c` after scaling to `Tr(j*j) = 2` (the abelian bracket
/// maps to the origin).
pub fn normalized_invariants(c: &LieBracket) -> Result<ModuliPoint, ModuliError> {
    let j = jmap(c)?;
    if j.k() == 0 {
        return invariants(&j);
    }
    invariants(&normalize_trace(&j, 2.0)?)
}

/// Whether the factors must be exchanged to reach the fundamental domain
/// `β₋ − α₋ ≥ β₊ − α₊`; ties are broken by `β₋ ≥ β₊`, then `α₋ ≥ α₊`.
fn needs_swap(m: &ModuliPoint) -> bool {
    let scale = 1.0 + m.beta_minus.abs().max(m.beta_plus.abs());
    let tol = DEFAULT_TOL * scale;
    let gap_m = m.beta_minus - m.alpha_minus;
    let gap_p = m.beta_plus - m.alpha_plus;
    for (mine, theirs) in [(gap_m, gap_p), (m.beta_minus, m.beta_plus), (m.alpha_minus, m.alpha_plus)] {
        if mine < theirs - tol {
            return true;
        }
        if mine > theirs + tol {
            return false;
        }
    }
    false
}

pub fn canonicalize_tau(m: &ModuliPoint) -> ModuliPoint {
    if needs_swap(m) {
        m.swapped()
    } else {
        *m
    }
}

/// Admissible range of `t` for given spectra.
pub fn t_interval(alpha_minus: f64, beta_minus: f64, alpha_plus: f64, beta_plus: f64) -> (f64, f64) {
    (alpha_minus * beta_plus + alpha_plus * beta_minus, alpha_minus * alpha_plus + beta_minus * beta_plus)
}

/// Slack allowed when testing `t` against its interval.
fn t_slack(hi: f64) -> f64 {
    DEFAULT_TOL * hi.abs().max(1.0)
}

/// Solves `a₋² = α₋, b₋² = β₋, p² + q² + r² = α₊ + β₊, p²q² = α₊β₊,
/// α₋p² + β₋(q² + r²) = t` with nonnegative unknowns.
///
/// When `β₋ > α₋` the last equation is linear in `p²`. When `β₋ = α₋` it
/// carries no information and `r = 0`, `(p, q) = (√β₊, √α₊)` is returned.
pub fn canonical_coeffs(m: &ModuliPoint) -> Result<CanonicalForm, ModuliError> {
    if m.omega.is_some() {
        return Err(ModuliError::InvalidArgument("coefficients exist only for commutators of dimension ≤ 2".into()));
    }
    let ModuliPoint { alpha_minus: am, beta_minus: bm, alpha_plus: ap, beta_plus: bp, t, .. } = *m;
    let slack = DEFAULT_TOL * (1.0 + bm.abs().max(bp.abs()));
    if am < -slack || ap < -slack || am > bm + slack || ap > bp + slack {
        return Err(ModuliError::InvalidArgument(format!("spectra not ordered: ({am}, {bm}), ({ap}, {bp})")));
    }
    let (am, bm, ap, bp) = (am.max(0.0), bm.max(0.0), ap.max(0.0), bp.max(0.0));
    let (lo, hi) = t_interval(am, bm, ap, bp);
    if t < lo - t_slack(hi) || t > hi + t_slack(hi) {
        return Err(ModuliError::Infeasible { t, lo, hi });
    }
    let (a_minus, b_minus) = (am.sqrt(), bm.sqrt());
    if bm - am <= slack {
        return Ok(CanonicalForm::new(a_minus, b_minus, bp.sqrt(), ap.sqrt(), 0.0));
    }
    let sum = ap + bp;
    // α₋p² + β₋(S − p²) = t, and t ∈ I  ⇔  p² ∈ [α₊, β₊]
    let p2 = ((bm * sum - t) / (bm - am)).clamp(ap, bp);
    let q2 = if p2 > 0.0 { ap * bp / p2 } else { sum };
    // r² comes from a cancellation; treat rounding-level values as zero
    let r2 = sum - p2 - q2;
    let r2 = if r2 <= 64.0 * f64::EPSILON * sum { 0.0 } else { r2 };
    Ok(CanonicalForm::new(a_minus, b_minus, p2.sqrt(), q2.sqrt(), r2.sqrt()))
}

/// `j ↦ s·j` with `Tr(j*j) = target`.
pub fn normalize_trace(j: &JMap, target: f64) -> Result<JMap, ModuliError> {
    if !(target > 0.0) {
        return Err(ModuliError::InvalidArgument(format!("target trace {target} must be positive")));
    }
    let tr = j.trace_norm();
    if !(tr > 0.0) {
        return Err(ModuliError::ZeroMap);
    }
    Ok(j.scaled((target / tr).sqrt()))
}

/// `Im c* ⊂ Λ²h` with the metric pushed forward from the standard product
/// on the commutator.
///
/// `plane` holds coordinates on the basis `√2·E_ab` (pairs `a < b` in
/// lexicographic order), which is orthonormal for `g₀`; its columns are
/// therefore orthonormal. `gram` is the pushed-forward metric in that
/// basis of the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PushforwardMetric {
    pub plane: Mat,
    pub gram: Mat,
}

/// `g₀`-orthonormal coordinates of a skew matrix.
fn skew_coords(m: &Mat) -> Vec<f64> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            out.push(m[(a, b)] / std::f64::consts::SQRT_2);
        }
    }
    out
}

fn skew_from_coords(n: usize, coords: &[f64]) -> Mat {
    let mut m = Mat::zeros(n, n);
    let mut idx = 0;
    for a in 0..n {
        for b in a + 1..n {
            m[(a, b)] = coords[idx] * std::f64::consts::SQRT_2;
            m[(b, a)] = -m[(a, b)];
            idx += 1;
        }
    }
    m
}

/// Columns `j(z_m)` in `g₀`-orthonormal coordinates, and its QR split
/// `J = W M` with `M` upper triangular, positive diagonal.
struct PlaneFactor {
    w: Mat,
    m: Mat,
}

fn plane_factor(j: &JMap) -> PlaneFactor {
    let hd = j.h_dim();
    let np = hd * hd.saturating_sub(1) / 2;
    let k = j.k();
    let mut big = Mat::zeros(np, k);
    for (col, jm) in j.maps.iter().enumerate() {
        for (row, v) in skew_coords(jm).into_iter().enumerate() {
            big[(row, col)] = v;
        }
    }
    let qr = big.qr();
    let mut w = qr.q();
    let mut m = qr.r();
    for d in 0..k {
        if m[(d, d)] < 0.0 {
            w.column_mut(d).neg_mut();
            m.row_mut(d).neg_mut();
        }
    }
    PlaneFactor { w, m }
}

fn require_commutator(c: &LieBracket) -> Result<JMap, ModuliError> {
    let j = jmap(c)?;
    if j.k() == 0 {
        return Err(ModuliError::ZeroMap);
    }
    Ok(j)
}

pub fn pushforward_metric(c: &LieBracket) -> Result<PushforwardMetric, ModuliError> {
    let j = require_commutator(c)?;
    let PlaneFactor { w, m } = plane_factor(&j);
    let gram = (&m * m.transpose())
        .try_inverse()
        .ok_or_else(|| ModuliError::InvalidArgument("j is not injective".into()))?;
    Ok(PushforwardMetric { plane: w, gram: symmetrize(&gram) })
}

fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Moves the pushforward metric on the fixed plane `U = Im c*` along
/// `(1 − t)·g + t·g₀|_U`, keeping the commutator and its complement.
/// At `t = 1` the result has isometric `j`.
pub fn retract(c: &LieBracket, t: f64) -> Result<LieBracket, ModuliError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(ModuliError::InvalidArgument(format!("retraction parameter {t} outside [0, 1]")));
    }
    let j = require_commutator(c)?;
    let PlaneFactor { w, m } = plane_factor(&j);
    let k = j.k();
    let g = symmetrize(&(&m * m.transpose()).try_inverse().ok_or(ModuliError::ZeroMap)?);
    let g_t = &g * (1.0 - t) + Mat::identity(k, k) * t;
    // M_t M_tᵀ = G_t⁻¹ and M_0 = M
    let m_t = numerics::sym_inv_sqrt(&symmetrize(&g_t))? * numerics::sym_sqrt(&g)? * &m;
    let big = &w * m_t;
    let hd = j.h_dim();
    let maps = (0..k).map(|col| skew_from_coords(hd, big.column(col).as_slice())).collect();
    let moved = JMap { maps, ..j };
    Ok(moved.to_bracket())
}

/// Size of `h` used for random maps with a `k`-dimensional commutator in
/// dimension six.
pub fn generic_h_dim(k: usize) -> Option<usize> {
    match k {
        0 => Some(6),
        1 => Some(5),
        2 => Some(4),
        3 => Some(3),
        _ => None,
    }
}

/// A map ℝᵏ → so(6 − k) with independent standard Gaussian entries above
/// the diagonal.
pub fn random_jmap<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<JMap, ModuliError> {
    let hd = generic_h_dim(k).ok_or(ModuliError::UnsupportedCodomain { h_dim: 0, k })?;
    let maps = (0..k)
        .map(|_| {
            let g = numerics::gaussian_matrix(hd, hd, rng);
            Mat::from_fn(hd, hd, |a, b| if a < b { g[(a, b)] } else if a > b { -g[(b, a)] } else { 0.0 })
        })
        .collect();
    Ok(JMap::from_maps(hd, maps))
}

/// Invariants of a random map on stratum `k`, normalized to `Tr(j*j) = 2`.
pub fn sample_point<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<ModuliPoint, ModuliError> {
    let j = random_jmap(k, rng)?;
    if k == 0 {
        return invariants(&j);
    }
    invariants(&normalize_trace(&j, 2.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::parse_salamon;

    fn point_of(s: &str) -> ModuliPoint {
        normalized_invariants(&parse_salamon(s).unwrap()).unwrap()
    }

    #[test]
    fn figure_dots() {
        let cases = [
            ("(0,0,0,0,12,34)", [0.0, 1.0, 0.0, 1.0, 0.0]),
            ("(0,0,0,0,0,12+34)", [0.0, 2.0, 0.0, 0.0, 0.0]),
            ("(0,0,0,0,0,12)", [0.0, 1.0, 0.0, 1.0, 1.0]),
            ("(0,0,0,0,13+42,14+23)", [1.0, 1.0, 0.0, 0.0, 0.0]),
            ("(0,0,0,0,12,13)", [0.5, 0.5, 0.5, 0.5, 0.5]),
        ];
        for (s, expect) in cases {
            let p = point_of(s);
            for (x, y) in p.tuple().iter().zip(expect) {
                assert!((x - y).abs() < 1e-12, "{s}: {:?}", p.tuple());
            }
        }
        let zero = normalized_invariants(&LieBracket::zero(6)).unwrap();
        assert_eq!(zero.tuple(), [0.0; 5]);
        assert_eq!(zero.stratum, 0);
    }

    #[test]
    fn free_three_generator_point() {
        let p = point_of("(0,0,0,12,13,23)");
        assert_eq!(p.stratum, 3);
        let third = 1.0 / 3.0;
        assert!((p.omega.unwrap() - third).abs() < 1e-12);
        assert!((p.alpha_minus - third).abs() < 1e-12 && (p.beta_minus - third).abs() < 1e-12);
        assert!((p.t - third).abs() < 1e-12);
    }

    #[test]
    fn canonicalize_examples() {
        let raw = ModuliPoint::new(0.0, 0.0, 0.0, 2.0, 0.0);
        assert_eq!(canonicalize_tau(&raw).tuple(), [0.0, 2.0, 0.0, 0.0, 0.0]);
        let sym = ModuliPoint::new(0.2, 0.7, 0.2, 0.7, 0.3);
        assert_eq!(canonicalize_tau(&sym), sym);
        for raw in [ModuliPoint::new(0.1, 0.2, 0.3, 0.9, 0.1), ModuliPoint::new(0.5, 0.5, 0.1, 0.1, 0.1)] {
            let once = canonicalize_tau(&raw);
            assert_eq!(canonicalize_tau(&once), once);
        }
    }

    #[test]
    fn t_interval_examples() {
        assert_eq!(t_interval(0.0, 1.0, 0.0, 1.0), (0.0, 1.0));
        let (a, b) = (0.3, 0.8);
        let (lo, hi) = t_interval(a, a, b, b);
        assert!((lo - 2.0 * a * b).abs() < 1e-15 && (hi - 2.0 * a * b).abs() < 1e-15);
        assert_eq!(t_interval(0.25, 0.75, 0.25, 0.75), (0.375, 0.625));
    }

    #[test]
    fn coefficient_examples() {
        let f = canonical_coeffs(&ModuliPoint::new(0.0, 1.0, 0.0, 1.0, 0.0)).unwrap();
        assert!(f.distance(&CanonicalForm::new(0.0, 1.0, 1.0, 0.0, 0.0)) < 1e-15);
        assert_eq!(canonical_coeffs(&ModuliPoint::new(0.0, 0.0, 0.0, 0.0, 0.0)).unwrap(), CanonicalForm::default());
        let h = 0.5_f64.sqrt();
        let f = canonical_coeffs(&ModuliPoint::new(0.5, 0.5, 0.5, 0.5, 0.5)).unwrap();
        assert!(f.distance(&CanonicalForm::new(h, h, h, h, 0.0)) < 1e-15);
        let bad = ModuliPoint::new(0.0, 1.0, 0.0, 1.0, 1.5);
        assert!(matches!(canonical_coeffs(&bad), Err(ModuliError::Infeasible { .. })));
    }

    #[test]
    fn coefficients_satisfy_the_system() {
        let m = ModuliPoint::new(0.1, 0.6, 0.2, 0.5, 0.0);
        let (lo, hi) = t_interval(0.1, 0.6, 0.2, 0.5);
        for frac in [0.0, 0.3, 0.5, 1.0] {
            let point = ModuliPoint { t: lo + frac * (hi - lo), ..m };
            let f = canonical_coeffs(&point).unwrap();
            let (a, b, p, q, r) = (f.a_minus, f.b_minus, f.p, f.q, f.r);
            let res = [
                a * a - 0.1,
                b * b - 0.6,
                p * p + q * q + r * r - 0.7,
                p * p * q * q - 0.1,
                0.1 * p * p + 0.6 * (q * q + r * r) - point.t,
            ];
            assert!(res.iter().all(|x| x.abs() < 1e-12), "{res:?}");
        }
    }

    #[test]
    fn pushforward_examples() {
        // h5 ⊕ ℝ: |j(e6)|² = 1
        let pm = pushforward_metric(&parse_salamon("(0,0,0,0,0,12+34)").unwrap()).unwrap();
        assert_eq!(pm.gram.shape(), (1, 1));
        assert!((pm.gram[(0, 0)] - 1.0).abs() < 1e-14);
        // h3 ⊕ ℝ³: |j(e6)|² = 1/2
        let pm = pushforward_metric(&parse_salamon("(0,0,0,0,0,12)").unwrap()).unwrap();
        assert!((pm.gram[(0, 0)] - 2.0).abs() < 1e-14);
        let n5 = parse_salamon("(0,0,0,0,12,13)").unwrap();
        let iso = retract(&n5, 1.0).unwrap();
        let pm = pushforward_metric(&iso).unwrap();
        assert!(numerics::max_abs(&(&pm.gram - Mat::identity(2, 2))) < 1e-10);
        // abelian factors do not change the metric
        let small = pushforward_metric(&parse_salamon("(0,0,0,12,13)").unwrap()).unwrap();
        assert!(numerics::max_abs(&(&small.gram - pushforward_metric(&n5).unwrap().gram)) < 1e-14);
        assert!(matches!(pushforward_metric(&LieBracket::zero(4)), Err(ModuliError::ZeroMap)));
    }

    #[test]
    fn retraction_endpoints() {
        let c = parse_salamon("(0,0,0,0,0,12+34)").unwrap().scaled(1.7);
        let start = retract(&c, 0.0).unwrap();
        assert!(start.distance(&c) < 1e-12);
        let end = retract(&c, 1.0).unwrap();
        let j = jmap(&end).unwrap();
        assert!((j.trace_norm() - 1.0).abs() < 1e-12);
        assert!(matches!(retract(&c, 1.5), Err(ModuliError::InvalidArgument(_))));
    }

    #[test]
    fn normalize_examples() {
        let j = jmap(&parse_salamon("(0,0,0,0,12,34)").unwrap()).unwrap().scaled(4.0);
        assert!((j.trace_norm() - 16.0).abs() < 1e-12);
        let n = normalize_trace(&j.scaled(0.5 / 2.0_f64.sqrt()), 2.0).unwrap();
        assert!((n.trace_norm() - 2.0).abs() < 1e-14);
        let m = normalize_trace(&n, 2.0).unwrap();
        assert!(numerics::max_abs(&(&m.maps[0] - &n.maps[0])) < 1e-15);
        assert_eq!(normalize_trace(&j.scaled(0.0), 2.0), Err(ModuliError::ZeroMap));
    }

    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn in_interval(m: &ModuliPoint, tol: f64) -> bool {
        let (lo, hi) = t_interval(m.alpha_minus, m.beta_minus, m.alpha_plus, m.beta_plus);
        m.t >= lo - tol && m.t <= hi + tol
    }

    #[test]
    fn t_interval_contains_random_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let j = random_jmap(2, &mut rng).unwrap();
            assert!(in_interval(&invariants(&j).unwrap(), 1e-10));
        }
    }

    #[test]
    fn sum_rule_and_strata_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let j = random_jmap(2, &mut rng).unwrap();
            assert!((invariants(&j).unwrap().spectral_sum() - j.trace_norm()).abs() < 1e-10);
            let j1 = random_jmap(1, &mut rng).unwrap();
            let m1 = invariants(&j1).unwrap();
            assert!((m1.t - m1.beta_minus * m1.beta_plus).abs() < 1e-10);
            assert!((m1.spectral_sum() - j1.trace_norm()).abs() < 1e-10);
            let m3 = invariants(&random_jmap(3, &mut rng).unwrap()).unwrap();
            let w = m3.omega.unwrap();
            assert!((m3.alpha_minus - m3.alpha_plus).abs() < 1e-10 && (m3.beta_minus - m3.beta_plus).abs() < 1e-10);
            let t = w * w + m3.alpha_minus.powi(2) + m3.beta_minus.powi(2);
            assert!((m3.t - t).abs() < 1e-10);
        }
    }

    #[test]
    fn orthogonal_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let j = random_jmap(2, &mut rng).unwrap();
            let q = numerics::random_orthogonal_with(2, &mut rng);
            let r = numerics::random_orthogonal_with(4, &mut rng);
            let moved = j.precompose(&q).conjugate(&r);
            assert!(invariants(&j).unwrap().distance(&invariants(&moved).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn retraction_is_continuous_and_preserves_the_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for k in 1..=3 {
            // coarse sampling needs a moderate pushforward metric
            let j = loop {
                let j = normalize_trace(&random_jmap(k, &mut rng).unwrap(), k as f64).unwrap();
                let sv = numerics::singular_values(&split_jmap(&j).unwrap().gram());
                if sv[0] <= 4.0 * sv[k - 1] {
                    break j;
                }
            };
            let c = j.to_bracket();
            let plane = pushforward_metric(&c).unwrap().plane;
            let points: Vec<ModuliPoint> = [0.0, 0.25, 0.5, 0.75, 1.0]
                .iter()
                .map(|&t| {
                    let moved = retract(&c, t).unwrap();
                    let p = pushforward_metric(&moved).unwrap().plane;
                    // same subspace: projections agree
                    let d = &plane * plane.transpose() - &p * p.transpose();
                    assert!(numerics::max_abs(&d) < 1e-9);
                    invariants(&jmap(&moved).unwrap()).unwrap()
                })
                .collect();
            assert!(points[0].distance(&invariants(&jmap(&c).unwrap()).unwrap()) < 1e-12);
            for w in points.windows(2) {
                assert!(w[0].distance(&w[1]) < 0.5, "k={k}: {:?} -> {:?}", w[0], w[1]);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn coefficients_round_trip(am in 0.0..1.0f64, dm in 0.0..1.0f64, ap in 0.0..1.0f64, dp in 0.0..1.0f64, frac in 0.0..=1.0f64) {
            let (bm, bp) = (am + dm, ap + dp);
            let (lo, hi) = t_interval(am, bm, ap, bp);
            let point = canonicalize_tau(&ModuliPoint::new(am, bm, ap, bp, lo + frac * (hi - lo)));
            let f = canonical_coeffs(&point).unwrap();
            let back = invariants(&f.to_jmap()).unwrap();
            prop_assert!(back.distance(&point) < 1e-9, "{:?} vs {:?}", point, back);
        }

        #[test]
        fn homogeneity(seed in any::<u64>(), s in 0.1..3.0f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let j = random_jmap(2, &mut rng).unwrap();
            let m = invariants(&j).unwrap();
            let ms = invariants(&j.scaled(s)).unwrap();
            let s2 = s * s;
            let expect = [m.alpha_minus * s2, m.beta_minus * s2, m.alpha_plus * s2, m.beta_plus * s2, m.t * s2 * s2];
            for (x, y) in ms.tuple().iter().zip(expect) {
                prop_assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()));
            }
        }

        #[test]
        fn canonicalization_is_idempotent(v in proptest::array::uniform5(0.0..1.0f64)) {
            let raw = ModuliPoint::new(v[0].min(v[1]), v[0].max(v[1]), v[2].min(v[3]), v[2].max(v[3]), v[4]);
            let once = canonicalize_tau(&raw);
            prop_assert_eq!(canonicalize_tau(&once), once);
        }
    }
}
