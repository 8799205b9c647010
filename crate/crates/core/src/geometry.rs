//! Left-invariant Riemannian geometry for the metric making the standard
//! basis orthonormal.
//!
//! Sign convention: `R_{ijhk} = g(R_{e_i,e_j} e_h, e_k)` with
//! `R_{X,Y} = ∇_{[X,Y]} − [∇_X, ∇_Y]`, so `R_{ijij}` is the sectional
//! curvature of `span(e_i, e_j)` (negative on planes with a nonzero
//! bracket).

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::SerializeSeq;
use serde::Serialize;
use thiserror::Error;

use crate::bracket::{jacobi_defect, pair_index, pairs, LieBracket};
use crate::moduli::CanonicalForm;
use crate::numerics::{self, Mat};

/// Relative kernel threshold for Jacobi operators.
pub const KERNEL_TOL: f64 = 1e-7;

pub const DEFAULT_RANK_SAMPLES: usize = 2000;

const JACOBI_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("bracket violates the Jacobi identity (defect {0:e})")]
    NotLieAlgebra(f64),
    #[error("vector of length {found} for a {expected}-dimensional algebra")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("base vector has norm {0}, expected 1 or 0")]
    NotUnit(f64),
}

/// Coefficients `Γ^k_{ij} = ⟨∇_{e_i} e_j, e_k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    dim: usize,
    gamma: Vec<f64>,
}

impl Connection {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.dim + j) * self.dim + k]
    }

    /// Largest `|Γ^k_{ij} + Γ^j_{ik}|`.
    pub fn metric_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) + self.get(i, k, j)).abs());
                }
            }
        }
        worst
    }

    /// Largest `|Γ^k_{ij} − Γ^k_{ji} − c^k_{ij}|`.
    pub fn torsion_defect(&self, c: &LieBracket) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) - self.get(j, i, k) - c.get(i, j, k)).abs());
                }
            }
        }
        worst
    }
}

fn check_lie(c: &LieBracket) -> Result<(), GeometryError> {
    let defect = jacobi_defect(c);
    let scale = c.max_abs().max(1.0);
    if defect > JACOBI_TOL * scale * scale {
        return Err(GeometryError::NotLieAlgebra(defect));
    }
    Ok(())
}

/// Koszul formula `2⟨∇_X Y, Z⟩ = ⟨[X,Y],Z⟩ − ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩`.
pub fn levi_civita(c: &LieBracket) -> Result<Connection, GeometryError> {
    check_lie(c)?;
    let n = c.dim();
    let mut gamma = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                gamma[(i * n + j) * n + k] = 0.5 * (c.get(i, j, k) - c.get(j, k, i) + c.get(k, i, j));
            }
        }
    }
    Ok(Connection { dim: n, gamma })
}

/// `R_{ijhk}` from the connection.
fn component(conn: &Connection, c: &LieBracket, i: usize, j: usize, h: usize, k: usize) -> f64 {
    let n = conn.dim;
    let mut std = 0.0;
    for m in 0..n {
        std += conn.get(j, h, m) * conn.get(i, m, k) - conn.get(i, h, m) * conn.get(j, m, k)
            - c.get(i, j, m) * conn.get(m, h, k);
    }
    -std
}

/// Curvature as a matrix on `Λ²`: entry `(P(i,j), P(h,k))` holds `R_{ijhk}`
/// for `i < j`, `h < k` (lexicographic pair index `P`).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    pairs: Mat,
}

impl CurvatureTensor {
    pub fn zero(dim: usize) -> Self {
        let np = dim * dim.saturating_sub(1) / 2;
        Self { dim, pairs: Mat::zeros(np, np) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pair_matrix(&self) -> &Mat {
        &self.pairs
    }

    /// `R_{ijhk}` for arbitrary 0-based indices.
    pub fn get(&self, i: usize, j: usize, h: usize, k: usize) -> f64 {
        if i == j || h == k {
            return 0.0;
        }
        let (a, s1) = if i < j { (pair_index(self.dim, i, j), 1.0) } else { (pair_index(self.dim, j, i), -1.0) };
        let (b, s2) = if h < k { (pair_index(self.dim, h, k), 1.0) } else { (pair_index(self.dim, k, h), -1.0) };
        s1 * s2 * self.pairs[(a, b)]
    }

    /// Stores `R_{ijhk} = R_{hkij} = value` (0-based, `i < j`, `h < k`).
    fn set_pair(&mut self, i: usize, j: usize, h: usize, k: usize, value: f64) {
        let a = pair_index(self.dim, i, j);
        let b = pair_index(self.dim, h, k);
        self.pairs[(a, b)] = value;
        self.pairs[(b, a)] = value;
    }

    pub fn max_abs(&self) -> f64 {
        numerics::max_abs(&self.pairs)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        numerics::max_abs(&(&self.pairs - &other.pairs))
    }

    /// Largest `|R_{ijhk} − R_{hkij}|`.
    pub fn pair_asymmetry(&self) -> f64 {
        numerics::asymmetry(&self.pairs)
    }

    /// Largest cyclic sum `R_{ijhk} + R_{jhik} + R_{hijk}`.
    pub fn bianchi_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for h in 0..n {
                    for k in 0..n {
                        let s = self.get(i, j, h, k) + self.get(j, h, i, k) + self.get(h, i, j, k);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Components with `|value| > tol` as 1-based `(i, j, h, k, value)`,
    /// `i < j`, `h < k`, `(i, j) ≤ (h, k)`.
    pub fn components(&self, tol: f64) -> Vec<(usize, usize, usize, usize, f64)> {
        let ps = pairs(self.dim);
        let mut out = Vec::new();
        for (a, &(i, j)) in ps.iter().enumerate() {
            for (b, &(h, k)) in ps.iter().enumerate().skip(a) {
                let v = self.pairs[(a, b)];
                if v.abs() > tol {
                    out.push((i + 1, j + 1, h + 1, k + 1, v));
                }
            }
        }
        out
    }
}

impl Serialize for CurvatureTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let comps = self.components(0.0);
        let mut seq = s.serialize_seq(Some(comps.len()))?;
        for c in &comps {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

pub fn curvature(c: &LieBracket) -> Result<CurvatureTensor, GeometryError> {
    let conn = levi_civita(c)?;
    Ok(curvature_from(&conn, c))
}

fn curvature_from(conn: &Connection, c: &LieBracket) -> CurvatureTensor {
    let n = c.dim();
    let ps = pairs(n);
    let mut out = CurvatureTensor::zero(n);
    for (a, &(i, j)) in ps.iter().enumerate() {
        for (b, &(h, k)) in ps.iter().enumerate() {
            out.pairs[(a, b)] = component(conn, c, i, j, h, k);
        }
    }
    out
}

/// Closed-form curvature of the six-dimensional bracket with
/// `de⁵ = (a₋ + p) e¹² + (a₋ − p) e³⁴`, `de⁶ = (b₋ + q) e¹³ − (b₋ − q) e²⁴`.
/// `r` is ignored.
pub fn curvature_table_d62(f: &CanonicalForm) -> CurvatureTensor {
    let (a, b, p, q) = (f.a_minus, f.b_minus, f.p, f.q);
    let mut t = CurvatureTensor::zero(6);
    // 1-based indices as in the structure equations
    let table: [((usize, usize, usize, usize), f64); 17] = [
        ((1, 2, 1, 2), -0.75 * (a + p).powi(2)),
        ((1, 2, 3, 4), -0.5 * a * a + 0.5 * p * p + 0.25 * b * b - 0.25 * q * q),
        ((1, 3, 1, 3), -0.75 * (b + q).powi(2)),
        ((1, 3, 2, 4), -0.25 * a * a + 0.25 * p * p + 0.5 * b * b - 0.5 * q * q),
        ((1, 4, 2, 3), 0.25 * a * a - 0.25 * p * p + 0.25 * b * b - 0.25 * q * q),
        ((1, 4, 5, 6), 0.5 * p * q - 0.5 * a * b),
        ((1, 5, 1, 5), 0.25 * (a + p).powi(2)),
        ((1, 5, 4, 6), -0.25 * (b + q) * (a - p)),
        ((1, 6, 1, 6), 0.25 * (b + q).powi(2)),
        ((1, 6, 4, 5), 0.25 * (b - q) * (a + p)),
        ((2, 3, 5, 6), -0.5 * a * b - 0.5 * p * q),
        ((2, 4, 2, 4), -0.75 * (b - q).powi(2)),
        ((2, 5, 3, 6), -0.25 * (a - p) * (b - q)),
        ((2, 6, 2, 6), 0.25 * (b - q).powi(2)),
        ((2, 6, 3, 5), 0.25 * (b + q) * (a + p)),
        ((3, 4, 3, 4), -0.75 * (a - p).powi(2)),
        ((3, 5, 3, 5), 0.25 * (a - p).powi(2)),
    ];
    // components listed as equal to one of the above
    let equal: [((usize, usize, usize, usize), (usize, usize, usize, usize)); 4] = [
        ((2, 5, 2, 5), (1, 5, 1, 5)),
        ((3, 6, 3, 6), (1, 6, 1, 6)),
        ((4, 6, 4, 6), (2, 6, 2, 6)),
        ((4, 5, 4, 5), (3, 5, 3, 5)),
    ];
    for ((i, j, h, k), v) in table {
        t.set_pair(i - 1, j - 1, h - 1, k - 1, v);
    }
    for ((i, j, h, k), (si, sj, sh, sk)) in equal {
        let v = t.get(si - 1, sj - 1, sh - 1, sk - 1);
        t.set_pair(i - 1, j - 1, h - 1, k - 1, v);
    }
    t
}

/// The symmetric operator `w ↦ R_{v,w} v`, matrix entry `(a, b) = R_{v b v a}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiOperator {
    pub base: DVector<f64>,
    pub matrix: Mat,
}

/// Jacobi operator at a unit vector (or the zero operator at `v = 0`).
///
/// The operator is quadratic in `v`: at `v = x + y` with `|x + y|² = 2`
/// it is twice the operator at the normalized vector.
pub fn jacobi_operator(r: &CurvatureTensor, v: &DVector<f64>) -> Result<JacobiOperator, GeometryError> {
    let n = r.dim();
    if v.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, found: v.len() });
    }
    let norm = v.norm();
    if norm != 0.0 && (norm - 1.0).abs() > UNIT_TOL {
        return Err(GeometryError::NotUnit(norm));
    }
    Ok(JacobiOperator { base: v.clone(), matrix: jacobi_matrix(r, v) })
}

fn jacobi_matrix(r: &CurvatureTensor, v: &DVector<f64>) -> Mat {
    let n = r.dim();
    let mut m = Mat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                if v[i] == 0.0 {
                    continue;
                }
                for h in 0..n {
                    if v[h] != 0.0 {
                        s += v[i] * v[h] * r.get(i, b, h, a);
                    }
                }
            }
            m[(a, b)] = s;
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankResult {
    pub rank: usize,
    pub witness: Vec<f64>,
    pub probes: usize,
}

/// Unit vectors probed by [`infinitesimal_rank`], in order: `e_i`, then
/// `(e_i ± e_j)/√2` for `i < j`, then `samples` seeded Gaussian directions.
pub fn probe_vectors(n: usize, samples: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(DVector::from_fn(n, |a, _| if a == i { 1.0 } else { 0.0 }));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, j) in pairs(n) {
        for sign in [1.0, -1.0] {
            out.push(DVector::from_fn(n, |a, _| if a == i { h } else if a == j { sign * h } else { 0.0 }));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < n + n * n.saturating_sub(1) + samples {
        let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let norm: f64 = v.norm();
        if norm > 1e-12 {
            out.push(v / norm);
        }
    }
    out
}

/// Minimal kernel dimension of Jacobi operators over [`probe_vectors`];
/// singular values below `KERNEL_TOL · max|R|` count as zero. The witness
/// is the first probe attaining the minimum.
pub fn infinitesimal_rank(c: &LieBracket, samples: usize, seed: u64) -> Result<RankResult, GeometryError> {
    let r = curvature(c)?;
    Ok(rank_of(&r, samples, seed))
}

pub fn rank_of(r: &CurvatureTensor, samples: usize, seed: u64) -> RankResult {
    let n = r.dim();
    let tol = KERNEL_TOL * r.max_abs();
    let probes = probe_vectors(n, samples, seed);
    let mut best: Option<(usize, &DVector<f64>)> = None;
    for v in &probes {
        let sv = numerics::singular_values(&jacobi_matrix(r, v));
        let kernel = sv.iter().filter(|&&s| s <= tol).count();
        if best.is_none_or(|(k, _)| kernel < k) {
            best = Some((kernel, v));
        }
    }
    let (rank, witness) = best.map_or((n, Vec::new()), |(k, v)| (k, v.iter().copied().collect()));
    RankResult { rank, witness, probes: probes.len() }
}
