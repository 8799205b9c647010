//! Isomorphism types of 2-step nilpotent algebras of dimension ≤ 6.
//!
//! A `k = 2` map is first brought to the reduced shape (see
//! [`CanonicalForm`]) by orthogonal changes of basis, then made isometric
//! by a change of basis of the commutator. For isometric `j` normalized to
//! `Tr(j*j) = 2` the pair `α₋ ≥ α₊` determines the type: both below ½,
//! `α₋ = ½ > α₊`, both equal to ½, or `α₊ < ½ < α₋`.

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::bracket::{jmap, stratum_tol, BracketError, JMap, LieBracket, MAX_BRACKET_DIM};
use crate::moduli::{self, CanonicalForm, ModuliError, SplitJ};
use crate::numerics::{self, Mat, NumericsError, DEFAULT_TOL};
use crate::so4::SplitVector;

/// Half-width of the band around ½ treated as equal to ½.
pub const CLASSIFY_TOL: f64 = 1e-7;

/// Factor of [`CLASSIFY_TOL`] inside which a near-boundary warning is raised.
const WARN_FACTOR: f64 = 10.0;

const REDUCTION_TOL: f64 = 1e-9;

/// Largest `|r|` (relative) accepted as zero by [`structure_equations`].
pub const R_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    Bracket(#[from] BracketError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("expected a {expected}-dimensional commutator, found {found}")]
    WrongStratum { expected: usize, found: usize },
    #[error("reduction left off-pattern entries of size {0:e}")]
    ReductionFailed(f64),
    #[error("j is not injective")]
    DegenerateColumn,
    #[error("move not applicable: {0}")]
    NotApplicable(String),
    #[error("columns are not orthonormal (defect {0:e})")]
    NotIsometric(f64),
    #[error("invariants (α₋, α₊) = ({alpha_minus}, {alpha_plus}) lie outside every region")]
    Unclassifiable { alpha_minus: f64, alpha_plus: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IsoClass {
    Abelian,
    H3plusR3,
    H5plusR,
    H3plusH3,
    A12_14p23,
    N5plusR,
    H3C,
    N63,
}

impl IsoClass {
    pub const ALL: [IsoClass; 8] = [
        IsoClass::Abelian,
        IsoClass::H3plusR3,
        IsoClass::H5plusR,
        IsoClass::H3plusH3,
        IsoClass::A12_14p23,
        IsoClass::N5plusR,
        IsoClass::H3C,
        IsoClass::N63,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IsoClass::Abelian => "abelian",
            IsoClass::H3plusR3 => "h3+R3",
            IsoClass::H5plusR => "h5+R",
            IsoClass::H3plusH3 => "h3+h3",
            IsoClass::A12_14p23 => "n(12,14+23)",
            IsoClass::N5plusR => "n5+R",
            IsoClass::H3C => "h3C",
            IsoClass::N63 => "n(12,13,23)",
        }
    }

    /// Standard representative in structure-equation notation.
    pub fn salamon(self) -> &'static str {
        match self {
            IsoClass::Abelian => "(0,0,0,0,0,0)",
            IsoClass::H3plusR3 => "(0,0,0,0,0,12)",
            IsoClass::H5plusR => "(0,0,0,0,0,12+34)",
            IsoClass::H3plusH3 => "(0,0,0,0,12,34)",
            IsoClass::A12_14p23 => "(0,0,0,0,12,14+23)",
            IsoClass::N5plusR => "(0,0,0,0,12,13)",
            IsoClass::H3C => "(0,0,0,0,13+42,14+23)",
            IsoClass::N63 => "(0,0,0,12,13,23)",
        }
    }

    pub fn representative(self) -> LieBracket {
        crate::bracket::parse_salamon(self.salamon()).expect("representatives parse")
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl Serialize for IsoClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IsoClass", 2)?;
        st.serialize_field("name", self.name())?;
        st.serialize_field("salamon", self.salamon())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub class: IsoClass,
    pub stratum: usize,
    /// `α₋, α₊` of the isometric trace-2 representative (`k = 2` only).
    pub alpha_minus: Option<f64>,
    pub alpha_plus: Option<f64>,
    pub near_boundary: bool,
    pub warnings: Vec<String>,
}

/// Unit vector orthogonal to `v`, built from the coordinate axis least
/// aligned with it.
fn orthogonal_unit(v: &Vector3<f64>) -> Vector3<f64> {
    let axis = (0..3).min_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).expect("three axes");
    let e = Vector3::ith(axis, 1.0);
    let w = e - v * (v.dot(&e) / v.norm_squared().max(f64::MIN_POSITIVE));
    w.normalize()
}

/// Rotation (rows `f₁, f₂, f₃`, determinant 1) with `f₁ ∝ first` and
/// `second ∈ span(f₁, f₂)` with nonnegative `f₂`-component.
fn so3_frame(first: &Vector3<f64>, second: &Vector3<f64>, tol: f64) -> nalgebra::Matrix3<f64> {
    let (f1, f2) = if first.norm() > tol {
        let f1 = first.normalize();
        let w = second - f1 * second.dot(&f1);
        let f2 = if w.norm() > tol { w.normalize() } else { orthogonal_unit(&f1) };
        (f1, f2)
    } else if second.norm() > tol {
        let f2 = second.normalize();
        (orthogonal_unit(&f2), f2)
    } else {
        return nalgebra::Matrix3::identity();
    };
    let f3 = f1.cross(&f2);
    nalgebra::Matrix3::from_rows(&[f1.transpose(), f2.transpose(), f3.transpose()])
}

fn to_mat3x2(m: &Mat) -> nalgebra::Matrix3x2<f64> {
    nalgebra::Matrix3x2::from_fn(|i, j| m[(i, j)])
}

/// Reduction of a split `k = 2` map by `O(2) × O(4)`.
///
/// Diagonalize `j₋*j₋` by a rotation of ℝ² (or, when its eigenvalues
/// coincide, diagonalize `j₊*j₊` instead), fix column signs so that
/// `r ≥ 0`, then rotate each factor ℝ³± onto the target axes.
pub fn reduce_split(s: &SplitJ) -> Result<CanonicalForm, ClassifyError> {
    if s.k() != 2 {
        return Err(ClassifyError::WrongStratum { expected: 2, found: s.k() });
    }
    let raw = moduli::raw_invariants(s)?;
    let s = if moduli::canonicalize_tau(&raw) != raw { s.tau() } else { s.clone() };
    let gm = s.gram_minus();
    let gp = s.gram_plus();
    let scale = 1.0 + numerics::max_abs(&gm).max(numerics::max_abs(&gp));
    let eig_m = numerics::sym_eig(&gm)?;
    let tie = eig_m.eigenvalues[1] - eig_m.eigenvalues[0] <= REDUCTION_TOL * scale;
    let mut q = if tie {
        // j₋ is a multiple of an isometry; order by the plus spectrum, largest first
        let eig_p = numerics::sym_eig(&gp)?;
        Mat::from_fn(2, 2, |i, j| eig_p.eigenvectors[(i, 1 - j)])
    } else {
        eig_m.eigenvectors.clone()
    };
    let plus_q = &s.plus * &q;
    if plus_q.column(0).dot(&plus_q.column(1)) < 0.0 {
        q.column_mut(0).neg_mut();
    }
    let m = to_mat3x2(&(&s.minus * &q));
    let pl = to_mat3x2(&(&s.plus * &q));
    let tol = REDUCTION_TOL * scale.sqrt();
    let rm = so3_frame(&m.column(0).into_owned(), &m.column(1).into_owned(), tol);
    let rp = so3_frame(&pl.column(0).into_owned(), &pl.column(1).into_owned(), tol);
    let m = rm * m;
    let pl = rp * pl;
    let form = CanonicalForm::new(m[(0, 0)], m[(1, 1)], pl[(0, 0)], pl[(1, 1)], pl[(0, 1)]);
    let off = [m[(0, 1)], m[(1, 0)], m[(2, 0)], m[(2, 1)], pl[(1, 0)], pl[(2, 0)], pl[(2, 1)]];
    let negative = form.as_array().iter().map(|x| (-x).max(0.0)).fold(0.0, f64::max);
    let residual = off.iter().map(|x| x.abs()).fold(negative, f64::max);
    if residual > REDUCTION_TOL * scale.sqrt() * 10.0 {
        return Err(ClassifyError::ReductionFailed(residual));
    }
    let clip = |x: f64| x.max(0.0);
    Ok(CanonicalForm::new(clip(form.a_minus), clip(form.b_minus), clip(form.p), clip(form.q), clip(form.r)))
}

/// Coefficients of the reduced shape reachable by `O(2) × O(4)`.
pub fn reduce_to_jform(j: &JMap) -> Result<CanonicalForm, ClassifyError> {
    if j.k() != 2 {
        return Err(ClassifyError::WrongStratum { expected: 2, found: j.k() });
    }
    reduce_split(&moduli::split_jmap(j)?)
}

fn scale_column(v: &SplitVector, s: f64) -> SplitVector {
    SplitVector { minus: v.minus * s, plus: v.plus * s }
}

/// Makes the columns orthonormal by `z₂ ↦ z₂ − pr/(a₋² + p²)·z₁` followed
/// by normalizing both columns, and re-reduces. The result has `r = 0`.
pub fn eliminate_r(f: &CanonicalForm) -> Result<CanonicalForm, ClassifyError> {
    let s = f.split_j();
    let (c0, c1) = (s.column(0), s.column(1));
    let scale = 1.0 + f.as_array().iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let tol = DEFAULT_TOL * scale;
    let n0sq = f.a_minus * f.a_minus + f.p * f.p;
    if n0sq.sqrt() <= tol {
        return Err(ClassifyError::DegenerateColumn);
    }
    let shift = -f.p * f.r / n0sq;
    let c1 = SplitVector { minus: c1.minus + c0.minus * shift, plus: c1.plus + c0.plus * shift };
    let (n0, n1) = (c0.norm(), c1.norm());
    if n1 <= tol {
        return Err(ClassifyError::DegenerateColumn);
    }
    let unit = SplitJ::from_columns(&[scale_column(&c0, 1.0 / n0), scale_column(&c1, 1.0 / n1)]);
    reduce_split(&unit)
}

/// Outcome of a diagonal GL(4) move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlMove {
    pub lambda: f64,
    /// Coefficients right after conjugation.
    pub unscaled: CanonicalForm,
    /// The moved column rescaled to unit length.
    pub rescaled: CanonicalForm,
}

fn require_isometric(f: &CanonicalForm) -> Result<(), ClassifyError> {
    if f.r.abs() > DEFAULT_TOL {
        return Err(ClassifyError::NotApplicable(format!("r = {} is not zero", f.r)));
    }
    let d1 = (f.a_minus * f.a_minus + f.p * f.p - 1.0).abs();
    let d2 = (f.b_minus * f.b_minus + f.q * f.q - 1.0).abs();
    let defect = d1.max(d2);
    if defect > DEFAULT_TOL {
        return Err(ClassifyError::NotIsometric(defect));
    }
    Ok(())
}

/// `(x + y, x − y) ↦ (λ⁻²(x + y), λ²(x − y))` with `λ⁴ = |x + y| / |x − y|`;
/// returns the new `(x, y)` and `λ`.
fn balance(x: f64, y: f64) -> Result<(f64, f64, f64), ClassifyError> {
    let (sum, diff) = (x + y, x - y);
    if diff.abs() <= DEFAULT_TOL * (1.0 + sum.abs()) {
        return Err(ClassifyError::NotApplicable("the scaling factor is singular".into()));
    }
    let lambda = (sum / diff.abs()).powf(0.25);
    let g = (sum * diff.abs()).sqrt();
    if diff > 0.0 {
        Ok((g, 0.0, lambda))
    } else {
        Ok((0.0, g, lambda))
    }
}

fn unit_column(x: f64, y: f64) -> (f64, f64) {
    let n = x.hypot(y);
    (x / n, y / n)
}

/// Conjugation by `diag(λ⁻¹, λ, λ⁻¹, λ)`: removes `q` when `b₋ > q`, or
/// `b₋` when `b₋ < q`.
pub fn gl_move_s(f: &CanonicalForm) -> Result<GlMove, ClassifyError> {
    require_isometric(f)?;
    if f.q == 0.0 {
        return Ok(GlMove { lambda: 1.0, unscaled: *f, rescaled: *f });
    }
    let (b, q, lambda) = balance(f.b_minus, f.q)?;
    let unscaled = CanonicalForm { b_minus: b, q, ..*f };
    let (bu, qu) = unit_column(b, q);
    Ok(GlMove { lambda, unscaled, rescaled: CanonicalForm { b_minus: bu, q: qu, ..*f } })
}

/// Conjugation by `diag(λ⁻¹, λ⁻¹, λ, λ)`: removes `p` when `a₋ > p`, or
/// `a₋` when `a₋ < p`.
pub fn gl_move_t(f: &CanonicalForm) -> Result<GlMove, ClassifyError> {
    require_isometric(f)?;
    if f.p == 0.0 {
        return Ok(GlMove { lambda: 1.0, unscaled: *f, rescaled: *f });
    }
    let (a, p, lambda) = balance(f.a_minus, f.p)?;
    let unscaled = CanonicalForm { a_minus: a, p, ..*f };
    let (au, pu) = unit_column(a, p);
    Ok(GlMove { lambda, unscaled, rescaled: CanonicalForm { a_minus: au, p: pu, ..*f } })
}

/// The bracket with `de⁵ = (a₋ + p) e¹² + (a₋ − p) e³⁴` and
/// `de⁶ = (b₋ + q) e¹³ − (b₋ − q) e²⁴`.
///
/// `r` must vanish up to [`R_TOL`] (relative): coefficients recovered from
/// invariants carry `r` as a square root, so rounding noise of order ε in
/// `r²` shows up as about `√ε` in `r`.
pub fn structure_equations(f: &CanonicalForm) -> Result<LieBracket, ClassifyError> {
    if f.r.abs() > R_TOL * (1.0 + f.as_array().iter().fold(0.0_f64, |a, x| a.max(x.abs()))) {
        return Err(ClassifyError::NotApplicable(format!("r = {} is not zero", f.r)));
    }
    let (a, b, p, q) = (f.a_minus, f.b_minus, f.p, f.q);
    Ok(LieBracket::from_entries(6, &[(0, 1, 4, a + p), (2, 3, 4, a - p), (0, 2, 5, b + q), (1, 3, 5, q - b)])?)
}

pub fn classify(c: &LieBracket) -> Result<Classification, ClassifyError> {
    classify_tol(c, CLASSIFY_TOL)
}

/// [`classify`] with an explicit band half-width `eps` around ½.
pub fn classify_tol(c: &LieBracket, eps: f64) -> Result<Classification, ClassifyError> {
    let c = if c.dim() < MAX_BRACKET_DIM { c.extend_to(MAX_BRACKET_DIM)? } else { c.clone() };
    let k = stratum_tol(&c, DEFAULT_TOL)?;
    let plain = |class| Classification {
        class,
        stratum: k,
        alpha_minus: None,
        alpha_plus: None,
        near_boundary: false,
        warnings: Vec::new(),
    };
    match k {
        0 => Ok(plain(IsoClass::Abelian)),
        3 => Ok(plain(IsoClass::N63)),
        1 => {
            let j = jmap(&c)?;
            let sv = numerics::singular_values(&j.maps[0]);
            let top = sv[0];
            // singular values of a skew matrix come in pairs
            let rank = sv.iter().filter(|&&s| s > eps * top).count();
            let mut out = plain(if rank > 2 { IsoClass::H5plusR } else { IsoClass::H3plusR3 });
            if sv.iter().any(|&s| s > eps * top && s <= WARN_FACTOR * eps * top) {
                out.near_boundary = true;
                out.warnings.push("second singular pair close to zero".into());
            }
            Ok(out)
        }
        2 => {
            let j = moduli::normalize_trace(&jmap(&c)?, 2.0)?;
            let iso = eliminate_r(&reduce_to_jform(&j)?)?;
            let point = moduli::invariants(&iso.to_jmap())?;
            classify_alphas(point.alpha_minus, point.alpha_plus, eps, k)
        }
        _ => Err(ClassifyError::WrongStratum { expected: 2, found: k }),
    }
}

fn classify_alphas(am: f64, ap: f64, eps: f64, k: usize) -> Result<Classification, ClassifyError> {
    let half = 0.5;
    let at = |x: f64| (x - half).abs() <= eps;
    let below = |x: f64| x < half - eps;
    let class = if at(am) && at(ap) {
        IsoClass::N5plusR
    } else if at(am) && below(ap) {
        IsoClass::A12_14p23
    } else if below(am) && below(ap) {
        IsoClass::H3plusH3
    } else if am > half + eps && below(ap) {
        IsoClass::H3C
    } else {
        return Err(ClassifyError::Unclassifiable { alpha_minus: am, alpha_plus: ap });
    };
    let mut warnings = Vec::new();
    for (label, x) in [("alpha_minus", am), ("alpha_plus", ap)] {
        let d = (x - half).abs();
        if d > eps && d <= WARN_FACTOR * eps {
            warnings.push(format!("{label} = {x} is within {:e} of 1/2", WARN_FACTOR * eps));
        }
    }
    Ok(Classification {
        class,
        stratum: k,
        alpha_minus: Some(am),
        alpha_plus: Some(ap),
        near_boundary: !warnings.is_empty(),
        warnings,
    })
}
