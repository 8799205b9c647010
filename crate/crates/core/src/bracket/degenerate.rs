//! Bounded search for explicit degenerations `lim_{s→0} g_s·c = target`.
//!
//! Candidate families are `g_s = Π · diag(s^{a_1}, …, s^{a_n}) · E`, where
//! `E` is the identity or one elementary shear `I ± e_r e_cᵀ`, the integer
//! exponents satisfy `|a_i| ≤ max_exp`, and `Π` is a constant signed
//! permutation used to line the limit up with the target. Under the
//! diagonal part the coefficient `c[i,j,k]` picks up `s^{a_k − a_i − a_j}`,
//! so the limit exists iff every surviving exponent is ≥ 0, and it keeps
//! exactly the coefficients whose exponent is 0.

use std::collections::HashSet;

use super::{gl_action, is_two_step, pairs, two_step_defect, BracketError, LieBracket};
use crate::numerics::Mat;

const MATCH_TOL: f64 = 1e-9;

/// Elementary shear `I + sign · e_row e_colᵀ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shear {
    pub row: usize,
    pub col: usize,
    pub sign: i8,
}

impl Shear {
    pub fn matrix(&self, n: usize) -> Mat {
        let mut g = Mat::identity(n, n);
        g[(self.row, self.col)] = f64::from(self.sign);
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationWitness {
    /// Constant shear applied before scaling, if any.
    pub shear: Option<Shear>,
    /// Exponents of the diagonal family.
    pub exponents: Vec<i32>,
    /// The limit's basis vector `e_i` is relabeled `signs[i] · e_{permutation[i]}`.
    pub permutation: Vec<usize>,
    pub signs: Vec<i8>,
    /// `lim_{s→0} diag(s^a)·E·c` before relabeling.
    pub limit: LieBracket,
}

impl DegenerationWitness {
    /// `Π · diag(s^a) · E` at a given `s > 0`.
    pub fn family_at(&self, s: f64) -> Mat {
        let n = self.exponents.len();
        let e = self.shear.map_or_else(|| Mat::identity(n, n), |sh| sh.matrix(n));
        let d = Mat::from_fn(n, n, |i, j| if i == j { s.powi(self.exponents[i]) } else { 0.0 });
        relabel_matrix(&self.permutation, &self.signs) * d * e
    }

    pub fn is_identity(&self) -> bool {
        self.shear.is_none()
            && self.exponents.iter().all(|&a| a == 0)
            && self.permutation.iter().enumerate().all(|(i, &p)| i == p)
            && self.signs.iter().all(|&s| s == 1)
    }
}

/// Matrix sending `e_i` to `signs[i] · e_{perm[i]}`.
fn relabel_matrix(perm: &[usize], signs: &[i8]) -> Mat {
    let n = perm.len();
    let mut p = Mat::zeros(n, n);
    for i in 0..n {
        p[(perm[i], i)] = f64::from(signs[i]);
    }
    p
}

#[derive(Debug, Clone, PartialEq)]
pub enum DegenerationOutcome {
    Witness(DegenerationWitness),
    /// Nothing found within the search bounds. Not a proof that no
    /// degeneration exists.
    NotFound,
}

impl DegenerationOutcome {
    pub fn witness(&self) -> Option<&DegenerationWitness> {
        match self {
            Self::Witness(w) => Some(w),
            Self::NotFound => None,
        }
    }
}

/// Exponent vectors in `[-max_exp, max_exp]ⁿ`, ordered by ℓ¹ norm and then
/// lexicographically, so the zero vector comes first.
fn exponent_vectors(n: usize, max_exp: u32) -> Vec<Vec<i32>> {
    let m = max_exp as i32;
    let mut out: Vec<Vec<i32>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (2 * m as usize + 1));
        for v in &out {
            for a in -m..=m {
                let mut w = v.clone();
                w.push(a);
                next.push(w);
            }
        }
        out = next;
    }
    out.sort_by(|a, b| {
        let la: i32 = a.iter().map(|x| x.abs()).sum();
        let lb: i32 = b.iter().map(|x| x.abs()).sum();
        la.cmp(&lb).then_with(|| a.cmp(b))
    });
    out
}

fn shears(n: usize) -> Vec<Shear> {
    let mut out = Vec::new();
    for row in 0..n {
        for col in 0..n {
            if row != col {
                out.push(Shear { row, col, sign: 1 });
                out.push(Shear { row, col, sign: -1 });
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Finds a signed permutation carrying `limit` onto `target`, trying
/// permutations in lexicographic order and sign vectors in binary order.
fn signed_permutation_match(
    limit: &LieBracket,
    target: &LieBracket,
    perms: &[Vec<usize>],
) -> Option<(Vec<usize>, Vec<i8>)> {
    let n = limit.dim();
    let lim_nz = limit.nonzero_entries(MATCH_TOL);
    let tgt_nz = target.nonzero_entries(MATCH_TOL);
    if lim_nz.len() != tgt_nz.len() {
        return None;
    }
    let mut lim_abs: Vec<f64> = lim_nz.iter().map(|e| e.3.abs()).collect();
    let mut tgt_abs: Vec<f64> = tgt_nz.iter().map(|e| e.3.abs()).collect();
    lim_abs.sort_by(f64::total_cmp);
    tgt_abs.sort_by(f64::total_cmp);
    if lim_abs.iter().zip(&tgt_abs).any(|(a, b)| (a - b).abs() > MATCH_TOL) {
        return None;
    }
    for perm in perms {
        // support must match before signs are worth trying
        let support_ok = lim_nz.iter().all(|&(i, j, k, v)| {
            (target.get(perm[i], perm[j], perm[k]).abs() - v.abs()).abs() <= MATCH_TOL
        });
        if !support_ok {
            continue;
        }
        for mask in 0u32..(1 << n) {
            let signs: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            let ok = lim_nz.iter().all(|&(i, j, k, v)| {
                let s = f64::from(signs[i] * signs[j] * signs[k]);
                (target.get(perm[i], perm[j], perm[k]) - s * v).abs() <= MATCH_TOL
            });
            if ok {
                return Some((perm.clone(), signs));
            }
        }
    }
    None
}

/// Searches the families described in the module docs and returns the
/// first witness in the order (no shear before shears; shears by row,
/// column, sign; exponents by ℓ¹ norm then lexicographically).
pub fn degeneration_search(
    c: &LieBracket,
    target: &LieBracket,
    max_exp: u32,
) -> Result<DegenerationOutcome, BracketError> {
    let n = c.dim();
    if target.dim() != n {
        return Err(BracketError::DimensionMismatch(n, target.dim()));
    }
    for b in [c, target] {
        if !is_two_step(b) {
            return Err(BracketError::NotTwoStep(two_step_defect(b)));
        }
    }
    let vectors = exponent_vectors(n, max_exp);
    let perms = permutations(n);
    let moves: Vec<Option<Shear>> = std::iter::once(None).chain(shears(n).into_iter().map(Some)).collect();
    let mut rejected: HashSet<Vec<u64>> = HashSet::new();
    for shear in moves {
        let moved = match shear {
            None => c.clone(),
            Some(sh) => gl_action(&sh.matrix(n), c)?,
        };
        let nz: Vec<(usize, usize, usize, f64)> = pairs(n)
            .into_iter()
            .flat_map(|(i, j)| (0..n).map(move |k| (i, j, k)))
            .map(|(i, j, k)| (i, j, k, moved.get(i, j, k)))
            .filter(|e| e.3 != 0.0)
            .collect();
        for a in &vectors {
            let mut limit = LieBracket::zero(n);
            let mut exists = true;
            for &(i, j, k, v) in &nz {
                let e = a[k] - a[i] - a[j];
                if e < 0 {
                    exists = false;
                    break;
                }
                if e == 0 {
                    limit.set(i, j, k, v);
                }
            }
            if !exists {
                continue;
            }
            let key: Vec<u64> = limit.coeffs().iter().map(|x| x.to_bits()).collect();
            if rejected.contains(&key) {
                continue;
            }
            match signed_permutation_match(&limit, target, &perms) {
                Some((permutation, signs)) => {
                    return Ok(DegenerationOutcome::Witness(DegenerationWitness {
                        shear,
                        exponents: a.clone(),
                        permutation,
                        signs,
                        limit,
                    }));
                }
                None => {
                    rejected.insert(key);
                }
            }
        }
    }
    Ok(DegenerationOutcome::NotFound)
}
