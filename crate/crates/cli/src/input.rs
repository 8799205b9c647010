//! Reading brackets from the command line: structure-equation notation or
//! a file of structure constants.

use std::path::Path;

use nilmod::bracket::{parse_salamon, BracketError, LieBracket, MAX_BRACKET_DIM};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error(transparent)]
    Bracket(#[from] BracketError),
}

/// A bracket from either notation (argument starting with `(`) or a path to
/// a structure-constant file.
pub fn load(arg: &str) -> Result<LieBracket, InputError> {
    let trimmed = arg.trim();
    if trimmed.starts_with('(') || !Path::new(trimmed).exists() {
        return Ok(parse_salamon(trimmed)?);
    }
    let text = std::fs::read_to_string(trimmed).map_err(|source| InputError::Io { path: trimmed.to_string(), source })?;
    parse_coefficients(&text)
}

/// Lines `i j k value` (1-based) meaning `c(e_i, e_j)` has `value` along
/// `e_k`; `#` starts a comment; an optional `dim N` line fixes the
/// dimension, which otherwise is the largest index used.
pub fn parse_coefficients(text: &str) -> Result<LieBracket, InputError> {
    let mut dim: Option<usize> = None;
    let mut entries = Vec::new();
    let mut largest = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let bad = |reason: String| InputError::Line { line, reason };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields[0] == "dim" {
            if fields.len() != 2 || dim.is_some() {
                return Err(bad("expected a single `dim N`".into()));
            }
            let n: usize = fields[1].parse().map_err(|_| bad(format!("bad dimension {:?}", fields[1])))?;
            if n == 0 || n > MAX_BRACKET_DIM {
                return Err(bad(format!("dimension {n} outside 1..={MAX_BRACKET_DIM}")));
            }
            dim = Some(n);
            continue;
        }
        if fields.len() != 4 {
            return Err(bad(format!("expected `i j k value`, found {} fields", fields.len())));
        }
        let mut idx3 = [0usize; 3];
        for (slot, f) in idx3.iter_mut().zip(&fields[..3]) {
            let v: usize = f.parse().map_err(|_| bad(format!("bad index {f:?}")))?;
            if v == 0 {
                return Err(bad("indices are 1-based".into()));
            }
            *slot = v;
        }
        let value: f64 = fields[3].parse().map_err(|_| bad(format!("bad value {:?}", fields[3])))?;
        if !value.is_finite() {
            return Err(bad(format!("value {value} is not finite")));
        }
        if idx3[0] == idx3[1] {
            return Err(bad("c(e_i, e_i) is zero by definition".into()));
        }
        largest = largest.max(idx3.iter().copied().max().unwrap_or(0));
        entries.push((idx3[0] - 1, idx3[1] - 1, idx3[2] - 1, value));
    }
    let n = dim.unwrap_or(largest);
    if n == 0 {
        return Err(InputError::Line { line: 0, reason: "no dimension and no entries".into() });
    }
    if largest > n {
        return Err(InputError::Line { line: 0, reason: format!("index {largest} exceeds dim {n}") });
    }
    Ok(LieBracket::from_entries(n, &entries)?)
}
