//! Salamon notation: `(0,0,0,0,12,34)` lists `de^m` for m = 1..n, each a
//! signed sum of two-digit tokens `ij` standing for `e^i ∧ e^j`.
//!
//! A term `ij` in slot `m` becomes `c(e_i, e_j) ∋ +e_m`; `ji` is
//! `e^j ∧ e^i = −e^i ∧ e^j`.

use super::{pairs, BracketError, LieBracket, MAX_BRACKET_DIM};

pub fn parse_salamon(s: &str) -> Result<LieBracket, BracketError> {
    let err = |item: usize, reason: &str| BracketError::Parse { item, reason: reason.to_string() };
    let trimmed = s.trim();
    let inner = trimmed
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err(0, "expected a parenthesized list"))?;
    let items: Vec<&str> = inner.split(',').map(str::trim).collect();
    let n = items.len();
    if n > MAX_BRACKET_DIM {
        return Err(err(0, &format!("{n} entries, at most {MAX_BRACKET_DIM} supported")));
    }
    let mut entries = Vec::new();
    for (m, item) in items.iter().enumerate() {
        let pos = m + 1;
        if item.is_empty() {
            return Err(err(pos, "empty entry"));
        }
        if *item == "0" {
            continue;
        }
        for (sign, token) in split_terms(item).map_err(|r| err(pos, &r))? {
            let digits: Vec<u32> = token.chars().filter_map(|ch| ch.to_digit(10)).collect();
            if token.chars().count() != 2 || digits.len() != 2 {
                return Err(err(pos, &format!("malformed token {token:?}")));
            }
            let (a, b) = (digits[0] as usize, digits[1] as usize);
            if a == b {
                return Err(err(pos, &format!("repeated index in {token:?}")));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(err(pos, &format!("index out of range 1..={n} in {token:?}")));
            }
            entries.push((a - 1, b - 1, m, sign));
        }
    }
    LieBracket::from_entries(n, &entries)
}

fn split_terms(item: &str) -> Result<Vec<(f64, String)>, String> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut current = String::new();
    let mut expect_term = true;
    for ch in item.chars() {
        match ch {
            '+' | '-' => {
                if !current.is_empty() {
                    out.push((sign, std::mem::take(&mut current)));
                } else if !expect_term || !out.is_empty() {
                    return Err(format!("dangling sign in {item:?}"));
                }
                sign = if ch == '-' { -1.0 } else { 1.0 };
                expect_term = true;
            }
            c if c.is_whitespace() => {}
            c => {
                current.push(c);
                expect_term = false;
            }
        }
    }
    if current.is_empty() {
        return Err(format!("missing term in {item:?}"));
    }
    out.push((sign, current));
    Ok(out)
}

/// Prints a bracket whose nonzero coefficients are all ±1. A coefficient
/// −1 on `c(e_i, e_j)` is written as the reversed token `ji`.
pub fn format_salamon(c: &LieBracket) -> Result<String, BracketError> {
    let n = c.dim();
    let mut slots: Vec<Vec<String>> = vec![Vec::new(); n];
    for (i, j) in pairs(n) {
        for (k, slot) in slots.iter_mut().enumerate() {
            let v = c.get(i, j, k);
            if v == 0.0 {
                continue;
            }
            if (v - 1.0).abs() < 1e-12 {
                slot.push(format!("{}{}", i + 1, j + 1));
            } else if (v + 1.0).abs() < 1e-12 {
                slot.push(format!("{}{}", j + 1, i + 1));
            } else {
                return Err(BracketError::NotUnitCoefficients { i: i + 1, j: j + 1, k: k + 1, value: v });
            }
        }
    }
    let body: Vec<String> = slots
        .into_iter()
        .map(|terms| if terms.is_empty() { "0".to_string() } else { terms.join("+") })
        .collect();
    Ok(format!("({})", body.join(",")))
}
