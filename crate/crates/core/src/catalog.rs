//! Standard representatives of the 2-step nilpotent Lie algebras of
//! dimension six.

/// The seven nonabelian 2-step nilpotent Lie algebras of dimension six.
pub const SALAMON_LIST: [&str; 7] = [
    "(0,0,0,12,13,23)",
    "(0,0,0,0,13+42,14+23)",
    "(0,0,0,0,12,14+23)",
    "(0,0,0,0,12,34)",
    "(0,0,0,0,12,13)",
    "(0,0,0,0,0,12+34)",
    "(0,0,0,0,0,12)",
];

pub const ABELIAN6: &str = "(0,0,0,0,0,0)";
