//! Metric 2-step nilpotent Lie algebras of dimension at most six: brackets,
//! orthogonal invariants, isomorphism classification and curvature.

pub mod bracket;
pub mod catalog;
pub mod classify;
pub mod geometry;
pub mod moduli;
pub mod numerics;
pub mod so4;
