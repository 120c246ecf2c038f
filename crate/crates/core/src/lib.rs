//! Exact planar tropical descendant invariants.
//!
//! Two independent engines: [`recursion`] rewrites an invariant with the
//! recursion relation for a psi class at a line-constrained end plus the
//! string, dilaton and divisor equations, and [`enumerate`] counts tropical
//! curves through a random configuration directly.

pub mod cache;
pub mod enumerate;
pub mod exact;
pub mod family;
pub mod grammar;
pub mod invariant;
pub mod par;
pub mod recursion;
pub mod sweep;

pub use exact::{format_value, parse_value, Value};
pub use grammar::{format_invariant, parse_invariant, ParseError};
pub use invariant::{classify, Codim, Insertion, Invariant, InvariantShape, ShapeError};
