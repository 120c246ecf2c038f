//! Rewriting invariants to exact values.

pub mod combination;
pub mod engine;
pub mod rules;
pub mod trace;

pub use combination::{LinearCombination, Term};
pub use engine::{base_value, BaseProvider, BaseUnavailable, Engine, EngineError, MapProvider, MemoCache, NoBase};
pub use rules::{
    apply_dilaton, apply_divisor, apply_string, apply_trr, apply_trr_with_roles, splitting_terms, ShapeViolation,
    SplitIndex,
};
pub use trace::{Rule, TraceNode};
