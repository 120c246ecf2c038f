//! Brute-force curve enumeration: the independent oracle.

pub mod config;
pub mod core_tree;
pub mod geometry;
pub mod identity;
pub mod oracle;
pub mod provider;
pub mod solve;
pub mod types;

use thiserror::Error;

use crate::invariant::Invariant;

pub use config::{
    check_general_position, line_intersection_number, random_general_config, random_general_config_from, Configuration,
    DrawOptions, RatPoint, TropicalLine,
};
pub use geometry::{StandardDirection, Vec2};
pub use identity::{det_identity_sides, lambda_profile, qualifying_types, verify_det_identity};
pub use oracle::{evaluate_direct, evaluate_direct_with, evaluate_seeded, OracleOptions};
pub use provider::OracleProvider;
pub use solve::{evaluate_by_types, multiplicity, position_system, solve_cell, ParameterizedCurve, PositionSystem};
pub use types::{generate_types, CombinatorialType, EndKind};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("configuration is not in general position: {0}")]
    NonGeneral(String),
    #[error("no general configuration for seed {seed} after {attempts} draws")]
    RetriesExhausted { seed: u64, attempts: u32 },
    #[error("unsupported by the oracle: {0}")]
    Unsupported(String),
    #[error("degree {degree} is above the enumeration limit {max}")]
    DegreeTooHigh { degree: u32, max: u32 },
    #[error("{0} is not zero-dimensional (balance {1})")]
    DimensionInvalid(Invariant, i64),
    #[error("configuration does not match the conditions of {0}")]
    ConfigMismatch(Invariant),
    #[error("type does not have the required shape: {0}")]
    ShapeViolation(String),
    #[error("position system is {rows}x{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
}
