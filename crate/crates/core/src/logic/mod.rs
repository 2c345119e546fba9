//! Incompletely specified Boolean functions, gate-level netlists, and the
//! don't-care-aware optimizer that turns one into the other.

mod anf;
mod expr;
mod function;
pub mod minimize;
mod netlist;

use thiserror::Error;

pub use anf::{to_anf, AnfExpression};
pub use expr::{netlist_from_assignments, parse_expr};
pub use function::{dependence_set, Completion, IncompleteFunction};
pub use minimize::{
    care_equivalent, minimize, naive_sum_of_minterms, CareCheck, CheckMode, MinimizeOptions,
};
pub use netlist::{Gate, Netlist, NetlistBuilder, NodeId};

/// Maximum support width accepted by the truth-table based optimizer.
pub const MAX_MINIMIZE_SUPPORT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("function f{target} demands both 0 and 1 at input point {point:#b}")]
    InconsistentSpec { target: usize, point: u64 },
    #[error("input point {point:#x} does not fit in {vars} variables")]
    PointOutOfRange { point: u64, vars: usize },
    #[error("stage x{stage} appears twice in the support")]
    DuplicateSupport { stage: usize },
    #[error("support of {vars} variables exceeds the limit of {limit}")]
    SupportTooWide { vars: usize, limit: usize },
    #[error("function f{target} has don't-care rows; a complete truth table is required")]
    IncompleteInput { target: usize },
    #[error("truth table has {found} rows, expected {expected}")]
    TableSize { expected: usize, found: usize },
    #[error("functions passed to the optimizer must share one support")]
    MixedSupport,
    #[error("two functions target stage x{stage}")]
    DuplicateTarget { stage: usize },
    #[error("netlist reads x{stage}, which is outside the function support")]
    SupportMismatch { stage: usize },
    #[error("netlist has no output for stage x{stage}")]
    MissingOutput { stage: usize },
    #[error("expected {expected} input values, got {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("malformed netlist: {0}")]
    MalformedNetlist(String),
    #[error("expression parse error at {position}: {message}")]
    Parse { position: usize, message: String },
}
