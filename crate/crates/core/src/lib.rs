//! Synthesis of binary machines (multi-feedback shift registers) that
//! regenerate an incompletely specified bit sequence `p` bits per cycle.
//!
//! The usual path is [`pipeline::synthesize`]: encode the sequence into
//! digits, assign machine states, minimize the feedback functions using the
//! don't cares, build the machine and verify it by simulation.

pub mod analyze;
pub mod assign;
pub mod bench;
pub mod cli;
pub mod logic;
pub mod machine;
pub mod pipeline;
pub mod seq;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Seq(#[from] seq::SeqError),
    #[error(transparent)]
    Assign(#[from] assign::AssignError),
    #[error(transparent)]
    Logic(#[from] logic::LogicError),
    #[error(transparent)]
    Machine(#[from] machine::MachineError),
    #[error("machine output differs from the sequence at bit {position}")]
    Mismatch { position: usize },
}

impl Error {
    /// Whether the error means a built machine failed its check, as opposed
    /// to bad input.
    pub fn is_verification(&self) -> bool {
        matches!(
            self,
            Error::Mismatch { .. } | Error::Machine(machine::MachineError::VerificationFailed { .. })
        )
    }
}
