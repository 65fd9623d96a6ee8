use thiserror::Error;

use crate::modring::{RootPoint, TorusPoint};
use crate::selector::ZeroSet;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("odd m ≥ 3 required (got {0})")]
    InvalidModulus(u32),

    #[error("coordinate {value} out of range for modulus {m}")]
    ResidueOutOfRange { value: u32, m: u32 },

    #[error("{coords:?} violates the root-flat relation (sum ≡ {sum} mod {m})")]
    NotOnRootFlat { coords: [u32; 5], sum: u32, m: u32 },

    #[error("grading mismatch: σ({point}) = {actual}, expected {expected}")]
    GradingMismatch {
        point: TorusPoint,
        expected: u32,
        actual: u32,
    },

    #[error("infeasible zero-set {0} (size four cannot occur on the root flat)")]
    InfeasibleZeroSet(ZeroSet),

    #[error("row {row:?} for zero-set {set} is not a permutation of Z5")]
    NotAPermutation { set: ZeroSet, row: [u8; 5] },

    #[error("schedule `{schedule}` does not support m = {m}")]
    ScheduleMismatch { schedule: String, m: u32 },

    #[error("unknown {kind} `{name}`; registered: {known}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("layer index {t} out of range for m = {m}")]
    LayerOutOfRange { t: u32, m: u32 },

    #[error("({a}, {b}) is not a section point (a + b ≡ 0)")]
    NotASectionPoint { a: u32, b: u32 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("map is not a bijection: orbit from {start} revisits {revisit} mid-orbit")]
    NotBijective {
        start: RootPoint,
        revisit: RootPoint,
    },

    #[error("no return to the section from {start:?} within {cap} steps")]
    StepCapExceeded { start: (u32, u32), cap: u64 },

    #[error("state space of {states} exceeds the cap of {cap}; pass --max-states to override")]
    TooLarge { states: u64, cap: u64 },

    #[error("structural failure: {0}")]
    Structural(String),

    #[error("malformed embedded table: {0}")]
    MalformedTable(String),

    #[error("decomposition for m = {0} is not verified; use --force to export anyway")]
    Unverified(u32),

    #[error("{0}")]
    Import(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
