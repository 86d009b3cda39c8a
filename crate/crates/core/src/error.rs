use thiserror::Error;

/// Errors raised while loading or validating a network.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("SchemaError: {0}")]
    Schema(String),
    #[error("CycleError: parent relation contains a cycle through `{0}`")]
    Cycle(String),
    #[error("CptShapeError: table for `{child}` has {actual} entries, expected {expected}")]
    CptShape {
        child: String,
        expected: usize,
        actual: usize,
    },
    #[error("NormalizationError: row {row} of `{child}` sums to {sum}")]
    Normalization { child: String, row: usize, sum: f64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("UnknownAtom: {0}")]
    UnknownAtom(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("BadMark: trail position {mark} exceeds trail length {len}")]
    BadMark { mark: usize, len: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("OrderingViolation: literal {lit} does not precede child literal {child}")]
    OrderingViolation { lit: u32, child: u32 },
    #[error("OrderingMismatch: diagrams were built under different literal orderings")]
    OrderingMismatch,
    #[error("UnknownNode: {0}")]
    UnknownNode(u32),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("UnknownVariable: {0}")]
    UnknownVariable(String),
    #[error("NotAPermutation: variable order must mention each variable exactly once (got {got}, expected {expected})")]
    NotAPermutation { got: usize, expected: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("IncompleteValuation: {0}")]
    IncompleteValuation(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferError {
    #[error("ZeroEvidence: P(e) = {0} is zero, the conditional is undefined")]
    ZeroEvidence(f64),
    #[error("TooLarge: {0} joint states exceed the enumeration guard")]
    TooLarge(u128),
    #[error("UnknownAtom: {0}")]
    UnknownAtom(String),
    #[error("InvalidEvidence: {0}")]
    InvalidEvidence(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ObddError {
    #[error("OrderingIncomplete: literal `{0}` has no position in the ordering")]
    OrderingIncomplete(String),
}

/// Umbrella error for the pipeline entry points and the command line.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Infer(#[from] InferError),
    #[error(transparent)]
    Obdd(#[from] ObddError),
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
