//! Bayesian network inference through Weighted Positive Binary Decision
//! Diagrams.
//!
//! A network is encoded as a weighted CNF plus an exactly-one theory per
//! variable, compiled into a canonical WPBDD, lowered to an arithmetic
//! circuit and queried by weighted model counting.

pub mod circuit;
pub mod cli;
pub mod compile;
pub mod diagram;
pub mod encode;
pub mod error;
pub mod infer;
pub mod model;
pub mod obdd;
pub mod order;
pub mod solver;

pub use compile::{compile, CompileOptions, Compiled, Mode};
pub use diagram::{DiagramStore, NodeId};
pub use encode::{encode, Encoding, Lit, Theory, WeightId, WeightedCnf};
pub use error::{Error, Result};
pub use infer::Model;
pub use model::{load_network, Network};
pub use order::LiteralOrdering;
