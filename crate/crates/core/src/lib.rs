//! Identification of conditional causal effects in semi-Markovian models.
//!
//! Given an acyclic directed mixed graph over observed variables, decide
//! whether `P_t(s | c)` is determined by the observed joint distribution and,
//! if so, produce a symbolic expression for it. The [`oracle`] module builds
//! explicit latent-variable models to check such expressions numerically.

// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod condid;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod graph;
pub mod identify;
pub mod oracle;
pub mod qcomp;

pub use condid::{conditional_effect, theorem1_check, unconditional_effect, QueryResult, Verdict};
pub use error::ContractError;
pub use graph::{Admg, GraphError, NodeId, VarSet};
