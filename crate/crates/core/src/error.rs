use thiserror::Error;

use crate::graph::{GraphError, VarSet};

/// A caller broke the precondition of an identification routine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("Q-factor covers {found:?} but {expected:?} was required")]
    ScopeMismatch { expected: VarSet, found: VarSet },
    #[error("{inner:?} is not a subset of {outer:?}")]
    NotSubset { inner: VarSet, outer: VarSet },
    #[error("{w:?} is not closed under ancestors inside {c:?}")]
    NotAncestral { w: VarSet, c: VarSet },
    #[error("{0:?} does not form a single c-component")]
    NotSingleComponent(VarSet),
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("{first} and {second} overlap on {shared:?}")]
    Overlap {
        first: &'static str,
        second: &'static str,
        shared: VarSet,
    },
    #[error("variable {0} is not a node of the graph")]
    UnknownVariable(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
