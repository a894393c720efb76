//! Computing `Q[C]` from `Q[T]` for `C ⊆ T`, or failing when the graph
//! structure does not allow it.

use crate::error::ContractError;
use crate::graph::{Admg, VarSet};
use crate::qcomp::{decompose_blocks, q_marginalize, QFactor};

/// One round of the recursion: target `c`, current scope `t` and the
/// ancestral closure `a` of `c` in `G_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentifyStep {
    pub c: VarSet,
    pub t: VarSet,
    pub a: VarSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentifyOutcome {
    Success(QFactor),
    /// `An(C)` in `G_T` is all of `T` while `C ≠ T`.
    Fail {
        trace: Vec<IdentifyStep>,
    },
}

impl IdentifyOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, IdentifyOutcome::Success(_))
    }
}

/// Identify `Q[c]` from `q_t = Q[t]`.
///
/// Requires `c ⊆ t`, `G_t` to be a single c-component and `q_t` to cover `t`.
pub fn identify(g: &Admg, c: &VarSet, t: &VarSet, q_t: &QFactor) -> Result<IdentifyOutcome, ContractError> {
    if q_t.scope() != t {
        return Err(ContractError::ScopeMismatch {
            expected: t.clone(),
            found: q_t.scope().clone(),
        });
    }
    if !c.is_subset(t) {
        return Err(ContractError::NotSubset {
            inner: c.clone(),
            outer: t.clone(),
        });
    }
    if c.is_empty() {
        return Ok(IdentifyOutcome::Success(QFactor::empty()));
    }
    if g.c_components(t).len() != 1 {
        return Err(ContractError::NotSingleComponent(t.clone()));
    }

    let mut t = t.clone();
    let mut q = q_t.clone();
    let mut trace = Vec::new();
    // Each round strictly shrinks `t`, so there are at most |V| of them.
    for _ in 0..=g.len() {
        let a = g.ancestors(&t, c);
        trace.push(IdentifyStep {
            c: c.clone(),
            t: t.clone(),
            a: a.clone(),
        });
        if a == *c {
            return Ok(IdentifyOutcome::Success(q_marginalize(g, &t, c, &q)?));
        }
        if a == t {
            return Ok(IdentifyOutcome::Fail { trace });
        }
        let q_a = q_marginalize(g, &t, &a, &q)?;
        let first = c.first().expect("c is non-empty");
        let t_next = g.c_component_of(first, &a);
        if !c.is_subset(&t_next) {
            return Err(ContractError::NotSingleComponent(c.clone()));
        }
        q = decompose_blocks(g, &a, &q_a, std::slice::from_ref(&t_next))
            .pop()
            .expect("one block requested");
        t = t_next;
    }
    unreachable!("identify recursion exceeded the number of variables")
}
