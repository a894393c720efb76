//! Symbolic expressions over the observed joint distribution.
//!
//! Expressions are immutable and reference-counted so that a Q-factor used in
//! many places (every prefix ratio of a decomposition refers to the same
//! parent factor) is stored once. Each node caches its free variables.

mod eval;
mod json;
mod render;
mod simplify;
mod table;

use std::fmt;
use std::sync::Arc;

use crate::graph::{NodeId, VarSet};

pub use eval::{evaluate, EvalError, Evaluator};
pub use json::{expr_from_json, expr_to_json, parse_json, ExprJson, JsonError};
pub(crate) use render::display_names;
pub use render::{render, render_with, RenderFormat, RenderOptions};
pub use simplify::{sum_to_one_eliminate, weight_out};
pub use table::{Assignment, JointTable, Potential, TableError};

pub type ExprRef = Arc<Expr>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    /// The constant 1, which is also `Q[∅]`.
    One,
    /// Observed conditional `P(var | given)`.
    Factor {
        var: NodeId,
        given: VarSet,
    },
    Product(Vec<ExprRef>),
    /// Sum of `body` over every joint value of `over`.
    Sum {
        over: VarSet,
        body: ExprRef,
    },
    Quotient {
        numerator: ExprRef,
        denominator: ExprRef,
    },
    /// A Q-factor `Q[scope]` with its derivation as `body`.
    ///
    /// Evaluates exactly as `body`. The label asserts that summing `body`
    /// over `scope` gives 1 for any values of the remaining free variables,
    /// which is what [`sum_to_one_eliminate`] relies on.
    Q {
        scope: VarSet,
        body: ExprRef,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    kind: ExprKind,
    free: VarSet,
}

impl Expr {
    pub fn kind(&self) -> &ExprKind {
        &self.kind
    }

    /// Variables that must be assigned to evaluate this expression.
    pub fn free_vars(&self) -> &VarSet {
        &self.free
    }

    pub fn one() -> ExprRef {
        Arc::new(Expr {
            kind: ExprKind::One,
            free: VarSet::new(),
        })
    }

    pub fn factor(var: NodeId, given: VarSet) -> ExprRef {
        debug_assert!(!given.contains(var), "factor conditions on itself");
        let mut free = given.clone();
        free.insert(var);
        Arc::new(Expr {
            kind: ExprKind::Factor { var, given },
            free,
        })
    }

    pub fn product(terms: Vec<ExprRef>) -> ExprRef {
        let mut free = VarSet::new();
        for t in &terms {
            free.union_with(&t.free);
        }
        Arc::new(Expr {
            kind: ExprKind::Product(terms),
            free,
        })
    }

    /// `Σ_over body`; an empty `over` returns `body` itself.
    pub fn sum(over: VarSet, body: ExprRef) -> ExprRef {
        if over.is_empty() {
            return body;
        }
        let free = body.free.difference(&over);
        Arc::new(Expr {
            kind: ExprKind::Sum { over, body },
            free,
        })
    }

    pub fn quotient(numerator: ExprRef, denominator: ExprRef) -> ExprRef {
        let free = numerator.free.union(&denominator.free);
        Arc::new(Expr {
            kind: ExprKind::Quotient { numerator, denominator },
            free,
        })
    }

    pub fn q(scope: VarSet, body: ExprRef) -> ExprRef {
        let free = body.free.clone();
        Arc::new(Expr {
            kind: ExprKind::Q { scope, body },
            free,
        })
    }

    pub fn is_one(&self) -> bool {
        matches!(self.kind, ExprKind::One)
    }

    /// Children in evaluation order.
    pub fn children(&self) -> Vec<&ExprRef> {
        match &self.kind {
            ExprKind::One | ExprKind::Factor { .. } => vec![],
            ExprKind::Product(ts) => ts.iter().collect(),
            ExprKind::Sum { body, .. } | ExprKind::Q { body, .. } => vec![body],
            ExprKind::Quotient { numerator, denominator } => vec![numerator, denominator],
        }
    }

    /// Number of distinct nodes, counting shared subexpressions once.
    pub fn dag_size(self: &ExprRef) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if seen.insert(Arc::as_ptr(&e)) {
                stack.extend(e.children().into_iter().cloned());
            }
        }
        seen.len()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Without a vocabulary, variables print as v<id>.
        let namer = |v: NodeId| format!("v{v}");
        f.write_str(&render::render_text_like(self, &namer, &RenderOptions::text()))
    }
}
