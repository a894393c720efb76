//! Exact evaluation of expressions against a joint table.
//!
//! Every node is evaluated to a potential over its free variables, bottom up,
//! with results memoized per node so shared subexpressions cost nothing extra.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use super::table::{Assignment, JointTable, Potential};
use super::{Expr, ExprKind, ExprRef};
use crate::graph::{NodeId, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero while evaluating {0}: the table is not strictly positive")]
    PositivityViolation(String),
    #[error("no value given for free variable {0}")]
    MissingValue(NodeId),
    #[error("value out of range for variable {0}")]
    ValueOutOfRange(NodeId),
    #[error("variable {0} does not appear in the joint table")]
    UnknownVariable(NodeId),
}

pub struct Evaluator<'t> {
    table: &'t JointTable,
    marginals: HashMap<VarSet, Arc<Potential>>,
    // Holds the expression alive so its address cannot be reused.
    memo: HashMap<*const Expr, (ExprRef, Arc<Potential>)>,
}

impl<'t> Evaluator<'t> {
    pub fn new(table: &'t JointTable) -> Self {
        Evaluator {
            table,
            marginals: HashMap::new(),
            memo: HashMap::new(),
        }
    }

    pub fn table(&self) -> &JointTable {
        self.table
    }

    fn marginal(&mut self, vars: &VarSet) -> Result<Arc<Potential>, EvalError> {
        if let Some(p) = self.marginals.get(vars) {
            return Ok(p.clone());
        }
        let known = self.table.var_set();
        if let Some(v) = vars.difference(&known).first() {
            return Err(EvalError::UnknownVariable(v));
        }
        let p = Arc::new(self.table.marginal(vars));
        self.marginals.insert(vars.clone(), p.clone());
        Ok(p)
    }

    /// The value of `e` as a function of its free variables.
    pub fn potential(&mut self, e: &ExprRef) -> Result<Arc<Potential>, EvalError> {
        let key = Arc::as_ptr(e);
        if let Some((_, p)) = self.memo.get(&key) {
            return Ok(p.clone());
        }
        let p = match e.kind() {
            ExprKind::One => Arc::new(Potential::constant(1.0)),
            ExprKind::Factor { var, given } => {
                let mut joint = given.clone();
                joint.insert(*var);
                let num = self.marginal(&joint)?;
                let den = self.marginal(given)?;
                Arc::new(
                    num.divide(&den)
                        .ok_or_else(|| EvalError::PositivityViolation(format!("P(v{var}|...)")))?,
                )
            }
            ExprKind::Product(terms) => {
                let mut acc = Potential::constant(1.0);
                for t in terms {
                    let p = self.potential(t)?;
                    acc = acc.multiply(&p);
                }
                Arc::new(acc)
            }
            ExprKind::Sum { over, body } => {
                let inner = self.potential(body)?;
                let mentioned: VarSet = inner.vars().iter().copied().collect();
                // Summing over a variable the body ignores multiplies by its range.
                let mut multiplier = 1.0;
                for v in over.difference(&mentioned).iter() {
                    let card = self.table.card_of(v).ok_or(EvalError::UnknownVariable(v))?;
                    multiplier *= card as f64;
                }
                let summed = inner.sum_out_present(over);
                Arc::new(if multiplier == 1.0 {
                    summed
                } else {
                    summed.scale(multiplier)
                })
            }
            ExprKind::Quotient { numerator, denominator } => {
                let n = self.potential(numerator)?;
                let d = self.potential(denominator)?;
                Arc::new(
                    n.divide(&d)
                        .ok_or_else(|| EvalError::PositivityViolation("a quotient".into()))?,
                )
            }
            ExprKind::Q { body, .. } => self.potential(body)?,
        };
        self.memo.insert(key, (e.clone(), p.clone()));
        Ok(p)
    }

    /// Evaluate `e` at `assignment`, which must cover its free variables.
    pub fn value(&mut self, e: &ExprRef, assignment: &Assignment) -> Result<f64, EvalError> {
        for v in e.free_vars().iter() {
            let x = *assignment.get(&v).ok_or(EvalError::MissingValue(v))?;
            let card = self.table.card_of(v).ok_or(EvalError::UnknownVariable(v))?;
            if x >= card {
                return Err(EvalError::ValueOutOfRange(v));
            }
        }
        let p = self.potential(e)?;
        Ok(p.value_at(assignment).expect("assignment covers free variables"))
    }
}

/// One-shot evaluation; use an [`Evaluator`] when evaluating repeatedly.
pub fn evaluate(e: &ExprRef, table: &JointTable, assignment: &Assignment) -> Result<f64, EvalError> {
    Evaluator::new(table).value(e, assignment)
}
