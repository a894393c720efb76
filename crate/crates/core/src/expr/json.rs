//! Lossless JSON encoding of expressions, with variables by name.
//!
//! ```json
//! {"op":"quotient",
//!  "numerator":{"op":"factor","var":"Y","given":["X"]},
//!  "denominator":{"op":"one"}}
//! ```

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Expr, ExprKind, ExprRef};
use crate::graph::{NodeId, VarSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ExprJson {
    One,
    Factor {
        var: String,
        given: Vec<String>,
    },
    Product {
        terms: Vec<ExprJson>,
    },
    Sum {
        over: Vec<String>,
        body: Box<ExprJson>,
    },
    Quotient {
        numerator: Box<ExprJson>,
        denominator: Box<ExprJson>,
    },
    Q {
        scope: Vec<String>,
        body: Box<ExprJson>,
    },
}

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed expression json: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unknown variable `{0}` in expression")]
    UnknownVariable(String),
    #[error("factor for `{0}` conditions on itself")]
    SelfConditioned(String),
}

fn names_of(s: &VarSet, names: &[String]) -> Vec<String> {
    s.iter().map(|v| names[v].clone()).collect()
}

pub fn expr_to_json(e: &Expr, names: &[String]) -> ExprJson {
    match e.kind() {
        ExprKind::One => ExprJson::One,
        ExprKind::Factor { var, given } => ExprJson::Factor {
            var: names[*var].clone(),
            given: names_of(given, names),
        },
        ExprKind::Product(ts) => ExprJson::Product {
            terms: ts.iter().map(|t| expr_to_json(t, names)).collect(),
        },
        ExprKind::Sum { over, body } => ExprJson::Sum {
            over: names_of(over, names),
            body: Box::new(expr_to_json(body, names)),
        },
        ExprKind::Quotient { numerator, denominator } => ExprJson::Quotient {
            numerator: Box::new(expr_to_json(numerator, names)),
            denominator: Box::new(expr_to_json(denominator, names)),
        },
        ExprKind::Q { scope, body } => ExprJson::Q {
            scope: names_of(scope, names),
            body: Box::new(expr_to_json(body, names)),
        },
    }
}

pub fn expr_from_json(j: &ExprJson, names: &[String]) -> Result<ExprRef, JsonError> {
    let index: HashMap<&str, NodeId> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    build(j, &index)
}

fn lookup(index: &HashMap<&str, NodeId>, name: &str) -> Result<NodeId, JsonError> {
    index
        .get(name)
        .copied()
        .ok_or_else(|| JsonError::UnknownVariable(name.to_string()))
}

fn set(index: &HashMap<&str, NodeId>, list: &[String]) -> Result<VarSet, JsonError> {
    list.iter().map(|n| lookup(index, n)).collect()
}

fn build(j: &ExprJson, index: &HashMap<&str, NodeId>) -> Result<ExprRef, JsonError> {
    Ok(match j {
        ExprJson::One => Expr::one(),
        ExprJson::Factor { var, given } => {
            let v = lookup(index, var)?;
            let g = set(index, given)?;
            if g.contains(v) {
                return Err(JsonError::SelfConditioned(var.clone()));
            }
            Expr::factor(v, g)
        }
        ExprJson::Product { terms } => Expr::product(terms.iter().map(|t| build(t, index)).collect::<Result<_, _>>()?),
        ExprJson::Sum { over, body } => Expr::sum(set(index, over)?, build(body, index)?),
        ExprJson::Quotient { numerator, denominator } => {
            Expr::quotient(build(numerator, index)?, build(denominator, index)?)
        }
        ExprJson::Q { scope, body } => Expr::q(set(index, scope)?, build(body, index)?),
    })
}

/// Parse an expression from a JSON string.
pub fn parse_json(text: &str, names: &[String]) -> Result<ExprRef, JsonError> {
    let j: ExprJson = serde_json::from_str(text)?;
    expr_from_json(&j, names)
}
