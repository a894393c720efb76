//! Q-factors and the three rules that manipulate them: factorization of the
//! observed joint by c-components, decomposition of a known `Q[H]` along the
//! c-components of `G_H`, and marginalization onto ancestral subsets.

use crate::error::ContractError;
use crate::expr::{Expr, ExprRef};
use crate::graph::{Admg, NodeId, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Read off the observed joint, one c-component of the whole graph.
    Observed,
    /// One c-component of a subgraph, from a known factor over the subgraph.
    Decomposed,
    /// Summed down to an ancestral subset.
    Marginalized,
    /// `Q[∅] = 1`.
    Empty,
}

/// `Q[scope]`, the distribution of `scope` when every other variable is set
/// by intervention, together with an expression computing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QFactor {
    scope: VarSet,
    expr: ExprRef,
    provenance: Provenance,
}

impl QFactor {
    /// Label `body` as `Q[scope]`. An empty scope always yields the constant 1.
    pub fn new(scope: VarSet, body: ExprRef, provenance: Provenance) -> Self {
        if scope.is_empty() {
            return Self::empty();
        }
        QFactor {
            expr: Expr::q(scope.clone(), body),
            scope,
            provenance,
        }
    }

    pub fn empty() -> Self {
        QFactor {
            scope: VarSet::new(),
            expr: Expr::one(),
            provenance: Provenance::Empty,
        }
    }

    pub fn scope(&self) -> &VarSet {
        &self.scope
    }

    pub fn expr(&self) -> &ExprRef {
        &self.expr
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// How the conditioning sets of observed factors are chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ContextMode {
    /// Condition each variable on everything before it in topological order.
    #[default]
    Full,
    /// Condition only on the parent closure of the variable's c-component
    /// within its topological prefix. Same values on every table generated
    /// by a model of the graph, shorter expressions.
    Minimal,
}

/// Factor the observed joint into one Q-factor per c-component of `g`.
pub fn q_observed(g: &Admg) -> Vec<QFactor> {
    q_observed_with(g, ContextMode::Full)
}

pub fn q_observed_with(g: &Admg, mode: ContextMode) -> Vec<QFactor> {
    let order = g.topological_order(&g.all());
    let context = |v: NodeId| -> VarSet {
        let pos = order.position(v).expect("every node is ordered");
        let before = order.prefix(pos);
        match mode {
            ContextMode::Full => before,
            ContextMode::Minimal => {
                let upto = order.prefix(pos + 1);
                let block = g.c_component_of(v, &upto);
                let mut ctx = g.pa_closure(&block);
                ctx.remove(v);
                ctx
            }
        }
    };
    g.c_components(&g.all())
        .into_iter()
        .map(|block| {
            // Latest variable first.
            let mut members: Vec<NodeId> = block.to_vec();
            members.sort_by_key(|&v| std::cmp::Reverse(order.position(v)));
            let factors: Vec<ExprRef> = members.iter().map(|&v| Expr::factor(v, context(v))).collect();
            let body = if factors.len() == 1 {
                factors.into_iter().next().unwrap()
            } else {
                Expr::product(factors)
            };
            QFactor::new(block, body, Provenance::Observed)
        })
        .collect()
}

/// The observed Q-factor whose scope contains `v`.
pub fn containing(factors: &[QFactor], v: NodeId) -> Option<&QFactor> {
    factors.iter().find(|q| q.scope.contains(v))
}

/// Split `Q[h]` into one factor per c-component of `G_h`, in block order.
pub fn q_decompose(g: &Admg, h: &VarSet, q_h: &QFactor) -> Result<Vec<QFactor>, ContractError> {
    check_scope(q_h, h)?;
    let blocks = g.c_components(h);
    Ok(decompose_blocks(g, h, q_h, &blocks))
}

/// Build the factors for the selected `blocks` of `G_h` only.
pub(crate) fn decompose_blocks(g: &Admg, h: &VarSet, q_h: &QFactor, blocks: &[VarSet]) -> Vec<QFactor> {
    if g.c_components(h).len() == 1 {
        return vec![q_h.clone()];
    }
    let order = g.topological_order(h);
    let k = order.len();
    // prefix_q[i] = Σ_{h \ h^(i)} Q[h], built on demand and shared.
    let mut prefix_q: Vec<Option<ExprRef>> = vec![None; k + 1];
    prefix_q[0] = Some(Expr::one());
    prefix_q[k] = Some(q_h.expr().clone());
    let mut prefix = |i: usize| -> ExprRef {
        prefix_q[i]
            .get_or_insert_with(|| Expr::sum(h.difference(&order.prefix(i)), q_h.expr().clone()))
            .clone()
    };
    blocks
        .iter()
        .map(|block| {
            let mut ratios = Vec::with_capacity(block.len());
            for (i, &v) in order.as_slice().iter().enumerate() {
                if !block.contains(v) {
                    continue;
                }
                let num = prefix(i + 1);
                let den = prefix(i);
                ratios.push(if den.is_one() { num } else { Expr::quotient(num, den) });
            }
            let body = if ratios.len() == 1 {
                ratios.pop().unwrap()
            } else {
                Expr::product(ratios)
            };
            QFactor::new(block.clone(), body, Provenance::Decomposed)
        })
        .collect()
}

/// `Q[w] = Σ_{c \ w} Q[c]`, valid when `w` contains its own ancestors in `G_c`.
pub fn q_marginalize(g: &Admg, c: &VarSet, w: &VarSet, q_c: &QFactor) -> Result<QFactor, ContractError> {
    check_scope(q_c, c)?;
    if !w.is_subset(c) {
        return Err(ContractError::NotSubset {
            inner: w.clone(),
            outer: c.clone(),
        });
    }
    if g.ancestors(c, w) != *w {
        return Err(ContractError::NotAncestral {
            w: w.clone(),
            c: c.clone(),
        });
    }
    if w == c {
        return Ok(q_c.clone());
    }
    Ok(QFactor::new(
        w.clone(),
        Expr::sum(c.difference(w), q_c.expr().clone()),
        Provenance::Marginalized,
    ))
}

fn check_scope(q: &QFactor, expected: &VarSet) -> Result<(), ContractError> {
    if q.scope() != expected {
        return Err(ContractError::ScopeMismatch {
            expected: expected.clone(),
            found: q.scope().clone(),
        });
    }
    Ok(())
}
