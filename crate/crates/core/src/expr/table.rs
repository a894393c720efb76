//! Dense discrete tables: the observed joint and intermediate potentials.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{NodeId, VarSet};

/// Values for some variables, keyed by node id.
pub type Assignment = BTreeMap<NodeId, usize>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableError {
    #[error("table variables must be strictly increasing node ids")]
    UnsortedVariables,
    #[error("cardinality of variable {0} must be at least 1")]
    BadCardinality(NodeId),
    #[error("expected {expected} entries, got {got}")]
    WrongSize { expected: usize, got: usize },
    #[error("entry {index} is {value}, but joint tables must be strictly positive")]
    NotPositive { index: usize, value: f64 },
    #[error("entries sum to {0}, not 1")]
    NotNormalized(f64),
}

/// Exact, strictly positive joint distribution over a set of variables.
///
/// States are laid out in mixed radix with the last variable varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<NodeId>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(vars: Vec<NodeId>, cards: Vec<usize>, probs: Vec<f64>) -> Result<Self, TableError> {
        if vars.windows(2).any(|w| w[0] >= w[1]) || vars.len() != cards.len() {
            return Err(TableError::UnsortedVariables);
        }
        if let Some(i) = cards.iter().position(|&c| c == 0) {
            return Err(TableError::BadCardinality(vars[i]));
        }
        let expected: usize = cards.iter().product();
        if probs.len() != expected {
            return Err(TableError::WrongSize {
                expected,
                got: probs.len(),
            });
        }
        if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(**p > 0.0)) {
            return Err(TableError::NotPositive { index, value });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(TableError::NotNormalized(total));
        }
        Ok(JointTable { vars, cards, probs })
    }

    pub fn vars(&self) -> &[NodeId] {
        &self.vars
    }

    pub fn var_set(&self) -> VarSet {
        self.vars.iter().copied().collect()
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn card_of(&self, v: NodeId) -> Option<usize> {
        self.vars.iter().position(|&u| u == v).map(|i| self.cards[i])
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_states(&self) -> usize {
        self.probs.len()
    }

    /// Probability of a full assignment.
    pub fn prob(&self, assignment: &Assignment) -> Option<f64> {
        self.as_potential().value_at(assignment)
    }

    pub fn as_potential(&self) -> Potential {
        Potential {
            vars: self.vars.clone(),
            cards: self.cards.clone(),
            values: self.probs.clone(),
        }
    }

    /// Marginal over `keep` (which must be a subset of the table's variables).
    pub fn marginal(&self, keep: &VarSet) -> Potential {
        self.as_potential().sum_out_present(&self.var_set().difference(keep))
    }
}

/// A non-negative function over a finite set of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    vars: Vec<NodeId>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * cards[i + 1];
    }
    s
}

/// Walk every state of `cards` in layout order, tracking the digits.
fn for_each_state(cards: &[usize], mut f: impl FnMut(usize, &[usize])) {
    let total: usize = cards.iter().product();
    let mut digits = vec![0usize; cards.len()];
    for idx in 0..total {
        f(idx, &digits);
        for k in (0..cards.len()).rev() {
            digits[k] += 1;
            if digits[k] < cards[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

impl Potential {
    /// Same layout rules as [`JointTable`], without the normalization checks.
    pub fn new(vars: Vec<NodeId>, cards: Vec<usize>, values: Vec<f64>) -> Result<Self, TableError> {
        if vars.windows(2).any(|w| w[0] >= w[1]) || vars.len() != cards.len() {
            return Err(TableError::UnsortedVariables);
        }
        if let Some(i) = cards.iter().position(|&c| c == 0) {
            return Err(TableError::BadCardinality(vars[i]));
        }
        let expected: usize = cards.iter().product();
        if values.len() != expected {
            return Err(TableError::WrongSize {
                expected,
                got: values.len(),
            });
        }
        Ok(Potential { vars, cards, values })
    }

    pub fn constant(value: f64) -> Self {
        Potential {
            vars: vec![],
            cards: vec![],
            values: vec![value],
        }
    }

    pub fn vars(&self) -> &[NodeId] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Look up the entry selected by `assignment`; extra keys are ignored.
    pub fn value_at(&self, assignment: &Assignment) -> Option<f64> {
        let st = strides(&self.cards);
        let mut idx = 0;
        for (k, v) in self.vars.iter().enumerate() {
            let x = *assignment.get(v)?;
            if x >= self.cards[k] {
                return None;
            }
            idx += x * st[k];
        }
        Some(self.values[idx])
    }

    /// Re-index `other` onto this potential's layout, where `other.vars`
    /// must be a subset of `self.vars`.
    fn broadcast_index(&self, other: &Potential) -> Vec<usize> {
        let ost = strides(&other.cards);
        let map: Vec<Option<usize>> = self
            .vars
            .iter()
            .map(|v| other.vars.iter().position(|u| u == v).map(|p| ost[p]))
            .collect();
        let mut out = Vec::with_capacity(self.values.len());
        for_each_state(&self.cards, |_, digits| {
            out.push(digits.iter().zip(&map).map(|(d, s)| s.map_or(0, |s| d * s)).sum());
        });
        out
    }

    fn union_layout(&self, other: &Potential) -> Potential {
        let mut pairs: Vec<(NodeId, usize)> = self.vars.iter().copied().zip(self.cards.iter().copied()).collect();
        for (v, c) in other.vars.iter().zip(&other.cards) {
            if !self.vars.contains(v) {
                pairs.push((*v, *c));
            }
        }
        pairs.sort_unstable();
        let cards: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        let size = cards.iter().product();
        Potential {
            vars: pairs.into_iter().map(|p| p.0).collect(),
            cards,
            values: vec![0.0; size],
        }
    }

    pub fn multiply(&self, other: &Potential) -> Potential {
        let mut out = self.union_layout(other);
        let ia = out.broadcast_index(self);
        let ib = out.broadcast_index(other);
        for (k, v) in out.values.iter_mut().enumerate() {
            *v = self.values[ia[k]] * other.values[ib[k]];
        }
        out
    }

    /// Pointwise quotient; `None` when a denominator entry is not positive.
    pub fn divide(&self, other: &Potential) -> Option<Potential> {
        let mut out = self.union_layout(other);
        let ia = out.broadcast_index(self);
        let ib = out.broadcast_index(other);
        for (k, v) in out.values.iter_mut().enumerate() {
            let d = other.values[ib[k]];
            if !(d > 0.0) {
                return None;
            }
            *v = self.values[ia[k]] / d;
        }
        Some(out)
    }

    /// Sum out the variables of `drop` that this potential mentions.
    pub fn sum_out_present(&self, drop: &VarSet) -> Potential {
        let keep: Vec<usize> = (0..self.vars.len()).filter(|&k| !drop.contains(self.vars[k])).collect();
        if keep.len() == self.vars.len() {
            return self.clone();
        }
        let cards: Vec<usize> = keep.iter().map(|&k| self.cards[k]).collect();
        let ost = strides(&cards);
        let mut values = vec![0.0; cards.iter().product()];
        for_each_state(&self.cards, |idx, digits| {
            let target: usize = keep.iter().zip(&ost).map(|(&k, s)| digits[k] * s).sum();
            values[target] += self.values[idx];
        });
        Potential {
            vars: keep.iter().map(|&k| self.vars[k]).collect(),
            cards,
            values,
        }
    }

    pub fn scale(&self, factor: f64) -> Potential {
        Potential {
            vars: self.vars.clone(),
            cards: self.cards.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }
}
