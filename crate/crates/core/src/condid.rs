//! Identification of interventional distributions `P_t(s)` and conditional
//! interventional distributions `P_t(s | c)`.
//!
//! Both start from `D = An(S ∪ C)` in `G_{V∖T}` and the c-components `D_i`
//! of `G_D`, each of which is identified (or not) from the observed factor of
//! the c-component of `G` containing it. For the conditional case, blocks
//! that fail can still cancel between numerator and denominator; the
//! partition of the summed variables `F` below decides when they do.

use crate::error::ContractError;
use crate::expr::{sum_to_one_eliminate, weight_out, Expr, ExprRef};
use crate::graph::{Admg, NodeId, VarSet};
use crate::identify::{identify, IdentifyOutcome};
use crate::qcomp::{containing, q_observed_with, ContextMode, QFactor};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EffectOptions {
    pub contexts: ContextMode,
}

/// One block `D_i` of `G_D` and the attempt to identify `Q[D_i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockReport {
    pub block: VarSet,
    /// The c-component of the whole graph that contains the block.
    pub component: VarSet,
    pub outcome: IdentifyOutcome,
}

impl BlockReport {
    pub fn factor(&self) -> Option<&QFactor> {
        match &self.outcome {
            IdentifyOutcome::Success(q) => Some(q),
            IdentifyOutcome::Fail { .. } => None,
        }
    }
}

/// Split of the summed variables and of the identified blocks into the part
/// tied to unidentified blocks (`f0`, `i0`) and the part that is not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionState {
    /// Unidentified blocks.
    pub n_set: Vec<VarSet>,
    /// Identified blocks.
    pub i_set: Vec<VarSet>,
    pub f: VarSet,
    pub f0: VarSet,
    pub f1: VarSet,
    pub i0: Vec<VarSet>,
    pub i1: Vec<VarSet>,
    /// Union of `Pa(D_i)` over `n_set`.
    pub h: VarSet,
    /// `h` together with `Pa(D_i)` over `i0`.
    pub h_prime: VarSet,
    /// Passes of the loop that moved at least one variable or block.
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotIdentifiedReason {
    /// Unconditional query: these blocks of `G_D` could not be identified.
    FailedBlocks { blocks: Vec<VarSet> },
    /// Conditional query: outcome variables entangled with unidentified
    /// blocks.
    Overlap { witnesses: VarSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Identifiable(ExprRef),
    NotIdentified(NotIdentifiedReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub d: VarSet,
    pub f: VarSet,
    pub blocks: Vec<BlockReport>,
    /// Present when some block failed in a conditional query.
    pub partition: Option<PartitionState>,
    /// The expression after sum-to-one elimination, before stray free
    /// variables are averaged out.
    pub raw: Option<ExprRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryResult {
    pub verdict: Verdict,
    pub diagnostics: Diagnostics,
}

impl QueryResult {
    pub fn is_identifiable(&self) -> bool {
        matches!(self.verdict, Verdict::Identifiable(_))
    }

    pub fn expr(&self) -> Option<&ExprRef> {
        match &self.verdict {
            Verdict::Identifiable(e) => Some(e),
            Verdict::NotIdentified(_) => None,
        }
    }
}

fn check_known(g: &Admg, s: &VarSet) -> Result<(), ContractError> {
    match s.iter().find(|&v| v >= g.len()) {
        Some(v) => Err(ContractError::UnknownVariable(v)),
        None => Ok(()),
    }
}

fn check_disjoint(a: &VarSet, an: &'static str, b: &VarSet, bn: &'static str) -> Result<(), ContractError> {
    let shared = a.intersection(b);
    if shared.is_empty() {
        Ok(())
    } else {
        Err(ContractError::Overlap {
            first: an,
            second: bn,
            shared,
        })
    }
}

fn validate(g: &Admg, t: &VarSet, s: &VarSet, c: &VarSet) -> Result<(), ContractError> {
    for set in [t, s, c] {
        check_known(g, set)?;
    }
    if t.is_empty() {
        return Err(ContractError::Empty("treatment set"));
    }
    if s.is_empty() {
        return Err(ContractError::Empty("outcome set"));
    }
    check_disjoint(t, "treatment", s, "outcome")?;
    check_disjoint(t, "treatment", c, "condition")?;
    check_disjoint(s, "outcome", c, "condition")
}

/// Phase 1 and the classification of blocks.
fn classify(g: &Admg, t: &VarSet, target: &VarSet, opts: &EffectOptions) -> (VarSet, Vec<BlockReport>) {
    let observed = q_observed_with(g, opts.contexts);
    let d = g.ancestors(&g.all().difference(t), target);
    let blocks = g
        .c_components(&d)
        .into_iter()
        .map(|block| {
            let first = block.first().expect("blocks are non-empty");
            let q = containing(&observed, first).expect("observed factors cover V");
            let outcome = identify(g, &block, q.scope(), q).expect("block lies in one c-component of G");
            BlockReport {
                component: q.scope().clone(),
                block,
                outcome,
            }
        })
        .collect();
    (d, blocks)
}

fn product_of<'a>(factors: impl Iterator<Item = &'a QFactor>) -> ExprRef {
    let terms: Vec<ExprRef> = factors.map(|q| q.expr().clone()).filter(|e| !e.is_one()).collect();
    match terms.len() {
        0 => Expr::one(),
        1 => terms.into_iter().next().unwrap(),
        _ => Expr::product(terms),
    }
}

/// Simplify, then average out free variables outside `allowed`.
fn finish(e: ExprRef, allowed: &VarSet) -> (ExprRef, ExprRef) {
    let raw = sum_to_one_eliminate(&e);
    let stray = raw.free_vars().difference(allowed);
    (weight_out(&raw, &stray), raw)
}

/// `P_t(s)`.
pub fn unconditional_effect(g: &Admg, t: &VarSet, s: &VarSet) -> Result<QueryResult, ContractError> {
    unconditional_effect_with(g, t, s, &EffectOptions::default())
}

pub fn unconditional_effect_with(
    g: &Admg,
    t: &VarSet,
    s: &VarSet,
    opts: &EffectOptions,
) -> Result<QueryResult, ContractError> {
    validate(g, t, s, &VarSet::new())?;
    let (d, blocks) = classify(g, t, s, opts);
    let f = d.difference(s);
    let failed: Vec<VarSet> = blocks
        .iter()
        .filter(|b| b.factor().is_none())
        .map(|b| b.block.clone())
        .collect();
    let mut diagnostics = Diagnostics {
        d,
        f,
        blocks,
        partition: None,
        raw: None,
    };
    if !failed.is_empty() {
        return Ok(QueryResult {
            verdict: Verdict::NotIdentified(NotIdentifiedReason::FailedBlocks { blocks: failed }),
            diagnostics,
        });
    }
    let prod = product_of(diagnostics.blocks.iter().filter_map(BlockReport::factor));
    let e = Expr::sum(diagnostics.f.clone(), prod);
    let (out, raw) = finish(e, &t.union(s));
    diagnostics.raw = Some(raw);
    Ok(QueryResult {
        verdict: Verdict::Identifiable(out),
        diagnostics,
    })
}

/// `P_t(s | c)`. An empty `c` is the unconditional case.
pub fn conditional_effect(g: &Admg, t: &VarSet, s: &VarSet, c: &VarSet) -> Result<QueryResult, ContractError> {
    conditional_effect_with(g, t, s, c, &EffectOptions::default())
}

pub fn conditional_effect_with(
    g: &Admg,
    t: &VarSet,
    s: &VarSet,
    c: &VarSet,
    opts: &EffectOptions,
) -> Result<QueryResult, ContractError> {
    validate(g, t, s, c)?;
    if c.is_empty() {
        return unconditional_effect_with(g, t, s, opts);
    }
    let sc = s.union(c);
    let (d, blocks) = classify(g, t, &sc, opts);
    let f = d.difference(&sc);
    let mut diagnostics = Diagnostics {
        d,
        f: f.clone(),
        blocks,
        partition: None,
        raw: None,
    };
    let allowed = t.union(&sc);

    let (n_set, i_set): (Vec<&BlockReport>, Vec<&BlockReport>) =
        diagnostics.blocks.iter().partition(|b| b.factor().is_none());
    if n_set.is_empty() {
        let prod = product_of(i_set.iter().filter_map(|b| b.factor()));
        let num = Expr::sum(f, prod);
        let den = Expr::sum(s.clone(), num.clone());
        let (out, raw) = finish(Expr::quotient(num, den), &allowed);
        diagnostics.raw = Some(raw);
        return Ok(QueryResult {
            verdict: Verdict::Identifiable(out),
            diagnostics,
        });
    }

    let n_blocks: Vec<VarSet> = n_set.iter().map(|b| b.block.clone()).collect();
    let i_blocks: Vec<VarSet> = i_set.iter().map(|b| b.block.clone()).collect();
    let state = partition(g, &f, &n_blocks, &i_blocks);
    let witnesses = s.intersection(&state.h_prime);
    if !witnesses.is_empty() {
        diagnostics.partition = Some(state);
        return Ok(QueryResult {
            verdict: Verdict::NotIdentified(NotIdentifiedReason::Overlap { witnesses }),
            diagnostics,
        });
    }
    let prod = product_of(
        diagnostics
            .blocks
            .iter()
            .filter(|b| state.i1.contains(&b.block))
            .filter_map(BlockReport::factor),
    );
    let num = Expr::sum(state.f1.clone(), prod);
    let den = Expr::sum(s.clone(), num.clone());
    let (out, raw) = finish(Expr::quotient(num, den), &allowed);
    diagnostics.partition = Some(state);
    diagnostics.raw = Some(raw);
    Ok(QueryResult {
        verdict: Verdict::Identifiable(out),
        diagnostics,
    })
}

/// Grow `f0` and `i0` from the parents of the unidentified blocks until
/// neither can grow: an identified block joins `i0` once its parents meet
/// `f0`, and a summed variable joins `f0` once it is a parent of an `i0`
/// block. Block order is preserved in `i0` and `i1`.
pub fn partition(g: &Admg, f: &VarSet, n_set: &[VarSet], i_set: &[VarSet]) -> PartitionState {
    let pa = |b: &VarSet| g.pa_closure(b);
    let mut h = VarSet::new();
    for b in n_set {
        h.union_with(&pa(b));
    }
    let mut f0 = f.intersection(&h);
    let mut f1 = f.difference(&f0);
    let mut in_i0 = vec![false; i_set.len()];
    let mut rounds = 0;
    loop {
        let mut moved = false;
        for (k, b) in i_set.iter().enumerate() {
            if !in_i0[k] && !pa(b).is_disjoint(&f0) {
                in_i0[k] = true;
                moved = true;
            }
        }
        let mut reach = VarSet::new();
        for (k, b) in i_set.iter().enumerate() {
            if in_i0[k] {
                reach.union_with(&pa(b));
            }
        }
        let grow = f1.intersection(&reach);
        if !grow.is_empty() {
            f1 = f1.difference(&grow);
            f0.union_with(&grow);
            moved = true;
        }
        if !moved {
            break;
        }
        rounds += 1;
    }
    let mut h_prime = h.clone();
    let (mut i0, mut i1) = (Vec::new(), Vec::new());
    for (k, b) in i_set.iter().enumerate() {
        if in_i0[k] {
            h_prime.union_with(&pa(b));
            i0.push(b.clone());
        } else {
            i1.push(b.clone());
        }
    }
    PartitionState {
        n_set: n_set.to_vec(),
        i_set: i_set.to_vec(),
        f: f.clone(),
        f0,
        f1,
        i0,
        i1,
        h,
        h_prime,
        rounds,
    }
}

/// Sufficient condition for `P_x(s | c)`: inside the ancestral closure of
/// `s ∪ c`, no bidirected path joins `x` to one of its children.
pub fn theorem1_check(g: &Admg, x: NodeId, s: &VarSet, c: &VarSet) -> Result<bool, ContractError> {
    check_known(g, &VarSet::singleton(x))?;
    check_known(g, s)?;
    check_known(g, c)?;
    check_disjoint(s, "outcome", c, "condition")?;
    let sc = s.union(c);
    if sc.contains(x) {
        return Err(ContractError::Overlap {
            first: "treatment",
            second: "outcome and condition",
            shared: VarSet::singleton(x),
        });
    }
    let scope = g.ancestors(&g.all(), &sc);
    if !scope.contains(x) {
        return Ok(true);
    }
    Ok(!g.bidirected_path_to_child(x, &scope))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(g: &Admg, names: &[&str]) -> VarSet {
        g.var_set(names).unwrap()
    }

    #[test]
    fn cancellation_triple() {
        let g = fixtures::cancellation_graph();
        let x = set(&g, &["X"]);
        let joint = unconditional_effect(&g, &x, &set(&g, &["Y", "W"])).unwrap();
        assert_eq!(
            joint.verdict,
            Verdict::NotIdentified(NotIdentifiedReason::FailedBlocks {
                blocks: vec![set(&g, &["W"])]
            })
        );
        let w = unconditional_effect(&g, &x, &set(&g, &["W"])).unwrap();
        assert!(!w.is_identifiable());
        let cond = conditional_effect(&g, &x, &set(&g, &["Y"]), &set(&g, &["W"])).unwrap();
        assert!(cond.is_identifiable());
        assert_eq!(cond.diagnostics.d, set(&g, &["Y", "W", "Z"]));
        let state = cond.diagnostics.partition.unwrap();
        assert!(state.f0.is_empty() && state.i0.is_empty());
        assert_eq!(state.n_set, vec![set(&g, &["W"])]);
    }

    #[test]
    fn overlap_witness() {
        let g = fixtures::cancellation_graph();
        let r = conditional_effect(&g, &set(&g, &["X"]), &set(&g, &["Y"]), &set(&g, &["W", "B"])).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::NotIdentified(NotIdentifiedReason::Overlap {
                witnesses: set(&g, &["Y"])
            })
        );
        let blocks: Vec<_> = r.diagnostics.blocks.iter().map(|b| b.block.clone()).collect();
        assert_eq!(
            blocks,
            vec![set(&g, &["A", "Y"]), set(&g, &["B"]), set(&g, &["W"]), set(&g, &["Z"])]
        );
    }

    #[test]
    fn partition_graph_query() {
        let g = fixtures::partition_graph();
        let r = conditional_effect(&g, &set(&g, &["X"]), &set(&g, &["Y"]), &set(&g, &["A"])).unwrap();
        assert!(r.is_identifiable());
        assert_eq!(r.diagnostics.f, set(&g, &["B", "W", "Z"]));
        let state = r.diagnostics.partition.unwrap();
        assert!(state.f0.is_empty());
        assert!(state.i0.is_empty());
        assert_eq!(state.n_set, vec![set(&g, &["A"])]);
    }

    #[test]
    fn free_vars_stay_within_query() {
        let g = fixtures::cancellation_graph();
        let (t, s, c) = (set(&g, &["X"]), set(&g, &["Y"]), set(&g, &["W"]));
        let r = conditional_effect(&g, &t, &s, &c).unwrap();
        assert!(r.expr().unwrap().free_vars().is_subset(&t.union(&s).union(&c)));
    }

    #[test]
    fn contract_errors() {
        let g = fixtures::cancellation_graph();
        let x = set(&g, &["X"]);
        let y = set(&g, &["Y"]);
        assert!(matches!(
            conditional_effect(&g, &VarSet::new(), &y, &x),
            Err(ContractError::Empty(_))
        ));
        assert!(matches!(
            conditional_effect(&g, &x, &VarSet::new(), &y),
            Err(ContractError::Empty(_))
        ));
        assert!(matches!(
            conditional_effect(&g, &x, &y, &y),
            Err(ContractError::Overlap { .. })
        ));
        assert!(matches!(
            conditional_effect(&g, &x, &VarSet::singleton(99), &y),
            Err(ContractError::UnknownVariable(99))
        ));
    }

    #[test]
    fn theorem1_examples() {
        let pair = fixtures::confounded_pair();
        let (x, y) = (pair.id("X").unwrap(), set(&pair, &["Y"]));
        assert!(!theorem1_check(&pair, x, &y, &VarSet::new()).unwrap());
        let g = fixtures::cancellation_graph();
        let a = g.id("A").unwrap();
        assert!(theorem1_check(&g, a, &set(&g, &["Y"]), &set(&g, &["W"])).unwrap());
        // Z has no children inside An({W}).
        let z = g.id("Z").unwrap();
        assert!(theorem1_check(&g, z, &set(&g, &["W"]), &VarSet::new()).unwrap());
        assert!(theorem1_check(&g, a, &set(&g, &["A"]), &VarSet::new()).is_err());
    }

    #[test]
    fn fixpoint_moves_variables_and_blocks() {
        // N = {{N}} with parent P ∈ F; I-block {K} has parent P, and {L}
        // has parent Q where Q is a parent of K: everything cascades.
        let g = Admg::builder()
            .nodes(["P", "Q", "K", "L", "N"])
            .directed("P", "N")
            .directed("P", "K")
            .directed("Q", "K")
            .directed("Q", "L")
            .build()
            .unwrap();
        let f = set(&g, &["P", "Q"]);
        let state = partition(&g, &f, &[set(&g, &["N"])], &[set(&g, &["K"]), set(&g, &["L"])]);
        assert_eq!(state.f0, f);
        assert!(state.f1.is_empty());
        assert_eq!(state.i0, vec![set(&g, &["K"]), set(&g, &["L"])]);
        assert!(state.rounds <= f.len() + 2);
        assert_eq!(state.h_prime, set(&g, &["P", "Q", "K", "L", "N"]));
    }
}
