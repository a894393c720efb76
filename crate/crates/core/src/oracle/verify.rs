//! Checking an identified expression against enumerated ground truth.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{conditional_from, observed_joint, post_intervention, random_model, Cardinalities, OracleError};
use crate::condid::{conditional_effect_with, EffectOptions, QueryResult};
use crate::error::ContractError;
use crate::expr::{Assignment, EvalError, Evaluator, ExprRef};
use crate::graph::{Admg, NodeId, VarSet};

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub n_models: usize,
    pub seed: u64,
    pub tol: f64,
    pub observed_card: usize,
    pub latent_card: usize,
    pub state_cap: u64,
    pub effect: EffectOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_models: 100,
            seed: 0,
            tol: 1e-9,
            observed_card: 2,
            latent_card: 2,
            state_cap: super::DEFAULT_STATE_CAP,
            effect: EffectOptions::default(),
        }
    }
}

/// The largest deviation seen on one model and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelWorst {
    pub model: usize,
    pub seed: u64,
    pub max_abs_deviation: f64,
    pub assignment: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n_models: usize,
    pub n_assignments: usize,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub per_model: Vec<ModelWorst>,
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("the query is not identified")]
    NotIdentified(Box<QueryResult>),
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Identify `P_t(s | c)` and check the expression on random models.
pub fn verify_query(
    g: &Admg,
    t: &VarSet,
    s: &VarSet,
    c: &VarSet,
    opts: &VerifyOptions,
) -> Result<VerifyReport, VerifyError> {
    let result = conditional_effect_with(g, t, s, c, &opts.effect)?;
    match result.expr() {
        Some(e) => verify_expression(g, e, t, s, c, opts),
        None => Err(VerifyError::NotIdentified(Box::new(result))),
    }
}

/// Every joint value of `vars`, first variable slowest.
fn assignments(vars: &[NodeId], cards: &[usize]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..cards[v]).map(move |x| {
                    let mut a = a.clone();
                    a.insert(v, x);
                    a
                })
            })
            .collect();
    }
    out
}

/// Compare `expr`, evaluated on each model's observed joint, with the
/// model's `P_t(s | c)` at every assignment of `t`, `s` and `c`.
///
/// Models are drawn from seeds derived from `opts.seed` and checked in
/// parallel; the report lists them in index order.
pub fn verify_expression(
    g: &Admg,
    expr: &ExprRef,
    t: &VarSet,
    s: &VarSet,
    c: &VarSet,
    opts: &VerifyOptions,
) -> Result<VerifyReport, VerifyError> {
    let cards = Cardinalities::uniform(g.len(), opts.observed_card).with_latent(opts.latent_card);
    let mut master = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds: Vec<u64> = (0..opts.n_models).map(|_| master.gen()).collect();
    let t_values = assignments(&t.to_vec(), &cards.observed);
    let s_values = assignments(&s.to_vec(), &cards.observed);
    let c_values = assignments(&c.to_vec(), &cards.observed);

    let per_model: Vec<(ModelWorst, usize)> = seeds
        .par_iter()
        .enumerate()
        .map(|(k, &seed)| -> Result<(ModelWorst, usize), VerifyError> {
            let m = random_model(g, &cards, seed)?.with_state_cap(opts.state_cap);
            let joint = observed_joint(&m)?;
            let mut eval = Evaluator::new(&joint);
            let mut worst = (0.0f64, Assignment::new());
            let mut count = 0;
            for tv in &t_values {
                let post = post_intervention(&m, tv)?;
                for cv in &c_values {
                    for sv in &s_values {
                        let truth = conditional_from(&post.table, sv, cv)?;
                        let full: Assignment = tv.iter().chain(sv).chain(cv).map(|(&a, &b)| (a, b)).collect();
                        let got = eval.value(expr, &full)?;
                        let dev = (got - truth).abs();
                        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
                        if dev > worst.0 || count == 0 {
                            worst = (dev, full);
                        }
                        count += 1;
                    }
                }
            }
            let assignment = worst.1.iter().map(|(&v, &x)| (g.name(v).to_string(), x)).collect();
            Ok((
                ModelWorst {
                    model: k,
                    seed,
                    max_abs_deviation: worst.0,
                    assignment,
                },
                count,
            ))
        })
        .collect::<Result<_, _>>()?;

    let n_assignments = per_model.iter().map(|(_, n)| n).sum();
    let max_abs_deviation = per_model.iter().map(|(w, _)| w.max_abs_deviation).fold(0.0, f64::max);
    Ok(VerifyReport {
        n_models: opts.n_models,
        n_assignments,
        max_abs_deviation,
        tolerance: opts.tol,
        pass: max_abs_deviation <= opts.tol,
        per_model: per_model.into_iter().map(|(w, _)| w).collect(),
    })
}
