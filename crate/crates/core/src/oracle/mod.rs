//! Ground truth by brute force.
//!
//! A graph is turned into an explicit discrete model with one latent variable
//! per bidirected edge. Observed, interventional and Q-factor distributions
//! are then computed by enumerating every joint state of observed and latent
//! variables, independently of the symbolic machinery.

mod random;
mod verify;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::expr::{Assignment, JointTable, Potential, TableError};
use crate::graph::{Admg, NodeId, VarSet};

pub use random::{random_admg, random_dag, random_query, GraphSpec, RandomQuery};
pub use verify::{verify_expression, verify_query, ModelWorst, VerifyError, VerifyOptions, VerifyReport};

/// Floor applied to every sampled probability.
pub const EPSILON_POS: f64 = 1e-3;

/// Default bound on observed × latent joint states.
pub const DEFAULT_STATE_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("enumeration needs {states} joint states, above the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: u64 },
    #[error("cardinalities must be at least 2: {0}")]
    BadCardinality(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("variable {0} is not in the model")]
    UnknownVariable(NodeId),
    #[error("value {value} is out of range for variable {var}")]
    ValueOutOfRange { var: NodeId, value: usize },
    #[error("{0} appears in more than one assignment")]
    Overlap(NodeId),
    #[error("positivity violation: {0}")]
    PositivityViolation(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Domain sizes of the observed variables and of every latent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cardinalities {
    pub observed: Vec<usize>,
    pub latent: usize,
}

impl Cardinalities {
    pub fn binary(n: usize) -> Self {
        Self::uniform(n, 2)
    }

    pub fn uniform(n: usize, k: usize) -> Self {
        Cardinalities {
            observed: vec![k; n],
            latent: 2,
        }
    }

    pub fn with_latent(mut self, k: usize) -> Self {
        self.latent = k;
        self
    }
}

/// An unobserved common cause of the two endpoints of a bidirected edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Latent {
    pub endpoints: (NodeId, NodeId),
    pub probs: Vec<f64>,
}

/// `P(v | observed parents, latent parents)`.
///
/// Rows are indexed in mixed radix over the observed parents (ascending id)
/// followed by the latent parents (ascending latent index), last fastest;
/// each row holds one probability per value of `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub parents: Vec<NodeId>,
    pub latents: Vec<usize>,
    pub rows: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScmModel {
    graph: Admg,
    cards: Vec<usize>,
    latents: Vec<Latent>,
    cpts: Vec<Cpt>,
    state_cap: u64,
}

fn latent_parents(g: &Admg) -> (Vec<(NodeId, NodeId)>, Vec<Vec<usize>>) {
    let edges = g.bidirected_edges();
    let mut of = vec![Vec::new(); g.len()];
    for (k, &(a, b)) in edges.iter().enumerate() {
        of[a].push(k);
        of[b].push(k);
    }
    (edges, of)
}

fn check_row(row: &[f64], what: &str) -> Result<(), OracleError> {
    if let Some(p) = row.iter().find(|p| !(**p > 0.0)) {
        return Err(OracleError::InvalidModel(format!("{what} has non-positive entry {p}")));
    }
    let total: f64 = row.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(OracleError::InvalidModel(format!("{what} sums to {total}")));
    }
    Ok(())
}

/// A Dirichlet(1, …, 1) draw floored at [`EPSILON_POS`].
fn sample_row(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let scale = 1.0 - k as f64 * EPSILON_POS;
    raw.iter().map(|x| EPSILON_POS + scale * x / total).collect()
}

impl ScmModel {
    /// Assemble a model from explicit tables. `latent_probs` follows the
    /// order of [`Admg::bidirected_edges`]; `cpt_rows[v]` follows the layout
    /// documented on [`Cpt`].
    pub fn from_parts(
        graph: Admg,
        cards: Cardinalities,
        latent_probs: Vec<Vec<f64>>,
        cpt_rows: Vec<Vec<f64>>,
    ) -> Result<Self, OracleError> {
        let n = graph.len();
        if cards.observed.len() != n || cpt_rows.len() != n {
            return Err(OracleError::InvalidModel(format!("expected tables for {n} variables")));
        }
        if cards.observed.iter().any(|&k| k < 2) || cards.latent < 2 {
            return Err(OracleError::BadCardinality(format!("{cards:?}")));
        }
        let (edges, of) = latent_parents(&graph);
        if latent_probs.len() != edges.len() {
            return Err(OracleError::InvalidModel(format!(
                "expected {} latent distributions",
                edges.len()
            )));
        }
        let mut latents = Vec::with_capacity(edges.len());
        for (&endpoints, probs) in edges.iter().zip(latent_probs) {
            if probs.len() != cards.latent {
                return Err(OracleError::InvalidModel(
                    "latent distribution has the wrong size".into(),
                ));
            }
            check_row(&probs, "latent distribution")?;
            latents.push(Latent { endpoints, probs });
        }
        let mut cpts = Vec::with_capacity(n);
        for (v, rows) in cpt_rows.into_iter().enumerate() {
            let parents = graph.parents(v).to_vec();
            let configs: usize =
                parents.iter().map(|&p| cards.observed[p]).product::<usize>() * cards.latent.pow(of[v].len() as u32);
            let k = cards.observed[v];
            if rows.len() != configs * k {
                return Err(OracleError::InvalidModel(format!(
                    "table of {} has {} entries, expected {}",
                    graph.name(v),
                    rows.len(),
                    configs * k
                )));
            }
            for row in rows.chunks(k) {
                check_row(row, graph.name(v))?;
            }
            cpts.push(Cpt {
                parents,
                latents: of[v].clone(),
                rows,
            });
        }
        Ok(ScmModel {
            graph,
            cards: cards.observed,
            latents,
            cpts,
            state_cap: DEFAULT_STATE_CAP,
        })
    }

    pub fn graph(&self) -> &Admg {
        &self.graph
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn latents(&self) -> &[Latent] {
        &self.latents
    }

    pub fn cpt(&self, v: NodeId) -> &Cpt {
        &self.cpts[v]
    }

    pub fn state_cap(&self) -> u64 {
        self.state_cap
    }

    pub fn with_state_cap(mut self, cap: u64) -> Self {
        self.state_cap = cap;
        self
    }

    fn latent_card(&self) -> usize {
        self.latents.first().map_or(1, |l| l.probs.len())
    }

    /// Number of joint observed × latent states an enumeration visits.
    pub fn joint_states(&self) -> u128 {
        let obs: u128 = self.cards.iter().map(|&k| k as u128).product();
        obs * (self.latent_card() as u128).pow(self.latents.len() as u32)
    }

    /// `Σ_u P(u) Π_{v ∈ include} P(v | pa_v, u_v)` for every observed state
    /// consistent with `fixed`, laid out over all variables (last fastest).
    /// Inconsistent states are 0.
    fn enumerate(&self, include: &VarSet, fixed: &Assignment) -> Result<Vec<f64>, OracleError> {
        let states = self.joint_states();
        if states > self.state_cap as u128 {
            return Err(OracleError::StateSpaceTooLarge {
                states,
                cap: self.state_cap,
            });
        }
        let n = self.cards.len();
        let obs_states: usize = self.cards.iter().product();
        let lk = self.latent_card();
        let nl = self.latents.len();

        // Row offset contributions: observed parent p of v adds
        // value(p) * obs_stride[v][..], latent l adds value(l) * ...
        struct Plan {
            v: NodeId,
            parent_strides: Vec<(NodeId, usize)>,
            latent_strides: Vec<(usize, usize)>,
        }
        let plans: Vec<Plan> = include
            .iter()
            .map(|v| {
                let cpt = &self.cpts[v];
                let mut radix: Vec<usize> = cpt.parents.iter().map(|&p| self.cards[p]).collect();
                radix.extend(std::iter::repeat_n(lk, cpt.latents.len()));
                let mut strides = vec![0usize; radix.len()];
                let mut acc = self.cards[v];
                for i in (0..radix.len()).rev() {
                    strides[i] = acc;
                    acc *= radix[i];
                }
                let np = cpt.parents.len();
                Plan {
                    v,
                    parent_strides: cpt.parents.iter().copied().zip(strides[..np].iter().copied()).collect(),
                    latent_strides: cpt.latents.iter().copied().zip(strides[np..].iter().copied()).collect(),
                }
            })
            .collect();

        let mut out = vec![0.0; obs_states];
        let mut u = vec![0usize; nl];
        let mut x = vec![0usize; n];
        let lat_states = lk.pow(nl as u32);
        for _ in 0..lat_states {
            let weight: f64 = u.iter().zip(&self.latents).map(|(&val, l)| l.probs[val]).product();
            // Latent part of each row offset is constant across observed states.
            let base: Vec<usize> = plans
                .iter()
                .map(|p| p.latent_strides.iter().map(|&(l, s)| u[l] * s).sum())
                .collect();
            x.iter_mut().for_each(|d| *d = 0);
            for slot in out.iter_mut() {
                if fixed.iter().all(|(&v, &val)| x[v] == val) {
                    let mut prod = weight;
                    for (p, &b) in plans.iter().zip(&base) {
                        let row: usize = b + p.parent_strides.iter().map(|&(q, s)| x[q] * s).sum::<usize>();
                        prod *= self.cpts[p.v].rows[row + x[p.v]];
                    }
                    *slot += prod;
                }
                for k in (0..n).rev() {
                    x[k] += 1;
                    if x[k] < self.cards[k] {
                        break;
                    }
                    x[k] = 0;
                }
            }
            for k in (0..nl).rev() {
                u[k] += 1;
                if u[k] < lk {
                    break;
                }
                u[k] = 0;
            }
        }
        Ok(out)
    }

    fn check_assignment(&self, a: &Assignment) -> Result<(), OracleError> {
        for (&v, &val) in a {
            let k = *self.cards.get(v).ok_or(OracleError::UnknownVariable(v))?;
            if val >= k {
                return Err(OracleError::ValueOutOfRange { var: v, value: val });
            }
        }
        Ok(())
    }
}

/// Draw a model for `g`: latent priors and observed conditionals are
/// independent flat-Dirichlet rows floored at [`EPSILON_POS`].
pub fn random_model(g: &Admg, cards: &Cardinalities, seed: u64) -> Result<ScmModel, OracleError> {
    if cards.observed.len() != g.len() {
        return Err(OracleError::InvalidModel(format!(
            "{} cardinalities for {} variables",
            cards.observed.len(),
            g.len()
        )));
    }
    if cards.observed.iter().any(|&k| k < 2) || cards.latent < 2 {
        return Err(OracleError::BadCardinality(format!("{cards:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (edges, of) = latent_parents(g);
    let latent_probs = edges.iter().map(|_| sample_row(&mut rng, cards.latent)).collect();
    let cpt_rows = (0..g.len())
        .map(|v| {
            let configs: usize = g.parents(v).iter().map(|p| cards.observed[p]).product::<usize>()
                * cards.latent.pow(of[v].len() as u32);
            (0..configs)
                .flat_map(|_| sample_row(&mut rng, cards.observed[v]))
                .collect()
        })
        .collect();
    ScmModel::from_parts(g.clone(), cards.clone(), latent_probs, cpt_rows)
}

/// `P(v)`, marginalizing the latents.
pub fn observed_joint(m: &ScmModel) -> Result<JointTable, OracleError> {
    let probs = m.enumerate(&m.graph.all(), &Assignment::new())?;
    Ok(JointTable::new((0..m.cards.len()).collect(), m.cards.clone(), probs)?)
}

/// The distribution after `do(t)`: a table over the non-intervened variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Interventional {
    pub fixed: Assignment,
    pub table: JointTable,
}

pub fn post_intervention(m: &ScmModel, t: &Assignment) -> Result<Interventional, OracleError> {
    m.check_assignment(t)?;
    let treated: VarSet = t.keys().copied().collect();
    let rest = m.graph.all().difference(&treated);
    let full = m.enumerate(&rest, t)?;
    // Consistent states appear in the same relative order as the reduced layout.
    let mut probs = Vec::with_capacity(full.len());
    let mut x = vec![0usize; m.cards.len()];
    for p in full {
        if t.iter().all(|(&v, &val)| x[v] == val) {
            probs.push(p);
        }
        for k in (0..x.len()).rev() {
            x[k] += 1;
            if x[k] < m.cards[k] {
                break;
            }
            x[k] = 0;
        }
    }
    let vars = rest.to_vec();
    let cards = vars.iter().map(|&v| m.cards[v]).collect();
    Ok(Interventional {
        fixed: t.clone(),
        table: JointTable::new(vars, cards, probs)?,
    })
}

/// `Q[c]` as a function of all observed variables.
pub fn q_table(m: &ScmModel, c: &VarSet) -> Result<Potential, OracleError> {
    if let Some(v) = c.iter().find(|&v| v >= m.cards.len()) {
        return Err(OracleError::UnknownVariable(v));
    }
    let values = m.enumerate(c, &Assignment::new())?;
    Ok(Potential::new((0..m.cards.len()).collect(), m.cards.clone(), values)?)
}

/// `P_t(s | c) = P_t(s, c) / P_t(c)` at the given values.
pub fn oracle_conditional(m: &ScmModel, t: &Assignment, s: &Assignment, c: &Assignment) -> Result<f64, OracleError> {
    for (a, b) in [(t, s), (t, c), (s, c)] {
        if let Some(&v) = a.keys().find(|v| b.contains_key(v)) {
            return Err(OracleError::Overlap(v));
        }
    }
    m.check_assignment(s)?;
    m.check_assignment(c)?;
    let post = post_intervention(m, t)?;
    conditional_from(&post.table, s, c)
}

pub(crate) fn conditional_from(table: &JointTable, s: &Assignment, c: &Assignment) -> Result<f64, OracleError> {
    let marginal = |a: &Assignment| -> f64 {
        let keep: VarSet = a.keys().copied().collect();
        table
            .marginal(&keep)
            .value_at(a)
            .expect("assignment is within the table")
    };
    let sc: Assignment = s.iter().chain(c).map(|(&k, &v)| (k, v)).collect();
    let den = if c.is_empty() { 1.0 } else { marginal(c) };
    if !(den > 0.0) {
        return Err(OracleError::PositivityViolation(format!("P_t(c) = {den}")));
    }
    Ok(marginal(&sc) / den)
}
