//! JSON documents printed by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::condid::{NotIdentifiedReason, PartitionState, QueryResult, Verdict};
use crate::expr::{expr_to_json, render_with, ExprJson, RenderOptions};
use crate::graph::{Admg, VarSet};
use crate::identify::IdentifyOutcome;
use crate::oracle::VerifyReport;

pub const SCHEMA_VERSION: u32 = 1;

fn names(g: &Admg, s: &VarSet) -> Vec<String> {
    s.iter().map(|v| g.name(v).to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryJson {
    #[serde(rename = "do")]
    pub treatment: Vec<String>,
    pub outcome: Vec<String>,
    pub given: Vec<String>,
}

impl QueryJson {
    pub fn new(g: &Admg, t: &VarSet, s: &VarSet, c: &VarSet) -> Self {
        QueryJson {
            treatment: names(g, t),
            outcome: names(g, s),
            given: names(g, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReasonJson {
    FailedBlocks { blocks: Vec<Vec<String>> },
    Overlap { witnesses: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepJson {
    pub c: Vec<String>,
    pub t: Vec<String>,
    pub a: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub block: Vec<String>,
    pub component: Vec<String>,
    pub identified: bool,
    /// Recursion steps of a failed identification.
    pub trace: Vec<StepJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub n_set: Vec<Vec<String>>,
    pub i_set: Vec<Vec<String>>,
    pub f: Vec<String>,
    pub f0: Vec<String>,
    pub f1: Vec<String>,
    pub i0: Vec<Vec<String>>,
    pub i1: Vec<Vec<String>>,
    pub h: Vec<String>,
    pub h_prime: Vec<String>,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub d: Vec<String>,
    pub f: Vec<String>,
    pub blocks: Vec<BlockJson>,
    pub partition: Option<PartitionJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifyJson {
    pub schema_version: u32,
    pub query: QueryJson,
    pub identifiable: bool,
    pub expression: Option<ExprJson>,
    pub rendered: Option<String>,
    pub reason: Option<ReasonJson>,
    pub diagnostics: DiagnosticsJson,
}

fn blocks(g: &Admg, list: &[VarSet]) -> Vec<Vec<String>> {
    list.iter().map(|b| names(g, b)).collect()
}

fn partition_json(g: &Admg, p: &PartitionState) -> PartitionJson {
    PartitionJson {
        n_set: blocks(g, &p.n_set),
        i_set: blocks(g, &p.i_set),
        f: names(g, &p.f),
        f0: names(g, &p.f0),
        f1: names(g, &p.f1),
        i0: blocks(g, &p.i0),
        i1: blocks(g, &p.i1),
        h: names(g, &p.h),
        h_prime: names(g, &p.h_prime),
        rounds: p.rounds,
    }
}

impl IdentifyJson {
    pub fn new(g: &Admg, query: QueryJson, result: &QueryResult, opts: &RenderOptions) -> Self {
        let diag = &result.diagnostics;
        let diagnostics = DiagnosticsJson {
            d: names(g, &diag.d),
            f: names(g, &diag.f),
            blocks: diag
                .blocks
                .iter()
                .map(|b| BlockJson {
                    block: names(g, &b.block),
                    component: names(g, &b.component),
                    identified: b.factor().is_some(),
                    trace: match &b.outcome {
                        IdentifyOutcome::Success(_) => vec![],
                        IdentifyOutcome::Fail { trace } => trace
                            .iter()
                            .map(|s| StepJson {
                                c: names(g, &s.c),
                                t: names(g, &s.t),
                                a: names(g, &s.a),
                            })
                            .collect(),
                    },
                })
                .collect(),
            partition: diag.partition.as_ref().map(|p| partition_json(g, p)),
        };
        let (expression, rendered, reason) = match &result.verdict {
            Verdict::Identifiable(e) => (
                Some(expr_to_json(e, g.names())),
                Some(render_with(e, g.names(), opts)),
                None,
            ),
            Verdict::NotIdentified(NotIdentifiedReason::FailedBlocks { blocks: b }) => {
                (None, None, Some(ReasonJson::FailedBlocks { blocks: blocks(g, b) }))
            }
            Verdict::NotIdentified(NotIdentifiedReason::Overlap { witnesses }) => (
                None,
                None,
                Some(ReasonJson::Overlap {
                    witnesses: names(g, witnesses),
                }),
            ),
        };
        IdentifyJson {
            schema_version: SCHEMA_VERSION,
            query,
            identifiable: result.is_identifiable(),
            expression,
            rendered,
            reason,
            diagnostics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyJson {
    pub schema_version: u32,
    pub query: QueryJson,
    #[serde(flatten)]
    pub report: VerifyReport,
}
