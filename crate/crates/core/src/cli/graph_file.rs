//! Plain-text graph files.
//!
//! ```text
//! # comments run to the end of the line
//! node X
//! node Y
//! X -> Y
//! X <-> Y
//! ```
//!
//! Every node is declared before use; declaration order fixes node ids.

use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{valid_name, Admg, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphFileError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Graph(#[from] GraphError),
}

fn at(line: usize, message: impl Into<String>) -> GraphFileError {
    GraphFileError::Line {
        line,
        message: message.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<Admg, GraphFileError> {
    let mut builder = Admg::builder();
    let mut declared = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens.as_slice() {
            ["node", name] => {
                if !valid_name(name) {
                    return Err(at(line, format!("`{name}` is not a valid node name")));
                }
                if !declared.insert(name.to_string()) {
                    return Err(at(line, format!("node `{name}` declared twice")));
                }
                builder = builder.node(*name);
            }
            [a, arrow @ ("->" | "<->"), b] => {
                for n in [a, b] {
                    if !declared.contains(*n) {
                        return Err(at(line, format!("node `{n}` used before its declaration")));
                    }
                }
                if a == b {
                    return Err(at(line, format!("self-loop on `{a}`")));
                }
                builder = if *arrow == "->" {
                    builder.directed(*a, *b)
                } else {
                    builder.bidirected(*a, *b)
                };
            }
            _ => {
                return Err(at(
                    line,
                    format!("expected `node NAME`, `A -> B` or `A <-> B`, found `{content}`"),
                ))
            }
        }
    }
    Ok(builder.build()?)
}

pub fn serialize_graph(g: &Admg) -> String {
    let mut out = String::new();
    for name in g.names() {
        out.push_str(&format!("node {name}\n"));
    }
    for (a, b) in g.directed_edges() {
        out.push_str(&format!("{} -> {}\n", g.name(a), g.name(b)));
    }
    for (a, b) in g.bidirected_edges() {
        out.push_str(&format!("{} <-> {}\n", g.name(a), g.name(b)));
    }
    out
}
