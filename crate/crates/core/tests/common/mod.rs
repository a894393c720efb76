#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use qident::cli::parse_graph;
use qident::expr::{Assignment, ExprKind, ExprRef};
use qident::{Admg, VarSet};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn data(name: &str) -> Admg {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    parse_graph(&text).unwrap()
}

pub fn set(g: &Admg, names: &[&str]) -> VarSet {
    g.var_set(names).unwrap()
}

/// Every full assignment of variables `0..cards.len()`.
pub fn full_assignments(cards: &[usize]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for (v, &k) in cards.iter().enumerate() {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..k).map(move |x| {
                    let mut a = a.clone();
                    a.insert(v, x);
                    a
                })
            })
            .collect();
    }
    out
}

/// The observed conditionals in a product of factors, by name.
pub fn factor_set(g: &Admg, e: &ExprRef) -> BTreeSet<(String, BTreeSet<String>)> {
    let mut out = BTreeSet::new();
    let mut stack = vec![e.clone()];
    while let Some(e) = stack.pop() {
        match e.kind() {
            ExprKind::Factor { var, given } => {
                out.insert((
                    g.name(*var).to_string(),
                    given.iter().map(|v| g.name(v).to_string()).collect(),
                ));
            }
            ExprKind::Q { body, .. } => stack.push(body.clone()),
            ExprKind::Product(ts) => stack.extend(ts.iter().cloned()),
            other => panic!("not a product of factors: {other:?}"),
        }
    }
    out
}

pub fn named(pairs: &[(&str, &[&str])]) -> BTreeSet<(String, BTreeSet<String>)> {
    pairs
        .iter()
        .map(|(v, given)| (v.to_string(), given.iter().map(|s| s.to_string()).collect()))
        .collect()
}

pub fn asg(g: &Admg, pairs: &[(&str, usize)]) -> Assignment {
    pairs.iter().map(|(n, x)| (g.id(n).unwrap(), *x)).collect()
}
