//! Random graphs and queries for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Admg, VarSet};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub nodes: usize,
    /// Chance of each forward directed edge under a hidden causal order.
    pub p_directed: f64,
    /// Chance of each bidirected edge.
    pub p_bidirected: f64,
    /// Keep at most this many randomly chosen parents per node.
    pub max_in_degree: Option<usize>,
}

impl GraphSpec {
    pub fn dense(nodes: usize, p_directed: f64, p_bidirected: f64) -> Self {
        GraphSpec {
            nodes,
            p_directed,
            p_bidirected,
            max_in_degree: None,
        }
    }

    pub fn with_max_in_degree(mut self, k: usize) -> Self {
        self.max_in_degree = Some(k);
        self
    }
}

/// Nodes are named `V0, V1, …` in declared order; the causal order is an
/// independent random permutation, so declared order is not topological.
pub fn random_admg(spec: &GraphSpec, seed: u64) -> Admg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.nodes;
    let names: Vec<String> = (0..n).map(|i| format!("V{i}")).collect();
    let mut causal: Vec<usize> = (0..n).collect();
    causal.shuffle(&mut rng);
    let mut b = Admg::builder().nodes(names.iter().cloned());
    for j in 1..n {
        let mut parents: Vec<usize> = (0..j).filter(|_| rng.gen_bool(spec.p_directed)).collect();
        if let Some(k) = spec.max_in_degree {
            if parents.len() > k {
                parents.shuffle(&mut rng);
                parents.truncate(k);
                parents.sort_unstable();
            }
        }
        for i in parents {
            b = b.directed(names[causal[i]].clone(), names[causal[j]].clone());
        }
    }
    for a in 0..n {
        for c in a + 1..n {
            if rng.gen_bool(spec.p_bidirected) {
                b = b.bidirected(names[a].clone(), names[c].clone());
            }
        }
    }
    b.build().expect("forward edges under a fixed order are acyclic")
}

/// A random graph without bidirected edges.
pub fn random_dag(nodes: usize, p_directed: f64, seed: u64) -> Admg {
    random_admg(&GraphSpec::dense(nodes, p_directed, 0.0), seed)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomQuery {
    pub t: VarSet,
    pub s: VarSet,
    pub c: VarSet,
}

/// Disjoint `t`, `s`, `c` with `t` and `s` non-empty, each of at most
/// `max_size` variables; `c` is empty with some probability. Needs at least
/// two nodes.
pub fn random_query(g: &Admg, max_size: usize, seed: u64) -> RandomQuery {
    assert!(g.len() >= 2, "a query needs at least two variables");
    let max_size = max_size.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vars: Vec<usize> = (0..g.len()).collect();
    vars.shuffle(&mut rng);
    let nt = rng.gen_range(1..=max_size.min(g.len() - 1));
    let ns = rng.gen_range(1..=max_size.min(g.len() - nt));
    let left = g.len() - nt - ns;
    let nc = rng.gen_range(0..=max_size.min(left));
    let mut it = vars.into_iter();
    let mut take = |k: usize| -> VarSet { it.by_ref().take(k).collect() };
    let t = take(nt);
    let s = take(ns);
    let c = take(nc);
    RandomQuery { t, s, c }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_bounded() {
        let spec = GraphSpec::dense(30, 0.3, 0.1).with_max_in_degree(3);
        let g = random_admg(&spec, 5);
        assert_eq!(g, random_admg(&spec, 5));
        assert!((0..g.len()).all(|v| g.parents(v).len() <= 3));
        assert!(random_dag(8, 0.5, 1).bidirected_edges().is_empty());
    }

    #[test]
    fn queries_are_disjoint() {
        let g = random_dag(6, 0.4, 2);
        for seed in 0..100 {
            let q = random_query(&g, 2, seed);
            assert!(!q.t.is_empty() && !q.s.is_empty());
            assert!(q.t.is_disjoint(&q.s) && q.t.is_disjoint(&q.c) && q.s.is_disjoint(&q.c));
        }
    }
}
