//! Acyclic directed mixed graphs over observed variables.
//!
//! Directed edges carry direct causal influence; bidirected edges stand for
//! an unobserved common cause of their two endpoints. Every structural query
//! takes a `scope` so that induced subgraphs never have to be materialized.

mod varset;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use thiserror::Error;

pub use varset::{NodeId, VarSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("directed edges form a cycle through `{0}`")]
    Cycle(String),
    #[error("node name `{0}` is not a valid identifier")]
    InvalidName(String),
}

/// A semi-Markovian causal graph.
///
/// Immutable once built. Node ids are positions in the declared node order,
/// and that order is the tie-break used by every algorithm downstream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Admg {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    parents: Vec<VarSet>,
    children: Vec<VarSet>,
    spouses: Vec<VarSet>,
}

/// Incremental construction of an [`Admg`]; acyclicity is checked in
/// [`AdmgBuilder::build`].
#[derive(Debug, Default, Clone)]
pub struct AdmgBuilder {
    names: Vec<String>,
    directed: Vec<(String, String)>,
    bidirected: Vec<(String, String)>,
}

pub(crate) fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '.' || c == '\'')
}

impl AdmgBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(mut self, name: impl Into<String>) -> Self {
        self.names.push(name.into());
        self
    }

    pub fn nodes<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.names.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn directed(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.directed.push((from.into(), to.into()));
        self
    }

    pub fn bidirected(mut self, a: impl Into<String>, b: impl Into<String>) -> Self {
        self.bidirected.push((a.into(), b.into()));
        self
    }

    pub fn build(self) -> Result<Admg, GraphError> {
        let n = self.names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in self.names.iter().enumerate() {
            if !valid_name(name) {
                return Err(GraphError::InvalidName(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(name.clone()));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
        };

        let mut parents = vec![VarSet::new(); n];
        let mut children = vec![VarSet::new(); n];
        let mut spouses = vec![VarSet::new(); n];
        for (a, b) in &self.directed {
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            if ia == ib {
                return Err(GraphError::SelfLoop(a.clone()));
            }
            parents[ib].insert(ia);
            children[ia].insert(ib);
        }
        for (a, b) in &self.bidirected {
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            if ia == ib {
                return Err(GraphError::SelfLoop(a.clone()));
            }
            spouses[ia].insert(ib);
            spouses[ib].insert(ia);
        }

        let g = Admg {
            names: self.names,
            index,
            parents,
            children,
            spouses,
        };
        let all = g.all();
        let order = g.topological_order(&all);
        if order.len() != n {
            let stuck = (0..n).find(|v| !order.contains(*v)).unwrap_or(0);
            return Err(GraphError::Cycle(g.names[stuck].clone()));
        }
        Ok(g)
    }
}

impl Admg {
    pub fn builder() -> AdmgBuilder {
        AdmgBuilder::new()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v]
    }

    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    /// Resolve a list of names into a set, failing on the first unknown one.
    pub fn var_set<S: AsRef<str>>(&self, names: &[S]) -> Result<VarSet, GraphError> {
        names
            .iter()
            .map(|n| {
                self.id(n.as_ref())
                    .ok_or_else(|| GraphError::UnknownNode(n.as_ref().to_string()))
            })
            .collect()
    }

    pub fn set_names(&self, s: &VarSet) -> Vec<&str> {
        s.iter().map(|v| self.name(v)).collect()
    }

    /// All nodes.
    pub fn all(&self) -> VarSet {
        VarSet::full(self.len())
    }

    pub fn parents(&self, v: NodeId) -> &VarSet {
        &self.parents[v]
    }

    pub fn children(&self, v: NodeId) -> &VarSet {
        &self.children[v]
    }

    /// Nodes joined to `v` by a bidirected edge.
    pub fn spouses(&self, v: NodeId) -> &VarSet {
        &self.spouses[v]
    }

    pub fn directed_edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.len())
            .flat_map(|b| self.parents[b].iter().map(move |a| (a, b)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Bidirected edges as `(a, b)` with `a < b`.
    pub fn bidirected_edges(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.len())
            .flat_map(|a| self.spouses[a].iter().filter(move |&b| a < b).map(move |b| (a, b)))
            .collect()
    }

    /// Topological order of the induced subgraph over `scope`.
    ///
    /// Among nodes whose parents (inside `scope`) are all placed, the earliest
    /// in declared order goes next.
    pub fn topological_order(&self, scope: &VarSet) -> TopoOrder {
        let mut indegree: HashMap<NodeId, usize> = scope
            .iter()
            .map(|v| (v, self.parents[v].intersection(scope).len()))
            .collect();
        let mut ready: BinaryHeap<Reverse<NodeId>> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| Reverse(v))
            .collect();
        let mut order = Vec::with_capacity(scope.len());
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for c in self.children[v].intersection(scope).iter() {
                let d = indegree.get_mut(&c).expect("child in scope");
                *d -= 1;
                if *d == 0 {
                    ready.push(Reverse(c));
                }
            }
        }
        TopoOrder { order }
    }

    /// Partition of `scope` into c-components of the induced subgraph,
    /// ordered by each block's earliest member.
    pub fn c_components(&self, scope: &VarSet) -> Vec<VarSet> {
        let mut seen = VarSet::new();
        let mut blocks = Vec::new();
        for start in scope.iter() {
            if seen.contains(start) {
                continue;
            }
            let block = self.c_component_of(start, scope);
            seen.union_with(&block);
            blocks.push(block);
        }
        blocks
    }

    /// The c-component of the induced subgraph over `scope` containing `v`.
    pub fn c_component_of(&self, v: NodeId, scope: &VarSet) -> VarSet {
        let mut block = VarSet::singleton(v);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for w in self.spouses[u].intersection(scope).iter() {
                if block.insert(w) {
                    stack.push(w);
                }
            }
        }
        block
    }

    /// `s` together with its ancestors in the induced subgraph over `scope`.
    pub fn ancestors(&self, scope: &VarSet, s: &VarSet) -> VarSet {
        let mut out = s.intersection(scope);
        let mut stack = out.to_vec();
        while let Some(u) = stack.pop() {
            for p in self.parents[u].intersection(scope).iter() {
                if out.insert(p) {
                    stack.push(p);
                }
            }
        }
        out
    }

    /// `s` together with the parents of its members in the full graph.
    pub fn pa_closure(&self, s: &VarSet) -> VarSet {
        let mut out = s.clone();
        for v in s.iter() {
            out.union_with(&self.parents[v]);
        }
        out
    }

    /// Whether a bidirected path inside `scope` joins `x` to one of its
    /// children in `scope`.
    pub fn bidirected_path_to_child(&self, x: NodeId, scope: &VarSet) -> bool {
        let kids = self.children[x].intersection(scope);
        if kids.is_empty() {
            return false;
        }
        !self.c_component_of(x, scope).is_disjoint(&kids)
    }

    /// The same graph with nodes declared in a different order.
    pub fn with_node_order<S: AsRef<str>>(&self, order: &[S]) -> Result<Admg, GraphError> {
        self.rebuild(order.iter().map(|s| s.as_ref().to_string()).collect(), |n| {
            n.to_string()
        })
    }

    /// The same graph with every node renamed by `rename`.
    pub fn renamed(&self, rename: impl Fn(&str) -> String) -> Result<Admg, GraphError> {
        self.rebuild(self.names.clone(), rename)
    }

    fn rebuild(&self, order: Vec<String>, rename: impl Fn(&str) -> String) -> Result<Admg, GraphError> {
        if order.len() != self.len() {
            return Err(GraphError::InvalidName(format!(
                "node order lists {} names for {} nodes",
                order.len(),
                self.len()
            )));
        }
        for n in &order {
            if self.id(n).is_none() {
                return Err(GraphError::UnknownNode(n.clone()));
            }
        }
        let mut b = AdmgBuilder::new().nodes(order.iter().map(|n| rename(n)));
        for (a, c) in self.directed_edges() {
            b = b.directed(rename(self.name(a)), rename(self.name(c)));
        }
        for (a, c) in self.bidirected_edges() {
            b = b.bidirected(rename(self.name(a)), rename(self.name(c)));
        }
        b.build()
    }
}

/// A topological order over some scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopoOrder {
    order: Vec<NodeId>,
}

impl TopoOrder {
    pub fn as_slice(&self) -> &[NodeId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The first `i` nodes of the order as a set.
    pub fn prefix(&self, i: usize) -> VarSet {
        self.order[..i].iter().copied().collect()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.order.contains(&v)
    }

    pub fn position(&self, v: NodeId) -> Option<usize> {
        self.order.iter().position(|&u| u == v)
    }
}
