//! Bowless directed mixed graphs (BDMGs).
//!
//! A BDMG carries arrows `i -> j` and arcs `i <-> j`. Parallel arrows
//! `i -> j`, `j -> i` are allowed; an arrow and an arc on the same pair
//! (a "bow") is not. Acyclification can introduce bows, so the graph type
//! can also hold them; [`Bdmg::is_bowless`] tells the two apart.

mod classify;
mod io;
mod paths;
mod separation;

pub use classify::{GraphClassification, PartialOrder};
pub use io::GraphJson;
pub use paths::{EdgeKind, Path};
pub use separation::{Criterion, EquivalenceMode};

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::nodeset::{NodeSet, MAX_NODES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate node label `{0}`")]
    DuplicateNode(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("bow between `{0}` and `{1}`: a pair may not carry both an arrow and an arc")]
    Bow(String, String),
    #[error("graph has {0} nodes; at most {MAX_NODES} are supported")]
    TooManyNodes(usize),
    #[error("node index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("{criterion}-separation requires {requirement}")]
    CriterionMismatch {
        criterion: Criterion,
        requirement: &'static str,
    },
    #[error("separation sets must be non-empty (A and B) and pairwise disjoint")]
    InvalidQuery,
    #[error("graphs have different node sets")]
    NodeSetMismatch,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid graph JSON: {0}")]
    Json(String),
}

/// A directed mixed graph over labelled nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bdmg {
    names: Vec<String>,
    arrows: BTreeSet<(usize, usize)>,
    /// stored with the smaller index first
    arcs: BTreeSet<(usize, usize)>,
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    spouses: Vec<NodeSet>,
}

impl Bdmg {
    /// Builds a BDMG, rejecting self-loops and bows.
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        arrows: impl IntoIterator<Item = (usize, usize)>,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let g = Self::new_allowing_bows(names, arrows, arcs)?;
        if let Some((a, b)) = g.first_bow() {
            return Err(GraphError::Bow(g.names[a].clone(), g.names[b].clone()));
        }
        Ok(g)
    }

    /// Builds a directed mixed graph that may contain bows (still no self-loops).
    pub fn new_allowing_bows<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        arrows: impl IntoIterator<Item = (usize, usize)>,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_NODES {
            return Err(GraphError::TooManyNodes(names.len()));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(GraphError::DuplicateNode(name.clone()));
            }
        }
        let n = names.len();
        let mut g = Bdmg {
            names,
            arrows: BTreeSet::new(),
            arcs: BTreeSet::new(),
            parents: vec![NodeSet::EMPTY; n],
            children: vec![NodeSet::EMPTY; n],
            spouses: vec![NodeSet::EMPTY; n],
        };
        for (a, b) in arrows {
            g.check_edge(a, b)?;
            g.arrows.insert((a, b));
            g.parents[b].insert(a);
            g.children[a].insert(b);
        }
        for (a, b) in arcs {
            g.check_edge(a, b)?;
            g.arcs.insert((a.min(b), a.max(b)));
            g.spouses[a].insert(b);
            g.spouses[b].insert(a);
        }
        Ok(g)
    }

    /// Builds a BDMG from node labels and labelled edges.
    pub fn from_labels(
        names: &[&str],
        arrows: &[(&str, &str)],
        arcs: &[(&str, &str)],
    ) -> Result<Self, GraphError> {
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let look = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| GraphError::UnknownNode(s.to_string()))
        };
        let arrows = arrows
            .iter()
            .map(|(a, b)| Ok((look(a)?, look(b)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        let arcs = arcs
            .iter()
            .map(|(a, b)| Ok((look(a)?, look(b)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Bdmg::new(names.iter().copied(), arrows, arcs)
    }

    /// Edgeless graph over the given labels.
    pub fn empty<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, GraphError> {
        Bdmg::new(names, [], [])
    }

    fn check_edge(&self, a: usize, b: usize) -> Result<(), GraphError> {
        let n = self.names.len();
        if a >= n {
            return Err(GraphError::IndexOutOfRange(a));
        }
        if b >= n {
            return Err(GraphError::IndexOutOfRange(b));
        }
        if a == b {
            return Err(GraphError::SelfLoop(self.names[a].clone()));
        }
        Ok(())
    }

    fn first_bow(&self) -> Option<(usize, usize)> {
        self.arcs
            .iter()
            .copied()
            .find(|&(a, b)| self.arrows.contains(&(a, b)) || self.arrows.contains(&(b, a)))
    }

    pub fn is_bowless(&self) -> bool {
        self.first_bow().is_none()
    }

    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn all_nodes(&self) -> NodeSet {
        NodeSet::full(self.names.len())
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GraphError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn node_set<S: AsRef<str>>(&self, names: &[S]) -> Result<NodeSet, GraphError> {
        names
            .iter()
            .map(|s| self.index_of(s.as_ref()))
            .collect::<Result<NodeSet, _>>()
    }

    pub fn labels(&self, set: NodeSet) -> Vec<String> {
        set.iter().map(|i| self.names[i].clone()).collect()
    }

    pub fn arrows(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arrows.iter().copied()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn has_arrow(&self, from: usize, to: usize) -> bool {
        self.arrows.contains(&(from, to))
    }

    pub fn has_arc(&self, a: usize, b: usize) -> bool {
        self.arcs.contains(&(a.min(b), a.max(b)))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_arrow(a, b) || self.has_arrow(b, a) || self.has_arc(a, b)
    }

    pub fn arrow_adjacent(&self, a: usize, b: usize) -> bool {
        self.has_arrow(a, b) || self.has_arrow(b, a)
    }

    pub fn parents(&self, i: usize) -> NodeSet {
        self.parents[i]
    }

    pub fn children(&self, i: usize) -> NodeSet {
        self.children[i]
    }

    pub fn spouses(&self, i: usize) -> NodeSet {
        self.spouses[i]
    }

    /// `pa(A) \ A`.
    pub fn parents_of_set(&self, set: NodeSet) -> NodeSet {
        set.iter()
            .fold(NodeSet::EMPTY, |acc, i| acc.union(self.parents[i]))
            .minus(set)
    }

    /// Nodes with a directed path of length at least one into some member of `set`.
    /// Members of `set` may be included (e.g. a node on a directed cycle).
    fn reach_up(&self, set: NodeSet) -> NodeSet {
        let mut seen = NodeSet::EMPTY;
        let mut stack: Vec<usize> = set.iter().flat_map(|i| self.parents[i].iter()).collect();
        while let Some(v) = stack.pop() {
            if seen.contains(v) {
                continue;
            }
            seen.insert(v);
            stack.extend(self.parents[v].minus(seen).iter());
        }
        seen
    }

    /// `an(A) = (∪_{j∈A} an(j)) \ A`; a node is never its own ancestor.
    pub fn ancestors(&self, set: NodeSet) -> NodeSet {
        self.reach_up(set).minus(set)
    }

    /// Ancestors of a single node.
    pub fn ancestors_of(&self, i: usize) -> NodeSet {
        self.ancestors(NodeSet::singleton(i))
    }

    /// `C ∪ an(C)`.
    pub fn ancestral_closure(&self, set: NodeSet) -> NodeSet {
        self.reach_up(set).union(set)
    }

    /// Proper descendants (directed path of length ≥ 1); contains `i` iff `i` lies on a cycle.
    fn reach_down(&self, i: usize) -> NodeSet {
        let mut seen = NodeSet::EMPTY;
        let mut stack: Vec<usize> = self.children[i].iter().collect();
        while let Some(v) = stack.pop() {
            if seen.contains(v) {
                continue;
            }
            seen.insert(v);
            stack.extend(self.children[v].minus(seen).iter());
        }
        seen
    }

    pub fn descendants_of(&self, i: usize) -> NodeSet {
        self.reach_down(i).without(i)
    }

    /// `sc(i)`: the strongly connected component containing `i`.
    pub fn strong_component(&self, i: usize) -> NodeSet {
        let down = self.reach_down(i);
        let up = self.reach_up(NodeSet::singleton(i));
        down.intersection(up).with(i)
    }

    /// All strongly connected components, one entry per node.
    pub fn strong_components(&self) -> Vec<NodeSet> {
        (0..self.node_count()).map(|i| self.strong_component(i)).collect()
    }

    pub fn has_directed_cycle(&self) -> bool {
        (0..self.node_count()).any(|i| self.reach_down(i).contains(i))
    }

    /// The graph with all arrows into `i` and all arcs at `i` removed.
    pub fn intervened(&self, i: usize) -> Bdmg {
        let arrows: Vec<_> = self.arrows().filter(|&(_, b)| b != i).collect();
        let arcs: Vec<_> = self.arcs().filter(|&(a, b)| a != i && b != i).collect();
        Bdmg::new_allowing_bows(self.names.clone(), arrows, arcs).expect("subgraph of a valid graph")
    }

    /// Same graph with arrows replaced; used to build derived structures.
    pub fn with_edges(
        &self,
        arrows: impl IntoIterator<Item = (usize, usize)>,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Bdmg, GraphError> {
        Bdmg::new(self.names.clone(), arrows, arcs)
    }

    /// The acyclification: arrows `j -> i` for `j ∈ pa(sc(i)) \ sc(i)`, and
    /// arcs between distinct `i, j` whose components share a node or an arc.
    /// The result is acyclic but may contain bows.
    pub fn acyclify(&self) -> Bdmg {
        let n = self.node_count();
        let sc = self.strong_components();
        let mut arrows = Vec::new();
        let mut arcs = Vec::new();
        for i in 0..n {
            for j in self.parents_of_set(sc[i]).iter() {
                arrows.push((j, i));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let linked = sc[i] == sc[j]
                    || self.arcs().any(|(a, b)| {
                        (sc[i].contains(a) && sc[j].contains(b)) || (sc[i].contains(b) && sc[j].contains(a))
                    });
                if linked {
                    arcs.push((i, j));
                }
            }
        }
        Bdmg::new_allowing_bows(self.names.clone(), arrows, arcs).expect("acyclification of a valid graph")
    }

    /// Same edges, nodes renumbered to match `order` (a permutation of the labels).
    pub fn reordered(&self, order: &[String]) -> Result<Bdmg, GraphError> {
        if order.len() != self.node_count() {
            return Err(GraphError::NodeSetMismatch);
        }
        let mut map = vec![usize::MAX; self.node_count()];
        for (new, name) in order.iter().enumerate() {
            let old = self.index_of(name).map_err(|_| GraphError::NodeSetMismatch)?;
            if map[old] != usize::MAX {
                return Err(GraphError::NodeSetMismatch);
            }
            map[old] = new;
        }
        Bdmg::new_allowing_bows(
            order.to_vec(),
            self.arrows().map(|(a, b)| (map[a], map[b])),
            self.arcs().map(|(a, b)| (map[a], map[b])),
        )
    }
}
