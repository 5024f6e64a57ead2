use std::fmt::Write as _;

use serde::Serialize;

use super::{Bdmg, Criterion, GraphError};
use crate::nodeset::NodeSet;

/// Orientation of an edge relative to the direction a path is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// `a -> b`
    Forward,
    /// `a <- b`
    Backward,
    /// `a <-> b`
    Bidirected,
}

impl EdgeKind {
    fn head_at_start(self) -> bool {
        matches!(self, EdgeKind::Backward | EdgeKind::Bidirected)
    }

    fn head_at_end(self) -> bool {
        matches!(self, EdgeKind::Forward | EdgeKind::Bidirected)
    }

    fn symbol(self) -> &'static str {
        match self {
            EdgeKind::Forward => "->",
            EdgeKind::Backward => "<-",
            EdgeKind::Bidirected => "<->",
        }
    }
}

/// A path as a node sequence plus the edge taken between consecutive nodes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    pub nodes: Vec<usize>,
    pub edges: Vec<EdgeKind>,
}

impl Path {
    pub fn inner(&self) -> &[usize] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    pub fn render(&self, g: &Bdmg) -> String {
        let mut out = g.name(self.nodes[0]).to_string();
        for (e, v) in self.edges.iter().zip(&self.nodes[1..]) {
            let _ = write!(out, " {} {}", e.symbol(), g.name(*v));
        }
        out
    }
}

struct Walker<'g> {
    g: &'g Bdmg,
    sc: Vec<NodeSet>,
}

impl<'g> Walker<'g> {
    fn moves(&self, v: usize) -> Vec<(usize, EdgeKind)> {
        let mut out = Vec::new();
        out.extend(self.g.children(v).iter().map(|w| (w, EdgeKind::Forward)));
        out.extend(self.g.parents(v).iter().map(|w| (w, EdgeKind::Backward)));
        out.extend(self.g.spouses(v).iter().map(|w| (w, EdgeKind::Bidirected)));
        out
    }

    /// Depth-first enumeration of simple paths from `path`'s last node. `step`
    /// decides whether a move may be appended; `done` whether to report the path.
    fn explore(
        &self,
        path: &mut Path,
        on_path: NodeSet,
        step: &dyn Fn(&Path, usize, EdgeKind) -> bool,
        done: &dyn Fn(&Path) -> Option<bool>,
        found: &mut Vec<Path>,
        first_only: bool,
    ) -> bool {
        let v = *path.nodes.last().unwrap();
        for (w, e) in self.moves(v) {
            if on_path.contains(w) || !step(path, w, e) {
                continue;
            }
            path.nodes.push(w);
            path.edges.push(e);
            let stop = match done(path) {
                Some(true) => {
                    found.push(path.clone());
                    first_only
                }
                Some(false) => false,
                None => self.explore(path, on_path.with(w), step, done, found, first_only),
            };
            path.nodes.pop();
            path.edges.pop();
            if stop {
                return true;
            }
        }
        false
    }
}

impl Bdmg {
    /// Searches simple paths directly for one that connects `A` and `B` given `C`.
    /// For σ the literal definition is used: a non-collider in `C` may only point,
    /// by a directed path edge, at neighbours inside its own strongly connected component.
    /// Exponential; intended as a reference oracle and for witness reporting.
    pub fn connecting_path(
        &self,
        a: NodeSet,
        b: NodeSet,
        c: NodeSet,
        criterion: Criterion,
    ) -> Result<Option<Path>, GraphError> {
        // validates the query and the graph class
        if self.separated(a, b, c, criterion)? && criterion != Criterion::Sigma {
            return Ok(None);
        }
        Ok(self.find_connecting_path(a, b, c, criterion == Criterion::Sigma))
    }

    /// Unvalidated path oracle for σ-separation.
    pub fn sigma_separated_by_paths(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        self.find_connecting_path(a, b, c, true).is_none()
    }

    fn find_connecting_path(&self, a: NodeSet, b: NodeSet, c: NodeSet, sigma: bool) -> Option<Path> {
        let walker = Walker {
            g: self,
            sc: if sigma {
                self.strong_components()
            } else {
                Vec::new()
            },
        };
        let collider_open = self.ancestral_closure(c);
        let sc = &walker.sc;
        let step = |path: &Path, w: usize, e: EdgeKind| -> bool {
            let n = path.nodes.len();
            if n == 1 {
                return true;
            }
            // the current endpoint becomes an inner node
            let v = path.nodes[n - 1];
            let prev = path.nodes[n - 2];
            let incoming = path.edges[n - 2];
            if a.contains(v) || b.contains(v) {
                return false;
            }
            let collider = incoming.head_at_end() && e.head_at_start();
            if collider {
                return collider_open.contains(v);
            }
            if !c.contains(v) {
                return true;
            }
            if !sigma {
                return false;
            }
            // only directed edges leaving v can block
            let prev_ok = incoming != EdgeKind::Backward || sc[v].contains(prev);
            let next_ok = e != EdgeKind::Forward || sc[v].contains(w);
            prev_ok && next_ok
        };
        let done = |path: &Path| -> Option<bool> {
            let v = *path.nodes.last().unwrap();
            if b.contains(v) {
                Some(true)
            } else if a.contains(v) {
                Some(false)
            } else {
                None
            }
        };
        let mut found = Vec::new();
        for s in a.iter() {
            let mut path = Path {
                nodes: vec![s],
                edges: Vec::new(),
            };
            if walker.explore(&mut path, NodeSet::singleton(s), &step, &done, &mut found, true) {
                return found.pop();
            }
        }
        None
    }

    /// All primitive inducing paths between `i` and `j`, in lexicographic order.
    pub fn find_pips(&self, i: usize, j: usize) -> Result<Vec<Path>, GraphError> {
        let n = self.node_count();
        if i >= n {
            return Err(GraphError::IndexOutOfRange(i));
        }
        if j >= n {
            return Err(GraphError::IndexOutOfRange(j));
        }
        if i == j {
            return Err(GraphError::Precondition("PIP endpoints must differ".into()));
        }
        let walker = Walker {
            g: self,
            sc: self.strong_components(),
        };
        let sc = &walker.sc;
        let allowed_inner = self.ancestors(NodeSet::singleton(i).with(j));
        let within = |x: usize, y: usize, e: EdgeKind| e == EdgeKind::Bidirected || sc[x].contains(y);
        let step = |path: &Path, w: usize, e: EdgeKind| -> bool {
            let v = *path.nodes.last().unwrap();
            if w == j {
                // last edge needs an inner node before it
                return path.nodes.len() >= 2 && (e == EdgeKind::Backward || within(v, w, e));
            }
            if !allowed_inner.contains(w) {
                return false;
            }
            if path.nodes.len() == 1 {
                e == EdgeKind::Forward || within(v, w, e)
            } else {
                within(v, w, e)
            }
        };
        let done = |path: &Path| -> Option<bool> {
            if *path.nodes.last().unwrap() == j {
                Some(true)
            } else {
                None
            }
        };
        let mut found = Vec::new();
        let mut path = Path {
            nodes: vec![i],
            edges: Vec::new(),
        };
        walker.explore(&mut path, NodeSet::singleton(i), &step, &done, &mut found, false);
        found.sort();
        found.dedup();
        Ok(found)
    }
}
