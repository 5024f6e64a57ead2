use serde::Serialize;

use super::Bdmg;
use crate::nodeset::NodeSet;

/// A strict partial order on node indices; `below[i]` holds every `j` with `j < i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialOrder {
    below: Vec<NodeSet>,
}

impl PartialOrder {
    /// The empty order (everything incomparable).
    pub fn antichain(n: usize) -> Self {
        PartialOrder {
            below: vec![NodeSet::EMPTY; n],
        }
    }

    /// Builds from `below` sets; they are transitively closed here.
    pub fn from_below(mut below: Vec<NodeSet>) -> Option<Self> {
        let n = below.len();
        loop {
            let mut changed = false;
            for i in 0..n {
                let closed = below[i].iter().fold(below[i], |acc, j| acc.union(below[j]));
                if closed != below[i] {
                    below[i] = closed;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if (0..n).any(|i| below[i].contains(i)) {
            return None;
        }
        Some(PartialOrder { below })
    }

    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    /// `a < b`.
    pub fn less(&self, a: usize, b: usize) -> bool {
        self.below[b].contains(a)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.less(a, b) || self.less(b, a)
    }

    pub fn below(&self, i: usize) -> NodeSet {
        self.below[i]
    }

    /// Cover pairs `(hi, lo)`: `lo < hi` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for hi in 0..self.len() {
            for lo in self.below[hi].iter() {
                let between = self.below[hi]
                    .iter()
                    .any(|m| m != lo && self.below[m].contains(lo));
                if !between {
                    out.push((hi, lo));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphClassification {
    pub inseparable_pairs: Vec<(String, String)>,
    pub is_admg: bool,
    pub is_ancestral: bool,
    pub is_dag: bool,
    pub is_maximal: bool,
    pub is_valid_bdmg: bool,
    /// cover relations `(greater, smaller)` of a valid order, if one exists
    pub valid_order: Option<Vec<(String, String)>>,
}

impl Bdmg {
    pub fn is_admg(&self) -> bool {
        !self.has_directed_cycle()
    }

    pub fn is_dag(&self) -> bool {
        self.arc_count() == 0 && self.is_admg()
    }

    /// Acyclic with no arc between a node and one of its ancestors.
    pub fn is_ancestral(&self) -> bool {
        self.is_admg()
            && self
                .arcs()
                .all(|(a, b)| !self.ancestors_of(a).contains(b) && !self.ancestors_of(b).contains(a))
    }

    /// Non-adjacent pairs that no conditioning set σ-separates, as index pairs `(i<j)`.
    pub fn inseparable_pairs(&self) -> Vec<(usize, usize)> {
        let acy = self.acyclify();
        let n = self.node_count();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.adjacent(i, j) {
                    continue;
                }
                let (a, b) = (NodeSet::singleton(i), NodeSet::singleton(j));
                let rest = self.all_nodes().without(i).without(j);
                if rest.subsets().all(|c| acy.m_connected(a, b, c)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_maximal(&self) -> bool {
        self.inseparable_pairs().is_empty()
    }

    /// The order generated by the arrows (`i -> j` gives `i > j`), provided arcs
    /// join incomparable nodes. Exists iff the graph is ancestral.
    pub fn valid_order(&self) -> Option<PartialOrder> {
        let below: Vec<NodeSet> = (0..self.node_count()).map(|i| self.children(i)).collect();
        let order = PartialOrder::from_below(below)?;
        if self.arcs().any(|(a, b)| order.comparable(a, b)) {
            return None;
        }
        Some(order)
    }

    pub fn classify(&self) -> GraphClassification {
        let pairs = self.inseparable_pairs();
        let label = |(a, b): (usize, usize)| (self.name(a).to_string(), self.name(b).to_string());
        GraphClassification {
            is_valid_bdmg: self.is_bowless(),
            is_dag: self.is_dag(),
            is_admg: self.is_admg(),
            is_ancestral: self.is_ancestral(),
            is_maximal: pairs.is_empty(),
            inseparable_pairs: pairs.into_iter().map(label).collect(),
            valid_order: self
                .valid_order()
                .map(|o| o.covers().into_iter().map(label).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_is_maximal_dag() {
        let g = Bdmg::from_labels(&["1", "2", "3"], &[("1", "2"), ("2", "3")], &[]).unwrap();
        let c = g.classify();
        assert!(c.is_dag && c.is_ancestral && c.is_admg && c.is_maximal && c.is_valid_bdmg);
        assert!(c.inseparable_pairs.is_empty());
        assert_eq!(
            c.valid_order.unwrap(),
            vec![
                ("1".to_string(), "2".to_string()),
                ("2".to_string(), "3".to_string())
            ]
        );
    }

    #[test]
    fn nonmaximal_graph() {
        let g = Bdmg::from_labels(
            &["i", "j", "k", "l", "h"],
            &[("l", "k"), ("h", "j")],
            &[("j", "l"), ("l", "h"), ("h", "k")],
        )
        .unwrap();
        let c = g.classify();
        assert!(!c.is_maximal);
        assert_eq!(c.inseparable_pairs, vec![("j".to_string(), "k".to_string())]);
        assert!(c.is_ancestral);
        assert!(c.valid_order.is_some());
    }

    #[test]
    fn two_cycle_is_not_admg() {
        let g = Bdmg::from_labels(&["a", "b"], &[("a", "b"), ("b", "a")], &[]).unwrap();
        let c = g.classify();
        assert!(!c.is_admg && !c.is_dag && !c.is_ancestral);
        assert!(c.valid_order.is_none());
    }

    #[test]
    fn covers_skip_transitive_edges() {
        let g = Bdmg::from_labels(&["1", "2", "3"], &[("1", "2"), ("2", "3"), ("1", "3")], &[]).unwrap();
        let o = g.valid_order().unwrap();
        assert!(o.less(2, 0));
        assert_eq!(o.covers(), vec![(0, 1), (1, 2)]);
    }
}
