use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Bdmg, GraphError};
use crate::nodeset::NodeSet;

/// Which separation criterion to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Sigma,
    M,
    D,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Sigma => "sigma",
            Criterion::M => "m",
            Criterion::D => "d",
        })
    }
}

impl FromStr for Criterion {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "sigma" | "σ" | "s" => Ok(Criterion::Sigma),
            "m" => Ok(Criterion::M),
            "d" => Ok(Criterion::D),
            other => Err(format!("unknown criterion `{other}` (expected sigma, m or d)")),
        }
    }
}

/// How exhaustively [`Bdmg::markov_equivalent`] compares separations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EquivalenceMode {
    /// singleton A and B, every C
    #[default]
    Singleton,
    /// every disjoint triple of sets
    Full,
}

impl Bdmg {
    fn check_query(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> Result<(), GraphError> {
        let all = self.all_nodes();
        if a.is_empty()
            || b.is_empty()
            || !a.is_disjoint(b)
            || !a.is_disjoint(c)
            || !b.is_disjoint(c)
            || !a.union(b).union(c).is_subset(all)
        {
            return Err(GraphError::InvalidQuery);
        }
        Ok(())
    }

    /// Decides `A ⊥ B | C` under the given criterion.
    pub fn separated(
        &self,
        a: NodeSet,
        b: NodeSet,
        c: NodeSet,
        criterion: Criterion,
    ) -> Result<bool, GraphError> {
        self.check_query(a, b, c)?;
        match criterion {
            Criterion::Sigma => Ok(!self.acyclify().m_connected(a, b, c)),
            Criterion::M => {
                if self.has_directed_cycle() {
                    return Err(GraphError::CriterionMismatch {
                        criterion,
                        requirement: "an acyclic graph",
                    });
                }
                Ok(!self.m_connected(a, b, c))
            }
            Criterion::D => {
                if self.has_directed_cycle() || self.arc_count() > 0 {
                    return Err(GraphError::CriterionMismatch {
                        criterion,
                        requirement: "a DAG",
                    });
                }
                Ok(!self.m_connected(a, b, c))
            }
        }
    }

    /// Convenience wrapper for singleton queries by index.
    pub fn separated_pair(
        &self,
        i: usize,
        j: usize,
        c: NodeSet,
        criterion: Criterion,
    ) -> Result<bool, GraphError> {
        self.separated(NodeSet::singleton(i), NodeSet::singleton(j), c, criterion)
    }

    /// Reachability over (node, arrowhead-at-node) states. Treats the graph as
    /// acyclic: colliders open iff in `C ∪ an(C)`, non-colliders open iff outside `C`.
    /// No validation; callers check the query.
    pub(crate) fn m_connected(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        let open_collider = self.ancestral_closure(c);
        let n = self.node_count();
        // visited[v] bit 0: arrived with tail, bit 1: arrived with head
        let mut visited = vec![0u8; n];
        let mut stack: Vec<(usize, bool)> = Vec::new();
        for s in a.iter() {
            self.push_moves(s, &mut stack, |_| true);
        }
        while let Some((v, head)) = stack.pop() {
            let bit = if head { 2 } else { 1 };
            if visited[v] & bit != 0 {
                continue;
            }
            visited[v] |= bit;
            if b.contains(v) {
                return true;
            }
            if a.contains(v) {
                // any walk back through A already started from there
                continue;
            }
            let in_c = c.contains(v);
            let collider_ok = open_collider.contains(v);
            self.push_moves(v, &mut stack, |leaves_with_head_at_v| {
                if head && leaves_with_head_at_v {
                    collider_ok
                } else {
                    !in_c
                }
            });
        }
        false
    }

    /// Pushes every neighbour move from `v`; `allow(head_at_v)` filters on the mark
    /// the departing edge has at `v`. The pushed flag is the mark at the neighbour.
    fn push_moves(&self, v: usize, stack: &mut Vec<(usize, bool)>, allow: impl Fn(bool) -> bool) {
        if allow(false) {
            for w in self.children(v).iter() {
                stack.push((w, true));
            }
        }
        if allow(true) {
            for w in self.parents(v).iter() {
                stack.push((w, false));
            }
            for w in self.spouses(v).iter() {
                stack.push((w, true));
            }
        }
    }

    /// σ-separation against a precomputed acyclification of `self`.
    pub fn sigma_separated_with(acy: &Bdmg, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        !acy.m_connected(a, b, c)
    }

    /// Whether two graphs on the same labels entail the same σ-separations.
    pub fn markov_equivalent(&self, other: &Bdmg, mode: EquivalenceMode) -> Result<bool, GraphError> {
        if self.names() != other.names() {
            let mut x = self.names().to_vec();
            let mut y = other.names().to_vec();
            x.sort();
            y.sort();
            if x != y {
                return Err(GraphError::NodeSetMismatch);
            }
            let other = other.reordered(self.names())?;
            return self.markov_equivalent(&other, mode);
        }
        let acy1 = self.acyclify();
        let acy2 = other.acyclify();
        let n = self.node_count();
        let all = self.all_nodes();
        match mode {
            EquivalenceMode::Singleton => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let rest = all.without(i).without(j);
                        for c in rest.subsets() {
                            let a = NodeSet::singleton(i);
                            let b = NodeSet::singleton(j);
                            if acy1.m_connected(a, b, c) != acy2.m_connected(a, b, c) {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
            EquivalenceMode::Full => {
                // assign each node to A, B, C or none
                for a in all.subsets().filter(|s| !s.is_empty()) {
                    for b in all.minus(a).subsets().filter(|s| !s.is_empty()) {
                        if a.first() > b.first() {
                            continue;
                        }
                        for c in all.minus(a).minus(b).subsets() {
                            if acy1.m_connected(a, b, c) != acy2.m_connected(a, b, c) {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    /// Checks `i ⊥_m j | A` for `pa({i,j}) ⊆ A ⊆ an({i,j})` on an ancestral graph
    /// with `i, j` separable. Precondition failures are errors, not `false`.
    pub fn squeeze_separation_holds(&self, i: usize, j: usize, set: NodeSet) -> Result<bool, GraphError> {
        if i == j || i >= self.node_count() || j >= self.node_count() {
            return Err(GraphError::Precondition("i and j must be distinct nodes".into()));
        }
        if !self.is_ancestral() {
            return Err(GraphError::Precondition("graph is not ancestral".into()));
        }
        let pair = NodeSet::singleton(i).with(j);
        let pa = self.parents_of_set(pair);
        let an = self.ancestors(pair);
        if !pa.is_subset(set) || !set.is_subset(an) {
            return Err(GraphError::Precondition(
                "A must satisfy pa({i,j}) ⊆ A ⊆ an({i,j})".into(),
            ));
        }
        if self.adjacent(i, j) || !self.is_separable(i, j) {
            return Err(GraphError::Precondition(
                "i and j are not a separable pair".into(),
            ));
        }
        Ok(!self.m_connected(NodeSet::singleton(i), NodeSet::singleton(j), set))
    }

    /// Non-adjacent and separated by some `C ⊆ V \ {i,j}` under σ.
    pub fn is_separable(&self, i: usize, j: usize) -> bool {
        if self.adjacent(i, j) {
            return false;
        }
        let acy = self.acyclify();
        let rest = self.all_nodes().without(i).without(j);
        let (a, b) = (NodeSet::singleton(i), NodeSet::singleton(j));
        rest.subsets().any(|c| !acy.m_connected(a, b, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(names: &[&str], arrows: &[(&str, &str)], arcs: &[(&str, &str)]) -> Bdmg {
        Bdmg::from_labels(names, arrows, arcs).unwrap()
    }

    fn s(i: usize) -> NodeSet {
        NodeSet::singleton(i)
    }

    #[test]
    fn edgeless_is_separated_under_every_criterion() {
        let e = Bdmg::empty(["1", "2", "3"]).unwrap();
        for c in [Criterion::Sigma, Criterion::M, Criterion::D] {
            assert!(e.separated(s(0), s(1), NodeSet::EMPTY, c).unwrap());
            assert!(e.separated(s(0), s(1), s(2), c).unwrap());
        }
    }

    #[test]
    fn collider_opens_on_conditioning() {
        let c = g(&["1", "2", "3"], &[("1", "3"), ("2", "3")], &[]);
        assert!(c.separated(s(0), s(1), NodeSet::EMPTY, Criterion::D).unwrap());
        assert!(!c.separated(s(0), s(1), s(2), Criterion::D).unwrap());
    }

    #[test]
    fn descendant_of_collider_opens_it() {
        let c = g(&["1", "2", "3", "4"], &[("1", "3"), ("2", "3"), ("3", "4")], &[]);
        assert!(!c.separated(s(0), s(1), s(3), Criterion::D).unwrap());
    }

    #[test]
    fn chain_blocks_on_middle() {
        let c = g(&["1", "2", "3"], &[("1", "2"), ("2", "3")], &[]);
        assert!(!c.separated(s(0), s(2), NodeSet::EMPTY, Criterion::D).unwrap());
        assert!(c.separated(s(0), s(2), s(1), Criterion::D).unwrap());
    }

    #[test]
    fn criterion_class_mismatch() {
        let cyc = g(&["a", "b"], &[("a", "b"), ("b", "a")], &[]);
        assert!(matches!(
            cyc.separated(s(0), s(1), NodeSet::EMPTY, Criterion::D),
            Err(GraphError::CriterionMismatch { .. })
        ));
        assert!(matches!(
            cyc.separated(s(0), s(1), NodeSet::EMPTY, Criterion::M),
            Err(GraphError::CriterionMismatch { .. })
        ));
        let arc = g(&["a", "b"], &[], &[("a", "b")]);
        assert!(arc.separated(s(0), s(1), NodeSet::EMPTY, Criterion::D).is_err());
        assert!(!arc.separated(s(0), s(1), NodeSet::EMPTY, Criterion::M).unwrap());
    }

    #[test]
    fn overlapping_query_rejected() {
        let e = Bdmg::empty(["1", "2"]).unwrap();
        assert_eq!(
            e.separated(s(0), s(0), NodeSet::EMPTY, Criterion::Sigma),
            Err(GraphError::InvalidQuery)
        );
    }

    #[test]
    fn nonmaximal_pair_never_separates() {
        let nm = g(
            &["i", "j", "k", "l", "h"],
            &[("l", "k"), ("h", "j")],
            &[("j", "l"), ("l", "h"), ("h", "k")],
        );
        let (j, k) = (1, 2);
        let rest = s(0).with(3).with(4);
        for c in rest.subsets() {
            assert!(!nm.separated(s(j), s(k), c, Criterion::Sigma).unwrap(), "{c:?}");
        }
    }

    #[test]
    fn markov_equivalence_examples() {
        let g0 = super::super::tests::iterative_cycle();
        assert!(g0
            .markov_equivalent(&g0.acyclify(), EquivalenceMode::Singleton)
            .unwrap());
        let chain = g(&["1", "2", "3"], &[("1", "2"), ("2", "3")], &[]);
        let coll = g(&["1", "2", "3"], &[("1", "3"), ("2", "3")], &[]);
        assert!(!chain
            .markov_equivalent(&coll, EquivalenceMode::Singleton)
            .unwrap());
        assert!(chain.markov_equivalent(&chain, EquivalenceMode::Full).unwrap());
        let other = Bdmg::empty(["x", "y", "z"]).unwrap();
        assert_eq!(
            chain.markov_equivalent(&other, EquivalenceMode::Singleton),
            Err(GraphError::NodeSetMismatch)
        );
    }

    #[test]
    fn squeeze_examples() {
        let chain = g(&["1", "2", "3"], &[("1", "2"), ("2", "3")], &[]);
        assert!(chain.squeeze_separation_holds(0, 2, s(1)).unwrap());
        let coll = g(&["1", "2", "3"], &[("1", "3"), ("2", "3")], &[]);
        assert!(coll.squeeze_separation_holds(0, 1, NodeSet::EMPTY).unwrap());
        assert!(matches!(
            chain.squeeze_separation_holds(0, 2, NodeSet::EMPTY),
            Err(GraphError::Precondition(_))
        ));
    }
}
