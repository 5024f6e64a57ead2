//! A common interface for anything that answers conditional-independence queries.

use crate::nodeset::NodeSet;

/// Answers `A ⊥ B | C` over variables `0..var_count()`.
///
/// Implementations must be symmetric in `A` and `B` and deterministic.
/// Callers pass non-empty, pairwise disjoint sets.
pub trait CiQuery {
    fn var_count(&self) -> usize;

    fn independent(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool;

    fn independent_pair(&self, i: usize, j: usize, c: NodeSet) -> bool {
        self.independent(NodeSet::singleton(i), NodeSet::singleton(j), c)
    }
}

impl<T: CiQuery + ?Sized> CiQuery for &T {
    fn var_count(&self) -> usize {
        (**self).var_count()
    }

    fn independent(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        (**self).independent(a, b, c)
    }
}
