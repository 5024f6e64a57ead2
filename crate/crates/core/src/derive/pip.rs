use serde::Serialize;

use super::{CausalDerivation, InterventionalFamily};
use crate::graph::{Bdmg, Path};
use crate::nodeset::NodeSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PipStatus {
    /// independence held under `P_do(by)`
    Removed {
        by: usize,
    },
    Kept,
    /// more than one PIP; only a concurrent intervention could decide
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipEntry {
    pub from: usize,
    pub to: usize,
    pub pips: Vec<Path>,
    /// inner nodes whose intervention made `from ⊥ to | cause(to) \ {from}`
    pub separating: Vec<usize>,
    pub status: PipStatus,
}

/// An arc of `G` whose endpoints are joined by several PIPs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcFlag {
    pub a: usize,
    pub b: usize,
    pub pips: Vec<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipAdjustment {
    pub dcause: Vec<NodeSet>,
    pub graph: Bdmg,
    pub entries: Vec<PipEntry>,
    pub unresolved_arcs: Vec<ArcFlag>,
}

impl PipAdjustment {
    pub fn unresolved_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .entries
            .iter()
            .filter(|e| e.status == PipStatus::Unresolved)
            .map(|e| (e.from.min(e.to), e.from.max(e.to)))
            .chain(self.unresolved_arcs.iter().map(|f| (f.a, f.b)))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn removed(&self) -> Vec<(usize, usize)> {
        self.entries
            .iter()
            .filter(|e| matches!(e.status, PipStatus::Removed { .. }))
            .map(|e| (e.from, e.to))
            .collect()
    }
}

/// Re-examines arrows `i -> k` whose endpoints are joined by a PIP in `G_i`.
/// A single PIP is resolved by testing under each inner node's intervention.
pub fn pip_adjust(fam: &InterventionalFamily, d: &CausalDerivation) -> PipAdjustment {
    let mut dcause = d.dcause.clone();
    let mut entries = Vec::new();
    for (i, k) in d.s.arrows() {
        let pips = d.g_i[i].find_pips(i, k).expect("distinct endpoints");
        if pips.is_empty() {
            continue;
        }
        let mut separating = Vec::new();
        let status = if pips.len() == 1 {
            let c = d.relations.cause[k].without(i);
            separating = pips[0]
                .inner()
                .iter()
                .copied()
                .filter(|&j| fam.independent_pair(j, i, k, c))
                .collect();
            match separating.first() {
                Some(&by) => {
                    dcause[k].remove(i);
                    PipStatus::Removed { by }
                }
                None => PipStatus::Kept,
            }
        } else {
            PipStatus::Unresolved
        };
        entries.push(PipEntry {
            from: i,
            to: k,
            pips,
            separating,
            status,
        });
    }
    let unresolved_arcs =
        d.g.arcs()
            .filter_map(|(a, b)| {
                let pips = d.g.find_pips(a, b).expect("distinct endpoints");
                (pips.len() > 1).then_some(ArcFlag { a, b, pips })
            })
            .collect();
    let removed: Vec<(usize, usize)> = entries
        .iter()
        .filter(|e| matches!(e.status, PipStatus::Removed { .. }))
        .map(|e| (e.from, e.to))
        .collect();
    let graph =
        d.g.with_edges(
            d.g.arrows().filter(|e| !removed.contains(e)).collect::<Vec<_>>(),
            d.g.arcs().collect::<Vec<_>>(),
        )
        .expect("removing arrows keeps the graph valid");
    PipAdjustment {
        dcause,
        graph,
        entries,
        unresolved_arcs,
    }
}
