//! Causal graphs derived from interventional families.

mod io;
mod pip;
mod procedure;

pub use io::{DerivationReport, FamilyJson, OracleJson, PipReport, RoundReport};
pub use pip::{pip_adjust, ArcFlag, PipAdjustment, PipEntry, PipStatus};
pub use procedure::{
    cause_relations, check_transitivity, derive, derive_variants, graph_from_observation, ArcPolicy, ArcRule,
    CausalDerivation, CauseRelations, Mode, TransitivityReport,
};

use thiserror::Error;

use crate::ci::CiQuery;
use crate::dist::{DistError, JointTable};
use crate::graph::{Bdmg, GraphError};
use crate::nodeset::NodeSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("rosters differ: {0}")]
    RosterMismatch(String),
    #[error("family must contain at least one variable")]
    Empty,
    #[error("unsupported by this family: {0}")]
    Capability(String),
    #[error("the ancestral shortcut produced a non-ancestral graph")]
    NotAncestral,
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid family JSON: {0}")]
    Json(String),
}

/// Anything that can stand in for `P_do(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CiSource {
    /// an exact distribution
    Table(JointTable),
    /// σ-separation in an intervened ground-truth graph
    Separation { graph: Bdmg, acyclified: Bdmg },
}

impl CiSource {
    pub fn separation(graph: Bdmg) -> CiSource {
        let acyclified = graph.acyclify();
        CiSource::Separation { graph, acyclified }
    }

    pub fn table(&self) -> Option<&JointTable> {
        match self {
            CiSource::Table(t) => Some(t),
            CiSource::Separation { .. } => None,
        }
    }
}

impl CiQuery for CiSource {
    fn var_count(&self) -> usize {
        match self {
            CiSource::Table(t) => t.var_count(),
            CiSource::Separation { graph, .. } => graph.node_count(),
        }
    }

    fn independent(&self, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        match self {
            CiSource::Table(t) => t.independent(a, b, c),
            CiSource::Separation { acyclified, .. } => Bdmg::sigma_separated_with(acyclified, a, b, c),
        }
    }
}

/// One source per node: `sources[i]` represents `P_do(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterventionalFamily {
    roster: Vec<String>,
    cards: Option<Vec<usize>>,
    sources: Vec<CiSource>,
    ground_truth: Option<Bdmg>,
}

impl InterventionalFamily {
    /// `tables[i]` is `P_do(i)` where `i` indexes the roster of `tables[0]`.
    /// Other tables may list the same variables in another order.
    pub fn from_tables(tables: Vec<JointTable>) -> Result<Self, FamilyError> {
        let first = tables.first().ok_or(FamilyError::Empty)?;
        let roster = first.names().to_vec();
        let cards = first.cards().to_vec();
        if tables.len() != roster.len() {
            return Err(FamilyError::RosterMismatch(format!(
                "{} tables for {} variables",
                tables.len(),
                roster.len()
            )));
        }
        let mut sources = Vec::with_capacity(tables.len());
        for t in tables {
            let t = t.reordered(&roster).map_err(|_| {
                FamilyError::RosterMismatch(format!("table over {:?} vs roster {:?}", t.names(), roster))
            })?;
            if t.cards() != cards.as_slice() {
                return Err(FamilyError::RosterMismatch("cardinalities differ".into()));
            }
            sources.push(CiSource::Table(t));
        }
        Ok(InterventionalFamily {
            roster,
            cards: Some(cards),
            sources,
            ground_truth: None,
        })
    }

    /// The faithful family of a ground-truth graph: `P_do(i)` answers by σ-separation
    /// in the graph with arrows into `i` and arcs at `i` removed.
    pub fn oracle(ground_truth: &Bdmg) -> Self {
        let sources = (0..ground_truth.node_count())
            .map(|i| CiSource::separation(ground_truth.intervened(i)))
            .collect();
        InterventionalFamily {
            roster: ground_truth.names().to_vec(),
            cards: None,
            sources,
            ground_truth: Some(ground_truth.clone()),
        }
    }

    pub fn roster(&self) -> &[String] {
        &self.roster
    }

    pub fn len(&self) -> usize {
        self.roster.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roster.is_empty()
    }

    pub fn cards(&self) -> Option<&[usize]> {
        self.cards.as_deref()
    }

    pub fn source(&self, i: usize) -> &CiSource {
        &self.sources[i]
    }

    pub fn sources(&self) -> &[CiSource] {
        &self.sources
    }

    pub fn ground_truth(&self) -> Option<&Bdmg> {
        self.ground_truth.as_ref()
    }

    pub fn is_table_backed(&self) -> bool {
        self.sources.iter().all(|s| s.table().is_some())
    }

    /// `P_do(i)` as a table, or a capability error for oracle families.
    pub fn table(&self, i: usize) -> Result<&JointTable, FamilyError> {
        self.sources[i].table().ok_or_else(|| {
            FamilyError::Capability("this check needs table-backed interventional distributions".into())
        })
    }

    /// `A ⊥ B | C` under `P_do(i)`.
    pub fn independent(&self, i: usize, a: NodeSet, b: NodeSet, c: NodeSet) -> bool {
        self.sources[i].independent(a, b, c)
    }

    pub fn independent_pair(&self, i: usize, x: usize, y: usize, c: NodeSet) -> bool {
        self.sources[i].independent_pair(x, y, c)
    }

    /// Edgeless graph over the roster.
    pub fn empty_graph(&self) -> Bdmg {
        Bdmg::empty(self.roster.iter().cloned()).expect("roster labels are distinct")
    }

    pub fn index_of(&self, name: &str) -> Result<usize, FamilyError> {
        self.roster
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| FamilyError::Graph(GraphError::UnknownNode(name.to_string())))
    }

    /// Aligns an observational table with the roster.
    pub fn align(&self, p: &JointTable) -> Result<JointTable, FamilyError> {
        let t = p
            .reordered(&self.roster)
            .map_err(|_| FamilyError::RosterMismatch(format!("{:?} vs {:?}", p.names(), self.roster)))?;
        if let Some(cards) = &self.cards {
            if t.cards() != cards.as_slice() {
                return Err(FamilyError::RosterMismatch("cardinalities differ".into()));
            }
        }
        Ok(t)
    }
}
