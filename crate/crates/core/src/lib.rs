//! Causal graphs derived from families of interventional distributions.
//!
//! The crate covers mixed graphs with σ/m/d-separation, exact finite
//! distributions, discrete structural causal models, the derivation of causal
//! graphs from interventional families, axiom checkers and randomized suites.

pub mod axioms;
pub mod ci;
pub mod cli;
pub mod derive;
pub mod dist;
pub mod graph;
pub mod nodeset;
pub mod rational;
pub mod scm;
pub mod verify;

pub use ci::CiQuery;
pub use derive::{derive, CausalDerivation, FamilyError, InterventionalFamily};
pub use dist::{DistError, JointTable};
pub use graph::{Bdmg, Criterion, GraphError};
pub use nodeset::NodeSet;
pub use scm::{Scm, ScmError};
