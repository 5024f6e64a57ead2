//! Discrete structural causal models over acyclic mixed graphs.
//!
//! Each node `i` has one noise variable `e_i`. Noise variables are grouped into
//! components that must coincide with the arc-connected components of the
//! graph; components are mutually independent.

mod io;

pub use io::{MechanismJson, NoiseComponentJson, NoiseJson, ScmJson};

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::derive::InterventionalFamily;
use crate::dist::{DistError, JointTable};
use crate::graph::{Bdmg, GraphError};
use crate::nodeset::NodeSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScmError {
    #[error("invalid SCM: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("cardinality mismatch for `{node}`: expected {expected}, got {got}")]
    CardinalityMismatch {
        node: String,
        expected: usize,
        got: usize,
    },
    #[error("malformed SCM: {0}")]
    Malformed(String),
    #[error("invalid SCM JSON: {0}")]
    Json(String),
}

/// An input slot of a mechanism table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Input {
    Parent(usize),
    Noise,
}

/// `φ_i` as a flat lookup table indexed row-major by its inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mechanism {
    pub inputs: Vec<Input>,
    pub table: Vec<usize>,
}

/// Noise variables of `nodes` (in that order) with their joint law.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseComponent {
    pub nodes: Vec<usize>,
    pub table: JointTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scm {
    graph: Bdmg,
    cards: Vec<usize>,
    noise_names: Vec<String>,
    noise_cards: Vec<usize>,
    components: Vec<NoiseComponent>,
    mechanisms: Vec<Mechanism>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScmReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

impl Scm {
    /// Assembles an SCM. Only shape errors are reported here; use [`Scm::validate`]
    /// for the semantic checks.
    pub fn new(
        graph: Bdmg,
        cards: Vec<usize>,
        noise_names: Vec<String>,
        components: Vec<NoiseComponent>,
        mechanisms: Vec<Mechanism>,
    ) -> Result<Scm, ScmError> {
        let n = graph.node_count();
        if cards.len() != n || noise_names.len() != n || mechanisms.len() != n {
            return Err(ScmError::Malformed(
                "cards, noise names and mechanisms need one entry per node".into(),
            ));
        }
        let mut noise_cards = vec![0usize; n];
        for comp in &components {
            if comp.nodes.len() != comp.table.var_count() {
                return Err(ScmError::Malformed("noise component size mismatch".into()));
            }
            for (pos, &v) in comp.nodes.iter().enumerate() {
                if v >= n {
                    return Err(ScmError::Malformed(format!("noise owner {v} out of range")));
                }
                if noise_cards[v] != 0 {
                    return Err(ScmError::Malformed(format!(
                        "noise of `{}` declared twice",
                        graph.name(v)
                    )));
                }
                noise_cards[v] = comp.table.cards()[pos];
            }
        }
        if let Some(v) = noise_cards.iter().position(|&c| c == 0) {
            return Err(ScmError::Malformed(format!(
                "node `{}` has no noise variable",
                graph.name(v)
            )));
        }
        for (i, m) in mechanisms.iter().enumerate() {
            if m.inputs.iter().filter(|x| **x == Input::Noise).count() != 1 {
                return Err(ScmError::Malformed(format!(
                    "mechanism of `{}` must read its noise exactly once",
                    graph.name(i)
                )));
            }
            if let Some(Input::Parent(p)) = m.inputs.iter().find(|x| matches!(x, Input::Parent(p) if *p >= n))
            {
                return Err(ScmError::Malformed(format!("parent index {p} out of range")));
            }
        }
        Ok(Scm {
            graph,
            cards,
            noise_names,
            noise_cards,
            components,
            mechanisms,
        })
    }

    pub fn graph(&self) -> &Bdmg {
        &self.graph
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn noise_names(&self) -> &[String] {
        &self.noise_names
    }

    pub fn noise_cards(&self) -> &[usize] {
        &self.noise_cards
    }

    pub fn components(&self) -> &[NoiseComponent] {
        &self.components
    }

    pub fn mechanisms(&self) -> &[Mechanism] {
        &self.mechanisms
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn input_card(&self, i: usize, x: Input) -> usize {
        match x {
            Input::Parent(p) => self.cards[p],
            Input::Noise => self.noise_cards[i],
        }
    }

    /// Acyclicity, noise partition versus arc components, the noise independence
    /// pattern, and mechanism totality.
    pub fn validate(&self) -> ScmReport {
        let g = &self.graph;
        let n = g.node_count();
        let mut v = Vec::new();
        if let Some(i) = (0..n).find(|&i| g.strong_component(i).len() > 1) {
            v.push(format!(
                "graph has a directed cycle through `{}`; cyclic SCMs are not simulated",
                g.name(i)
            ));
        }
        let arc_comps = arc_components(g);
        let mut declared: Vec<NodeSet> = self
            .components
            .iter()
            .map(|c| c.nodes.iter().copied().collect())
            .collect();
        declared.sort();
        let mut expected = arc_comps.clone();
        expected.sort();
        if declared != expected {
            let witness = expected
                .iter()
                .find(|e| !declared.contains(e))
                .map(|e| g.labels(*e).join(","))
                .unwrap_or_default();
            v.push(format!(
                "noise components do not match the arc-connected components (expected {{{witness}}} as one component)"
            ));
        } else {
            for comp in &self.components {
                if let Some(msg) = self.independence_pattern_violation(comp) {
                    v.push(msg);
                }
            }
        }
        for (i, m) in self.mechanisms.iter().enumerate() {
            let parents: NodeSet = m
                .inputs
                .iter()
                .filter_map(|x| match x {
                    Input::Parent(p) => Some(*p),
                    Input::Noise => None,
                })
                .collect();
            let parent_inputs = m.inputs.len() - 1;
            if parents != g.parents(i) || parents.len() != parent_inputs {
                v.push(format!(
                    "mechanism of `{}` reads {{{}}} but its parents are {{{}}}",
                    g.name(i),
                    g.labels(parents).join(","),
                    g.labels(g.parents(i)).join(",")
                ));
                continue;
            }
            let size: usize = m.inputs.iter().map(|&x| self.input_card(i, x)).product();
            if m.table.len() != size {
                v.push(format!(
                    "mechanism of `{}` has {} entries; its domain has {}",
                    g.name(i),
                    m.table.len(),
                    size
                ));
            } else if let Some(pos) = m.table.iter().position(|&x| x >= self.cards[i]) {
                v.push(format!(
                    "mechanism of `{}` maps entry {} to {} outside 0..{}",
                    g.name(i),
                    pos,
                    m.table[pos],
                    self.cards[i]
                ));
            }
        }
        ScmReport {
            valid: v.is_empty(),
            violations: v,
        }
    }

    /// Within a component, `e_A ⊥ e_B` must hold exactly when no arc joins `A` and `B`.
    fn independence_pattern_violation(&self, comp: &NoiseComponent) -> Option<String> {
        let k = comp.nodes.len();
        let all = NodeSet::full(k);
        let g = &self.graph;
        for a in all.subsets().filter(|s| !s.is_empty()) {
            for b in all.minus(a).subsets().filter(|s| !s.is_empty()) {
                if a.bits() > b.bits() {
                    continue;
                }
                let linked = a
                    .iter()
                    .any(|x| b.iter().any(|y| g.has_arc(comp.nodes[x], comp.nodes[y])));
                let ind = comp.table.ci(a, b, NodeSet::EMPTY).expect("disjoint");
                if ind == linked {
                    let names = |s: NodeSet| {
                        s.iter()
                            .map(|x| self.noise_names[comp.nodes[x]].clone())
                            .collect::<Vec<_>>()
                            .join(",")
                    };
                    return Some(format!(
                        "noises {{{}}} and {{{}}} are {} but {}",
                        names(a),
                        names(b),
                        if ind { "independent" } else { "dependent" },
                        if linked {
                            "an arc joins them"
                        } else {
                            "no arc joins them"
                        }
                    ));
                }
            }
        }
        None
    }

    fn require_valid(&self) -> Result<(), ScmError> {
        let r = self.validate();
        if r.valid {
            Ok(())
        } else {
            Err(ScmError::Invalid(r.violations))
        }
    }

    fn topological_order(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut done = NodeSet::EMPTY;
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            for i in 0..n {
                if !done.contains(i) && self.graph.parents(i).is_subset(done) {
                    done.insert(i);
                    out.push(i);
                }
            }
        }
        out
    }

    /// Exact pushforward of the noise law through the mechanisms.
    pub fn joint(&self) -> Result<JointTable, ScmError> {
        self.require_valid()?;
        let n = self.node_count();
        let order = self.topological_order();
        let size: usize = self.cards.iter().product();
        let mut out = vec![BigUint::zero(); size];
        // supports of each component: (noise values per owner, weight)
        let supports: Vec<Vec<(Vec<usize>, &BigUint)>> = self
            .components
            .iter()
            .map(|c| {
                c.table
                    .support()
                    .into_iter()
                    .map(|cell| (c.table.decode(cell), &c.table.weights()[cell]))
                    .collect()
            })
            .collect();
        let mut noise = vec![0usize; n];
        let mut x = vec![0usize; n];
        let mut cursor = vec![0usize; supports.len()];
        if supports.iter().any(|s| s.is_empty()) {
            return Err(ScmError::Malformed("a noise component has no mass".into()));
        }
        loop {
            let mut w = BigUint::from(1u32);
            for (ci, comp) in self.components.iter().enumerate() {
                let (vals, weight) = &supports[ci][cursor[ci]];
                for (pos, &owner) in comp.nodes.iter().enumerate() {
                    noise[owner] = vals[pos];
                }
                w *= *weight;
            }
            for &i in &order {
                x[i] = self.evaluate(i, &x, noise[i]);
            }
            out[crate::dist::encode(&self.cards, &x)] += w;
            // advance the odometer over component supports
            let mut k = 0;
            loop {
                if k == cursor.len() {
                    let vars = (0..n).map(|i| (self.graph.name(i).to_string(), self.cards[i]));
                    return Ok(JointTable::from_weights(vars, out)?);
                }
                cursor[k] += 1;
                if cursor[k] < supports[k].len() {
                    break;
                }
                cursor[k] = 0;
                k += 1;
            }
        }
    }

    /// `φ_i` at the parent values in `x` (indexed by node) and noise value `e`.
    pub fn evaluate(&self, i: usize, x: &[usize], e: usize) -> usize {
        let m = &self.mechanisms[i];
        let mut idx = 0;
        for &inp in &m.inputs {
            let (val, card) = match inp {
                Input::Parent(p) => (x[p], self.cards[p]),
                Input::Noise => (e, self.noise_cards[i]),
            };
            idx = idx * card + val;
        }
        m.table[idx]
    }

    /// Replaces `X_i`'s equation by a fresh independent variable distributed as
    /// `replacement`; arrows into `i` and arcs at `i` are removed.
    pub fn intervene_standard(&self, i: usize, replacement: &JointTable) -> Result<Scm, ScmError> {
        let n = self.node_count();
        if i >= n {
            return Err(ScmError::Graph(GraphError::IndexOutOfRange(i)));
        }
        if replacement.var_count() != 1 || replacement.cards()[0] != self.cards[i] {
            return Err(ScmError::CardinalityMismatch {
                node: self.graph.name(i).to_string(),
                expected: self.cards[i],
                got: replacement.cards().iter().product(),
            });
        }
        self.require_valid()?;
        let graph = self.graph.intervened(i);
        let mut components = Vec::new();
        for comp in &self.components {
            let Some(pos) = comp.nodes.iter().position(|&v| v == i) else {
                components.push(comp.clone());
                continue;
            };
            let rest: Vec<usize> = comp.nodes.iter().copied().filter(|&v| v != i).collect();
            // split the remaining owners by arc components of the intervened graph
            let pieces = arc_components(&graph);
            for piece in pieces {
                let owners: Vec<usize> = rest.iter().copied().filter(|v| piece.contains(*v)).collect();
                if owners.is_empty() || owners.len() != piece.len() {
                    continue;
                }
                let local: NodeSet = comp
                    .nodes
                    .iter()
                    .enumerate()
                    .filter(|(p, v)| *p != pos && piece.contains(**v))
                    .map(|(p, _)| p)
                    .collect();
                components.push(NoiseComponent {
                    nodes: owners,
                    table: comp.table.marginal(local)?,
                });
            }
        }
        let fresh = JointTable::from_probs(
            [(self.noise_names[i].clone(), self.cards[i])],
            &replacement.probs(),
        )?;
        components.push(NoiseComponent {
            nodes: vec![i],
            table: fresh,
        });
        components.sort_by_key(|c| c.nodes.iter().copied().min());
        let mut mechanisms = self.mechanisms.clone();
        mechanisms[i] = Mechanism {
            inputs: vec![Input::Noise],
            table: (0..self.cards[i]).collect(),
        };
        let scm = Scm::new(
            graph,
            self.cards.clone(),
            self.noise_names.clone(),
            components,
            mechanisms,
        )?;
        Ok(scm)
    }

    /// The family `P_do(i) = joint(intervene_standard(i, R_i))` where `R_i` is the
    /// override for `i` if given, else the marginal of `X_i`.
    pub fn standard_family(
        &self,
        overrides: &BTreeMap<usize, JointTable>,
    ) -> Result<InterventionalFamily, ScmError> {
        let p = self.joint()?;
        let mut tables = Vec::with_capacity(self.node_count());
        for i in 0..self.node_count() {
            let repl = match overrides.get(&i) {
                Some(t) => t.clone(),
                None => p.marginal(NodeSet::singleton(i))?,
            };
            tables.push(self.intervene_standard(i, &repl)?.joint()?);
        }
        InterventionalFamily::from_tables(tables).map_err(|e| ScmError::Malformed(e.to_string()))
    }
}

/// Connected components of the arc relation, as node sets.
pub fn arc_components(g: &Bdmg) -> Vec<NodeSet> {
    let n = g.node_count();
    let mut seen = NodeSet::EMPTY;
    let mut out = Vec::new();
    for s in 0..n {
        if seen.contains(s) {
            continue;
        }
        let mut comp = NodeSet::singleton(s);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for w in g.spouses(v).minus(comp).iter() {
                comp.insert(w);
                stack.push(w);
            }
        }
        seen = seen.union(comp);
        out.push(comp);
    }
    out
}

/// Atomic interventions on `target`: one kernel over `V \ {target}` per value,
/// mixed by the reference law `reference`.
#[derive(Debug, Clone)]
pub struct AtomicKernelSet {
    pub target: String,
    pub kernels: Vec<JointTable>,
    pub reference: JointTable,
}

impl AtomicKernelSet {
    /// The table `P(x) = A_{x_i}(x_{-i}) · R(x_i)` over the roster
    /// `roster` (which must contain the target and the kernels' variables).
    pub fn to_table<S: AsRef<str>>(&self, roster: &[S]) -> Result<JointTable, ScmError> {
        let card = self.kernels.len();
        if self.reference.var_count() != 1 || self.reference.cards()[0] != card {
            return Err(ScmError::CardinalityMismatch {
                node: self.target.clone(),
                expected: card,
                got: self.reference.len(),
            });
        }
        if self.reference.support().len() != card {
            return Err(ScmError::Malformed(
                "reference law must be strictly positive".into(),
            ));
        }
        let first = self
            .kernels
            .first()
            .ok_or_else(|| ScmError::Malformed("no kernels".into()))?;
        for k in &self.kernels {
            if k.names() != first.names() || k.cards() != first.cards() {
                return Err(ScmError::Malformed("kernels must share one roster".into()));
            }
            if k.names().contains(&self.target) {
                return Err(ScmError::Malformed("kernels may not include the target".into()));
            }
        }
        let mut probs = Vec::new();
        let r = self.reference.probs();
        for (x, k) in self.kernels.iter().enumerate() {
            for p in k.probs() {
                probs.push(&r[x] * p);
            }
        }
        let mut vars = vec![(self.target.clone(), card)];
        vars.extend(first.names().iter().cloned().zip(first.cards().iter().copied()));
        let t = JointTable::from_probs(vars, &probs)?;
        Ok(t.reordered(roster)?)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ci::CiQuery;
    use crate::rational;

    pub fn bit(name: &str, p1: &str) -> JointTable {
        let p0 = rational::format(
            &(num_rational::BigRational::from_integer(1.into()) - rational::parse(p1).unwrap()),
        );
        JointTable::from_prob_strings([(name, 2)], &[&p0, p1]).unwrap()
    }

    /// X1 = e1, X2 = X1 + e2, X3 = X1 + e3 with fair bits.
    pub fn two_graphs_scm() -> Scm {
        let g = Bdmg::from_labels(&["1", "2", "3"], &[("1", "2"), ("1", "3")], &[]).unwrap();
        let comps = (0..3)
            .map(|i| NoiseComponent {
                nodes: vec![i],
                table: bit(&format!("e{}", i + 1), "1/2"),
            })
            .collect();
        let add = Mechanism {
            inputs: vec![Input::Parent(0), Input::Noise],
            table: vec![0, 1, 1, 2],
        };
        Scm::new(
            g,
            vec![2, 3, 3],
            vec!["e1".into(), "e2".into(), "e3".into()],
            comps,
            vec![
                Mechanism {
                    inputs: vec![Input::Noise],
                    table: vec![0, 1],
                },
                add.clone(),
                add,
            ],
        )
        .unwrap()
    }

    /// X3 = X1 xor X2, X1 ~ Bern(p1), X2 ~ Bern(p2).
    pub fn xor_scm(p1: &str, p2: &str) -> Scm {
        let g = Bdmg::from_labels(&["1", "2", "3"], &[("1", "3"), ("2", "3")], &[]).unwrap();
        let comps = vec![
            NoiseComponent {
                nodes: vec![0],
                table: bit("e1", p1),
            },
            NoiseComponent {
                nodes: vec![1],
                table: bit("e2", p2),
            },
            NoiseComponent {
                nodes: vec![2],
                table: JointTable::point_mass([("e3", 1)], &[0]).unwrap(),
            },
        ];
        let id = Mechanism {
            inputs: vec![Input::Noise],
            table: vec![0, 1],
        };
        Scm::new(
            g,
            vec![2, 2, 2],
            vec!["e1".into(), "e2".into(), "e3".into()],
            comps,
            vec![
                id.clone(),
                id,
                Mechanism {
                    inputs: vec![Input::Parent(0), Input::Parent(1), Input::Noise],
                    table: vec![0, 1, 1, 0],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_graphs_joint() {
        let p = two_graphs_scm().joint().unwrap();
        let m = p.marginal(NodeSet::singleton(1)).unwrap();
        let probs: Vec<String> = m.probs().iter().map(rational::format).collect();
        assert_eq!(probs, ["1/4", "1/2", "1/4"]);
    }

    #[test]
    fn xor_collider_joint() {
        let p = xor_scm("1/100", "1/2").joint().unwrap();
        let m = p.marginal(NodeSet::singleton(2)).unwrap();
        assert_eq!(m.probs()[1], rational::parse("1/2").unwrap());
    }

    #[test]
    fn constant_mechanisms_give_point_mass() {
        let g = Bdmg::empty(["a"]).unwrap();
        let scm = Scm::new(
            g,
            vec![3],
            vec!["e".into()],
            vec![NoiseComponent {
                nodes: vec![0],
                table: JointTable::uniform([("e", 2)]).unwrap(),
            }],
            vec![Mechanism {
                inputs: vec![Input::Noise],
                table: vec![2, 2],
            }],
        )
        .unwrap();
        assert_eq!(
            scm.joint().unwrap(),
            JointTable::point_mass([("a", 3)], &[2]).unwrap()
        );
    }

    #[test]
    fn validation_failures() {
        assert!(two_graphs_scm().validate().valid);
        // arc 1<->2 but separate noise components
        let g = Bdmg::from_labels(&["1", "2"], &[], &[("1", "2")]).unwrap();
        let comps = vec![
            NoiseComponent {
                nodes: vec![0],
                table: bit("e1", "1/2"),
            },
            NoiseComponent {
                nodes: vec![1],
                table: bit("e2", "1/2"),
            },
        ];
        let id = Mechanism {
            inputs: vec![Input::Noise],
            table: vec![0, 1],
        };
        let scm = Scm::new(
            g,
            vec![2, 2],
            vec!["e1".into(), "e2".into()],
            comps,
            vec![id.clone(), id.clone()],
        )
        .unwrap();
        let r = scm.validate();
        assert!(!r.valid);
        assert!(r.violations[0].contains("arc-connected"));
        // cyclic graph
        let g = Bdmg::from_labels(&["1", "2"], &[("1", "2"), ("2", "1")], &[]).unwrap();
        let comps = vec![
            NoiseComponent {
                nodes: vec![0],
                table: bit("e1", "1/2"),
            },
            NoiseComponent {
                nodes: vec![1],
                table: bit("e2", "1/2"),
            },
        ];
        let m = |p| Mechanism {
            inputs: vec![Input::Parent(p), Input::Noise],
            table: vec![0, 1, 1, 0],
        };
        let scm = Scm::new(
            g,
            vec![2, 2],
            vec!["e1".into(), "e2".into()],
            comps,
            vec![m(1), m(0)],
        )
        .unwrap();
        assert!(scm.validate().violations[0].contains("cycle"));
        assert!(matches!(scm.joint(), Err(ScmError::Invalid(_))));
    }

    #[test]
    fn dependent_noise_required_for_arcs() {
        let g = Bdmg::from_labels(&["1", "2"], &[], &[("1", "2")]).unwrap();
        let indep = JointTable::uniform([("e1", 2), ("e2", 2)]).unwrap();
        let id = Mechanism {
            inputs: vec![Input::Noise],
            table: vec![0, 1],
        };
        let scm = Scm::new(
            g.clone(),
            vec![2, 2],
            vec!["e1".into(), "e2".into()],
            vec![NoiseComponent {
                nodes: vec![0, 1],
                table: indep,
            }],
            vec![id.clone(), id.clone()],
        )
        .unwrap();
        assert!(!scm.validate().valid);
        let dep = JointTable::from_prob_strings([("e1", 2), ("e2", 2)], &["1/2", "0", "0", "1/2"]).unwrap();
        let scm = Scm::new(
            g,
            vec![2, 2],
            vec!["e1".into(), "e2".into()],
            vec![NoiseComponent {
                nodes: vec![0, 1],
                table: dep,
            }],
            vec![id.clone(), id],
        )
        .unwrap();
        assert!(scm.validate().valid);
    }

    #[test]
    fn intervening_on_chain_child_gives_product() {
        let g = Bdmg::from_labels(&["1", "2"], &[("1", "2")], &[]).unwrap();
        let scm = Scm::new(
            g,
            vec![2, 2],
            vec!["e1".into(), "e2".into()],
            vec![
                NoiseComponent {
                    nodes: vec![0],
                    table: bit("e1", "1/3"),
                },
                NoiseComponent {
                    nodes: vec![1],
                    table: bit("e2", "1/5"),
                },
            ],
            vec![
                Mechanism {
                    inputs: vec![Input::Noise],
                    table: vec![0, 1],
                },
                Mechanism {
                    inputs: vec![Input::Parent(0), Input::Noise],
                    table: vec![0, 1, 1, 0],
                },
            ],
        )
        .unwrap();
        let p = scm.joint().unwrap();
        let m2 = p.marginal(NodeSet::singleton(1)).unwrap();
        let done = scm.intervene_standard(1, &m2).unwrap();
        assert!(!done.graph().has_arrow(0, 1));
        let q = done.joint().unwrap();
        let expected = p.marginal(NodeSet::singleton(0)).unwrap().product(&m2).unwrap();
        assert_eq!(q, expected);
    }

    #[test]
    fn intervening_on_root_with_own_marginal_is_identity() {
        let scm = two_graphs_scm();
        let p = scm.joint().unwrap();
        let m1 = p.marginal(NodeSet::singleton(0)).unwrap();
        assert_eq!(scm.intervene_standard(0, &m1).unwrap().joint().unwrap(), p);
    }

    #[test]
    fn xor_intervention_makes_x1_fair() {
        let scm = xor_scm("1/100", "1/2");
        let q = scm
            .intervene_standard(0, &bit("1", "1/2"))
            .unwrap()
            .joint()
            .unwrap();
        assert_eq!(
            q.marginal(NodeSet::singleton(0)).unwrap(),
            JointTable::uniform([("1", 2)]).unwrap()
        );
        let bad = JointTable::uniform([("1", 3)]).unwrap();
        assert!(matches!(
            scm.intervene_standard(0, &bad),
            Err(ScmError::CardinalityMismatch { .. })
        ));
    }

    #[test]
    fn splitting_a_component_on_intervention() {
        // chain of arcs 1<->2<->3 realized by latents; intervening on 2 separates 1 and 3
        let g = Bdmg::from_labels(&["1", "2", "3"], &[], &[("1", "2"), ("2", "3")]).unwrap();
        // e1 = L12, e2 = (L12, L23), e3 = L23
        let mut w = vec![BigUint::zero(); 2 * 4 * 2];
        for l12 in 0..2 {
            for l23 in 0..2 {
                let cell = (l12 * 4 + (l12 * 2 + l23)) * 2 + l23;
                w[cell] = BigUint::from((1 + l12 as u32) * (1 + 2 * l23 as u32));
            }
        }
        let noise = JointTable::from_weights([("e1", 2), ("e2", 4), ("e3", 2)], w).unwrap();
        let id2 = Mechanism {
            inputs: vec![Input::Noise],
            table: vec![0, 1],
        };
        let scm = Scm::new(
            g,
            vec![2, 2, 2],
            vec!["e1".into(), "e2".into(), "e3".into()],
            vec![NoiseComponent {
                nodes: vec![0, 1, 2],
                table: noise,
            }],
            vec![
                id2.clone(),
                Mechanism {
                    inputs: vec![Input::Noise],
                    table: vec![0, 1, 1, 0],
                },
                id2,
            ],
        )
        .unwrap();
        assert!(scm.validate().valid, "{:?}", scm.validate());
        let done = scm.intervene_standard(1, &bit("2", "1/2")).unwrap();
        assert_eq!(done.components().len(), 3);
        let q = done.joint().unwrap();
        assert!(q.independent(NodeSet::singleton(0), NodeSet::singleton(2), NodeSet::EMPTY));
    }

    #[test]
    fn atomic_kernels() {
        let q = JointTable::from_prob_strings([("k", 2)], &["1/3", "2/3"]).unwrap();
        let aks = AtomicKernelSet {
            target: "i".into(),
            kernels: vec![q.clone(), q.clone()],
            reference: JointTable::uniform([("i", 2)]).unwrap(),
        };
        let t = aks.to_table(&["i", "k"]).unwrap();
        assert_eq!(t, JointTable::uniform([("i", 2)]).unwrap().product(&q).unwrap());
        let other = JointTable::from_prob_strings([("k", 2)], &["1/2", "1/2"]).unwrap();
        let aks = AtomicKernelSet {
            kernels: vec![q, other],
            ..aks
        };
        let t = aks.to_table(&["k", "i"]).unwrap();
        assert!(!t.independent(NodeSet::singleton(0), NodeSet::singleton(1), NodeSet::EMPTY));
    }
}
