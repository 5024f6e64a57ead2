use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{Input, Mechanism, NoiseComponent, Scm, ScmError};
use crate::dist::{JointTable, NumberJson};
use crate::graph::GraphJson;
use crate::rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismJson {
    pub order: Vec<String>,
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseComponentJson {
    pub cards: BTreeMap<String, usize>,
    pub probs: Vec<NumberJson>,
    pub vars: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseJson {
    pub components: Vec<NoiseComponentJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScmJson {
    pub cards: BTreeMap<String, usize>,
    pub graph: GraphJson,
    pub mechanisms: BTreeMap<String, MechanismJson>,
    pub noise: NoiseJson,
}

impl ScmJson {
    pub fn to_scm(&self) -> Result<Scm, ScmError> {
        let graph = self.graph.to_graph()?;
        let n = graph.node_count();
        let node_index: HashMap<&str, usize> = graph
            .names()
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        for name in self.cards.keys().chain(self.mechanisms.keys()) {
            if !node_index.contains_key(name.as_str()) {
                return Err(ScmError::UnknownNode(name.clone()));
            }
        }
        let mut cards = Vec::with_capacity(n);
        let mut mechanisms = Vec::with_capacity(n);
        let mut noise_names = vec![String::new(); n];
        let mut owner: HashMap<&str, usize> = HashMap::new();
        for (i, name) in graph.names().iter().enumerate() {
            cards.push(
                *self
                    .cards
                    .get(name)
                    .ok_or_else(|| ScmError::Malformed(format!("no cardinality for `{name}`")))?,
            );
            let m = self
                .mechanisms
                .get(name)
                .ok_or_else(|| ScmError::Malformed(format!("no mechanism for `{name}`")))?;
            let mut inputs = Vec::with_capacity(m.order.len());
            for input in &m.order {
                match node_index.get(input.as_str()) {
                    Some(&p) => inputs.push(Input::Parent(p)),
                    None => {
                        if owner.insert(input.as_str(), i).is_some() {
                            return Err(ScmError::Malformed(format!(
                                "noise `{input}` is read by more than one mechanism"
                            )));
                        }
                        noise_names[i] = input.clone();
                        inputs.push(Input::Noise);
                    }
                }
            }
            mechanisms.push(Mechanism {
                inputs,
                table: m.table.clone(),
            });
        }
        let mut components = Vec::new();
        for comp in &self.noise.components {
            let mut nodes = Vec::new();
            let mut vars = Vec::new();
            for v in &comp.vars {
                let &o = owner.get(v.as_str()).ok_or_else(|| {
                    ScmError::Malformed(format!("noise `{v}` is not read by any mechanism"))
                })?;
                let card = *comp
                    .cards
                    .get(v)
                    .ok_or_else(|| ScmError::Malformed(format!("no cardinality for noise `{v}`")))?;
                nodes.push(o);
                vars.push((v.clone(), card));
            }
            let probs = comp
                .probs
                .iter()
                .map(|p| match p {
                    NumberJson::Text(s) => rational::parse(s),
                    NumberJson::Number(x) => rational::parse(&x.to_string()),
                })
                .collect::<Result<Vec<_>, _>>()
                .map_err(ScmError::Malformed)?;
            components.push(NoiseComponent {
                nodes,
                table: JointTable::from_probs(vars, &probs)?,
            });
        }
        Scm::new(graph, cards, noise_names, components, mechanisms)
    }
}

impl Scm {
    pub fn from_json(text: &str) -> Result<Scm, ScmError> {
        let parsed: ScmJson = serde_json::from_str(text).map_err(|e| ScmError::Json(e.to_string()))?;
        parsed.to_scm()
    }

    pub fn to_json_value(&self) -> ScmJson {
        let g = self.graph();
        let cards = g
            .names()
            .iter()
            .cloned()
            .zip(self.cards().iter().copied())
            .collect();
        let mechanisms = self
            .mechanisms()
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let order = m
                    .inputs
                    .iter()
                    .map(|x| match x {
                        Input::Parent(p) => g.name(*p).to_string(),
                        Input::Noise => self.noise_names()[i].clone(),
                    })
                    .collect();
                (
                    g.name(i).to_string(),
                    MechanismJson {
                        order,
                        table: m.table.clone(),
                    },
                )
            })
            .collect();
        let components = self
            .components()
            .iter()
            .map(|c| {
                let t = c.table.to_json_value();
                NoiseComponentJson {
                    cards: t.vars.iter().map(|v| (v.name.clone(), v.card)).collect(),
                    probs: t.probs,
                    vars: t.vars.into_iter().map(|v| v.name).collect(),
                }
            })
            .collect();
        ScmJson {
            cards,
            graph: g.to_json_value(),
            mechanisms,
            noise: NoiseJson { components },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("SCM serializes")
    }
}
