use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CausalDerivation, FamilyError, InterventionalFamily, Mode, PipAdjustment, PipStatus};
use crate::dist::TableJson;
use crate::graph::{Bdmg, GraphJson};
use crate::nodeset::NodeSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleJson {
    pub ground_truth: GraphJson,
}

/// `{"interventions":{"x1":<table>,..}}` or `{"oracle":{"ground_truth":<graph>}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interventions: Option<BTreeMap<String, TableJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleJson>,
}

impl FamilyJson {
    pub fn to_family(&self) -> Result<InterventionalFamily, FamilyError> {
        match (&self.interventions, &self.oracle) {
            (Some(map), None) => {
                let mut tables = BTreeMap::new();
                for (name, t) in map {
                    tables.insert(name.clone(), t.to_table()?);
                }
                InterventionalFamily::from_named_tables(tables)
            }
            (None, Some(o)) => Ok(InterventionalFamily::oracle(&o.ground_truth.to_graph()?)),
            _ => Err(FamilyError::Json(
                "expected exactly one of `interventions` or `oracle`".into(),
            )),
        }
    }
}

impl InterventionalFamily {
    /// Tables keyed by the intervened variable. The roster follows the
    /// variable order of the alphabetically first table.
    pub fn from_named_tables(tables: BTreeMap<String, crate::dist::JointTable>) -> Result<Self, FamilyError> {
        let first = tables.values().next().ok_or(FamilyError::Empty)?;
        let roster = first.names().to_vec();
        if tables.len() != roster.len() {
            return Err(FamilyError::RosterMismatch(format!(
                "{} interventions for {} variables",
                tables.len(),
                roster.len()
            )));
        }
        let mut ordered = Vec::with_capacity(roster.len());
        for name in &roster {
            let t = tables
                .get(name)
                .ok_or_else(|| FamilyError::RosterMismatch(format!("no intervention on `{name}`")))?;
            let t = t.reordered(&roster).map_err(|_| {
                FamilyError::RosterMismatch(format!("table over {:?} vs roster {:?}", t.names(), roster))
            })?;
            ordered.push(t);
        }
        InterventionalFamily::from_tables(ordered)
    }

    pub fn from_json(text: &str) -> Result<Self, FamilyError> {
        let parsed: FamilyJson = serde_json::from_str(text).map_err(|e| FamilyError::Json(e.to_string()))?;
        parsed.to_family()
    }

    pub fn to_json_value(&self) -> FamilyJson {
        if let Some(g) = self.ground_truth() {
            return FamilyJson {
                interventions: None,
                oracle: Some(OracleJson {
                    ground_truth: g.to_json_value(),
                }),
            };
        }
        let map = self
            .roster()
            .iter()
            .zip(self.sources())
            .map(|(name, s)| {
                let t = s.table().expect("families without ground truth are table-backed");
                (name.clone(), t.to_json_value())
            })
            .collect();
        FamilyJson {
            interventions: Some(map),
            oracle: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("family serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundReport {
    pub dcause: BTreeMap<String, Vec<String>>,
    pub round: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipEntryReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub by: Option<String>,
    pub from: String,
    pub pips: Vec<String>,
    pub separating: Vec<String>,
    pub status: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcFlagReport {
    pub a: String,
    pub b: String,
    pub pips: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipReport {
    pub dcause: BTreeMap<String, Vec<String>>,
    pub entries: Vec<PipEntryReport>,
    pub graph: GraphJson,
    pub unresolved_arcs: Vec<ArcFlagReport>,
}

impl PipReport {
    pub fn new(g: &Bdmg, adj: &PipAdjustment) -> Self {
        let render = |paths: &[crate::graph::Path]| paths.iter().map(|p| p.render(g)).collect();
        PipReport {
            dcause: set_map(g, &adj.dcause),
            entries: adj
                .entries
                .iter()
                .map(|e| PipEntryReport {
                    by: match e.status {
                        PipStatus::Removed { by } => Some(g.name(by).to_string()),
                        _ => None,
                    },
                    from: g.name(e.from).to_string(),
                    pips: render(&e.pips),
                    separating: e.separating.iter().map(|&j| g.name(j).to_string()).collect(),
                    status: match e.status {
                        PipStatus::Removed { .. } => "removed",
                        PipStatus::Kept => "kept",
                        PipStatus::Unresolved => "UNRESOLVED",
                    }
                    .to_string(),
                    to: g.name(e.to).to_string(),
                })
                .collect(),
            graph: adj.graph.to_json_value(),
            unresolved_arcs: adj
                .unresolved_arcs
                .iter()
                .map(|f| ArcFlagReport {
                    a: g.name(f.a).to_string(),
                    b: g.name(f.b).to_string(),
                    pips: render(&f.pips),
                })
                .collect(),
        }
    }
}

/// Derivation as JSON: every map is keyed by node label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationReport {
    pub cause: BTreeMap<String, Vec<String>>,
    pub cc: BTreeMap<String, Vec<String>>,
    pub dcause: BTreeMap<String, Vec<String>>,
    pub eff: BTreeMap<String, Vec<String>>,
    pub g: GraphJson,
    pub g_i: BTreeMap<String, GraphJson>,
    pub icause: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pip_adjustment: Option<PipReport>,
    /// pairs `[a, b]` with `a < b`
    pub preorder: Vec<[String; 2]>,
    pub rounds: usize,
    pub s: GraphJson,
    pub s_i: BTreeMap<String, GraphJson>,
    pub trace: Vec<RoundReport>,
}

fn set_map(g: &Bdmg, sets: &[NodeSet]) -> BTreeMap<String, Vec<String>> {
    sets.iter()
        .enumerate()
        .map(|(k, s)| (g.name(k).to_string(), g.labels(*s)))
        .collect()
}

fn graph_map(graphs: &[Bdmg]) -> BTreeMap<String, GraphJson> {
    graphs
        .iter()
        .enumerate()
        .map(|(i, g)| (g.name(i).to_string(), g.to_json_value()))
        .collect()
}

impl DerivationReport {
    pub fn new(d: &CausalDerivation) -> Self {
        let g = &d.s;
        let n = g.node_count();
        let mut preorder = Vec::new();
        for k in 0..n {
            for i in d.relations.below[k].iter() {
                preorder.push([g.name(i).to_string(), g.name(k).to_string()]);
            }
        }
        preorder.sort();
        DerivationReport {
            cause: set_map(g, &d.relations.cause),
            cc: set_map(g, &d.relations.cc),
            dcause: set_map(g, &d.dcause),
            eff: set_map(g, &d.relations.eff),
            g: d.g.to_json_value(),
            g_i: graph_map(&d.g_i),
            icause: d
                .icause
                .iter()
                .enumerate()
                .map(|(i, row)| (g.name(i).to_string(), set_map(g, row)))
                .collect(),
            mode: d.mode,
            pip_adjustment: None,
            preorder,
            rounds: d.rounds,
            s: d.s.to_json_value(),
            s_i: graph_map(&d.s_i),
            trace: d
                .trace
                .iter()
                .enumerate()
                .map(|(r, sets)| RoundReport {
                    dcause: set_map(g, sets),
                    round: r + 1,
                })
                .collect(),
        }
    }

    pub fn with_pip(mut self, d: &CausalDerivation, adj: &PipAdjustment) -> Self {
        self.pip_adjustment = Some(PipReport::new(&d.s, adj));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derive::procedure::tests::simple_family;
    use crate::derive::{derive, pip_adjust};

    #[test]
    fn table_family_round_trip() {
        let fam = simple_family();
        let text = fam.to_json();
        let back = InterventionalFamily::from_json(&text).unwrap();
        assert_eq!(back, fam);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn oracle_family_parses() {
        let text = r#"{"oracle":{"ground_truth":{"nodes":["1","2","3"],"arrows":[["1","2"],["2","3"]]}}}"#;
        let fam = InterventionalFamily::from_json(text).unwrap();
        let d = derive(&fam, Mode::Iterative).unwrap();
        assert_eq!(d.g.arrow_count(), 2);
        let report = DerivationReport::new(&d).with_pip(&d, &pip_adjust(&fam, &d));
        let json = report.to_json();
        assert!(json.contains(r#""cause":{"1":[],"2":["1"],"3":["1","2"]}"#));
        assert!(json.contains(r#""rounds":2"#));
    }

    #[test]
    fn both_or_neither_is_rejected() {
        assert!(matches!(
            InterventionalFamily::from_json("{}"),
            Err(FamilyError::Json(_))
        ));
        assert!(matches!(
            InterventionalFamily::from_json(r#"{"bogus":1}"#),
            Err(FamilyError::Json(_))
        ));
    }
}
