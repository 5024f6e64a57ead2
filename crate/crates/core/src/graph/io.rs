use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Bdmg, GraphError};

/// Serialized graph: `{"arcs":[..],"arrows":[..],"nodes":[..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    #[serde(default)]
    pub arcs: Vec<(String, String)>,
    #[serde(default)]
    pub arrows: Vec<(String, String)>,
    pub nodes: Vec<String>,
}

impl GraphJson {
    pub fn to_graph(&self) -> Result<Bdmg, GraphError> {
        let names: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        Bdmg::from_labels(&names, &str_pairs(&self.arrows), &str_pairs(&self.arcs))
    }
}

impl Bdmg {
    pub fn to_json_value(&self) -> GraphJson {
        let label = |(a, b): (usize, usize)| (self.name(a).to_string(), self.name(b).to_string());
        GraphJson {
            nodes: self.names().to_vec(),
            arrows: self.arrows().map(label).collect(),
            arcs: self.arcs().map(label).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Bdmg, GraphError> {
        let parsed: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))?;
        parsed.to_graph()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("graph serializes")
    }

    /// Graphviz rendering; nodes in roster order, arrows then arcs in index order.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {} {{\n", quote(name));
        for n in self.names() {
            let _ = writeln!(out, "  {};", quote(n));
        }
        for (a, b) in self.arrows() {
            let _ = writeln!(out, "  {} -> {};", quote(self.name(a)), quote(self.name(b)));
        }
        for (a, b) in self.arcs() {
            let _ = writeln!(
                out,
                "  {} -> {} [dir=both];",
                quote(self.name(a)),
                quote(self.name(b))
            );
        }
        out.push_str("}\n");
        out
    }
}

fn str_pairs(v: &[(String, String)]) -> Vec<(&str, &str)> {
    v.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
