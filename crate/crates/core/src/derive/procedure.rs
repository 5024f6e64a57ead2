use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{FamilyError, InterventionalFamily};
use crate::dist::{check_property, Property, PropertyScope};
use crate::graph::Bdmg;
use crate::nodeset::NodeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Iterative,
    AncestralShortcut,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Iterative => "iterative",
            Mode::AncestralShortcut => "ancestral_shortcut",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "iterative" => Ok(Mode::Iterative),
            "ancestral_shortcut" | "shortcut" => Ok(Mode::AncestralShortcut),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// How an arc of `G_i` is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcRule {
    /// dependence given the intervened causes of the pair
    #[default]
    Standard,
    /// dependence given every set avoiding `i, j, k`
    EveryC,
}

impl FromStr for ArcRule {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(ArcRule::Standard),
            "every_c" | "every_C" => Ok(ArcRule::EveryC),
            other => Err(format!("unknown arc rule `{other}`")),
        }
    }
}

/// Which intervened graphs must carry an arc for `G` to carry it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcPolicy {
    #[default]
    EveryI,
    SomeI,
}

impl FromStr for ArcPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "every_i" => Ok(ArcPolicy::EveryI),
            "some_i" => Ok(ArcPolicy::SomeI),
            other => Err(format!("unknown arc policy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauseRelations {
    pub cause: Vec<NodeSet>,
    pub eff: Vec<NodeSet>,
    /// causal cycle of each node, the node included
    pub cc: Vec<NodeSet>,
    /// `below[k]` holds every `i` with `i < k`, i.e. `k` causes `i` but not conversely
    pub below: Vec<NodeSet>,
}

impl CauseRelations {
    /// `i < k` in the causal preorder.
    pub fn less(&self, i: usize, k: usize) -> bool {
        self.below[k].contains(i)
    }

    /// Causes of a set, excluding its members.
    pub fn cause_of_set(&self, set: NodeSet) -> NodeSet {
        set.iter()
            .fold(NodeSet::EMPTY, |acc, k| acc.union(self.cause[k]))
            .minus(set)
    }
}

pub fn cause_relations(fam: &InterventionalFamily) -> CauseRelations {
    let n = fam.len();
    let mut cause = vec![NodeSet::EMPTY; n];
    let mut eff = vec![NodeSet::EMPTY; n];
    for i in 0..n {
        for k in 0..n {
            if i != k && !fam.independent_pair(i, i, k, NodeSet::EMPTY) {
                cause[k].insert(i);
                eff[i].insert(k);
            }
        }
    }
    let cc = (0..n).map(|i| cause[i].intersection(eff[i]).with(i)).collect();
    let below = (0..n).map(|k| eff[k].minus(cause[k])).collect();
    CauseRelations {
        cause,
        eff,
        cc,
        below,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitivityReport {
    /// Axiom 1 holds
    pub holds: bool,
    /// `(i, j, k)` with `i ∈ cause(j)`, `j ∈ cause(k)`, `i ∉ cause(k)`
    pub violations: Vec<(usize, usize, usize)>,
    /// per source, whether it is singleton-transitive
    pub singleton_transitive: Vec<bool>,
    /// `(i, j, k)` failing `i ⊥ k | j` under `P_do(i)`
    pub condition_a: Vec<(usize, usize, usize)>,
    /// `(i, j, k)` failing `j ⊥̸ k` under `P_do(i)`
    pub condition_b: Vec<(usize, usize, usize)>,
    pub sufficient_conditions_hold: bool,
}

pub fn check_transitivity(fam: &InterventionalFamily) -> TransitivityReport {
    let n = fam.len();
    let rel = cause_relations(fam);
    let cause = &rel.cause;
    let mut violations = Vec::new();
    let mut condition_a = Vec::new();
    let mut condition_b = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k {
                    continue;
                }
                if cause[j].contains(i) && cause[k].contains(j) && !cause[k].contains(i) {
                    violations.push((i, j, k));
                }
                if !cause[k].contains(i) && cause[k].contains(j) {
                    if !fam.independent_pair(i, i, k, NodeSet::singleton(j)) {
                        condition_a.push((i, j, k));
                    }
                    if fam.independent_pair(i, j, k, NodeSet::EMPTY) {
                        condition_b.push((i, j, k));
                    }
                }
            }
        }
    }
    let singleton_transitive: Vec<bool> = fam
        .sources()
        .iter()
        .map(|s| {
            check_property(s, Property::SingletonTransitivity, None, PropertyScope::Singleton)
                .map(|r| r.holds())
                .unwrap_or(false)
        })
        .collect();
    let sufficient_conditions_hold =
        singleton_transitive.iter().all(|&b| b) && condition_a.is_empty() && condition_b.is_empty();
    TransitivityReport {
        holds: violations.is_empty(),
        violations,
        singleton_transitive,
        condition_a,
        condition_b,
        sufficient_conditions_hold,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalDerivation {
    pub mode: Mode,
    pub relations: CauseRelations,
    pub dcause: Vec<NodeSet>,
    /// `icause[i][k]`
    pub icause: Vec<Vec<NodeSet>>,
    pub s: Bdmg,
    pub s_i: Vec<Bdmg>,
    pub g_i: Vec<Bdmg>,
    pub g: Bdmg,
    pub rounds: usize,
    /// `dcause` after each round
    pub trace: Vec<Vec<NodeSet>>,
}

impl CausalDerivation {
    pub fn cause(&self, k: usize) -> NodeSet {
        self.relations.cause[k]
    }

    /// `ιcause_i(A)`: ancestors of `A` in `S_i`, excluding `A`.
    pub fn icause_of_set(&self, i: usize, set: NodeSet) -> NodeSet {
        self.s_i[i].ancestors(set)
    }
}

fn arrows_graph(fam: &InterventionalFamily, dcause: &[NodeSet]) -> Bdmg {
    let arrows: Vec<(usize, usize)> = dcause
        .iter()
        .enumerate()
        .flat_map(|(k, d)| d.iter().map(move |i| (i, k)))
        .collect();
    fam.empty_graph()
        .with_edges(arrows, [])
        .expect("arrow-only graphs have no bows")
}

pub fn derive(fam: &InterventionalFamily, mode: Mode) -> Result<CausalDerivation, FamilyError> {
    let n = fam.len();
    let relations = cause_relations(fam);
    let cause = relations.cause.clone();
    let (dcause, s, trace) = match mode {
        Mode::Iterative => {
            let mut dcause = cause.clone();
            let mut icause = vec![cause.clone(); n];
            let mut s = fam.empty_graph();
            let mut trace = Vec::new();
            loop {
                let next: Vec<NodeSet> = (0..n)
                    .map(|k| {
                        dcause[k]
                            .iter()
                            .filter(|&i| !fam.independent_pair(i, i, k, icause[i][k].without(i)))
                            .fold(NodeSet::EMPTY, NodeSet::with)
                    })
                    .collect();
                let next_s = arrows_graph(fam, &next);
                let changed = next_s != s;
                trace.push(next.clone());
                dcause = next;
                s = next_s;
                for (i, row) in icause.iter_mut().enumerate() {
                    let s_i = s.intervened(i);
                    for (k, slot) in row.iter_mut().enumerate() {
                        *slot = s_i.ancestors_of(k);
                    }
                }
                if !changed {
                    break;
                }
            }
            (dcause, s, trace)
        }
        Mode::AncestralShortcut => {
            let dcause: Vec<NodeSet> = (0..n)
                .map(|k| {
                    cause[k]
                        .iter()
                        .filter(|&i| !fam.independent_pair(i, i, k, cause[k].without(i)))
                        .fold(NodeSet::EMPTY, NodeSet::with)
                })
                .collect();
            let s = arrows_graph(fam, &dcause);
            (dcause.clone(), s, vec![dcause])
        }
    };
    let s_i: Vec<Bdmg> = (0..n).map(|i| s.intervened(i)).collect();
    let icause: Vec<Vec<NodeSet>> = s_i
        .iter()
        .map(|g| (0..n).map(|k| g.ancestors_of(k)).collect())
        .collect();
    let rounds = trace.len();
    let mut d = CausalDerivation {
        mode,
        relations,
        dcause,
        icause,
        s: s.clone(),
        g_i: s_i.clone(),
        s_i,
        g: s,
        rounds,
        trace,
    };
    d.g_i = (0..n)
        .map(|i| intervened_graph(fam, &d, i, ArcRule::Standard))
        .collect();
    d.g = combine(&d, ArcPolicy::EveryI);
    if mode == Mode::AncestralShortcut && !d.g.is_ancestral() {
        return Err(FamilyError::NotAncestral);
    }
    Ok(d)
}

fn arc_condition(fam: &InterventionalFamily, d: &CausalDerivation, i: usize, pair: NodeSet) -> NodeSet {
    match d.mode {
        Mode::Iterative => d.icause_of_set(i, pair),
        Mode::AncestralShortcut => d.relations.cause_of_set(pair),
    }
    .intersection(NodeSet::full(fam.len()))
}

fn intervened_graph(fam: &InterventionalFamily, d: &CausalDerivation, i: usize, rule: ArcRule) -> Bdmg {
    let n = fam.len();
    let mut arcs = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            if j == i || k == i || d.s.arrow_adjacent(j, k) {
                continue;
            }
            let dependent = match rule {
                ArcRule::Standard => {
                    let c = arc_condition(fam, d, i, NodeSet::singleton(j).with(k));
                    !fam.independent_pair(i, j, k, c)
                }
                ArcRule::EveryC => NodeSet::full(n)
                    .without(i)
                    .without(j)
                    .without(k)
                    .subsets()
                    .all(|c| !fam.independent_pair(i, j, k, c)),
            };
            if dependent {
                arcs.push((j, k));
            }
        }
    }
    d.s_i[i]
        .with_edges(d.s_i[i].arrows().collect::<Vec<_>>(), arcs)
        .expect("arcs join pairs that are not arrow-adjacent")
}

fn combine_graphs(s: &Bdmg, g_i: &[Bdmg], policy: ArcPolicy) -> Bdmg {
    let n = s.node_count();
    let mut arcs = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            if s.arrow_adjacent(j, k) {
                continue;
            }
            // quantifiers read literally: with no third node every-i holds, some-i fails
            let mut others = (0..n).filter(|&i| i != j && i != k);
            let present = match policy {
                ArcPolicy::EveryI => others.all(|i| g_i[i].has_arc(j, k)),
                ArcPolicy::SomeI => others.any(|i| g_i[i].has_arc(j, k)),
            };
            if present {
                arcs.push((j, k));
            }
        }
    }
    s.with_edges(s.arrows().collect::<Vec<_>>(), arcs)
        .expect("arcs join pairs that are not arrow-adjacent")
}

fn combine(d: &CausalDerivation, policy: ArcPolicy) -> Bdmg {
    combine_graphs(&d.s, &d.g_i, policy)
}

/// The causal graph under another arc rule or policy. Standard with every-`i`
/// reproduces `derivation.g`.
pub fn derive_variants(
    fam: &InterventionalFamily,
    derivation: &CausalDerivation,
    rule: ArcRule,
    policy: ArcPolicy,
) -> Result<Bdmg, FamilyError> {
    if fam.len() != derivation.s.node_count() {
        return Err(FamilyError::RosterMismatch(
            "derivation was built for another family".into(),
        ));
    }
    let g_i: Vec<Bdmg> = match rule {
        ArcRule::Standard => derivation.g_i.clone(),
        ArcRule::EveryC => (0..fam.len())
            .map(|i| intervened_graph(fam, derivation, i, rule))
            .collect(),
    };
    Ok(combine_graphs(&derivation.s, &g_i, policy))
}

/// `G(P)`: arrows of `S`, arcs between pairs that stay dependent under `P` given their causes.
pub fn graph_from_observation(
    fam: &InterventionalFamily,
    derivation: &CausalDerivation,
    p: &crate::dist::JointTable,
) -> Result<Bdmg, FamilyError> {
    let p = fam.align(p)?;
    let n = fam.len();
    let mut arcs = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            if derivation.s.arrow_adjacent(j, k) {
                continue;
            }
            let c = derivation.relations.cause_of_set(NodeSet::singleton(j).with(k));
            if !p.ci_unchecked(NodeSet::singleton(j), NodeSet::singleton(k), c) {
                arcs.push((j, k));
            }
        }
    }
    Ok(derivation
        .s
        .with_edges(derivation.s.arrows().collect::<Vec<_>>(), arcs)
        .expect("arcs join pairs that are not arrow-adjacent"))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::dist::tests::bits;
    use crate::dist::JointTable;

    fn names(g: &Bdmg, set: NodeSet) -> Vec<String> {
        g.labels(set)
    }

    pub(crate) fn nonmax() -> Bdmg {
        Bdmg::from_labels(
            &["i", "j", "k", "l", "h"],
            &[("l", "k"), ("h", "j")],
            &[("j", "l"), ("l", "h"), ("h", "k")],
        )
        .unwrap()
    }

    /// `(P_ind, P_ind, P)` with `X1, X2` dependent and `X3` independent of both.
    pub(crate) fn simple_family() -> InterventionalFamily {
        let vars = bits(&["1", "2", "3"]);
        let ind = JointTable::uniform(vars.clone()).unwrap();
        // X1 = X2 with prob 3/4, X3 a fair coin
        let p = JointTable::from_prob_strings(
            vars,
            &["3/16", "3/16", "1/16", "1/16", "1/16", "1/16", "3/16", "3/16"],
        )
        .unwrap();
        InterventionalFamily::from_tables(vec![ind.clone(), ind, p]).unwrap()
    }

    #[test]
    fn iterative_fixture_drops_i_to_k_in_round_two() {
        let g = crate::graph::tests::iterative_cycle();
        let fam = InterventionalFamily::oracle(&g);
        let d = derive(&fam, Mode::Iterative).unwrap();
        let (i, k) = (0, 2);
        assert!(d.trace[0][k].contains(i));
        assert!(!d.dcause[k].contains(i));
        assert_eq!(d.rounds, 3);
        // k and i stay inseparable under P_do(k): k -> l -> i, or the collider at l
        let l = 3;
        assert!(!fam.independent_pair(k, k, i, NodeSet::EMPTY));
        assert!(!fam.independent_pair(k, k, i, NodeSet::singleton(l)));
        let mut want: Vec<_> = g.arrows().collect();
        want.push((k, i));
        want.sort();
        assert_eq!(d.s.arrows().collect::<Vec<_>>(), want);
    }

    #[test]
    fn nonmax_arc_in_g_i_not_g_l() {
        let g = nonmax();
        let fam = InterventionalFamily::oracle(&g);
        let d = derive(&fam, Mode::Iterative).unwrap();
        let (i, j, k, l) = (0, 1, 2, 3);
        assert!(d.g_i[i].has_arc(j, k));
        assert!(!d.g_i[l].has_arc(j, k));
        assert!(!d.g.has_arc(j, k));
        assert_eq!(d.g, g);
    }

    #[test]
    fn product_family_is_empty_after_one_round() {
        let t = JointTable::uniform(bits(&["a", "b", "c"])).unwrap();
        let fam = InterventionalFamily::from_tables(vec![t.clone(), t.clone(), t]).unwrap();
        let d = derive(&fam, Mode::Iterative).unwrap();
        assert_eq!(d.rounds, 1);
        assert_eq!(d.g.arrow_count() + d.g.arc_count(), 0);
        for rule in [ArcRule::Standard, ArcRule::EveryC] {
            for policy in [ArcPolicy::EveryI, ArcPolicy::SomeI] {
                let v = derive_variants(&fam, &d, rule, policy).unwrap();
                assert_eq!(v.arc_count(), 0);
            }
        }
    }

    #[test]
    fn simple_example_places_one_arc() {
        let fam = simple_family();
        let d = derive(&fam, Mode::Iterative).unwrap();
        assert!(d.relations.cause.iter().all(|c| c.is_empty()));
        assert!(d.g.has_arc(0, 1));
        assert_eq!(d.g.arc_count(), 1);
        for policy in [ArcPolicy::EveryI, ArcPolicy::SomeI] {
            let v = derive_variants(&fam, &d, ArcRule::Standard, policy).unwrap();
            assert_eq!(v, d.g);
        }
        let p = fam.table(2).unwrap().clone();
        let gp = graph_from_observation(&fam, &d, &p).unwrap();
        assert_eq!(gp, d.g);
    }

    #[test]
    fn oracle_chain_is_recovered() {
        let g = Bdmg::from_labels(&["1", "2", "3"], &[("1", "2"), ("2", "3")], &[]).unwrap();
        let fam = InterventionalFamily::oracle(&g);
        let rel = cause_relations(&fam);
        assert_eq!(names(&g, rel.cause[2]), vec!["1", "2"]);
        assert!(rel.less(2, 0));
        assert!(!rel.less(0, 2));
        let d = derive(&fam, Mode::Iterative).unwrap();
        assert_eq!(d.g, g);
        let sc = derive(&fam, Mode::AncestralShortcut).unwrap();
        assert_eq!(sc.g, g);
        assert!(check_transitivity(&fam).holds);
    }

    #[test]
    fn shortcut_rejects_non_ancestral_result() {
        let g = Bdmg::from_labels(&["a", "b"], &[("a", "b"), ("b", "a")], &[]).unwrap();
        let fam = InterventionalFamily::oracle(&g);
        assert_eq!(
            derive(&fam, Mode::AncestralShortcut),
            Err(FamilyError::NotAncestral)
        );
        assert_eq!(derive(&fam, Mode::Iterative).unwrap().g, g);
    }

    #[test]
    fn intervened_graphs_have_nothing_at_the_target() {
        let fam = InterventionalFamily::oracle(&nonmax());
        let d = derive(&fam, Mode::Iterative).unwrap();
        for (i, gi) in d.g_i.iter().enumerate() {
            assert!(gi.parents(i).is_empty());
            assert!(gi.spouses(i).is_empty());
        }
    }
}
