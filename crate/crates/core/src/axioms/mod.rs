//! Checkers relating an interventional family to an observational distribution.

mod audit;
mod laws;

pub use audit::{edge_cause_audit, EdgeAudit};

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::derive::{derive, CausalDerivation, FamilyError, InterventionalFamily, Mode};
use crate::dist::{check_property, JointTable, Property, PropertyScope};
use crate::graph::Bdmg;
use crate::nodeset::NodeSet;
use crate::rational;

use laws::{compare_laws, LawMismatch};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AxiomError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("family and distribution are not compatible ({} witnesses)", .0.count)]
    Incompatible(Box<AxiomReport>),
    #[error("the causal graph is not a DAG")]
    NotDag,
    #[error("no positive context for `{0}`")]
    MissingContext(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub context: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    pub lhs: String,
    pub rhs: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statement: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub value: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub clause: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub count: usize,
    pub holds: bool,
    pub skipped: Vec<Skipped>,
    pub witnesses: Vec<Witness>,
}

impl AxiomReport {
    fn new(axiom: &str, witnesses: Vec<Witness>, skipped: Vec<Skipped>) -> Self {
        AxiomReport {
            axiom: axiom.to_string(),
            count: witnesses.len(),
            holds: witnesses.is_empty() && skipped.is_empty(),
            skipped,
            witnesses,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn set_text(fam: &InterventionalFamily, set: NodeSet) -> String {
    let names: Vec<&str> = set.iter().map(|v| fam.roster()[v].as_str()).collect();
    format!("{{{}}}", names.join(","))
}

fn ci_text(fam: &InterventionalFamily, a: usize, b: usize, c: NodeSet, under: Option<usize>) -> String {
    let r = fam.roster();
    let dist = match under {
        Some(i) => format!("P_do({})", r[i]),
        None => "P".to_string(),
    };
    format!("{} ⊥ {} | {} under {}", r[a], r[b], set_text(fam, c), dist)
}

fn word(indep: bool) -> String {
    if indep { "indep" } else { "dep" }.to_string()
}

struct Ctx<'a> {
    fam: &'a InterventionalFamily,
    d: CausalDerivation,
    p: JointTable,
}

impl<'a> Ctx<'a> {
    fn new(fam: &'a InterventionalFamily, p: &JointTable) -> Result<Self, AxiomError> {
        let p = fam.align(p)?;
        let d = derive(fam, Mode::Iterative)?;
        Ok(Ctx { fam, d, p })
    }

    fn with(fam: &'a InterventionalFamily, d: &CausalDerivation, p: &JointTable) -> Result<Self, AxiomError> {
        Ok(Ctx {
            fam,
            d: d.clone(),
            p: fam.align(p)?,
        })
    }

    fn name(&self, v: usize) -> Option<String> {
        Some(self.fam.roster()[v].clone())
    }

    fn p_indep(&self, a: usize, b: usize, c: NodeSet) -> bool {
        self.p
            .ci_unchecked(NodeSet::singleton(a), NodeSet::singleton(b), c)
    }

    /// One observability clause in either direction. `forward` means
    /// interventional independence must imply observational independence.
    fn clause(&self, clause: &str, i: usize, j: usize, k: usize, forward: bool, out: &mut Vec<Witness>) {
        let pair = NodeSet::singleton(j).with(k);
        let ic = self.d.icause_of_set(i, pair);
        let cc = self.d.relations.cause_of_set(pair);
        let do_indep = self.fam.independent_pair(i, j, k, ic);
        let p_indep = self.p_indep(j, k, cc);
        let (lhs, rhs) = if forward {
            (do_indep, p_indep)
        } else {
            (p_indep, do_indep)
        };
        if lhs && !rhs {
            let (ls, rs) = if forward {
                (
                    ci_text(self.fam, j, k, ic, Some(i)),
                    ci_text(self.fam, j, k, cc, None),
                )
            } else {
                (
                    ci_text(self.fam, j, k, cc, None),
                    ci_text(self.fam, j, k, ic, Some(i)),
                )
            };
            out.push(Witness {
                clause: Some(clause.to_string()),
                i: self.name(i),
                j: self.name(j),
                k: self.name(k),
                lhs: word(lhs),
                rhs: word(rhs),
                statement: Some(format!("{ls} => {rs}")),
                ..Witness::default()
            });
        }
    }

    fn observability(&self, axiom: &str, forward: bool) -> AxiomReport {
        let n = self.fam.len();
        let mut witnesses = Vec::new();
        let arc_clause = format!("{axiom}a");
        let edge_clause = format!("{axiom}b");
        for j in 0..n {
            for k in (j + 1)..n {
                // the forward direction only constrains separable pairs of G
                if forward && !self.d.g.is_separable(j, k) {
                    continue;
                }
                for i in (0..n).filter(|&i| i != j && i != k) {
                    self.clause(&arc_clause, i, j, k, forward, &mut witnesses);
                }
            }
        }
        for k in 0..n {
            for i in self.d.relations.cause[k].iter() {
                self.clause(&edge_clause, i, i, k, forward, &mut witnesses);
            }
        }
        AxiomReport::new(axiom, witnesses, Vec::new())
    }
}

/// Axiom 2: independence under an intervention carries over to `P`.
pub fn check_observable(fam: &InterventionalFamily, p: &JointTable) -> Result<AxiomReport, AxiomError> {
    Ok(Ctx::new(fam, p)?.observability("A2", true))
}

pub fn check_observable_with(
    fam: &InterventionalFamily,
    d: &CausalDerivation,
    p: &JointTable,
) -> Result<AxiomReport, AxiomError> {
    Ok(Ctx::with(fam, d, p)?.observability("A2", true))
}

/// Axiom 3: independence in `P` carries over to every intervention. A strongly
/// observable family also needs [`check_observable`] to hold.
pub fn check_strongly_observable(
    fam: &InterventionalFamily,
    p: &JointTable,
) -> Result<AxiomReport, AxiomError> {
    Ok(Ctx::new(fam, p)?.observability("A3", false))
}

pub fn check_strongly_observable_with(
    fam: &InterventionalFamily,
    d: &CausalDerivation,
    p: &JointTable,
) -> Result<AxiomReport, AxiomError> {
    Ok(Ctx::with(fam, d, p)?.observability("A3", false))
}

fn context_map(fam: &InterventionalFamily, vars: NodeSet, values: &[usize]) -> BTreeMap<String, usize> {
    vars.iter()
        .zip(values)
        .map(|(v, &x)| (fam.roster()[v].clone(), x))
        .collect()
}

/// Supports of `P_do(i)` and `P` agree on `cause(k) ∪ {k}` for all distinct `i, k`.
pub fn check_compatible(fam: &InterventionalFamily, p: &JointTable) -> Result<AxiomReport, AxiomError> {
    let p = fam.align(p)?;
    let rel = crate::derive::cause_relations(fam);
    let n = fam.len();
    let mut witnesses = Vec::new();
    for i in 0..n {
        let q = fam.table(i)?;
        for k in (0..n).filter(|&k| k != i) {
            let set = rel.cause[k].with(k);
            let mq = q.marginal(set).map_err(FamilyError::from)?;
            let mp = p.marginal(set).map_err(FamilyError::from)?;
            for cell in 0..mq.len() {
                let (a, b) = (
                    mq.weights()[cell] != 0u32.into(),
                    mp.weights()[cell] != 0u32.into(),
                );
                if a != b {
                    let pos = |x: bool| if x { "positive" } else { "null" }.to_string();
                    witnesses.push(Witness {
                        context: context_map(fam, set, &mq.decode(cell)),
                        i: Some(fam.roster()[i].clone()),
                        k: Some(fam.roster()[k].clone()),
                        lhs: pos(a),
                        rhs: pos(b),
                        ..Witness::default()
                    });
                }
            }
        }
    }
    Ok(AxiomReport::new("compatible", witnesses, Vec::new()))
}

fn law_witnesses(
    fam: &InterventionalFamily,
    i: usize,
    j: Option<usize>,
    k: usize,
    target: NodeSet,
    mismatches: Vec<LawMismatch>,
    out: &mut Vec<Witness>,
) {
    for m in mismatches {
        out.push(Witness {
            context: context_map(fam, m.ctx_vars, &m.ctx_values),
            i: Some(fam.roster()[i].clone()),
            j: j.map(|j| fam.roster()[j].clone()),
            k: Some(fam.roster()[k].clone()),
            lhs: rational::format(&m.lhs),
            rhs: rational::format(&m.rhs),
            value: context_map(fam, target, &m.target_values),
            ..Witness::default()
        });
    }
}

fn require_compatible(fam: &InterventionalFamily, p: &JointTable) -> Result<(), AxiomError> {
    let report = check_compatible(fam, p)?;
    if report.holds {
        Ok(())
    } else {
        Err(AxiomError::Incompatible(Box::new(report)))
    }
}

/// Axiom 4: `P_do(i)^k(· | x_cause(k)\{i}, x_i)` matches the corresponding law under `P`.
pub fn check_quantifiable(fam: &InterventionalFamily, p: &JointTable) -> Result<AxiomReport, AxiomError> {
    require_compatible(fam, p)?;
    let p = fam.align(p)?;
    let rel = crate::derive::cause_relations(fam);
    let n = fam.len();
    let mut witnesses = Vec::new();
    for i in 0..n {
        let q = fam.table(i)?;
        for k in (0..n).filter(|&k| k != i) {
            let c = rel.cause[k].without(i);
            let target = NodeSet::singleton(k);
            let rhs_ctx = if rel.cause[k].contains(i) { c.with(i) } else { c };
            let m = compare_laws(q, &p, target, c.with(i), rhs_ctx);
            law_witnesses(fam, i, None, k, target, m, &mut witnesses);
        }
    }
    Ok(AxiomReport::new("A4", witnesses, Vec::new()))
}

/// `P_do(i)^k(· | x_cause(k)) = P^k(· | x_cause(k))` for all `i ≠ k`, the form of
/// Axiom 4 with `x_i` dropped from the context.
pub fn check_cause_identity(fam: &InterventionalFamily, p: &JointTable) -> Result<AxiomReport, AxiomError> {
    require_compatible(fam, p)?;
    let p = fam.align(p)?;
    let rel = crate::derive::cause_relations(fam);
    let n = fam.len();
    let mut witnesses = Vec::new();
    for i in 0..n {
        let q = fam.table(i)?;
        for k in (0..n).filter(|&k| k != i) {
            let target = NodeSet::singleton(k);
            let m = compare_laws(q, &p, target, rel.cause[k], rel.cause[k]);
            law_witnesses(fam, i, None, k, target, m, &mut witnesses);
        }
    }
    Ok(AxiomReport::new("A4_identity", witnesses, Vec::new()))
}

/// Which pairs the bivariate check visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairScope {
    /// pairs where neither causes the other
    #[default]
    Axiom,
    /// every pair, as an audit
    AllPairs,
}

/// Axiom 5: bivariate version of Axiom 4 over pairs `{j, k}`.
pub fn check_bivariate_quantifiable(
    fam: &InterventionalFamily,
    p: &JointTable,
    scope: PairScope,
) -> Result<AxiomReport, AxiomError> {
    require_compatible(fam, p)?;
    let p = fam.align(p)?;
    let rel = crate::derive::cause_relations(fam);
    let n = fam.len();
    let mut witnesses = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            if scope == PairScope::Axiom && (rel.cause[k].contains(j) || rel.cause[j].contains(k)) {
                continue;
            }
            let pair = NodeSet::singleton(j).with(k);
            let dset = rel.cause_of_set(pair);
            for i in (0..n).filter(|&i| i != j && i != k) {
                let q = fam.table(i)?;
                let m = if dset.contains(i) {
                    compare_laws(q, &p, pair, dset, dset)
                } else {
                    compare_laws(q, &p, pair, dset.with(i), dset)
                };
                law_witnesses(fam, i, Some(j), k, pair, m, &mut witnesses);
            }
        }
    }
    let axiom = match scope {
        PairScope::Axiom => "A5",
        PairScope::AllPairs => "A5_all_pairs",
    };
    Ok(AxiomReport::new(axiom, witnesses, Vec::new()))
}

/// Every arrow `i -> j` of `g` is a dependence under `P_do(i)`, both marginally
/// and given the intervened causes of `j`.
pub fn check_edge_cause(fam: &InterventionalFamily, g: &Bdmg) -> Result<AxiomReport, AxiomError> {
    let d = derive(fam, Mode::Iterative)?;
    check_edge_cause_with(fam, &d, g)
}

pub fn check_edge_cause_with(
    fam: &InterventionalFamily,
    d: &CausalDerivation,
    g: &Bdmg,
) -> Result<AxiomReport, AxiomError> {
    let g = g
        .reordered(fam.roster())
        .map_err(|_| FamilyError::RosterMismatch("graph and family have different nodes".into()))?;
    let mut witnesses = Vec::new();
    for (i, j) in g.arrows() {
        let c = d.icause[i][j].without(i);
        let marginal = !fam.independent_pair(i, i, j, NodeSet::EMPTY);
        let given = !fam.independent_pair(i, i, j, c);
        for (ok, cond) in [(marginal, NodeSet::EMPTY), (given, c)] {
            if !ok {
                witnesses.push(Witness {
                    i: Some(fam.roster()[i].clone()),
                    j: Some(fam.roster()[j].clone()),
                    lhs: "arrow".into(),
                    rhs: "indep".into(),
                    statement: Some(ci_text(fam, i, j, cond, Some(i))),
                    ..Witness::default()
                });
            }
        }
    }
    Ok(AxiomReport::new("edge_cause", witnesses, Vec::new()))
}

/// Same causes, and every dcause and arc test agrees when each family uses
/// its own intervened causes.
pub fn check_congruent(
    a: &InterventionalFamily,
    b: &InterventionalFamily,
) -> Result<AxiomReport, AxiomError> {
    if a.roster() != b.roster() {
        return Err(FamilyError::RosterMismatch(format!("{:?} vs {:?}", a.roster(), b.roster())).into());
    }
    let da = derive(a, Mode::Iterative)?;
    let db = derive(b, Mode::Iterative)?;
    let n = a.len();
    let r = a.roster();
    let mut witnesses = Vec::new();
    for k in 0..n {
        if da.relations.cause[k] != db.relations.cause[k] {
            witnesses.push(Witness {
                clause: Some("causes".into()),
                k: Some(r[k].clone()),
                lhs: set_text(a, da.relations.cause[k]),
                rhs: set_text(b, db.relations.cause[k]),
                ..Witness::default()
            });
        }
    }
    let mut compare = |clause: &str, i: usize, j: usize, k: usize| {
        let pair = NodeSet::singleton(j).with(k);
        let ca = da.icause_of_set(i, pair);
        let cb = db.icause_of_set(i, pair);
        let x = a.independent_pair(i, j, k, ca);
        let y = b.independent_pair(i, j, k, cb);
        if x != y {
            witnesses.push(Witness {
                clause: Some(clause.into()),
                i: Some(r[i].clone()),
                j: Some(r[j].clone()),
                k: Some(r[k].clone()),
                lhs: word(x),
                rhs: word(y),
                statement: Some(format!(
                    "{} vs {}",
                    ci_text(a, j, k, ca, Some(i)),
                    ci_text(b, j, k, cb, Some(i))
                )),
                ..Witness::default()
            });
        }
    };
    for k in 0..n {
        for i in da.relations.cause[k].intersection(db.relations.cause[k]).iter() {
            compare("edge", i, i, k);
        }
    }
    for j in 0..n {
        for k in (j + 1)..n {
            for i in (0..n).filter(|&i| i != j && i != k) {
                compare("arc", i, j, k);
            }
        }
    }
    Ok(AxiomReport::new("congruent", witnesses, Vec::new()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reconstruction {
    /// `P̂`, the product of the causal conditionals
    pub table: JointTable,
    /// which intervention supplied each node's conditional
    pub sources: Vec<usize>,
    /// comparison against a reference `P`, when given
    pub matches: Option<bool>,
    pub mismatched_cells: usize,
    /// whether the reference satisfies composition; a failure explains a mismatch
    pub reference_composition: Option<bool>,
}

/// Rebuilds `P` as `∏_k P_do(i)^k(x_k | x_cause(k))` for a DAG causal graph.
pub fn reconstruct_p(
    fam: &InterventionalFamily,
    d: &CausalDerivation,
    reference: Option<&JointTable>,
) -> Result<Reconstruction, AxiomError> {
    if !d.g.is_dag() {
        return Err(AxiomError::NotDag);
    }
    let n = fam.len();
    let cards = fam
        .cards()
        .ok_or_else(|| FamilyError::Capability("reconstruction needs table-backed distributions".into()))?
        .to_vec();
    let mut sources = Vec::with_capacity(n);
    let mut conds = Vec::with_capacity(n);
    for k in 0..n {
        let c = d.relations.cause[k];
        let mut chosen = None;
        for i in (0..n).filter(|&i| i != k) {
            let law = laws::conditional_laws(fam.table(i)?, NodeSet::singleton(k), c);
            let full = c.iter().map(|v| cards[v]).product::<usize>();
            if law.len() == full {
                chosen = Some((i, law));
                break;
            }
        }
        let (i, law) = chosen.ok_or_else(|| AxiomError::MissingContext(fam.roster()[k].clone()))?;
        sources.push(i);
        conds.push(law);
    }
    let len: usize = cards.iter().product();
    let mut probs = Vec::with_capacity(len);
    for cell in 0..len {
        let x = crate::dist::decode(&cards, cell);
        let mut prob = BigRational::from_integer(1.into());
        for k in 0..n {
            let ctx: Vec<usize> = d.relations.cause[k].iter().map(|v| x[v]).collect();
            prob *= conds[k][&ctx][x[k]].clone();
        }
        probs.push(prob);
    }
    let vars: Vec<(String, usize)> = fam.roster().iter().cloned().zip(cards.iter().copied()).collect();
    let table = JointTable::from_probs(vars, &probs).map_err(FamilyError::from)?;
    let (matches, mismatched_cells, reference_composition) = match reference {
        Some(p) => {
            let p = fam.align(p)?;
            let diff = (0..len).filter(|&c| p.prob(c) != table.prob(c)).count();
            let comp = check_property(&p, Property::Composition, None, PropertyScope::Singleton)
                .map(|r| r.holds())
                .ok();
            (Some(diff == 0), diff, comp)
        }
        None => (None, 0, None),
    };
    Ok(Reconstruction {
        table,
        sources,
        matches,
        mismatched_cells,
        reference_composition,
    })
}

#[cfg(test)]
mod tests;
