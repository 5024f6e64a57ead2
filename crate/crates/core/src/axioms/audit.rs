use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::laws::conditional_laws;
use super::AxiomError;
use crate::derive::{CausalDerivation, FamilyError, InterventionalFamily};
use crate::nodeset::NodeSet;
use crate::scm::Scm;

/// Both readings of the edge-cause clauses for one arrow `i -> j` of the SCM graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeAudit {
    pub i: String,
    pub j: String,
    /// `i ⊥ j` under `P_do(i)`
    pub cause_ci: bool,
    /// every `x_i` pushes the law of the other parents through `φ_j` to the law of `X_j`
    pub cause_pushforward: bool,
    /// `i ⊥ j | ιcause_i(j) \ {i}`, when that set covers the other parents of `j`
    pub direct_ci: Option<bool>,
    pub direct_pushforward: Option<bool>,
}

impl EdgeAudit {
    pub fn agrees(&self) -> bool {
        self.cause_ci == self.cause_pushforward && self.direct_ci == self.direct_pushforward
    }
}

/// Law of `φ_j(x, ε_j)` with `ε_j` drawn from its marginal.
fn pushforward(scm: &Scm, eps: &[BigRational], j: usize, x: &[usize]) -> Vec<BigRational> {
    let mut law = vec![BigRational::zero(); scm.cards()[j]];
    for (e, w) in eps.iter().enumerate() {
        if !w.is_zero() {
            law[scm.evaluate(j, x, e)] += w;
        }
    }
    law
}

fn noise_law(scm: &Scm, j: usize) -> Result<Vec<BigRational>, AxiomError> {
    let comp = scm
        .components()
        .iter()
        .find(|c| c.nodes.contains(&j))
        .expect("every node owns a noise");
    let pos = comp.nodes.iter().position(|&v| v == j).expect("owner listed");
    let m = comp
        .table
        .marginal(NodeSet::singleton(pos))
        .map_err(FamilyError::from)?;
    Ok(m.probs())
}

/// Writes the values of the members of `set` (ascending) into `x`.
fn fill(x: &mut [usize], set: NodeSet, values: &[usize]) {
    for (v, &val) in set.iter().zip(values) {
        x[v] = val;
    }
}

/// Compares the CI form of the edge-cause clauses with the distributional
/// characterization through the mechanisms, for a family of standard
/// interventions on `scm`. The characterization assumes `ε_j` independent of
/// the parents of `j`, which holds when `j` has no arc.
pub fn edge_cause_audit(
    scm: &Scm,
    fam: &InterventionalFamily,
    d: &CausalDerivation,
) -> Result<Vec<EdgeAudit>, AxiomError> {
    let g = scm.graph();
    let n = g.node_count();
    let mut out = Vec::new();
    for (i, j) in g.arrows() {
        let q = fam.table(i)?;
        let eps = noise_law(scm, j)?;
        let others = g.parents(j).without(i);
        let si = NodeSet::singleton(i);
        let sj = NodeSet::singleton(j);

        let marginal_j = conditional_laws(q, sj, NodeSet::EMPTY)
            .into_values()
            .next()
            .expect("a table has positive mass");
        let d_laws = conditional_laws(q, others, si);
        let other_cards: Vec<usize> = others.iter().map(|v| scm.cards()[v]).collect();
        let mut cause_pushforward = true;
        let mut x = vec![0usize; n];
        for (xi, d_law) in &d_laws {
            x[i] = xi[0];
            let mut mix = vec![BigRational::zero(); scm.cards()[j]];
            for (cell, w) in d_law.iter().enumerate() {
                if w.is_zero() {
                    continue;
                }
                fill(&mut x, others, &crate::dist::decode(&other_cards, cell));
                for (m, p) in mix.iter_mut().zip(pushforward(scm, &eps, j, &x)) {
                    *m += w * p;
                }
            }
            if mix != marginal_j {
                cause_pushforward = false;
            }
        }
        let cause_ci = q.ci(si, sj, NodeSet::EMPTY).map_err(FamilyError::from)?;

        let s = d.icause[i][j].without(i).without(j);
        let (direct_ci, direct_pushforward) = if others.is_subset(s) {
            let j_laws = conditional_laws(q, sj, s);
            let i_laws = conditional_laws(q, si, s);
            let mut same = true;
            for (xs, law) in &j_laws {
                fill(&mut x, s, xs);
                let support = &i_laws[xs];
                for (xi, w) in support.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    x[i] = xi;
                    if &pushforward(scm, &eps, j, &x) != law {
                        same = false;
                    }
                }
            }
            (Some(q.ci(si, sj, s).map_err(FamilyError::from)?), Some(same))
        } else {
            (None, None)
        };
        out.push(EdgeAudit {
            i: g.name(i).to_string(),
            j: g.name(j).to_string(),
            cause_ci,
            cause_pushforward,
            direct_ci,
            direct_pushforward,
        });
    }
    Ok(out)
}
