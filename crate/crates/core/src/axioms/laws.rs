use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;

use crate::dist::{encode, JointTable};
use crate::nodeset::NodeSet;
use crate::rational;

/// Law of `target` given each positive context of `ctx`. Keys are context
/// values in ascending variable order; entries are target cells row-major.
pub(crate) fn conditional_laws(
    t: &JointTable,
    target: NodeSet,
    ctx: NodeSet,
) -> BTreeMap<Vec<usize>, Vec<BigRational>> {
    let all = target.union(ctx);
    let m = t.marginal(all).expect("query variables belong to the table");
    let members: Vec<usize> = all.iter().collect();
    let target_cards: Vec<usize> = target.iter().map(|v| t.cards()[v]).collect();
    let width: usize = target_cards.iter().product();
    let mut acc: BTreeMap<Vec<usize>, Vec<BigUint>> = BTreeMap::new();
    for cell in 0..m.len() {
        let w = &m.weights()[cell];
        if w.is_zero() {
            continue;
        }
        let values = m.decode(cell);
        let mut c = Vec::new();
        let mut x = Vec::new();
        for (v, &val) in members.iter().zip(&values) {
            if ctx.contains(*v) {
                c.push(val);
            } else {
                x.push(val);
            }
        }
        let slot = acc.entry(c).or_insert_with(|| vec![BigUint::zero(); width]);
        slot[encode(&target_cards, &x)] += w;
    }
    acc.into_iter()
        .map(|(c, ws)| {
            let total: BigUint = ws.iter().sum();
            (c, ws.iter().map(|w| rational::from_ratio(w, &total)).collect())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LawMismatch {
    pub ctx_vars: NodeSet,
    pub ctx_values: Vec<usize>,
    pub target_values: Vec<usize>,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

/// Compares `Q(target | lhs_ctx)` with `P(target | rhs_ctx)`, `rhs_ctx ⊆ lhs_ctx`,
/// on contexts positive under both.
pub(crate) fn compare_laws(
    q: &JointTable,
    p: &JointTable,
    target: NodeSet,
    lhs_ctx: NodeSet,
    rhs_ctx: NodeSet,
) -> Vec<LawMismatch> {
    let left = conditional_laws(q, target, lhs_ctx);
    let right = conditional_laws(p, target, rhs_ctx);
    let lhs_vars: Vec<usize> = lhs_ctx.iter().collect();
    let target_cards: Vec<usize> = target.iter().map(|v| q.cards()[v]).collect();
    let mut out = Vec::new();
    for (c, law) in &left {
        let projected: Vec<usize> = lhs_vars
            .iter()
            .zip(c)
            .filter(|(v, _)| rhs_ctx.contains(**v))
            .map(|(_, &x)| x)
            .collect();
        let Some(other) = right.get(&projected) else {
            continue;
        };
        for (cell, (a, b)) in law.iter().zip(other).enumerate() {
            if a != b {
                out.push(LawMismatch {
                    ctx_vars: lhs_ctx,
                    ctx_values: c.clone(),
                    target_values: crate::dist::decode(&target_cards, cell),
                    lhs: a.clone(),
                    rhs: b.clone(),
                });
            }
        }
    }
    out
}
