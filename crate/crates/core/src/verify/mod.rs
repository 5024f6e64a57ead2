//! Random generators, faithful separation-oracle families and the theorem suites.

mod suites;

pub use suites::{run_case, run_suite, CaseOutcome, CaseRecord, Suite, SuiteResult};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::derive::InterventionalFamily;
use crate::dist::{encode, JointTable};
use crate::graph::Bdmg;
use crate::scm::{arc_components, Input, Mechanism, NoiseComponent, Scm, ScmError};

/// Largest graph the generators produce.
pub const MAX_NODES: usize = 10;

const RETRIES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("at most {MAX_NODES} nodes are supported, got {0}")]
    TooManyNodes(usize),
    #[error("density {0} is outside [0, 1]")]
    Density(f64),
    #[error("no {class} graph found after {RETRIES} attempts")]
    Unsatisfiable { class: GraphClass },
    #[error("random SCMs need an acyclic graph")]
    Cyclic,
    #[error("cards has {got} entries for {expected} nodes")]
    Cards { expected: usize, got: usize },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Scm(#[from] ScmError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphClass {
    Any,
    Admg,
    Ancestral,
    Dag,
    MaximalAncestral,
}

impl GraphClass {
    pub const ALL: [GraphClass; 5] = [
        GraphClass::Any,
        GraphClass::Admg,
        GraphClass::Ancestral,
        GraphClass::Dag,
        GraphClass::MaximalAncestral,
    ];

    fn name(self) -> &'static str {
        match self {
            GraphClass::Any => "any",
            GraphClass::Admg => "admg",
            GraphClass::Ancestral => "ancestral",
            GraphClass::Dag => "dag",
            GraphClass::MaximalAncestral => "maximal_ancestral",
        }
    }

    pub fn admits(self, g: &Bdmg) -> bool {
        match self {
            GraphClass::Any => g.is_bowless(),
            GraphClass::Admg => g.is_admg(),
            GraphClass::Ancestral => g.is_ancestral(),
            GraphClass::Dag => g.is_dag(),
            GraphClass::MaximalAncestral => g.is_ancestral() && g.is_maximal(),
        }
    }
}

impl fmt::Display for GraphClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        GraphClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown graph class `{s}`"))
    }
}

/// SplitMix64 step; used to derive independent per-case seeds.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn node_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// A random graph over `x1..xn` in the requested class.
///
/// Acyclic classes place arrows along a random order; `Any` draws every ordered
/// pair independently. Arcs only join pairs without an arrow, and for the
/// ancestral classes only pairs where neither node is an ancestor of the other.
/// `MaximalAncestral` then closes inseparable pairs with an edge.
pub fn random_bdmg(
    seed: u64,
    n: usize,
    arrow_density: f64,
    arc_density: f64,
    class: GraphClass,
) -> Result<Bdmg, VerifyError> {
    if n > MAX_NODES {
        return Err(VerifyError::TooManyNodes(n));
    }
    for d in [arrow_density, arc_density] {
        if !(0.0..=1.0).contains(&d) {
            return Err(VerifyError::Density(d));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRIES {
        let g = draw_graph(&mut rng, n, arrow_density, arc_density, class);
        if class.admits(&g) {
            return Ok(g);
        }
    }
    Err(VerifyError::Unsatisfiable { class })
}

fn draw_graph(rng: &mut ChaCha8Rng, n: usize, pa: f64, pb: f64, class: GraphClass) -> Bdmg {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arrows = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let forward = order.iter().position(|&x| x == a) < order.iter().position(|&x| x == b);
            if (class == GraphClass::Any || forward) && rng.gen_bool(pa) {
                arrows.push((a, b));
            }
        }
    }
    let base = Bdmg::new(node_names(n), arrows.clone(), Vec::new()).expect("arrows only");
    let mut arcs = Vec::new();
    if class != GraphClass::Dag {
        for a in 0..n {
            for b in (a + 1)..n {
                if base.adjacent(a, b) {
                    continue;
                }
                let ancestral = matches!(class, GraphClass::Ancestral | GraphClass::MaximalAncestral);
                if ancestral && (base.ancestors_of(a).contains(b) || base.ancestors_of(b).contains(a)) {
                    continue;
                }
                if rng.gen_bool(pb) {
                    arcs.push((a, b));
                }
            }
        }
    }
    let g = Bdmg::new(node_names(n), arrows.clone(), arcs.clone()).expect("arcs avoid arrows");
    if class != GraphClass::MaximalAncestral {
        return g;
    }
    // an inseparable pair gets an arrow along ancestry, otherwise an arc
    for (a, b) in g.inseparable_pairs() {
        if g.ancestors_of(b).contains(a) {
            arrows.push((a, b));
        } else if g.ancestors_of(a).contains(b) {
            arrows.push((b, a));
        } else {
            arcs.push((a, b));
        }
    }
    Bdmg::new(node_names(n), arrows, arcs).expect("closing edges join non-adjacent pairs")
}

/// A random SCM on an acyclic `g`.
///
/// Each node owns a noise `u_i` with `max(noise_card, cards[i])` values and
/// weights drawn from `1..=9`. Each arc carries a binary latent with positive
/// weights, shared by its two endpoints, so `e_i = (u_i, latents at i)`. For every
/// parent and latent configuration the map `u_i -> x_i` is onto, hence the joint
/// has full support.
pub fn random_scm(seed: u64, g: &Bdmg, cards: &[usize], noise_card: usize) -> Result<Scm, VerifyError> {
    let n = g.node_count();
    if cards.len() != n {
        return Err(VerifyError::Cards {
            expected: n,
            got: cards.len(),
        });
    }
    if g.has_directed_cycle() {
        return Err(VerifyError::Cyclic);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    let latent_w: Vec<[u32; 2]> = arcs
        .iter()
        .map(|_| [rng.gen_range(1..=9), rng.gen_range(1..=9)])
        .collect();
    let own: Vec<usize> = cards.iter().map(|&c| c.max(noise_card).max(1)).collect();
    let own_w: Vec<Vec<u32>> = own
        .iter()
        .map(|&u| (0..u).map(|_| rng.gen_range(1..=9)).collect())
        .collect();
    // arcs at each node, in arc order
    let at: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..arcs.len())
                .filter(|&a| arcs[a].0 == i || arcs[a].1 == i)
                .collect()
        })
        .collect();
    let noise_cards: Vec<usize> = (0..n).map(|i| own[i] << at[i].len()).collect();
    let noise_names: Vec<String> = g.names().iter().map(|x| format!("e_{x}")).collect();

    let mut components = Vec::new();
    for comp in arc_components(g) {
        let nodes: Vec<usize> = comp.iter().collect();
        let comp_arcs: Vec<usize> = (0..arcs.len()).filter(|&a| comp.contains(arcs[a].0)).collect();
        let ecards: Vec<usize> = nodes.iter().map(|&i| noise_cards[i]).collect();
        let mut weights = vec![BigUint::from(0u32); ecards.iter().product()];
        let mut free_cards: Vec<usize> = nodes.iter().map(|&i| own[i]).collect();
        free_cards.extend(comp_arcs.iter().map(|_| 2));
        let total: usize = free_cards.iter().product();
        for cell in 0..total {
            let vals = crate::dist::decode(&free_cards, cell);
            let (us, ls) = vals.split_at(nodes.len());
            let mut w = BigUint::from(1u32);
            for (pos, &i) in nodes.iter().enumerate() {
                w *= own_w[i][us[pos]];
            }
            for (pos, &a) in comp_arcs.iter().enumerate() {
                w *= latent_w[a][ls[pos]];
            }
            let e: Vec<usize> = nodes
                .iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let mut code = 0;
                    for &a in at[i].iter().rev() {
                        let slot = comp_arcs.iter().position(|&x| x == a).expect("arc in component");
                        code = code * 2 + ls[slot];
                    }
                    us[pos] + own[i] * code
                })
                .collect();
            weights[encode(&ecards, &e)] += w;
        }
        let vars = nodes.iter().map(|&i| (noise_names[i].clone(), noise_cards[i]));
        let table = JointTable::from_weights(vars, weights).map_err(ScmError::from)?;
        components.push(NoiseComponent { nodes, table });
    }

    let mut mechanisms = Vec::with_capacity(n);
    for i in 0..n {
        let parents: Vec<usize> = g.parents(i).iter().collect();
        let configs: usize = parents.iter().map(|&p| cards[p]).product::<usize>() << at[i].len();
        let mut table = Vec::with_capacity(configs * own[i]);
        for _ in 0..configs {
            let mut slots: Vec<usize> = (0..cards[i]).collect();
            slots.extend((cards[i]..own[i]).map(|_| rng.gen_range(0..cards[i])));
            slots.shuffle(&mut rng);
            table.extend(slots);
        }
        // parents, then the noise code (latents major, own noise minor)
        let mut inputs: Vec<Input> = parents.iter().map(|&p| Input::Parent(p)).collect();
        inputs.push(Input::Noise);
        mechanisms.push(Mechanism { inputs, table });
    }
    let scm = Scm::new(g.clone(), cards.to_vec(), noise_names, components, mechanisms)?;
    let report = scm.validate();
    if !report.valid {
        return Err(VerifyError::Scm(ScmError::Invalid(report.violations)));
    }
    Ok(scm)
}

/// The faithful family of `g`: `P_do(i)` answers by σ-separation in `g` with
/// arrows into `i` and arcs at `i` removed.
pub fn oracle_family(g: &Bdmg) -> InterventionalFamily {
    InterventionalFamily::oracle(g)
}

/// Random cardinalities in `lo..=hi`.
pub fn random_cards(seed: u64, n: usize, lo: usize, hi: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// A strictly positive random law for one variable.
pub fn random_marginal(seed: u64, name: &str, card: usize) -> JointTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<BigUint> = (0..card)
        .map(|_| BigUint::from(rng.gen_range(1u32..=9)))
        .collect();
    JointTable::from_weights([(name.to_string(), card)], w).expect("positive weights")
}

#[cfg(test)]
mod tests;
