use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    oracle_family, random_bdmg, random_cards, random_marginal, random_scm, split_seed, GraphClass,
    VerifyError,
};
use crate::axioms::{
    check_bivariate_quantifiable, check_cause_identity, check_compatible, check_congruent, check_edge_cause,
    check_observable, check_quantifiable, check_strongly_observable, reconstruct_p, PairScope,
};
use crate::ci::CiQuery;
use crate::derive::{check_transitivity, derive, graph_from_observation, InterventionalFamily, Mode};
use crate::dist::{check_property, markov_check, JointTable, MarkovKind, Property, PropertyScope};
use crate::graph::{Bdmg, EquivalenceMode};
use crate::nodeset::NodeSet;
use crate::scm::Scm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    SepEquiv,
    PipInsep,
    ScmMarkov,
    IntervenedMarkov,
    Exchange,
    ScmGraphEquality,
    QuantifiableChain,
    Uniqueness,
    TransitivitySufficiency,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::SepEquiv,
        Suite::PipInsep,
        Suite::ScmMarkov,
        Suite::IntervenedMarkov,
        Suite::Exchange,
        Suite::ScmGraphEquality,
        Suite::QuantifiableChain,
        Suite::Uniqueness,
        Suite::TransitivitySufficiency,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SepEquiv => "sep_equiv",
            Suite::PipInsep => "pip_insep",
            Suite::ScmMarkov => "scm_markov",
            Suite::IntervenedMarkov => "intervened_markov",
            Suite::Exchange => "exchange",
            Suite::ScmGraphEquality => "scm_graph_equality",
            Suite::QuantifiableChain => "quantifiable_chain",
            Suite::Uniqueness => "uniqueness",
            Suite::TransitivitySufficiency => "transitivity_sufficiency",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = VerifyError;
    fn from_str(s: &str) -> Result<Self, VerifyError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| VerifyError::UnknownSuite(s.to_string()))
    }
}

/// What one generated instance produced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CaseOutcome {
    /// the instance met the hypotheses of at least one asserted conclusion
    pub checked: bool,
    pub failures: Vec<String>,
    pub divergences: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseRecord {
    pub case: usize,
    pub detail: String,
    /// rerun with [`run_case`]
    pub replay_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub budget: usize,
    pub cases_checked: usize,
    pub cases_run: usize,
    pub expected_divergences: Vec<CaseRecord>,
    pub failures: Vec<CaseRecord>,
    pub filter_pass_rate: f64,
    pub seed: u64,
    pub suite: Suite,
    pub wall_time_ms: u64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("suite result serializes")
    }
}

/// Runs `budget` generated cases of the named suite.
pub fn run_suite(name: &str, seed: u64, budget: usize) -> Result<SuiteResult, VerifyError> {
    let suite: Suite = name.parse()?;
    let start = Instant::now();
    let outcomes: Vec<(usize, u64, CaseOutcome)> = (0..budget)
        .into_par_iter()
        .map(|case| {
            let s = split_seed(seed, case as u64);
            (case, s, run_case(suite, s))
        })
        .collect();
    let mut failures = Vec::new();
    let mut expected_divergences = Vec::new();
    let mut cases_checked = 0;
    for (case, replay_seed, out) in outcomes {
        cases_checked += usize::from(out.checked);
        let rec = |detail| CaseRecord {
            case,
            detail,
            replay_seed,
        };
        failures.extend(out.failures.into_iter().map(rec));
        expected_divergences.extend(out.divergences.into_iter().map(rec));
    }
    Ok(SuiteResult {
        budget,
        cases_checked,
        cases_run: budget,
        expected_divergences,
        failures,
        filter_pass_rate: if budget == 0 {
            0.0
        } else {
            cases_checked as f64 / budget as f64
        },
        seed,
        suite,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}

/// One case of `suite` from its own seed.
pub fn run_case(suite: Suite, seed: u64) -> CaseOutcome {
    let mut out = CaseOutcome::default();
    match suite {
        Suite::SepEquiv => sep_equiv(seed, &mut out),
        Suite::PipInsep => pip_insep(seed, &mut out),
        Suite::ScmMarkov => scm_markov(seed, &mut out),
        Suite::IntervenedMarkov => intervened_markov(seed, &mut out),
        Suite::Exchange => exchange(seed, &mut out),
        Suite::ScmGraphEquality => scm_graph_equality(seed, &mut out),
        Suite::QuantifiableChain => quantifiable_chain(seed, &mut out),
        Suite::Uniqueness => uniqueness(seed, &mut out),
        Suite::TransitivitySufficiency => transitivity_sufficiency(seed, &mut out),
    }
    out
}

fn set_label(g: &Bdmg, s: NodeSet) -> String {
    format!("{{{}}}", g.labels(s).join(","))
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Population shared by the two graph suites: up to six nodes, cycles allowed.
fn any_graph(seed: u64, max_n: usize) -> Bdmg {
    let mut rng = rng_for(seed);
    let n = rng.gen_range(2..=max_n);
    let pa = rng.gen_range(0.1..0.45);
    let pb = rng.gen_range(0.0..0.3);
    random_bdmg(split_seed(seed, 1), n, pa, pb, GraphClass::Any).expect("any class always succeeds")
}

/// A random SCM and its joint. Arcs are kept sparse so noise tables stay small.
fn scm_instance(seed: u64, class: GraphClass, min_n: usize, max_n: usize) -> (Scm, JointTable) {
    let mut rng = rng_for(seed);
    let n = rng.gen_range(min_n..=max_n);
    let pa = rng.gen_range(0.25..0.6);
    let pb = rng.gen_range(0.0..0.25);
    let g = random_bdmg(split_seed(seed, 1), n, pa, pb, class).expect("acyclic classes are satisfiable");
    let cards = random_cards(split_seed(seed, 2), n, 2, 3);
    let scm = random_scm(split_seed(seed, 3), &g, &cards, 0).expect("generated SCMs validate");
    let p = scm.joint().expect("valid SCM");
    (scm, p)
}

/// Oracle family of a small graph, or the canonical family of a small SCM.
enum Family {
    Oracle(Bdmg, InterventionalFamily),
    Table(Scm, JointTable, InterventionalFamily),
}

impl Family {
    fn draw(seed: u64) -> Family {
        if rng_for(seed).gen_bool(0.5) {
            let g = any_graph(split_seed(seed, 10), 5);
            let fam = oracle_family(&g);
            Family::Oracle(g, fam)
        } else {
            let (scm, p) = scm_instance(split_seed(seed, 11), GraphClass::Admg, 2, 4);
            let fam = scm.standard_family(&BTreeMap::new()).expect("valid SCM");
            Family::Table(scm, p, fam)
        }
    }

    fn fam(&self) -> &InterventionalFamily {
        match self {
            Family::Oracle(_, f) | Family::Table(_, _, f) => f,
        }
    }

    fn describe(&self) -> String {
        match self {
            Family::Oracle(g, _) => format!("oracle family of {}", g.to_json()),
            Family::Table(s, _, _) => format!("canonical family of the SCM on {}", s.graph().to_json()),
        }
    }
}

fn holds<Q: CiQuery + ?Sized>(q: &Q, p: Property) -> bool {
    check_property(q, p, None, PropertyScope::Singleton)
        .map(|r| r.holds())
        .unwrap_or(false)
}

fn compositional<Q: CiQuery + ?Sized>(q: &Q) -> bool {
    holds(q, Property::Intersection) && holds(q, Property::Composition)
}

fn global_markov<Q: CiQuery + ?Sized>(q: &Q, g: &Bdmg) -> Option<String> {
    let r = markov_check(q, g, MarkovKind::Global, PropertyScope::Singleton).ok()?;
    let v = r.violations.first()?;
    Some(format!(
        "{} ⊥ {} | {} is separated but dependent",
        set_label(g, v.a),
        set_label(g, v.b),
        set_label(g, v.c)
    ))
}

fn sep_equiv(seed: u64, out: &mut CaseOutcome) {
    let g = any_graph(seed, 6);
    out.checked = true;
    let acy = g.acyclify();
    let n = g.node_count();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (NodeSet::singleton(i), NodeSet::singleton(j));
            for c in g.all_nodes().without(i).without(j).subsets() {
                let fast = Bdmg::sigma_separated_with(&acy, a, b, c);
                let slow = g.sigma_separated_by_paths(a, b, c);
                if fast != slow {
                    out.failures.push(format!(
                        "{} vs {} given {}: acyclify+m says {fast}, path oracle says {slow} on {}",
                        g.name(i),
                        g.name(j),
                        set_label(&g, c),
                        g.to_json()
                    ));
                }
            }
        }
    }
}

fn pip_insep(seed: u64, out: &mut CaseOutcome) {
    let g = any_graph(seed, 6);
    out.checked = true;
    for (i, j) in g.inseparable_pairs() {
        if g.find_pips(i, j).map(|p| p.is_empty()).unwrap_or(true) {
            out.failures.push(format!(
                "inseparable pair {},{} has no PIP in {}",
                g.name(i),
                g.name(j),
                g.to_json()
            ));
        }
    }
    // recovery of the ground truth from its oracle family
    let d = derive(&oracle_family(&g), Mode::Iterative).expect("oracle families derive");
    if d.g == g {
        return;
    }
    if two_node_arc(&g, &d.g) {
        out.divergences.push(format!(
            "two nodes leave no third intervention to separate the pair of {}",
            g.to_json()
        ));
        return;
    }
    let maximal = g.is_maximal();
    if g.is_ancestral() && maximal {
        out.failures.push(format!(
            "derived {} differs from the maximal ancestral ground truth {}",
            d.g.to_json(),
            g.to_json()
        ));
        return;
    }
    if d.g
        .markov_equivalent(&g, EquivalenceMode::Singleton)
        .unwrap_or(false)
    {
        return;
    }
    let pairs: Vec<String> = differing_pairs(&g, &d.g)
        .into_iter()
        .map(|(a, b)| {
            let pips = g.find_pips(a, b).map(|p| p.len()).unwrap_or(0);
            format!("{},{} ({pips} PIPs)", g.name(a), g.name(b))
        })
        .collect();
    let msg = format!(
        "derived {} is not Markov equivalent to {}; differing pairs: {}",
        d.g.to_json(),
        g.to_json(),
        pairs.join("; ")
    );
    if g.is_ancestral() {
        out.failures.push(msg);
    } else if maximal {
        out.divergences
            .push(format!("maximal non-ancestral ground truth: {msg}"));
    } else {
        out.divergences.push(msg);
    }
}

/// Two nodes differing only by an arc: without a third node to intervene on,
/// the every-`i` arc rule holds vacuously.
fn two_node_arc(truth: &Bdmg, derived: &Bdmg) -> bool {
    truth.node_count() == 2
        && truth.arrow_count() == derived.arrow_count()
        && truth.arrows().eq(derived.arrows())
        && truth.arc_count() != derived.arc_count()
}

fn differing_pairs(a: &Bdmg, b: &Bdmg) -> Vec<(usize, usize)> {
    let n = a.node_count();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let same = a.has_arrow(i, j) == b.has_arrow(i, j)
                && a.has_arrow(j, i) == b.has_arrow(j, i)
                && a.has_arc(i, j) == b.has_arc(i, j);
            if !same {
                out.push((i, j));
            }
        }
    }
    out
}

fn scm_markov(seed: u64, out: &mut CaseOutcome) {
    let (scm, p) = scm_instance(seed, GraphClass::Admg, 2, 5);
    let g = scm.graph();
    out.checked = true;
    if let Some(v) = global_markov(&p, g) {
        out.failures.push(format!("joint: {v} on {}", g.to_json()));
    }
    for i in 0..g.node_count() {
        let repl = p.marginal(NodeSet::singleton(i)).expect("node of the joint");
        let q = scm
            .intervene_standard(i, &repl)
            .and_then(|s| s.joint())
            .expect("standard interventions stay valid");
        for (label, target) in [("intervened graph", g.intervened(i)), ("graph", g.clone())] {
            if let Some(v) = global_markov(&q, &target) {
                out.failures.push(format!(
                    "do({}) against the {label}: {v} on {}",
                    g.name(i),
                    g.to_json()
                ));
            }
        }
    }
}

fn intervened_markov(seed: u64, out: &mut CaseOutcome) {
    let family = Family::draw(seed);
    let fam = family.fam();
    if !check_transitivity(fam).holds {
        return;
    }
    let d = derive(fam, Mode::Iterative).expect("family derives");
    for i in 0..fam.len() {
        let src = fam.source(i);
        if !compositional(src) {
            continue;
        }
        out.checked = true;
        if let Some(v) = global_markov(src, &d.g_i[i]) {
            out.failures.push(format!(
                "P_do({}) is not Markov to G_{}: {v}; {}",
                fam.roster()[i],
                fam.roster()[i],
                family.describe()
            ));
        }
    }
    let Family::Table(_, p, _) = &family else {
        return;
    };
    if !compositional(p) {
        return;
    }
    let all_sources = fam.sources().iter().all(compositional);
    let observable = check_observable(fam, p).map(|r| r.holds).unwrap_or(false);
    let bivariate = d.g.is_ancestral()
        && all_sources
        && check_bivariate_quantifiable(fam, p, PairScope::Axiom)
            .map(|r| r.holds)
            .unwrap_or(false);
    if observable || bivariate {
        out.checked = true;
        if let Some(v) = global_markov(p, &d.g) {
            out.failures.push(format!(
                "P is not Markov to the causal graph {}: {v}; {}",
                d.g.to_json(),
                family.describe()
            ));
        }
    }
}

fn exchange(seed: u64, out: &mut CaseOutcome) {
    let family = Family::draw(seed);
    let fam = family.fam();
    let n = fam.len();
    if let Family::Table(scm, _, _) = &family {
        congruence(seed, scm, fam, out);
    }
    if !check_transitivity(fam).holds || !fam.sources().iter().all(|s| holds(s, Property::Composition)) {
        return;
    }
    out.checked = true;
    let d = derive(fam, Mode::Iterative).expect("family derives");
    let rel = &d.relations;
    let name = |i: usize| fam.roster()[i].clone();
    let mut fail = |msg: String| out.failures.push(format!("{msg}; {}", family.describe()));
    for k in 0..n {
        let an = d.g.ancestors_of(k);
        for i in (0..n).filter(|&i| i != k) {
            if an.contains(i) != rel.cause[k].contains(i) {
                fail(format!(
                    "{} ancestor of {} in G is {}, cause is {}",
                    name(i),
                    name(k),
                    an.contains(i),
                    rel.cause[k].contains(i)
                ));
            }
        }
        if d.g.strong_component(k) != rel.cc[k] {
            fail(format!("strong component and causal cycle of {} differ", name(k)));
        }
        if !rel.cause[k].is_empty() && d.dcause[k].is_empty() {
            fail(format!("{} has causes but no direct cause", name(k)));
        }
    }
    for i in 0..n {
        let rest = fam.source(i).var_count();
        let rest = NodeSet::full(rest).minus(rel.eff[i]).without(i);
        if !rest.is_empty() && !fam.independent(i, NodeSet::singleton(i), rest, NodeSet::EMPTY) {
            fail(format!(
                "{} is dependent on its non-effects under its own intervention",
                name(i)
            ));
        }
    }
}

/// Canonical family against one with a different replacement law at one node.
fn congruence(seed: u64, scm: &Scm, fam: &InterventionalFamily, out: &mut CaseOutcome) {
    let n = fam.len();
    let r = rng_for(split_seed(seed, 20)).gen_range(0..n);
    let repl = random_marginal(split_seed(seed, 21), &fam.roster()[r], scm.cards()[r]);
    let other = scm
        .standard_family(&BTreeMap::from([(r, repl)]))
        .expect("override has full support");
    let same_graph =
        derive(fam, Mode::Iterative).map(|d| d.g).ok() == derive(&other, Mode::Iterative).map(|d| d.g).ok();
    let congruent = check_congruent(fam, &other).map(|r| r.holds).unwrap_or(false);
    if congruent != same_graph {
        out.failures.push(format!(
            "congruence {congruent} but equal graphs {same_graph} for the SCM on {}",
            scm.graph().to_json()
        ));
    }
}

fn scm_graph_equality(seed: u64, out: &mut CaseOutcome) {
    let class = if rng_for(seed).gen_bool(0.5) {
        GraphClass::Dag
    } else {
        GraphClass::Ancestral
    };
    let (scm, p) = scm_instance(split_seed(seed, 1), class, 2, 5);
    let g = scm.graph();
    let fam = scm.standard_family(&BTreeMap::new()).expect("valid SCM");
    let edge_cause = check_edge_cause(&fam, g).map(|r| r.holds).unwrap_or(false);
    let converse = markov_check(&p, g, MarkovKind::ConversePairwise, PropertyScope::Singleton)
        .map(|r| r.holds())
        .unwrap_or(false);
    if !edge_cause || !converse {
        return;
    }
    out.checked = true;
    let d = derive(&fam, Mode::Iterative).expect("family derives");
    if two_node_arc(g, &d.g) {
        out.divergences.push(format!(
            "two nodes leave no third intervention to separate the pair of {}",
            g.to_json()
        ));
        return;
    }
    if g.is_maximal() {
        if &d.g != g {
            out.failures.push(format!(
                "derived {} but the SCM graph is {}",
                d.g.to_json(),
                g.to_json()
            ));
        }
    } else if !d
        .g
        .markov_equivalent(g, EquivalenceMode::Singleton)
        .unwrap_or(false)
    {
        out.failures.push(format!(
            "derived {} is not Markov equivalent to the non-maximal SCM graph {}",
            d.g.to_json(),
            g.to_json()
        ));
    }
}

fn quantifiable_chain(seed: u64, out: &mut CaseOutcome) {
    let class = if rng_for(seed).gen_bool(0.5) {
        GraphClass::Dag
    } else {
        GraphClass::Ancestral
    };
    let (scm, p) = scm_instance(split_seed(seed, 1), class, 2, 4);
    let n = scm.node_count();
    let mut overrides = BTreeMap::new();
    if rng_for(split_seed(seed, 2)).gen_bool(0.5) {
        let r = rng_for(split_seed(seed, 3)).gen_range(0..n);
        let name = scm.graph().name(r).to_string();
        overrides.insert(r, random_marginal(split_seed(seed, 4), &name, scm.cards()[r]));
    }
    let fam = scm.standard_family(&overrides).expect("valid SCM");
    let about = format!(
        "SCM on {} with overrides at {:?}",
        scm.graph().to_json(),
        overrides.keys()
    );
    if !check_compatible(&fam, &p).map(|r| r.holds).unwrap_or(false) {
        return;
    }
    let d = derive(&fam, Mode::Iterative).expect("family derives");
    if check_quantifiable(&fam, &p).map(|r| r.holds).unwrap_or(false) {
        out.checked = true;
        let id = check_cause_identity(&fam, &p).expect("compatible");
        if !id.holds {
            out.failures.push(format!(
                "quantifiable but the cause-conditional identity fails: {}; {about}",
                id.to_json()
            ));
        }
    }
    let strong = check_observable(&fam, &p).map(|r| r.holds).unwrap_or(false)
        && check_strongly_observable(&fam, &p)
            .map(|r| r.holds)
            .unwrap_or(false);
    let bivariate = check_bivariate_quantifiable(&fam, &p, PairScope::Axiom)
        .map(|r| r.holds)
        .unwrap_or(false);
    if bivariate
        && d.g.is_ancestral()
        && check_transitivity(&fam).holds
        && compositional(&p)
        && fam.sources().iter().all(compositional)
    {
        out.checked = true;
        if !strong {
            out.failures.push(format!(
                "bivariate-quantifiable but not strongly observable; {about}"
            ));
        }
    }
    if strong && n >= 3 {
        let gp = graph_from_observation(&fam, &d, &p).expect("aligned table");
        if gp.is_maximal() && d.g.is_maximal() {
            out.checked = true;
            if gp != d.g {
                out.failures.push(format!(
                    "strongly observable with maximal graphs, but G(P) = {} and G = {}; {about}",
                    gp.to_json(),
                    d.g.to_json()
                ));
            }
        }
    }
}

fn uniqueness(seed: u64, out: &mut CaseOutcome) {
    let (scm, p) = scm_instance(seed, GraphClass::Dag, 2, 5);
    let fam = scm.standard_family(&BTreeMap::new()).expect("valid SCM");
    let d = derive(&fam, Mode::Iterative).expect("family derives");
    if !d.g.is_dag()
        || !check_transitivity(&fam).holds
        || !compositional(&p)
        || !fam.sources().iter().all(compositional)
        || !check_bivariate_quantifiable(&fam, &p, PairScope::Axiom)
            .map(|r| r.holds)
            .unwrap_or(false)
    {
        return;
    }
    out.checked = true;
    match reconstruct_p(&fam, &d, Some(&p)) {
        Ok(r) if r.matches == Some(true) => {}
        Ok(r) => out.failures.push(format!(
            "reconstruction differs in {} cells for the SCM on {}",
            r.mismatched_cells,
            scm.graph().to_json()
        )),
        Err(e) => out.failures.push(format!(
            "reconstruction failed: {e}; SCM on {}",
            scm.graph().to_json()
        )),
    }
}

fn transitivity_sufficiency(seed: u64, out: &mut CaseOutcome) {
    let family = Family::draw(seed);
    let report = check_transitivity(family.fam());
    let oracle = matches!(family, Family::Oracle(..));
    if !report.sufficient_conditions_hold && !oracle {
        return;
    }
    out.checked = true;
    if !report.holds {
        let (i, j, k) = report.violations[0];
        let r = family.fam().roster();
        out.failures.push(format!(
            "not transitive at ({}, {}, {}) although {}; {}",
            r[i],
            r[j],
            r[k],
            if oracle {
                "the family is a separation oracle"
            } else {
                "the sufficient conditions hold"
            },
            family.describe()
        ));
    }
}
