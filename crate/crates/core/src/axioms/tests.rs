use std::collections::BTreeMap;

use super::*;
use crate::dist::tests::bits;
use crate::scm::tests::{bit, two_graphs_scm, xor_scm};
use crate::scm::Scm;

fn product3() -> JointTable {
    JointTable::uniform(bits(&["1", "2", "3"])).unwrap()
}

/// independent bits; `P_do(1)` couples X2 and X3 without touching marginals
fn joint_interventions() -> (InterventionalFamily, JointTable) {
    let p = product3();
    let coupled = JointTable::from_prob_strings(
        bits(&["1", "2", "3"]),
        &["3/16", "1/16", "1/16", "3/16", "3/16", "1/16", "1/16", "3/16"],
    )
    .unwrap();
    let fam = InterventionalFamily::from_tables(vec![coupled, p.clone(), p.clone()]).unwrap();
    (fam, p)
}

fn canonical(scm: &Scm) -> (InterventionalFamily, JointTable) {
    (
        scm.standard_family(&BTreeMap::new()).unwrap(),
        scm.joint().unwrap(),
    )
}

fn xor_skewed() -> (InterventionalFamily, JointTable) {
    let scm = xor_scm("1/100", "1/2");
    let overrides = BTreeMap::from([(0, bit("1", "1/2")), (1, bit("2", "1/100"))]);
    (scm.standard_family(&overrides).unwrap(), scm.joint().unwrap())
}

/// 1 -> 2 -> 3 and 1 -> 3
fn triangle_scm() -> Scm {
    Scm::from_json(
        r#"{
      "graph": {"nodes":["1","2","3"],"arrows":[["1","2"],["2","3"],["1","3"]]},
      "cards": {"1":2,"2":2,"3":3},
      "noise": {"components":[
        {"vars":["e1"],"cards":{"e1":2},"probs":["1/2","1/2"]},
        {"vars":["e2"],"cards":{"e2":2},"probs":["3/4","1/4"]},
        {"vars":["e3"],"cards":{"e3":2},"probs":["2/3","1/3"]}]},
      "mechanisms": {
        "1":{"order":["e1"],"table":[0,1]},
        "2":{"order":["1","e2"],"table":[0,1,1,0]},
        "3":{"order":["1","2","e3"],"table":[0,1,1,2,1,2,2,0]}}
    }"#,
    )
    .unwrap()
}

#[test]
fn joint_interventions_observable_not_strongly() {
    let (fam, p) = joint_interventions();
    assert!(check_observable(&fam, &p).unwrap().holds);
    let a3 = check_strongly_observable(&fam, &p).unwrap();
    assert!(!a3.holds);
    let w = &a3.witnesses[0];
    assert_eq!(w.clause.as_deref(), Some("A3a"));
    assert_eq!(
        (w.i.as_deref(), w.j.as_deref(), w.k.as_deref()),
        (Some("1"), Some("2"), Some("3"))
    );
    assert_eq!((w.lhs.as_str(), w.rhs.as_str()), ("indep", "dep"));
}

#[test]
fn two_graphs_family_satisfies_everything() {
    let scm = two_graphs_scm();
    let (fam, p) = canonical(&scm);
    let d = derive(&fam, Mode::Iterative).unwrap();
    assert_eq!(&d.g, scm.graph());
    assert!(check_observable(&fam, &p).unwrap().holds);
    assert!(check_strongly_observable(&fam, &p).unwrap().holds);
    assert!(check_compatible(&fam, &p).unwrap().holds);
    assert!(check_quantifiable(&fam, &p).unwrap().holds);
    assert!(
        check_bivariate_quantifiable(&fam, &p, PairScope::Axiom)
            .unwrap()
            .holds
    );
    assert!(check_edge_cause(&fam, scm.graph()).unwrap().holds);
    let r = reconstruct_p(&fam, &d, Some(&p)).unwrap();
    assert_eq!(r.matches, Some(true));
    assert_eq!(r.table, p);
    let gp = crate::derive::graph_from_observation(&fam, &d, &p).unwrap();
    assert_eq!(gp, d.g);
}

#[test]
fn xor_fair_is_quantifiable_but_not_reconstructible() {
    let scm = xor_scm("1/2", "1/2");
    let (fam, p) = canonical(&scm);
    let d = derive(&fam, Mode::Iterative).unwrap();
    assert!(d.relations.cause.iter().all(|c| c.is_empty()));
    assert!(check_compatible(&fam, &p).unwrap().holds);
    assert!(check_quantifiable(&fam, &p).unwrap().holds);
    let ec = check_edge_cause(&fam, scm.graph()).unwrap();
    assert!(!ec.holds);
    assert!(ec
        .witnesses
        .iter()
        .any(|w| w.i.as_deref() == Some("1") && w.j.as_deref() == Some("3")));
    let r = reconstruct_p(&fam, &d, Some(&p)).unwrap();
    assert_eq!(r.matches, Some(false));
    assert_eq!(r.reference_composition, Some(false));
    let eighth = rational::parse("1/8").unwrap();
    assert!(r.table.probs().iter().all(|x| *x == eighth));
    assert_eq!(r.mismatched_cells, 8);
}

#[test]
fn skewed_xor_fails_quantifiability_with_exact_witness() {
    let (fam, p) = xor_skewed();
    let rel = crate::derive::cause_relations(&fam);
    assert_eq!(rel.cause[2], NodeSet::singleton(1));
    let a4 = check_quantifiable(&fam, &p).unwrap();
    assert!(!a4.holds);
    let hit = a4.witnesses.iter().find(|w| {
        w.i.as_deref() == Some("1")
            && w.k.as_deref() == Some("3")
            && w.context == BTreeMap::from([("1".to_string(), 1), ("2".to_string(), 1)])
            && w.value == BTreeMap::from([("3".to_string(), 1)])
    });
    let hit = hit.expect("witness at x1 = 1, x2 = 1, x3 = 1");
    assert_eq!(hit.lhs, "0/1");
    assert_eq!(hit.rhs, "99/100");
}

#[test]
fn bivariate_audit_catches_the_mediator() {
    let scm = triangle_scm();
    let (fam, p) = canonical(&scm);
    assert!(check_quantifiable(&fam, &p).unwrap().holds);
    assert!(
        check_bivariate_quantifiable(&fam, &p, PairScope::Axiom)
            .unwrap()
            .holds
    );
    let audit = check_bivariate_quantifiable(&fam, &p, PairScope::AllPairs).unwrap();
    assert!(!audit.holds);
    assert!(audit
        .witnesses
        .iter()
        .all(|w| w.i.as_deref() == Some("2") && w.j.as_deref() == Some("1") && w.k.as_deref() == Some("3")));
}

#[test]
fn congruence_of_the_two_arrow_families() {
    let vars = bits(&["1", "2", "3"]);
    let ind = JointTable::uniform(vars.clone()).unwrap();
    let p = JointTable::from_prob_strings(
        vars,
        &["3/16", "3/16", "1/16", "1/16", "1/16", "1/16", "3/16", "3/16"],
    )
    .unwrap();
    let phi = InterventionalFamily::from_tables(vec![p.clone(), ind.clone(), p.clone()]).unwrap();
    let psi = InterventionalFamily::from_tables(vec![ind, p.clone(), p]).unwrap();
    assert!(derive(&phi, Mode::Iterative).unwrap().g.has_arrow(0, 1));
    assert!(derive(&psi, Mode::Iterative).unwrap().g.has_arrow(1, 0));
    assert!(!check_congruent(&phi, &psi).unwrap().holds);
    assert!(check_congruent(&phi, &phi).unwrap().holds);
}

#[test]
fn product_family_holds_everywhere() {
    let p = product3();
    let fam = InterventionalFamily::from_tables(vec![p.clone(), p.clone(), p.clone()]).unwrap();
    for r in [
        check_observable(&fam, &p).unwrap(),
        check_strongly_observable(&fam, &p).unwrap(),
        check_compatible(&fam, &p).unwrap(),
        check_quantifiable(&fam, &p).unwrap(),
        check_bivariate_quantifiable(&fam, &p, PairScope::AllPairs).unwrap(),
        check_edge_cause(&fam, &fam.empty_graph()).unwrap(),
    ] {
        assert!(r.holds, "{}", r.axiom);
    }
    let d = derive(&fam, Mode::Iterative).unwrap();
    assert_eq!(reconstruct_p(&fam, &d, Some(&p)).unwrap().matches, Some(true));
}

#[test]
fn incompatibility_aborts_quantifiability() {
    let vars = bits(&["a", "b"]);
    let p = JointTable::uniform(vars.clone()).unwrap();
    let stuck = JointTable::from_prob_strings(vars, &["1/2", "0", "1/2", "0"]).unwrap();
    let fam = InterventionalFamily::from_tables(vec![stuck, p.clone()]).unwrap();
    let c = check_compatible(&fam, &p).unwrap();
    assert!(!c.holds);
    assert_eq!(c.witnesses[0].lhs, "null");
    assert!(matches!(
        check_quantifiable(&fam, &p),
        Err(AxiomError::Incompatible(_))
    ));
}

#[test]
fn oracle_families_lack_tables() {
    let g = Bdmg::from_labels(&["a", "b"], &[("a", "b")], &[]).unwrap();
    let fam = InterventionalFamily::oracle(&g);
    let p = JointTable::uniform(bits(&["a", "b"])).unwrap();
    assert!(matches!(
        check_compatible(&fam, &p),
        Err(AxiomError::Family(FamilyError::Capability(_)))
    ));
    assert!(check_edge_cause(&fam, &g).unwrap().holds);
}

#[test]
fn report_json_shape() {
    let (fam, p) = joint_interventions();
    let json = check_strongly_observable(&fam, &p).unwrap().to_json();
    assert!(json.starts_with(r#"{"axiom":"A3","count":"#));
    assert!(json.contains(r#""i":"1","j":"2","k":"3","lhs":"indep","rhs":"dep""#));
}

#[test]
fn xor_audit_matches_the_ci_verdict() {
    let scm = xor_scm("1/2", "1/2");
    let (fam, _) = canonical(&scm);
    let d = derive(&fam, Mode::Iterative).unwrap();
    let audit = edge_cause_audit(&scm, &fam, &d).unwrap();
    assert_eq!(audit.len(), 2);
    for a in &audit {
        assert!(a.cause_ci && a.cause_pushforward, "{a:?}");
        assert!(a.agrees());
    }
}

#[test]
fn audit_agrees_on_random_dags() {
    use crate::verify::{random_bdmg, random_cards, random_scm, GraphClass};
    for seed in 0..25 {
        let g = random_bdmg(seed, 4, 0.5, 0.0, GraphClass::Dag).unwrap();
        let scm = random_scm(seed, &g, &random_cards(seed, 4, 2, 3), 0).unwrap();
        let (fam, _) = canonical(&scm);
        let d = derive(&fam, Mode::Iterative).unwrap();
        for a in edge_cause_audit(&scm, &fam, &d).unwrap() {
            assert!(a.agrees(), "seed {seed}: {a:?}");
        }
    }
}
