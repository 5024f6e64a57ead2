use super::*;

#[test]
fn edgeless_when_densities_are_zero() {
    let g = random_bdmg(1, 5, 0.0, 0.0, GraphClass::Any).unwrap();
    assert_eq!(g.arrow_count() + g.arc_count(), 0);
}

#[test]
fn classes_are_honoured() {
    for seed in 0..40 {
        for class in GraphClass::ALL {
            let g = random_bdmg(seed, 6, 0.35, 0.3, class).unwrap();
            assert!(class.admits(&g), "{class} seed {seed}");
        }
    }
}

#[test]
fn too_many_nodes() {
    assert_eq!(
        random_bdmg(0, 11, 0.1, 0.1, GraphClass::Dag),
        Err(VerifyError::TooManyNodes(11))
    );
}

#[test]
fn random_scm_is_deterministic_and_full_support() {
    let g = random_bdmg(3, 4, 0.5, 0.4, GraphClass::Ancestral).unwrap();
    let cards = [2, 3, 2, 3];
    let a = random_scm(9, &g, &cards, 0).unwrap();
    let b = random_scm(9, &g, &cards, 0).unwrap();
    assert_eq!(a, b);
    assert!(a.validate().valid);
    let p = a.joint().unwrap();
    assert_eq!(p.support().len(), p.len());
}

#[test]
fn random_scm_rejects_cycles() {
    let g = Bdmg::from_labels(&["a", "b"], &[("a", "b"), ("b", "a")], &[]).unwrap();
    assert_eq!(random_scm(0, &g, &[2, 2], 0), Err(VerifyError::Cyclic));
}

#[test]
fn unknown_suite() {
    assert!(matches!(
        run_suite("bogus", 1, 1),
        Err(VerifyError::UnknownSuite(_))
    ));
}

#[test]
fn split_seed_spreads() {
    let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|i| split_seed(7, i)).collect();
    assert_eq!(seeds.len(), 1000);
}
