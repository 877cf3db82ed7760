use loewner::classifier::{cross_validate, loewner_profile, measure_profile, Membership};
use loewner::gallery::{cycle_counterexample, heavy_tail_measure, random_rep, CounterexampleSpec};
use loewner::representation::diagonal_rep;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn random_reps_have_consistent_profiles(dim in 2usize..6, seed: u64) {
        let report = loewner_profile(&random_rep(dim, seed).unwrap(), 2).unwrap();
        prop_assert!(report.discrepancies.is_empty(), "{:?}", report.discrepancies);
        prop_assert!(cross_validate(&report).is_empty());
        prop_assert_eq!(report.level(1).unwrap().operator_scalar, Membership::Out);
    }
}

#[test]
fn degenerate_counterexample_is_in_every_class() {
    let rep = cycle_counterexample(&CounterexampleSpec::new(3, 1.0).unwrap());
    let report = loewner_profile(&rep, 4).unwrap();
    assert!(report.discrepancies.is_empty());
    for level in &report.levels {
        for (route, m) in level.l_routes().iter().chain(level.l_minus_routes().iter()) {
            assert_eq!(*m, Membership::In, "N={} {route}", level.n);
        }
    }
}

#[test]
fn projection_diagonal_rep_is_in_every_class() {
    let rep = diagonal_rep(&[0.5, -1.0, 2.0], &[1.0, 0.0, 1.0], &[0.3, 0.8, 0.5]).unwrap();
    let report = loewner_profile(&rep, 3).unwrap();
    assert!(report.discrepancies.is_empty());
    assert_eq!(report.moments.scalar_stop.first_failure(), None);
    assert!(report.levels.iter().all(|l| l.function == Membership::In));
}

#[test]
fn heavy_tail_profile() {
    let m = heavy_tail_measure(4.0, 100_000).unwrap();
    let report = measure_profile(&m, 3, 10.0, 1e4, 15).unwrap();
    assert!(cross_validate(&report).is_empty());
    let b: Vec<Membership> = report.levels.iter().map(|l| l.boundedness).collect();
    assert_eq!(b, [Membership::In, Membership::In, Membership::Out]);
    assert_eq!(report.level(3).unwrap().operator_scalar, Membership::Out);
    assert!(report.levels.iter().all(|l| l.function == Membership::Indeterminate));
}
