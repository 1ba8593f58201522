use std::f64::consts::PI;

use cpulse::golden::find_row;
use cpulse::optimizer::{derive, equivalence_class, equivalent_within, Objective, OptimizationProblem};
use cpulse::{Error, Family};

fn problem(family: Family, n: usize) -> OptimizationProblem {
    OptimizationProblem::new(family, n).unwrap().without_table_hint()
}

#[test]
fn recovers_the_three_pulse_solutions() {
    let r = derive(&problem(Family::UltraBroadband, 3), 16, 7).unwrap();
    assert!((r.objective_value - 1.5).abs() < 1e-10);
    assert!((r.free_phases[0] - PI / 2.0).abs() < 1e-6, "{:?}", r.free_phases);
    assert!(r.converged);

    let r = derive(&problem(Family::UltraNarrowband, 3), 16, 7).unwrap();
    assert!((r.objective_value - 0.5).abs() < 1e-10);
    let phases = problem(Family::UltraNarrowband, 3).sequence(&r.free_phases).phases();
    assert!((phases[1] - PI).abs() < 1e-12);
    assert!(equivalent_within(&phases, &[PI / 2.0, PI, 1.5 * PI], Family::UltraNarrowband, 1e-6));
}

#[test]
fn recovers_bat5_up_to_equivalence() {
    let p = problem(Family::UltraBroadband, 5);
    let r = derive(&p, 32, 1).unwrap();
    assert!((r.objective_value - 5.0 / 3.0).abs() < 1e-9);
    let found = p.sequence(&r.free_phases).phases();
    let printed = find_row("Bat5").unwrap().sequence().phases();
    assert!(equivalent_within(&found, &printed, Family::UltraBroadband, 1e-3));
}

#[test]
fn objective_value_matches_reevaluation() {
    let p = problem(Family::UltraPassband, 3);
    let r = derive(&p, 16, 3).unwrap();
    let again = p.objective.evaluate(&p.sequence(&r.free_phases));
    assert!((again - r.objective_value).abs() < 1e-10);
    assert!(r.all_local_optima[0].value == r.objective_value || (r.all_local_optima[0].value - r.objective_value).abs() < 1e-10);
}

#[test]
fn same_seed_same_result() {
    let p = problem(Family::UltraBroadbandPhasal, 4);
    let a = derive(&p, 12, 42).unwrap();
    let b = derive(&p, 12, 42).unwrap();
    assert_eq!(a, b);
    assert!(a.free_phases[0] == 0.0);
}

#[test]
fn more_restarts_do_not_find_better_optima() {
    for (family, n) in [(Family::UltraBroadband, 5), (Family::UltraNarrowband, 5), (Family::UltraBroadbandPhasal, 4)] {
        let p = problem(family, n);
        let a = derive(&p, 32, 5).unwrap();
        let b = derive(&p, 64, 5).unwrap();
        let improvement = match p.objective {
            Objective::MaximizeArea | Objective::MaximizeFidelityArea => b.objective_value - a.objective_value,
            _ => a.objective_value - b.objective_value,
        };
        assert!(improvement <= 1e-6, "{family}: {improvement}");
    }
}

#[test]
fn table_hints_are_optional_starts() {
    let with = OptimizationProblem::new(Family::UltraBroadband, 5).unwrap();
    let r = derive(&with, 1, 0).unwrap();
    assert_eq!(r.n_starts, 3);
    let without = with.without_table_hint();
    assert_eq!(derive(&without, 1, 0).unwrap().n_starts, 2);
}

#[test]
fn rejects_bad_requests() {
    assert!(matches!(
        OptimizationProblem::new(Family::UltraBroadband, 4),
        Err(Error::InvalidArity { .. })
    ));
    assert!(matches!(
        OptimizationProblem::new(Family::UltraBroadbandPhasal, 5),
        Err(Error::InvalidArity { .. })
    ));
    assert!(OptimizationProblem::new(Family::ReferenceBB2, 5).is_err());
    assert_eq!(derive(&problem(Family::UltraBroadband, 3), 0, 0), Err(Error::NoRestarts));
    let mut p = problem(Family::UltraBroadband, 3);
    p.objective = Objective::MinimizeArea;
    assert!(matches!(derive(&p, 4, 0), Err(Error::ObjectiveMismatch { .. })));
}

#[test]
fn equivalence_covers_sign_and_shift() {
    let printed = find_row("Bat5").unwrap().sequence().phases();
    let mirrored: Vec<f64> = printed.iter().map(|p| -p).collect();
    let shifted: Vec<f64> = printed.iter().map(|p| p + 0.7).collect();
    assert!(equivalence_class(&printed, &mirrored, Family::UltraBroadband));
    assert!(equivalence_class(&printed, &shifted, Family::UltraBroadband));
    let other = find_row("Bat5").unwrap().sequence().phase_shifted(0.0).phases();
    let mut broken = other.clone();
    broken[1] += 0.1;
    assert!(!equivalence_class(&printed, &broken, Family::UltraBroadband));
}
