mod common;

use common::dynamics_fixtures;
use superint::dynamics::{
    clamp_momenta, drift_report, integrate, integrate_with, time_reversal_error, to_csv,
    IntegratorOptions, Termination, CSV_HEADER, DEFAULT_T_END,
};
use superint::{Class, PhasePoint, SystemSpec};

fn drift(spec: &SystemSpec, p: PhasePoint, rel_tol: f64) -> f64 {
    let traj = integrate(spec, p, DEFAULT_T_END, rel_tol, rel_tol * 1e-2).unwrap();
    assert_eq!(traj.termination, Termination::Completed);
    drift_report(spec, &traj).unwrap().max_normalized()
}

#[test]
fn fixtures_conserve_all_integrals() {
    for f in dynamics_fixtures() {
        for p in f.initials {
            let d = drift(&f.spec, p, 1e-10);
            assert!(d <= 1e-6, "{}: drift {d}", f.spec.class);
        }
    }
}

#[test]
fn drift_shrinks_with_tolerance() {
    for f in dynamics_fixtures() {
        for p in f.initials {
            let drifts: Vec<f64> = [1e-6, 1e-7, 1e-8, 1e-9]
                .iter()
                .map(|&r| drift(&f.spec, p, r))
                .collect();
            for w in drifts.windows(2) {
                assert!(w[1] <= 2.0 * w[0], "{}: {drifts:?}", f.spec.class);
            }
            assert!(drift(&f.spec, p, 1e-4) > drifts[3], "{}", f.spec.class);
        }
    }
}

#[test]
fn trajectories_are_time_reversible() {
    let opts = IntegratorOptions::default();
    for f in dynamics_fixtures() {
        let err = time_reversal_error(&f.spec, f.initials[0], DEFAULT_T_END, &opts).unwrap();
        assert!(err <= 1e-5, "{}: {err}", f.spec.class);
    }
}

#[test]
fn each_casimir_drift_is_reported() {
    let f = &dynamics_fixtures()[1];
    assert_eq!(f.spec.class, Class::I2);
    let traj = integrate(&f.spec, f.initials[1], DEFAULT_T_END, 1e-10, 1e-12).unwrap();
    let report = drift_report(&f.spec, &traj).unwrap();
    for name in ["H", "A", "B", "casimir"] {
        assert!(report.get(name).unwrap().normalized <= 1e-6, "{name}");
    }
}

#[test]
fn csv_rows_follow_the_trajectory() {
    let f = &dynamics_fixtures()[0];
    let traj = integrate(&f.spec, f.initials[0], 1.0, 1e-8, 1e-10).unwrap();
    let csv = to_csv(&f.spec, &traj).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), traj.len());
}

#[test]
fn leaving_the_domain_is_reported() {
    let spec = SystemSpec::new(Class::I1, [0.0, 0.0, 0.0, 2.0], [0.0; 4]);
    let traj = integrate(
        &spec,
        PhasePoint::new(1.0, 0.5, 1.0, -1.0),
        DEFAULT_T_END,
        1e-10,
        1e-12,
    )
    .unwrap();
    match traj.termination {
        Termination::DomainExit { t } => assert!(t > 0.0 && t < DEFAULT_T_END),
        Termination::Completed => panic!("trajectory crossed the excluded diagonal"),
    }
}

#[test]
fn clamped_momenta_bound_the_energy() {
    let f = &dynamics_fixtures()[2];
    let p = clamp_momenta(
        &f.spec,
        PhasePoint::new(f.initials[0].xi, f.initials[0].eta, 400.0, -300.0),
    )
    .unwrap();
    let traj = integrate_with(&f.spec, p, 0.1, &IntegratorOptions::default()).unwrap();
    let h = drift_report(&f.spec, &traj)
        .unwrap()
        .get("H")
        .unwrap()
        .initial;
    assert!(h.abs() <= 10.0 + 1e-9, "{h}");
}
