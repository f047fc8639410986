//! Exercises the crate through its root re-exports only.

use igk_core::{
    ExponentialFamilySpec, FsScale, KahlerObservableCP, MeasuredSpace, PlaneKahlerFunction, PlanePoint,
    ProjectivePoint, SphereKahlerFunction, SpherePoint, TangentBundlePoint, C64,
};

#[test]
fn families_round_trip_through_both_charts() {
    for name in ExponentialFamilySpec::builtin_names() {
        let spec = ExponentialFamilySpec::builtin(name).unwrap();
        let theta = spec.default_theta();
        let eta = spec.natural_to_expectation(&theta).unwrap();
        let back = spec.expectation_to_natural(&eta).unwrap();
        for (a, b) in theta.iter().zip(&back) {
            assert!((a - b).abs() < 1e-8, "{name}: {theta:?} vs {back:?}");
        }
        assert!((spec.normalization(&theta).unwrap() - 1.0).abs() < 1e-9, "{name}");
    }
}

#[test]
fn binomial_density_matches_closed_form() {
    let spec = ExponentialFamilySpec::builtin("binomial:2").unwrap();
    let MeasuredSpace::Finite { values, .. } = spec.space() else {
        panic!("binomial is finite")
    };
    let p: Vec<f64> = values.iter().map(|&x| spec.density(&[0.0], x).unwrap()).collect();
    assert_eq!(p.len(), 3);
    for (a, b) in p.iter().zip([0.25, 0.5, 0.25]) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn kahler_structure_is_available_from_the_root() {
    let spec = ExponentialFamilySpec::builtin("categorical:3").unwrap();
    let point = TangentBundlePoint::new(&spec, vec![0.3, -0.2], vec![1.0, 0.5]).unwrap();
    let s = igk_core::dombrowski::kahler_structure_at(&spec, &point).unwrap();
    assert!(s.j_squared_residual() < 1e-12);
}

#[test]
fn projective_observable_statistics() {
    let u = igk_core::CMatrix::identity(2, 2);
    let obs = KahlerObservableCP::new(vec![1.0, -1.0], u).unwrap();
    let z = ProjectivePoint::from_slice(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
    assert!(obs.value(z.homog()).abs() < 1e-15);
    assert!((obs.variance(z.homog()) - 1.0).abs() < 1e-15);
    assert_eq!(FsScale::Quadrupled.factor(), 4.0);
}

#[test]
fn spin_and_oscillator_entry_points() {
    let law = igk_core::spin::spin_probabilities(1, SphereKahlerFunction::X, SpherePoint::new(1.0, 0.0, 0.0).unwrap())
        .unwrap();
    assert_eq!(law.probabilities.len(), 2);
    assert!((law.probabilities[1] - 1.0).abs() < 1e-15);
    let value =
        igk_core::oscillator::oscillator_expectation(1.0, PlaneKahlerFunction::X, PlanePoint::new(0.5, 0.0)).unwrap();
    assert!((value - 0.5).abs() < 1e-10);
}
