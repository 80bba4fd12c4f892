use gegenkrr_web::{risk_view, spectrum_view, staircase_view, MAX_DEMO_D};

#[test]
fn spectrum_view_pairs_eigenvalues_with_the_limit() {
    let v = spectrum_view(14, 1.0, 3, 100).unwrap();
    assert_eq!(v.n(), 91);
    assert_eq!(v.eigenvalues().len(), 91);
    assert_eq!(v.atom(), 0.0);
    assert!(v.ks() < 0.2);
    // the sampled density integrates to one on the bulk
    let (g, dens) = (v.grid(), v.density());
    let h = g[1] - g[0];
    let mass: f64 = dens.iter().sum::<f64>() * h;
    assert!((mass - 1.0).abs() < 0.05, "{mass}");
    assert_eq!(spectrum_view(14, 1.0, 3, 100).unwrap(), v);
    assert!(spectrum_view(MAX_DEMO_D + 1, 1.0, 3, 100).is_err());
}

#[test]
fn risk_view_splits_into_bias_and_variance() {
    let c = risk_view(0.2, 0.5, 0.05, 20.0, 50).unwrap();
    assert_eq!(c.x().len(), 50);
    for i in 0..50 {
        assert!((c.total()[i] - c.bias()[i] - c.variance()[i]).abs() < 1e-12);
    }
    assert!(risk_view(0.2, 0.5, 1.0, 0.5, 50).is_err());
}

#[test]
fn staircase_view_steps_down_through_the_energies() {
    let c = staircase_view(50.0, [1.0, 1.0, 1.0], [0.3, 0.3, 0.3], 0.1, 7).unwrap();
    assert_eq!(c.x(), vec![0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5]);
    let t = c.total();
    assert_eq!(t[0], 3.0);
    assert_eq!(t[2], 2.0);
    assert_eq!(t[4], 1.0);
    assert_eq!(t[6], 0.0);
}
