use std::collections::BTreeMap;

use gegenkrr::domains::sample_dataset;
use gegenkrr::krr::{
    bias_variance_split, descent_sweep, draw_target, exact_risk_profile, fit_krr, mean_with_error, n_grid_from_psi,
    noisy_responses, test_error_exact, test_error_mc, RiskMethod, SweepConfig,
};
use gegenkrr::seed::{derive_seed, stream};
use gegenkrr::{Domain, KernelSpec};

const MASTER: u64 = 0x7e57_0002;

fn energies(pairs: &[(usize, f64)]) -> BTreeMap<usize, f64> {
    pairs.iter().copied().collect()
}

#[test]
fn sphere_exact_risk_agrees_with_monte_carlo() {
    let dom = Domain::sphere(8).unwrap();
    let kernel = KernelSpec::exponential();
    let profile = exact_risk_profile(&kernel, dom).unwrap();
    let ds = sample_dataset(dom, 40, derive_seed(MASTER, stream::DATASET, 1));
    let target = draw_target(dom, &energies(&[(1, 0.5), (2, 1.0)]), &[], 0.3, derive_seed(MASTER, stream::TARGET, 1)).unwrap();
    let y = noisy_responses(&target, &ds, derive_seed(MASTER, stream::NOISE, 1)).unwrap();
    let fit = fit_krr(&ds, &kernel, 0.05, &y).unwrap();
    let exact = test_error_exact(&fit, &target, &profile).unwrap();
    let mc = test_error_mc(&fit, &target, 100_000, derive_seed(MASTER, stream::TEST_POINTS, 1)).unwrap();
    let gap = (exact.total - mc.estimate).abs();
    assert!(gap <= 3.0 * mc.std_error + exact.tail_bound, "exact {} mc {} +- {}", exact.total, mc.estimate, mc.std_error);
}

#[test]
fn linear_kernel_interpolates_a_linear_target() {
    let dom = Domain::hypercube(10).unwrap();
    let ds = sample_dataset(dom, 30, derive_seed(MASTER, stream::DATASET, 2));
    let target = draw_target(dom, &BTreeMap::new(), &[(1, 1.0)], 0.0, 0).unwrap();
    let y = noisy_responses(&target, &ds, 0).unwrap();
    let kernel = KernelSpec::linear();
    let fit = fit_krr(&ds, &kernel, 1e-8, &y).unwrap();
    let profile = exact_risk_profile(&kernel, dom).unwrap();
    let exact = test_error_exact(&fit, &target, &profile).unwrap();
    for row in &exact.per_degree {
        if row.degree == 1 {
            assert!(row.contribution <= 1e-6, "degree 1 contribution {}", row.contribution);
        } else {
            assert!(row.contribution.abs() <= 1e-12, "degree {} contribution {}", row.degree, row.contribution);
        }
    }
    let mc = test_error_mc(&fit, &target, 10_000, derive_seed(MASTER, stream::TEST_POINTS, 2)).unwrap();
    assert!(mc.estimate <= 1e-6);
}

#[test]
fn noise_free_split_has_no_variance_and_huge_ridge_keeps_the_energy() {
    let dom = Domain::hypercube(12).unwrap();
    let kernel = KernelSpec::exponential();
    let profile = exact_risk_profile(&kernel, dom).unwrap();
    let ds = sample_dataset(dom, 66, derive_seed(MASTER, stream::DATASET, 3));
    let f = energies(&[(1, 0.5), (2, 1.0), (3, 0.2)]);

    let quiet = draw_target(dom, &f, &[], 0.0, derive_seed(MASTER, stream::TARGET, 3)).unwrap();
    let split = bias_variance_split(&ds, &kernel, 0.05, &quiet, &profile).unwrap();
    assert!(split.per_degree.iter().all(|r| r.variance == 0.0));

    let noisy = draw_target(dom, &f, &[], 0.5, derive_seed(MASTER, stream::TARGET, 3)).unwrap();
    let split = bias_variance_split(&ds, &kernel, 1e8, &noisy, &profile).unwrap();
    for r in &split.per_degree {
        let e = noisy.energies.get(&r.degree).copied().unwrap_or(0.0);
        assert!((r.bias - e).abs() <= 1e-6 * (1.0 + e), "degree {}: {} vs {e}", r.degree, r.bias);
        assert!(r.variance <= 1e-12);
    }
}

#[test]
fn split_total_is_the_noise_average_of_the_exact_risk() {
    let dom = Domain::hypercube(12).unwrap();
    let kernel = KernelSpec::exponential();
    let profile = exact_risk_profile(&kernel, dom).unwrap();
    let ds = sample_dataset(dom, 66, derive_seed(MASTER, stream::DATASET, 4));
    let target = draw_target(dom, &energies(&[(1, 0.3), (2, 1.0)]), &[], 0.7, derive_seed(MASTER, stream::TARGET, 4)).unwrap();
    let expected = bias_variance_split(&ds, &kernel, 0.02, &target, &profile).unwrap().total();
    let risks: Vec<f64> = (0..50u64)
        .map(|s| {
            let y = noisy_responses(&target, &ds, derive_seed(MASTER, stream::NOISE, 400 + s)).unwrap();
            let fit = fit_krr(&ds, &kernel, 0.02, &y).unwrap();
            test_error_exact(&fit, &target, &profile).unwrap().total
        })
        .collect();
    let mc = mean_with_error(&risks);
    assert!((mc.estimate - expected).abs() <= 3.0 * mc.std_error, "{} +- {} vs {expected}", mc.estimate, mc.std_error);
}

#[test]
fn low_degree_share_stays_below_the_calibrated_threshold() {
    let fixture: serde_json::Value = serde_json::from_str(include_str!("fixtures/calibration.json")).unwrap();
    let threshold = fixture["low_degree_share"]["threshold"].as_f64().unwrap();
    let dom = Domain::hypercube(24).unwrap();
    let kernel = KernelSpec::exponential();
    let profile = exact_risk_profile(&kernel, dom).unwrap();
    let ds = sample_dataset(dom, 276, derive_seed(MASTER, stream::DATASET, 5));
    let target = draw_target(dom, &energies(&[(2, 1.0), (3, 0.1)]), &[], 0.3f64.sqrt(), derive_seed(MASTER, stream::TARGET, 5)).unwrap();
    let split = bias_variance_split(&ds, &kernel, 1e-8, &target, &profile).unwrap();
    let total = split.total();
    let low_bias: f64 = split.per_degree.iter().take(2).map(|r| r.bias).sum();
    let low_var: f64 = split.per_degree.iter().take(2).map(|r| r.variance).sum();
    assert!(low_bias / total < threshold, "bias share {}", low_bias / total);
    assert!(low_var / total < threshold, "variance share {}", low_var / total);
}

#[test]
fn huge_ridge_sweep_sits_at_the_null_risk() {
    let dom = Domain::hypercube(12).unwrap();
    let f = energies(&[(2, 1.0), (3, 0.1)]);
    let cfg = SweepConfig {
        domain: dom,
        kernel: KernelSpec::exponential(),
        ell: 2,
        lambda: 1e8,
        energies: f.clone(),
        sigma_sq: 0.3,
        n_grid: n_grid_from_psi(dom, 2, &[0.5, 1.0, 2.0]).unwrap(),
        trials: 20,
        seed: MASTER,
        risk: RiskMethod::Exact,
    };
    let null: f64 = f.values().sum();
    for row in descent_sweep(&cfg).unwrap() {
        assert!((row.test_mean - null).abs() <= 3.0 * row.test_se, "n={}: {} +- {}", row.n, row.test_mean, row.test_se);
        assert!((row.theory_test - null).abs() < 1e-6);
    }
}

#[test]
fn monte_carlo_risk_of_the_null_fit_is_the_target_energy() {
    let dom = Domain::hypercube(16).unwrap();
    let kernel = KernelSpec::exponential();
    let ds = sample_dataset(dom, 50, derive_seed(MASTER, stream::DATASET, 6));
    let target = draw_target(dom, &energies(&[(1, 0.4), (2, 0.6)]), &[], 0.0, derive_seed(MASTER, stream::TARGET, 6)).unwrap();
    let y = noisy_responses(&target, &ds, 0).unwrap();
    let fit = fit_krr(&ds, &kernel, 1e10, &y).unwrap();
    let mc = test_error_mc(&fit, &target, 50_000, derive_seed(MASTER, stream::TEST_POINTS, 6)).unwrap();
    assert!((mc.estimate - target.total_energy()).abs() <= 3.0 * mc.std_error + 1e-6);

    let zero = draw_target(dom, &BTreeMap::new(), &[], 0.0, 0).unwrap();
    let fit = fit_krr(&ds, &kernel, 0.1, &vec![0.0; 50]).unwrap();
    assert_eq!(test_error_mc(&fit, &zero, 1_000, 1).unwrap().estimate, 0.0);
}
