use std::collections::BTreeMap;

use approx::assert_relative_eq;
use gegenkrr::asymptotics::{risk_curves, stieltjes_pair, stieltjes_residual, MpLaw, RiskInputs, StaircaseSpec};
use gegenkrr::gegenbauer::GegenbauerEvaluator;
use gegenkrr::kernels::compute_profile;
use gegenkrr::{Domain, KernelSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn stieltjes_root_solves_its_quadratic(lpsi in -2.0f64..2.0, lzeta in -3.0f64..3.0) {
        let (psi, zeta) = (10f64.powf(lpsi), 10f64.powf(lzeta));
        let (r, rp) = stieltjes_pair(psi, zeta).unwrap();
        prop_assert!(r > 0.0 && r <= 1.0 / zeta * (1.0 + 1e-12));
        prop_assert!(rp > 0.0 && rp <= r / zeta * (1.0 + 1e-12));
        prop_assert!(stieltjes_residual(psi, zeta, r).abs() <= 1e-12 * (1.0 + zeta * psi * r * r));
    }

    #[test]
    fn mp_cdf_is_a_distribution_function(lpsi in -1.5f64..1.5, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let law = MpLaw::new(10f64.powf(lpsi)).unwrap();
        let span = law.lambda_plus * 1.2;
        let (x, y) = (a.min(b) * span, a.max(b) * span);
        let (fx, fy) = (law.cdf(x), law.cdf(y));
        prop_assert!((0.0..=1.0).contains(&fx) && (0.0..=1.0).contains(&fy));
        prop_assert!(fx <= fy + 1e-12);
    }

    #[test]
    fn asymptotic_risk_respects_its_bounds(
        lpsi in -2.0f64..2.0,
        lzeta in -2.0f64..2.0,
        f_ell in 0.0f64..2.0,
        f_tail in 0.0f64..1.0,
        sigma_sq in 0.0f64..1.0,
    ) {
        let out = risk_curves(RiskInputs {
            psi: 10f64.powf(lpsi),
            zeta_star: 10f64.powf(lzeta),
            f_ell_sq: f_ell,
            f_tail_sq: f_tail,
            sigma_sq,
            lambda: 0.0,
            mu_ell: 1.0,
        })
        .unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&out.bias));
        prop_assert!(out.variance >= -1e-12);
        prop_assert!(out.r_test >= f_tail - 1e-12);
    }

    #[test]
    fn hypercube_masses_add_up_to_h1(d in 1usize..=30, c in -3.0f64..3.0) {
        let k = KernelSpec::Exponential { c };
        let p = compute_profile(&k, Domain::hypercube(d).unwrap(), d, 0).unwrap();
        let scale = k.h(1.0).max(k.h(-1.0));
        assert_relative_eq!(p.mu.iter().sum::<f64>(), k.h_at_one(), epsilon = 1e-12 * scale);
    }

    #[test]
    fn sphere_masses_are_nonnegative_and_bounded(d in 3usize..=200, gamma in 0.05f64..3.0) {
        let k = KernelSpec::SphereRbf { gamma };
        let p = compute_profile(&k, Domain::sphere(d).unwrap(), 12, 0).unwrap();
        prop_assert!(p.mu.iter().all(|m| *m >= 0.0));
        prop_assert!(p.tail(12) >= -1e-12);
        prop_assert!(p.is_psd());
    }

    #[test]
    fn normalized_polynomials_are_bounded_on_the_cube(d in 1usize..=40, j in 0usize..=40) {
        let j = j.min(d);
        let ev = GegenbauerEvaluator::new(Domain::hypercube(d).unwrap(), d.min(10)).unwrap();
        for k in 0..=d.min(10) {
            prop_assert!(ev.at_atom(k, j).abs() <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn staircase_is_continuous_at_integer_kappa() {
    let spec = StaircaseSpec {
        energies: BTreeMap::from([(1, 1.0), (2, 1.0), (3, 1.0)]),
        sigma_sq: 0.0,
        zetas: BTreeMap::from([(1, 0.3), (2, 0.2), (3, 0.4)]),
        window: 0.25,
        log_scale: 1.0,
    };
    // the ends are approached at rate psi and 1/psi, scaled by energies of order one
    for ell in 1..=3usize {
        let left = spec.plateau(ell - 1);
        let right = spec.plateau(ell);
        assert!((spec.level_risk(ell, 1e-8).unwrap() - left).abs() < 1e-6, "l={ell} left");
        assert!((spec.level_risk(ell, 1e8).unwrap() - right).abs() < 1e-6, "l={ell} right");
        let gap = spec.level_risk(ell, 1e6).unwrap() - right;
        assert!((gap * 1e6 - right).abs() < 1e-2 * right.max(1e-3) + 1e-3, "l={ell}: {gap}");
    }
}
