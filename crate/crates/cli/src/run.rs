//! One runner per experiment. Cells are scheduled through
//! [`gegenkrr::krr::map_cells`] and assembled in grid order, so tables do
//! not depend on the number of worker threads.

use std::collections::BTreeMap;

use gegenkrr::asymptotics::{risk_curves, staircase_curve, RiskInputs, StaircaseSpec};
use gegenkrr::domains::sample_dataset;
use gegenkrr::gauss::{equivalence_report, EquivalenceConfig};
use gegenkrr::kernels::effective_regularization;
use gegenkrr::krr::{cell_index, descent_sweep, exact_risk_profile, map_cells, n_grid_from_psi, SweepConfig};
use gegenkrr::seed::{derive_seed, stream};
use gegenkrr::spectrum::{gegenbauer_spectrum, samples_for_ratio};
use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::{RunOutput, Table};

/// Runs a resolved config.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    match config.experiment {
        Some(Experiment::Spectrum) => spectrum(config),
        Some(Experiment::Krr) => krr(config),
        Some(Experiment::Asymptotics) => asymptotics(config),
        Some(Experiment::Staircase) => staircase(config),
        Some(Experiment::Gauss) => gauss(config),
        None => Err(CliError::InvalidConfig { key: "experiment".into(), reason: "config is not resolved".into() }),
    }
}

fn lambda(config: &ExperimentConfig) -> f64 {
    config.lambda.expect("resolved config has a ridge")
}

fn profile_sidecar(config: &ExperimentConfig) -> Result<Value> {
    let profile = exact_risk_profile(&config.kernel_spec(), config.domain()?)?;
    Ok(serde_json::from_str(&profile.to_json()?).expect("profile JSON parses"))
}

fn spectrum(config: &ExperimentConfig) -> Result<RunOutput> {
    let domain = config.domain()?;
    let trials = config.trials;
    let cells = config.psi.len() * trials;
    let reports = map_cells(cells, |c| {
        let (g, t) = (c / trials, c % trials);
        let n = samples_for_ratio(domain, config.ell, config.psi[g])?;
        let seed = derive_seed(config.seed, stream::DATASET, cell_index(g, t));
        gegenbauer_spectrum(&sample_dataset(domain, n, seed), config.ell).map(|r| (seed, r))
    });
    let mut table = Table::new(vec![
        ("psi", "requested aspect ratio n / B_l"),
        ("trial", "trial index within the grid point"),
        ("n", "sample size"),
        ("index", "eigenvalue rank, ascending"),
        ("eigenvalue", "eigenvalue of the normalized Gegenbauer matrix Q_l"),
        ("ks", "Kolmogorov-Smirnov distance of the trial spectrum to MP(n / B_l)"),
    ]);
    let mut records = Vec::with_capacity(cells);
    for (c, rep) in reports.into_iter().enumerate() {
        let (seed, rep) = rep?;
        let (g, t) = (c / trials, c % trials);
        for (i, ev) in rep.eigenvalues.iter().enumerate() {
            table.push(vec![config.psi[g].into(), t.into(), rep.n.into(), i.into(), (*ev).into(), rep.ks_distance.into()]);
        }
        records.push(json!({
            "domain": config.domain,
            "d": config.d,
            "ell": config.ell,
            "n": rep.n,
            "B": rep.b,
            "psi": rep.psi_hat,
            "seed": seed,
            "ks": rep.ks_distance,
            "trial": t,
        }));
    }
    Ok(RunOutput { table, sidecars: vec![("spectrum", Value::Array(records))] })
}

fn sweep_config(config: &ExperimentConfig) -> Result<SweepConfig> {
    let domain = config.domain()?;
    Ok(SweepConfig {
        domain,
        kernel: config.kernel_spec(),
        ell: config.ell,
        lambda: lambda(config),
        energies: config.energy_map(),
        sigma_sq: config.sigma_sq(),
        n_grid: n_grid_from_psi(domain, config.ell, &config.psi)?,
        trials: config.trials,
        seed: config.seed,
        risk: config.risk_method(),
    })
}

fn krr(config: &ExperimentConfig) -> Result<RunOutput> {
    let rows = descent_sweep(&sweep_config(config)?)?;
    let mut table = Table::new(vec![
        ("n", "sample size"),
        ("psi", "realized aspect ratio n / B_l"),
        ("test_mean", "mean test error over trials"),
        ("test_se", "standard error of test_mean"),
        ("train_mean", "mean train error over trials"),
        ("train_se", "standard error of train_mean"),
        ("rkhs_mean", "mean RKHS norm of the fit divided by n"),
        ("rkhs_se", "standard error of rkhs_mean"),
        ("theory_test", "asymptotic test error"),
        ("theory_train", "asymptotic train error"),
        ("theory_rkhs", "asymptotic RKHS norm divided by n"),
    ]);
    for r in rows {
        table.push(vec![
            r.n.into(),
            r.psi_hat.into(),
            r.test_mean.into(),
            r.test_se.into(),
            r.train_mean.into(),
            r.train_se.into(),
            r.rkhs_mean.into(),
            r.rkhs_se.into(),
            r.theory_test.into(),
            r.theory_train.into(),
            r.theory_rkhs.into(),
        ]);
    }
    Ok(RunOutput { table, sidecars: vec![("profile", profile_sidecar(config)?)] })
}

fn gauss(config: &ExperimentConfig) -> Result<RunOutput> {
    let cfg = EquivalenceConfig {
        sweep: sweep_config(config)?,
        k_max: config.k_max.expect("resolved config has k_max"),
        tail: config.tail_handling(),
    };
    let rows = equivalence_report(&cfg)?;
    let mut table = Table::new(vec![
        ("model", "krr for kernel ridge regression, gauss for the Gaussian-design ridge model"),
        ("n", "sample size"),
        ("psi", "realized aspect ratio n / B_l"),
        ("test_mean", "mean test error over trials"),
        ("test_se", "standard error of test_mean"),
        ("theory_test", "asymptotic test error"),
    ]);
    for r in rows {
        table.push(vec!["krr".into(), r.n.into(), r.psi_hat.into(), r.krr_mean.into(), r.krr_se.into(), r.theory.into()]);
        table.push(vec!["gauss".into(), r.n.into(), r.psi_hat.into(), r.gauss_mean.into(), r.gauss_se.into(), r.theory.into()]);
    }
    Ok(RunOutput { table, sidecars: vec![("profile", profile_sidecar(config)?)] })
}

fn asymptotics(config: &ExperimentConfig) -> Result<RunOutput> {
    let energies = config.energy_map();
    let f_ell_sq = energies.get(&config.ell).copied().unwrap_or(0.0);
    let f_tail_sq: f64 = energies.range(config.ell + 1..).map(|(_, v)| v).sum();
    // explicit zetas describe the ridgeless limit with unit level mass
    let (zetas, ridge, mu_ell, sidecars) = if config.zeta.is_empty() {
        let profile = exact_risk_profile(&config.kernel_spec(), config.domain()?)?;
        let z = effective_regularization(&profile, config.ell, lambda(config))?;
        (vec![z.zeta], z.lambda, z.mu_ell, vec![("profile", profile_sidecar(config)?)])
    } else {
        (config.zeta.clone(), 0.0, 1.0, Vec::new())
    };
    let mut table = Table::new(vec![
        ("zeta", "effective regularization"),
        ("psi", "aspect ratio n / B_l"),
        ("bias", "bias curve B(psi, zeta)"),
        ("variance", "variance curve V(psi, zeta)"),
        ("r_test", "F_l^2 B + (F_tail^2 + sigma^2) V + F_tail^2"),
        ("r_train", "asymptotic train error"),
        ("rkhs", "asymptotic RKHS norm divided by n"),
    ]);
    for &zeta in &zetas {
        for &psi in &config.psi {
            let a = risk_curves(RiskInputs { psi, zeta_star: zeta, f_ell_sq, f_tail_sq, sigma_sq: config.sigma_sq(), lambda: ridge, mu_ell })?;
            table.push(vec![zeta.into(), psi.into(), a.bias.into(), a.variance.into(), a.r_test.into(), a.r_train.into(), a.rkhs_density.into()]);
        }
    }
    Ok(RunOutput { table, sidecars })
}

fn staircase(config: &ExperimentConfig) -> Result<RunOutput> {
    let energies = config.energy_map();
    let top = energies.keys().next_back().copied().unwrap_or(1).max(1);
    let zetas = if config.zeta.is_empty() { config.kernel_zetas(top)? } else { config.zeta.clone() };
    let spec = StaircaseSpec {
        energies,
        sigma_sq: config.sigma_sq(),
        zetas: zetas.iter().enumerate().map(|(i, z)| (i + 1, *z)).collect::<BTreeMap<_, _>>(),
        window: config.window,
        log_scale: config.log_scale.expect("resolved config has a log scale"),
    };
    let mut table = Table::new(vec![
        ("kappa", "polynomial scaling exponent, n = d^kappa"),
        ("r_test", "asymptotic test error"),
        ("level", "level whose transition produced the value, 0 on a plateau"),
        ("psi", "aspect ratio within the transition window, 0 on a plateau"),
    ]);
    for p in staircase_curve(&spec, &config.kappas())? {
        table.push(vec![p.kappa.into(), p.r_test.into(), p.level.unwrap_or(0).into(), p.psi.unwrap_or(0.0).into()]);
    }
    let doc = json!({ "zetas": spec.zetas, "plateaus": (0..=top).map(|l| spec.plateau(l)).collect::<Vec<_>>() });
    Ok(RunOutput { table, sidecars: vec![("staircase", doc)] })
}
