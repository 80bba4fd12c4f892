//! Flat key-value experiment configuration.
//!
//! A config file is TOML with one `key = value` per line and no tables.
//! JSON with the same keys is also accepted, so the `config` object of a
//! run's `.meta.json` can be fed back in to replay the run.

use std::collections::BTreeMap;
use std::path::Path;

use gegenkrr::asymptotics::log_grid;
use gegenkrr::gauss::{default_k_max, TailHandling};
use gegenkrr::kernels::effective_regularization;
use gegenkrr::krr::{exact_risk_profile, lambda_floor, RiskMethod};
use gegenkrr::{Domain, DomainKind, KernelSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Spectrum,
    Krr,
    Asymptotics,
    Staircase,
    Gauss,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Krr => "krr",
            Experiment::Asymptotics => "asymptotics",
            Experiment::Staircase => "staircase",
            Experiment::Gauss => "gauss",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelId {
    Exponential,
    SphereRbf,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RiskId {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailId {
    Fold,
    Explicit,
}

/// Every key a config file may contain. Optional keys are filled in by
/// [`ExperimentConfig::resolve`], so a resolved config lists every value a
/// run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub domain: DomainKind,
    pub d: usize,
    pub ell: usize,
    pub kernel: KernelId,
    /// `exp(c t)`
    pub kernel_c: f64,
    /// `exp(-gamma (2 - 2t))`
    pub kernel_gamma: f64,
    /// `(a t + b)^p`
    pub kernel_a: f64,
    pub kernel_b: f64,
    pub kernel_p: u32,
    /// Ridge; defaults to `1e-8 h(1)`.
    pub lambda: Option<f64>,
    /// `F_k^2` indexed by degree `k`.
    pub energies: Vec<f64>,
    /// Noise standard deviation.
    pub sigma: f64,
    /// Aspect ratios `n / B_l`. When empty, a log grid from
    /// `psi_min..psi_max` with `psi_points` points is used.
    pub psi: Vec<f64>,
    pub psi_min: f64,
    pub psi_max: f64,
    pub psi_points: usize,
    /// Effective regularizations. For `asymptotics`, one curve per entry.
    /// For `staircase`, entry `i` belongs to level `i + 1`. When empty they
    /// are computed from the kernel.
    pub zeta: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub risk: RiskId,
    /// Test points per trial when `risk = "monte_carlo"`.
    pub n_test: usize,
    /// Largest explicit degree of the Gaussian model; defaults to `ell + 1`.
    pub k_max: Option<usize>,
    pub tail: TailId,
    /// Coordinates of the explicit tail block when `tail = "explicit"`.
    pub p_tail: usize,
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub kappa_points: usize,
    /// Half-width of each staircase transition window in `kappa`.
    pub window: f64,
    /// `psi = exp((kappa - l) log_scale)`; defaults to `ln d`.
    pub log_scale: Option<f64>,
    /// Output path without extension.
    pub output: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            domain: DomainKind::Hypercube,
            d: 24,
            ell: 2,
            kernel: KernelId::Exponential,
            kernel_c: 1.0,
            kernel_gamma: 1.0,
            kernel_a: 1.0,
            kernel_b: 0.0,
            kernel_p: 2,
            lambda: None,
            energies: vec![0.0, 0.0, 1.0],
            sigma: 0.0,
            psi: Vec::new(),
            psi_min: 0.05,
            psi_max: 20.0,
            psi_points: 100,
            zeta: Vec::new(),
            trials: 5,
            seed: 0,
            risk: RiskId::Exact,
            n_test: 20_000,
            k_max: None,
            tail: TailId::Fold,
            p_tail: 1000,
            kappa_min: 0.5,
            kappa_max: 3.5,
            kappa_points: 301,
            window: 0.45,
            log_scale: None,
            output: "out".into(),
        }
    }
}

fn invalid(key: &'static str, reason: impl Into<String>) -> CliError {
    CliError::InvalidConfig { key: key.into(), reason: reason.into() }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.message().to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn domain(&self) -> Result<Domain> {
        Domain::new(self.domain, self.d).map_err(|e| invalid("d", e.to_string()))
    }

    pub fn kernel_spec(&self) -> KernelSpec {
        match self.kernel {
            KernelId::Exponential => KernelSpec::Exponential { c: self.kernel_c },
            KernelId::SphereRbf => KernelSpec::SphereRbf { gamma: self.kernel_gamma },
            KernelId::Polynomial => KernelSpec::Polynomial { a: self.kernel_a, b: self.kernel_b, p: self.kernel_p },
        }
    }

    pub fn energy_map(&self) -> BTreeMap<usize, f64> {
        self.energies.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect()
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn risk_method(&self) -> RiskMethod {
        match self.risk {
            RiskId::Exact => RiskMethod::Exact,
            RiskId::MonteCarlo => RiskMethod::MonteCarlo { n_test: self.n_test },
        }
    }

    pub fn tail_handling(&self) -> TailHandling {
        match self.tail {
            TailId::Fold => TailHandling::FoldIntoRidge,
            TailId::Explicit => TailHandling::ExplicitBlock { p_tail: self.p_tail },
        }
    }

    pub fn kappas(&self) -> Vec<f64> {
        let m = self.kappa_points;
        if m == 1 {
            return vec![self.kappa_min];
        }
        (0..m).map(|i| self.kappa_min + (self.kappa_max - self.kappa_min) * i as f64 / (m - 1) as f64).collect()
    }

    /// Checks every key and fills in the defaults that depend on other keys.
    /// Resolving a resolved config is the identity.
    pub fn resolve(&self, experiment: Experiment) -> Result<Self> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(invalid("experiment", format!("config is for `{}`, not `{}`", e.name(), experiment.name())));
            }
        }
        let mut c = self.clone();
        c.experiment = Some(experiment);
        let domain = c.domain()?;
        if c.ell == 0 || c.ell > domain.d {
            return Err(invalid("ell", format!("must be in 1..={}", domain.d)));
        }
        let kernel = c.kernel_spec();
        for (key, v) in [("kernel_c", c.kernel_c), ("kernel_gamma", c.kernel_gamma), ("kernel_a", c.kernel_a), ("kernel_b", c.kernel_b)] {
            if !v.is_finite() {
                return Err(invalid(key, "must be finite"));
            }
        }
        if c.kernel == KernelId::SphereRbf && c.kernel_gamma <= 0.0 {
            return Err(invalid("kernel_gamma", "must be positive"));
        }
        let lambda = c.lambda.unwrap_or_else(|| lambda_floor(&kernel));
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "must be finite and nonnegative"));
        }
        c.lambda = Some(lambda);
        if c.energies.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(invalid("energies", "entries must be finite and nonnegative"));
        }
        if !(c.sigma >= 0.0 && c.sigma.is_finite()) {
            return Err(invalid("sigma", "must be finite and nonnegative"));
        }
        if c.psi.is_empty() {
            if !(c.psi_min > 0.0 && c.psi_max >= c.psi_min && c.psi_max.is_finite()) {
                return Err(invalid("psi_min", "need 0 < psi_min <= psi_max"));
            }
            if c.psi_points == 0 {
                return Err(invalid("psi_points", "must be at least 1"));
            }
            c.psi = log_grid(c.psi_min, c.psi_max, c.psi_points);
        }
        if c.psi.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(invalid("psi", "entries must be positive and finite"));
        }
        if c.zeta.iter().any(|z| !(*z > 0.0 && z.is_finite())) {
            return Err(invalid("zeta", "entries must be positive and finite"));
        }
        if c.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if c.risk == RiskId::MonteCarlo && c.n_test == 0 {
            return Err(invalid("n_test", "must be at least 1"));
        }
        let k_max = c.k_max.unwrap_or_else(|| default_k_max(domain, c.ell));
        if k_max < c.ell {
            return Err(invalid("k_max", format!("must be at least ell = {}", c.ell)));
        }
        c.k_max = Some(k_max);
        if c.tail == TailId::Explicit && c.p_tail == 0 {
            return Err(invalid("p_tail", "must be at least 1"));
        }
        if !(c.kappa_min > 0.0 && c.kappa_max >= c.kappa_min && c.kappa_max.is_finite()) {
            return Err(invalid("kappa_min", "need 0 < kappa_min <= kappa_max"));
        }
        if c.kappa_points == 0 {
            return Err(invalid("kappa_points", "must be at least 1"));
        }
        if !(c.window > 0.0 && c.window <= 0.5) {
            return Err(invalid("window", "must be in (0, 0.5]"));
        }
        let log_scale = c.log_scale.unwrap_or_else(|| (c.d as f64).ln());
        if !(log_scale > 0.0 && log_scale.is_finite()) {
            return Err(invalid("log_scale", "must be positive"));
        }
        c.log_scale = Some(log_scale);
        if c.output.is_empty() {
            return Err(invalid("output", "must not be empty"));
        }
        Ok(c)
    }

    /// Effective regularization of each level `1..=max` from the kernel,
    /// used when `zeta` is empty.
    pub fn kernel_zetas(&self, max_level: usize) -> Result<Vec<f64>> {
        let domain = self.domain()?;
        let profile = exact_risk_profile(&self.kernel_spec(), domain)?;
        let lambda = self.lambda.unwrap_or(0.0);
        (1..=max_level.min(profile.max_degree()))
            .map(|l| Ok(effective_regularization(&profile, l, lambda)?.zeta))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::from_toml("d = 12\nlamda = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("lamda"), "{err}");
        let err = ExperimentConfig::from_json(r#"{"d": 12, "sigmaa": 1}"#).unwrap_err();
        assert!(err.to_string().contains("sigmaa"), "{err}");
    }

    #[test]
    fn resolve_is_idempotent_and_round_trips() {
        let raw = ExperimentConfig::from_toml("d = 10\nell = 1\npsi = [0.5, 1.0]\nsigma = 0.3\n").unwrap();
        let c = raw.resolve(Experiment::Krr).unwrap();
        assert_eq!(c.resolve(Experiment::Krr).unwrap(), c);
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap(), c);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&json).unwrap(), c);
        assert_eq!(c.lambda, Some(1e-8 * 1f64.exp()));
    }

    #[test]
    fn bad_values_name_their_key() {
        let c = ExperimentConfig::from_toml("trials = 0").unwrap();
        let err = c.resolve(Experiment::Krr).unwrap_err();
        assert!(err.to_string().contains("`trials`"), "{err}");
        let c = ExperimentConfig::from_toml("experiment = \"gauss\"").unwrap();
        assert!(c.resolve(Experiment::Krr).unwrap_err().to_string().contains("`experiment`"));
    }

    #[test]
    fn default_grid_is_log_spaced() {
        let c = ExperimentConfig::default().resolve(Experiment::Asymptotics).unwrap();
        assert_eq!(c.psi.len(), 100);
        assert_eq!(c.psi[0], 0.05);
        assert_eq!(c.psi[99], 20.0);
    }
}
