//! Marchenko-Pastur law, its Stieltjes transform on the negative axis, and the
//! closed-form bias/variance and risk curves of KRR at a critical level.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CDF_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpLaw {
    pub psi: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    /// Mass of the atom at zero, `(1 - 1/psi)_+`.
    pub atom: f64,
}

impl MpLaw {
    pub fn new(psi: f64) -> Result<Self> {
        if !(psi > 0.0) || !psi.is_finite() {
            return Err(Error::InvalidParameter { name: "psi", reason: format!("must be positive, got {psi}") });
        }
        let s = psi.sqrt();
        Ok(Self {
            psi,
            lambda_minus: (1.0 - s) * (1.0 - s),
            lambda_plus: (1.0 + s) * (1.0 + s),
            atom: (1.0 - 1.0 / psi).max(0.0),
        })
    }

    fn center(&self) -> f64 {
        1.0 + self.psi
    }

    fn half_width(&self) -> f64 {
        2.0 * self.psi.sqrt()
    }

    /// Density of the absolutely continuous part.
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.lambda_minus || x >= self.lambda_plus || x <= 0.0 {
            return 0.0;
        }
        ((self.lambda_plus - x) * (x - self.lambda_minus)).sqrt() / (2.0 * PI * self.psi * x)
    }

    /// Mass of the bulk, `min(1, 1/psi)`.
    pub fn bulk_mass(&self) -> f64 {
        1.0 - self.atom
    }

    /// Bulk density in the angle `x = lambda_- + 2w sin^2(theta/2)`, which
    /// removes both square-root edges.
    fn angular_integrand(&self, theta: f64) -> f64 {
        let w = self.half_width();
        let (s, c) = (0.5 * theta).sin_cos();
        let x = self.lambda_minus + 2.0 * w * s * s;
        if x <= 0.0 {
            // lambda_- = 0 and theta = 0: take the limit
            return w * c * c / (PI * self.psi);
        }
        4.0 * w * w * s * s * c * c / (2.0 * PI * self.psi * x)
    }

    fn angle_of(&self, x: f64) -> f64 {
        let u = ((self.center() - x) / self.half_width()).clamp(-1.0, 1.0);
        u.acos()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x >= self.lambda_plus {
            return 1.0;
        }
        let bulk = if x <= self.lambda_minus {
            0.0
        } else {
            let theta = self.angle_of(x);
            adaptive_simpson(&|t| self.angular_integrand(t), 0.0, theta, CDF_TOL)
        };
        (self.atom + bulk).min(1.0)
    }

    /// `lim_{y -> x^-} cdf(y)`; differs from `cdf` only at the atom.
    pub fn cdf_left(&self, x: f64) -> f64 {
        if x == 0.0 && self.atom > 0.0 {
            return 0.0;
        }
        if x <= 0.0 {
            return 0.0;
        }
        self.cdf(x)
    }

    /// Smallest `x` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= self.atom {
            return 0.0;
        }
        let (mut lo, mut hi) = (self.lambda_minus, self.lambda_plus);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * self.lambda_plus {
                break;
            }
        }
        hi
    }

    /// `int g dnu` for a function that is smooth on the bulk.
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F, tol: f64) -> f64 {
        let w = self.half_width();
        let bulk = adaptive_simpson(
            &|t| {
                let s = (0.5 * t).sin();
                self.angular_integrand(t) * g(self.lambda_minus + 2.0 * w * s * s)
            },
            0.0,
            PI,
            tol,
        );
        self.atom * g(0.0) + bulk
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter { name, reason: format!("must be positive, got {v}") });
    }
    Ok(())
}

/// Residual of the defining quadratic `zeta psi r^2 + (zeta - psi + 1) r - 1`.
pub fn stieltjes_residual(psi: f64, zeta: f64, r: f64) -> f64 {
    zeta * psi * r * r + (zeta - psi + 1.0) * r - 1.0
}

/// `(r, r')` of the MP law at `-zeta`: `r = int (x + zeta)^{-1} dnu` and
/// `r'` the derivative of the transform at that point.
pub fn stieltjes_pair(psi: f64, zeta: f64) -> Result<(f64, f64)> {
    check_positive("psi", psi)?;
    check_positive("zeta", zeta)?;
    let a = zeta * psi;
    let b = zeta - psi + 1.0;
    let disc = (b * b + 4.0 * a).sqrt();
    // positive root, in whichever form avoids cancellation
    let mut r = if b >= 0.0 { 2.0 / (b + disc) } else { (disc - b) / (2.0 * a) };
    for _ in 0..2 {
        let f = a * r * r + b * r - 1.0;
        let df = 2.0 * a * r + b;
        if df != 0.0 {
            r -= f / df;
        }
    }
    let rp = (r * r + psi * r * r * r) / (1.0 + a * r * r);
    Ok((r, rp))
}

/// `r`, `u = 1 - zeta r` and `D = u^2 + zeta r^2`.
///
/// `u` is the small root of `psi u^2 - (1 + psi + zeta) u + 1 = 0`, so it
/// is computed without the cancellation in `1 - zeta r`. In these terms
/// `r' = r^3 / D`, `r - zeta r' = r u^2 / D` and both `B` and `V` are
/// ratios of positive quantities.
fn transform_parts(psi: f64, zeta: f64) -> Result<(f64, f64, f64)> {
    let (r, _) = stieltjes_pair(psi, zeta)?;
    let disc = ((psi - 1.0) * (psi - 1.0) + zeta * (2.0 + 2.0 * psi + zeta)).sqrt();
    let u = 2.0 / (1.0 + psi + zeta + disc);
    Ok((r, u, u * u + zeta * r * r))
}

/// `B(psi, zeta) = 1 - psi + psi zeta^2 r'(-zeta)`, evaluated as `u^2 / (r D)`.
pub fn bias(psi: f64, zeta: f64) -> Result<f64> {
    let (r, u, dd) = transform_parts(psi, zeta)?;
    Ok(u * u / (r * dd))
}

/// `V(psi, zeta) = psi [r(-zeta) - zeta r'(-zeta)]`, evaluated as `psi r u^2 / D`.
pub fn variance(psi: f64, zeta: f64) -> Result<f64> {
    let (r, u, dd) = transform_parts(psi, zeta)?;
    Ok(psi * r * u * u / dd)
}

/// `V` as `psi d/dzeta [zeta r(-zeta)]` by central differences.
pub fn variance_fd(psi: f64, zeta: f64) -> Result<f64> {
    let h = 1e-6 * zeta;
    let g = |z: f64| stieltjes_pair(psi, z).map(|(r, _)| z * r);
    Ok(psi * (g(zeta + h)? - g(zeta - h)?) / (2.0 * h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskInputs {
    pub psi: f64,
    pub zeta_star: f64,
    pub f_ell_sq: f64,
    pub f_tail_sq: f64,
    pub sigma_sq: f64,
    pub lambda: f64,
    pub mu_ell: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRisk {
    pub inputs: RiskInputs,
    pub r: f64,
    pub r_prime: f64,
    pub bias: f64,
    pub variance: f64,
    pub r_test: f64,
    pub r_train: f64,
    /// Limit of the RKHS norm divided by `n`.
    pub rkhs_density: f64,
}

pub fn risk_curves(inp: RiskInputs) -> Result<AsymptoticRisk> {
    check_positive("mu_ell", inp.mu_ell)?;
    let (psi, zeta) = (inp.psi, inp.zeta_star);
    let (r, rp) = stieltjes_pair(psi, zeta)?;
    let (_, u, dd) = transform_parts(psi, zeta)?;
    // r - zeta r'
    let gap = r * u * u / dd;
    let bias = u * u / (r * dd);
    let variance = psi * gap;
    let noise = inp.f_tail_sq + inp.sigma_sq;
    let r_test = inp.f_ell_sq * bias + noise * variance + inp.f_tail_sq;
    let lm = inp.lambda / inp.mu_ell;
    let r_train = lm * lm * (inp.f_ell_sq * gap + noise * rp);
    let rkhs_density = inp.f_ell_sq / inp.mu_ell * (u - lm * gap) + noise / inp.mu_ell * (r - lm * rp);
    Ok(AsymptoticRisk { inputs: inp, r, r_prime: rp, bias, variance, r_test, r_train, rkhs_density })
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseSpec {
    /// `F_k^2` per degree.
    pub energies: BTreeMap<usize, f64>,
    pub sigma_sq: f64,
    /// Effective regularization per level; levels without an entry get no inset.
    pub zetas: BTreeMap<usize, f64>,
    /// Half-width of the window around each integer in which the
    /// single-level curve is drawn.
    pub window: f64,
    /// `psi = exp((kappa - l) * log_scale)`, typically `log d`.
    pub log_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaircasePoint {
    pub kappa: f64,
    pub r_test: f64,
    /// `None` on a plateau, otherwise the level whose inset produced the value.
    pub level: Option<usize>,
    pub psi: Option<f64>,
}

impl StaircaseSpec {
    /// `sum_{k > floor} F_k^2`.
    pub fn plateau(&self, floor: usize) -> f64 {
        self.energies.range(floor + 1..).fold(0.0, |s, (_, v)| s + v)
    }

    pub fn level_risk(&self, ell: usize, psi: f64) -> Result<f64> {
        let zeta = *self
            .zetas
            .get(&ell)
            .ok_or(Error::InvalidParameter { name: "zetas", reason: format!("no entry for level {ell}") })?;
        let f_ell = self.energies.get(&ell).copied().unwrap_or(0.0);
        let tail = self.plateau(ell);
        let b = bias(psi, zeta)?;
        let v = variance(psi, zeta)?;
        Ok(f_ell * b + (tail + self.sigma_sq) * v + tail)
    }
}

pub fn staircase_curve(spec: &StaircaseSpec, kappas: &[f64]) -> Result<Vec<StaircasePoint>> {
    kappas
        .iter()
        .map(|&kappa| {
            check_positive("kappa", kappa)?;
            let ell = kappa.round();
            let li = ell as usize;
            if li >= 1 && (kappa - ell).abs() < spec.window && spec.zetas.contains_key(&li) {
                let psi = ((kappa - ell) * spec.log_scale).exp();
                return Ok(StaircasePoint { kappa, r_test: spec.level_risk(li, psi)?, level: Some(li), psi: Some(psi) });
            }
            let floor = kappa.floor() as usize;
            Ok(StaircasePoint { kappa, r_test: spec.plateau(floor), level: None, psi: None })
        })
        .collect()
}
