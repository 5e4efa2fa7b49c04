//! Monte Carlo checks of the Gaussian limits.
//!
//! Each replicate draws a truncated measure on the kernel's location window,
//! evaluates a path functional exactly, and standardizes it as
//! `rate(T) · (value − centering(T))`. The standardized sample is then tested
//! against `Normal(0, σ²)` with σ² from the regime catalog.
//!
//! Truncating jumps below `ε` shifts the mean of every functional. The shift
//! is computed by quadrature from the truncated jump moments and removed from
//! the centering, so only the fluctuation of the discarded jumps is left.
//! That fluctuation must stay below 1% of the target standard deviation.

mod functionals;
mod ks;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{lookup, Functional, RegimeSpec};
use crate::conditions::i_moment;
use crate::conditions::norms::{location_integral, path_second_moment_parts};
use crate::crm::{JumpIntensity, Sampler};
use crate::error::{ensure, Error, Result};
use crate::kernels::Kernel;
use crate::rng::{replicate_rng, worker_pool};

pub use functionals::{
    all_functionals, cumhaz, hazard_at, hazard_path, path_second_moment, path_second_moment_pairwise,
    path_variance, PathFunctionals,
};
pub use ks::{kolmogorov_survival, ks_test, KsResult};

pub const DEFAULT_EPSILON: f64 = 1e-6;
pub const MIN_REPLICATES: usize = 100;
/// Largest allowed ratio of the discarded-jump standard deviation to the target one.
pub const TRUNCATION_BUDGET: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenteringMode {
    /// The catalog's centering, corrected for truncation.
    Catalog,
    /// The exact finite-horizon mean of the truncated functional, by quadrature.
    QuadratureI1,
}

impl CenteringMode {
    pub fn name(&self) -> &'static str {
        match self {
            CenteringMode::Catalog => "catalog",
            CenteringMode::QuadratureI1 => "quadrature_i1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "catalog" => Ok(CenteringMode::Catalog),
            "quadrature_i1" | "quadrature" => Ok(CenteringMode::QuadratureI1),
            other => Err(Error::Argument(format!(
                "unknown centering mode '{other}', expected catalog or quadrature_i1"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kernel: Kernel,
    pub intensity: JumpIntensity,
    pub functional: Functional,
    pub horizon: f64,
    pub replicates: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub centering_mode: CenteringMode,
}

impl ExperimentConfig {
    pub fn new(kernel: Kernel, intensity: JumpIntensity, functional: Functional, horizon: f64) -> Self {
        ExperimentConfig {
            kernel,
            intensity,
            functional,
            horizon,
            replicates: 2000,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            centering_mode: CenteringMode::Catalog,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        self.intensity.validate()?;
        ensure!(
            self.horizon.is_finite() && self.horizon > 0.0,
            Domain,
            "horizon must be positive, got {}",
            self.horizon
        );
        ensure!(
            self.replicates >= MIN_REPLICATES,
            Argument,
            "at least {MIN_REPLICATES} replicates are needed, got {}",
            self.replicates
        );
        ensure!(
            self.epsilon.is_finite() && self.epsilon > 0.0,
            Domain,
            "epsilon must be positive, got {}",
            self.epsilon
        );
        Ok(())
    }
}

/// Effect of discarding the jumps below `ε` on one functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationEffect {
    /// Exact mean of the functional for the full measure.
    pub full_mean: f64,
    /// Exact mean for the truncated measure actually simulated.
    pub truncated_mean: f64,
    /// Variance of the first-order contribution of the discarded jumps.
    pub lost_variance: f64,
    /// `Var[H(T)]` under truncation. The path-variance centering uses
    /// `E[H]²/T²` where the mean of `(H/T)²` would add this over `T²`.
    pub cumhaz_variance: f64,
}

impl TruncationEffect {
    pub fn mean_shift(&self) -> f64 {
        self.full_mean - self.truncated_mean
    }
}

/// Mean shift and lost fluctuation caused by truncating at `ε`.
pub fn truncation_effect(
    kernel: &Kernel,
    intensity: &JumpIntensity,
    functional: Functional,
    horizon: f64,
    epsilon: f64,
) -> Result<TruncationEffect> {
    let t = horizon;
    let lost = |order: u32, x: f64| intensity.truncated_moment(order, epsilon, x);
    let i1 = i_moment(kernel, intensity, t, 1)?;
    let lost_mean = location_integral(kernel, intensity, t, "truncated mean", |x| {
        let k = kernel.k_t_unchecked(t, x);
        if k == 0.0 {
            0.0
        } else {
            k * lost(1, x)
        }
    })?;
    let lost_cumhaz_variance = location_integral(kernel, intensity, t, "truncated variance", |x| {
        let k = kernel.k_t_unchecked(t, x);
        if k == 0.0 {
            0.0
        } else {
            k * k * lost(2, x)
        }
    })?;
    let cumhaz_variance = i_moment(kernel, intensity, t, 2)? - lost_cumhaz_variance;
    if functional == Functional::CumulativeHazard {
        return Ok(TruncationEffect {
            full_mean: i1,
            truncated_mean: i1 - lost_mean,
            lost_variance: lost_cumhaz_variance,
            cumhaz_variance,
        });
    }
    ensure!(
        intensity.is_homogeneous(),
        Unsupported,
        "truncation corrections for {} need a homogeneous intensity",
        functional.name()
    );
    let (k1, k2) = (intensity.moment_at(1, 0.0), intensity.moment_at(2, 0.0));
    let (d1, d2) = (lost(1, 0.0), lost(2, 0.0));
    // truncation scales the mean path by a1 and the jump second moment by a2
    let (a1, a2) = (1.0 - d1 / k1, 1.0 - d2 / k2);
    let (mean_sq, diag) = path_second_moment_parts(kernel, intensity, t)?;
    let second_full = (mean_sq + diag) / t;
    let second_trunc = (a1 * a1 * mean_sq + a2 * diag) / t;
    let variance_term = functional == Functional::PathVariance;
    let level = if variance_term { i1 / (t * t) } else { 0.0 };
    // δψ ≈ 2 Σ_small J (kt3(x) − level · K_T(x))
    let lost_variance = location_integral(kernel, intensity, t, "truncated fluctuation", |x| {
        let k = kernel.k_t_unchecked(t, x);
        if k == 0.0 {
            return 0.0;
        }
        let g = kernel.kt3_unchecked(intensity, t, x) - level * k;
        4.0 * d2 * g * g
    })?;
    let (full_mean, truncated_mean) = if variance_term {
        (
            second_full - (i1 / t).powi(2),
            second_trunc - (a1 * i1 / t).powi(2),
        )
    } else {
        (second_full, second_trunc)
    };
    Ok(TruncationEffect {
        full_mean,
        truncated_mean,
        lost_variance,
        cumhaz_variance,
    })
}

/// Raw functional values for replicates `0..R`, in replicate order.
///
/// Replicate `r` always uses random stream `r` of the seed, so the result does
/// not depend on the number of workers.
pub fn replicate_values(config: &ExperimentConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let window = config.kernel.location_window(config.horizon);
    let sampler = Sampler::new(config.intensity, window, config.epsilon)?;
    let (kernel, t, functional) = (config.kernel, config.horizon, config.functional);
    worker_pool().install(|| {
        (0..config.replicates)
            .into_par_iter()
            .map(|r| {
                let sample = sampler.sample(&mut replicate_rng(config.seed, r as u64));
                match functional {
                    Functional::CumulativeHazard => cumhaz(&sample, &kernel, t),
                    Functional::PathSecondMoment => path_second_moment(&sample, &kernel, t),
                    Functional::PathVariance => path_variance(&sample, &kernel, t),
                }
            })
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub config: ExperimentConfig,
    pub regime: RegimeSpec,
    pub rate: f64,
    pub centering: f64,
    pub truncation: TruncationEffect,
    pub values: Vec<f64>,
    pub standardized_samples: Vec<f64>,
    pub sample_mean: f64,
    pub sample_variance: f64,
    pub target_variance: f64,
    pub ks_statistic: f64,
    pub ks_p_value: f64,
    pub variance_ratio: f64,
    /// Standard deviation of the discarded jumps' contribution over the target one.
    pub truncation_ratio: f64,
    pub truncation_budget_ok: bool,
}

impl CltReport {
    /// `replicate,value,standardized`, one row per replicate.
    pub fn samples_csv(&self) -> String {
        let mut out = String::from("replicate,value,standardized\n");
        for (r, (v, z)) in self.values.iter().zip(&self.standardized_samples).enumerate() {
            out.push_str(&format!("{r},{v},{z}\n"));
        }
        out
    }
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Simulates, standardizes and tests one regime.
///
/// Refuses to run when the pair has no cataloged regime or when the
/// discarded jumps would move the standardized statistic by more than 1% of
/// its target standard deviation.
pub fn run_clt(config: &ExperimentConfig) -> Result<CltReport> {
    config.validate()?;
    let regime = lookup(&config.kernel, &config.intensity, config.functional)?;
    let t = config.horizon;
    let rate = regime.rate.eval(t);
    let target_variance = regime.limit_variance;
    ensure!(
        target_variance.is_finite() && target_variance > 0.0,
        Consistency,
        "cataloged limit variance must be positive, got {target_variance}"
    );
    let truncation = truncation_effect(&config.kernel, &config.intensity, config.functional, t, config.epsilon)?;
    let truncation_ratio = rate * truncation.lost_variance.sqrt() / target_variance.sqrt();
    if truncation_ratio > TRUNCATION_BUDGET {
        return Err(Error::TruncationBudget(format!(
            "jumps below epsilon = {} carry a standardized fluctuation of {:.4e}, {:.2}% of the target \
             standard deviation (budget {}%); mean deficit {:.4e}; lower epsilon",
            config.epsilon,
            rate * truncation.lost_variance.sqrt(),
            100.0 * truncation_ratio,
            100.0 * TRUNCATION_BUDGET,
            truncation.mean_shift()
        )));
    }
    let centering = match (config.centering_mode, regime.centering.eval(t)) {
        (CenteringMode::Catalog, Some(c)) => c - truncation.mean_shift(),
        _ => truncation.truncated_mean,
    };

    let values = replicate_values(config)?;
    let standardized_samples: Vec<f64> = values.iter().map(|v| rate * (v - centering)).collect();
    let (sample_mean, sample_variance) = mean_and_variance(&standardized_samples);
    let ks = ks_test(&standardized_samples, 0.0, target_variance)?;
    Ok(CltReport {
        config: *config,
        regime,
        rate,
        centering,
        truncation,
        values,
        standardized_samples,
        sample_mean,
        sample_variance,
        target_variance,
        ks_statistic: ks.statistic,
        ks_p_value: ks.p_value,
        variance_ratio: sample_variance / target_variance,
        truncation_ratio,
        truncation_budget_ok: true,
    })
}
