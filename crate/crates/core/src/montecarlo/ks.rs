//! One-sample Kolmogorov–Smirnov test against a fully specified Gaussian.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{ensure, Result};

const SERIES_TERMS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `P(K > λ)` for the Kolmogorov distribution.
///
/// Uses the alternating series `2 Σ (-1)^(k-1) e^(-2k²λ²)` for `λ ≥ 1` and the
/// Jacobi-transformed series for the CDF below that, where the alternating
/// one converges slowly. Both are truncated at 100 terms.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let p = if lambda >= 1.0 {
        let mut s = 0.0;
        for k in 1..=SERIES_TERMS {
            let k = k as f64;
            let sign = if k as usize % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * (-2.0 * k * k * lambda * lambda).exp();
        }
        2.0 * s
    } else {
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut s = 0.0;
        for k in 1..=SERIES_TERMS {
            let m = (2 * k - 1) as f64;
            s += (-m * m * c).exp();
        }
        1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s
    };
    p.clamp(0.0, 1.0)
}

/// KS statistic `sup |F_n − Φ|` and its asymptotic p-value at `λ = √n D`.
pub fn ks_test(samples: &[f64], mean: f64, variance: f64) -> Result<KsResult> {
    ensure!(
        variance.is_finite() && variance > 0.0,
        Argument,
        "KS target variance must be positive, got {variance}"
    );
    ensure!(mean.is_finite(), Argument, "KS target mean must be finite, got {mean}");
    ensure!(samples.len() >= 20, Argument, "KS test needs at least 20 samples, got {}", samples.len());
    ensure!(
        samples.iter().all(|v| !v.is_nan()),
        Argument,
        "KS samples contain NaN"
    );
    let normal = Normal::new(mean, variance.sqrt()).expect("validated parameters");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_survival(n.sqrt() * statistic),
    })
}
