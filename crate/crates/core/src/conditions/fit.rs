//! Regression helpers that turn "behaves like d/T" statements into verdicts.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Largest |slope| still read as "converges to a constant".
pub const SLOPE_TOLERANCE: f64 = 0.15;
/// Minimum coefficient of determination for any non-inconclusive verdict.
pub const MIN_R2: f64 = 0.99;

/// Candidate exponents `r` for the convergence model `L + B·T^(-r)`.
const LIMIT_EXPONENTS: [f64; 7] = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// `log y = intercept + p·log T + q·log log T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLogFit {
    pub p: f64,
    pub q: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// `y = limit + coefficient·T^(-exponent)`, with the exponent picked from a fixed ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitFit {
    pub limit: f64,
    pub coefficient: f64,
    pub exponent: f64,
    pub r2: f64,
}

/// Ordinary least squares of `y` on the given columns.
///
/// Returns the coefficients and R². A constant `y` that the model reproduces
/// exactly gets R² = 1.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let k = columns.len();
    ensure!(k >= 1, Argument, "least squares needs at least one column");
    ensure!(n > k, Argument, "least squares needs more points ({n}) than columns ({k})");
    for c in columns {
        ensure!(c.len() == n, Argument, "column length {} does not match {n} observations", c.len());
    }
    ensure!(
        y.iter().chain(columns.iter().flatten()).all(|v| v.is_finite()),
        Argument,
        "least squares input contains non-finite values"
    );
    let design = DMatrix::from_fn(n, k, |i, j| columns[j][i]);
    let target = DVector::from_column_slice(y);
    let coeffs = design
        .clone()
        .svd(true, true)
        .solve(&target, 1e-13)
        .map_err(|e| Error::Argument(format!("least squares failed: {e}")))?;
    let fitted = &design * &coeffs;
    let mean = target.mean();
    let ss_res: f64 = (&target - &fitted).iter().map(|r| r * r).sum();
    let ss_tot: f64 = target.iter().map(|v| (v - mean).powi(2)).sum();
    let scale = target.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let r2 = if ss_tot <= 1e-24 * scale {
        if ss_res <= 1e-20 * scale {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok((coeffs.iter().copied().collect(), r2))
}

fn check_series(t: &[f64], y: &[f64]) -> Result<()> {
    ensure!(t.len() == y.len(), Argument, "{} horizons but {} values", t.len(), y.len());
    ensure!(t.len() >= 4, Argument, "slope fits need at least 4 points, got {}", t.len());
    ensure!(
        t.windows(2).all(|w| w[0] < w[1]) && t[0] > 0.0,
        Argument,
        "horizons must be positive and strictly increasing"
    );
    Ok(())
}

fn check_positive(y: &[f64]) -> Result<()> {
    if let Some(bad) = y.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::Argument(format!("log-log fit needs positive finite values, got {bad}")));
    }
    Ok(())
}

/// Least squares on `(log T, log y)`.
pub fn fit_slope(t: &[f64], y: &[f64]) -> Result<SlopeFit> {
    check_series(t, y)?;
    check_positive(y)?;
    let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let ones = vec![1.0; t.len()];
    let (c, r2) = least_squares(&[ones, lt], &ly)?;
    Ok(SlopeFit {
        slope: c[1],
        intercept: c[0],
        r2,
    })
}

/// Joint regression of `log y` on `log T` and `log log T`; needs `T > 1`.
pub fn fit_power_log(t: &[f64], y: &[f64]) -> Result<PowerLogFit> {
    check_series(t, y)?;
    check_positive(y)?;
    ensure!(t[0] > 1.0, Argument, "log-corrected fits need T > 1");
    let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let llt: Vec<f64> = lt.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let ones = vec![1.0; t.len()];
    let (c, r2) = least_squares(&[ones, lt, llt], &ly)?;
    Ok(PowerLogFit {
        p: c[1],
        q: c[2],
        intercept: c[0],
        r2,
    })
}

/// Best `L + B·T^(-r)` fit over the exponent ladder.
pub fn fit_limit(t: &[f64], y: &[f64]) -> Result<LimitFit> {
    check_series(t, y)?;
    let ones = vec![1.0; t.len()];
    let mut best: Option<LimitFit> = None;
    for r in LIMIT_EXPONENTS {
        let decay: Vec<f64> = t.iter().map(|v| v.powf(-r)).collect();
        let (c, r2) = least_squares(&[ones.clone(), decay], y)?;
        let fit = LimitFit {
            limit: c[0],
            coefficient: c[1],
            exponent: r,
            r2,
        };
        if best.is_none_or(|b| fit.r2 > b.r2) {
            best = Some(fit);
        }
    }
    Ok(best.expect("exponent ladder is non-empty"))
}

/// Asymptotic behaviour of one condition quantity over the horizon grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    ConvergesToPositive { limit_est: f64 },
    VanishesWithSlope { slope: f64, r2: f64 },
    Diverges { slope: f64, r2: f64 },
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::ConvergesToPositive { .. } => "converges_to_positive",
            Verdict::VanishesWithSlope { .. } => "vanishes_with_slope",
            Verdict::Diverges { .. } => "diverges",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    pub fn slope(&self) -> Option<f64> {
        match *self {
            Verdict::VanishesWithSlope { slope, .. } | Verdict::Diverges { slope, .. } => Some(slope),
            _ => None,
        }
    }
}

/// Classifies a series by its log-log slope.
///
/// A flat series (|slope| ≤ 0.15) converges when the limit model fits with
/// R² ≥ 0.99 and a positive limit; otherwise the sign of the slope decides
/// between vanishing and diverging, again only with R² ≥ 0.99.
pub fn classify(t: &[f64], y: &[f64]) -> Verdict {
    if check_series(t, y).is_err() || check_positive(y).is_err() {
        return Verdict::Inconclusive;
    }
    let Ok(fit) = fit_slope(t, y) else {
        return Verdict::Inconclusive;
    };
    if fit.slope.abs() <= SLOPE_TOLERANCE {
        return match fit_limit(t, y) {
            Ok(l) if l.r2 >= MIN_R2 && l.limit > 0.0 => Verdict::ConvergesToPositive { limit_est: l.limit },
            _ => Verdict::Inconclusive,
        };
    }
    if fit.r2 < MIN_R2 {
        return Verdict::Inconclusive;
    }
    if fit.slope < 0.0 {
        Verdict::VanishesWithSlope {
            slope: fit.slope,
            r2: fit.r2,
        }
    } else {
        Verdict::Diverges {
            slope: fit.slope,
            r2: fit.r2,
        }
    }
}
