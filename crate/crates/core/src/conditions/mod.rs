//! Numerical verification of the hypotheses of the limit theorems.
//!
//! [`check_theorem`] evaluates every condition quantity on a grid of
//! horizons, fits its log-log slope and issues a [`Verdict`] per condition.

mod compare;
pub mod fit;
pub mod norms;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{regime_cumhaz, regime_pathvar, Functional, RateFunction};
use crate::crm::JumpIntensity;
use crate::error::{ensure, Error, Result};
use crate::kernels::Kernel;

pub use compare::{sandwich_compare, Bound, ComparisonReport};
pub use fit::{classify, fit_limit, fit_power_log, fit_slope, least_squares, LimitFit, PowerLogFit, SlopeFit, Verdict};
pub use norms::{contraction_norms, deviation_norm, i_moment, mean_path_second_moment, ContractionNorms};

/// Default horizon grid; geometric so that log-log fits weigh each octave equally.
pub const DEFAULT_T_GRID: [f64; 5] = [50.0, 100.0, 200.0, 400.0, 800.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    CumHaz,
    Path2nd,
    PathVar,
}

impl Theorem {
    pub fn name(&self) -> &'static str {
        match self {
            Theorem::CumHaz => "cumhaz",
            Theorem::Path2nd => "path2nd",
            Theorem::PathVar => "pathvar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cumhaz" | "cum_haz" | "cumulative_hazard" => Some(Theorem::CumHaz),
            "path2nd" | "path_second_moment" => Some(Theorem::Path2nd),
            "pathvar" | "path_var" | "path_variance" => Some(Theorem::PathVar),
            _ => None,
        }
    }

    pub fn functional(&self) -> Functional {
        match self {
            Theorem::CumHaz => Functional::CumulativeHazard,
            Theorem::Path2nd => Functional::PathSecondMoment,
            Theorem::PathVar => Functional::PathVariance,
        }
    }

    fn labels(&self) -> &'static [&'static str] {
        match self {
            Theorem::CumHaz => &["C0^2 I2", "C0^3 I3"],
            Theorem::Path2nd => &[
                "2 C1^2 ||k1||_2^2",
                "C1^4 ||k1||_4^4",
                "C1^4 ||k1 *11 k1||_2^2",
                "C1^4 ||k1 *21 k1||_2^2",
                "C1^2 ||k2 + 2k3||_2^2",
                "C1^3 ||k2 + 2k3||_3^3",
            ],
            Theorem::PathVar => &[
                "C1 / (T C0)^2",
                "2 C1 E[H(T)] / (T^2 C0)",
                "||C1 (k2 + 2k3) - delta C0 k0||_2^2",
            ],
        }
    }
}

/// One condition quantity across the horizon grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSeries {
    /// 1-based condition number as in the theorem statement.
    pub index: usize,
    pub label: String,
    pub values: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub theorem: Theorem,
    pub kernel: Kernel,
    pub intensity: JumpIntensity,
    pub rate: RateFunction,
    pub t_grid: Vec<f64>,
    pub conditions: Vec<ConditionSeries>,
    /// `δ` used in the path-variance conditions: the catalog value when one
    /// exists, otherwise the fitted limit of condition 2.
    pub delta: Option<f64>,
    /// Fitted limit of condition 2 of the path-variance theorem.
    pub delta_estimate: Option<f64>,
}

impl ConditionReport {
    pub fn condition(&self, index: usize) -> Option<&ConditionSeries> {
        self.conditions.iter().find(|c| c.index == index)
    }

    /// One row per (condition, T).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theorem,condition,label,T,value,verdict\n");
        for c in &self.conditions {
            for (t, v) in self.t_grid.iter().zip(&c.values) {
                out.push_str(&format!(
                    "{},{},\"{}\",{},{},{}\n",
                    self.theorem.name(),
                    c.index,
                    c.label,
                    t,
                    v,
                    c.verdict.name()
                ));
            }
        }
        out
    }
}

/// Overrides for quantities that [`check_theorem`] otherwise takes from the catalog.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CheckOptions {
    /// `C_0` for the path-variance conditions.
    pub cumhaz_rate: Option<RateFunction>,
    /// `δ` for condition 3 of the path-variance theorem.
    pub delta: Option<f64>,
}

pub fn check_theorem(
    kernel: &Kernel,
    intensity: &JumpIntensity,
    theorem: Theorem,
    rate: RateFunction,
    t_grid: &[f64],
) -> Result<ConditionReport> {
    check_theorem_with(kernel, intensity, theorem, rate, t_grid, CheckOptions::default())
}

fn validate_rate(rate: &RateFunction, t_grid: &[f64]) -> Result<()> {
    for &t in t_grid {
        let c = rate.eval(t);
        ensure!(c.is_finite() && c > 0.0, Argument, "rate {rate} is not positive and finite at T = {t}");
    }
    Ok(())
}

/// Divergent integrals become `+∞` entries instead of errors.
fn or_infinite(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::Divergent(_)) => Ok(f64::INFINITY),
        other => other,
    }
}

fn verdict_for(t: &[f64], values: &[f64]) -> Verdict {
    if values.iter().any(|v| *v == f64::INFINITY) {
        return Verdict::Diverges {
            slope: f64::INFINITY,
            r2: 1.0,
        };
    }
    classify(t, values)
}

pub fn check_theorem_with(
    kernel: &Kernel,
    intensity: &JumpIntensity,
    theorem: Theorem,
    rate: RateFunction,
    t_grid: &[f64],
    options: CheckOptions,
) -> Result<ConditionReport> {
    kernel.validate()?;
    intensity.validate()?;
    ensure!(t_grid.len() >= 4, Argument, "the horizon grid needs at least 4 points, got {}", t_grid.len());
    ensure!(
        t_grid[0] > 0.0 && t_grid.windows(2).all(|w| w[0] < w[1]),
        Argument,
        "the horizon grid must be positive and strictly increasing"
    );
    validate_rate(&rate, t_grid)?;

    let rows: Vec<Vec<f64>> = match theorem {
        Theorem::CumHaz => t_grid
            .par_iter()
            .map(|&t| {
                let c = rate.eval(t);
                let i2 = or_infinite(i_moment(kernel, intensity, t, 2))?;
                let i3 = or_infinite(i_moment(kernel, intensity, t, 3))?;
                Ok(vec![c * c * i2, c.powi(3) * i3])
            })
            .collect::<Result<_>>()?,
        Theorem::Path2nd => t_grid
            .par_iter()
            .map(|&t| {
                let c = rate.eval(t);
                let n = contraction_norms(kernel, intensity, t)?;
                let inf = |v: f64, ok: bool| if ok { v } else { f64::INFINITY };
                Ok(vec![
                    2.0 * c * c * inf(n.k1_l2_sq, n.converged[0]),
                    c.powi(4) * inf(n.k1_l4_pow4, n.converged[1]),
                    c.powi(4) * inf(n.star11_l2_sq, n.converged[2]),
                    c.powi(4) * inf(n.star21_l2_sq, n.converged[3]),
                    c * c * inf(n.k23_l2_sq, n.converged[4]),
                    c.powi(3) * inf(n.k23_l3_cube, n.converged[5]),
                ])
            })
            .collect::<Result<_>>()?,
        Theorem::PathVar => return check_path_variance(kernel, intensity, rate, t_grid, options),
    };
    Ok(assemble(kernel, intensity, theorem, rate, t_grid, rows, None, None))
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    kernel: &Kernel,
    intensity: &JumpIntensity,
    theorem: Theorem,
    rate: RateFunction,
    t_grid: &[f64],
    rows: Vec<Vec<f64>>,
    delta: Option<f64>,
    delta_estimate: Option<f64>,
) -> ConditionReport {
    let conditions = theorem
        .labels()
        .iter()
        .enumerate()
        .map(|(j, label)| {
            let values: Vec<f64> = rows.iter().map(|r| r[j]).collect();
            ConditionSeries {
                index: j + 1,
                label: (*label).to_string(),
                verdict: verdict_for(t_grid, &values),
                values,
            }
        })
        .collect();
    ConditionReport {
        theorem,
        kernel: *kernel,
        intensity: *intensity,
        rate,
        t_grid: t_grid.to_vec(),
        conditions,
        delta,
        delta_estimate,
    }
}

fn check_path_variance(
    kernel: &Kernel,
    intensity: &JumpIntensity,
    rate: RateFunction,
    t_grid: &[f64],
    options: CheckOptions,
) -> Result<ConditionReport> {
    // C_0 from the override, the catalog, or the natural normalization I_2^(-1/2)
    let c0_rate = options
        .cumhaz_rate
        .or_else(|| regime_cumhaz(kernel, intensity).ok().map(|s| s.rate));
    let first: Vec<(f64, f64, f64)> = t_grid
        .par_iter()
        .map(|&t| {
            let c1 = rate.eval(t);
            let c0 = match c0_rate {
                Some(r) => r.eval(t),
                None => i_moment(kernel, intensity, t, 2)?.powf(-0.5),
            };
            let i1 = or_infinite(i_moment(kernel, intensity, t, 1))?;
            Ok((c0, c1 / (t * c0).powi(2), 2.0 * c1 * i1 / (t * t * c0)))
        })
        .collect::<Result<_>>()?;
    let cond2: Vec<f64> = first.iter().map(|r| r.2).collect();
    let delta_estimate = match classify(t_grid, &cond2) {
        Verdict::ConvergesToPositive { limit_est } => Some(limit_est),
        _ => cond2.last().copied().filter(|v| v.is_finite()),
    };
    let delta = options
        .delta
        .or_else(|| regime_pathvar(kernel, intensity).spec().and_then(|s| s.delta))
        .or(delta_estimate);
    let rows: Vec<Vec<f64>> = t_grid
        .par_iter()
        .zip(&first)
        .map(|(&t, &(c0, cond1, cond2))| {
            let cond3 = match delta {
                Some(d) => or_infinite(deviation_norm(kernel, intensity, t, rate.eval(t), d * c0))?,
                None => f64::NAN,
            };
            Ok(vec![cond1, cond2, cond3])
        })
        .collect::<Result<_>>()?;
    Ok(assemble(
        kernel,
        intensity,
        Theorem::PathVar,
        rate,
        t_grid,
        rows,
        delta,
        delta_estimate,
    ))
}
