//! Comparison by pointwise bracketing of kernel and intensity.
//!
//! If `k_lo ≤ k ≤ k_hi` and the intensities are ordered the same way, every
//! second-order quantity of the target sits between those of the bounds, and
//! so does the limiting variance whenever the bounds share a rate.

use serde::{Deserialize, Serialize};

use super::fit::fit_slope;
use super::norms::i_moment;
use crate::asymptotics::regime_cumhaz;
use crate::crm::JumpIntensity;
use crate::error::{ensure, Error, Result};
use crate::kernels::Kernel;

/// Verification grid resolution per axis.
const GRID: usize = 200;
const RATE_SLOPE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub kernel: Kernel,
    pub intensity: JumpIntensity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub t_grid: Vec<f64>,
    pub i2_lo: Vec<f64>,
    pub i2_target: Vec<f64>,
    pub i2_hi: Vec<f64>,
    /// `I2(lo) ≤ I2(target) ≤ I2(hi)` at each horizon.
    pub bracketed: Vec<bool>,
    /// Fitted log-log slope of `C0(lo)/C0(hi) = (I2(hi)/I2(lo))^(1/2)`.
    pub rate_ratio_slope: f64,
    /// `[σ²(lo), σ²(hi)]`.
    pub variance_interval: (f64, f64),
}

impl ComparisonReport {
    pub fn all_bracketed(&self) -> bool {
        self.bracketed.iter().all(|b| *b)
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
}

fn check_kernel_dominance(lo: &Kernel, mid: &Kernel, hi: &Kernel, t_max: f64, x_max: f64) -> Result<()> {
    for t in linspace(0.0, t_max, GRID) {
        for x in linspace(0.0, x_max, GRID) {
            let (a, b, c) = (lo.eval(t, x), mid.eval(t, x), hi.eval(t, x));
            let slack = 1e-12 * b.abs().max(1.0);
            if a > b + slack || b > c + slack {
                return Err(Error::Precondition(format!(
                    "kernel dominance fails at (t, x) = ({t}, {x}): {a} <= {b} <= {c} is false"
                )));
            }
        }
    }
    Ok(())
}

fn check_intensity_dominance(
    lo: &JumpIntensity,
    mid: &JumpIntensity,
    hi: &JumpIntensity,
    x_max: f64,
) -> Result<()> {
    let (ln_v_lo, ln_v_hi) = (1e-6f64.ln(), 50f64.ln());
    for ln_v in linspace(ln_v_lo, ln_v_hi, GRID) {
        let v = ln_v.exp();
        for x in linspace(0.0, x_max, GRID) {
            let (a, b, c) = (lo.density(v, x), mid.density(v, x), hi.density(v, x));
            let slack = 1e-12 * b.abs().max(f64::MIN_POSITIVE);
            if a > b + slack || b > c + slack {
                return Err(Error::Precondition(format!(
                    "intensity dominance fails at (v, x) = ({v}, {x}): {a} <= {b} <= {c} is false"
                )));
            }
        }
    }
    Ok(())
}

/// Brackets the target's `I_2(T)` between those of the two bounds.
///
/// Preconditions checked on a 200 × 200 grid: `k_lo ≤ k ≤ k_hi` in `(t, x)`
/// and `ρ_lo ≤ ρ ≤ ρ_hi` in `(v, x)`. The bounds must also share a rate,
/// i.e. the ratio of their natural normalizations must have log-log slope
/// within 0.05 of zero.
pub fn sandwich_compare(lo: &Bound, hi: &Bound, target: &Bound, t_grid: &[f64]) -> Result<ComparisonReport> {
    ensure!(t_grid.len() >= 4, Argument, "the horizon grid needs at least 4 points");
    ensure!(
        t_grid[0] > 0.0 && t_grid.windows(2).all(|w| w[0] < w[1]),
        Argument,
        "the horizon grid must be positive and strictly increasing"
    );
    for b in [lo, hi, target] {
        b.kernel.validate()?;
        b.intensity.validate()?;
    }
    let t_max = *t_grid.last().expect("non-empty grid");
    let x_max = [lo, hi, target]
        .iter()
        .map(|b| b.kernel.location_window(t_max).hi)
        .fold(0.0, f64::max);
    check_kernel_dominance(&lo.kernel, &target.kernel, &hi.kernel, t_max, x_max)?;
    check_intensity_dominance(&lo.intensity, &target.intensity, &hi.intensity, x_max)?;

    let series = |b: &Bound| -> Result<Vec<f64>> {
        t_grid.iter().map(|&t| i_moment(&b.kernel, &b.intensity, t, 2)).collect()
    };
    let i2_lo = series(lo)?;
    let i2_target = series(target)?;
    let i2_hi = series(hi)?;
    let bracketed = (0..t_grid.len())
        .map(|j| {
            let slack = 1e-9 * i2_target[j];
            i2_lo[j] <= i2_target[j] + slack && i2_target[j] <= i2_hi[j] + slack
        })
        .collect();

    let ratio: Vec<f64> = i2_hi.iter().zip(&i2_lo).map(|(h, l)| (h / l).sqrt()).collect();
    let rate_ratio_slope = fit_slope(t_grid, &ratio)?.slope;
    ensure!(
        rate_ratio_slope.abs() <= RATE_SLOPE_TOLERANCE,
        Precondition,
        "the bounds do not share a rate: C0(lo)/C0(hi) has log-log slope {rate_ratio_slope}"
    );

    let cataloged = regime_cumhaz(&lo.kernel, &lo.intensity).and_then(|a| {
        regime_cumhaz(&hi.kernel, &hi.intensity).map(|b| (a, b))
    });
    let variance_interval = match cataloged {
        Ok((a, b)) if a.rate == b.rate => (a.limit_variance, b.limit_variance),
        _ => {
            // normalize by the upper bound's natural rate at the largest horizon
            let last = t_grid.len() - 1;
            (i2_lo[last] / i2_hi[last], 1.0)
        }
    };
    Ok(ComparisonReport {
        t_grid: t_grid.to_vec(),
        i2_lo,
        i2_target,
        i2_hi,
        bracketed,
        rate_ratio_slope,
        variance_interval,
    })
}
