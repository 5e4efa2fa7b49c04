//! Exact path functionals of a realized hazard rate.
//!
//! All three are computed from the atoms alone. The cumulative hazard is a
//! single jump sum. The path second moment is a sweep over sorted locations:
//! indicator kernels give a piecewise-constant path, the OU kernel a path
//! that decays exponentially between atoms, and in both cases `∫ h²` has a
//! closed form on every piece.

use crate::crm::CrmSample;
use crate::error::{ensure, Error, Result};
use crate::kernels::Kernel;
use crate::numeric::summation::CompensatedSum;

/// Relative size of a negative path variance that is still treated as rounding.
const NEGATIVE_VARIANCE_TOLERANCE: f64 = 1e-12;

fn check(sample: &CrmSample, kernel: &Kernel, horizon: f64) -> Result<()> {
    kernel.validate()?;
    ensure!(
        horizon.is_finite() && horizon > 0.0,
        Domain,
        "horizon must be positive, got {horizon}"
    );
    let needed = kernel.location_window(horizon);
    ensure!(
        sample.window.covers(&needed),
        Argument,
        "sample window [{}, {}] does not cover the locations [{}, {}] that drive {kernel} up to T = {horizon}",
        sample.window.lo,
        sample.window.hi,
        needed.lo,
        needed.hi
    );
    Ok(())
}

/// `H(T) = Σ J_i K_T(x_i)`.
pub fn cumhaz(sample: &CrmSample, kernel: &Kernel, horizon: f64) -> Result<f64> {
    check(sample, kernel, horizon)?;
    Ok(sample.integrate(|x| kernel.k_t_unchecked(horizon, x)))
}

/// `(1/T) ∫_0^T h(t)² dt = (1/T) Σ_i Σ_j J_i J_j Q_T(x_i, x_j)`, by an exact sweep.
pub fn path_second_moment(sample: &CrmSample, kernel: &Kernel, horizon: f64) -> Result<f64> {
    check(sample, kernel, horizon)?;
    let integral = match *kernel {
        Kernel::OrnsteinUhlenbeck { kappa } => ou_square_integral(sample, kappa, horizon),
        _ => indicator_square_integral(sample, kernel, horizon),
    };
    Ok(integral / horizon)
}

/// `path_second_moment − (H(T)/T)²`, the time variance of the path on `[0, T]`.
pub fn path_variance(sample: &CrmSample, kernel: &Kernel, horizon: f64) -> Result<f64> {
    let second = path_second_moment(sample, kernel, horizon)?;
    let mean = cumhaz(sample, kernel, horizon)? / horizon;
    variance_from_moments(second, mean)
}

pub(crate) fn variance_from_moments(second: f64, mean: f64) -> Result<f64> {
    let v = second - mean * mean;
    if v >= 0.0 {
        Ok(v)
    } else if -v <= NEGATIVE_VARIANCE_TOLERANCE * second {
        Ok(0.0)
    } else {
        Err(Error::Consistency(format!(
            "path variance is negative: second moment {second}, squared mean {}",
            mean * mean
        )))
    }
}

/// The three functionals from one pass over the sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathFunctionals {
    pub cumhaz: f64,
    pub path_second_moment: f64,
    pub path_variance: f64,
}

pub fn all_functionals(sample: &CrmSample, kernel: &Kernel, horizon: f64) -> Result<PathFunctionals> {
    let cumhaz = cumhaz(sample, kernel, horizon)?;
    let path_second_moment = path_second_moment(sample, kernel, horizon)?;
    let path_variance = variance_from_moments(path_second_moment, cumhaz / horizon)?;
    Ok(PathFunctionals {
        cumhaz,
        path_second_moment,
        path_variance,
    })
}

/// The symmetric double sum `(1/T) Σ_{i≤j} (2 − δ_ij) J_i J_j Q_T(x_i, x_j)`.
///
/// Quadratic in the number of atoms, except for the rectangular kernel where
/// pairs at distance `≥ 2τ` are skipped after sorting. Kept as an independent
/// check on [`path_second_moment`].
pub fn path_second_moment_pairwise(sample: &CrmSample, kernel: &Kernel, horizon: f64) -> Result<f64> {
    check(sample, kernel, horizon)?;
    let atoms = sorted_atoms(sample, |x| kernel.k_t_unchecked(horizon, x) > 0.0);
    let reach = match *kernel {
        Kernel::Rectangular { tau } => 2.0 * tau,
        _ => f64::INFINITY,
    };
    let mut total = CompensatedSum::new();
    for (i, &(xi, ji)) in atoms.iter().enumerate() {
        total += ji * ji * kernel.q_t_unchecked(horizon, xi, xi);
        for &(xj, jj) in &atoms[i + 1..] {
            if xj - xi >= reach {
                break;
            }
            total += 2.0 * ji * jj * kernel.q_t_unchecked(horizon, xi, xj);
        }
    }
    Ok(total.value() / horizon)
}

/// `h(t) = Σ J_i k(t, x_i)`.
pub fn hazard_at(sample: &CrmSample, kernel: &Kernel, t: f64) -> f64 {
    sample.integrate(|x| kernel.eval(t, x))
}

/// The path on `n + 1` equally spaced times in `[0, T]`.
pub fn hazard_path(sample: &CrmSample, kernel: &Kernel, horizon: f64, n: usize) -> Result<Vec<(f64, f64)>> {
    check(sample, kernel, horizon)?;
    ensure!(n >= 1, Argument, "the path grid needs at least one interval");
    Ok((0..=n)
        .map(|i| {
            let t = horizon * i as f64 / n as f64;
            (t, hazard_at(sample, kernel, t))
        })
        .collect())
}

/// `(location, jump)` pairs passing `keep`, sorted by location.
fn sorted_atoms(sample: &CrmSample, keep: impl Fn(f64) -> bool) -> Vec<(f64, f64)> {
    let mut atoms: Vec<(f64, f64)> = sample
        .atoms
        .iter()
        .filter(|a| keep(a.location))
        .map(|a| (a.location, a.jump))
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    atoms
}

/// Times in `[0, T]` where atom `x` switches on (`+`) or off (`-`).
fn indicator_events(kernel: &Kernel, horizon: f64, x: f64, jump: f64, events: &mut Vec<(f64, f64)>) {
    let mut interval = |a: f64, b: f64| {
        let (a, b) = (a.max(0.0), b.min(horizon));
        if b > a {
            events.push((a, jump));
            events.push((b, -jump));
        }
    };
    match *kernel {
        Kernel::Rectangular { tau } => interval(x - tau, x + tau),
        Kernel::DykstraLaud => {
            if x >= 0.0 {
                interval(x, horizon)
            }
        }
        Kernel::UShaped { beta_center } => {
            if x >= 0.0 {
                interval(0.0, beta_center - x);
                interval(beta_center + x, horizon);
            }
        }
        Kernel::OrnsteinUhlenbeck { .. } => unreachable!("OU paths are not piecewise constant"),
    }
}

/// `∫_0^T h(t)² dt` for a piecewise-constant path.
fn indicator_square_integral(sample: &CrmSample, kernel: &Kernel, horizon: f64) -> f64 {
    let mut events = Vec::with_capacity(2 * sample.len() + 2);
    for a in &sample.atoms {
        indicator_events(kernel, horizon, a.location, a.jump, &mut events);
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut level = CompensatedSum::new();
    let mut total = CompensatedSum::new();
    let mut last = 0.0;
    for (t, delta) in events {
        if t > last {
            let h = level.value();
            total += h * h * (t - last);
            last = t;
        }
        level += delta;
    }
    total.value()
}

/// `∫_0^T h(t)² dt` for the OU kernel.
///
/// Between consecutive atoms `h(t) = √(2κ) S e^(-κ(t - x))` where `S` is the
/// exponentially discounted jump total at the last atom `x`.
fn ou_square_integral(sample: &CrmSample, kappa: f64, horizon: f64) -> f64 {
    let atoms = sorted_atoms(sample, |x| (0.0..=horizon).contains(&x));
    let mut total = CompensatedSum::new();
    let mut discounted = 0.0;
    for (i, &(x, jump)) in atoms.iter().enumerate() {
        discounted += jump;
        let end = atoms.get(i + 1).map_or(horizon, |next| next.0);
        let gap = end - x;
        // 2κ S² ∫_0^gap e^(-2κs) ds
        total += discounted * discounted * -(-2.0 * kappa * gap).exp_m1();
        discounted *= (-kappa * gap).exp();
    }
    total.value()
}
