//! Mixing kernels `k(t, x)` of the random hazard rate `h(t) = ∫ k(t, x) μ(dx)`.
//!
//! Besides pointwise evaluation each kernel knows its time integrals
//! `K_T(x) = ∫_0^T k(t, x) dt` and `Q_T(x, y) = ∫_0^T k(t, x) k(t, y) dt`
//! in closed form, the support of `x ↦ K_T(x)`, and the points where these
//! functions fail to be smooth. The quadrature code relies on the latter to
//! keep every panel free of kinks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crm::{JumpIntensity, Window};
use crate::error::{ensure, Result};
use crate::numeric::quadrature::{breakpoints, integrate_with_breaks, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    /// `k(t, x) = 1{|t - x| ≤ τ}`
    Rectangular { tau: f64 },
    /// `k(t, x) = 1{0 ≤ x ≤ t}`; paths are nondecreasing.
    DykstraLaud,
    /// `k(t, x) = √(2κ) e^(-κ(t - x)) 1{0 ≤ x ≤ t}`
    OrnsteinUhlenbeck { kappa: f64 },
    /// `k(t, x) = 1{|t - β| ≥ x}`; paths have a minimum at `t = β`.
    UShaped { beta_center: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Rectangular { tau } => {
                ensure!(tau.is_finite() && tau > 0.0, Domain, "rectangular kernel needs tau > 0, got {tau}")
            }
            Kernel::OrnsteinUhlenbeck { kappa } => {
                ensure!(kappa.is_finite() && kappa > 0.0, Domain, "OU kernel needs kappa > 0, got {kappa}")
            }
            Kernel::UShaped { beta_center } => ensure!(
                beta_center.is_finite() && beta_center > 0.0,
                Domain,
                "U-shaped kernel needs beta > 0, got {beta_center}"
            ),
            Kernel::DykstraLaud => {}
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Rectangular { .. } => "rectangular",
            Kernel::DykstraLaud => "dykstra_laud",
            Kernel::OrnsteinUhlenbeck { .. } => "ornstein_uhlenbeck",
            Kernel::UShaped { .. } => "u_shaped",
        }
    }

    #[inline]
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match *self {
            Kernel::Rectangular { tau } => indicator((t - x).abs() <= tau),
            Kernel::DykstraLaud => indicator(0.0 <= x && x <= t),
            Kernel::OrnsteinUhlenbeck { kappa } => {
                if 0.0 <= x && x <= t {
                    (2.0 * kappa).sqrt() * (-kappa * (t - x)).exp()
                } else {
                    0.0
                }
            }
            Kernel::UShaped { beta_center } => indicator((t - beta_center).abs() >= x),
        }
    }

    /// Largest value of `t ↦ k(t, x)` over all `x`.
    pub fn sup_value(&self) -> f64 {
        match *self {
            Kernel::OrnsteinUhlenbeck { kappa } => (2.0 * kappa).sqrt(),
            _ => 1.0,
        }
    }

    /// Whether the kernel only takes the values 0 and 1.
    pub fn is_indicator(&self) -> bool {
        !matches!(self, Kernel::OrnsteinUhlenbeck { .. })
    }

    /// `K_T(x) = ∫_0^T k(t, x) dt`.
    pub fn k_t(&self, horizon: f64, x: f64) -> Result<f64> {
        check_horizon(horizon)?;
        Ok(self.k_t_unchecked(horizon, x))
    }

    #[inline]
    pub(crate) fn k_t_unchecked(&self, horizon: f64, x: f64) -> f64 {
        let t = horizon;
        match *self {
            Kernel::Rectangular { tau } => overlap(x - tau, x + tau, 0.0, t),
            Kernel::DykstraLaud => {
                if x < 0.0 {
                    0.0
                } else {
                    (t - x).max(0.0)
                }
            }
            Kernel::OrnsteinUhlenbeck { kappa } => {
                if x < 0.0 || x > t {
                    0.0
                } else {
                    (2.0 / kappa).sqrt() * -(-kappa * (t - x)).exp_m1()
                }
            }
            Kernel::UShaped { beta_center } => u_length(beta_center, t, x),
        }
    }

    /// `Q_T(x, y) = ∫_0^T k(t, x) k(t, y) dt`; symmetric by construction.
    pub fn q_t(&self, horizon: f64, x: f64, y: f64) -> Result<f64> {
        check_horizon(horizon)?;
        Ok(self.q_t_unchecked(horizon, x, y))
    }

    #[inline]
    pub(crate) fn q_t_unchecked(&self, horizon: f64, x: f64, y: f64) -> f64 {
        let t = horizon;
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        match *self {
            Kernel::Rectangular { tau } => overlap(hi - tau, lo + tau, 0.0, t),
            Kernel::DykstraLaud => {
                if lo < 0.0 {
                    0.0
                } else {
                    (t - hi).max(0.0)
                }
            }
            Kernel::OrnsteinUhlenbeck { kappa } => {
                if lo < 0.0 || hi > t {
                    0.0
                } else {
                    // e^(-κ|x-y|) - e^(κ(x+y-2T)), written to avoid overflow
                    let a = (-kappa * (hi - lo)).exp();
                    let b = (kappa * (lo + hi - 2.0 * t)).exp();
                    (a - b).max(0.0)
                }
            }
            // the sets {t : |t-β| ≥ x} are nested, so the overlap is that of the larger x
            Kernel::UShaped { beta_center } => {
                if lo < 0.0 {
                    0.0
                } else {
                    u_length(beta_center, t, hi)
                }
            }
        }
    }

    /// Locations whose atoms can influence the path on `[0, T]`.
    pub fn location_window(&self, horizon: f64) -> Window {
        let hi = match *self {
            Kernel::Rectangular { tau } => horizon + tau,
            Kernel::DykstraLaud | Kernel::OrnsteinUhlenbeck { .. } => horizon,
            Kernel::UShaped { beta_center } => beta_center.max(horizon - beta_center),
        };
        Window { lo: 0.0, hi }
    }

    /// Kinks of `x ↦ K_T(x)` (and of any function of `K_T` alone).
    pub fn k_breakpoints(&self, horizon: f64) -> Vec<f64> {
        let t = horizon;
        match *self {
            Kernel::Rectangular { tau } => vec![tau, t - tau, t + tau],
            Kernel::DykstraLaud | Kernel::OrnsteinUhlenbeck { .. } => vec![t],
            Kernel::UShaped { beta_center: b } => vec![b, t - b, b - t],
        }
    }

    /// Kinks of `w ↦ Q_T(x, w)`.
    pub fn q_breakpoints(&self, horizon: f64, x: f64) -> Vec<f64> {
        let t = horizon;
        match *self {
            Kernel::Rectangular { tau } => vec![x - 2.0 * tau, x, x + 2.0 * tau, tau, t - tau, t + tau],
            Kernel::DykstraLaud | Kernel::OrnsteinUhlenbeck { .. } => vec![x, t],
            Kernel::UShaped { beta_center: b } => vec![x, b, t - b, b - t],
        }
    }

    /// Discontinuities of `t ↦ k(t, x)`.
    pub fn time_breakpoints(&self, x: f64) -> Vec<f64> {
        match *self {
            Kernel::Rectangular { tau } => vec![x - tau, x + tau],
            Kernel::DykstraLaud | Kernel::OrnsteinUhlenbeck { .. } => vec![x],
            Kernel::UShaped { beta_center: b } => vec![b - x, b + x],
        }
    }

    /// Length scale over which `K_T` and `Q_T` vary smoothly between breakpoints;
    /// infinite for the piecewise-linear kernels.
    pub fn smooth_scale(&self) -> f64 {
        match *self {
            Kernel::OrnsteinUhlenbeck { kappa } => 1.0 / kappa,
            _ => f64::INFINITY,
        }
    }

    /// Distance beyond which `Q_T(x, w)` is negligible relative to `Q_T(x, x)`.
    pub fn reach(&self) -> f64 {
        match *self {
            Kernel::Rectangular { tau } => 2.0 * tau,
            Kernel::OrnsteinUhlenbeck { kappa } => 40.0 / kappa,
            Kernel::DykstraLaud | Kernel::UShaped { .. } => f64::INFINITY,
        }
    }

    /// Mean hazard `E[h(t)] = ∫ K^(1)(x) k(t, x) dx`.
    pub fn mean_hazard(&self, intensity: &JumpIntensity, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        if intensity.is_homogeneous() {
            let k1 = intensity.moment_at(1, 0.0);
            let mass = match *self {
                Kernel::Rectangular { tau } => (t + tau).min(2.0 * tau),
                Kernel::DykstraLaud => t,
                Kernel::OrnsteinUhlenbeck { kappa } => (2.0 / kappa).sqrt() * -(-kappa * t).exp_m1(),
                Kernel::UShaped { beta_center } => (t - beta_center).abs(),
            };
            return k1 * mass;
        }
        let (lo, hi) = match *self {
            Kernel::Rectangular { tau } => ((t - tau).max(0.0), t + tau),
            Kernel::DykstraLaud | Kernel::OrnsteinUhlenbeck { .. } => (0.0, t),
            Kernel::UShaped { beta_center } => (0.0, (t - beta_center).abs()),
        };
        if hi <= lo {
            return 0.0;
        }
        let kinks = intensity.parameter_fn().map(|f| f.kinks()).unwrap_or_default();
        let pts = breakpoints(lo, hi, kinks);
        integrate_with_breaks(
            |x| intensity.moment_at(1, x) * self.eval(t, x),
            &pts,
            Tolerance::new(1e-300, 1e-11),
        )
        .value
    }

    /// `k_T^(3)(s, x) / s = (1/T) ∫_0^T k(t, x) E[h(t)] dt`.
    pub fn kt3(&self, intensity: &JumpIntensity, horizon: f64, x: f64) -> Result<f64> {
        check_horizon(horizon)?;
        Ok(self.kt3_unchecked(intensity, horizon, x))
    }

    pub(crate) fn kt3_unchecked(&self, intensity: &JumpIntensity, horizon: f64, x: f64) -> f64 {
        let t = horizon;
        if x < 0.0 || self.k_t_unchecked(t, x) == 0.0 {
            return 0.0;
        }
        if !intensity.is_homogeneous() {
            return self.kt3_by_quadrature(intensity, t, x);
        }
        let k1 = intensity.moment_at(1, 0.0);
        let integral = match *self {
            Kernel::Rectangular { tau } => {
                // E[h(t)] = K1 (t + τ) on [0, τ], 2τ K1 beyond
                let a = (x - tau).max(0.0);
                let b = (x + tau).min(t);
                let ramp_hi = b.min(tau);
                let ramp = if ramp_hi > a {
                    0.5 * ((ramp_hi + tau).powi(2) - (a + tau).powi(2))
                } else {
                    0.0
                };
                let flat_lo = a.max(tau);
                let flat = if b > flat_lo { 2.0 * tau * (b - flat_lo) } else { 0.0 };
                ramp + flat
            }
            Kernel::DykstraLaud => 0.5 * (t * t - x * x),
            Kernel::OrnsteinUhlenbeck { kappa } => {
                // 2 ∫_x^T e^(-κ(t-x)) (1 - e^(-κt)) dt
                let a = -(-kappa * (t - x)).exp_m1() / kappa;
                let b = ((-kappa * x).exp() - (kappa * (x - 2.0 * t)).exp()) / (2.0 * kappa);
                2.0 * (a - b)
            }
            Kernel::UShaped { beta_center: beta } => {
                let mut acc = 0.0;
                let left = (beta - x).min(t);
                if left > 0.0 {
                    acc += beta * left - 0.5 * left * left;
                }
                if t > beta + x {
                    acc += 0.5 * ((t - beta).powi(2) - x * x);
                }
                acc
            }
        };
        k1 * integral / t
    }

    /// `(1/T) ∫ K^(1)(w) Q_T(x, w) dw`, the same quantity after swapping the integrals.
    pub(crate) fn kt3_by_quadrature(&self, intensity: &JumpIntensity, horizon: f64, x: f64) -> f64 {
        let window = self.location_window(horizon);
        let mut kinks = self.q_breakpoints(horizon, x);
        if let Some(f) = intensity.parameter_fn() {
            kinks.extend(f.kinks());
        }
        let pts = breakpoints(window.lo, window.hi, kinks);
        let value = integrate_with_breaks(
            |w| intensity.moment_at(1, w) * self.q_t_unchecked(horizon, x, w),
            &pts,
            Tolerance::new(1e-300, 1e-11),
        )
        .value;
        value / horizon
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Rectangular { tau } => write!(f, "rectangular(tau={tau})"),
            Kernel::DykstraLaud => write!(f, "dykstra_laud"),
            Kernel::OrnsteinUhlenbeck { kappa } => write!(f, "ornstein_uhlenbeck(kappa={kappa})"),
            Kernel::UShaped { beta_center } => write!(f, "u_shaped(beta={beta_center})"),
        }
    }
}

/// `K_T(x)` as a free function; see [`Kernel::k_t`].
pub fn k_t(kernel: &Kernel, horizon: f64, x: f64) -> Result<f64> {
    kernel.k_t(horizon, x)
}

/// `Q_T(x, y)` as a free function; see [`Kernel::q_t`].
pub fn q_t(kernel: &Kernel, horizon: f64, x: f64, y: f64) -> Result<f64> {
    kernel.q_t(horizon, x, y)
}

/// Location window as a free function; see [`Kernel::location_window`].
pub fn location_window(kernel: &Kernel, horizon: f64) -> Window {
    kernel.location_window(horizon)
}

fn check_horizon(horizon: f64) -> Result<()> {
    ensure!(
        horizon.is_finite() && horizon > 0.0,
        Argument,
        "horizon T must be positive, got {horizon}"
    );
    Ok(())
}

#[inline]
fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Length of `[a, b] ∩ [c, d]`.
#[inline]
fn overlap(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (b.min(d) - a.max(c)).max(0.0)
}

/// Length of `{t ∈ [0, T] : |t - β| ≥ x}` for `x ≥ 0`.
#[inline]
fn u_length(beta: f64, horizon: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    (beta - x).clamp(0.0, horizon) + (horizon - beta - x).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crm::PositiveFunction;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    }

    fn time_quad<F: Fn(f64) -> f64>(f: F, horizon: f64, kinks: Vec<f64>) -> f64 {
        let pts = breakpoints(0.0, horizon, kinks);
        integrate_with_breaks(f, &pts, Tolerance::new(1e-14, 1e-13)).value
    }

    #[test]
    fn documented_eval_values() {
        assert_eq!(Kernel::Rectangular { tau: 1.0 }.eval(2.0, 2.5), 1.0);
        assert_eq!(Kernel::DykstraLaud.eval(1.0, 2.0), 0.0);
        assert!((Kernel::OrnsteinUhlenbeck { kappa: 2.0 }.eval(3.0, 3.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn documented_time_integrals() {
        assert_eq!(Kernel::Rectangular { tau: 1.0 }.k_t(10.0, 5.0).unwrap(), 2.0);
        assert_eq!(Kernel::DykstraLaud.k_t(3.0, 1.0).unwrap(), 2.0);
        assert_eq!(Kernel::UShaped { beta_center: 2.0 }.k_t(10.0, 1.0).unwrap(), 8.0);
        let q = Kernel::OrnsteinUhlenbeck { kappa: 1.0 }.q_t(20.0, 0.0, 0.0).unwrap();
        assert!((q - (1.0 - (-40.0f64).exp())).abs() < 1e-15);
        assert_eq!(Kernel::Rectangular { tau: 1.0 }.q_t(20.0, 5.0, 5.0).unwrap(), 2.0);
        assert_eq!(Kernel::DykstraLaud.q_t(3.0, 1.0, 2.0).unwrap(), 1.0);
        assert!(Kernel::DykstraLaud.k_t(0.0, 1.0).is_err());
        assert!(Kernel::DykstraLaud.q_t(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn rectangular_branches_match_piecewise_form() {
        let tau = 1.5;
        let t = 20.0;
        let k = Kernel::Rectangular { tau };
        for x in [0.0, 0.7, 1.5, 4.0, 18.0, 18.5, 20.0, 21.4, 21.5, 30.0] {
            let want = if x < tau {
                x + tau
            } else if x < t - tau {
                2.0 * tau
            } else if x <= t + tau {
                t + tau - x
            } else {
                0.0
            };
            assert!((k.k_t(t, x).unwrap() - want).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn location_windows() {
        assert_eq!(Kernel::Rectangular { tau: 2.0 }.location_window(10.0), Window { lo: 0.0, hi: 12.0 });
        assert_eq!(Kernel::DykstraLaud.location_window(5.0), Window { lo: 0.0, hi: 5.0 });
        let u = Kernel::UShaped { beta_center: 3.0 };
        assert_eq!(u.location_window(4.0), Window { lo: 0.0, hi: 3.0 });
        // nothing beyond the window reaches the path
        for i in 0..=400 {
            let t = 4.0 * i as f64 / 400.0;
            assert_eq!(u.eval(t, 3.0 + 1e-9), 0.0);
        }
    }

    #[test]
    fn mean_hazard_homogeneous_values() {
        let gg = JumpIntensity::generalized_gamma(0.5, 2.0).unwrap();
        let k1 = gg.moment(1, None).unwrap();
        let rect = Kernel::Rectangular { tau: 1.3 };
        assert!(rel(rect.mean_hazard(&gg, 5.0), 2.6 * k1) < 1e-14);
        assert!(rel(Kernel::DykstraLaud.mean_hazard(&gg, 4.0), 4.0 * k1) < 1e-14);
        assert_eq!(Kernel::DykstraLaud.mean_hazard(&gg, 0.0), 0.0);
        assert_eq!(Kernel::OrnsteinUhlenbeck { kappa: 1.0 }.mean_hazard(&gg, 0.0), 0.0);
    }

    #[test]
    fn rectangular_kt3_interior_value() {
        // E[h] = 2τK1 on the whole window of k(·, x), which has length 2τ
        let gg = JumpIntensity::generalized_gamma(0.5, 1.0).unwrap();
        let k = Kernel::Rectangular { tau: 1.0 };
        let t = 50.0;
        for x in [2.0, 10.0, 49.0] {
            assert!(rel(k.kt3(&gg, t, x).unwrap(), 4.0 / t) < 1e-14);
        }
        assert_eq!(k.kt3(&gg, t, 52.0).unwrap(), 0.0);
    }

    #[test]
    fn ou_kt3_matches_nested_quadrature() {
        let eg = JumpIntensity::extended_gamma(PositiveFunction::Constant { a: 1.0 }).unwrap();
        let k = Kernel::OrnsteinUhlenbeck { kappa: 1.0 };
        let (t, x) = (10.0, 1.0);
        let nested = time_quad(|s| k.eval(s, x) * k.mean_hazard(&eg, s), t, vec![x]) / t;
        assert!(rel(k.kt3(&eg, t, x).unwrap(), nested) < 1e-10);
    }

    #[test]
    fn nonhomogeneous_mean_hazard_and_kt3() {
        let eg = JumpIntensity::extended_gamma(PositiveFunction::AffineSqrt { a: 1.0, b: 1.0 }).unwrap();
        let k = Kernel::DykstraLaud;
        let m = k.mean_hazard(&eg, 9.0);
        // ∫_0^9 dx / (1 + √x) = 2(√9 - ln(1 + √9))
        assert!(rel(m, 2.0 * (3.0 - 4f64.ln())) < 1e-10);
        let t = 9.0;
        let nested = time_quad(|s| k.eval(s, 2.0) * k.mean_hazard(&eg, s), t, vec![2.0]) / t;
        assert!(rel(k.kt3(&eg, t, 2.0).unwrap(), nested) < 1e-9);
    }

    fn arb_kernel() -> impl Strategy<Value = Kernel> {
        prop_oneof![
            (0.1f64..5.0).prop_map(|tau| Kernel::Rectangular { tau }),
            Just(Kernel::DykstraLaud),
            (0.1f64..4.0).prop_map(|kappa| Kernel::OrnsteinUhlenbeck { kappa }),
            (0.1f64..30.0).prop_map(|beta_center| Kernel::UShaped { beta_center }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(120))]

        #[test]
        fn k_t_matches_time_quadrature(k in arb_kernel(), t in 0.5f64..40.0, frac in 0.0f64..1.2) {
            let x = frac * k.location_window(t).hi;
            let closed = k.k_t(t, x).unwrap();
            let quad = time_quad(|s| k.eval(s, x), t, k.time_breakpoints(x));
            prop_assert!((closed - quad).abs() <= 1e-10 * quad.abs().max(1e-3), "{} T={} x={}: {} vs {}", k, t, x, closed, quad);
        }

        #[test]
        fn q_t_matches_time_quadrature(k in arb_kernel(), t in 0.5f64..40.0, fx in 0.0f64..1.1, fy in 0.0f64..1.1) {
            let hi = k.location_window(t).hi;
            let (x, y) = (fx * hi, fy * hi);
            let closed = k.q_t(t, x, y).unwrap();
            let mut kinks = k.time_breakpoints(x);
            kinks.extend(k.time_breakpoints(y));
            let quad = time_quad(|s| k.eval(s, x) * k.eval(s, y), t, kinks);
            prop_assert!((closed - quad).abs() <= 1e-7 * quad.abs().max(1e-3), "{} T={} x={} y={}: {} vs {}", k, t, x, y, closed, quad);
            prop_assert_eq!(closed, k.q_t(t, y, x).unwrap());
            let qxx = k.q_t(t, x, x).unwrap();
            let qyy = k.q_t(t, y, y).unwrap();
            prop_assert!(closed * closed <= qxx * qyy * (1.0 + 1e-12) + 1e-300);
            prop_assert!(qxx <= k.k_t(t, x).unwrap() * k.sup_value() * (1.0 + 1e-12));
            if k.is_indicator() {
                prop_assert_eq!(qxx, k.k_t(t, x).unwrap());
            }
        }

        #[test]
        fn kt3_matches_swapped_quadrature(k in arb_kernel(), t in 1.0f64..30.0, frac in 0.0f64..1.0) {
            let gg = JumpIntensity::GeneralizedGamma { sigma: 0.5, gamma: 1.0 };
            let x = frac * k.location_window(t).hi;
            let closed = k.kt3(&gg, t, x).unwrap();
            let quad = k.kt3_by_quadrature(&gg, t, x);
            prop_assert!((closed - quad).abs() <= 1e-7 * quad.abs().max(1e-6), "{} T={} x={}: {} vs {}", k, t, x, closed, quad);
        }

        #[test]
        fn k_t_monotone_in_horizon(k in arb_kernel(), t in 0.5f64..40.0, x in 0.0f64..40.0) {
            prop_assert!(k.k_t(t, x).unwrap() <= k.k_t(t * 1.1, x).unwrap() + 1e-15);
        }
    }

    #[test]
    fn k_t_continuous_in_location() {
        for k in [
            Kernel::Rectangular { tau: 1.0 },
            Kernel::DykstraLaud,
            Kernel::OrnsteinUhlenbeck { kappa: 2.0 },
        ] {
            let t = 10.0;
            let h = 1e-4;
            let modulus = h * k.sup_value() * 1.0001;
            let mut prev = k.k_t(t, 0.0).unwrap();
            let mut x = h;
            while x < 12.0 {
                let cur = k.k_t(t, x).unwrap();
                assert!((cur - prev).abs() <= modulus, "{k} jumps at x={x}");
                prev = cur;
                x += h;
            }
        }
    }

    #[test]
    fn mean_hazard_matches_location_quadrature() {
        let gg = JumpIntensity::generalized_gamma(0.4, 1.5).unwrap();
        let k1 = gg.moment(1, None).unwrap();
        for k in [
            Kernel::Rectangular { tau: 0.8 },
            Kernel::DykstraLaud,
            Kernel::OrnsteinUhlenbeck { kappa: 0.5 },
            Kernel::UShaped { beta_center: 4.0 },
        ] {
            for t in [0.0f64, 0.3, 2.0, 7.5] {
                let pts = breakpoints(0.0, 20.0, [t - 0.8, t + 0.8, t, (t - 4.0).abs()]);
                let quad = integrate_with_breaks(|x| k1 * k.eval(t, x), &pts, Tolerance::new(1e-13, 1e-12)).value;
                assert!((k.mean_hazard(&gg, t) - quad).abs() < 1e-10, "{k} t={t}");
            }
        }
    }
}
