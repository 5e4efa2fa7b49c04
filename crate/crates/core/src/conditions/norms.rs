//! Norms of the derived kernels.
//!
//! With `Q_T(x, y) = ∫_0^T k(t, x) k(t, y) dt` the derived kernels are
//!
//! ```text
//! k0(s, x)        = s K_T(x)
//! k1(s, x; t, y)  = s t Q_T(x, y) / T
//! k2(s, x)        = s² Q_T(x, x) / T
//! k3(s, x)        = s (1/T) ∫ K^(1)(w) Q_T(x, w) dw
//! ```
//!
//! Every jump-size integral is a moment `K^(i)(x)` of the intensity, so only
//! location integrals are left for quadrature. The two-dimensional ones
//! (the contractions of `k1`) use a Gauss–Legendre product grid whose panel
//! edges sit on the kinks of `Q_T`; the inner integrals are done per node pair
//! with their own breakpoints, and in closed form for the homogeneous OU
//! kernel, where they are the bottleneck.

use serde::{Deserialize, Serialize};

use crate::crm::JumpIntensity;
use crate::error::{ensure, Error, Result};
use crate::kernels::Kernel;
use crate::numeric::quadrature::{breakpoints, integrate_with_breaks, GaussLegendre, Tolerance};
use crate::numeric::summation::CompensatedSum;

const LOCATION_TOL: f64 = 1e-10;

fn check_inputs(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64) -> Result<()> {
    kernel.validate()?;
    intensity.validate()?;
    ensure!(horizon.is_finite() && horizon > 0.0, Domain, "horizon must be positive, got {horizon}");
    Ok(())
}

fn intensity_kinks(intensity: &JumpIntensity) -> Vec<f64> {
    intensity.parameter_fn().map(|f| f.kinks()).unwrap_or_default()
}

/// Breakpoints for location integrals of `K_T`, `Q_T(x, x)` and `k3`.
fn location_breaks(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64) -> Vec<f64> {
    let window = kernel.location_window(horizon);
    let mut pts = kernel.k_breakpoints(horizon);
    if let Kernel::Rectangular { tau } = *kernel {
        pts.extend([2.0 * tau, horizon - 2.0 * tau]);
    }
    pts.extend(intensity_kinks(intensity));
    breakpoints(window.lo, window.hi, pts)
}

/// `∫ f(x) dx` over the location window; non-convergence is reported as divergence.
pub(crate) fn location_integral<F: Fn(f64) -> f64>(
    kernel: &Kernel,
    intensity: &JumpIntensity,
    horizon: f64,
    what: &str,
    f: F,
) -> Result<f64> {
    let pts = location_breaks(kernel, intensity, horizon);
    let r = integrate_with_breaks(f, &pts, Tolerance::new(1e-300, LOCATION_TOL).with_max_intervals(20_000));
    if !r.value.is_finite() || !r.converged {
        return Err(Error::Divergent(format!(
            "{what} for {kernel} with {intensity} at T = {horizon}: value {} with error {}",
            r.value, r.error
        )));
    }
    Ok(r.value)
}

/// `I_i(T) = ∫ K^(i)(x) K_T(x)^i dx`; `I_1(T)` is the mean cumulative hazard.
pub fn i_moment(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64, i: u32) -> Result<f64> {
    check_inputs(kernel, intensity, horizon)?;
    ensure!(i >= 1, Domain, "moment index must be at least 1, got {i}");
    let homogeneous = intensity.is_homogeneous();
    let ki = intensity.moment_at(i, 0.0);
    location_integral(kernel, intensity, horizon, &format!("I_{i}"), |x| {
        let k = kernel.k_t_unchecked(horizon, x);
        if k == 0.0 {
            return 0.0;
        }
        let m = if homogeneous { ki } else { intensity.moment_at(i, x) };
        m * k.powi(i as i32)
    })
}

/// Pointwise derived kernels, for identities and oracles.
pub mod derived {
    use super::*;

    pub fn k0(kernel: &Kernel, horizon: f64, s: f64, x: f64) -> Result<f64> {
        Ok(s * kernel.k_t(horizon, x)?)
    }

    pub fn k1(kernel: &Kernel, horizon: f64, s: f64, x: f64, t: f64, y: f64) -> Result<f64> {
        Ok(s * t * kernel.q_t(horizon, x, y)? / horizon)
    }

    pub fn k2(kernel: &Kernel, horizon: f64, s: f64, x: f64) -> Result<f64> {
        Ok(s * s * kernel.q_t(horizon, x, x)? / horizon)
    }

    pub fn k3(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64, s: f64, x: f64) -> Result<f64> {
        Ok(s * kernel.kt3(intensity, horizon, x)?)
    }
}

/// The six norms entering the path-second-moment conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionNorms {
    /// `‖k1‖²` in `L²(ν²)`
    pub k1_l2_sq: f64,
    /// `‖k1‖⁴` in `L⁴(ν²)`
    pub k1_l4_pow4: f64,
    /// `‖k1 ★₁¹ k1‖²` in `L²(ν²)`
    pub star11_l2_sq: f64,
    /// `‖k1 ★₂¹ k1‖²` in `L²(ν)`
    pub star21_l2_sq: f64,
    /// `‖k2 + 2 k3‖²` in `L²(ν)`
    pub k23_l2_sq: f64,
    /// `‖k2 + 2 k3‖³` in `L³(ν)`
    pub k23_l3_cube: f64,
    /// Per-entry convergence of the underlying quadrature, in field order.
    pub converged: [bool; 6],
}

impl ContractionNorms {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.k1_l2_sq,
            self.k1_l4_pow4,
            self.star11_l2_sq,
            self.star21_l2_sq,
            self.k23_l2_sq,
            self.k23_l3_cube,
        ]
    }
}

/// Quadrature layout for the two-dimensional location integrals.
struct ProductGrid<'a> {
    kernel: &'a Kernel,
    intensity: &'a JumpIntensity,
    horizon: f64,
    lo: f64,
    hi: f64,
    nodes: Vec<(f64, f64)>,
    /// Inner integrals only look this far beyond the two anchor points.
    inner_reach: f64,
    /// Node pairs further apart contribute nothing to `∫∫ M²`.
    pair_reach: f64,
    inner_width: f64,
    extra_breaks: Vec<f64>,
}

impl<'a> ProductGrid<'a> {
    fn new(kernel: &'a Kernel, intensity: &'a JumpIntensity, horizon: f64) -> Self {
        let window = kernel.location_window(horizon);
        let (lo, hi) = (window.lo, window.hi);
        let homogeneous = intensity.is_homogeneous();
        let mut pts = kernel.k_breakpoints(horizon);
        let kinks = intensity_kinks(intensity);
        pts.extend(kinks.iter().copied());
        let (panel, inner_reach, pair_reach) = match *kernel {
            Kernel::Rectangular { tau } => {
                // Q_T kinks where x - y is a multiple of 2τ; a grid of step τ
                // anchored at both ends keeps every kink on a panel edge
                let steps = (hi / tau).ceil() as usize;
                pts.extend((1..steps).map(|k| k as f64 * tau));
                pts.extend((1..steps).map(|k| hi - k as f64 * tau));
                (tau, 2.0 * tau, 4.0 * tau)
            }
            Kernel::OrnsteinUhlenbeck { kappa } => (1.0 / kappa, 15.0 / kappa, 20.0 / kappa),
            Kernel::DykstraLaud | Kernel::UShaped { .. } => ((hi - lo) / 32.0, f64::INFINITY, f64::INFINITY),
        };
        let mut extra_breaks = Vec::new();
        if !homogeneous {
            // √x behaviour at the origin: refine geometrically
            let first = panel.min((hi - lo) / 64.0);
            extra_breaks.extend((1..=24).map(|k| first * 0.5f64.powi(k)));
            pts.extend(extra_breaks.iter().copied());
        }
        let width = if homogeneous { panel } else { panel.min((hi - lo) / 64.0) };
        let breaks = breakpoints(lo, hi, pts);
        let nodes = GaussLegendre::order8().composite_nodes(&breaks, width);
        let inner_width = match *kernel {
            Kernel::OrnsteinUhlenbeck { kappa } => 1.0 / kappa,
            _ if homogeneous => f64::INFINITY,
            _ => (hi - lo) / 64.0,
        };
        ProductGrid {
            kernel,
            intensity,
            horizon,
            lo,
            hi,
            nodes,
            inner_reach,
            pair_reach,
            inner_width,
            extra_breaks,
        }
    }

    fn q(&self, x: f64, y: f64) -> f64 {
        self.kernel.q_t_unchecked(self.horizon, x, y)
    }

    fn moment(&self, order: u32, x: f64) -> f64 {
        self.intensity.moment_at(order, x)
    }

    /// `∫ f(w) dw` over the part of the window that can see both `x` and `y`.
    fn inner<F: FnMut(f64) -> f64>(&self, x: f64, y: f64, f: F) -> f64 {
        let a = (x.min(y) - self.inner_reach).max(self.lo);
        let b = (x.max(y) + self.inner_reach).min(self.hi);
        if b <= a {
            return 0.0;
        }
        let mut pts = self.kernel.q_breakpoints(self.horizon, x);
        pts.extend(self.kernel.q_breakpoints(self.horizon, y));
        pts.extend(intensity_kinks(self.intensity));
        pts.extend(self.extra_breaks.iter().copied());
        let breaks = breakpoints(a, b, pts);
        GaussLegendre::order8().composite(f, &breaks, self.inner_width)
    }

    /// `M(x, y) = ∫ K^(2)(w) Q_T(x, w) Q_T(w, y) dw`.
    fn contraction(&self, x: f64, y: f64) -> f64 {
        if let (Kernel::OrnsteinUhlenbeck { kappa }, true) = (*self.kernel, self.intensity.is_homogeneous()) {
            return self.moment(2, 0.0) * ou_contraction(kappa, self.horizon, x, y);
        }
        self.inner(x, y, |w| self.moment(2, w) * self.q(x, w) * self.q(w, y))
    }
}

/// `∫_0^T Q_T(x, w) Q_T(w, y) dw` for the OU kernel in closed form.
///
/// With `E(x) = e^(κ(x-T))`, `Q_T(x, w) = e^(-κ|x-w|) - E(x) E(w)` on `[0, T]²`,
/// and each of the four products integrates to elementary terms.
pub(crate) fn ou_contraction(kappa: f64, horizon: f64, x: f64, y: f64) -> f64 {
    let t = horizon;
    if x < 0.0 || y < 0.0 || x > t || y > t {
        return 0.0;
    }
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    let d = y - x;
    let e = |z: f64| (kappa * (z - t)).exp();
    // ∫ e^(-κ|x-w|) e^(-κ|w-y|) dw
    let s = (-kappa * d).exp() * (d + 1.0 / kappa)
        - ((-kappa * (x + y)).exp() + (kappa * (x + y - 2.0 * t)).exp()) / (2.0 * kappa);
    // ∫ e^(-κ|z-w|) E(w) dw
    let r = |z: f64| {
        ((kappa * (z - t)).exp() - (-kappa * (z + t)).exp()) / (2.0 * kappa) + (kappa * (z - t)).exp() * (t - z)
    };
    let zz = -(-2.0 * kappa * t).exp_m1() / (2.0 * kappa);
    (s - e(y) * r(x) - e(x) * r(y) + e(x) * e(y) * zz).max(0.0)
}

/// The one-dimensional pieces `a(x) = Q_T(x, x)/T`, `b(x) = k3/s` and `K_T(x)`.
#[inline]
fn diagonal_terms(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64, x: f64) -> (f64, f64, f64) {
    let a = kernel.q_t_unchecked(horizon, x, x) / horizon;
    let b = kernel.kt3_unchecked(intensity, horizon, x);
    let k = kernel.k_t_unchecked(horizon, x);
    (a, b, k)
}

fn moments_at(intensity: &JumpIntensity, x: f64, orders: std::ops::RangeInclusive<u32>) -> Vec<f64> {
    orders.map(|i| intensity.moment_at(i, x)).collect()
}

/// `‖k2 + 2k3‖²` in `L²(ν)`.
pub fn k23_l2_sq(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64) -> Result<f64> {
    check_inputs(kernel, intensity, horizon)?;
    location_integral(kernel, intensity, horizon, "||k2 + 2k3||^2", |x| {
        let (a, b, _) = diagonal_terms(kernel, intensity, horizon, x);
        if a == 0.0 && b == 0.0 {
            return 0.0;
        }
        let m = moments_at(intensity, x, 2..=4);
        m[2] * a * a + 4.0 * m[1] * a * b + 4.0 * m[0] * b * b
    })
}

/// `‖k2 + 2k3‖³` in `L³(ν)`.
pub fn k23_l3_cube(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64) -> Result<f64> {
    check_inputs(kernel, intensity, horizon)?;
    location_integral(kernel, intensity, horizon, "||k2 + 2k3||^3", |x| {
        let (a, b, _) = diagonal_terms(kernel, intensity, horizon, x);
        if a == 0.0 && b == 0.0 {
            return 0.0;
        }
        let m = moments_at(intensity, x, 3..=6);
        m[3] * a.powi(3) + 6.0 * m[2] * a * a * b + 12.0 * m[1] * a * b * b + 8.0 * m[0] * b.powi(3)
    })
}

/// `‖c1 (k2 + 2k3) - c0 k0‖²` in `L²(ν)`, the combined norm of the path-variance conditions.
///
/// `c0` already includes the factor `δ`.
pub fn deviation_norm(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64, c1: f64, c0: f64) -> Result<f64> {
    check_inputs(kernel, intensity, horizon)?;
    location_integral(kernel, intensity, horizon, "combined deviation norm", |x| {
        let (a, b, k) = diagonal_terms(kernel, intensity, horizon, x);
        if a == 0.0 && b == 0.0 && k == 0.0 {
            return 0.0;
        }
        let m = moments_at(intensity, x, 2..=4);
        // ∫ (c1 s² a + 2 c1 s b - c0 s k)² ρ(ds), expanded in moments
        let (p, q) = (c1 * a, 2.0 * c1 * b - c0 * k);
        (m[2] * p * p + 2.0 * m[1] * p * q + m[0] * q * q).max(0.0)
    })
}

/// All six norms of the path-second-moment conditions at horizon `T`.
pub fn contraction_norms(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64) -> Result<ContractionNorms> {
    check_inputs(kernel, intensity, horizon)?;
    let t = horizon;
    let grid = ProductGrid::new(kernel, intensity, t);
    let n = grid.nodes.len();

    let mut p2 = Vec::with_capacity(n);
    let mut k2s = Vec::with_capacity(n);
    let mut k4s = Vec::with_capacity(n);
    let (mut c1, mut c2, mut c4) = (CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new());
    for &(x, w) in &grid.nodes {
        let k2 = grid.moment(2, x);
        let k4 = grid.moment(4, x);
        // P(x) = ∫ K2 Q², P4(x) = ∫ K4 Q⁴
        let p = grid.inner(x, x, |v| grid.moment(2, v) * grid.q(x, v).powi(2));
        let p4 = grid.inner(x, x, |v| grid.moment(4, v) * grid.q(x, v).powi(4));
        c1 += w * k2 * p;
        c2 += w * k4 * p4;
        c4 += w * k4 * p * p;
        p2.push(p);
        k2s.push(k2);
        k4s.push(k4);
    }

    let mut c3 = CompensatedSum::new();
    for i in 0..n {
        let (xi, wi) = grid.nodes[i];
        let mut row = CompensatedSum::new();
        for j in i..n {
            let (xj, wj) = grid.nodes[j];
            if xj - xi > grid.pair_reach {
                break;
            }
            let m = grid.contraction(xi, xj);
            let factor = if i == j { 1.0 } else { 2.0 };
            row += factor * wj * k2s[j] * m * m;
        }
        c3 += wi * k2s[i] * row.value();
    }

    let k23_2 = k23_l2_sq(kernel, intensity, t);
    let k23_3 = k23_l3_cube(kernel, intensity, t);
    let t2 = t * t;
    let t4 = t2 * t2;
    let values = [c1.value() / t2, c2.value() / t4, c3.value() / t4, c4.value() / t4];
    Ok(ContractionNorms {
        k1_l2_sq: values[0],
        k1_l4_pow4: values[1],
        star11_l2_sq: values[2],
        star21_l2_sq: values[3],
        k23_l2_sq: *k23_2.as_ref().unwrap_or(&f64::NAN),
        k23_l3_cube: *k23_3.as_ref().unwrap_or(&f64::NAN),
        converged: [
            values[0].is_finite(),
            values[1].is_finite(),
            values[2].is_finite(),
            values[3].is_finite(),
            k23_2.is_ok(),
            k23_3.is_ok(),
        ],
    })
}

/// `(1/T) ∫_0^T E[h(t)²] dt = (1/T) [∫_0^T E[h(t)]² dt + ∫ K^(2)(x) Q_T(x, x) dx]`.
///
/// This is the exact finite-horizon centering of the path second moment.
pub fn mean_path_second_moment(kernel: &Kernel, intensity: &JumpIntensity, horizon: f64) -> Result<f64> {
    let (mean_sq, diag) = path_second_moment_parts(kernel, intensity, horizon)?;
    Ok((mean_sq + diag) / horizon)
}

/// The two pieces `∫_0^T E[h(t)]² dt` and `∫ K^(2)(x) Q_T(x, x) dx` of the mean path second moment.
pub(crate) fn path_second_moment_parts(
    kernel: &Kernel,
    intensity: &JumpIntensity,
    horizon: f64,
) -> Result<(f64, f64)> {
    check_inputs(kernel, intensity, horizon)?;
    let t = horizon;
    let mut time_breaks = match *kernel {
        Kernel::Rectangular { tau } => vec![tau],
        Kernel::UShaped { beta_center } => vec![beta_center],
        _ => Vec::new(),
    };
    time_breaks.extend(intensity_kinks(intensity));
    let pts = breakpoints(0.0, t, time_breaks);
    let mean_sq = integrate_with_breaks(
        |s| kernel.mean_hazard(intensity, s).powi(2),
        &pts,
        Tolerance::new(1e-300, LOCATION_TOL),
    );
    if !mean_sq.converged || !mean_sq.value.is_finite() {
        return Err(Error::Divergent(format!("∫ E[h(t)]² dt for {kernel} at T = {t}")));
    }
    let diag = location_integral(kernel, intensity, t, "∫ K2 Q(x, x)", |x| {
        let q = kernel.q_t_unchecked(t, x, x);
        if q == 0.0 {
            0.0
        } else {
            intensity.moment_at(2, x) * q
        }
    })?;
    Ok((mean_sq.value, diag))
}
