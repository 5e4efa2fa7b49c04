//! Inversion of the tail mass `N(v) = scale · ∫_v^∞ ρ(du)` of a homogeneous intensity.
//!
//! The Ferguson–Klass sampler needs `N⁻¹(Γ)` for every unit-rate arrival
//! time `Γ` up to `N(ε)`, i.e. thousands to hundreds of thousands of
//! inversions per path. Bisection on the special functions for each one is
//! too slow, so `ln N` is tabulated once on a uniform grid in
//! `u = ln v` (or `u = logit v` for the beta family, whose jumps live in
//! `(0, 1)`), together with its exact derivative. Inside the table each
//! inversion solves a cubic Hermite interpolant by safeguarded Newton;
//! above the table (the rare very large jumps) the exact tail is inverted
//! directly.

use super::JumpIntensity;

/// Grid step in the transformed coordinate.
const STEP: f64 = 0.005;
/// The table stops once the expected number of larger jumps drops below this.
const TOP_MASS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Coord {
    Log,
    Logit,
}

impl Coord {
    #[inline]
    fn to_v(self, u: f64) -> f64 {
        match self {
            Coord::Log => u.exp(),
            Coord::Logit => 1.0 / (1.0 + (-u).exp()),
        }
    }

    #[inline]
    fn from_v(self, v: f64) -> f64 {
        match self {
            Coord::Log => v.ln(),
            Coord::Logit => v.ln() - (-v).ln_1p(),
        }
    }

    /// `ln(dv/du)` at jump size `v`.
    #[inline]
    fn ln_jacobian(self, v: f64) -> f64 {
        match self {
            Coord::Log => v.ln(),
            Coord::Logit => v.ln() + (-v).ln_1p(),
        }
    }
}

/// Tabulated inverse of a scaled homogeneous tail mass.
#[derive(Debug, Clone)]
pub struct TailInverse {
    intensity: JumpIntensity,
    param: f64,
    ln_scale: f64,
    coord: Coord,
    u0: f64,
    ln_n: Vec<f64>,
    slope: Vec<f64>,
}

impl TailInverse {
    /// Builds the table for `N(v) = scale · tail(v)` on `v ≥ epsilon`.
    ///
    /// `intensity` must be homogeneous (or frozen at `param`).
    pub fn new(intensity: JumpIntensity, param: f64, scale: f64, epsilon: f64) -> Self {
        let coord = match intensity {
            JumpIntensity::Beta { .. } => Coord::Logit,
            _ => Coord::Log,
        };
        let mut inv = TailInverse {
            intensity,
            param,
            ln_scale: scale.ln(),
            coord,
            u0: 0.0,
            ln_n: Vec::new(),
            slope: Vec::new(),
        };
        let beyond_support = matches!(intensity, JumpIntensity::Beta { .. }) && epsilon >= 1.0;
        if beyond_support || scale <= 0.0 {
            return inv;
        }
        inv.u0 = coord.from_v(epsilon);
        let ln_top = TOP_MASS.ln();
        let mut u = inv.u0;
        loop {
            let (ln_n, slope) = inv.eval(u);
            inv.ln_n.push(ln_n);
            inv.slope.push(slope);
            if ln_n < ln_top || !ln_n.is_finite() || inv.ln_n.len() > 2_000_000 {
                break;
            }
            u = inv.u0 + STEP * inv.ln_n.len() as f64;
        }
        if inv.ln_n.last().is_some_and(|x| !x.is_finite()) {
            inv.ln_n.pop();
            inv.slope.pop();
        }
        inv
    }

    /// `ln N` and `d ln N / du` at transformed coordinate `u`.
    fn eval(&self, u: f64) -> (f64, f64) {
        let v = self.coord.to_v(u);
        let ln_tail = self.intensity.ln_tail_with_param(v, self.param);
        let ln_rho = self.ln_density(v);
        let slope = -(ln_rho + self.coord.ln_jacobian(v) - ln_tail).exp();
        (self.ln_scale + ln_tail, slope)
    }

    fn ln_density(&self, v: f64) -> f64 {
        self.intensity.ln_density_with_param(v, self.param)
    }

    /// Exact `ln N(v)`.
    pub fn ln_tail(&self, v: f64) -> f64 {
        self.ln_scale + self.intensity.ln_tail_with_param(v, self.param)
    }

    /// `N(ε)`, the expected number of atoms at or above the truncation level.
    pub fn total_mass(&self) -> f64 {
        self.ln_n.first().map_or(0.0, |x| x.exp())
    }

    /// Starting state for a decreasing sequence of inversions.
    pub fn cursor(&self) -> usize {
        self.ln_n.len().saturating_sub(1)
    }

    /// Solves `N(v) = g`; `None` when `g > N(ε)`, i.e. the jump would fall below `ε`.
    ///
    /// `cursor` carries the table position between calls with increasing `g`;
    /// it is only a hint, and any value gives the right answer.
    pub fn invert(&self, g: f64, cursor: &mut usize) -> Option<f64> {
        if self.ln_n.is_empty() {
            return None;
        }
        let y = g.ln();
        if y > self.ln_n[0] {
            return None;
        }
        let last = self.ln_n.len() - 1;
        if y < self.ln_n[last] {
            let u_last = self.u0 + STEP * last as f64;
            return Some(self.invert_exact(y, u_last));
        }
        // find k with ln_n[k] >= y >= ln_n[k + 1]
        let mut k = (*cursor).min(last.saturating_sub(1));
        while k > 0 && self.ln_n[k] < y {
            k -= 1;
        }
        while k + 1 < last && self.ln_n[k + 1] > y {
            k += 1;
        }
        *cursor = k;
        if last == 0 {
            return Some(self.coord.to_v(self.u0));
        }
        let t = self.solve_cell(k, y);
        Some(self.coord.to_v(self.u0 + STEP * (k as f64 + t)))
    }

    /// Root of the cubic Hermite interpolant on cell `k`, as a fraction of the cell.
    fn solve_cell(&self, k: usize, y: f64) -> f64 {
        let y0 = self.ln_n[k];
        let y1 = self.ln_n[k + 1];
        let m0 = self.slope[k] * STEP;
        let m1 = self.slope[k + 1] * STEP;
        let span = y0 - y1;
        if span <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let mut t = ((y0 - y) / span).clamp(0.0, 1.0);
        for _ in 0..30 {
            let t2 = t * t;
            let t3 = t2 * t;
            let p = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                + (t3 - 2.0 * t2 + t) * m0
                + (-2.0 * t3 + 3.0 * t2) * y1
                + (t3 - t2) * m1;
            let dp = (6.0 * t2 - 6.0 * t) * y0
                + (3.0 * t2 - 4.0 * t + 1.0) * m0
                + (-6.0 * t2 + 6.0 * t) * y1
                + (3.0 * t2 - 2.0 * t) * m1;
            let r = p - y;
            // the residual cannot drop below the rounding noise of the cubic
            if r.abs() <= 4.0 * f64::EPSILON * y.abs().max(1.0) {
                return t;
            }
            // p is decreasing in t
            if r > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let mut next = if dp < 0.0 { t - r / dp } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            // a cell spans 0.005 in ln v, so this is a relative jump error of 5e-15
            if (next - t).abs() < 1e-12 {
                return next;
            }
            t = next;
        }
        t
    }

    /// Safeguarded Newton on the exact tail for targets above the table.
    fn invert_exact(&self, y: f64, u_start: f64) -> f64 {
        let mut lo = u_start;
        let mut width = 1.0;
        let mut hi = lo + width;
        loop {
            let (ln_n, _) = self.eval(hi);
            if ln_n < y || !ln_n.is_finite() || width > 1e3 {
                break;
            }
            lo = hi;
            width *= 2.0;
            hi = lo + width;
        }
        let mut u = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (ln_n, slope) = self.eval(u);
            let r = ln_n - y;
            if !ln_n.is_finite() || r < 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let mut next = if ln_n.is_finite() && slope < 0.0 {
                u - r / slope
            } else {
                f64::NAN
            };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 1e-14 * u.abs().max(1.0) {
                u = next;
                break;
            }
            u = next;
        }
        let v = self.coord.to_v(u);
        if self.coord == Coord::Logit {
            v.min(1.0 - f64::EPSILON)
        } else {
            v
        }
    }

    pub fn table_len(&self) -> usize {
        self.ln_n.len()
    }
}
