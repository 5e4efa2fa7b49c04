//! Completely random measures on the positive half-line.
//!
//! A measure is described by its Lévy intensity `ν(dv, dx) = ρ(dv | x) dx`.
//! Three families are supported: generalized gamma, extended gamma and beta.
//! The last two may be non-homogeneous through a [`PositiveFunction`] of the
//! location.

mod inverse;
mod sample;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numeric::quadrature::{integrate_semi_infinite, Tolerance};
use crate::numeric::special::{
    beta_reg, beta_tail, exp_integral_e1, gamma, ln_beta, ln_exp_integral_e1, ln_gamma, ln_upper_gamma,
    lower_gamma, pochhammer,
};

pub use inverse::TailInverse;
pub use sample::{
    sample_homogeneous, sample_nonhomogeneous, Atom, CrmSample, Envelope, HomogeneousSampler, Sampler, Window,
};

/// A strictly positive function of the location, used for the
/// location-dependent parameter of the extended gamma and beta families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PositiveFunction {
    /// `x ↦ a`
    Constant { a: f64 },
    /// `x ↦ a + b·√x`
    AffineSqrt { a: f64, b: f64 },
    /// `x ↦ 1` on `(0, b]`, `x ↦ √x` beyond.
    IndicatorSqrt { b: f64 },
}

impl PositiveFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PositiveFunction::Constant { a } => {
                ensure!(a.is_finite() && a > 0.0, Domain, "constant must be positive, got {a}");
            }
            PositiveFunction::AffineSqrt { a, b } => {
                ensure!(
                    a.is_finite() && a > 0.0,
                    Domain,
                    "affine-sqrt offset a must be > 0 (a = 0 vanishes at x = 0), got {a}"
                );
                ensure!(b.is_finite() && b > 0.0, Domain, "affine-sqrt slope b must be > 0, got {b}");
            }
            PositiveFunction::IndicatorSqrt { b } => {
                ensure!(b.is_finite() && b > 0.0, Domain, "indicator-sqrt break b must be > 0, got {b}");
            }
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            PositiveFunction::Constant { a } => a,
            PositiveFunction::AffineSqrt { a, b } => a + b * x.max(0.0).sqrt(),
            PositiveFunction::IndicatorSqrt { b } => {
                if x <= b {
                    1.0
                } else {
                    x.sqrt()
                }
            }
        }
    }

    /// Infimum and supremum over the closed window `[lo, hi]`.
    pub fn bounds(&self, lo: f64, hi: f64) -> (f64, f64) {
        let lo = lo.max(0.0);
        match *self {
            PositiveFunction::Constant { a } => (a, a),
            PositiveFunction::AffineSqrt { .. } => (self.eval(lo), self.eval(hi)),
            PositiveFunction::IndicatorSqrt { b } => {
                let mut inf = f64::INFINITY;
                let mut sup = 0.0f64;
                if lo <= b {
                    inf = inf.min(1.0);
                    sup = sup.max(1.0);
                }
                if hi > b {
                    // √x on (max(lo, b), hi]; the left end is approached, not attained
                    let start = lo.max(b);
                    inf = inf.min(start.sqrt());
                    sup = sup.max(hi.sqrt());
                }
                (inf, sup)
            }
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match *self {
            PositiveFunction::Constant { a } => Some(a),
            _ => None,
        }
    }

    /// Coefficient of `√x` in the large-`x` behaviour, if the function grows like `√x`.
    pub fn sqrt_coefficient(&self) -> Option<f64> {
        match *self {
            PositiveFunction::Constant { .. } => None,
            PositiveFunction::AffineSqrt { b, .. } => Some(b),
            PositiveFunction::IndicatorSqrt { .. } => Some(1.0),
        }
    }

    /// Points where the function is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match *self {
            PositiveFunction::IndicatorSqrt { b } => vec![b],
            // √x has an infinite slope at the origin
            PositiveFunction::AffineSqrt { .. } => vec![0.0],
            PositiveFunction::Constant { .. } => Vec::new(),
        }
    }
}

impl fmt::Display for PositiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositiveFunction::Constant { a } => write!(f, "{a}"),
            PositiveFunction::AffineSqrt { a, b } => write!(f, "{a}+{b}*sqrt(x)"),
            PositiveFunction::IndicatorSqrt { b } => write!(f, "1(x<={b})+sqrt(x)1(x>{b})"),
        }
    }
}

/// Lévy intensity of a completely random measure with Lebesgue base measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JumpIntensity {
    /// `ρ(v) = e^(-γv) v^(-1-σ) / Γ(1-σ)`
    GeneralizedGamma { sigma: f64, gamma: f64 },
    /// `ρ(v | x) = e^(-β(x) v) / v`
    ExtendedGamma { beta_fn: PositiveFunction },
    /// `ρ(v | x) = c(x) (1-v)^(c(x)-1) / v` on `(0, 1)`
    Beta { c_fn: PositiveFunction },
}

impl JumpIntensity {
    pub fn generalized_gamma(sigma: f64, gamma: f64) -> Result<Self> {
        let out = JumpIntensity::GeneralizedGamma { sigma, gamma };
        out.validate()?;
        Ok(out)
    }

    pub fn extended_gamma(beta_fn: PositiveFunction) -> Result<Self> {
        let out = JumpIntensity::ExtendedGamma { beta_fn };
        out.validate()?;
        Ok(out)
    }

    pub fn beta(c_fn: PositiveFunction) -> Result<Self> {
        let out = JumpIntensity::Beta { c_fn };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            JumpIntensity::GeneralizedGamma { sigma, gamma } => {
                ensure!(
                    sigma > 0.0 && sigma < 1.0,
                    Domain,
                    "generalized gamma needs sigma in (0,1), got {sigma}"
                );
                ensure!(
                    gamma.is_finite() && gamma > 0.0,
                    Domain,
                    "generalized gamma needs gamma > 0, got {gamma} (gamma = 0 is the stable case, which has no finite moments)"
                );
                Ok(())
            }
            JumpIntensity::ExtendedGamma { beta_fn } => beta_fn.validate(),
            JumpIntensity::Beta { c_fn } => c_fn.validate(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        match self {
            JumpIntensity::GeneralizedGamma { .. } => true,
            JumpIntensity::ExtendedGamma { beta_fn } => beta_fn.constant_value().is_some(),
            JumpIntensity::Beta { c_fn } => c_fn.constant_value().is_some(),
        }
    }

    /// The location-dependent parameter function, if any.
    pub fn parameter_fn(&self) -> Option<PositiveFunction> {
        match *self {
            JumpIntensity::GeneralizedGamma { .. } => None,
            JumpIntensity::ExtendedGamma { beta_fn } => Some(beta_fn),
            JumpIntensity::Beta { c_fn } => Some(c_fn),
        }
    }

    /// Short family tag used in tables and file names.
    pub fn family_name(&self) -> &'static str {
        match self {
            JumpIntensity::GeneralizedGamma { .. } => "generalized_gamma",
            JumpIntensity::ExtendedGamma { .. } => "extended_gamma",
            JumpIntensity::Beta { .. } => "beta",
        }
    }

    /// The homogeneous member of the same family with the parameter frozen at `p`.
    pub(crate) fn frozen(&self, p: f64) -> JumpIntensity {
        match *self {
            JumpIntensity::GeneralizedGamma { .. } => *self,
            JumpIntensity::ExtendedGamma { .. } => JumpIntensity::ExtendedGamma {
                beta_fn: PositiveFunction::Constant { a: p },
            },
            JumpIntensity::Beta { .. } => JumpIntensity::Beta {
                c_fn: PositiveFunction::Constant { a: p },
            },
        }
    }

    fn param_at(&self, x: Option<f64>) -> Result<f64> {
        match self.parameter_fn() {
            None => Ok(f64::NAN),
            Some(f) => match (f.constant_value(), x) {
                (Some(a), _) => Ok(a),
                (None, Some(x)) => {
                    ensure!(x >= 0.0 && x.is_finite(), Domain, "location must be >= 0, got {x}");
                    Ok(f.eval(x))
                }
                (None, None) => Err(Error::Argument(format!(
                    "{} intensity is non-homogeneous; a location x is required",
                    self.family_name()
                ))),
            },
        }
    }

    /// Jump moment `K^(order)(x) = ∫ v^order ρ(dv | x)` for `order` in 1..=4.
    pub fn moment(&self, order: u32, x: Option<f64>) -> Result<f64> {
        ensure!((1..=4).contains(&order), Domain, "moment order must be in 1..=4, got {order}");
        let p = self.param_at(x)?;
        Ok(self.moment_with_param(order, p))
    }

    /// Jump moment of any order `i ≥ 1` at location `x` (ignored when homogeneous).
    pub fn moment_at(&self, order: u32, x: f64) -> f64 {
        let p = self.parameter_fn().map_or(f64::NAN, |f| f.eval(x));
        self.moment_with_param(order, p)
    }

    fn moment_with_param(&self, order: u32, p: f64) -> f64 {
        debug_assert!(order >= 1);
        let i = order as f64;
        match *self {
            JumpIntensity::GeneralizedGamma { sigma, gamma } => {
                pochhammer(1.0 - sigma, order - 1) / gamma.powf(i - sigma)
            }
            JumpIntensity::ExtendedGamma { .. } => gamma(i) / p.powf(i),
            JumpIntensity::Beta { .. } => gamma(i) / pochhammer(1.0 + p, order - 1),
        }
    }

    /// Density of `ρ(dv | x)` at jump size `v`.
    pub fn density(&self, v: f64, x: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        match *self {
            JumpIntensity::GeneralizedGamma { sigma, gamma } => {
                (-gamma * v - (1.0 + sigma) * v.ln() - ln_gamma(1.0 - sigma)).exp()
            }
            JumpIntensity::ExtendedGamma { beta_fn } => (-beta_fn.eval(x) * v).exp() / v,
            JumpIntensity::Beta { c_fn } => {
                if v >= 1.0 {
                    0.0
                } else {
                    let c = c_fn.eval(x);
                    c * ((c - 1.0) * (-v).ln_1p()).exp() / v
                }
            }
        }
    }

    /// Natural log of the density at a frozen parameter `p`; `-∞` outside the support.
    pub(crate) fn ln_density_with_param(&self, v: f64, p: f64) -> f64 {
        if v <= 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            JumpIntensity::GeneralizedGamma { sigma, gamma } => {
                -gamma * v - (1.0 + sigma) * v.ln() - ln_gamma(1.0 - sigma)
            }
            JumpIntensity::ExtendedGamma { .. } => -p * v - v.ln(),
            JumpIntensity::Beta { .. } => {
                if v >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    p.ln() + (p - 1.0) * (-v).ln_1p() - v.ln()
                }
            }
        }
    }

    /// Tail mass `∫_v^∞ ρ(du | x)`.
    pub fn tail_mass(&self, v: f64, x: Option<f64>) -> Result<f64> {
        ensure!(v > 0.0, Domain, "tail mass needs v > 0, got {v}");
        let p = self.param_at(x)?;
        Ok(self.tail_with_param(v, p))
    }

    pub(crate) fn tail_with_param(&self, v: f64, p: f64) -> f64 {
        match *self {
            JumpIntensity::GeneralizedGamma { .. } => {
                if v.is_infinite() {
                    0.0
                } else {
                    self.ln_tail_with_param(v, p).exp()
                }
            }
            JumpIntensity::ExtendedGamma { .. } => {
                if v.is_infinite() {
                    0.0
                } else {
                    exp_integral_e1(p * v)
                }
            }
            JumpIntensity::Beta { .. } => {
                if v >= 1.0 {
                    0.0
                } else {
                    beta_tail(p, v)
                }
            }
        }
    }

    /// Natural log of the tail mass for a frozen parameter; `-∞` beyond the support.
    pub(crate) fn ln_tail_with_param(&self, v: f64, p: f64) -> f64 {
        match *self {
            JumpIntensity::GeneralizedGamma { sigma, gamma } => {
                sigma * gamma.ln() + ln_upper_gamma(-sigma, gamma * v) - ln_gamma(1.0 - sigma)
            }
            JumpIntensity::ExtendedGamma { .. } => ln_exp_integral_e1(p * v),
            JumpIntensity::Beta { .. } => {
                if v >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    beta_tail(p, v).ln()
                }
            }
        }
    }

    /// `∫_0^ε v^order ρ(dv | x)`: the part of the moment carried by jumps below `ε`.
    pub fn truncated_moment(&self, order: u32, epsilon: f64, x: f64) -> f64 {
        let p = self.parameter_fn().map_or(f64::NAN, |f| f.eval(x));
        self.truncated_with_param(order, epsilon, p)
    }

    pub(crate) fn truncated_with_param(&self, order: u32, epsilon: f64, p: f64) -> f64 {
        if epsilon <= 0.0 {
            return 0.0;
        }
        let i = order as f64;
        match *self {
            JumpIntensity::GeneralizedGamma { sigma, gamma } => {
                gamma.powf(sigma - i) * lower_gamma(i - sigma, gamma * epsilon) / self::gamma(1.0 - sigma)
            }
            JumpIntensity::ExtendedGamma { .. } => p.powf(-i) * lower_gamma(i, p * epsilon),
            JumpIntensity::Beta { .. } => {
                if epsilon >= 1.0 {
                    self.moment_with_param(order, p)
                } else {
                    p * ln_beta(i, p).exp() * beta_reg(i, p, epsilon)
                }
            }
        }
    }

    /// `∫_ε^∞ v^order ρ(dv | x)`: the moment of the jumps a truncated sampler keeps.
    pub fn moment_above(&self, order: u32, epsilon: f64, x: f64) -> f64 {
        let p = self.parameter_fn().map_or(f64::NAN, |f| f.eval(x));
        (self.moment_with_param(order, p) - self.truncated_with_param(order, epsilon, p)).max(0.0)
    }

    /// Moment by direct quadrature of the density, used as an oracle.
    pub fn moment_by_quadrature(&self, order: u32, x: f64) -> f64 {
        let i = order as i32;
        let p = self.parameter_fn().map_or(f64::NAN, |f| f.eval(x));
        let tol = Tolerance::relative(1e-12);
        match *self {
            JumpIntensity::Beta { .. } => {
                // s = (1-v)^c turns c (1-v)^(c-1) v^(i-1) dv into (1 - s^(1/c))^(i-1) ds
                let g = |s: f64| (1.0 - s.powf(1.0 / p)).powi(i - 1);
                crate::numeric::quadrature::integrate(g, 0.0, 1.0, tol).value
            }
            _ => {
                let f = |v: f64| (i as f64 * v.ln() + self.ln_density_with_param(v, p)).exp();
                // v = e^(-y) maps the power singularity at 0 to an exponential tail
                let near = integrate_semi_infinite(|y: f64| f((-y).exp()) * (-y).exp(), 0.0, tol).value;
                let far = integrate_semi_infinite(f, 1.0, tol).value;
                near + far
            }
        }
    }
}

impl fmt::Display for JumpIntensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JumpIntensity::GeneralizedGamma { sigma, gamma } => {
                write!(f, "generalized_gamma(sigma={sigma},gamma={gamma})")
            }
            JumpIntensity::ExtendedGamma { beta_fn } => write!(f, "extended_gamma(beta={beta_fn})"),
            JumpIntensity::Beta { c_fn } => write!(f, "beta(c={c_fn})"),
        }
    }
}

/// Jump moment `K^(order)(x)`; see [`JumpIntensity::moment`].
pub fn moment(intensity: &JumpIntensity, order: u32, x: Option<f64>) -> Result<f64> {
    intensity.moment(order, x)
}

/// Tail mass `∫_v^∞ ρ(du | x)`; see [`JumpIntensity::tail_mass`].
pub fn tail_mass(intensity: &JumpIntensity, v: f64, x: Option<f64>) -> Result<f64> {
    intensity.tail_mass(v, x)
}
