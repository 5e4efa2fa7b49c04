//! Catalog of closed-form asymptotic regimes.
//!
//! For each supported (kernel, intensity) pair and each functional the
//! catalog records the normalizing rate, the centering, and the variance of
//! the Gaussian limit, with the moments `K^(i)` of the intensity plugged in.
//! The statistic is always `rate(T) · (value - centering(T))`.
//!
//! Quadratic functionals are cataloged only for the rectangular and OU
//! kernels with homogeneous intensities. For the Dykstra–Laud and U-shaped
//! kernels the contraction conditions fail (the relevant norms diverge), and
//! the catalog says so with an explicit [`Regime::Unsupported`] value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::crm::{JumpIntensity, PositiveFunction};
use crate::error::{Error, Result};
use crate::kernels::Kernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `H(T) = ∫_0^T h(t) dt`
    CumulativeHazard,
    /// `(1/T) ∫_0^T h(t)² dt`
    PathSecondMoment,
    /// `(1/T) ∫_0^T (h(t) - H(T)/T)² dt`
    PathVariance,
}

impl Functional {
    pub const ALL: [Functional; 3] = [
        Functional::CumulativeHazard,
        Functional::PathSecondMoment,
        Functional::PathVariance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Functional::CumulativeHazard => "cumulative_hazard",
            Functional::PathSecondMoment => "path_second_moment",
            Functional::PathVariance => "path_variance",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Functional::ALL.into_iter().find(|f| f.name() == s)
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Normalizing rate `C(T)` multiplying the centered functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RateFunction {
    /// `T^p`
    Power { p: f64 },
    /// `T^p (log T)^q`
    PowerLog { p: f64, q: f64 },
}

impl RateFunction {
    pub fn eval(&self, horizon: f64) -> f64 {
        match *self {
            RateFunction::Power { p } => horizon.powf(p),
            RateFunction::PowerLog { p, q } => horizon.powf(p) * horizon.ln().powf(q),
        }
    }
}

impl fmt::Display for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateFunction::Power { p } => write!(f, "T^{p}"),
            RateFunction::PowerLog { p, q } => write!(f, "T^{p}*log(T)^{q}"),
        }
    }
}

/// How the functional is centered before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CenteringRule {
    /// `coefficient · T^power`; `power = 0` for constant centerings.
    Power { coefficient: f64, power: f64 },
    /// No closed-form trend; center at the exact finite-`T` expectation.
    MonteCarloMean,
}

impl CenteringRule {
    pub fn eval(&self, horizon: f64) -> Option<f64> {
        match *self {
            CenteringRule::Power { coefficient, power } => Some(coefficient * horizon.powf(power)),
            CenteringRule::MonteCarloMean => None,
        }
    }
}

impl fmt::Display for CenteringRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CenteringRule::Power { coefficient, power } if power == 0.0 => write!(f, "{coefficient}"),
            CenteringRule::Power { coefficient, power } if power == 1.0 => write!(f, "{coefficient}*T"),
            CenteringRule::Power { coefficient, power } => write!(f, "{coefficient}*T^{power}"),
            CenteringRule::MonteCarloMean => f.write_str("mc_mean"),
        }
    }
}

/// One named additive piece of a limiting variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceComponent {
    pub name: String,
    pub value: f64,
}

/// Closed-form limit theorem for one functional of one (kernel, intensity) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub kernel: Kernel,
    pub intensity: JumpIntensity,
    pub functional: Functional,
    pub rate: RateFunction,
    pub centering: CenteringRule,
    pub limit_variance: f64,
    /// Limit of `2 C_1 E[H(T)] / (T² C_0)`; present for path variances.
    pub delta: Option<f64>,
    /// Additive pieces of `limit_variance`, e.g. `sigma1_sq` and `sigma2_sq`.
    pub components: Vec<VarianceComponent>,
}

impl RegimeSpec {
    pub fn component(&self, name: &str) -> Option<f64> {
        self.components.iter().find(|c| c.name == name).map(|c| c.value)
    }
}

/// Outcome of a catalog lookup for the quadratic functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Regime {
    Supported(RegimeSpec),
    Unsupported { reason: String },
}

impl Regime {
    pub fn spec(&self) -> Option<&RegimeSpec> {
        match self {
            Regime::Supported(spec) => Some(spec),
            Regime::Unsupported { .. } => None,
        }
    }

    pub fn is_supported(&self) -> bool {
        matches!(self, Regime::Supported(_))
    }
}

/// Homogeneous moments `K^(1..=4)`.
fn homogeneous_moments(intensity: &JumpIntensity) -> [f64; 4] {
    [1, 2, 3, 4].map(|i| intensity.moment_at(i, 0.0))
}

fn not_cataloged(kernel: &Kernel, intensity: &JumpIntensity) -> Error {
    Error::NotCataloged {
        kernel: kernel.to_string(),
        intensity: intensity.to_string(),
    }
}

fn component(name: &str, value: f64) -> VarianceComponent {
    VarianceComponent {
        name: name.to_string(),
        value,
    }
}

/// Cumulative hazard regime.
///
/// Errors with [`Error::NotCataloged`] for pairs without a closed form; the
/// numeric condition checker still applies to them.
pub fn regime_cumhaz(kernel: &Kernel, intensity: &JumpIntensity) -> Result<RegimeSpec> {
    kernel.validate()?;
    intensity.validate()?;
    let spec = |rate, centering, limit_variance: f64| RegimeSpec {
        kernel: *kernel,
        intensity: *intensity,
        functional: Functional::CumulativeHazard,
        rate,
        centering,
        limit_variance,
        delta: None,
        components: vec![component("sigma0_sq", limit_variance)],
    };
    let power = |p: f64| RateFunction::Power { p };
    let trend = |coefficient: f64, power: f64| CenteringRule::Power { coefficient, power };

    if intensity.is_homogeneous() {
        let [k1, k2, _, _] = homogeneous_moments(intensity);
        return Ok(match *kernel {
            Kernel::Rectangular { tau } => spec(power(-0.5), trend(2.0 * tau * k1, 1.0), 4.0 * k2 * tau * tau),
            Kernel::DykstraLaud => spec(power(-1.5), trend(0.5 * k1, 2.0), k2 / 3.0),
            Kernel::OrnsteinUhlenbeck { kappa } => {
                spec(power(-0.5), trend(k1 * (2.0 / kappa).sqrt(), 1.0), 2.0 * k2 / kappa)
            }
            Kernel::UShaped { .. } => spec(power(-1.5), trend(0.5 * k1, 2.0), k2 / 3.0),
        });
    }

    // Non-homogeneous cases grow like √x; `s` is the coefficient of √x.
    let s = intensity
        .parameter_fn()
        .and_then(|f: PositiveFunction| f.sqrt_coefficient())
        .ok_or_else(|| not_cataloged(kernel, intensity))?;
    match (*kernel, *intensity) {
        (Kernel::DykstraLaud, JumpIntensity::ExtendedGamma { .. }) => Ok(spec(
            RateFunction::PowerLog { p: -1.0, q: -0.5 },
            CenteringRule::MonteCarloMean,
            1.0 / (s * s),
        )),
        (Kernel::DykstraLaud, JumpIntensity::Beta { .. }) => {
            Ok(spec(power(-1.25), trend(0.5, 2.0), 16.0 / (15.0 * s)))
        }
        (Kernel::Rectangular { tau }, JumpIntensity::ExtendedGamma { .. }) => Ok(spec(
            RateFunction::PowerLog { p: 0.0, q: -0.5 },
            CenteringRule::MonteCarloMean,
            4.0 * tau * tau / (s * s),
        )),
        (Kernel::Rectangular { tau }, JumpIntensity::Beta { .. }) => {
            Ok(spec(power(-0.25), trend(2.0 * tau, 1.0), 8.0 * tau * tau / s))
        }
        _ => Err(not_cataloged(kernel, intensity)),
    }
}

fn quadratic_unsupported(kernel: &Kernel, intensity: &JumpIntensity) -> Option<Regime> {
    match kernel {
        Kernel::DykstraLaud | Kernel::UShaped { .. } => Some(Regime::Unsupported {
            reason: format!(
                "{kernel}: the contraction conditions fail; condition 3 tends to a positive constant \
                 while conditions 5 and 6 diverge, so no Gaussian limit is available"
            ),
        }),
        _ if !intensity.is_homogeneous() => Some(Regime::Unsupported {
            reason: format!("{kernel} with non-homogeneous {intensity}: no closed-form regime is available"),
        }),
        _ => None,
    }
}

/// Path-second-moment regime; quadratic rate `C_1(T) = √T`.
pub fn regime_path2nd(kernel: &Kernel, intensity: &JumpIntensity) -> Regime {
    if let Some(unsupported) = quadratic_unsupported(kernel, intensity) {
        return unsupported;
    }
    let [k1, k2, k3, k4] = homogeneous_moments(intensity);
    let (centering, sigma1, sigma2) = match *kernel {
        Kernel::Rectangular { tau } => {
            let t2 = tau * tau;
            (
                2.0 * tau * k2 + 4.0 * t2 * k1 * k1,
                16.0 * t2 * tau * k2 * k2 / 3.0,
                16.0 * t2 * (k4 / 4.0 + tau * k3 * k1 + t2 * k2 * k1 * k1),
            )
        }
        Kernel::OrnsteinUhlenbeck { kappa } => (
            k2 + 2.0 * k1 * k1 / kappa,
            k2 * k2 / kappa,
            k4 + 4.0 * k3 * k1 / kappa + 4.0 * k2 * k1 * k1 / (kappa * kappa),
        ),
        Kernel::DykstraLaud | Kernel::UShaped { .. } => unreachable!("handled above"),
    };
    Regime::Supported(RegimeSpec {
        kernel: *kernel,
        intensity: *intensity,
        functional: Functional::PathSecondMoment,
        rate: RateFunction::Power { p: 0.5 },
        centering: CenteringRule::Power {
            coefficient: centering,
            power: 0.0,
        },
        limit_variance: sigma1 + sigma2,
        delta: None,
        components: vec![component("sigma1_sq", sigma1), component("sigma2_sq", sigma2)],
    })
}

/// Path-variance regime; quadratic rate `C_1(T) = √T`.
pub fn regime_pathvar(kernel: &Kernel, intensity: &JumpIntensity) -> Regime {
    if let Some(unsupported) = quadratic_unsupported(kernel, intensity) {
        return unsupported;
    }
    let [k1, k2, k3, k4] = homogeneous_moments(intensity);
    let (delta, centering, sigma1, sigma3) = match *kernel {
        Kernel::Rectangular { tau } => {
            let t2 = tau * tau;
            (
                4.0 * tau * k1,
                2.0 * tau * k2,
                16.0 * t2 * tau * k2 * k2 / 3.0,
                16.0 * t2 * (k4 / 4.0 - tau * k3 * k1 + t2 * k2 * k1 * k1),
            )
        }
        Kernel::OrnsteinUhlenbeck { kappa } => (
            2f64.powf(1.5) * k1 / kappa.sqrt(),
            k2,
            k2 * k2 / kappa,
            k4 - 4.0 * k3 * k1 / kappa + 4.0 * k2 * k1 * k1 / (kappa * kappa),
        ),
        Kernel::DykstraLaud | Kernel::UShaped { .. } => unreachable!("handled above"),
    };
    Regime::Supported(RegimeSpec {
        kernel: *kernel,
        intensity: *intensity,
        functional: Functional::PathVariance,
        rate: RateFunction::Power { p: 0.5 },
        centering: CenteringRule::Power {
            coefficient: centering,
            power: 0.0,
        },
        limit_variance: sigma1 + sigma3,
        delta: Some(delta),
        components: vec![component("sigma1_sq", sigma1), component("sigma3_sq", sigma3)],
    })
}

/// Catalog lookup for any functional, turning "no regime" into an error.
pub fn lookup(kernel: &Kernel, intensity: &JumpIntensity, functional: Functional) -> Result<RegimeSpec> {
    let regime = match functional {
        Functional::CumulativeHazard => return regime_cumhaz(kernel, intensity),
        Functional::PathSecondMoment => regime_path2nd(kernel, intensity),
        Functional::PathVariance => regime_pathvar(kernel, intensity),
    };
    match regime {
        Regime::Supported(spec) => Ok(spec),
        Regime::Unsupported { reason } => Err(Error::Unsupported(format!(
            "{reason}; use check-conditions to examine this pair numerically"
        ))),
    }
}

/// One row of the catalog table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub kernel: String,
    pub crm: String,
    pub functional: Functional,
    pub rate: Option<String>,
    pub trend: Option<String>,
    pub variance: Option<f64>,
    pub delta: Option<f64>,
    pub supported: bool,
    pub note: Option<String>,
}

/// Catalog rows for every combination of the given kernels, intensities and functionals.
pub fn catalog(kernels: &[Kernel], intensities: &[JumpIntensity]) -> Vec<CatalogRow> {
    let mut rows = Vec::new();
    for kernel in kernels {
        for intensity in intensities {
            for functional in Functional::ALL {
                let base = CatalogRow {
                    kernel: kernel.to_string(),
                    crm: intensity.to_string(),
                    functional,
                    rate: None,
                    trend: None,
                    variance: None,
                    delta: None,
                    supported: false,
                    note: None,
                };
                let row = match lookup(kernel, intensity, functional) {
                    Ok(spec) => CatalogRow {
                        rate: Some(spec.rate.to_string()),
                        trend: Some(spec.centering.to_string()),
                        variance: Some(spec.limit_variance),
                        delta: spec.delta,
                        supported: true,
                        ..base
                    },
                    Err(e) => CatalogRow {
                        note: Some(e.to_string()),
                        ..base
                    },
                };
                rows.push(row);
            }
        }
    }
    rows
}

/// The catalog at the parameter values used throughout the worked examples.
pub fn default_catalog() -> Vec<CatalogRow> {
    let kernels = [
        Kernel::Rectangular { tau: 1.0 },
        Kernel::DykstraLaud,
        Kernel::OrnsteinUhlenbeck { kappa: 1.0 },
        Kernel::UShaped { beta_center: 2.0 },
    ];
    let intensities = [
        JumpIntensity::GeneralizedGamma { sigma: 0.5, gamma: 1.0 },
        JumpIntensity::ExtendedGamma {
            beta_fn: PositiveFunction::Constant { a: 1.0 },
        },
        JumpIntensity::Beta {
            c_fn: PositiveFunction::Constant { a: 1.0 },
        },
        JumpIntensity::ExtendedGamma {
            beta_fn: PositiveFunction::AffineSqrt { a: 1.0, b: 1.0 },
        },
        JumpIntensity::Beta {
            c_fn: PositiveFunction::AffineSqrt { a: 1.0, b: 1.0 },
        },
    ];
    catalog(&kernels, &intensities)
}

/// Renders catalog rows as CSV with the header
/// `kernel,crm,functional,rate,trend,variance,delta,supported`.
pub fn catalog_csv(rows: &[CatalogRow]) -> String {
    let mut out = String::from("kernel,crm,functional,rate,trend,variance,delta,supported\n");
    let quote = |s: &str| {
        if s.contains(',') || s.contains('"') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    };
    let num = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            quote(&r.kernel),
            quote(&r.crm),
            r.functional,
            quote(r.rate.as_deref().unwrap_or("")),
            quote(r.trend.as_deref().unwrap_or("")),
            num(r.variance),
            num(r.delta),
            r.supported
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn gg(sigma: f64, gamma: f64) -> JumpIntensity {
        JumpIntensity::GeneralizedGamma { sigma, gamma }
    }

    #[test]
    fn rectangular_generalized_gamma_variance() {
        let (sigma, gamma, tau) = (0.3, 1.7, 0.8);
        let spec = regime_cumhaz(&Kernel::Rectangular { tau }, &gg(sigma, gamma)).unwrap();
        let want = 4.0 * tau * tau * (1.0 - sigma) / gamma.powf(2.0 - sigma);
        assert!(rel(spec.limit_variance, want) < 1e-14);
        assert_eq!(spec.rate, RateFunction::Power { p: -0.5 });
    }

    #[test]
    fn ou_and_dl_cumhaz_entries() {
        let eg = JumpIntensity::ExtendedGamma {
            beta_fn: PositiveFunction::Constant { a: 2.0 },
        };
        let k2 = eg.moment(2, None).unwrap();
        let ou = regime_cumhaz(&Kernel::OrnsteinUhlenbeck { kappa: 3.0 }, &eg).unwrap();
        assert!(rel(ou.limit_variance, 2.0 * k2 / 3.0) < 1e-14);
        let dl = regime_cumhaz(&Kernel::DykstraLaud, &eg).unwrap();
        assert!(rel(dl.limit_variance, k2 / 3.0) < 1e-14);
        assert_eq!(dl.centering.eval(10.0), Some(0.5 * eg.moment(1, None).unwrap() * 100.0));
    }

    #[test]
    fn nonhomogeneous_cumhaz_entries() {
        let beta = JumpIntensity::Beta {
            c_fn: PositiveFunction::IndicatorSqrt { b: 1.0 },
        };
        let spec = regime_cumhaz(&Kernel::DykstraLaud, &beta).unwrap();
        assert_eq!(spec.rate, RateFunction::Power { p: -1.25 });
        assert!(rel(spec.limit_variance, 16.0 / 15.0) < 1e-15);
        assert_eq!(spec.centering.eval(4.0), Some(8.0));

        let eg = JumpIntensity::ExtendedGamma {
            beta_fn: PositiveFunction::AffineSqrt { a: 1.0, b: 1.0 },
        };
        let spec = regime_cumhaz(&Kernel::DykstraLaud, &eg).unwrap();
        assert_eq!(spec.rate, RateFunction::PowerLog { p: -1.0, q: -0.5 });
        assert_eq!(spec.centering, CenteringRule::MonteCarloMean);
        assert_eq!(spec.limit_variance, 1.0);
        let rect = regime_cumhaz(&Kernel::Rectangular { tau: 1.0 }, &eg).unwrap();
        assert_eq!(rect.limit_variance, 4.0);
        let rect = regime_cumhaz(&Kernel::Rectangular { tau: 1.0 }, &beta).unwrap();
        assert_eq!(rect.limit_variance, 8.0);
        assert_eq!(rect.rate, RateFunction::Power { p: -0.25 });

        let err = regime_cumhaz(&Kernel::OrnsteinUhlenbeck { kappa: 1.0 }, &eg).unwrap_err();
        assert!(matches!(err, Error::NotCataloged { .. }));
    }

    #[test]
    fn quadratic_unsupported_for_dl_and_u() {
        let i = gg(0.5, 1.0);
        assert!(!regime_path2nd(&Kernel::DykstraLaud, &i).is_supported());
        assert!(!regime_pathvar(&Kernel::UShaped { beta_center: 2.0 }, &i).is_supported());
        assert!(matches!(
            lookup(&Kernel::DykstraLaud, &i, Functional::PathSecondMoment),
            Err(Error::Unsupported(_))
        ));
        let eg = JumpIntensity::ExtendedGamma {
            beta_fn: PositiveFunction::AffineSqrt { a: 1.0, b: 1.0 },
        };
        assert!(!regime_path2nd(&Kernel::Rectangular { tau: 1.0 }, &eg).is_supported());
    }

    #[test]
    fn ou_extended_gamma_path_second_moment_is_nineteen() {
        let eg = JumpIntensity::ExtendedGamma {
            beta_fn: PositiveFunction::Constant { a: 1.0 },
        };
        let spec = regime_path2nd(&Kernel::OrnsteinUhlenbeck { kappa: 1.0 }, &eg);
        let spec = spec.spec().unwrap();
        assert!(rel(spec.limit_variance, 19.0) < 1e-14);
        assert!(rel(spec.component("sigma1_sq").unwrap(), 1.0) < 1e-14);
        assert!(rel(spec.component("sigma2_sq").unwrap(), 18.0) < 1e-14);
    }

    #[test]
    fn rectangular_path_variance_delta() {
        let i = gg(0.4, 2.0);
        let spec = regime_pathvar(&Kernel::Rectangular { tau: 1.5 }, &i);
        let k1 = i.moment(1, None).unwrap();
        assert!(rel(spec.spec().unwrap().delta.unwrap(), 6.0 * k1) < 1e-15);
    }

    #[test]
    fn rectangular_extended_gamma_path2nd_by_substitution() {
        let b: f64 = 1.7;
        let eg = JumpIntensity::ExtendedGamma {
            beta_fn: PositiveFunction::Constant { a: b },
        };
        let k = |a: f64| crate::numeric::special::gamma(a) / b.powf(a);
        let want = 16.0 * (k(4.0) / 4.0 + k(3.0) * k(1.0) + k(2.0) * k(2.0) / 3.0 + k(2.0) * k(1.0) * k(1.0));
        let spec = regime_path2nd(&Kernel::Rectangular { tau: 1.0 }, &eg);
        assert!(rel(spec.spec().unwrap().limit_variance, want) < 1e-14);
    }

    #[test]
    fn catalog_csv_has_one_row_per_combination() {
        let rows = default_catalog();
        assert_eq!(rows.len(), 4 * 5 * 3);
        let csv = catalog_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("kernel,crm,functional,rate,trend,variance,delta,supported"));
        assert_eq!(lines.count(), rows.len());
        assert!(rows.iter().any(|r| r.supported && r.functional == Functional::PathVariance));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]

        #[test]
        fn generalized_gamma_specializations(sigma in 0.05f64..0.95, gamma in 0.2f64..4.0, kappa in 0.2f64..4.0) {
            let i = gg(sigma, gamma);
            let k = Kernel::OrnsteinUhlenbeck { kappa };
            let poch2 = (2.0 - sigma) * (3.0 - sigma);
            let denom = kappa * gamma.powf(4.0 - sigma);
            let second = (1.0 - sigma)
                * (4.0 / kappa * gamma.powf(2.0 * sigma) + (9.0 - 5.0 * sigma) * gamma.powf(sigma) + kappa * poch2)
                / denom;
            let var = (1.0 - sigma)
                * (4.0 / kappa * gamma.powf(2.0 * sigma) - (7.0 - 3.0 * sigma) * gamma.powf(sigma) + kappa * poch2)
                / denom;
            let p2 = regime_path2nd(&k, &i).spec().unwrap().limit_variance;
            let pv = regime_pathvar(&k, &i).spec().unwrap().limit_variance;
            prop_assert!(rel(p2, second) < 1e-12);
            prop_assert!(rel(pv, var) < 1e-12);
        }

        #[test]
        fn variance_components_positive_and_ordered(
            sigma in 0.05f64..0.95, gamma in 0.2f64..4.0, kappa in 0.2f64..4.0, tau in 0.2f64..3.0
        ) {
            let i = gg(sigma, gamma);
            for k in [Kernel::Rectangular { tau }, Kernel::OrnsteinUhlenbeck { kappa }] {
                let p2 = regime_path2nd(&k, &i);
                let pv = regime_pathvar(&k, &i);
                let (p2, pv) = (p2.spec().unwrap(), pv.spec().unwrap());
                for c in p2.components.iter().chain(&pv.components) {
                    prop_assert!(c.value > 0.0, "{} {} = {}", k, c.name, c.value);
                }
                prop_assert!(pv.limit_variance < p2.limit_variance);
                prop_assert!(regime_cumhaz(&k, &i).unwrap().limit_variance > 0.0);
            }
        }
    }
}
