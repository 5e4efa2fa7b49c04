//! Truncated simulation of completely random measures.
//!
//! Homogeneous intensities use the Ferguson–Klass series: with unit-rate
//! arrival times `Γ_1 < Γ_2 < …`, the jumps `N⁻¹(Γ_i)` are the atoms of the
//! Poisson random measure in decreasing order, where
//! `N(v) = |window| · ∫_v^∞ ρ(du)`. Locations are independent uniforms on the
//! window. Generation stops at the first jump below `ε`.
//!
//! Non-homogeneous intensities are thinned from the tightest homogeneous
//! member of the same family that dominates them on the window.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::inverse::TailInverse;
use super::{JumpIntensity, PositiveFunction};
use crate::error::{ensure, Error, Result};
use crate::numeric::quadrature::{breakpoints, integrate_with_breaks, Tolerance};
use crate::numeric::summation::compensated_sum;

/// Closed interval `[lo, hi]` of locations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        ensure!(
            lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo,
            Argument,
            "window must satisfy 0 <= lo < hi < inf, got [{lo}, {hi}]"
        );
        Ok(Window { lo, hi })
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn covers(&self, other: &Window) -> bool {
        self.lo <= other.lo && self.hi >= other.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub jump: f64,
    pub location: f64,
}

/// Dominating homogeneous intensity used for thinning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    /// The envelope is `scale` times this homogeneous intensity.
    pub intensity: JumpIntensity,
    pub scale: f64,
    /// Atoms proposed by the envelope before thinning.
    pub proposed: usize,
}

/// A realized, truncated completely random measure on a window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrmSample {
    pub atoms: Vec<Atom>,
    pub window: Window,
    pub epsilon: f64,
    /// `∫_window ∫_0^ε v ρ(dv | x) dx`, the expected mass of the discarded jumps.
    pub mean_deficit: f64,
    pub seed: Option<u64>,
    pub envelope: Option<Envelope>,
}

impl CrmSample {
    pub fn empty(window: Window, epsilon: f64, mean_deficit: f64) -> Self {
        CrmSample {
            atoms: Vec::new(),
            window,
            epsilon,
            mean_deficit,
            seed: None,
            envelope: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `Σ J_i` with compensated summation.
    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.jump))
    }

    /// `Σ J_i g(x_i)` with compensated summation.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.jump * g(a.location)))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * self.atoms.len() + 96);
        let seed = self.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
        let _ = writeln!(
            out,
            "# epsilon={} window={},{} mean_deficit={} seed={}",
            self.epsilon, self.window.lo, self.window.hi, self.mean_deficit, seed
        );
        out.push_str("jump,location\n");
        for a in &self.atoms {
            let _ = writeln!(out, "{},{}", a.jump, a.location);
        }
        out
    }

    /// Parses the output of [`CrmSample::to_csv`]. Envelope metadata is not part
    /// of the CSV form and comes back as `None`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Argument(format!("malformed sample CSV: {msg}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| bad("missing comment header".into()))?;
        let mut epsilon = None;
        let mut window = None;
        let mut deficit = None;
        let mut seed = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| bad(format!("header field `{field}`")))?;
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("number `{s}` in `{key}`")));
            match key {
                "epsilon" => epsilon = Some(num(value)?),
                "window" => {
                    let (a, b) = value.split_once(',').ok_or_else(|| bad("window".into()))?;
                    window = Some(Window { lo: num(a)?, hi: num(b)? });
                }
                "mean_deficit" => deficit = Some(num(value)?),
                "seed" => {
                    seed = if value == "none" {
                        None
                    } else {
                        Some(value.parse::<u64>().map_err(|_| bad(format!("seed `{value}`")))?)
                    }
                }
                other => return Err(bad(format!("unknown header key `{other}`"))),
            }
        }
        if lines.next() != Some("jump,location") {
            return Err(bad("missing `jump,location` column header".into()));
        }
        let mut atoms = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (j, x) = line
                .split_once(',')
                .ok_or_else(|| bad(format!("row {}", i + 1)))?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(format!("row {}", i + 1)));
            atoms.push(Atom {
                jump: parse(j)?,
                location: parse(x)?,
            });
        }
        Ok(CrmSample {
            atoms,
            window: window.ok_or_else(|| bad("window missing".into()))?,
            epsilon: epsilon.ok_or_else(|| bad("epsilon missing".into()))?,
            mean_deficit: deficit.ok_or_else(|| bad("mean_deficit missing".into()))?,
            seed,
            envelope: None,
        })
    }
}

/// Ferguson–Klass sampler for one homogeneous intensity on one window.
///
/// Building it tabulates the tail inverse; sampling is then cheap, so a
/// single sampler should be shared across replicates.
#[derive(Debug, Clone)]
pub struct HomogeneousSampler {
    intensity: JumpIntensity,
    window: Window,
    epsilon: f64,
    inverse: TailInverse,
    mean_deficit: f64,
}

impl HomogeneousSampler {
    pub fn new(intensity: JumpIntensity, window: Window, epsilon: f64) -> Result<Self> {
        intensity.validate()?;
        ensure!(
            intensity.is_homogeneous(),
            Argument,
            "{intensity} is non-homogeneous; use sample_nonhomogeneous"
        );
        Self::scaled(intensity, window, epsilon, 1.0)
    }

    /// Sampler for `scale · ρ`, used as a thinning envelope.
    fn scaled(intensity: JumpIntensity, window: Window, epsilon: f64, scale: f64) -> Result<Self> {
        ensure!(
            epsilon.is_finite() && epsilon > 0.0,
            Domain,
            "epsilon must be positive, got {epsilon}"
        );
        let param = intensity
            .parameter_fn()
            .and_then(|f| f.constant_value())
            .unwrap_or(f64::NAN);
        let inverse = TailInverse::new(intensity, param, scale * window.length(), epsilon);
        let mean_deficit = window.length() * intensity.truncated_with_param(1, epsilon, param);
        Ok(HomogeneousSampler {
            intensity,
            window,
            epsilon,
            inverse,
            mean_deficit,
        })
    }

    pub fn intensity(&self) -> &JumpIntensity {
        &self.intensity
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mean_deficit(&self) -> f64 {
        self.mean_deficit
    }

    /// Expected number of atoms, `N(ε)`.
    pub fn expected_atoms(&self) -> f64 {
        self.inverse.total_mass()
    }

    /// Raw atoms in decreasing jump order.
    fn draw_atoms<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Atom> {
        let expected = self.expected_atoms();
        let mut atoms = Vec::with_capacity((expected + 4.0 * expected.sqrt() + 8.0) as usize);
        let mut cursor = self.inverse.cursor();
        let mut arrival = 0.0;
        let (lo, len) = (self.window.lo, self.window.length());
        loop {
            arrival += rng.sample::<f64, _>(Exp1);
            let Some(jump) = self.inverse.invert(arrival, &mut cursor) else {
                break;
            };
            let location = lo + len * rng.random::<f64>();
            atoms.push(Atom { jump, location });
        }
        atoms
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CrmSample {
        CrmSample {
            atoms: self.draw_atoms(rng),
            window: self.window,
            epsilon: self.epsilon,
            mean_deficit: self.mean_deficit,
            seed: None,
            envelope: None,
        }
    }
}

/// Sampler for any supported intensity: direct for homogeneous ones, thinned otherwise.
#[derive(Debug, Clone)]
pub struct Sampler {
    target: JumpIntensity,
    base: HomogeneousSampler,
    thinning: Option<Thinning>,
    mean_deficit: f64,
}

#[derive(Debug, Clone, Copy)]
enum Thinning {
    /// accept with `exp(-(β(x) - L) v)`
    ExtendedGamma { beta_fn: PositiveFunction, inf: f64 },
    /// accept with `(c(x)/c_max) (1-v)^(c(x) - c_min)`
    Beta {
        c_fn: PositiveFunction,
        c_min: f64,
        c_max: f64,
    },
}

impl Sampler {
    pub fn new(intensity: JumpIntensity, window: Window, epsilon: f64) -> Result<Self> {
        intensity.validate()?;
        if intensity.is_homogeneous() {
            let base = HomogeneousSampler::new(intensity, window, epsilon)?;
            let mean_deficit = base.mean_deficit;
            return Ok(Sampler {
                target: intensity,
                base,
                thinning: None,
                mean_deficit,
            });
        }
        let (base, thinning) = match intensity {
            JumpIntensity::ExtendedGamma { beta_fn } => {
                let (inf, _) = beta_fn.bounds(window.lo, window.hi);
                ensure!(
                    inf > 0.0 && inf.is_finite(),
                    Argument,
                    "extended gamma envelope needs inf beta > 0 on the window, got {inf}"
                );
                let base = HomogeneousSampler::scaled(intensity.frozen(inf), window, epsilon, 1.0)?;
                (base, Thinning::ExtendedGamma { beta_fn, inf })
            }
            JumpIntensity::Beta { c_fn } => {
                let (c_min, c_max) = c_fn.bounds(window.lo, window.hi);
                if c_min < 1.0 {
                    return Err(Error::Unsupported(format!(
                        "beta envelope needs c(x) >= 1 on the window [{}, {}], but inf c = {c_min}; \
                         the envelope c_max (1-v)^(c_min-1)/v is not constructed for c_min < 1",
                        window.lo, window.hi
                    )));
                }
                let base = HomogeneousSampler::scaled(intensity.frozen(c_min), window, epsilon, c_max / c_min)?;
                (base, Thinning::Beta { c_fn, c_min, c_max })
            }
            JumpIntensity::GeneralizedGamma { .. } => unreachable!("generalized gamma is homogeneous"),
        };
        let mean_deficit = nonhomogeneous_deficit(&intensity, window, epsilon);
        Ok(Sampler {
            target: intensity,
            base,
            thinning: Some(thinning),
            mean_deficit,
        })
    }

    pub fn intensity(&self) -> &JumpIntensity {
        &self.target
    }

    pub fn window(&self) -> Window {
        self.base.window
    }

    pub fn epsilon(&self) -> f64 {
        self.base.epsilon
    }

    pub fn mean_deficit(&self) -> f64 {
        self.mean_deficit
    }

    /// Expected number of proposals drawn per sample.
    pub fn expected_proposals(&self) -> f64 {
        self.base.expected_atoms()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CrmSample {
        let proposals = self.base.draw_atoms(rng);
        let Some(thinning) = self.thinning else {
            return CrmSample {
                atoms: proposals,
                window: self.base.window,
                epsilon: self.base.epsilon,
                mean_deficit: self.mean_deficit,
                seed: None,
                envelope: None,
            };
        };
        let proposed = proposals.len();
        let mut atoms = Vec::with_capacity(proposed);
        for atom in proposals {
            let (v, x) = (atom.jump, atom.location);
            let accept = match thinning {
                Thinning::ExtendedGamma { beta_fn, inf } => (-(beta_fn.eval(x) - inf) * v).exp(),
                Thinning::Beta { c_fn, c_min, c_max } => {
                    let c = c_fn.eval(x);
                    c / c_max * ((c - c_min) * (-v).ln_1p()).exp()
                }
            };
            if rng.random::<f64>() < accept {
                atoms.push(atom);
            }
        }
        let envelope = Envelope {
            intensity: self.base.intensity,
            scale: match thinning {
                Thinning::Beta { c_min, c_max, .. } => c_max / c_min,
                Thinning::ExtendedGamma { .. } => 1.0,
            },
            proposed,
        };
        CrmSample {
            atoms,
            window: self.base.window,
            epsilon: self.base.epsilon,
            mean_deficit: self.mean_deficit,
            seed: None,
            envelope: Some(envelope),
        }
    }
}

/// `∫_window ∫_0^ε v ρ(dv | x) dx` by adaptive quadrature over the location.
fn nonhomogeneous_deficit(intensity: &JumpIntensity, window: Window, epsilon: f64) -> f64 {
    let kinks = intensity.parameter_fn().map(|f| f.kinks()).unwrap_or_default();
    let pts = breakpoints(window.lo, window.hi, kinks);
    integrate_with_breaks(
        |x| intensity.truncated_moment(1, epsilon, x),
        &pts,
        Tolerance::new(1e-300, 1e-10),
    )
    .value
}

/// One truncated draw from a homogeneous intensity.
pub fn sample_homogeneous<R: Rng + ?Sized>(
    intensity: &JumpIntensity,
    window: Window,
    epsilon: f64,
    rng: &mut R,
) -> Result<CrmSample> {
    Ok(HomogeneousSampler::new(*intensity, window, epsilon)?.sample(rng))
}

/// One truncated draw from any supported intensity, thinning when it is non-homogeneous.
pub fn sample_nonhomogeneous<R: Rng + ?Sized>(
    intensity: &JumpIntensity,
    window: Window,
    epsilon: f64,
    rng: &mut R,
) -> Result<CrmSample> {
    Ok(Sampler::new(*intensity, window, epsilon)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::quadrature::integrate;
    use crate::rng::replicate_rng;

    fn mean_and_se(values: &[f64]) -> (f64, f64) {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn epsilon_above_support_gives_empty_sample() {
        let b = JumpIntensity::beta(PositiveFunction::Constant { a: 2.0 }).unwrap();
        let w = Window::new(0.0, 10.0).unwrap();
        let s = sample_homogeneous(&b, w, 1.0, &mut replicate_rng(1, 0)).unwrap();
        assert!(s.is_empty());
        assert!((s.mean_deficit - 10.0 * b.moment(1, None).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_rejects_nonhomogeneous_intensity() {
        let eg = JumpIntensity::extended_gamma(PositiveFunction::AffineSqrt { a: 1.0, b: 1.0 }).unwrap();
        let w = Window::new(0.0, 1.0).unwrap();
        let err = sample_homogeneous(&eg, w, 1e-3, &mut replicate_rng(1, 0)).unwrap_err();
        assert!(matches!(err, Error::Argument(ref m) if m.contains("sample_nonhomogeneous")));
    }

    #[test]
    fn beta_below_one_is_unsupported() {
        let b = JumpIntensity::beta(PositiveFunction::IndicatorSqrt { b: 0.25 }).unwrap();
        let w = Window::new(0.0, 4.0).unwrap();
        let err = sample_nonhomogeneous(&b, w, 1e-3, &mut replicate_rng(1, 0)).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn jumps_decrease_and_respect_bounds() {
        let w = Window::new(0.0, 50.0).unwrap();
        for intensity in [
            JumpIntensity::generalized_gamma(0.5, 1.0).unwrap(),
            JumpIntensity::extended_gamma(PositiveFunction::Constant { a: 1.0 }).unwrap(),
            JumpIntensity::beta(PositiveFunction::Constant { a: 0.7 }).unwrap(),
        ] {
            let s = sample_homogeneous(&intensity, w, 1e-4, &mut replicate_rng(9, 3)).unwrap();
            assert!(!s.is_empty());
            for pair in s.atoms.windows(2) {
                assert!(pair[0].jump >= pair[1].jump);
            }
            for a in &s.atoms {
                assert!(a.jump >= 1e-4 * (1.0 - 1e-12));
                assert!(a.location >= w.lo && a.location <= w.hi);
                if matches!(intensity, JumpIntensity::Beta { .. }) {
                    assert!(a.jump < 1.0);
                }
            }
        }
    }

    #[test]
    fn atom_count_is_poisson() {
        let gg = JumpIntensity::generalized_gamma(0.5, 1.0).unwrap();
        let w = Window::new(0.0, 100.0).unwrap();
        let sampler = HomogeneousSampler::new(gg, w, 1e-6).unwrap();
        let expected = 100.0 * gg.tail_mass(1e-6, None).unwrap();
        assert!((sampler.expected_atoms() / expected - 1.0).abs() < 1e-12);
        let counts: Vec<f64> = (0..200)
            .map(|r| sampler.sample(&mut replicate_rng(77, r)).len() as f64)
            .collect();
        for &c in &counts {
            assert!((c - expected).abs() < 5.0 * expected.sqrt());
        }
        let (mean, se) = mean_and_se(&counts);
        assert!((mean - expected).abs() < 4.0 * se, "{mean} vs {expected}");
    }

    #[test]
    fn campbell_mean_homogeneous() {
        let w = Window::new(0.0, 20.0).unwrap();
        for intensity in [
            JumpIntensity::generalized_gamma(0.5, 1.0).unwrap(),
            JumpIntensity::extended_gamma(PositiveFunction::Constant { a: 2.0 }).unwrap(),
            JumpIntensity::beta(PositiveFunction::Constant { a: 1.5 }).unwrap(),
        ] {
            let sampler = HomogeneousSampler::new(intensity, w, 1e-3).unwrap();
            let totals: Vec<f64> = (0..600)
                .map(|r| sampler.sample(&mut replicate_rng(5, r)).total_mass())
                .collect();
            let (mean, se) = mean_and_se(&totals);
            let want = w.length() * intensity.moment(1, None).unwrap() - sampler.mean_deficit();
            assert!((mean - want).abs() < 3.0 * se, "{intensity}: {mean} vs {want} (se {se})");
        }
    }

    #[test]
    fn thinning_constant_function_accepts_everything() {
        let eg = JumpIntensity::extended_gamma(PositiveFunction::Constant { a: 1.5 }).unwrap();
        let w = Window::new(0.0, 30.0).unwrap();
        let a = sample_nonhomogeneous(&eg, w, 1e-4, &mut replicate_rng(3, 1)).unwrap();
        let b = sample_homogeneous(&eg, w, 1e-4, &mut replicate_rng(3, 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn campbell_extended_gamma_affine_sqrt() {
        let t = 10.0;
        let eg = JumpIntensity::extended_gamma(PositiveFunction::AffineSqrt { a: 1.0, b: 1.0 }).unwrap();
        let w = Window::new(0.0, t).unwrap();
        let sampler = Sampler::new(eg, w, 1e-4).unwrap();
        let values: Vec<f64> = (0..800)
            .map(|r| sampler.sample(&mut replicate_rng(11, r)).integrate(|x| t - x))
            .collect();
        let (mean, se) = mean_and_se(&values);
        let full = integrate(|x: f64| (t - x) / (1.0 + x.sqrt()), 0.0, t, Tolerance::relative(1e-12)).value;
        let deficit = integrate(
            |x: f64| (t - x) * eg.truncated_moment(1, 1e-4, x),
            0.0,
            t,
            Tolerance::relative(1e-12),
        )
        .value;
        assert!((mean - (full - deficit)).abs() < 3.0 * se, "{mean} vs {}", full - deficit);
    }

    #[test]
    fn campbell_beta_affine_sqrt() {
        let b = JumpIntensity::beta(PositiveFunction::AffineSqrt { a: 1.0, b: 1.0 }).unwrap();
        let w = Window::new(0.0, 10.0).unwrap();
        let sampler = Sampler::new(b, w, 1e-5).unwrap();
        let totals: Vec<f64> = (0..800)
            .map(|r| sampler.sample(&mut replicate_rng(12, r)).total_mass())
            .collect();
        let (mean, se) = mean_and_se(&totals);
        let want = 10.0 - sampler.mean_deficit();
        assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want}");
        assert!(sampler.mean_deficit() < 1e-3);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let gg = JumpIntensity::generalized_gamma(0.3, 2.0).unwrap();
        let w = Window::new(0.0, 5.0).unwrap();
        let s = sample_homogeneous(&gg, w, 1e-3, &mut replicate_rng(8, 0))
            .unwrap()
            .with_seed(8);
        let text = s.to_csv();
        assert!(text.starts_with("# epsilon=0.001 window=0,5 mean_deficit="));
        assert!(text.contains("seed=8\njump,location\n"));
        assert_eq!(CrmSample::from_csv(&text).unwrap(), s);
    }

    #[test]
    fn seeded_samples_are_identical() {
        let gg = JumpIntensity::generalized_gamma(0.5, 1.0).unwrap();
        let w = Window::new(0.0, 10.0).unwrap();
        let a = sample_homogeneous(&gg, w, 1e-4, &mut replicate_rng(42, 7)).unwrap();
        let b = sample_homogeneous(&gg, w, 1e-4, &mut replicate_rng(42, 7)).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        let c = sample_homogeneous(&gg, w, 1e-4, &mut replicate_rng(42, 8)).unwrap();
        assert_ne!(a.to_csv(), c.to_csv());
    }
}
