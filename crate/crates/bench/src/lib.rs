//! Fixtures shared by the benchmarks.

use hazardlab::crm::Sampler;
use hazardlab::rng::replicate_rng;
use hazardlab::{CrmSample, JumpIntensity, Kernel, PositiveFunction, Result};

pub const EPSILON: f64 = 1e-6;

/// Ornstein-Uhlenbeck kernel with unit rate over an extended gamma measure.
pub fn ou_model() -> (Kernel, JumpIntensity) {
    (
        Kernel::OrnsteinUhlenbeck { kappa: 1.0 },
        JumpIntensity::ExtendedGamma {
            beta_fn: PositiveFunction::Constant { a: 1.0 },
        },
    )
}

/// Unit-width rectangular kernel over a generalized gamma measure. Its
/// samples are dense, which makes the pairwise oracle expensive.
pub fn rect_model() -> (Kernel, JumpIntensity) {
    (
        Kernel::Rectangular { tau: 1.0 },
        JumpIntensity::GeneralizedGamma { sigma: 0.5, gamma: 1.0 },
    )
}

pub fn sampler(kernel: &Kernel, intensity: JumpIntensity, horizon: f64) -> Result<Sampler> {
    Sampler::new(intensity, kernel.location_window(horizon), EPSILON)
}

/// Replicate 0 of a fixed seed.
pub fn fixture(kernel: &Kernel, intensity: JumpIntensity, horizon: f64) -> Result<CrmSample> {
    Ok(sampler(kernel, intensity, horizon)?.sample(&mut replicate_rng(1, 0)))
}
