pub mod asymptotics;
pub mod conditions;
pub mod crm;
pub mod error;
pub mod kernels;
pub mod montecarlo;
pub mod numeric;
pub mod rng;

pub use crm::{CrmSample, JumpIntensity, PositiveFunction, Window};
pub use error::{Error, Result};
pub use kernels::Kernel;
