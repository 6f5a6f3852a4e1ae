//! Cache-aided NOMA for two vehicles over cascaded Nakagami-m links:
//! special functions, the channel law, decoding probabilities for full-file
//! and split-file caching, power-allocation search and a Monte Carlo oracle.
//!
//! The analytic side is generic over [`Real`] (`f32` or `f64`); the
//! [`f64`]-specialized aliases below cover the common case.

pub mod caching;
pub mod channel;
pub mod error;
pub mod mc_oracle;
pub mod noma_full;
pub mod noma_split;
pub mod optimizer;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Catalog = caching::Catalog<f64>;
pub type DoubleNakagamiParams = channel::DoubleNakagamiParams<f64>;
pub type LinkGeometry = channel::LinkGeometry<f64>;
pub type Link = channel::Link<f64>;
pub type FullScenario = noma_full::FullScenario<f64>;
pub type SplitScenario = noma_split::SplitScenario<f64>;
pub type SplitAllocation = noma_split::SplitAllocation<f64>;
pub type DecodeChain = noma_full::DecodeChain<f64>;
pub type Condition = noma_full::Condition<f64>;
pub type OptResult = optimizer::OptResult<f64>;

pub type FullScenarioF32 = noma_full::FullScenario<f32>;
pub type SplitScenarioF32 = noma_split::SplitScenario<f32>;
pub type DoubleNakagamiParamsF32 = channel::DoubleNakagamiParams<f32>;
