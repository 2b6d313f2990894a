//! Constellation design and link-level simulation for energy-detection
//! noncoherent SIMO uplinks.
//!
//! The transmitter puts information only in the power of its symbols; the
//! receiver measures the average energy `‖y‖²/n` over its `n` antennas and
//! maps it to a symbol through interval decoding regions. Designs maximize
//! the large-deviations error exponent of the symbol error rate.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod constellation;
pub mod decode;
pub mod design;
pub mod error;
pub mod gray;
pub mod montecarlo;
pub mod numeric;
pub mod rates;
pub mod special;

pub use channel::{ChannelSpec, NoisePlan};
pub use constellation::Constellation;
pub use design::{DesignConfig, DesignOutcome, RobustOutcome, UncertaintyBox};
pub use error::{Error, Result};
pub use montecarlo::{MinAntennas, Scheme, SimReport, SimScenario};
pub use rates::{RateOracle, Side};
