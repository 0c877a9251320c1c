//! Outage probability of MIMO Rayleigh-fading channels under the
//! diversity-multiplexing tradeoff, with emphasis on the low-SNR regime.
//!
//! * [`channel`] draws i.i.d. and correlated channel matrices.
//! * [`analytic`] holds every closed form: the SNR-independent low-SNR
//!   outage `F_H(m r)`, its low-outage approximations, the DMT curve, the
//!   piecewise whole-range approximation and the scalar-channel formulas.
//! * [`montecarlo`] estimates the exact outage from the log-det capacity and
//!   is the reference every closed form is checked against.
//! * [`sweep`] runs configured SNR/multiplexing-gain grids and writes CSV.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod rng;
pub mod sweep;

pub use analytic::{MultiplexingGain, Snr};
pub use channel::{ChannelDims, ChannelModel, ChannelRealization, CorrelationModel};
pub use error::{Error, Result};
pub use montecarlo::OutageEstimate;
