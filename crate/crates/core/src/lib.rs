//! Performance engine for a RIS-aided cooperative full-duplex SWIPT-NOMA
//! downlink under Nakagami-m fading.
//!
//! The crate has two halves that check each other:
//!
//! * closed-form analytics ([`closed_form`], [`harvest`]) built on
//!   moment-matched Gamma approximations of the cascaded RIS channel and of
//!   the non-linearly harvested power, and
//! * a direct Monte-Carlo simulation of the physical model ([`mc`]) driven
//!   by a counter-based random stream, which serves as the ground truth the
//!   analytic expressions are validated against.
//!
//! Everything here is pure computation over scalar parameters; IO, sweep
//! orchestration and file formats live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

pub mod channel;
pub mod closed_form;
pub mod harvest;
pub mod link;
pub mod mc;
pub mod params;
pub mod rng;
pub mod special;

pub use closed_form::{AnalyticReport, Branch, Validity};
pub use harvest::EhParams;
pub use link::{SinrBundle, Thresholds};
pub use mc::{Device, MetricEstimate};
pub use params::{ChannelDraw, GammaParams, SystemParams};
pub use rng::TrialRng;
