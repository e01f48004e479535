//! Target tracking with integrated sensing and communications over EMLSR
//! multi-link Wi-Fi: Kalman tracking, trilateration bounds, proportional-fair
//! DL scheduling, the sensing/communications decision policies and a
//! deterministic discrete-event simulator.

// `!(x > 0.0)` is how the validators reject NaN alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod crlb;
pub mod experiments;
pub mod kalman;
pub mod policy;
pub mod sched;
pub mod sim;

pub use config::{ConfigError, Mode, Scheme, SimConfig};
