//! Block error rates for a two-user NOMA downlink with an ambient backscatter
//! device, over time-selective Rayleigh fading with outdated and imperfect
//! channel estimates.
//!
//! Two engines are provided and are meant to be checked against each other:
//!
//! * an analytic engine built on closed-form SINR distributions ([`sinr`])
//!   and a linearized finite-blocklength error model ([`fbl`]);
//! * a Monte Carlo engine ([`montecarlo`]) that samples channel gains from a
//!   counter-based stream and evaluates the exact normal approximation.
//!
//! The crate is `no_std` (with `alloc`). File formats, threading and the
//! command line live in `ambc-noma-cli`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod config;
mod error;
pub mod fbl;
pub mod montecarlo;
pub mod sinr;
pub mod specfun;
mod sum;

pub use config::{DTermMode, Scenario, SystemConfig, Theorem1Mode};
pub use error::{Error, Result};
pub use sum::NeumaierSum;
