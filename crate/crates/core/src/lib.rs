//! Gravitationally bound quantum states of ultracold neutrons above a mirror,
//! resonant transitions between them, and the loss-rate budget of a trap
//! built to store them.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod airy;
pub mod budget;
pub mod cli;
pub mod config;
pub mod constants;
pub mod eigenstates;
pub mod error;
pub mod losses;
pub mod noninertial;
pub mod output;
pub mod quadrature;
pub mod roots;
pub mod transitions;

pub use error::{Error, Result};
