//! Budget-limited policy search for 5-year ITN/IRS intervention plans.
//!
//! Re-exports the environments, agents and experiment harness of
//! [`scarce_rl_core`], and adds an HTTP evaluation [`service`], a blocking
//! [`client`] that lets any agent play against it, and the [`cli`] driver.

pub use scarce_rl_core::*;

pub mod cli;
pub mod client;
pub mod service;
