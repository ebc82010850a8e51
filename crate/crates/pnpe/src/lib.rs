//! Dual-track engine for a heralded photon-number path-entanglement (PNPE)
//! Bell protocol.
//!
//! Two independent computation tracks are provided and cross-validated
//! against each other:
//!
//! - [`analytic`]: closed-form heralded states, lossy no-click POVMs,
//!   Q-functions and CHSH values;
//! - [`protocol`] on top of [`fock`]: a circuit-level simulation of the full
//!   optical layout (sources, channel loss, central beamsplitter, heralding,
//!   displacement measurement) in a truncated Fock basis.
//!
//! [`optimize`] maximizes the CHSH value over source and measurement
//! settings and locates detection-efficiency thresholds; [`metrics`] holds
//! success-rate and device-independent figures of merit.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod metrics;
pub mod optimize;
pub mod par;
pub mod protocol;
pub mod reference;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
