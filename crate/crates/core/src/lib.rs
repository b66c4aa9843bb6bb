//! Constant-envelope nonlinear FM pulse design by the stationary phase
//! principle.
//!
//! A window function is used as the desired power spectral density. Its
//! running integral gives the group delay `T_g(f)`, whose inverse is the
//! instantaneous frequency law of the pulse. The [`analysis`] module measures
//! the resulting autocorrelation (peak sidelobe level, first null, -3 dB
//! mainlobe width) and how closely the realized spectrum follows the design.
//!
//! ```
//! use nlfm::{synthesis::{synthesize, WaveformParams}, windows::WindowSpec};
//!
//! let params = WaveformParams::default();
//! let wf = synthesize(&WindowSpec::RaisedCosine { k: 0.2 }, &params).unwrap();
//! assert_eq!(wf.len(), 2500);
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod sweep;
pub mod synthesis;
pub mod windows;

pub use error::{Error, Result};
