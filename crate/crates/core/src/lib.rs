//! Wi-Fi CSI vital-sign sensing.
//!
//! * [`channel_model`]: Fresnel geometry, the Ricean-K sensing model and its
//!   derivatives, seeded CSI synthesis and K estimation.
//! * [`dsp`]: Hampel denoising, subcarrier selection, zero-phase Butterworth
//!   bandpass and FFT rate estimation with a presence gate.
//! * [`segmentation`]: regularity-based separation of breathing periods from
//!   other body motion.
//! * [`pipeline`]: the end-to-end chain and evaluation against ground truth.
//! * [`trace_io`]: WITL binary traces, CSV, scenario files, JSON reports.
//! * [`cli`]: the `csi-vitals` command-line front end.

// `!(x >= lo)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel_model;
pub mod cli;
pub mod dsp;
pub mod error;
pub mod pipeline;
pub mod segmentation;
pub mod trace;
pub mod trace_io;

pub use error::{Error, Result};
pub use trace::CsiTrace;
