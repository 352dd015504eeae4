//! Per-series signal processing: denoising, subcarrier selection, band
//! splitting and spectral rate estimation.

mod butterworth;
mod hampel;
mod spectrum;
mod subcarrier;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use butterworth::{bandpass, design_bandpass, filtfilt, magnitude_response, Biquad};
pub use hampel::{hampel_filter, HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA, MAD_SCALE};
pub use spectrum::{
    estimate_rate_fft, magnitude_spectrum, RateEstimate, DEFAULT_GATE_RATIO, MIN_RATE_WINDOW_S,
};
pub use subcarrier::{select_subcarrier, subcarrier_variances};

/// Real amplitude samples of one link, with the index of the first sample in
/// the source trace.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSeries {
    samples: Vec<f64>,
    sample_rate: f64,
    origin_index: usize,
}

impl AmplitudeSeries {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("amplitude series"));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(crate::error::invalid(
                "sample_rate",
                "must be finite and > 0",
            ));
        }
        Ok(Self {
            samples,
            sample_rate,
            origin_index: 0,
        })
    }

    pub fn with_origin(mut self, origin_index: usize) -> Self {
        self.origin_index = origin_index;
        self
    }

    /// Same rate and origin, new samples.
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        Self {
            samples,
            sample_rate: self.sample_rate,
            origin_index: self.origin_index,
        }
    }

    /// Sub-range `[start, end)` relative to this series; the origin follows.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.samples.len() {
            return Err(Error::OutOfRange {
                what: "slice end",
                index: end,
                len: self.samples.len(),
            });
        }
        Ok(Self {
            samples: self.samples[start..end].to_vec(),
            sample_rate: self.sample_rate,
            origin_index: self.origin_index + start,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn origin_index(&self) -> usize {
        self.origin_index
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// Passband edges in Hz and Butterworth prototype order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub low_hz: f64,
    pub high_hz: f64,
    pub order: usize,
}

impl BandSpec {
    pub const fn new(low_hz: f64, high_hz: f64, order: usize) -> Self {
        Self {
            low_hz,
            high_hz,
            order,
        }
    }

    /// 15-30 breaths per minute.
    pub const fn breathing() -> Self {
        Self::new(0.25, 0.5, 4)
    }

    /// 60-120 beats per minute.
    pub const fn heart() -> Self {
        Self::new(1.0, 2.0, 4)
    }

    pub fn validate(&self, sample_rate: f64) -> Result<()> {
        let ok = self.low_hz > 0.0
            && self.low_hz < self.high_hz
            && self.high_hz < sample_rate / 2.0
            && self.order >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidBand {
                low_hz: self.low_hz,
                high_hz: self.high_hz,
                sample_rate,
            })
        }
    }
}
