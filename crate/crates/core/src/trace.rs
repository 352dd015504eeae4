//! In-memory CSI trace.

use num_complex::Complex32;

use crate::error::{invalid, Error, Result};

/// Uniformly sampled multi-stream, multi-subcarrier complex CSI.
///
/// Samples are stored frame-major: frame `i` occupies
/// `data[i * stride .. (i + 1) * stride]` with `stride = n_streams * n_subcarriers`,
/// laid out `[stream][subcarrier]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiTrace {
    sample_rate: u32,
    n_streams: u16,
    n_subcarriers: u16,
    t0_ns: u64,
    data: Vec<Complex32>,
}

impl CsiTrace {
    pub fn new(
        sample_rate: u32,
        n_streams: u16,
        n_subcarriers: u16,
        t0_ns: u64,
        data: Vec<Complex32>,
    ) -> Result<Self> {
        if sample_rate == 0 {
            return Err(invalid("sample_rate", "must be > 0"));
        }
        if n_streams == 0 || n_subcarriers == 0 {
            return Err(invalid("shape", "streams and subcarriers must be >= 1"));
        }
        let stride = n_streams as usize * n_subcarriers as usize;
        if !data.len().is_multiple_of(stride) {
            return Err(invalid(
                "data",
                format!(
                    "length {} is not a multiple of frame size {stride}",
                    data.len()
                ),
            ));
        }
        Ok(Self {
            sample_rate,
            n_streams,
            n_subcarriers,
            t0_ns,
            data,
        })
    }

    /// A trace with no frames.
    pub fn empty(sample_rate: u32, n_streams: u16, n_subcarriers: u16) -> Result<Self> {
        Self::new(sample_rate, n_streams, n_subcarriers, 0, Vec::new())
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn n_streams(&self) -> usize {
        self.n_streams as usize
    }

    pub fn n_subcarriers(&self) -> usize {
        self.n_subcarriers as usize
    }

    pub fn t0_ns(&self) -> u64 {
        self.t0_ns
    }

    pub fn frame_len(&self) -> usize {
        self.n_streams() * self.n_subcarriers()
    }

    pub fn n_frames(&self) -> usize {
        self.data.len() / self.frame_len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.n_frames() as f64 / self.sample_rate as f64
    }

    /// Raw frame-major sample buffer.
    pub fn samples(&self) -> &[Complex32] {
        &self.data
    }

    pub fn frame(&self, i: usize) -> &[Complex32] {
        let n = self.frame_len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn get(&self, frame: usize, stream: usize, subcarrier: usize) -> Complex32 {
        self.data[frame * self.frame_len() + stream * self.n_subcarriers() + subcarrier]
    }

    /// Timestamp of frame `i` in nanoseconds, rounded to the nearest ns.
    pub fn timestamp_ns(&self, i: usize) -> u64 {
        self.t0_ns + (i as f64 * 1e9 / self.sample_rate as f64).round() as u64
    }

    pub fn check_link(&self, stream: usize, subcarrier: usize) -> Result<()> {
        if stream >= self.n_streams() {
            return Err(Error::OutOfRange {
                what: "stream",
                index: stream,
                len: self.n_streams(),
            });
        }
        if subcarrier >= self.n_subcarriers() {
            return Err(Error::OutOfRange {
                what: "subcarrier",
                index: subcarrier,
                len: self.n_subcarriers(),
            });
        }
        Ok(())
    }

    /// Complex time series of one (stream, subcarrier) link.
    pub fn link_series(&self, stream: usize, subcarrier: usize) -> Result<Vec<Complex32>> {
        self.check_link(stream, subcarrier)?;
        let offset = stream * self.n_subcarriers() + subcarrier;
        Ok(self
            .data
            .iter()
            .skip(offset)
            .step_by(self.frame_len())
            .copied()
            .collect())
    }

    /// Amplitude |H| of one link, widened to f64.
    pub fn amplitude(&self, stream: usize, subcarrier: usize) -> Result<Vec<f64>> {
        Ok(self
            .link_series(stream, subcarrier)?
            .into_iter()
            .map(|h| (h.re as f64).hypot(h.im as f64))
            .collect())
    }
}
