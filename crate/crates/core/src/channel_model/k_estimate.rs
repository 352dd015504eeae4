use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trace::CsiTrace;

/// Saturation value returned when the diffuse power vanishes.
pub const K_MAX: f64 = 1e6;

/// Minimum number of samples for a K estimate.
pub const K_MIN_SAMPLES: usize = 1000;

/// Complex-moment K estimate `|m|^2 / mean(|x - m|^2)`, saturating at [`K_MAX`].
pub fn estimate_k_from_samples(samples: &[Complex64]) -> Result<f64> {
    if samples.len() < K_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: K_MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<Complex64>() / n;
    let diffuse = samples.iter().map(|x| (x - mean).norm_sqr()).sum::<f64>() / n;
    let k = mean.norm_sqr() / diffuse;
    if !(diffuse > f64::MIN_POSITIVE) || !k.is_finite() || k > K_MAX {
        return Ok(K_MAX);
    }
    Ok(k)
}

/// Ricean K of one link of a trace.
pub fn estimate_ricean_k(trace: &CsiTrace, stream: usize, subcarrier: usize) -> Result<f64> {
    let series: Vec<Complex64> = trace
        .link_series(stream, subcarrier)?
        .into_iter()
        .map(|h| Complex64::new(h.re as f64, h.im as f64))
        .collect();
    estimate_k_from_samples(&series)
}
