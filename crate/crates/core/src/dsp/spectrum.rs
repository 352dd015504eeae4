use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::hampel::median_in_place;
use super::{AmplitudeSeries, BandSpec};
use crate::error::{invalid, Result};

/// Shortest analysis span accepted by [`estimate_rate_fft`], seconds.
pub const MIN_RATE_WINDOW_S: f64 = 10.0;

/// Default presence gate on the prominence ratio.
pub const DEFAULT_GATE_RATIO: f64 = 5.0;

/// Spectral peak picked from one band of one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// Rate in beats or breaths per minute; absent when the peak fails the gate.
    pub bpm: Option<f64>,
    pub peak_freq_hz: f64,
    /// Peak spectral magnitude over the median in-band magnitude.
    pub prominence_ratio: f64,
}

/// Parabolic vertex offset through three log-magnitudes, in bins.
fn vertex_offset(left: f64, center: f64, right: f64) -> f64 {
    if !(left > 0.0 && center > 0.0 && right > 0.0) {
        return 0.0;
    }
    let (l, c, r) = (left.ln(), center.ln(), right.ln());
    let denom = l - 2.0 * c + r;
    if denom >= 0.0 {
        return 0.0;
    }
    (0.5 * (l - r) / denom).clamp(-0.5, 0.5)
}

/// Hann-windowed, zero-padded magnitude spectrum (`nfft / 2 + 1` bins) of the
/// mean-removed series.
pub fn magnitude_spectrum(samples: &[f64], nfft: usize) -> Vec<f64> {
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    for (i, (dst, &x)) in buf.iter_mut().zip(samples).enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1).max(1) as f64).cos();
        *dst = Complex64::new((x - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    buf[..nfft / 2 + 1].iter().map(|c| c.norm()).collect()
}

/// Dominant in-band rate of a series.
///
/// The FFT is zero-padded to at least twice the series length; the peak bin is
/// searched inside `[low_hz, high_hz]` and refined by a parabola through the
/// log-magnitudes of the peak and its two neighbors.
pub fn estimate_rate_fft(
    series: &AmplitudeSeries,
    band: &BandSpec,
    gate_ratio: f64,
) -> Result<RateEstimate> {
    let fs = series.sample_rate();
    band.validate(fs)?;
    if series.duration_s() < MIN_RATE_WINDOW_S {
        return Err(invalid(
            "series",
            format!(
                "duration {:.3} s is shorter than {MIN_RATE_WINDOW_S} s",
                series.duration_s()
            ),
        ));
    }
    let nfft = (2 * series.len()).next_power_of_two();
    let mag = magnitude_spectrum(series.samples(), nfft);
    let bin_hz = fs / nfft as f64;
    let lo = ((band.low_hz / bin_hz).ceil() as usize).max(1);
    let hi = ((band.high_hz / bin_hz).floor() as usize).min(mag.len() - 2);
    if lo > hi {
        return Err(invalid("band", "narrower than one frequency bin"));
    }

    let peak = (lo..=hi)
        .max_by(|&a, &b| mag[a].total_cmp(&mag[b]))
        .expect("nonempty band");
    let offset = vertex_offset(mag[peak - 1], mag[peak], mag[peak + 1]);
    let peak_freq_hz = (peak as f64 + offset) * bin_hz;

    let mut in_band = mag[lo..=hi].to_vec();
    let median = median_in_place(&mut in_band);
    let prominence_ratio = if mag[peak] <= 0.0 {
        0.0
    } else if median > 0.0 {
        mag[peak] / median
    } else {
        f64::MAX
    };
    let bpm = (prominence_ratio >= gate_ratio).then_some(60.0 * peak_freq_hz);
    Ok(RateEstimate {
        bpm,
        peak_freq_hz,
        prominence_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::TAU;

    fn tone(freq: f64, secs: f64, fs: f64) -> AmplitudeSeries {
        let n = (secs * fs) as usize;
        AmplitudeSeries::new(
            (0..n).map(|i| (TAU * freq * i as f64 / fs).sin()).collect(),
            fs,
        )
        .unwrap()
    }

    #[test]
    fn breathing_tone() {
        let est = estimate_rate_fft(&tone(0.3, 60.0, 1000.0), &BandSpec::breathing(), 5.0).unwrap();
        let bpm = est.bpm.unwrap();
        assert!((bpm - 18.0).abs() <= 0.3, "{bpm}");
        assert!((est.peak_freq_hz * 60.0 - bpm).abs() < 1e-12);
    }

    #[test]
    fn heart_tone() {
        let est = estimate_rate_fft(&tone(1.2, 60.0, 1000.0), &BandSpec::heart(), 5.0).unwrap();
        assert!((est.bpm.unwrap() - 72.0).abs() <= 0.5);
    }

    #[test]
    fn sub_bin_sweep() {
        // one bin at 60 s is 1/60 Hz
        for i in 0..=20 {
            let f = 0.3 + i as f64 / 20.0 / 60.0;
            let est =
                estimate_rate_fft(&tone(f, 60.0, 200.0), &BandSpec::breathing(), 5.0).unwrap();
            assert!((est.bpm.unwrap() - 60.0 * f).abs() <= 0.3, "f={f}");
        }
    }

    #[test]
    fn white_noise_gated() {
        let mut absent = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..30_000).map(|_| rng.sample(StandardNormal)).collect();
            let s = AmplitudeSeries::new(x, 1000.0).unwrap();
            if estimate_rate_fft(&s, &BandSpec::breathing(), 5.0)
                .unwrap()
                .bpm
                .is_none()
            {
                absent += 1;
            }
        }
        assert!(absent >= 95, "{absent} of 100 absent");
    }

    #[test]
    fn too_short() {
        assert!(estimate_rate_fft(&tone(0.3, 9.0, 1000.0), &BandSpec::breathing(), 5.0).is_err());
    }

    #[test]
    fn flat_input_reports_zero_prominence() {
        let s = AmplitudeSeries::new(vec![1.0; 20_000], 1000.0).unwrap();
        let est = estimate_rate_fft(&s, &BandSpec::breathing(), 5.0).unwrap();
        assert_eq!(est.prominence_ratio, 0.0);
        assert!(est.bpm.is_none());
    }
}
