//! Spectral rate estimation with the prominence gate, on a tone and on noise.

use csi_vitals::dsp::{estimate_rate_fft, AmplitudeSeries, BandSpec, DEFAULT_GATE_RATIO};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() -> csi_vitals::Result<()> {
    let fs = 50.0;
    let n = 30 * 50;
    let tone: Vec<f64> = (0..n)
        .map(|i| (std::f64::consts::TAU * 1.23 * i as f64 / fs).sin())
        .collect();
    let est = estimate_rate_fft(
        &AmplitudeSeries::new(tone, fs)?,
        &BandSpec::heart(),
        DEFAULT_GATE_RATIO,
    )?;
    println!(
        "1.23 Hz tone -> {:?} bpm (prominence {:.1})",
        est.bpm, est.prominence_ratio
    );

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let noise: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
    let est = estimate_rate_fft(
        &AmplitudeSeries::new(noise, fs)?,
        &BandSpec::heart(),
        DEFAULT_GATE_RATIO,
    )?;
    println!(
        "white noise   -> {:?} bpm (prominence {:.1})",
        est.bpm, est.prominence_ratio
    );
    Ok(())
}
