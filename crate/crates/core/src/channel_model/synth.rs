//! Deterministic CSI synthesis from a declarative scenario.
//!
//! Every link carries `H(t) = sqrt(Omega) e^{j(phi0 - k*delta)} (|Hs| + |Hd| e^{-j(2 pi d(t)/lambda - theta_k)}) + n(t)`
//! where `theta_k = theta + k*delta + s*delta/2` for subcarrier `k` on stream `s` and
//! `delta = pi / n_subcarriers`. The common rotation leaves amplitudes untouched;
//! the per-link relative phase changes how strongly each link reacts to `d(t)`,
//! which is what makes subcarrier selection matter.
//!
//! Randomness comes from ChaCha8 seeded with the scenario seed: stream 0 drives
//! the receiver noise, stream 1 the motion random walks.

use std::f64::consts::{PI, TAU};

use num_complex::{Complex32, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::ricean::RiceanChannelParams;
use crate::error::{invalid, Error, Result};
use crate::trace::CsiTrace;
use crate::trace_io::GroundTruth;

/// Walk excursions are clamped to this many wavelengths either side of zero.
pub const WALK_CLAMP_WAVELENGTHS: f64 = 10.0;

/// A periodic body displacement (breathing or heartbeat).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VitalTone {
    /// Hz
    pub freq: f64,
    /// Peak path-length change, meters.
    pub displacement_amp: f64,
}

impl VitalTone {
    pub const fn new(freq: f64, displacement_amp: f64) -> Self {
        Self {
            freq,
            displacement_amp,
        }
    }

    pub const fn absent() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn is_active(&self) -> bool {
        self.displacement_amp > 0.0
    }

    fn displacement(&self, t: f64) -> f64 {
        if self.is_active() {
            self.displacement_amp * (TAU * self.freq * t).sin()
        } else {
            0.0
        }
    }
}

/// Non-vital body motion (turning over, getting up), seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionEvent {
    pub start: f64,
    pub end: f64,
    /// Per-sample standard deviation of the path-length random walk, meters.
    pub displacement_walk_scale: f64,
}

impl MotionEvent {
    pub const fn new(start: f64, end: f64, displacement_walk_scale: f64) -> Self {
        Self {
            start,
            end,
            displacement_walk_scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    /// Seconds.
    pub duration: f64,
    /// Packets per second.
    pub sample_rate: u32,
    pub channel: RiceanChannelParams,
    pub breathing: VitalTone,
    pub heartbeat: VitalTone,
    pub motion_events: Vec<MotionEvent>,
    /// Per-component standard deviation of the complex AWGN.
    pub noise_sigma: f64,
    pub n_subcarriers: u16,
    pub n_streams: u16,
    pub seed: u64,
}

impl Default for SimScenario {
    fn default() -> Self {
        Self {
            duration: 60.0,
            sample_rate: 1000,
            channel: RiceanChannelParams::default(),
            breathing: VitalTone::new(0.3, 0.002),
            heartbeat: VitalTone::new(1.2, 0.0003),
            motion_events: Vec::new(),
            noise_sigma: 0.002,
            n_subcarriers: 30,
            n_streams: 1,
            seed: 0,
        }
    }
}

impl SimScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(invalid("duration", "must be finite and > 0"));
        }
        if self.sample_rate == 0 {
            return Err(invalid("sample_rate", "must be > 0"));
        }
        self.channel.validate()?;
        for (name, tone) in [
            ("breathing", &self.breathing),
            ("heartbeat", &self.heartbeat),
        ] {
            if !(tone.displacement_amp >= 0.0 && tone.displacement_amp.is_finite()) {
                return Err(invalid(
                    "displacement_amp",
                    format!("{name} amplitude must be >= 0"),
                ));
            }
            if tone.is_active() && !(tone.freq > 0.0 && tone.freq.is_finite()) {
                return Err(invalid("freq", format!("{name} frequency must be > 0")));
            }
        }
        let fs = self.sample_rate as f64;
        if self.heartbeat.is_active() && fs <= 2.0 * self.heartbeat.freq {
            return Err(Error::Aliasing {
                sample_rate: fs,
                heart_freq: self.heartbeat.freq,
            });
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(invalid("noise_sigma", "must be finite and >= 0"));
        }
        if self.n_subcarriers == 0 || self.n_streams == 0 {
            return Err(invalid("shape", "n_subcarriers and n_streams must be >= 1"));
        }
        for ev in &self.motion_events {
            if !(0.0 <= ev.start && ev.start < ev.end && ev.end <= self.duration) {
                return Err(invalid(
                    "motion_events",
                    format!(
                        "event [{}, {}) outside [0, {}]",
                        ev.start, ev.end, self.duration
                    ),
                ));
            }
            if !(ev.displacement_walk_scale >= 0.0 && ev.displacement_walk_scale.is_finite()) {
                return Err(invalid(
                    "displacement_walk_scale",
                    "must be finite and >= 0",
                ));
            }
        }
        let mut sorted: Vec<&MotionEvent> = self.motion_events.iter().collect();
        sorted.sort_by(|a, b| a.start.total_cmp(&b.start));
        for w in sorted.windows(2) {
            if w[1].start < w[0].end {
                return Err(Error::OverlappingEvents {
                    a_start: w[0].start,
                    a_end: w[0].end,
                    b_start: w[1].start,
                    b_end: w[1].end,
                });
            }
        }
        Ok(())
    }

    pub fn n_frames(&self) -> usize {
        (self.duration * self.sample_rate as f64).round() as usize
    }

    /// Path-length change `d(t)` for every frame, including motion walks.
    pub fn displacement_series(&self) -> Vec<f64> {
        let fs = self.sample_rate as f64;
        let mut d: Vec<f64> = (0..self.n_frames())
            .map(|i| {
                let t = i as f64 / fs;
                self.breathing.displacement(t) + self.heartbeat.displacement(t)
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(1);
        let clamp = WALK_CLAMP_WAVELENGTHS * self.channel.lambda;
        let mut events = self.motion_events.clone();
        events.sort_by(|a, b| a.start.total_cmp(&b.start));
        for ev in &events {
            let lo = (ev.start * fs).round() as usize;
            let hi = ((ev.end * fs).round() as usize).min(d.len());
            let mut walk = 0.0f64;
            for x in &mut d[lo.min(hi)..hi] {
                let step: f64 = rng.sample(StandardNormal);
                walk = (walk + step * ev.displacement_walk_scale).clamp(-clamp, clamp);
                *x += walk;
            }
        }
        d
    }
}

/// Relative static/dynamic phase of a link.
pub fn link_theta(theta: f64, stream: usize, subcarrier: usize, n_subcarriers: usize) -> f64 {
    let delta = PI / n_subcarriers as f64;
    theta + delta * (subcarrier as f64 + 0.5 * stream as f64)
}

/// Synthesize a trace and its ground truth.
pub fn synthesize_trace(scenario: &SimScenario) -> Result<(CsiTrace, GroundTruth)> {
    scenario.validate()?;
    let ch = &scenario.channel;
    let (n_st, n_sc) = (scenario.n_streams as usize, scenario.n_subcarriers as usize);
    let scale = ch.omega.sqrt();
    let (hs, hd) = (scale * ch.hs_mag(), scale * ch.hd_mag());
    let delta = PI / n_sc as f64;

    // per link: common rotation and dynamic vector at d = 0
    let mut rot = Vec::with_capacity(n_st * n_sc);
    let mut dyn0 = Vec::with_capacity(n_st * n_sc);
    for s in 0..n_st {
        for k in 0..n_sc {
            rot.push(Complex64::from_polar(1.0, ch.phi0 - delta * k as f64));
            dyn0.push(Complex64::from_polar(hd, link_theta(ch.theta, s, k, n_sc)));
        }
    }

    let displacement = scenario.displacement_series();
    let mut noise_rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    noise_rng.set_stream(0);
    let sigma = scenario.noise_sigma;
    let wavenumber = TAU / ch.lambda;

    let mut data = Vec::with_capacity(displacement.len() * n_st * n_sc);
    for &d in &displacement {
        let spin = Complex64::from_polar(1.0, -wavenumber * d);
        for (r, h0) in rot.iter().zip(&dyn0) {
            let mut h = r * (hs + h0 * spin);
            if sigma > 0.0 {
                let re: f64 = noise_rng.sample(StandardNormal);
                let im: f64 = noise_rng.sample(StandardNormal);
                h += Complex64::new(re * sigma, im * sigma);
            }
            data.push(Complex32::new(h.re as f32, h.im as f32));
        }
    }

    let trace = CsiTrace::new(
        scenario.sample_rate,
        scenario.n_streams,
        scenario.n_subcarriers,
        0,
        data,
    )?;
    Ok((trace, GroundTruth::from_scenario(scenario)))
}

/// Draw `n` samples of `sqrt(K Omega/(K+1)) e^{j phi0} + sqrt(Omega/(K+1)) h`,
/// `h ~ CN(0, 1)`: the Ricean envelope of a static antenna pair.
pub fn ricean_samples(k_factor: f64, omega: f64, phi0: f64, n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let los = Complex64::from_polar((k_factor * omega / (k_factor + 1.0)).sqrt(), phi0);
    // CN(0,1): each component has variance 1/2
    let diffuse = (omega / (k_factor + 1.0) / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            los + Complex64::new(re * diffuse, im * diffuse)
        })
        .collect()
}

/// Single-link trace whose samples follow the Ricean model with the given K.
pub fn ricean_trace(
    k_factor: f64,
    n_frames: usize,
    sample_rate: u32,
    seed: u64,
) -> Result<CsiTrace> {
    if !(k_factor >= 0.0 && k_factor.is_finite()) {
        return Err(invalid("k_factor", "must be finite and >= 0"));
    }
    let data = ricean_samples(k_factor, 1.0, 0.0, n_frames, seed)
        .into_iter()
        .map(|h| Complex32::new(h.re as f32, h.im as f32))
        .collect();
    CsiTrace::new(sample_rate, 1, 1, 0, data)
}
