//! End-to-end vital-sign extraction from a CSI trace.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel_model::estimate_ricean_k;
use crate::dsp::{
    bandpass, estimate_rate_fft, hampel_filter, subcarrier_variances, AmplitudeSeries, BandSpec,
    RateEstimate, DEFAULT_GATE_RATIO, HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA, MIN_RATE_WINDOW_S,
};
use crate::error::{invalid, Error, Result};
use crate::segmentation::{segment_trace, MotionSegment, SegmentLabel, SegmentationConfig};
use crate::trace::CsiTrace;
use crate::trace_io::GroundTruth;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub breathing_band: BandSpec,
    pub heart_band: BandSpec,
    pub window_s: f64,
    pub step_s: f64,
    pub gate_ratio: f64,
    pub segmentation: SegmentationConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            breathing_band: BandSpec::breathing(),
            heart_band: BandSpec::heart(),
            window_s: 30.0,
            step_s: 5.0,
            gate_ratio: DEFAULT_GATE_RATIO,
            segmentation: SegmentationConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self, sample_rate: f64) -> Result<()> {
        if !(self.window_s >= MIN_RATE_WINDOW_S) {
            return Err(invalid(
                "window_s",
                format!("must be >= {MIN_RATE_WINDOW_S}"),
            ));
        }
        if !(self.step_s > 0.0 && self.step_s <= self.window_s) {
            return Err(invalid("step_s", "must be in (0, window_s]"));
        }
        if !(self.gate_ratio >= 0.0) {
            return Err(invalid("gate_ratio", "must be >= 0"));
        }
        self.breathing_band.validate(sample_rate)?;
        self.heart_band.validate(sample_rate)?;
        self.segmentation.validate()
    }
}

/// Rates from one analysis window. A band whose peak fails the presence gate
/// is `None`; its prominence is still recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub start_s: f64,
    pub end_s: f64,
    pub breathing: Option<RateEstimate>,
    pub heart: Option<RateEstimate>,
    pub breathing_prominence: f64,
    pub heart_prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Ricean K estimate per stream on the selected subcarrier; `None` when
    /// the trace is too short for the estimator.
    pub k_estimate: Vec<Option<f64>>,
    /// Amplitude variance over the whole trace, indexed `[stream][subcarrier]`.
    pub subcarrier_variance: Vec<Vec<f64>>,
    /// `[stream, subcarrier]` whose amplitude was segmented. Differs from the
    /// reported link only when motion was found.
    pub segmentation_link: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitalReport {
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub selected_stream: usize,
    pub selected_subcarrier: usize,
    pub windows: Vec<WindowEstimate>,
    pub segments: Vec<MotionSegment>,
    pub diagnostics: Diagnostics,
}

impl VitalReport {
    pub fn breathing_bpm(&self) -> Vec<f64> {
        self.windows
            .iter()
            .filter_map(|w| w.breathing.and_then(|r| r.bpm))
            .collect()
    }

    pub fn heart_bpm(&self) -> Vec<f64> {
        self.windows
            .iter()
            .filter_map(|w| w.heart.and_then(|r| r.bpm))
            .collect()
    }
}

/// Block length for the vital-sample link score, seconds.
pub const SCORE_BLOCK_S: f64 = 10.0;

/// Link with the largest amplitude variance over all streams; ties go to the
/// lowest stream, then the lowest subcarrier.
pub fn select_link(variances: &[Vec<f64>]) -> (usize, usize) {
    let mut best = (0, 0, f64::NEG_INFINITY);
    for (s, row) in variances.iter().enumerate() {
        for (k, &v) in row.iter().enumerate() {
            if v > best.2 {
                best = (s, k, v);
            }
        }
    }
    (best.0, best.1)
}

/// Per-link sensitivity score: median over whole `block`-sample blocks inside
/// `segments` of the block amplitude variance. A few seconds of undetected
/// motion move one block, not the median.
fn vital_scores(
    trace: &CsiTrace,
    segments: &[&MotionSegment],
    block: usize,
) -> Result<Vec<Vec<f64>>> {
    (0..trace.n_streams())
        .map(|s| {
            (0..trace.n_subcarriers())
                .map(|k| {
                    let amp = trace.amplitude(s, k)?;
                    let mut vars: Vec<f64> = segments
                        .iter()
                        .flat_map(|g| amp[g.start..g.end].chunks_exact(block))
                        .map(|c| {
                            let mean = c.iter().sum::<f64>() / c.len() as f64;
                            c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / c.len() as f64
                        })
                        .collect();
                    if vars.is_empty() {
                        return Ok(0.0);
                    }
                    vars.sort_by(f64::total_cmp);
                    Ok(vars[vars.len() / 2])
                })
                .collect()
        })
        .collect()
}

fn gated(est: RateEstimate) -> Option<RateEstimate> {
    est.bpm.is_some().then_some(est)
}

/// Analysis window start indices that fit inside `[seg.start, seg.end)`,
/// on a global grid of `step` samples.
fn window_starts(seg: &MotionSegment, win: usize, step: usize) -> impl Iterator<Item = usize> {
    let first = seg.start.div_ceil(step) * step;
    let end = seg.end;
    (first..).step_by(step).take_while(move |&s| s + win <= end)
}

/// Subcarrier selection, Hampel denoising, segmentation, per-segment band
/// filtering and windowed FFT rate estimation.
pub fn run_pipeline(trace: &CsiTrace, cfg: &PipelineConfig) -> Result<VitalReport> {
    let fs = trace.sample_rate() as f64;
    cfg.validate(fs)?;
    let win = (cfg.window_s * fs).round() as usize;
    let step = ((cfg.step_s * fs).round() as usize).max(1);
    if trace.n_frames() < win {
        return Err(Error::TooFewSamples {
            needed: win,
            got: trace.n_frames(),
        });
    }

    let variances = (0..trace.n_streams())
        .map(|s| subcarrier_variances(trace, s))
        .collect::<Result<Vec<_>>>()?;
    let (stream, sub) = select_link(&variances);

    let denoised = |stream: usize, sub: usize| -> Result<AmplitudeSeries> {
        let raw = AmplitudeSeries::new(trace.amplitude(stream, sub)?, fs)?;
        Ok(hampel_filter(&raw, HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA))
    };
    let mut clean = denoised(stream, sub)?;
    let segments = segment_trace(&clean, &cfg.segmentation)?;

    // Whole-trace variance is dominated by motion when there is any, which
    // says nothing about vital sensitivity. Re-rank on the vital samples.
    let vital: Vec<&MotionSegment> = segments
        .iter()
        .filter(|s| s.label == SegmentLabel::Vital)
        .collect();
    let block = (SCORE_BLOCK_S * fs).round() as usize;
    let scores = vital_scores(trace, &vital, block)?;
    let (est_stream, est_sub) = if scores.iter().flatten().any(|&v| v > 0.0) {
        select_link(&scores)
    } else {
        (stream, sub)
    };
    if (est_stream, est_sub) != (stream, sub) {
        clean = denoised(est_stream, est_sub)?;
    }

    let k_estimate = (0..trace.n_streams())
        .map(|s| estimate_ricean_k(trace, s, est_sub).ok())
        .collect();

    let mut windows = Vec::new();
    for seg in segments.iter().filter(|s| s.label == SegmentLabel::Vital) {
        let starts: Vec<usize> = window_starts(seg, win, step).collect();
        if starts.is_empty() {
            continue;
        }
        let part = clean.slice(seg.start, seg.end)?;
        let breath = bandpass(&part, &cfg.breathing_band)?;
        let heart = bandpass(&part, &cfg.heart_band)?;
        let found = starts
            .par_iter()
            .map(|&s0| -> Result<WindowEstimate> {
                let (a, b) = (s0 - seg.start, s0 - seg.start + win);
                let br =
                    estimate_rate_fft(&breath.slice(a, b)?, &cfg.breathing_band, cfg.gate_ratio)?;
                let hr = estimate_rate_fft(&heart.slice(a, b)?, &cfg.heart_band, cfg.gate_ratio)?;
                Ok(WindowEstimate {
                    start_s: s0 as f64 / fs,
                    end_s: (s0 + win) as f64 / fs,
                    breathing: gated(br),
                    heart: gated(hr),
                    breathing_prominence: br.prominence_ratio,
                    heart_prominence: hr.prominence_ratio,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        windows.extend(found);
    }

    Ok(VitalReport {
        sample_rate_hz: fs,
        duration_s: trace.duration_s(),
        selected_stream: est_stream,
        selected_subcarrier: est_sub,
        windows,
        segments,
        diagnostics: Diagnostics {
            k_estimate,
            subcarrier_variance: variances,
            segmentation_link: [stream, sub],
        },
    })
}

/// Error statistics for one vital sign over the windows that reported it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VitalError {
    pub n_windows: usize,
    pub mean_abs_error_bpm: Option<f64>,
    pub accuracy_percent: Option<f64>,
}

impl VitalError {
    fn from_estimates(est: &[f64], truth_bpm: Option<f64>) -> Self {
        match truth_bpm {
            Some(t) if !est.is_empty() => {
                let n = est.len() as f64;
                let mae = est.iter().map(|e| (e - t).abs()).sum::<f64>() / n;
                let acc = est.iter().map(|e| 1.0 - (e - t).abs() / t).sum::<f64>() / n * 100.0;
                Self {
                    n_windows: est.len(),
                    mean_abs_error_bpm: Some(mae),
                    accuracy_percent: Some(acc),
                }
            }
            _ => Self {
                n_windows: est.len(),
                mean_abs_error_bpm: None,
                accuracy_percent: None,
            },
        }
    }
}

/// Distance between a true motion event and the closest detected
/// OtherMotion segment; `None` when nothing was detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryError {
    pub start_error_s: Option<f64>,
    pub end_error_s: Option<f64>,
}

impl BoundaryError {
    pub fn within(&self, tol_s: f64) -> bool {
        matches!((self.start_error_s, self.end_error_s), (Some(a), Some(b)) if a <= tol_s && b <= tol_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub breathing: VitalError,
    pub heart: VitalError,
    pub boundary_errors_s: Vec<BoundaryError>,
}

/// Detected-vs-true boundary errors for each event, matching each event to
/// the OtherMotion segment that overlaps it most (or is nearest).
pub fn boundary_errors(
    segments: &[MotionSegment],
    events_s: &[(f64, f64)],
    sample_rate: f64,
) -> Vec<BoundaryError> {
    let motions: Vec<(f64, f64)> = segments
        .iter()
        .filter(|s| s.label == SegmentLabel::OtherMotion)
        .map(|s| (s.start as f64 / sample_rate, s.end as f64 / sample_rate))
        .collect();
    events_s
        .iter()
        .map(|&(t1, t2)| {
            let score = |&(a, b): &(f64, f64)| {
                let overlap = b.min(t2) - a.max(t1);
                if overlap > 0.0 {
                    overlap
                } else {
                    overlap - 1e9
                }
            };
            match motions.iter().max_by(|x, y| score(x).total_cmp(&score(y))) {
                Some(&(a, b)) => BoundaryError {
                    start_error_s: Some((a - t1).abs()),
                    end_error_s: Some((b - t2).abs()),
                },
                None => BoundaryError {
                    start_error_s: None,
                    end_error_s: None,
                },
            }
        })
        .collect()
}

pub fn evaluate_against_truth(report: &VitalReport, truth: &GroundTruth) -> Result<Evaluation> {
    let support = truth.duration_s();
    let tol = 1.0 / report.sample_rate_hz;
    if report.duration_s <= 0.0
        || (report.duration_s - support).abs() > 1.0
        || report
            .windows
            .iter()
            .any(|w| w.end_s > support + tol || w.start_s < 0.0)
    {
        return Err(Error::DisjointSupport);
    }
    Ok(Evaluation {
        breathing: VitalError::from_estimates(&report.breathing_bpm(), truth.breathing_bpm()),
        heart: VitalError::from_estimates(&report.heart_bpm(), truth.heart_bpm()),
        boundary_errors_s: boundary_errors(
            &report.segments,
            &truth.motion_events,
            report.sample_rate_hz,
        ),
    })
}
