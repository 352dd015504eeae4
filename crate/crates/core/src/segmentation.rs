//! Regularity-based motion segmentation.
//!
//! Breathing is quasi-periodic: a fresh window `B` of CSI amplitude almost always
//! has a close match somewhere in the recent history `A`. Body motion such as
//! turning over is not, so the minimum Euclidean distance (MED) between `B` and
//! every equal-length slice of `A` jumps when motion begins. The segmenter
//!
//! 1. grows `A` and slides `B` by `step` packets, recording MED values in `MA`;
//! 2. flags a positioning activation point (PAP) once `MED > v * mean(MA)`;
//! 3. fits a flat-then-ramp auxiliary waveform to the MED curve behind the PAP
//!    and takes the turning point (TP) with the smallest Euclidean distance as
//!    the motion start;
//! 4. slides `B` onward against the clean pre-motion history until MED falls
//!    back under the same threshold, fits the mirrored ramp-then-flat waveform
//!    to place the motion end, and restarts from there.
//!
//! Positions in the start search are the END index of `B` (the first packet of
//! motion is where a rising MED begins); positions in the end search are the
//! START index of `B` (the first clean packet is where a falling MED flattens).

use serde::{Deserialize, Serialize};

use crate::dsp::AmplitudeSeries;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationConfig {
    /// Initial length of A and fixed length of B, packets.
    pub init_window_len: usize,
    /// Growth of A and shift of B per iteration, packets.
    pub step: usize,
    /// Activation factor `v`.
    pub activation_factor: f64,
    /// Distance between TP and WEP, packets.
    pub tp_wep_gap: usize,
    /// TP scan increment, packets.
    pub tp_step: usize,
    /// Number of TP candidates.
    pub tp_iterations: usize,
    /// Offset stride of the MED search inside A.
    pub med_stride: usize,
    /// Upper bound on the length of A, packets. `None` lets A grow from the
    /// beginning of the waveform without limit (cost quadratic in trace length).
    pub max_history_len: Option<usize>,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            init_window_len: 2000,
            step: 100,
            activation_factor: 2.5,
            tp_wep_gap: 20,
            tp_step: 10,
            tp_iterations: 50,
            med_stride: 1,
            max_history_len: Some(10_000),
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("init_window_len", self.init_window_len),
            ("step", self.step),
            ("tp_wep_gap", self.tp_wep_gap),
            ("tp_step", self.tp_step),
            ("tp_iterations", self.tp_iterations),
            ("med_stride", self.med_stride),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(invalid(name, "must be >= 1"));
            }
        }
        if !(self.activation_factor > 1.0 && self.activation_factor.is_finite()) {
            return Err(invalid("activation_factor", "must be finite and > 1"));
        }
        if let Some(cap) = self.max_history_len {
            if cap < self.init_window_len {
                return Err(invalid("max_history_len", "must be >= init_window_len"));
            }
        }
        Ok(())
    }
}

/// One MED sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub position: usize,
    pub med: f64,
}

/// MED values at strictly increasing positions.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RegularityProfile {
    points: Vec<ProfilePoint>,
}

impl RegularityProfile {
    pub fn new(points: Vec<ProfilePoint>) -> Result<Self> {
        if points.windows(2).any(|w| w[0].position >= w[1].position) {
            return Err(invalid("profile", "positions must be strictly increasing"));
        }
        if points.iter().any(|p| !(p.med >= 0.0)) {
            return Err(invalid("profile", "MED values must be >= 0"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ProfilePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Piecewise-linear MED at `position`, held constant beyond the ends.
    pub fn value_at(&self, position: usize) -> f64 {
        let pts = &self.points;
        match pts.binary_search_by_key(&position, |p| p.position) {
            Ok(i) => pts[i].med,
            Err(0) => pts[0].med,
            Err(i) if i == pts.len() => pts[i - 1].med,
            Err(i) => {
                let (a, b) = (pts[i - 1], pts[i]);
                let t = (position - a.position) as f64 / (b.position - a.position) as f64;
                a.med + t * (b.med - a.med)
            }
        }
    }

    fn mean_in(&self, lo: usize, hi: usize) -> Option<f64> {
        let vals: Vec<f64> = self
            .points
            .iter()
            .filter(|p| lo <= p.position && p.position <= hi)
            .map(|p| p.med)
            .collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

fn med_slices(history: &[f64], probe: &[f64], stride: usize) -> f64 {
    const CHUNK: usize = 64;
    let m = probe.len();
    let mut best = f64::INFINITY;
    for o in (0..=history.len() - m).step_by(stride) {
        let cand = &history[o..o + m];
        let mut acc = 0.0;
        for (c, p) in cand.chunks(CHUNK).zip(probe.chunks(CHUNK)) {
            acc += c.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            if acc >= best {
                break;
            }
        }
        if acc < best {
            best = acc;
        }
    }
    best.sqrt()
}

/// Smallest Euclidean distance between `probe` and any equal-length slice of
/// `history` starting at a multiple of `stride`.
pub fn min_euclidean_distance(
    history: &AmplitudeSeries,
    probe: &AmplitudeSeries,
    stride: usize,
) -> Result<f64> {
    if probe.len() > history.len() {
        return Err(invalid("probe", "longer than history"));
    }
    if stride == 0 {
        return Err(invalid("stride", "must be >= 1"));
    }
    Ok(med_slices(history.samples(), probe.samples(), stride))
}

/// MED profile over a whole series: A starts at the series start with
/// `init_window_len` packets and grows by `step` (bounded by
/// `max_history_len`, keeping the most recent packets); B has length
/// `init_window_len` and starts where A ends. Positions are B's end index.
pub fn regularity_profile(
    series: &AmplitudeSeries,
    cfg: &SegmentationConfig,
) -> Result<RegularityProfile> {
    cfg.validate()?;
    let l = cfg.init_window_len;
    if series.len() < 2 * l {
        return Err(Error::TooFewSamples {
            needed: 2 * l,
            got: series.len(),
        });
    }
    let walker = Walker::new(series.samples(), cfg);
    let points = (0..)
        .map(|i| 2 * l + i * cfg.step)
        .take_while(|&pos| pos <= series.len())
        .map(|pos| ProfilePoint {
            position: pos,
            med: walker.growing(0, pos),
        })
        .collect();
    RegularityProfile::new(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Continue,
    ActivationAt(usize),
}

/// Activation test: fires iff `med > v * mean(ma)`, otherwise records `med`.
/// The first value only seeds `ma`.
pub fn detect_activation(position: usize, med: f64, ma: &mut Vec<f64>, v: f64) -> Activation {
    if !ma.is_empty() {
        let mean = ma.iter().sum::<f64>() / ma.len() as f64;
        if med > v * mean {
            return Activation::ActivationAt(position);
        }
    }
    ma.push(med);
    Activation::Continue
}

/// Outcome of start/end positioning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Located {
    pub position: usize,
    /// Fewer than `tp_iterations` candidates fit inside the profile.
    pub insufficient_history: bool,
}

fn best_candidate<F: Fn(usize) -> f64>(cands: &[usize], ed: F) -> usize {
    let mut best = (cands[0], ed(cands[0]));
    for &tp in &cands[1..] {
        let e = ed(tp);
        if e < best.1 {
            best = (tp, e);
        }
    }
    best.0
}

/// Motion start behind an activation point.
///
/// Candidates are `pap - k * tp_step`, `k = 1..=tp_iterations`. Each candidate's
/// auxiliary waveform is the mean MED over `[support_start, TP]`, then a linear
/// ramp reaching `MED(pap)` at `TP + tp_wep_gap`, then flat. The distance to
/// the interpolated profile is measured at every packet of
/// `[earliest candidate, pap]`; the closest candidate wins, earliest on ties.
pub fn locate_start(profile: &RegularityProfile, pap: usize, cfg: &SegmentationConfig) -> Located {
    let Some(first) = profile.points().first().map(|p| p.position) else {
        return Located {
            position: pap,
            insufficient_history: true,
        };
    };
    let mut cands: Vec<usize> = (1..=cfg.tp_iterations)
        .filter_map(|k| pap.checked_sub(k * cfg.tp_step))
        .filter(|&tp| tp >= first)
        .collect();
    let insufficient_history = cands.len() < cfg.tp_iterations;
    if cands.is_empty() {
        return Located {
            position: first.min(pap),
            insufficient_history,
        };
    }
    cands.reverse();
    let lo = cands[0];
    let level = profile.value_at(pap);
    let actual: Vec<f64> = (lo..=pap).map(|t| profile.value_at(t)).collect();
    let gap = cfg.tp_wep_gap as f64;
    let position = best_candidate(&cands, |tp| {
        let base = profile
            .mean_in(lo, tp)
            .unwrap_or_else(|| profile.value_at(tp));
        (lo..=pap)
            .zip(&actual)
            .map(|(t, &y)| {
                let aux = if t <= tp {
                    base
                } else {
                    base + (level - base) * ((t - tp) as f64 / gap).min(1.0)
                };
                (aux - y) * (aux - y)
            })
            .sum::<f64>()
    });
    Located {
        position,
        insufficient_history,
    }
}

/// Motion end ahead of a falling crossing point `fap`: the mirror image of
/// [`locate_start`]. Candidates are `fap + k * tp_step`; the auxiliary waveform
/// holds `MED(fap)`, ramps down over `[TP - tp_wep_gap, TP]` and then stays at
/// the mean MED over `[TP, support_end]`.
pub fn locate_end(profile: &RegularityProfile, fap: usize, cfg: &SegmentationConfig) -> Located {
    let Some(last) = profile.points().last().map(|p| p.position) else {
        return Located {
            position: fap,
            insufficient_history: true,
        };
    };
    let cands: Vec<usize> = (1..=cfg.tp_iterations)
        .map(|k| fap + k * cfg.tp_step)
        .filter(|&tp| tp <= last)
        .collect();
    let insufficient_history = cands.len() < cfg.tp_iterations;
    if cands.is_empty() {
        return Located {
            position: last.max(fap),
            insufficient_history,
        };
    }
    let hi = *cands.last().expect("nonempty");
    let level = profile.value_at(fap);
    let actual: Vec<f64> = (fap..=hi).map(|t| profile.value_at(t)).collect();
    let gap = cfg.tp_wep_gap as f64;
    let position = best_candidate(&cands, |tp| {
        let base = profile
            .mean_in(tp, hi)
            .unwrap_or_else(|| profile.value_at(tp));
        (fap..=hi)
            .zip(&actual)
            .map(|(t, &y)| {
                let aux = if t >= tp {
                    base
                } else {
                    let to_go = (tp - t) as f64;
                    base + (level - base) * (to_go / gap).min(1.0)
                };
                (aux - y) * (aux - y)
            })
            .sum::<f64>()
    });
    Located {
        position,
        insufficient_history,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentLabel {
    Vital,
    OtherMotion,
}

/// Half-open sample interval `[start, end)` with its label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MotionSegment {
    pub start: usize,
    pub end: usize,
    pub label: SegmentLabel,
}

impl MotionSegment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains_range(&self, start: usize, end: usize) -> bool {
        self.start <= start && end <= self.end
    }
}

/// Segmentation result with positioning diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Segmentation {
    pub segments: Vec<MotionSegment>,
    /// Boundaries placed with fewer TP candidates than configured.
    pub short_history_boundaries: usize,
}

struct Walker<'a> {
    x: &'a [f64],
    cfg: &'a SegmentationConfig,
}

impl<'a> Walker<'a> {
    fn new(x: &'a [f64], cfg: &'a SegmentationConfig) -> Self {
        Self { x, cfg }
    }

    /// MED of `B = x[pos - L, pos)` against the growing history `A` that
    /// starts at `begin` and ends where B starts.
    fn growing(&self, begin: usize, pos: usize) -> f64 {
        let l = self.cfg.init_window_len;
        let a_end = pos - l;
        let a_start = match self.cfg.max_history_len {
            Some(cap) => begin.max(a_end.saturating_sub(cap)),
            None => begin,
        };
        med_slices(
            &self.x[a_start..a_end],
            &self.x[a_end..pos],
            self.cfg.med_stride,
        )
    }

    /// MED of `B = x[pos, pos + L)` against a fixed reference slice.
    fn against(&self, reference: (usize, usize), pos: usize) -> f64 {
        let l = self.cfg.init_window_len;
        med_slices(
            &self.x[reference.0..reference.1],
            &self.x[pos..pos + l],
            self.cfg.med_stride,
        )
    }
}

struct StartFound {
    start: Located,
    pap: usize,
    threshold: f64,
}

fn find_start(w: &Walker, begin: usize) -> Option<StartFound> {
    let cfg = w.cfg;
    let (n, l) = (w.x.len(), cfg.init_window_len);
    let mut ma = Vec::new();
    let mut prev = None;
    let mut pos = begin + 2 * l;
    while pos <= n {
        let med = w.growing(begin, pos);
        match detect_activation(pos, med, &mut ma, cfg.activation_factor) {
            Activation::Continue => {
                prev = Some(pos);
                pos += cfg.step;
            }
            Activation::ActivationAt(coarse) => {
                let threshold = cfg.activation_factor * ma.iter().sum::<f64>() / ma.len() as f64;
                // first fine-grid crossing between the last quiet point and the PAP
                let lo = prev.unwrap_or(coarse);
                let pap = (1..)
                    .map(|k| lo + k * cfg.tp_step)
                    .take_while(|&q| q < coarse)
                    .find(|&q| w.growing(begin, q) > threshold)
                    .unwrap_or(coarse);
                let points = (0..=cfg.tp_iterations)
                    .rev()
                    .filter_map(|k| pap.checked_sub(k * cfg.tp_step))
                    .filter(|&q| q >= begin + 2 * l)
                    .map(|q| ProfilePoint {
                        position: q,
                        med: w.growing(begin, q),
                    })
                    .collect();
                let profile = RegularityProfile::new(points).expect("ascending positions");
                let mut start = locate_start(&profile, pap, cfg);
                start.position = start.position.max(begin);
                return Some(StartFound {
                    start,
                    pap,
                    threshold,
                });
            }
        }
    }
    None
}

fn find_end(w: &Walker, begin: usize, found: &StartFound) -> Option<Located> {
    let cfg = w.cfg;
    let (n, l) = (w.x.len(), cfg.init_window_len);
    let s = found.start.position;
    let ref_hi = s.max(begin + l).min(n);
    let ref_lo = match cfg.max_history_len {
        Some(cap) => begin.max(ref_hi.saturating_sub(cap)),
        None => begin,
    };
    let reference = (ref_lo, ref_hi);

    let mut seen_high = false;
    let mut last_high = None;
    let mut p = s.max(found.pap.saturating_sub(l));
    let coarse = loop {
        if p + l > n {
            return None;
        }
        let med = w.against(reference, p);
        if med > found.threshold {
            seen_high = true;
            last_high = Some(p);
        } else if seen_high || p >= found.pap {
            break p;
        }
        p += cfg.step;
    };
    let fap = match last_high {
        Some(hi) => (1..)
            .map(|k| hi + k * cfg.tp_step)
            .take_while(|&q| q < coarse)
            .find(|&q| w.against(reference, q) <= found.threshold)
            .unwrap_or(coarse),
        None => coarse,
    };
    let points = (0..=cfg.tp_iterations)
        .map(|k| fap + k * cfg.tp_step)
        .take_while(|&q| q + l <= n)
        .map(|q| ProfilePoint {
            position: q,
            med: w.against(reference, q),
        })
        .collect();
    let profile = RegularityProfile::new(points).expect("ascending positions");
    let mut end = locate_end(&profile, fap, cfg);
    end.position = end.position.clamp(s + 1, n);
    Some(end)
}

/// Split a series into alternating Vital / OtherMotion segments that exactly
/// partition `[0, len)`.
pub fn segment_series(series: &AmplitudeSeries, cfg: &SegmentationConfig) -> Result<Segmentation> {
    cfg.validate()?;
    let x = series.samples();
    let n = x.len();
    let walker = Walker::new(x, cfg);
    let mut out = Segmentation::default();
    let mut raw = Vec::new();
    let mut begin = 0;
    while begin < n {
        let Some(found) = find_start(&walker, begin) else {
            break;
        };
        let s = found.start.position;
        out.short_history_boundaries += found.start.insufficient_history as usize;
        raw.push(MotionSegment {
            start: begin,
            end: s,
            label: SegmentLabel::Vital,
        });
        match find_end(&walker, begin, &found) {
            Some(end) => {
                out.short_history_boundaries += end.insufficient_history as usize;
                raw.push(MotionSegment {
                    start: s,
                    end: end.position,
                    label: SegmentLabel::OtherMotion,
                });
                begin = end.position;
            }
            None => {
                raw.push(MotionSegment {
                    start: s,
                    end: n,
                    label: SegmentLabel::OtherMotion,
                });
                begin = n;
            }
        }
    }
    raw.push(MotionSegment {
        start: begin,
        end: n,
        label: SegmentLabel::Vital,
    });

    for seg in raw.into_iter().filter(|s| !s.is_empty()) {
        match out.segments.last_mut() {
            Some(last) if last.label == seg.label => last.end = seg.end,
            _ => out.segments.push(seg),
        }
    }
    Ok(out)
}

/// Segment list only; see [`segment_series`].
pub fn segment_trace(
    series: &AmplitudeSeries,
    cfg: &SegmentationConfig,
) -> Result<Vec<MotionSegment>> {
    Ok(segment_series(series, cfg)?.segments)
}

/// Exact-partition check: sorted, gap-free, non-overlapping, non-empty, covering `[0, len)`.
pub fn is_partition(segments: &[MotionSegment], len: usize) -> bool {
    if len == 0 {
        return segments.is_empty();
    }
    !segments.is_empty()
        && segments[0].start == 0
        && segments.last().map(|s| s.end) == Some(len)
        && segments.iter().all(|s| s.start < s.end)
        && segments.windows(2).all(|w| w[0].end == w[1].start)
}
