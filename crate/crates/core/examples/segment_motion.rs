//! Split a trace into vital and motion segments.

use csi_vitals::channel_model::{synthesize_trace, MotionEvent, SimScenario};
use csi_vitals::dsp::{
    hampel_filter, select_subcarrier, AmplitudeSeries, HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA,
};
use csi_vitals::segmentation::{segment_trace, SegmentationConfig};

fn main() -> csi_vitals::Result<()> {
    let scenario = SimScenario {
        duration: 80.0,
        noise_sigma: 2e-4,
        motion_events: vec![
            MotionEvent::new(20.0, 24.0, 0.02),
            MotionEvent::new(50.0, 57.0, 0.01),
        ],
        seed: 5,
        ..SimScenario::default()
    };
    let (trace, _) = synthesize_trace(&scenario)?;
    let sub = select_subcarrier(&trace, 0)?;
    let fs = trace.sample_rate() as f64;
    let amp = AmplitudeSeries::new(trace.amplitude(0, sub)?, fs)?;
    let amp = hampel_filter(&amp, HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA);
    let cfg = SegmentationConfig {
        med_stride: 10,
        ..SegmentationConfig::default()
    };
    println!("true events: 20-24 s, 50-57 s");
    for s in segment_trace(&amp, &cfg)? {
        println!(
            "{:>7.2} .. {:>7.2} s  {:?}",
            s.start as f64 / fs,
            s.end as f64 / fs,
            s.label
        );
    }
    Ok(())
}
