//! Synthesize a 60 s trace with one motion event and save it with its truth sidecar.
//!
//! `cargo run --example simulate_trace -- /tmp/demo.witl`

use csi_vitals::channel_model::{synthesize_trace, MotionEvent, SimScenario};
use csi_vitals::trace_io::{write_trace, write_truth};

fn main() -> csi_vitals::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "demo.witl".into());
    let scenario = SimScenario {
        duration: 60.0,
        noise_sigma: 2e-4,
        motion_events: vec![MotionEvent::new(25.0, 30.0, 0.02)],
        seed: 11,
        ..SimScenario::default()
    };
    let (trace, truth) = synthesize_trace(&scenario)?;
    write_trace(&out, &trace)?;
    write_truth(format!("{out}.truth.json"), &truth)?;
    println!(
        "{} frames x {} subcarriers at {} Hz -> {out}",
        trace.n_frames(),
        trace.n_subcarriers(),
        trace.sample_rate()
    );
    println!(
        "truth: breathing {:?} bpm, heart {:?} bpm, motion {:?}",
        truth.breathing_bpm(),
        truth.heart_bpm(),
        truth.motion_events
    );
    Ok(())
}
