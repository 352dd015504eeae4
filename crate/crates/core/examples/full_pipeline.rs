//! Whole pipeline on a two-minute scenario, scored against ground truth.

use csi_vitals::channel_model::{synthesize_trace, MotionEvent, SimScenario};
use csi_vitals::pipeline::{evaluate_against_truth, run_pipeline, PipelineConfig};

fn main() -> csi_vitals::Result<()> {
    let mut scenario = SimScenario {
        duration: 120.0,
        noise_sigma: 5e-4,
        motion_events: vec![MotionEvent::new(55.0, 60.0, 0.02)],
        seed: 9,
        ..SimScenario::default()
    };
    scenario.heartbeat.displacement_amp = 0.0005;
    let (trace, truth) = synthesize_trace(&scenario)?;

    let mut cfg = PipelineConfig::default();
    cfg.segmentation.med_stride = 10;
    let report = run_pipeline(&trace, &cfg)?;
    println!(
        "link stream {} subcarrier {}, {} segments, {} windows",
        report.selected_stream,
        report.selected_subcarrier,
        report.segments.len(),
        report.windows.len()
    );
    for w in &report.windows {
        let fmt = |r: Option<f64>| r.map_or("  -  ".to_string(), |v| format!("{v:5.1}"));
        println!(
            "{:>6.1}-{:>6.1} s  breathing {}  heart {}",
            w.start_s,
            w.end_s,
            fmt(w.breathing.and_then(|r| r.bpm)),
            fmt(w.heart.and_then(|r| r.bpm))
        );
    }
    let ev = evaluate_against_truth(&report, &truth)?;
    println!("breathing: {:?}", ev.breathing);
    println!("heart:     {:?}", ev.heart);
    println!("motion boundary errors (s): {:?}", ev.boundary_errors_s);
    Ok(())
}
