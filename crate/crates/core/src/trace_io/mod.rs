//! Persistence: WITL binary traces, CSV interchange, scenario files, the
//! ground-truth sidecar and the JSON vital report.

mod binary;
mod config;
mod csv;
mod report;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel_model::SimScenario;
use crate::error::{Error, Result};

pub use binary::{decode_trace, encode_trace, read_trace, write_trace, HEADER_LEN, MAGIC, VERSION};
pub use config::{parse_scenario, parse_scenario_with, scenario_to_config};
pub use csv::{export_csv, import_csv, read_csv, write_csv, CSV_HEADER};
pub use report::{
    read_report, report_from_json, report_to_json, validate_report_json, write_report,
};

/// What the simulator put into a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// `None` when the scenario has no breathing tone.
    pub breathing_freq_hz: Option<f64>,
    pub heart_freq_hz: Option<f64>,
    /// `(start_s, end_s)` of every motion event.
    pub motion_events: Vec<(f64, f64)>,
    pub scenario: SimScenario,
}

impl GroundTruth {
    pub fn from_scenario(s: &SimScenario) -> Self {
        Self {
            breathing_freq_hz: s.breathing.is_active().then_some(s.breathing.freq),
            heart_freq_hz: s.heartbeat.is_active().then_some(s.heartbeat.freq),
            motion_events: s.motion_events.iter().map(|e| (e.start, e.end)).collect(),
            scenario: s.clone(),
        }
    }

    pub fn breathing_bpm(&self) -> Option<f64> {
        self.breathing_freq_hz.map(|f| 60.0 * f)
    }

    pub fn heart_bpm(&self) -> Option<f64> {
        self.heart_freq_hz.map(|f| 60.0 * f)
    }

    pub fn duration_s(&self) -> f64 {
        self.scenario.duration
    }
}

pub fn truth_to_json(truth: &GroundTruth) -> String {
    serde_json::to_string_pretty(truth).expect("ground truth serializes") + "\n"
}

pub fn truth_from_json(text: &str) -> Result<GroundTruth> {
    let truth: GroundTruth = serde_json::from_str(text).map_err(|e| Error::Schema {
        path: "ground_truth".into(),
        reason: e.to_string(),
    })?;
    if let Some(&(s, e)) = truth
        .motion_events
        .iter()
        .find(|&&(s, e)| !(0.0 <= s && s < e && e <= truth.scenario.duration))
    {
        return Err(Error::Schema {
            path: "ground_truth.motion_events".into(),
            reason: format!("event ({s}, {e}) outside [0, {}]", truth.scenario.duration),
        });
    }
    Ok(truth)
}

pub fn write_truth(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    write_atomic(path.as_ref(), truth_to_json(truth).as_bytes())
}

pub fn read_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    truth_from_json(&std::fs::read_to_string(path)?)
}

/// Write `bytes` to a sibling temp file, then rename it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path.file_name().ok_or_else(|| {
        crate::error::invalid("path", format!("{} has no file name", path.display()))
    })?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}
