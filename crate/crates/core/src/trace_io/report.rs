//! JSON vital report. Every emit and every read is checked against a fixed
//! schema; violations name the offending field path.

use std::path::Path;

use serde_json::Value;

use crate::error::{Error, Result};
use crate::pipeline::VitalReport;

enum Ty {
    Num,
    UInt,
    Label,
    Nullable(Box<Ty>),
    Array(Box<Ty>),
    Object(Vec<(&'static str, Ty)>),
}

fn nullable(t: Ty) -> Ty {
    Ty::Nullable(Box::new(t))
}

fn array(t: Ty) -> Ty {
    Ty::Array(Box::new(t))
}

fn schema() -> Ty {
    let rate = || {
        Ty::Object(vec![
            ("bpm", nullable(Ty::Num)),
            ("peak_freq_hz", Ty::Num),
            ("prominence_ratio", Ty::Num),
        ])
    };
    Ty::Object(vec![
        ("sample_rate_hz", Ty::Num),
        ("duration_s", Ty::Num),
        ("selected_stream", Ty::UInt),
        ("selected_subcarrier", Ty::UInt),
        (
            "windows",
            array(Ty::Object(vec![
                ("start_s", Ty::Num),
                ("end_s", Ty::Num),
                ("breathing", nullable(rate())),
                ("heart", nullable(rate())),
                ("breathing_prominence", Ty::Num),
                ("heart_prominence", Ty::Num),
            ])),
        ),
        (
            "segments",
            array(Ty::Object(vec![
                ("start", Ty::UInt),
                ("end", Ty::UInt),
                ("label", Ty::Label),
            ])),
        ),
        (
            "diagnostics",
            Ty::Object(vec![
                ("k_estimate", array(nullable(Ty::Num))),
                ("subcarrier_variance", array(array(Ty::Num))),
                ("segmentation_link", array(Ty::UInt)),
            ]),
        ),
    ])
}

fn violation(path: &str, reason: impl Into<String>) -> Error {
    Error::Schema {
        path: if path.is_empty() {
            "$".into()
        } else {
            path.to_string()
        },
        reason: reason.into(),
    }
}

fn check(v: &Value, ty: &Ty, path: &str) -> Result<()> {
    match ty {
        Ty::Num if v.is_number() => Ok(()),
        Ty::Num => Err(violation(path, "expected a number")),
        Ty::UInt if v.is_u64() => Ok(()),
        Ty::UInt => Err(violation(path, "expected a non-negative integer")),
        Ty::Label => match v.as_str() {
            Some("Vital" | "OtherMotion") => Ok(()),
            _ => Err(violation(path, "expected \"Vital\" or \"OtherMotion\"")),
        },
        Ty::Nullable(_) if v.is_null() => Ok(()),
        Ty::Nullable(inner) => check(v, inner, path),
        Ty::Array(inner) => {
            let items = v
                .as_array()
                .ok_or_else(|| violation(path, "expected an array"))?;
            items
                .iter()
                .enumerate()
                .try_for_each(|(i, item)| check(item, inner, &format!("{path}[{i}]")))
        }
        Ty::Object(fields) => {
            let obj = v
                .as_object()
                .ok_or_else(|| violation(path, "expected an object"))?;
            let join = |k: &str| {
                if path.is_empty() {
                    k.to_string()
                } else {
                    format!("{path}.{k}")
                }
            };
            for (name, fty) in fields {
                let child = obj
                    .get(*name)
                    .ok_or_else(|| violation(&join(name), "missing field"))?;
                check(child, fty, &join(name))?;
            }
            match obj.keys().find(|k| !fields.iter().any(|(n, _)| n == k)) {
                Some(extra) => Err(violation(&join(extra), "unknown field")),
                None => Ok(()),
            }
        }
    }
}

/// Check parsed JSON against the report schema.
pub fn validate_report_json(v: &Value) -> Result<()> {
    check(v, &schema(), "")
}

pub fn report_to_json(report: &VitalReport) -> Result<String> {
    let v = serde_json::to_value(report).map_err(|e| violation("", e.to_string()))?;
    validate_report_json(&v)?;
    Ok(serde_json::to_string_pretty(&v).expect("value serializes") + "\n")
}

pub fn report_from_json(text: &str) -> Result<VitalReport> {
    let v: Value = serde_json::from_str(text).map_err(|e| violation("", e.to_string()))?;
    validate_report_json(&v)?;
    serde_json::from_value(v).map_err(|e| violation("", e.to_string()))
}

pub fn write_report(path: impl AsRef<Path>, report: &VitalReport) -> Result<()> {
    super::write_atomic(path.as_ref(), report_to_json(report)?.as_bytes())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<VitalReport> {
    report_from_json(&std::fs::read_to_string(path)?)
}
