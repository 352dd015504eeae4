//! Flat `key=value` scenario files.
//!
//! Keys are dotted field paths of [`SimScenario`] (`breathing.freq`,
//! `channel.k_factor`, `motion_events.0.start`, ...). Unset keys keep their
//! defaults; `#` starts a comment. Motion events must be numbered from 0
//! without gaps and give all three fields.

use serde_json::{Map, Number, Value};

use crate::channel_model::SimScenario;
use crate::error::{Error, Result};

fn cfg_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Config {
        line,
        reason: reason.into(),
    }
}

fn parse_number(raw: &str) -> Option<Number> {
    if let Ok(u) = raw.parse::<u64>() {
        return Some(u.into());
    }
    if let Ok(i) = raw.parse::<i64>() {
        return Some(i.into());
    }
    raw.parse::<f64>().ok().and_then(Number::from_f64)
}

/// Apply one `key=value` assignment to a serialized scenario.
fn assign(
    root: &mut Value,
    key: &str,
    raw: &str,
    line: usize,
    events: &mut Vec<Map<String, Value>>,
) -> Result<()> {
    let number = parse_number(raw)
        .ok_or_else(|| cfg_err(line, format!("`{key}`: {raw:?} is not a number")))?;
    let parts: Vec<&str> = key.split('.').collect();
    if parts[0] == "motion_events" {
        let [_, idx, field] = parts[..] else {
            return Err(cfg_err(
                line,
                format!("`{key}`: expected motion_events.<index>.<field>"),
            ));
        };
        if !matches!(field, "start" | "end" | "displacement_walk_scale") {
            return Err(cfg_err(
                line,
                format!("unknown motion event field `{field}`"),
            ));
        }
        let idx: usize = idx
            .parse()
            .map_err(|_| cfg_err(line, format!("`{key}`: bad event index {idx:?}")))?;
        if idx > 10_000 {
            return Err(cfg_err(line, format!("`{key}`: event index too large")));
        }
        if events.len() <= idx {
            events.resize_with(idx + 1, Map::new);
        }
        events[idx].insert(field.to_string(), Value::Number(number));
        return Ok(());
    }
    let mut node = root;
    for (i, part) in parts.iter().enumerate() {
        let obj = node
            .as_object_mut()
            .ok_or_else(|| cfg_err(line, format!("unknown key `{key}`")))?;
        let child = obj
            .get_mut(*part)
            .ok_or_else(|| cfg_err(line, format!("unknown key `{key}`")))?;
        if i + 1 == parts.len() {
            if child.is_object() || child.is_array() {
                return Err(cfg_err(line, format!("`{key}` is a group, not a value")));
            }
            *child = Value::Number(number);
            return Ok(());
        }
        node = child;
    }
    unreachable!("split yields at least one part")
}

/// Parse scenario text on top of [`SimScenario::default`], then validate.
pub fn parse_scenario(text: &str) -> Result<SimScenario> {
    parse_scenario_with(text, &[])
}

/// As [`parse_scenario`], then apply `overrides` (`key=value` strings) after
/// the file. Override errors report line 0.
pub fn parse_scenario_with(text: &str, overrides: &[String]) -> Result<SimScenario> {
    let mut root = serde_json::to_value(SimScenario::default()).expect("scenario serializes");
    let mut events = Vec::new();
    let mut event_lines = Vec::new();
    let assignments = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .chain(overrides.iter().map(|o| (0, o.as_str())));
    for (line, raw) in assignments {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| cfg_err(line, format!("expected key=value, got {content:?}")))?;
        let key = key.trim();
        assign(&mut root, key, value.trim(), line, &mut events)?;
        if key.starts_with("motion_events") {
            event_lines.push(line);
        }
    }
    let last_event_line = event_lines.last().copied().unwrap_or(0);
    for (i, ev) in events.iter().enumerate() {
        for field in ["start", "end", "displacement_walk_scale"] {
            if !ev.contains_key(field) {
                return Err(cfg_err(
                    last_event_line,
                    format!("motion_events.{i}.{field} is missing"),
                ));
            }
        }
    }
    root["motion_events"] = Value::Array(events.into_iter().map(Value::Object).collect());
    let scenario: SimScenario =
        serde_json::from_value(root).map_err(|e| cfg_err(0, format!("type mismatch: {e}")))?;
    scenario.validate()?;
    Ok(scenario)
}

/// Render a scenario in the same format; `parse_scenario` inverts it.
pub fn scenario_to_config(s: &SimScenario) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    };
    put("duration", s.duration.to_string());
    put("sample_rate", s.sample_rate.to_string());
    put("channel.k_factor", s.channel.k_factor.to_string());
    put("channel.omega", s.channel.omega.to_string());
    put("channel.rho", s.channel.rho.to_string());
    put("channel.phi0", s.channel.phi0.to_string());
    put("channel.theta", s.channel.theta.to_string());
    put("channel.lambda", s.channel.lambda.to_string());
    put("breathing.freq", s.breathing.freq.to_string());
    put(
        "breathing.displacement_amp",
        s.breathing.displacement_amp.to_string(),
    );
    put("heartbeat.freq", s.heartbeat.freq.to_string());
    put(
        "heartbeat.displacement_amp",
        s.heartbeat.displacement_amp.to_string(),
    );
    for (i, ev) in s.motion_events.iter().enumerate() {
        put(&format!("motion_events.{i}.start"), ev.start.to_string());
        put(&format!("motion_events.{i}.end"), ev.end.to_string());
        put(
            &format!("motion_events.{i}.displacement_walk_scale"),
            ev.displacement_walk_scale.to_string(),
        );
    }
    put("noise_sigma", s.noise_sigma.to_string());
    put("n_subcarriers", s.n_subcarriers.to_string());
    put("n_streams", s.n_streams.to_string());
    put("seed", s.seed.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_model::MotionEvent;

    #[test]
    fn defaults_and_comments() {
        let s = parse_scenario("# nothing\n\nbreathing.freq = 0.25  # slow\nseed=9\n").unwrap();
        assert_eq!(s.breathing.freq, 0.25);
        assert_eq!(s.seed, 9);
        assert_eq!(s.sample_rate, SimScenario::default().sample_rate);
    }

    #[test]
    fn events_and_round_trip() {
        let mut s = SimScenario {
            motion_events: vec![
                MotionEvent::new(10.0, 12.5, 0.02),
                MotionEvent::new(30.0, 35.0, 0.03),
            ],
            ..SimScenario::default()
        };
        s.channel.k_factor = 12.4;
        s.seed = u64::MAX;
        assert_eq!(parse_scenario(&scenario_to_config(&s)).unwrap(), s);
    }

    #[test]
    fn errors_name_lines() {
        let line_of = |text: &str| match parse_scenario(text) {
            Err(Error::Config { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line_of("seed=1\nbogus.key=3\n"), 2);
        assert_eq!(line_of("seed=1\n\nnoise_sigma=abc\n"), 3);
        assert_eq!(line_of("just words\n"), 1);
        assert_eq!(line_of("breathing=1\n"), 1);
        assert_eq!(
            line_of("motion_events.0.start=1\nmotion_events.0.end=2\n"),
            2
        );
    }

    #[test]
    fn overlapping_events_rejected() {
        let text = "motion_events.0.start=10\nmotion_events.0.end=20\nmotion_events.0.displacement_walk_scale=0.01\n\
                    motion_events.1.start=15\nmotion_events.1.end=25\nmotion_events.1.displacement_walk_scale=0.01\n";
        assert!(matches!(
            parse_scenario(text),
            Err(Error::OverlappingEvents { .. })
        ));
    }

    #[test]
    fn overrides_apply_last() {
        let s = parse_scenario_with("seed=1\n", &["seed=5".to_string()]).unwrap();
        assert_eq!(s.seed, 5);
    }
}
