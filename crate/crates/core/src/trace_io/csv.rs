//! Text interchange: one row per (frame, stream, subcarrier) with header
//! `t_ns,stream,subcarrier,re,im`. Real captures enter the toolkit this way.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex32;

use crate::error::{Error, Result};
use crate::trace::CsiTrace;

pub const CSV_HEADER: &str = "t_ns,stream,subcarrier,re,im";

pub fn export_csv(trace: &CsiTrace) -> String {
    let mut out = String::with_capacity(32 * trace.samples().len() + 32);
    out.push_str(CSV_HEADER);
    out.push('\n');
    let (n_st, n_sc) = (trace.n_streams(), trace.n_subcarriers());
    for i in 0..trace.n_frames() {
        let t = trace.timestamp_ns(i);
        for s in 0..n_st {
            for k in 0..n_sc {
                let c = trace.get(i, s, k);
                // f32 Display is shortest-round-trip, so re-import is exact
                let _ = writeln!(out, "{t},{s},{k},{},{}", c.re, c.im);
            }
        }
    }
    out
}

pub fn write_csv(path: impl AsRef<Path>, trace: &CsiTrace) -> Result<()> {
    super::write_atomic(path.as_ref(), export_csv(trace).as_bytes())
}

fn field<T: std::str::FromStr>(line: usize, name: &str, raw: Option<&str>) -> Result<T> {
    let raw = raw.ok_or_else(|| Error::Config {
        line,
        reason: format!("missing column `{name}`"),
    })?;
    raw.trim().parse().map_err(|_| Error::Config {
        line,
        reason: format!("column `{name}`: cannot parse {raw:?}"),
    })
}

/// Rebuild a trace from CSV text. Rows must be frame-major, stream then
/// subcarrier, as written by [`export_csv`]. The sample rate is taken from
/// `sample_rate` or, when `None`, inferred from the first timestamp step.
pub fn import_csv(text: &str, sample_rate: Option<u32>) -> Result<CsiTrace> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Config {
                line: 1,
                reason: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, l) in lines {
        let line = idx + 1;
        let mut cols = l.split(',');
        let t: u64 = field(line, "t_ns", cols.next())?;
        let s: usize = field(line, "stream", cols.next())?;
        let k: usize = field(line, "subcarrier", cols.next())?;
        let re: f32 = field(line, "re", cols.next())?;
        let im: f32 = field(line, "im", cols.next())?;
        if cols.next().is_some() {
            return Err(Error::Config {
                line,
                reason: "too many columns".into(),
            });
        }
        rows.push((line, t, s, k, Complex32::new(re, im)));
    }
    let Some(&(_, t0, ..)) = rows.first() else {
        let fs = sample_rate.unwrap_or(1000);
        return CsiTrace::empty(fs, 1, 1);
    };
    let n_st = rows.iter().map(|r| r.2).max().expect("nonempty") + 1;
    let n_sc = rows.iter().map(|r| r.3).max().expect("nonempty") + 1;
    let stride = n_st * n_sc;
    if rows.len() % stride != 0 {
        return Err(Error::Config {
            line: rows.last().expect("nonempty").0,
            reason: format!("{} rows do not fill whole frames of {stride}", rows.len()),
        });
    }
    if n_st > u16::MAX as usize || n_sc > u16::MAX as usize {
        return Err(Error::ShapeOverflow(format!(
            "{n_st} streams x {n_sc} subcarriers"
        )));
    }
    for (j, &(line, t, s, k, _)) in rows.iter().enumerate() {
        let (i, rest) = (j / stride, j % stride);
        if (s, k) != (rest / n_sc, rest % n_sc) || (rest > 0 && t != rows[i * stride].1) {
            return Err(Error::Config {
                line,
                reason: "rows are not frame-major (stream, subcarrier) order".into(),
            });
        }
    }
    let fs = match sample_rate {
        Some(fs) => fs,
        None => {
            let dt = rows
                .get(stride)
                .map(|r| r.1.saturating_sub(t0))
                .filter(|&dt| dt > 0)
                .ok_or_else(|| Error::Config {
                    line: rows[0].0,
                    reason: "cannot infer sample rate from fewer than two frames".into(),
                })?;
            (1e9 / dt as f64).round() as u32
        }
    };
    let data = rows.into_iter().map(|r| r.4).collect();
    CsiTrace::new(fs, n_st as u16, n_sc as u16, t0, data)
}

pub fn read_csv(path: impl AsRef<Path>, sample_rate: Option<u32>) -> Result<CsiTrace> {
    import_csv(&std::fs::read_to_string(path)?, sample_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_exact() {
        let data = (0..40)
            .map(|i| Complex32::new((i as f32).sin() * 1e-3, 1.0 / (i as f32 + 3.0)))
            .collect();
        let t = CsiTrace::new(1000, 2, 4, 7, data).unwrap();
        let text = export_csv(&t);
        assert!(text.starts_with("t_ns,stream,subcarrier,re,im\n7,0,0,"));
        assert_eq!(import_csv(&text, None).unwrap(), t);
    }

    #[test]
    fn bad_rows_report_line() {
        let text = "t_ns,stream,subcarrier,re,im\n0,0,0,1.0,2.0\n1000000,0,0,abc,2.0\n";
        match import_csv(text, None) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(import_csv("a,b\n", None).is_err());
    }
}
