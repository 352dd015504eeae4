use crate::error::{Error, Result};
use crate::trace::CsiTrace;

fn variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Amplitude variance of every subcarrier of `stream`.
pub fn subcarrier_variances(trace: &CsiTrace, stream: usize) -> Result<Vec<f64>> {
    if trace.is_empty() {
        return Err(Error::Empty("trace has no frames"));
    }
    (0..trace.n_subcarriers())
        .map(|k| Ok(variance(&trace.amplitude(stream, k)?)))
        .collect()
}

/// Subcarrier with the largest amplitude variance; ties go to the lowest index.
pub fn select_subcarrier(trace: &CsiTrace, stream: usize) -> Result<usize> {
    let vars = subcarrier_variances(trace, stream)?;
    Ok(argmax_first(&vars))
}

pub(crate) fn argmax_first(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}
