use super::AmplitudeSeries;

/// MAD-to-sigma scale for Gaussian data.
pub const MAD_SCALE: f64 = 1.4826;

/// Window half-width: three neighbors on each side.
pub const HAMPEL_HALF_WINDOW: usize = 3;

/// Replacement threshold in robust standard deviations.
pub const HAMPEL_N_SIGMA: f64 = 3.0;

pub(crate) fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    debug_assert!(n > 0);
    let mid = n / 2;
    let (lower, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower_max = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower_max + upper)
    }
}

/// Hampel outlier filter.
///
/// Each sample is compared with the median `m` of its window (up to
/// `half_window` neighbors per side, truncated at the edges). The robust spread
/// is `sigma = 1.4826 * MAD`; the sample becomes `m` iff `|x - m| > n_sigma * sigma`.
pub fn hampel_filter(
    series: &AmplitudeSeries,
    half_window: usize,
    n_sigma: f64,
) -> AmplitudeSeries {
    let x = series.samples();
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    let mut window = Vec::with_capacity(2 * half_window + 1);
    for i in 0..n {
        let lo = i.saturating_sub(half_window);
        let hi = (i + half_window + 1).min(n);
        window.clear();
        window.extend_from_slice(&x[lo..hi]);
        let med = median_in_place(&mut window);
        for w in window.iter_mut() {
            *w = (*w - med).abs();
        }
        let sigma = MAD_SCALE * median_in_place(&mut window);
        out.push(if (x[i] - med).abs() > n_sigma * sigma {
            med
        } else {
            x[i]
        });
    }
    series.with_samples(out)
}
