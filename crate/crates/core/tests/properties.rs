//! Randomized invariants.

use csi_vitals::dsp::*;
use csi_vitals::trace_io::{decode_trace, encode_trace, export_csv, import_csv};
use csi_vitals::CsiTrace;
use num_complex::Complex32;
use proptest::prelude::*;

fn series(v: Vec<f64>) -> AmplitudeSeries {
    AmplitudeSeries::new(v, 100.0).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hampel_keeps_length_and_only_moves_to_local_median(x in prop::collection::vec(-100.0f64..100.0, 1..300)) {
        let y = hampel_filter(&series(x.clone()), HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA);
        prop_assert_eq!(y.len(), x.len());
        for (i, (&a, &b)) in x.iter().zip(y.samples()).enumerate() {
            if a != b {
                let lo = i.saturating_sub(HAMPEL_HALF_WINDOW);
                let hi = (i + HAMPEL_HALF_WINDOW + 1).min(x.len());
                prop_assert_eq!(b, median(x[lo..hi].to_vec()));
            }
        }
    }

    #[test]
    fn hampel_is_identity_on_constant(c in -1e3f64..1e3, n in 1usize..200) {
        let y = hampel_filter(&series(vec![c; n]), HAMPEL_HALF_WINDOW, HAMPEL_N_SIGMA);
        prop_assert!(y.samples().iter().all(|&v| v == c));
    }

    #[test]
    fn bandpass_is_linear(
        a in prop::collection::vec(-1.0f64..1.0, 400),
        b in prop::collection::vec(-1.0f64..1.0, 400),
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let band = BandSpec::new(2.0, 8.0, 3);
        let mix: Vec<f64> = a.iter().zip(&b).map(|(x, y)| alpha * x + beta * y).collect();
        let fa = bandpass(&series(a), &band).unwrap();
        let fb = bandpass(&series(b), &band).unwrap();
        let fm = bandpass(&series(mix), &band).unwrap();
        for ((x, y), m) in fa.samples().iter().zip(fb.samples()).zip(fm.samples()) {
            prop_assert!((alpha * x + beta * y - m).abs() < 1e-9);
        }
    }

    #[test]
    fn selected_subcarrier_has_max_variance(
        frames in 2usize..60,
        subs in 1u16..10,
        seed in any::<u64>(),
    ) {
        let mut state = seed | 1;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 2000) as f32 / 1000.0 - 1.0
        };
        let data: Vec<Complex32> = (0..frames * subs as usize).map(|_| Complex32::new(next(), next())).collect();
        let t = CsiTrace::new(100, 1, subs, 0, data).unwrap();
        let vars = subcarrier_variances(&t, 0).unwrap();
        let k = select_subcarrier(&t, 0).unwrap();
        prop_assert!(vars.iter().all(|&v| v <= vars[k]));
        prop_assert!(vars[..k].iter().all(|&v| v < vars[k]));
    }

    #[test]
    fn witl_round_trip(
        streams in 1u16..4,
        subs in 1u16..6,
        frames in 0usize..30,
        bits in prop::collection::vec(any::<u32>(), 0..400),
        rate in 1u32..10_000,
        t0 in any::<u64>(),
    ) {
        let need = 2 * frames * (streams * subs) as usize;
        let data: Vec<Complex32> = (0..need / 2)
            .map(|i| {
                let pick = |j: usize| f32::from_bits(bits.get(j).copied().unwrap_or(j as u32));
                Complex32::new(pick(2 * i), pick(2 * i + 1))
            })
            .collect();
        let t = CsiTrace::new(rate, streams, subs, t0, data).unwrap();
        let mut buf = Vec::new();
        encode_trace(&t, &mut buf).unwrap();
        let back = decode_trace(&buf[..]).unwrap();
        let mut again = Vec::new();
        encode_trace(&back, &mut again).unwrap();
        prop_assert_eq!(buf, again);
    }

    #[test]
    fn csv_round_trip(
        subs in 1u16..5,
        values in prop::collection::vec(-1e3f32..1e3, 2..80),
    ) {
        let stride = subs as usize;
        let frames = (values.len() / 2 / stride).max(2);
        let data: Vec<Complex32> = (0..frames * stride)
            .map(|i| Complex32::new(values[i % values.len()], values[(i * 7 + 1) % values.len()]))
            .collect();
        let t = CsiTrace::new(1000, 1, subs, 123, data).unwrap();
        prop_assert_eq!(import_csv(&export_csv(&t), None).unwrap(), t);
    }
}
