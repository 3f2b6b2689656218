//! Property tests for the spec-level invariants, checked against the
//! brute-force oracles where one exists.

use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

use specstack::dataset::{split_dataset, ClassLabel, LabeledSample};
use specstack::dsp::{self, Spectrogram, StftParams};
use specstack::metrics::{confusion, metrics};
use specstack::oracle;
use specstack::stack::interpolate_to_grid;
use specstack::{mel, AudioBuffer};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)),
        len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fft_linearity(
        exp in 1u32..9,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        let n = 1usize << exp;
        let (x, y) = {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut draw = |_: usize| {
                (0..n)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect::<Vec<_>>()
            };
            (draw(0), draw(1))
        };
        let combined: Vec<Complex64> = x.iter().zip(&y).map(|(xi, yi)| a * xi + b * yi).collect();
        let lhs = dsp::fft(&combined).unwrap();
        let fx = dsp::fft(&x).unwrap();
        let fy = dsp::fft(&y).unwrap();
        let scale = lhs.iter().map(|v| v.norm()).fold(1e-12, f64::max);
        for i in 0..n {
            let rhs = a * fx[i] + b * fy[i];
            prop_assert!((lhs[i] - rhs).norm() <= 1e-6 * scale);
        }
    }

    #[test]
    fn fft_parseval_and_inverse(x in (1u32..9).prop_flat_map(|e| complex_vec(1 << e))) {
        let n = x.len() as f64;
        let spectrum = dsp::fft(&x).unwrap();
        let time_energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let freq_energy: f64 = spectrum.iter().map(|v| v.norm_sqr()).sum::<f64>() / n;
        prop_assert!((time_energy - freq_energy).abs() <= 1e-6 * time_energy.max(1e-12));

        let back = oracle::naive_inverse_dft(&spectrum);
        let scale = x.iter().map(|v| v.norm()).fold(1e-12, f64::max);
        for (a, b) in x.iter().zip(&back) {
            prop_assert!((a - b).norm() <= 1e-6 * scale);
        }
    }

    #[test]
    fn stft_frame_count_formula(
        window_exp in 4u32..12,
        hop_divisor in 1usize..5,
        extra in 0usize..10_000,
    ) {
        let window = 1usize << window_exp;
        let hop = (window / (hop_divisor * 2).max(1)).max(1);
        let len = window + extra;
        let params = StftParams::hann(window, hop).unwrap();
        let signal = AudioBuffer::new(vec![0.5; len], 8000.0).unwrap();
        let frames = dsp::stft(&signal, &params).unwrap();
        prop_assert_eq!(frames.nrows(), (len - window) / hop + 1);
        prop_assert_eq!(frames.ncols(), window / 2 + 1);
    }

    #[test]
    fn power_db_is_always_finite(samples in prop::collection::vec(-1.0f64..1.0, 256..2048)) {
        let signal = AudioBuffer::new(samples, 8000.0).unwrap();
        let params = StftParams::hann(256, 64).unwrap();
        let spec = Spectrogram::compute(&signal, &params).unwrap();
        prop_assert!(spec.values().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn truncation_is_bit_exact_and_in_band(
        f_lo in 0.0f64..2000.0,
        width in 50.0f64..2000.0,
        seed in any::<u64>(),
    ) {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<f64> = (0..4096).map(|_| rng.random_range(-1.0..1.0)).collect();
        let signal = AudioBuffer::new(samples, 8000.0).unwrap();
        let spec = Spectrogram::compute(&signal, &StftParams::hann(512, 128).unwrap()).unwrap();
        let f_hi = f_lo + width;
        if let Ok(cut) = dsp::truncate_freq(&spec, f_lo, f_hi) {
            for (row, &f) in cut.freq_axis().iter().enumerate() {
                prop_assert!(f_lo <= f && f <= f_hi);
                let src = spec.freq_axis().iter().position(|&g| g == f).unwrap();
                for t in 0..spec.n_frames() {
                    prop_assert_eq!(cut.values()[(row, t)], spec.values()[(src, t)]);
                }
            }
        }
    }

    #[test]
    fn interpolation_matches_oracle_and_stays_bounded(
        seed in any::<u64>(),
        rows in 2usize..10,
        cols in 2usize..10,
        t_rows in 1usize..14,
        t_cols in 1usize..14,
    ) {
        use rand::prelude::*;
        fn ascending(
            rng: &mut rand_chacha::ChaCha8Rng,
            n: usize,
            lo: f64,
            hi: f64,
        ) -> Vec<f64> {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
            v.sort_by(f64::total_cmp);
            v.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
            v
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let freq = ascending(&mut rng, rows, 0.0, 1000.0);
        let time = ascending(&mut rng, cols, 0.0, 10.0);
        prop_assume!(freq.len() >= 2 && time.len() >= 2);
        let values = Array2::from_shape_fn((freq.len(), time.len()), |_| {
            rng.random_range(-120.0..20.0)
        });
        let spec = Spectrogram::new(
            values.clone(),
            freq.clone(),
            time.clone(),
            StftParams::hann(4, 1).unwrap(),
        )
        .unwrap();
        let tf = ascending(&mut rng, t_rows, -100.0, 1100.0);
        let tt = ascending(&mut rng, t_cols, -1.0, 11.0);
        prop_assume!(!tf.is_empty() && !tt.is_empty());

        let out = interpolate_to_grid(&spec, &tf, &tt).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (r, &f) in tf.iter().enumerate() {
            for (c, &t) in tt.iter().enumerate() {
                let expect = oracle::bilinear_at(&values, &freq, &time, f, t);
                prop_assert!((out[(r, c)] - expect).abs() <= 1e-9);
                prop_assert!(out[(r, c)] >= lo && out[(r, c)] <= hi);
            }
        }
    }

    #[test]
    fn mel_scale_monotone_and_invertible(f in 0.0f64..4000.0, g in 0.0f64..4000.0) {
        let mf = mel::hz_to_mel(f).unwrap();
        let mg = mel::hz_to_mel(g).unwrap();
        prop_assert_eq!(f < g, mf < mg);
        let back = mel::mel_to_hz(mf).unwrap();
        prop_assert!((back - f).abs() <= 1e-9 * f.max(1.0));
    }

    #[test]
    fn split_is_partition_with_tight_class_proportions(
        class_sizes in prop::collection::vec(0usize..400, 1..6),
        seed in any::<u64>(),
    ) {
        let labels = [ClassLabel::Bw, ClassLabel::Sw, ClassLabel::Fw, ClassLabel::Nn, ClassLabel::Ab];
        let mut samples = Vec::new();
        let mut i = 0usize;
        for (ci, &n) in class_sizes.iter().enumerate() {
            for _ in 0..n {
                samples.push(LabeledSample {
                    recording_id: format!("rec{i}"),
                    sample_start_s: 0.0,
                    sample_len_s: 10.0,
                    label: labels[ci].clone(),
                    source_annotation: None,
                    rng_seed_used: i as u64,
                });
                i += 1;
            }
        }
        let total = samples.len();
        let ratios = (0.70, 0.15, 0.15);
        let split = split_dataset(samples, ratios, seed).unwrap();
        prop_assert_eq!(split.len(), total);

        let mut ids: Vec<String> = split
            .train
            .iter()
            .chain(&split.val)
            .chain(&split.test)
            .map(|s| s.recording_id.clone())
            .collect();
        ids.sort();
        ids.dedup();
        prop_assert_eq!(ids.len(), total);

        for (label, (tr, va, te)) in split.class_counts() {
            let n = (tr + va + te) as f64;
            for (got, r) in [(tr, ratios.0), (va, ratios.1), (te, ratios.2)] {
                prop_assert!(
                    (got as f64 - r * n).abs() <= 1.0,
                    "{}: {} vs ideal {}", label, got, r * n
                );
            }
        }
    }

    #[test]
    fn self_confusion_is_perfect(indices in prop::collection::vec(0usize..5, 1..300)) {
        let classes = [ClassLabel::Bw, ClassLabel::Sw, ClassLabel::Fw, ClassLabel::Nn, ClassLabel::Ab];
        let y: Vec<ClassLabel> = indices.iter().map(|&i| classes[i].clone()).collect();
        let cm = confusion(&y, &y, &classes).unwrap();
        let report = metrics(&cm);
        prop_assert_eq!(report.accuracy, 1.0);
        prop_assert_eq!(report.f1, 1.0);

        let normalized = cm.row_normalized();
        for i in 0..5 {
            let row_sum: f64 = normalized.row(i).sum();
            prop_assert!(row_sum == 0.0 || (row_sum - 1.0).abs() <= 1e-9);
        }
    }
}
