//! Property tests over the crate's cross-module invariants.

use proptest::prelude::*;
use sgwc::codec::{
    decode_image, encode_image, entropy_decode, entropy_encode, quality_metrics, EncodeConfig,
};
use sgwc::grid::Grid;
use sgwc::imaging::{
    color_convert, load_image, pad_to_dyadic, save_image, ColorDirection, ColorSpace, RasterImage,
};
use sgwc::saliency::{self, SaliencyAnnotation, SaliencyBox};
use sgwc::satisfaction::{predict_satisfaction, ParametricParams, SatisfactionModel};
use sgwc::wavelet::{haar_forward, haar_inverse};

fn gray_strategy(max_side: usize) -> impl Strategy<Value = RasterImage> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        proptest::collection::vec(0u8..=255, w * h).prop_map(move |pixels| {
            RasterImage::new(w, h, ColorSpace::Gray, vec![pixels
                .into_iter()
                .map(f64::from)
                .collect()])
            .unwrap()
        })
    })
}

fn rgb_strategy(max_side: usize) -> impl Strategy<Value = RasterImage> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        proptest::collection::vec(0u8..=255, 3 * w * h).prop_map(move |samples| {
            let n = w * h;
            let planes = (0..3)
                .map(|c| samples[c * n..(c + 1) * n].iter().map(|&v| f64::from(v)).collect())
                .collect();
            RasterImage::new(w, h, ColorSpace::Rgb, planes).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pnm_roundtrip_identity(img in gray_strategy(17)) {
        let saved = save_image(&img).unwrap();
        let loaded = load_image(&saved).unwrap();
        prop_assert_eq!(img.plane(0), loaded.plane(0));
        // a second save is byte-identical
        prop_assert_eq!(saved, save_image(&loaded).unwrap());
    }

    #[test]
    fn ppm_roundtrip_identity(img in rgb_strategy(9)) {
        let saved = save_image(&img).unwrap();
        let loaded = load_image(&saved).unwrap();
        for c in 0..3 {
            prop_assert_eq!(img.plane(c), loaded.plane(c));
        }
    }

    #[test]
    fn color_convert_is_invertible(img in rgb_strategy(9)) {
        let ycc = color_convert(&img, ColorDirection::RgbToYCbCr).unwrap();
        let back = color_convert(&ycc, ColorDirection::YCbCrToRgb).unwrap();
        for c in 0..3 {
            for (a, b) in img.plane(c).iter().zip(back.plane(c)) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn padding_is_idempotent_and_replicates(img in gray_strategy(13), k in 1usize..=3) {
        let once = pad_to_dyadic(&img, k).unwrap();
        let twice = pad_to_dyadic(&once, k).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.width() % (1 << k), 0);
        prop_assert_eq!(once.height() % (1 << k), 0);
        for y in 0..once.height() {
            for x in 0..once.width() {
                let sx = x.min(img.width() - 1);
                let sy = y.min(img.height() - 1);
                prop_assert_eq!(once.sample(0, x, y), img.sample(0, sx, sy));
            }
        }
    }

    #[test]
    fn haar_roundtrip_and_parseval(
        seed in 0u64..1000,
        k in 1usize..=3,
    ) {
        let side = 8 << (k % 2); // 8 or 16, always dyadic for k <= 3
        let img = sgwc::synth::photo(side.max(1 << k), side.max(1 << k), 1, seed);
        let plane = img.plane_grid(0);
        let pyr = haar_forward(&plane, k).unwrap();
        let back = haar_inverse(&pyr).unwrap();
        for (a, b) in plane.data().iter().zip(back.data()) {
            prop_assert!((a - b).abs() <= 1e-6);
        }
        let pixel_energy: f64 = plane.data().iter().map(|v| v * v).sum();
        prop_assert!((pyr.energy() - pixel_energy).abs() <= 1e-6 * pixel_energy.max(1.0));
    }

    #[test]
    fn transmission_order_is_permutation(
        bx in 0u32..8, by in 0u32..8, bw in 1u32..8, bh in 1u32..8, level in 1u32..4,
    ) {
        let ann = SaliencyAnnotation {
            boxes: vec![SaliencyBox { label: "b".into(), x: bx, y: by, w: bw, h: bh, level }],
        };
        let order = saliency::transmission_order(&ann, (16, 16), 2, None).unwrap();
        prop_assert_eq!(order.len(), 256);
        let unique: std::collections::HashSet<_> = order.iter().copied().collect();
        prop_assert_eq!(unique.len(), 256);
    }

    #[test]
    fn entropy_layer_is_lossless(data in proptest::collection::vec(any::<u8>(), 0..20_000)) {
        let encoded = entropy_encode(&data);
        prop_assert_eq!(entropy_decode(&encoded).unwrap(), data);
    }

    #[test]
    fn entropy_layer_is_lossless_on_structured_data(
        runs in proptest::collection::vec((any::<u8>(), 1usize..200), 0..60),
    ) {
        let data: Vec<u8> =
            runs.iter().flat_map(|&(b, n)| std::iter::repeat_n(b, n)).collect();
        let encoded = entropy_encode(&data);
        prop_assert_eq!(entropy_decode(&encoded).unwrap(), data);
    }

    #[test]
    fn parametric_satisfaction_stays_in_range(
        iq in 0.0f64..=1.0,
        delay in 0.0f64..1000.0,
        delta_half in 0.1f64..30.0,
        gamma in 0.2f64..5.0,
    ) {
        let model = SatisfactionModel::Parametric(ParametricParams { delta_half, gamma });
        let us = predict_satisfaction(&model, iq, delay).unwrap();
        prop_assert!((0.0..=1.0).contains(&us));
    }
}

proptest! {
    // full encode/decode is heavier, keep the case count lower
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn codec_roundtrip_quality_and_determinism(
        seed in 0u64..500,
        budget in 0.05f64..=1.0,
    ) {
        let img = sgwc::synth::photo(32, 24, 1, seed);
        let ann = SaliencyAnnotation {
            boxes: vec![SaliencyBox { label: "r".into(), x: 4, y: 4, w: 8, h: 8, level: 1 }],
        };
        let cfg = EncodeConfig::new(3, budget);
        let a = encode_image(&img, &ann, &cfg).unwrap();
        let b = encode_image(&img, &ann, &cfg).unwrap();
        prop_assert_eq!(a.to_bytes(), b.to_bytes());
        let decoded = decode_image(&a).unwrap();
        prop_assert_eq!(decoded.width(), 32);
        prop_assert_eq!(decoded.height(), 24);
        // decoded values are clamped to pixel range
        prop_assert!(decoded.plane(0).iter().all(|&v| (0.0..=255.0).contains(&v)));
        // full budget always reconstructs well
        if budget == 1.0 {
            let report = quality_metrics(&img, &decoded, None).unwrap();
            prop_assert!(report.psnr_db >= 40.0);
        }
    }

    #[test]
    fn quantized_full_budget_beats_starved_budget(seed in 0u64..200) {
        let img = sgwc::synth::photo(32, 32, 1, seed);
        let ann = SaliencyAnnotation::default();
        let full = decode_image(&encode_image(&img, &ann, &EncodeConfig::new(3, 1.0)).unwrap()).unwrap();
        let starved = decode_image(&encode_image(&img, &ann, &EncodeConfig::new(3, 0.05)).unwrap()).unwrap();
        let mse_full = quality_metrics(&img, &full, None).unwrap().mse;
        let mse_starved = quality_metrics(&img, &starved, None).unwrap().mse;
        prop_assert!(mse_full <= mse_starved);
    }
}

#[test]
fn grid_shape_is_enforced() {
    assert!(Grid::from_vec(3, 2, vec![0.0; 5]).is_err());
    assert!(Grid::from_vec(3, 2, vec![0.0; 6]).is_ok());
}
