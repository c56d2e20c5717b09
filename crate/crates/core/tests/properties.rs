use std::path::Path;

use active_sem::codec::{decode_emap, decode_pbm, decode_pgm, encode_emap, encode_pbm, encode_pgm, quantize};
use active_sem::metrics::{pearson_slices, psnr, sparsification_curve, ssim};
use active_sem::raster::downsample_nearest;
use active_sem::reconstruct::{composite, upsample, Interpolation};
use active_sem::saliency::{entropy_saliency, residual_error};
use active_sem::{Bitmap, ErrorMap, ErrorMap64, Image64, ProbabilityMap64, Raster};
use proptest::prelude::*;

fn image(max_side: usize) -> impl Strategy<Value = Image64> {
    (1..=max_side, 1..=max_side).prop_flat_map(|(w, h)| {
        prop::collection::vec(0.0f64..=1.0, w * h).prop_map(move |v| Image64::new(w, h, v).unwrap())
    })
}

fn image_pair(min_side: usize, max_side: usize) -> impl Strategy<Value = (Image64, Image64)> {
    (min_side..=max_side, min_side..=max_side).prop_flat_map(|(w, h)| {
        (
            prop::collection::vec(0.0f64..=1.0, w * h),
            prop::collection::vec(0.0f64..=1.0, w * h),
        )
            .prop_map(move |(a, b)| (Image64::new(w, h, a).unwrap(), Image64::new(w, h, b).unwrap()))
    })
}

fn bitmap(w: usize, h: usize) -> impl Strategy<Value = Bitmap> {
    prop::collection::vec(any::<bool>(), w * h).prop_map(move |b| Bitmap::new(w, h, b).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pgm_round_trip_is_exact_on_quantized_images(img in image(20)) {
        let q = Image64::new(img.width(), img.height(),
            img.values().iter().map(|&v| quantize(v) as f64 / 255.0).collect()).unwrap();
        let bytes = encode_pgm(&q);
        let back: Image64 = decode_pgm(&bytes, Path::new("mem.pgm")).unwrap();
        prop_assert_eq!(&back, &q);
        prop_assert_eq!(encode_pgm(&back), bytes);
    }

    #[test]
    fn pbm_round_trip(w in 1usize..30, h in 1usize..12, seed in any::<u64>()) {
        let bits: Vec<bool> = (0..w * h).map(|i| (seed.rotate_left(i as u32 % 64) ^ i as u64) & 1 == 1).collect();
        let b = Bitmap::new(w, h, bits).unwrap();
        let back = decode_pbm(&encode_pbm(&b), Path::new("mem.pbm")).unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn emap_round_trip_is_exact_in_f32(w in 1usize..16, h in 1usize..16, scale in 0.0f32..100.0) {
        let data: Vec<f32> = (0..w * h).map(|i| (i as f32 * 0.37).sin().abs() * scale).collect();
        let e = ErrorMap::<f32>::new(w, h, data).unwrap();
        let back: ErrorMap<f32> = decode_emap(&encode_emap(&e), Path::new("mem.emap")).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn composite_is_idempotent((sr, hr) in image_pair(1, 12), seed in any::<u64>()) {
        let bits: Vec<bool> = (0..sr.len()).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
        let b = Bitmap::new(sr.width(), sr.height(), bits).unwrap();
        let once = composite(&sr, &hr, &b).unwrap();
        let twice = composite(&once, &hr, &b).unwrap();
        prop_assert_eq!(&once, &twice);
        for (i, &bit) in b.bits().iter().enumerate() {
            let expect = if bit { hr.values()[i] } else { sr.values()[i] };
            prop_assert_eq!(once.values()[i], expect);
        }
    }

    #[test]
    fn composite_with_full_mask_is_hr((sr, hr) in image_pair(1, 10)) {
        let out = composite(&sr, &hr, &Bitmap::ones(sr.width(), sr.height())).unwrap();
        prop_assert_eq!(out, hr);
    }

    #[test]
    fn residual_is_symmetric_and_zero_on_self((a, b) in image_pair(1, 12)) {
        prop_assert_eq!(residual_error(&a, &b).unwrap(), residual_error(&b, &a).unwrap());
        prop_assert!(residual_error(&a, &a).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn entropy_is_symmetric_and_bounded(p in prop::collection::vec(0.0f64..=1.0, 1..50)) {
        let n = p.len();
        let pm = ProbabilityMap64::new(n, 1, p.clone()).unwrap();
        let flipped = ProbabilityMap64::new(n, 1, p.iter().map(|v| 1.0 - v).collect()).unwrap();
        let h = entropy_saliency(&pm).unwrap();
        let hf = entropy_saliency(&flipped).unwrap();
        for (a, b) in h.values().iter().zip(hf.values()) {
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(a));
        }
    }

    #[test]
    fn ssim_is_symmetric_and_bounded((a, b) in image_pair(11, 16)) {
        let ab = ssim(&a, &b).unwrap();
        let ba = ssim(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_is_invariant_to_positive_affine_maps(
        x in prop::collection::vec(-10.0f64..10.0, 3..40),
        noise in prop::collection::vec(-1.0f64..1.0, 40),
        a in 0.1f64..10.0,
        c in -5.0f64..5.0,
    ) {
        let y: Vec<f64> = x.iter().zip(&noise).map(|(v, n)| v * 0.5 + n).collect();
        prop_assume!(pearson_slices(&x, &y).is_ok());
        let r = pearson_slices(&x, &y).unwrap();
        let ay: Vec<f64> = y.iter().map(|v| a * v + c).collect();
        let ax: Vec<f64> = x.iter().map(|v| -a * v + c).collect();
        prop_assert!((pearson_slices(&x, &ay).unwrap() - r).abs() < 1e-9);
        prop_assert!((pearson_slices(&ax, &y).unwrap() + r).abs() < 1e-9);
        prop_assert!(r.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn psnr_drops_as_error_grows((a, b) in image_pair(2, 10)) {
        let diff = residual_error(&a, &b).unwrap();
        prop_assume!(diff.values().iter().any(|&v| v > 1e-3));
        // moving b halfway back towards a strictly reduces every residual
        let mid = Image64::new(a.width(), a.height(),
            a.values().iter().zip(b.values()).map(|(x, y)| 0.5 * (x + y)).collect()).unwrap();
        prop_assert!(psnr(&a, &mid).unwrap() > psnr(&a, &b).unwrap());
        prop_assert!(psnr(&a, &a).unwrap().is_infinite());
    }

    #[test]
    fn oracle_curve_is_lowest_and_non_increasing(
        (truth, est) in (2usize..12, 2usize..12).prop_flat_map(|(w, h)| (
            prop::collection::vec(0.0f64..1.0, w * h).prop_map(move |v| ErrorMap64::new(w, h, v).unwrap()),
            prop::collection::vec(0.0f64..1.0, w * h).prop_map(move |v| ErrorMap64::new(w, h, v).unwrap()),
        ))
    ) {
        let fractions = active_sem::metrics::default_fractions::<f64>();
        let oracle = sparsification_curve(&truth, &truth, &fractions).unwrap();
        let other = sparsification_curve(&est, &truth, &fractions).unwrap();
        for w in oracle.residuals.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        for w in other.residuals.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        for (o, e) in oracle.residuals.iter().zip(&other.residuals) {
            prop_assert!(*o <= *e + 1e-12);
        }
        prop_assert!(oracle.residuals.last().unwrap().abs() < 1e-15);
    }

    #[test]
    fn upsampling_reproduces_lattice_samples(img in image(8), rate in 1usize..5) {
        for method in [Interpolation::Nearest, Interpolation::Bilinear, Interpolation::Bicubic] {
            let up = upsample(&img, rate, method).unwrap();
            prop_assert_eq!(up.dims(), (img.width() * rate, img.height() * rate));
            let back = downsample_nearest(&up, rate).unwrap();
            for (x, y) in back.values().iter().zip(img.values()) {
                prop_assert!((x - y).abs() < 1e-12, "{method}: {x} vs {y}");
            }
            prop_assert!(up.values().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn downsample_takes_every_rth_pixel(img in image(20), rate in 1usize..6) {
        let d = downsample_nearest(&img, rate).unwrap();
        prop_assert_eq!(d.width(), img.width().div_ceil(rate));
        prop_assert_eq!(d.height(), img.height().div_ceil(rate));
        for r in 0..d.height() {
            for c in 0..d.width() {
                prop_assert_eq!(d.get(r, c), img.get(r * rate, c * rate));
            }
        }
    }

    #[test]
    fn lattice_union_complement_partition(w in 1usize..20, h in 1usize..20, rate in 1usize..5, extra in bitmap(6, 6)) {
        let lat = Bitmap::lattice(w, h, rate).unwrap();
        prop_assert_eq!(lat.popcount(), w.div_ceil(rate) * h.div_ceil(rate));
        let comp = lat.complement();
        prop_assert!(!lat.intersects(&comp));
        prop_assert_eq!(lat.union(&comp).unwrap().popcount(), w * h);
        prop_assert_eq!(extra.union(&extra).unwrap(), extra);
    }
}
