//! Sampler distributions checked against brute-force subset determinants.

mod common;

use active_sem::wdpp::{build_kernel, dpp_sample, eigendecompose, kdpp_sample, KernelMatrix};
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn empirical<F: FnMut(&mut ChaCha8Rng) -> Vec<usize>>(n: usize, draws: usize, seed: u64, mut f: F) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0usize; 1 << n];
    for _ in 0..draws {
        counts[mask_of_subset(&f(&mut rng))] += 1;
    }
    counts.into_iter().map(|c| c as f64 / draws as f64).collect()
}

#[test]
fn dpp_matches_subset_determinants_on_wdpp_kernel() {
    let l = build_kernel(&[1.0, 0.8, 0.5], &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], 1.0, 1.0).unwrap();
    let basis = eigendecompose(&l).unwrap();
    let exact = dpp_subset_probabilities(l.entries(), 3);
    assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let emp = empirical(3, 200_000, 17, |rng| dpp_sample(&basis, rng));
    let tv = total_variation(&exact, &emp);
    assert!(tv < 0.01, "tv {tv}");
}

#[test]
fn dpp_matches_subset_determinants_on_random_kernel() {
    let n = 4;
    let m = random_psd(n, 0.8, 5);
    let l = KernelMatrix::from_dense(n, m.clone()).unwrap();
    let basis = eigendecompose(&l).unwrap();
    let exact = dpp_subset_probabilities(&m, n);
    let emp = empirical(n, 200_000, 23, |rng| dpp_sample(&basis, rng));
    let tv = total_variation(&exact, &emp);
    assert!(tv < 0.01, "tv {tv}");
}

#[test]
fn expected_cardinality_is_sum_of_lambda_ratios() {
    for seed in 0..3 {
        let m = random_psd(6, 0.7, 100 + seed);
        let basis = eigendecompose(&KernelMatrix::from_dense(6, m).unwrap()).unwrap();
        let expect = basis.expected_cardinality();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws = 100_000;
        let total: usize = (0..draws).map(|_| dpp_sample(&basis, &mut rng).len()).sum();
        let mean = total as f64 / draws as f64;
        assert!((mean - expect).abs() / expect < 0.01, "mean {mean} vs {expect}");
    }
}

#[test]
fn kdpp_pair_frequencies_on_diagonal_kernel() {
    // pairs of diag(1,2,3): products 2, 3, 6 over e_2 = 11
    let basis = eigendecompose(&KernelMatrix::from_diagonal(&[1.0, 2.0, 3.0]).unwrap()).unwrap();
    let emp = empirical(3, 200_000, 31, |rng| kdpp_sample(&basis, 2, rng).unwrap());
    let expect = [(0b011, 2.0 / 11.0), (0b101, 3.0 / 11.0), (0b110, 6.0 / 11.0)];
    for (mask, p) in expect {
        assert!((emp[mask] - p).abs() < 0.01, "mask {mask:b}: {} vs {p}", emp[mask]);
    }
}

#[test]
fn kdpp_matches_brute_force_on_dense_kernel() {
    let n = 5;
    let m = random_psd(n, 0.9, 77);
    let basis = eigendecompose(&KernelMatrix::from_dense(n, m.clone()).unwrap()).unwrap();
    for k in [1, 2, 3] {
        let exact = kdpp_subset_probabilities(&m, n, k);
        let emp = empirical(n, 100_000, 40 + k as u64, |rng| {
            let y = kdpp_sample(&basis, k, rng).unwrap();
            assert_eq!(y.len(), k);
            y
        });
        let tv = total_variation(&exact, &emp);
        assert!(tv < 0.015, "k={k} tv {tv}");
    }
}

#[test]
fn duplicates_are_never_sampled_together() {
    // items 0 and 2 share position and saliency, so their kernel rows coincide
    let coords = [(0.0, 0.0), (1.5, 0.0), (0.0, 0.0), (0.0, 2.0)];
    let l = build_kernel(&[0.9, 0.7, 0.9, 0.6], &coords, 1.0, 1.5).unwrap();
    for j in 0..4 {
        assert_eq!(l.get(0, j), l.get(2, j));
    }
    let basis = eigendecompose(&l).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100_000 {
        let y = dpp_sample(&basis, &mut rng);
        assert!(!(y.contains(&0) && y.contains(&2)), "{y:?}");
    }
    for _ in 0..20_000 {
        let y = kdpp_sample(&basis, 2, &mut rng).unwrap();
        assert!(!(y.contains(&0) && y.contains(&2)), "{y:?}");
    }
}

#[test]
fn kdpp_saliency_rises_with_gamma() {
    // 8×8 grid with a bright corner blob
    let side = 8;
    let mut u = Vec::new();
    let mut coords = Vec::new();
    for r in 0..side {
        for c in 0..side {
            let d2 = ((r as f64 - 2.0).powi(2) + (c as f64 - 2.0).powi(2)) / 4.0;
            u.push(0.05 + 0.95 * (-d2).exp());
            coords.push((c as f64, r as f64));
        }
    }
    let k = 6;
    let draws = 1000;
    let mut means = Vec::new();
    for gamma in [0.0, 1.0, 2.0, 5.0] {
        let basis = eigendecompose(&build_kernel(&u, &coords, gamma, 2.0).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let per_draw: Vec<f64> = (0..draws)
            .map(|_| {
                let y = kdpp_sample(&basis, k, &mut rng).unwrap();
                y.iter().map(|&i| u[i]).sum::<f64>() / k as f64
            })
            .collect();
        let mean = per_draw.iter().sum::<f64>() / draws as f64;
        let var = per_draw.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        means.push((mean, (var / draws as f64).sqrt()));
    }
    for w in means.windows(2) {
        assert!(w[1].0 >= w[0].0 - w[1].1, "{means:?}");
    }
}
