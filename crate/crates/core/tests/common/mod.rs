#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &[f64], n: usize) -> f64 {
    let mut a = m.to_vec();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x * n + col].abs().partial_cmp(&a[y * n + col].abs()).unwrap())
            .unwrap();
        if a[piv * n + col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            d = -d;
        }
        let p = a[col * n + col];
        d *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            for k in col..n {
                a[r * n + k] -= f * a[col * n + k];
            }
        }
    }
    d
}

/// `det(L_Y)` for the principal submatrix indexed by `subset`.
pub fn principal_minor(l: &[f64], n: usize, subset: &[usize]) -> f64 {
    if subset.is_empty() {
        return 1.0;
    }
    let k = subset.len();
    let mut m = vec![0.0; k * k];
    for (a, &i) in subset.iter().enumerate() {
        for (b, &j) in subset.iter().enumerate() {
            m[a * k + b] = l[i * n + j];
        }
    }
    det(&m, k)
}

pub fn subset_of_mask(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn mask_of_subset(subset: &[usize]) -> usize {
    subset.iter().fold(0, |m, &i| m | (1 << i))
}

/// Exact DPP subset probabilities `det(L_Y) / det(L + I)`, indexed by bitmask.
pub fn dpp_subset_probabilities(l: &[f64], n: usize) -> Vec<f64> {
    let mut lpi = l.to_vec();
    for i in 0..n {
        lpi[i * n + i] += 1.0;
    }
    let z = det(&lpi, n);
    (0..1usize << n)
        .map(|mask| principal_minor(l, n, &subset_of_mask(mask, n)) / z)
        .collect()
}

/// Exact k-DPP probabilities, indexed by bitmask (zero for other sizes).
pub fn kdpp_subset_probabilities(l: &[f64], n: usize, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..1usize << n)
        .map(|mask| {
            if (mask as u32).count_ones() as usize == k {
                principal_minor(l, n, &subset_of_mask(mask, n))
            } else {
                0.0
            }
        })
        .collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / z).collect()
}

pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Random PSD matrix `A Aᵀ` with entries of `A` uniform in `[-scale, scale]`.
pub fn random_psd(n: usize, scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..n * n).map(|_| rng.random_range(-scale..scale)).collect();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = (0..n).map(|k| a[i * n + k] * a[j * n + k]).sum();
        }
    }
    m
}

/// Kahan-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
