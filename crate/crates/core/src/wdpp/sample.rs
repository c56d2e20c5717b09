//! Exact spectral sampling from an L-ensemble DPP and its fixed-size (k-DPP) variant.
//!
//! Both samplers share the second phase: given an orthonormal set of selected
//! eigenvectors `V`, repeatedly draw an item `i` with probability
//! `Σ_{v∈V} v_i² / |V|`, then restrict `V` to the subspace orthogonal to `e_i`.

use rand::Rng;

use super::kernel::EigenBasis;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Draws `Y ~ DPP(L)` from the spectral decomposition of `L`.
///
/// The result is sorted ascending. The empty set is a valid draw.
pub fn dpp_sample<T: Scalar, R: Rng + ?Sized>(basis: &EigenBasis<T>, rng: &mut R) -> Vec<usize> {
    let selected: Vec<usize> = basis
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &l)| {
            let l = l.as_f64();
            rng.random::<f64>() < l / (l + 1.0)
        })
        .map(|(k, _)| k)
        .collect();
    project_sample(basis, &selected, rng)
}

/// Draws exactly `k` items from the k-DPP conditioned on `|Y| = k`.
///
/// Fails when `k` exceeds the number of strictly positive eigenvalues.
pub fn kdpp_sample<T: Scalar, R: Rng + ?Sized>(basis: &EigenBasis<T>, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    let rank = basis.rank();
    if k > rank {
        return Err(Error::RankDeficient { k, rank });
    }
    let lambdas: Vec<f64> = basis.eigenvalues().iter().map(|l| l.as_f64()).collect();
    let selected = sample_eigen_subset(&lambdas, k, rng);
    Ok(project_sample(basis, &selected, rng))
}

/// `log e_l(λ_1, …, λ_m)` for `l ≤ k`, `m ≤ N`, laid out as `table[l][m]`.
pub fn log_elementary_symmetric(lambdas: &[f64], k: usize) -> Vec<Vec<f64>> {
    let n = lambdas.len();
    let mut table = vec![vec![f64::NEG_INFINITY; n + 1]; k + 1];
    table[0].fill(0.0);
    for l in 1..=k {
        for m in 1..=n {
            let skip = table[l][m - 1];
            let take = lambdas[m - 1].ln() + table[l - 1][m - 1];
            table[l][m] = log_add_exp(skip, take);
        }
    }
    table
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let hi = a.max(b);
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// Chooses `k` eigen-indices with probability proportional to `Π λ_n`,
/// walking the elementary symmetric polynomial table backwards.
fn sample_eigen_subset<R: Rng + ?Sized>(lambdas: &[f64], k: usize, rng: &mut R) -> Vec<usize> {
    let table = log_elementary_symmetric(lambdas, k);
    let mut remaining = k;
    let mut out = Vec::with_capacity(k);
    for m in (1..=lambdas.len()).rev() {
        if remaining == 0 {
            break;
        }
        // skipping is impossible once fewer than `remaining` positive values are left
        let forced = table[remaining][m - 1] == f64::NEG_INFINITY;
        let log_marginal = lambdas[m - 1].ln() + table[remaining - 1][m - 1] - table[remaining][m];
        if forced || rng.random::<f64>() < log_marginal.exp() {
            out.push(m - 1);
            remaining -= 1;
        }
    }
    debug_assert_eq!(remaining, 0);
    out.reverse();
    out
}

/// Second phase shared by both samplers, sorted output.
fn project_sample<T: Scalar, R: Rng + ?Sized>(basis: &EigenBasis<T>, selected: &[usize], rng: &mut R) -> Vec<usize> {
    let n = basis.order();
    let mut vs: Vec<Vec<T>> = selected.iter().map(|&k| basis.eigenvector(k).to_vec()).collect();
    let mut out = Vec::with_capacity(vs.len());
    let mut weights = vec![0.0f64; n];
    while !vs.is_empty() {
        weights.fill(0.0);
        for v in &vs {
            for (w, x) in weights.iter_mut().zip(v) {
                let x = x.as_f64();
                *w += x * x;
            }
        }
        let i = draw_weighted(&weights, rng);
        out.push(i);

        // eliminate e_i using the vector with the largest component there
        let pivot = (0..vs.len())
            .max_by(|&a, &b| vs[a][i].abs().partial_cmp(&vs[b][i].abs()).expect("finite"))
            .expect("non-empty");
        let pv = vs.swap_remove(pivot);
        let pi = pv[i];
        for v in &mut vs {
            let coef = v[i] / pi;
            for (x, p) in v.iter_mut().zip(&pv) {
                *x = *x - coef * *p;
            }
            v[i] = T::zero();
        }
        modified_gram_schmidt(&mut vs);
    }
    out.sort_unstable();
    out
}

fn draw_weighted<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last_positive = i;
            if target < acc {
                return i;
            }
        }
    }
    last_positive
}

fn modified_gram_schmidt<T: Scalar>(vs: &mut [Vec<T>]) {
    for a in 0..vs.len() {
        let (done, rest) = vs.split_at_mut(a);
        let v = &mut rest[0];
        for u in done.iter() {
            let dot = v.iter().zip(u).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            for (x, &y) in v.iter_mut().zip(u) {
                *x = *x - dot * y;
            }
        }
        let norm = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
        if norm > T::zero() {
            for x in v.iter_mut() {
                *x = *x / norm;
            }
        }
    }
}
