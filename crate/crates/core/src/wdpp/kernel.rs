use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigenvalues below this are treated as exact zeros.
pub const EIGEN_CLAMP: f64 = 1e-10;

/// Saliency-weighted Gaussian geometry a kernel was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelGeometry<T> {
    /// Per-item `(x, y)` pixel position.
    pub coords: Vec<(T, T)>,
    pub gamma: T,
    pub sigma_s: T,
}

/// Dense symmetric DPP kernel `L`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix<T> {
    n: usize,
    entries: Vec<T>,
    geometry: Option<KernelGeometry<T>>,
}

impl<T: Scalar> KernelMatrix<T> {
    /// Wraps an arbitrary symmetric matrix, replacing it by `(L + Lᵀ) / 2`.
    pub fn from_dense(n: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "kernel of order {n} needs {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("kernel has non-finite entries".into()));
        }
        let mut k = Self {
            n,
            entries,
            geometry: None,
        };
        k.symmetrize();
        Ok(k)
    }

    pub fn from_diagonal(diag: &[T]) -> Result<Self> {
        let n = diag.len();
        let mut entries = vec![T::zero(); n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = d;
        }
        Self::from_dense(n, entries)
    }

    fn symmetrize(&mut self) {
        let n = self.n;
        let half = T::lit(0.5);
        for i in 0..n {
            for j in i + 1..n {
                let v = (self.entries[i * n + j] + self.entries[j * n + i]) * half;
                self.entries[i * n + j] = v;
                self.entries[j * n + i] = v;
            }
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.n + j]
    }

    pub fn geometry(&self) -> Option<&KernelGeometry<T>> {
        self.geometry.as_ref()
    }
}

/// Weighted DPP kernel `L_ij = u_i^γ · exp(−‖p_i − p_j‖² / σ_s²) · u_j^γ`.
///
/// `γ = 0` gives the pure-diversity kernel `S` (with `0^0 = 1`); larger `γ`
/// shifts mass toward salient items.
pub fn build_kernel<T: Scalar>(u: &[T], coords: &[(T, T)], gamma: T, sigma_s: T) -> Result<KernelMatrix<T>> {
    if u.len() != coords.len() {
        return Err(Error::InvalidParameter(format!(
            "{} saliency values for {} coordinates",
            u.len(),
            coords.len()
        )));
    }
    if !(sigma_s.is_finite() && sigma_s > T::zero()) {
        return Err(Error::InvalidParameter(format!("sigma_s must be positive, got {sigma_s}")));
    }
    if !(gamma.is_finite() && gamma >= T::zero()) {
        return Err(Error::InvalidParameter(format!("gamma must be non-negative, got {gamma}")));
    }
    if let Some(v) = u.iter().find(|v| !(v.is_finite() && **v >= T::zero())) {
        return Err(Error::InvalidParameter(format!("saliency {v} is negative or non-finite")));
    }
    let n = u.len();
    let weight: Vec<T> = u.iter().map(|&v| v.powf(gamma)).collect();
    let inv_s2 = (sigma_s * sigma_s).recip();
    let mut entries = vec![T::zero(); n * n];
    for i in 0..n {
        let (xi, yi) = coords[i];
        entries[i * n + i] = weight[i] * weight[i];
        for j in i + 1..n {
            let (xj, yj) = coords[j];
            let d2 = (xi - xj) * (xi - xj) + (yi - yj) * (yi - yj);
            let v = weight[i] * (-d2 * inv_s2).exp() * weight[j];
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(KernelMatrix {
        n,
        entries,
        geometry: Some(KernelGeometry {
            coords: coords.to_vec(),
            gamma,
            sigma_s,
        }),
    })
}

/// Spectral decomposition `L = V Λ Vᵀ` with non-negative (clamped) eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis<T> {
    n: usize,
    values: Vec<T>,
    /// Eigenvector `k` occupies `vectors[k * n..(k + 1) * n]`.
    vectors: Vec<T>,
}

impl<T: Scalar> EigenBasis<T> {
    /// Number of items the kernel is defined over.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[T] {
        &self.values
    }

    pub fn eigenvector(&self, k: usize) -> &[T] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// Count of strictly positive eigenvalues.
    pub fn rank(&self) -> usize {
        self.values.iter().filter(|&&v| v > T::zero()).count()
    }

    /// `Σ λ / (λ + 1)`, the expected size of a DPP draw.
    pub fn expected_cardinality(&self) -> T {
        self.values.iter().map(|&l| l / (l + T::one())).sum()
    }

    /// Rebuilds `V Λ Vᵀ` row-major.
    pub fn reconstruct(&self) -> Vec<T> {
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        for (k, &l) in self.values.iter().enumerate() {
            if l == T::zero() {
                continue;
            }
            let v = self.eigenvector(k);
            for i in 0..n {
                let s = l * v[i];
                for j in 0..n {
                    out[i * n + j] = out[i * n + j] + s * v[j];
                }
            }
        }
        out
    }
}

pub fn eigendecompose<T: Scalar>(l: &KernelMatrix<T>) -> Result<EigenBasis<T>> {
    let n = l.order();
    if l.entries().iter().any(|v| !v.is_finite()) {
        return Err(Error::Decomposition("kernel has non-finite entries".into()));
    }
    let (values, vectors) = T::symmetric_eigen(n, l.entries())
        .ok_or_else(|| Error::Decomposition("eigensolver did not converge".into()))?;
    if values.iter().chain(&vectors).any(|v| !v.is_finite()) {
        return Err(Error::Decomposition("solver produced non-finite output".into()));
    }
    let clamp = T::lit(EIGEN_CLAMP);
    // vectors come back with eigenvector k in column k of a row-major buffer
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite eigenvalues"));
    let mut sorted_values = Vec::with_capacity(n);
    let mut sorted_vectors = Vec::with_capacity(n * n);
    for &k in &order {
        let v = values[k];
        sorted_values.push(if v < clamp { T::zero() } else { v });
        sorted_vectors.extend((0..n).map(|r| vectors[r * n + k]));
    }
    Ok(EigenBasis {
        n,
        values: sorted_values,
        vectors: sorted_vectors,
    })
}
