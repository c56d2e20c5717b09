//! Estimator evaluation against ground-truth residuals: sparsification curves
//! and pixel-wise correlation, over one or more images.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::{check_fractions, curve_from_order, pearson_slices, rank_descending};
use crate::raster::{check_same_dims, ErrorMap, Image, ProbabilityMap, Raster};
use crate::saliency::{entropy_saliency, gradient_saliency, residual_error};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveEstimator {
    Oracle,
    Gradient,
    /// Entropy of the ROI map of the reconstruction.
    Entropy,
    /// The ROI map of the reconstruction itself.
    Interest,
    /// Uniformly random order, averaged over draws.
    Random,
    /// Precomputed map; the index selects `EvalImage::external`.
    External { name: String, slot: usize },
}

impl CurveEstimator {
    pub fn name(&self) -> &str {
        match self {
            Self::Oracle => "oracle",
            Self::Gradient => "gradient",
            Self::Entropy => "entropy",
            Self::Interest => "interest",
            Self::Random => "random",
            Self::External { name, .. } => name,
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "oracle" => Some(Self::Oracle),
            "gradient" => Some(Self::Gradient),
            "entropy" => Some(Self::Entropy),
            "interest" => Some(Self::Interest),
            "random" => Some(Self::Random),
            _ => None,
        }
    }
}

/// One evaluation image with its reconstruction and optional ROI maps.
#[derive(Debug, Clone)]
pub struct EvalImage<T> {
    pub sr: Image<T>,
    /// `|HR − SR|`, or `|ROI(HR) − ROI(SR)|` when ROI maps are given.
    pub truth: ErrorMap<T>,
    pub roi_sr: Option<ProbabilityMap<T>>,
    pub external: Vec<ErrorMap<T>>,
}

impl<T: Scalar> EvalImage<T> {
    pub fn new(
        hr: &Image<T>,
        sr: Image<T>,
        roi: Option<(ProbabilityMap<T>, ProbabilityMap<T>)>,
        external: Vec<ErrorMap<T>>,
    ) -> Result<Self> {
        check_same_dims(hr.dims(), sr.dims())?;
        for e in &external {
            check_same_dims(hr.dims(), e.dims())?;
        }
        let (truth, roi_sr) = match roi {
            Some((roi_hr, roi_sr)) => {
                check_same_dims(hr.dims(), roi_hr.dims())?;
                (residual_error(&roi_hr, &roi_sr)?, Some(roi_sr))
            }
            None => (residual_error(hr, &sr)?, None),
        };
        Ok(Self {
            sr,
            truth,
            roi_sr,
            external,
        })
    }

    fn roi(&self, who: &str) -> Result<&ProbabilityMap<T>> {
        self.roi_sr
            .as_ref()
            .ok_or_else(|| Error::InvalidParameter(format!("{who} estimator needs ROI maps")))
    }

    /// Estimated error for a deterministic estimator; `None` for `Random`.
    pub fn estimate(&self, est: &CurveEstimator) -> Result<Option<ErrorMap<T>>> {
        Ok(Some(match est {
            CurveEstimator::Oracle => self.truth.clone(),
            CurveEstimator::Gradient => gradient_saliency(&self.sr)?,
            CurveEstimator::Entropy => entropy_saliency(self.roi("entropy")?)?,
            CurveEstimator::Interest => ErrorMap::from(self.roi("interest")?.clone()),
            CurveEstimator::Random => return Ok(None),
            CurveEstimator::External { slot, name } => self
                .external
                .get(*slot)
                .cloned()
                .ok_or_else(|| Error::InvalidParameter(format!("no map loaded for estimator {name}")))?,
        }))
    }
}

/// Sparsification curves, one column per estimator, averaged over images.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub fractions: Vec<f64>,
    pub names: Vec<String>,
    /// `columns[e][f]`
    pub columns: Vec<Vec<f64>>,
}

pub fn curve_table<T: Scalar>(
    images: &[EvalImage<T>],
    estimators: &[CurveEstimator],
    fractions: &[T],
    random_draws: usize,
    seed: u64,
) -> Result<CurveTable> {
    if images.is_empty() {
        return Err(Error::InvalidParameter("no images to evaluate".into()));
    }
    check_fractions(fractions)?;
    let mut columns = vec![vec![0.0; fractions.len()]; estimators.len()];
    for (m, img) in images.iter().enumerate() {
        for (col, est) in columns.iter_mut().zip(estimators) {
            let curves: Vec<Vec<T>> = match img.estimate(est)? {
                Some(map) => {
                    let order = rank_descending(map.values());
                    vec![curve_from_order(&order, img.truth.values(), fractions).residuals]
                }
                None => (0..random_draws.max(1))
                    .map(|d| {
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        rng.set_stream(((m as u64) << 32) | d as u64);
                        let mut order: Vec<usize> = (0..img.truth.len()).collect();
                        order.shuffle(&mut rng);
                        curve_from_order(&order, img.truth.values(), fractions).residuals
                    })
                    .collect(),
            };
            let weight = 1.0 / (curves.len() * images.len()) as f64;
            for c in &curves {
                for (acc, v) in col.iter_mut().zip(c) {
                    *acc += v.as_f64() * weight;
                }
            }
        }
    }
    Ok(CurveTable {
        fractions: fractions.iter().map(|f| f.as_f64()).collect(),
        names: estimators.iter().map(|e| e.name().to_string()).collect(),
        columns,
    })
}

impl CurveTable {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("fraction");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (i, f) in self.fractions.iter().enumerate() {
            out.push_str(&format!("{f}"));
            for c in &self.columns {
                out.push_str(&format!(",{}", c[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Pixel-wise correlation of one estimator with the ground-truth error.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub name: String,
    /// Mean of per-image correlations.
    pub per_image_mean: f64,
    /// Correlation over all pixels of all images together.
    pub pooled: f64,
}

/// Correlation for every deterministic estimator (`Random` is skipped).
pub fn correlation_table<T: Scalar>(images: &[EvalImage<T>], estimators: &[CurveEstimator]) -> Result<Vec<CorrelationRow>> {
    let mut rows = Vec::new();
    for est in estimators {
        let mut per_image = Vec::with_capacity(images.len());
        let (mut all_est, mut all_truth) = (Vec::new(), Vec::new());
        let mut skipped = false;
        for img in images {
            let Some(map) = img.estimate(est)? else {
                skipped = true;
                break;
            };
            per_image.push(pearson_slices(map.values(), img.truth.values())?.as_f64());
            all_est.extend_from_slice(map.values());
            all_truth.extend_from_slice(img.truth.values());
        }
        if skipped || images.is_empty() {
            continue;
        }
        rows.push(CorrelationRow {
            name: est.name().to_string(),
            per_image_mean: per_image.iter().sum::<f64>() / per_image.len() as f64,
            pooled: pearson_slices(&all_est, &all_truth)?.as_f64(),
        });
    }
    Ok(rows)
}

pub fn correlation_csv(rows: &[CorrelationRow]) -> String {
    let mut out = String::from("estimator,per_image_mean,pooled\n");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.name, r.per_image_mean, r.pooled));
    }
    out
}
