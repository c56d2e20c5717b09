use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::config::{EstimatorSource, PipelineConfig, Reconstruction, SamplerKind};
use crate::codec::load_image;
use crate::error::{Error, Result};
use crate::metrics::{l1_loss, psnr, ssim, SSIM_WINDOW};
use crate::raster::{check_same_dims, Bitmap, ErrorMap, Image, ProbabilityMap, Raster};
use crate::reconstruct::{composite, simulate_reconstruction};
use crate::saliency::{entropy_saliency, gradient_saliency, load_estimated_error, residual_error};
use crate::scalar::Scalar;
use crate::wdpp::{random_bitmap_among, topk_bitmap_among, TiledWdpp};

/// Cost of an acquisition: mean absolute residual plus `λ` times the fraction of
/// pixels scanned.
pub fn acquisition_cost<T: Scalar>(hr: &Image<T>, out: &Image<T>, b_total: &Bitmap, lambda: T) -> Result<T> {
    check_same_dims(hr.dims(), b_total.dims())?;
    let loss = l1_loss(hr, out)?;
    let scanned = T::from_usize(b_total.popcount()).unwrap() / T::from_usize(b_total.len().max(1)).unwrap();
    Ok(loss + lambda * scanned)
}

/// Loads an ROI probability map from EMAP (`.emap`) or an 8-bit image.
pub fn load_probability_map<T: Scalar>(path: &Path) -> Result<ProbabilityMap<T>> {
    if path.extension().is_some_and(|e| e == "emap") {
        ProbabilityMap::try_from(load_estimated_error::<T>(path)?)
    } else {
        Ok(ProbabilityMap::from(load_image::<T>(path)?))
    }
}

/// Everything the pipeline reads from disk for one specimen.
#[derive(Debug, Clone)]
pub struct Specimen<T> {
    pub hr: Image<T>,
    pub sr: Option<Image<T>>,
    pub estimate: Option<ErrorMap<T>>,
    pub roi: Option<(ProbabilityMap<T>, ProbabilityMap<T>)>,
}

impl<T: Scalar> Specimen<T> {
    pub fn from_image(hr: Image<T>) -> Self {
        Self {
            hr,
            sr: None,
            estimate: None,
            roi: None,
        }
    }

    pub fn load(cfg: &PipelineConfig) -> Result<Self> {
        let hr = load_image(&cfg.hr_path)?;
        let sr = match &cfg.reconstruction {
            Reconstruction::External(p) => Some(load_image(p)?),
            Reconstruction::Interpolate(_) => None,
        };
        let estimate = match &cfg.estimator {
            EstimatorSource::External(p) => Some(load_estimated_error(p)?),
            _ => None,
        };
        let roi = match &cfg.roi {
            Some(paths) => Some((load_probability_map(&paths.hr)?, load_probability_map(&paths.sr)?)),
            None => None,
        };
        Ok(Self { hr, sr, estimate, roi })
    }
}

/// Initial scan, reconstruction and error estimate; shared by every rescan budget.
#[derive(Debug, Clone)]
pub struct Prepared<T> {
    pub hr: Image<T>,
    pub sr: Image<T>,
    pub initial: Bitmap,
    /// Estimated error with the initial-scan lattice zeroed.
    pub saliency: ErrorMap<T>,
    eligible: Bitmap,
    wdpp: Option<TiledWdpp<T>>,
    sampler: SamplerKind,
    rate: usize,
    lambda: T,
}

/// Outcome of one simulated acquisition.
#[derive(Debug, Clone)]
pub struct Acquisition<T> {
    pub output: Image<T>,
    pub rescan: Bitmap,
    pub total: Bitmap,
    pub report: AcquisitionReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionReport {
    pub sampler: SamplerKind,
    pub downsample_rate: usize,
    pub pixels: usize,
    pub rescan_pixels: usize,
    pub initial_scan_rate: f64,
    pub rescan_rate: f64,
    pub total_scan_rate: f64,
    pub speedup_factor: f64,
    pub residual_l1: f64,
    pub psnr: f64,
    /// `None` when the image is smaller than the SSIM window.
    pub ssim: Option<f64>,
    pub cost: f64,
    /// Compute time, excluded from the speedup accounting.
    pub wall_clock: Duration,
}

pub fn prepare<T: Scalar>(cfg: &PipelineConfig, specimen: &Specimen<T>) -> Result<Prepared<T>> {
    cfg.validate()?;
    let hr = specimen.hr.clone();
    let (w, h) = hr.dims();
    let rate = cfg.downsample_rate;
    let sr = match (&cfg.reconstruction, &specimen.sr) {
        (Reconstruction::External(_), Some(sr)) => {
            check_same_dims(hr.dims(), sr.dims())?;
            sr.clone()
        }
        (Reconstruction::External(p), None) => {
            return Err(Error::Config(format!("reconstruction {} was not loaded", p.display())))
        }
        (Reconstruction::Interpolate(m), _) => simulate_reconstruction(&hr, rate, *m)?,
    };
    if let Some((a, b)) = &specimen.roi {
        check_same_dims(hr.dims(), a.dims())?;
        check_same_dims(hr.dims(), b.dims())?;
    }
    let estimate = match &cfg.estimator {
        EstimatorSource::Oracle => match &specimen.roi {
            Some((roi_hr, roi_sr)) => residual_error(roi_hr, roi_sr)?,
            None => residual_error(&hr, &sr)?,
        },
        EstimatorSource::Gradient => gradient_saliency(&sr)?,
        EstimatorSource::Entropy => {
            let (_, roi_sr) = specimen
                .roi
                .as_ref()
                .ok_or_else(|| Error::Config("estimator = entropy needs roi maps".into()))?;
            entropy_saliency(roi_sr)?
        }
        EstimatorSource::External(p) => {
            let e = specimen
                .estimate
                .clone()
                .ok_or_else(|| Error::Config(format!("estimator {} was not loaded", p.display())))?;
            check_same_dims(hr.dims(), e.dims())?;
            e
        }
    };
    let initial = Bitmap::lattice(w, h, rate)?;
    let saliency = estimate.zeroed_where(&initial)?;
    let eligible = initial.complement();
    let wdpp = match cfg.sampler {
        SamplerKind::Wdpp => Some(TiledWdpp::new(
            &saliency,
            Some(&eligible),
            cfg.tile,
            T::lit(cfg.gamma),
            T::lit(cfg.sigma_s),
        )?),
        _ => None,
    };
    Ok(Prepared {
        hr,
        sr,
        initial,
        saliency,
        eligible,
        wdpp,
        sampler: cfg.sampler,
        rate,
        lambda: T::lit(cfg.lambda),
    })
}

impl<T: Scalar> Prepared<T> {
    /// Rescan budget for a target total scan rate.
    pub fn budget(&self, total_scan_rate: f64) -> Result<usize> {
        let n = self.hr.len();
        let target = (total_scan_rate * n as f64).round() as i64;
        let k = target - self.initial.popcount() as i64;
        if k < 0 {
            return Err(Error::InvalidParameter(format!(
                "total scan rate {total_scan_rate} is below the initial scan rate {}",
                self.initial.popcount() as f64 / n as f64
            )));
        }
        Ok(k as usize)
    }

    pub fn acquire(&self, total_scan_rate: f64, seed: u64) -> Result<Acquisition<T>> {
        let started = Instant::now();
        let k = self.budget(total_scan_rate)?;
        let rescan = match (&self.wdpp, self.sampler) {
            (Some(plan), _) => plan.sample(k, seed)?,
            (None, SamplerKind::Topk) => topk_bitmap_among(&self.saliency, Some(&self.eligible), k)?,
            (None, _) => random_bitmap_among(&self.eligible, k, seed)?,
        };
        let total = self.initial.union(&rescan)?;
        let output = composite(&self.sr, &self.hr, &total)?;

        let n = self.hr.len();
        let scanned = total.popcount();
        let (w, h) = self.hr.dims();
        let ssim = if w >= SSIM_WINDOW && h >= SSIM_WINDOW {
            Some(ssim(&self.hr, &output)?.as_f64())
        } else {
            None
        };
        let report = AcquisitionReport {
            sampler: self.sampler,
            downsample_rate: self.rate,
            pixels: n,
            rescan_pixels: rescan.popcount(),
            initial_scan_rate: self.initial.popcount() as f64 / n as f64,
            rescan_rate: rescan.popcount() as f64 / n as f64,
            total_scan_rate: scanned as f64 / n as f64,
            speedup_factor: n as f64 / scanned as f64,
            residual_l1: l1_loss(&self.hr, &output)?.as_f64(),
            psnr: psnr(&self.hr, &output)?.as_f64(),
            ssim,
            cost: acquisition_cost(&self.hr, &output, &total, self.lambda)?.as_f64(),
            wall_clock: started.elapsed(),
        };
        Ok(Acquisition {
            output,
            rescan,
            total,
            report,
        })
    }
}

fn finish<T>(mut a: Acquisition<T>, prep_time: Duration) -> Acquisition<T> {
    a.report.wall_clock += prep_time;
    a
}

/// Runs the whole acquisition for an in-memory specimen.
pub fn acquire<T: Scalar>(cfg: &PipelineConfig, specimen: &Specimen<T>) -> Result<Acquisition<T>> {
    let started = Instant::now();
    let prepared = prepare(cfg, specimen)?;
    let prep_time = started.elapsed();
    Ok(finish(prepared.acquire(cfg.total_scan_rate, cfg.seed)?, prep_time))
}

/// Loads the inputs named in `cfg` and runs the acquisition.
pub fn run_acquisition<T: Scalar>(cfg: &PipelineConfig) -> Result<Acquisition<T>> {
    cfg.validate()?;
    acquire(cfg, &Specimen::load(cfg)?)
}

/// One acquisition per target speedup `f`, each at total scan rate `1/f`.
pub fn sweep_speedup<T: Scalar>(
    cfg: &PipelineConfig,
    specimen: &Specimen<T>,
    factors: &[f64],
) -> Result<Vec<Acquisition<T>>> {
    let max = (cfg.downsample_rate * cfg.downsample_rate) as f64;
    if let Some(f) = factors.iter().find(|&&f| !(f >= 1.0 && f <= max)) {
        return Err(Error::InvalidParameter(format!(
            "speedup {f} is infeasible with a x{} initial scan (must be in [1, {max}])",
            cfg.downsample_rate
        )));
    }
    let started = Instant::now();
    let prepared = prepare(cfg, specimen)?;
    let prep_time = started.elapsed();
    factors
        .par_iter()
        .map(|&f| Ok(finish(prepared.acquire(1.0 / f, cfg.seed)?, prep_time)))
        .collect()
}
