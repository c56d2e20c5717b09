//! CSV and text serialization of acquisition results.
//!
//! CSV dialect: comma separated, `.` decimal point, one header row, LF endings.
//! Floats use Rust's shortest round-trip formatting so output is byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::run::{Acquisition, AcquisitionReport};
use crate::codec::{bitmap_to_pbm, save_image};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const REPORT_COLUMNS: [&str; 12] = [
    "sampler",
    "downsample_rate",
    "pixels",
    "rescan_pixels",
    "initial_scan_rate",
    "rescan_rate",
    "total_scan_rate",
    "speedup_factor",
    "residual_l1",
    "psnr",
    "ssim",
    "cost",
];

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v}")
    }
}

fn report_fields(r: &AcquisitionReport) -> Vec<String> {
    vec![
        r.sampler.to_string(),
        r.downsample_rate.to_string(),
        r.pixels.to_string(),
        r.rescan_pixels.to_string(),
        num(r.initial_scan_rate),
        num(r.rescan_rate),
        num(r.total_scan_rate),
        num(r.speedup_factor),
        num(r.residual_l1),
        num(r.psnr),
        r.ssim.map_or_else(|| "nan".into(), num),
        num(r.cost),
    ]
}

/// One row per report; with `targets`, a leading `target_speedup` column.
pub fn reports_csv(reports: &[&AcquisitionReport], targets: Option<&[f64]>) -> String {
    let mut out = String::new();
    if targets.is_some() {
        out.push_str("target_speedup,");
    }
    out.push_str(&REPORT_COLUMNS.join(","));
    out.push('\n');
    for (i, r) in reports.iter().enumerate() {
        if let Some(t) = targets {
            out.push_str(&num(t[i]));
            out.push(',');
        }
        out.push_str(&report_fields(r).join(","));
        out.push('\n');
    }
    out
}

pub fn summary_text(r: &AcquisitionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sampler            {}", r.sampler);
    let _ = writeln!(s, "initial scan       x{} ({:.4} of pixels)", r.downsample_rate, r.initial_scan_rate);
    let _ = writeln!(s, "rescan             {} pixels ({:.4})", r.rescan_pixels, r.rescan_rate);
    let _ = writeln!(s, "total scan rate    {:.4}", r.total_scan_rate);
    let _ = writeln!(s, "speedup            {:.3}x", r.speedup_factor);
    let _ = writeln!(s, "residual L1        {:.6}", r.residual_l1);
    let _ = writeln!(s, "PSNR               {:.3} dB", r.psnr);
    match r.ssim {
        Some(v) => {
            let _ = writeln!(s, "SSIM               {v:.4}");
        }
        None => {
            let _ = writeln!(s, "SSIM               n/a (image smaller than window)");
        }
    }
    let _ = writeln!(s, "cost               {:.6}", r.cost);
    let _ = writeln!(s, "compute time       {:.3} s (not counted in speedup)", r.wall_clock.as_secs_f64());
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Paths of the files written for one acquisition.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub output: PathBuf,
    pub total_bitmap: PathBuf,
    pub rescan_bitmap: PathBuf,
    pub report: PathBuf,
    pub summary: PathBuf,
}

/// Writes `out.pgm`, `total_scan.pbm`, `rescan.pbm`, `report.csv` and `summary.txt`.
pub fn write_artifacts<T: Scalar>(acq: &Acquisition<T>, dir: &Path) -> Result<Artifacts> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let a = Artifacts {
        output: dir.join("out.pgm"),
        total_bitmap: dir.join("total_scan.pbm"),
        rescan_bitmap: dir.join("rescan.pbm"),
        report: dir.join("report.csv"),
        summary: dir.join("summary.txt"),
    };
    save_image(&acq.output, &a.output)?;
    bitmap_to_pbm(&acq.total, &a.total_bitmap)?;
    bitmap_to_pbm(&acq.rescan, &a.rescan_bitmap)?;
    write_text(&a.report, &reports_csv(&[&acq.report], None))?;
    write_text(&a.summary, &summary_text(&acq.report))?;
    Ok(a)
}
