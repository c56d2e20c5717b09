//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are exactly the
//! field names of [`PipelineConfig`]; unknown or repeated keys are errors.
//! Relative paths are resolved against the config file's directory.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::reconstruct::Interpolation;
use crate::wdpp::{DEFAULT_GAMMA, DEFAULT_SIGMA_S, DEFAULT_TILE};

#[derive(Debug, Clone, PartialEq)]
pub enum Reconstruction {
    Interpolate(Interpolation),
    /// Precomputed super-resolved image with the high-resolution dimensions.
    External(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum EstimatorSource {
    /// Ground-truth residual; an upper bound on what any estimator can achieve.
    Oracle,
    Gradient,
    /// Binary entropy of the ROI map of the reconstruction; needs `roi`.
    Entropy,
    /// EMAP file with values in `[0, 1]`.
    External(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerKind {
    Wdpp,
    Topk,
    Random,
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wdpp" => Ok(Self::Wdpp),
            "topk" => Ok(Self::Topk),
            "random" => Ok(Self::Random),
            other => Err(Error::Config(format!("unknown sampler {other:?}"))),
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Wdpp => "wdpp",
            Self::Topk => "topk",
            Self::Random => "random",
        })
    }
}

/// ROI probability maps of the high-resolution image and of the reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiPaths {
    pub hr: PathBuf,
    pub sr: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub hr_path: PathBuf,
    pub downsample_rate: usize,
    pub reconstruction: Reconstruction,
    pub estimator: EstimatorSource,
    pub roi: Option<RoiPaths>,
    pub sampler: SamplerKind,
    pub gamma: f64,
    pub sigma_s: f64,
    pub tile: usize,
    pub seed: u64,
    pub total_scan_rate: f64,
    pub lambda: f64,
}

pub const CONFIG_KEYS: [&str; 12] = [
    "hr_path",
    "downsample_rate",
    "reconstruction",
    "estimator",
    "roi",
    "sampler",
    "gamma",
    "sigma_s",
    "tile",
    "seed",
    "total_scan_rate",
    "lambda",
];

impl PipelineConfig {
    pub fn new(hr_path: impl Into<PathBuf>) -> Self {
        Self {
            hr_path: hr_path.into(),
            downsample_rate: 4,
            reconstruction: Reconstruction::Interpolate(Interpolation::Bicubic),
            estimator: EstimatorSource::Oracle,
            roi: None,
            sampler: SamplerKind::Wdpp,
            gamma: DEFAULT_GAMMA,
            sigma_s: DEFAULT_SIGMA_S,
            tile: DEFAULT_TILE,
            seed: 0,
            total_scan_rate: 0.1,
            lambda: 0.0,
        }
    }

    /// Parses config text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = Self::new(PathBuf::new());
        let mut seen: Vec<&str> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let key = key.trim();
            let known = CONFIG_KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| Error::Config(format!("line {}: unknown key {key:?}", lineno + 1)))?;
            if seen.contains(known) {
                return Err(Error::Config(format!("line {}: duplicate key {key:?}", lineno + 1)));
            }
            seen.push(known);
            cfg.set_relative(key, value.trim(), base)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        if !seen.contains(&"hr_path") {
            return Err(Error::Config("missing required key hr_path".into()));
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base)
    }

    /// Applies one override; paths are taken as given.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_relative(key, value, Path::new(""))
    }

    fn set_relative(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = |v: &str| base.join(v);
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
        }
        match key {
            "hr_path" => self.hr_path = path(value),
            "downsample_rate" => self.downsample_rate = num(key, value)?,
            "reconstruction" => {
                self.reconstruction = match value.parse::<Interpolation>() {
                    Ok(m) => Reconstruction::Interpolate(m),
                    Err(_) => Reconstruction::External(path(value)),
                }
            }
            "estimator" => {
                self.estimator = match value {
                    "oracle" => EstimatorSource::Oracle,
                    "gradient" => EstimatorSource::Gradient,
                    "entropy" => EstimatorSource::Entropy,
                    other => EstimatorSource::External(path(other)),
                }
            }
            "roi" => {
                self.roi = if value.is_empty() || value == "none" {
                    None
                } else {
                    let (hr, sr) = value
                        .split_once(',')
                        .ok_or_else(|| Error::Config("roi: expected `<hr map>, <sr map>`".into()))?;
                    Some(RoiPaths {
                        hr: path(hr.trim()),
                        sr: path(sr.trim()),
                    })
                }
            }
            "sampler" => self.sampler = value.parse()?,
            "gamma" => self.gamma = num(key, value)?,
            "sigma_s" => self.sigma_s = num(key, value)?,
            "tile" => self.tile = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "total_scan_rate" => self.total_scan_rate = num(key, value)?,
            "lambda" => self.lambda = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Checks parameter ranges that do not depend on the image.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.downsample_rate == 0 {
            return bad("downsample_rate must be >= 1".into());
        }
        let floor = 1.0 / (self.downsample_rate * self.downsample_rate) as f64;
        if !(self.total_scan_rate > 0.0 && self.total_scan_rate <= 1.0) {
            return bad(format!("total_scan_rate {} outside (0, 1]", self.total_scan_rate));
        }
        if self.total_scan_rate < floor {
            return bad(format!(
                "total_scan_rate {} is below the initial scan rate 1/{}",
                self.total_scan_rate,
                self.downsample_rate * self.downsample_rate
            ));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return bad(format!("gamma must be >= 0, got {}", self.gamma));
        }
        if !(self.sigma_s.is_finite() && self.sigma_s > 0.0) {
            return bad(format!("sigma_s must be > 0, got {}", self.sigma_s));
        }
        if self.tile == 0 {
            return bad("tile must be >= 1".into());
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if self.estimator == EstimatorSource::Entropy && self.roi.is_none() {
            return bad("estimator = entropy needs roi maps".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_key() {
        let text = "\
# run
hr_path = data/hr.pgm
downsample_rate = 8
reconstruction = sr/out.png
estimator = est.emap
roi = roi_hr.emap, roi_sr.emap
sampler = topk
gamma = 5
sigma_s = 1.5
tile = 16
seed = 99
total_scan_rate = 0.2
lambda = 0.3
";
        let cfg = PipelineConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(cfg.hr_path, PathBuf::from("/base/data/hr.pgm"));
        assert_eq!(cfg.downsample_rate, 8);
        assert_eq!(cfg.reconstruction, Reconstruction::External("/base/sr/out.png".into()));
        assert_eq!(cfg.estimator, EstimatorSource::External("/base/est.emap".into()));
        assert_eq!(
            cfg.roi,
            Some(RoiPaths {
                hr: "/base/roi_hr.emap".into(),
                sr: "/base/roi_sr.emap".into()
            })
        );
        assert_eq!(cfg.sampler, SamplerKind::Topk);
        assert_eq!((cfg.gamma, cfg.sigma_s, cfg.tile, cfg.seed), (5.0, 1.5, 16, 99));
        assert_eq!((cfg.total_scan_rate, cfg.lambda), (0.2, 0.3));
        cfg.validate().unwrap();
    }

    #[test]
    fn defaults_and_builtin_values() {
        let cfg = PipelineConfig::parse("hr_path = a.pgm\nreconstruction = bilinear\nestimator = gradient", Path::new("")).unwrap();
        assert_eq!(cfg.reconstruction, Reconstruction::Interpolate(Interpolation::Bilinear));
        assert_eq!(cfg.estimator, EstimatorSource::Gradient);
        assert_eq!((cfg.gamma, cfg.sigma_s, cfg.tile), (2.0, 2.0, 32));
        assert_eq!(cfg.sampler, SamplerKind::Wdpp);
    }

    #[test]
    fn rejects_bad_input() {
        let p = Path::new("");
        assert!(PipelineConfig::parse("hr_path = a\ncolour = red", p).is_err());
        assert!(PipelineConfig::parse("hr_path = a\nhr_path = b", p).is_err());
        assert!(PipelineConfig::parse("downsample_rate = 4", p).is_err());
        assert!(PipelineConfig::parse("hr_path = a\ntile = big", p).is_err());
        assert!(PipelineConfig::parse("hr_path a", p).is_err());
        assert!(PipelineConfig::parse("hr_path = a\nsampler = greedy", p).is_err());
    }

    #[test]
    fn validation_ranges() {
        let mut cfg = PipelineConfig::new("a.pgm");
        cfg.validate().unwrap();
        cfg.total_scan_rate = 1.0 / 32.0;
        assert!(cfg.validate().is_err());
        cfg.total_scan_rate = 1.0 / 16.0;
        cfg.validate().unwrap();
        cfg.estimator = EstimatorSource::Entropy;
        assert!(cfg.validate().is_err());
        cfg.estimator = EstimatorSource::Oracle;
        cfg.sigma_s = 0.0;
        assert!(cfg.validate().is_err());
    }
}
