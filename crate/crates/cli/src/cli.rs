use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "active-sem", version, about = "Simulated sparse SEM acquisition with saliency-weighted rescans")]
pub struct Cli {
    /// Worker threads for parallel stages (outputs do not depend on it).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one acquisition and write the output image, bitmaps and report.
    Scan(ScanArgs),
    /// Run one acquisition per target speedup and write a comparison table.
    Sweep(SweepArgs),
    /// Draw a tiled WDPP bitmap from an error map.
    Sample(SampleArgs),
    /// Sparsification curves and correlation for several error estimators.
    Curves(CurvesArgs),
    /// ROI residual of an output image, from externally computed ROI maps.
    EvalRoi(EvalRoiArgs),
}

/// Config-file keys, each settable from the command line.
#[derive(Debug, Args, Default)]
pub struct Overrides {
    #[arg(long = "hr_path", alias = "hr-path", value_name = "PATH")]
    pub hr_path: Option<String>,
    #[arg(long = "downsample_rate", alias = "downsample-rate", value_name = "R", allow_hyphen_values = true)]
    pub downsample_rate: Option<String>,
    /// nearest, bilinear, bicubic, or the path of a reconstructed image.
    #[arg(long, value_name = "METHOD|PATH")]
    pub reconstruction: Option<String>,
    /// oracle, gradient, entropy, or the path of an estimated error map.
    #[arg(long, value_name = "NAME|PATH")]
    pub estimator: Option<String>,
    /// `<hr roi map>,<reconstruction roi map>`.
    #[arg(long, value_name = "HR,SR")]
    pub roi: Option<String>,
    /// wdpp, topk or random.
    #[arg(long, value_name = "KIND")]
    pub sampler: Option<String>,
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long = "sigma_s", alias = "sigma-s", value_name = "X", allow_hyphen_values = true)]
    pub sigma_s: Option<String>,
    #[arg(long, value_name = "T", allow_hyphen_values = true)]
    pub tile: Option<String>,
    #[arg(long, value_name = "N", allow_hyphen_values = true)]
    pub seed: Option<String>,
    #[arg(long = "total_scan_rate", alias = "total-scan-rate", value_name = "X", allow_hyphen_values = true)]
    pub total_scan_rate: Option<String>,
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    pub lambda: Option<String>,
}

impl Overrides {
    pub fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("hr_path", &self.hr_path),
            ("downsample_rate", &self.downsample_rate),
            ("reconstruction", &self.reconstruction),
            ("estimator", &self.estimator),
            ("roi", &self.roi),
            ("sampler", &self.sampler),
            ("gamma", &self.gamma),
            ("sigma_s", &self.sigma_s),
            ("tile", &self.tile),
            ("seed", &self.seed),
            ("total_scan_rate", &self.total_scan_rate),
            ("lambda", &self.lambda),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Flat `key = value` config file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scan: ScanArgs,
    /// Target speedup factors; each must lie in [1, downsample_rate²].
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,10,13")]
    pub factors: Vec<f64>,
    /// Samplers to compare at every factor.
    #[arg(long, value_delimiter = ',', default_value = "wdpp,topk,random")]
    pub samplers: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Error map (`.emap`, or a grayscale image).
    #[arg(long, value_name = "FILE")]
    pub emap: PathBuf,
    /// Number of pixels to select.
    #[arg(long, short)]
    pub k: usize,
    #[arg(long, default_value_t = active_sem::wdpp::DEFAULT_GAMMA, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long = "sigma_s", alias = "sigma-s", default_value_t = active_sem::wdpp::DEFAULT_SIGMA_S, allow_negative_numbers = true)]
    pub sigma_s: f64,
    #[arg(long, default_value_t = active_sem::wdpp::DEFAULT_TILE)]
    pub tile: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Average the reported mean saliency over this many consecutive seeds.
    #[arg(long, default_value_t = 1)]
    pub draws: u64,
    /// Output bitmap (defaults to `<out-dir>/rescan.pbm`).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    /// High-resolution images; repeat for several.
    #[arg(long, required = true, value_name = "FILE")]
    pub hr: Vec<PathBuf>,
    /// Reconstructions, one per `--hr`; simulated from `--rate` when omitted.
    #[arg(long, value_name = "FILE")]
    pub sr: Vec<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pub rate: usize,
    #[arg(long, default_value = "bicubic")]
    pub interpolation: String,
    /// Built-in estimators: oracle, gradient, entropy, interest, random.
    #[arg(long, value_delimiter = ',', default_value = "oracle,gradient,random")]
    pub estimators: Vec<String>,
    /// Precomputed estimator as `NAME=PATH`; `{stem}` in PATH expands to each image's file stem.
    #[arg(long, value_name = "NAME=PATH")]
    pub external: Vec<String>,
    /// ROI map of each high-resolution image; switches the ground truth to the ROI residual.
    #[arg(long = "roi-hr", value_name = "FILE")]
    pub roi_hr: Vec<PathBuf>,
    /// ROI map of each reconstruction.
    #[arg(long = "roi-sr", value_name = "FILE")]
    pub roi_sr: Vec<PathBuf>,
    /// Fractions of corrected pixels (ascending, in [0, 1]).
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    /// Random orderings averaged per image for the random baseline.
    #[arg(long, default_value_t = 50)]
    pub random_draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalRoiArgs {
    /// ROI map of the high-resolution image.
    #[arg(long = "roi-hr", value_name = "FILE")]
    pub roi_hr: PathBuf,
    /// ROI map of the acquisition output.
    #[arg(long = "roi-out", value_name = "FILE")]
    pub roi_out: PathBuf,
    /// ROI map of the plain reconstruction, reported alongside for comparison.
    #[arg(long = "roi-sr", value_name = "FILE")]
    pub roi_sr: Option<PathBuf>,
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
}
