use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use active_sem::codec::{bitmap_to_pbm, load_image, read_emap};
use active_sem::metrics::{default_fractions, l1_loss};
use active_sem::pipeline::{
    correlation_csv, correlation_table, curve_table, load_probability_map, reports_csv, run_acquisition,
    summary_text, sweep_speedup, write_artifacts, write_text, CurveEstimator, EvalImage, PipelineConfig,
    SamplerKind, Specimen,
};
use active_sem::reconstruct::{simulate_reconstruction, Interpolation};
use active_sem::wdpp::TiledWdpp;
use active_sem::{Error, ErrorMap64, Image64, Raster};

use crate::cli::{CurvesArgs, EvalRoiArgs, SampleArgs, ScanArgs, SweepArgs};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Run(e) if e.is_io() => 3,
            Failure::Run(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Run(e) => e.fmt(f),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type CmdResult = Result<(), Failure>;

fn load_config(args: &ScanArgs) -> Result<PipelineConfig, Failure> {
    let overrides = args.overrides.pairs();
    let mut cfg = match &args.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None if args.overrides.hr_path.is_some() => PipelineConfig::new(PathBuf::new()),
        None => return Err(Failure::Usage("either --config or --hr_path is required".into())),
    };
    for (key, value) in overrides {
        cfg.set(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create_dir(dir: &Path) -> CmdResult {
    fs::create_dir_all(dir).map_err(|e| {
        Failure::Run(Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })
    })
}

pub fn scan(args: &ScanArgs) -> CmdResult {
    let cfg = load_config(args)?;
    let acq = run_acquisition::<f64>(&cfg)?;
    let arts = write_artifacts(&acq, &args.out_dir)?;
    eprint!("{}", summary_text(&acq.report));
    eprintln!("wrote {}", arts.output.display());
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> CmdResult {
    let mut cfg = load_config(&args.scan)?;
    let samplers = args
        .samplers
        .iter()
        .map(|s| s.parse::<SamplerKind>())
        .collect::<Result<Vec<_>, _>>()?;
    let specimen = Specimen::<f64>::load(&cfg)?;
    let mut reports = Vec::new();
    let mut targets = Vec::new();
    for sampler in samplers {
        cfg.sampler = sampler;
        for acq in sweep_speedup(&cfg, &specimen, &args.factors)? {
            reports.push(acq.report);
        }
        targets.extend_from_slice(&args.factors);
    }
    create_dir(&args.scan.out_dir)?;
    let path = args.scan.out_dir.join("sweep.csv");
    let refs: Vec<_> = reports.iter().collect();
    write_text(&path, &reports_csv(&refs, Some(&targets)))?;
    eprintln!("wrote {} ({} runs)", path.display(), reports.len());
    Ok(())
}

fn load_error_map(path: &Path) -> Result<ErrorMap64, Error> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("emap")) {
        read_emap(path)
    } else {
        Ok(ErrorMap64::from(load_image::<f64>(path)?))
    }
}

pub fn sample(args: &SampleArgs) -> CmdResult {
    if args.draws == 0 {
        return Err(Failure::Usage("--draws must be at least 1".into()));
    }
    let u = load_error_map(&args.emap)?;
    if args.k > u.len() {
        return Err(Error::InvalidParameter(format!("k = {} exceeds the {} pixels of the map", args.k, u.len())).into());
    }
    let plan = TiledWdpp::new(&u, None, args.tile, args.gamma, args.sigma_s)?;
    let mut first = None;
    let mut mean_sum = 0.0;
    for d in 0..args.draws {
        let b = plan.sample(args.k, args.seed.wrapping_add(d))?;
        let picked = b.popcount();
        if picked > 0 {
            mean_sum += b.ones_indices().map(|i| u.values()[i]).sum::<f64>() / picked as f64;
        }
        first.get_or_insert(b);
    }
    let b = first.expect("at least one draw");
    let out = match &args.out {
        Some(p) => p.clone(),
        None => {
            create_dir(&args.out_dir)?;
            args.out_dir.join("rescan.pbm")
        }
    };
    bitmap_to_pbm(&b, &out)?;
    println!("popcount={} mean_saliency={}", b.popcount(), mean_sum / args.draws as f64);
    eprintln!("wrote {}", out.display());
    Ok(())
}

fn expand_stem(pattern: &str, hr: &Path) -> PathBuf {
    let stem = hr.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    PathBuf::from(pattern.replace("{stem}", &stem))
}

fn aligned<'a>(flag: &str, paths: &'a [PathBuf], n: usize) -> Result<Option<&'a [PathBuf]>, Failure> {
    match paths.len() {
        0 => Ok(None),
        m if m == n => Ok(Some(paths)),
        m => Err(Failure::Usage(format!("{flag} given {m} times but there are {n} --hr images"))),
    }
}

pub fn curves(args: &CurvesArgs) -> CmdResult {
    let n = args.hr.len();
    let method: Interpolation = args.interpolation.parse()?;
    let srs = aligned("--sr", &args.sr, n)?;
    let roi_hr = aligned("--roi-hr", &args.roi_hr, n)?;
    let roi_sr = aligned("--roi-sr", &args.roi_sr, n)?;
    if roi_hr.is_some() != roi_sr.is_some() {
        return Err(Failure::Usage("--roi-hr and --roi-sr must be given together".into()));
    }

    let mut estimators = Vec::new();
    for name in &args.estimators {
        let est = CurveEstimator::builtin(name)
            .ok_or_else(|| Failure::Usage(format!("unknown estimator {name:?}")))?;
        estimators.push(est);
    }
    let mut patterns = Vec::new();
    for (slot, arg) in args.external.iter().enumerate() {
        let (name, pattern) = arg
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--external expects NAME=PATH, got {arg:?}")))?;
        if n > 1 && !pattern.contains("{stem}") {
            return Err(Failure::Usage(format!("--external {name}: use {{stem}} in the path when giving several images")));
        }
        estimators.push(CurveEstimator::External {
            name: name.to_string(),
            slot,
        });
        patterns.push(pattern.to_string());
    }
    let mut seen = Vec::new();
    for e in &estimators {
        if seen.contains(&e.name()) {
            return Err(Failure::Usage(format!("estimator {} listed twice", e.name())));
        }
        seen.push(e.name());
    }

    let mut images = Vec::with_capacity(n);
    for (i, hr_path) in args.hr.iter().enumerate() {
        let hr: Image64 = load_image(hr_path)?;
        let sr = match srs {
            Some(p) => load_image(&p[i])?,
            None => simulate_reconstruction(&hr, args.rate, method)?,
        };
        let roi = match (roi_hr, roi_sr) {
            (Some(a), Some(b)) => Some((load_probability_map(&a[i])?, load_probability_map(&b[i])?)),
            _ => None,
        };
        let external = patterns
            .iter()
            .map(|p| load_error_map(&expand_stem(p, hr_path)))
            .collect::<Result<Vec<_>, _>>()?;
        images.push(EvalImage::new(&hr, sr, roi, external)?);
    }

    let fractions = args.fractions.clone().unwrap_or_else(default_fractions::<f64>);
    let table = curve_table(&images, &estimators, &fractions, args.random_draws, args.seed)?;
    let corr = correlation_table(&images, &estimators)?;
    create_dir(&args.out_dir)?;
    let curves_path = args.out_dir.join("curves.csv");
    let corr_path = args.out_dir.join("correlation.csv");
    write_text(&curves_path, &table.to_csv())?;
    write_text(&corr_path, &correlation_csv(&corr))?;
    eprintln!("wrote {} and {}", curves_path.display(), corr_path.display());
    Ok(())
}

pub fn eval_roi(args: &EvalRoiArgs) -> CmdResult {
    let hr = load_probability_map::<f64>(&args.roi_hr)?;
    let out = load_probability_map::<f64>(&args.roi_out)?;
    let mut header = String::from("roi_l1");
    let mut row = format!("{}", l1_loss(&hr, &out)?);
    if let Some(p) = &args.roi_sr {
        let sr = load_probability_map::<f64>(p)?;
        header.push_str(",roi_l1_reconstruction");
        row.push_str(&format!(",{}", l1_loss(&hr, &sr)?));
    }
    create_dir(&args.out_dir)?;
    let path = args.out_dir.join("roi_eval.csv");
    write_text(&path, &format!("{header}\n{row}\n"))?;
    eprintln!("{header} = {row}");
    Ok(())
}
