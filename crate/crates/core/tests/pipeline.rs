use active_sem::codec::{encode_pgm, load_image, pbm_to_bitmap, save_image};
use active_sem::pipeline::{
    acquire, prepare, run_acquisition, sweep_speedup, write_artifacts, EstimatorSource, PipelineConfig,
    SamplerKind, Specimen,
};
use active_sem::synth::{em_phantom, PhantomParams};
use active_sem::{Error, Image64, Raster};

fn phantom(size: usize, seed: u64) -> Image64 {
    em_phantom(size, size, seed, &PhantomParams::default()).unwrap()
}

fn config(sampler: SamplerKind) -> PipelineConfig {
    let mut cfg = PipelineConfig::new("unused.pgm");
    cfg.sampler = sampler;
    cfg.tile = 16;
    cfg
}

#[test]
fn initial_scan_only_accounts_speedup_of_rate_squared() {
    let specimen = Specimen::from_image(phantom(64, 1));
    let mut cfg = config(SamplerKind::Wdpp);
    cfg.total_scan_rate = 1.0 / 16.0;
    let acq = acquire(&cfg, &specimen).unwrap();
    assert_eq!(acq.rescan.popcount(), 0);
    assert_eq!(acq.report.total_scan_rate, 1.0 / 16.0);
    assert_eq!(acq.report.speedup_factor, 16.0);
}

#[test]
fn rescan_avoids_lattice_and_meets_budget() {
    let specimen = Specimen::from_image(phantom(48, 2));
    for sampler in [SamplerKind::Wdpp, SamplerKind::Topk, SamplerKind::Random] {
        let cfg = config(sampler);
        let prepared = prepare(&cfg, &specimen).unwrap();
        let k = prepared.budget(0.1).unwrap();
        assert_eq!(k, (0.1f64 * 48.0 * 48.0).round() as usize - 144);
        let acq = prepared.acquire(0.1, 3).unwrap();
        assert_eq!(acq.rescan.popcount(), k, "{sampler}");
        assert!(!acq.rescan.intersects(&prepared.initial));
        assert_eq!(acq.total.popcount(), 144 + k);
        for i in acq.total.ones_indices() {
            assert_eq!(acq.output.values()[i], prepared.hr.values()[i]);
        }
    }
}

#[test]
fn budget_below_initial_scan_is_rejected() {
    let specimen = Specimen::from_image(phantom(32, 2));
    let mut cfg = config(SamplerKind::Topk);
    cfg.total_scan_rate = 0.03;
    let err = acquire(&cfg, &specimen).unwrap_err();
    assert!(matches!(err, Error::Config(_)), "{err:?}");
    let prepared = prepare(&config(SamplerKind::Topk), &specimen).unwrap();
    assert!(matches!(prepared.budget(0.03), Err(Error::InvalidParameter(_))));
}

#[test]
fn oracle_topk_error_falls_as_speedup_falls() {
    let specimen = Specimen::from_image(phantom(64, 4));
    let cfg = config(SamplerKind::Topk);
    let factors = [16.0, 13.0, 10.0, 7.0, 5.0, 3.0, 1.0];
    let runs = sweep_speedup(&cfg, &specimen, &factors).unwrap();
    for w in runs.windows(2) {
        assert!(w[1].report.residual_l1 <= w[0].report.residual_l1);
        assert!(w[1].report.speedup_factor < w[0].report.speedup_factor);
    }
    assert_eq!(runs.last().unwrap().report.residual_l1, 0.0);
    assert!(sweep_speedup(&cfg, &specimen, &[17.0]).is_err());
    assert!(sweep_speedup(&cfg, &specimen, &[0.5]).is_err());
}

#[test]
fn acquisition_is_identical_across_thread_pools() {
    let specimen = Specimen::from_image(phantom(64, 5));
    let cfg = config(SamplerKind::Wdpp);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| acquire(&cfg, &specimen).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.rescan, b.rescan);
    assert_eq!(encode_pgm(&a.output), encode_pgm(&b.output));
}

#[test]
fn files_in_files_out() {
    let dir = tempfile::tempdir().unwrap();
    let hr_path = dir.path().join("hr.pgm");
    save_image(&phantom(40, 6), &hr_path).unwrap();
    let mut cfg = PipelineConfig::parse(
        "hr_path = hr.pgm\nsampler = topk\ntotal_scan_rate = 0.2\ntile = 8\n",
        dir.path(),
    )
    .unwrap();
    cfg.estimator = EstimatorSource::Gradient;
    let acq = run_acquisition::<f64>(&cfg).unwrap();
    let out = dir.path().join("out");
    let arts = write_artifacts(&acq, &out).unwrap();
    let reread: Image64 = load_image(&arts.output).unwrap();
    assert_eq!(encode_pgm(&reread), encode_pgm(&acq.output));
    assert_eq!(pbm_to_bitmap(&arts.total_bitmap).unwrap(), acq.total);
    assert_eq!(pbm_to_bitmap(&arts.rescan_bitmap).unwrap(), acq.rescan);
    let csv = std::fs::read_to_string(&arts.report).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.starts_with("sampler,"));

    cfg.hr_path = dir.path().join("missing.pgm");
    match run_acquisition::<f64>(&cfg) {
        Err(e @ Error::MissingFile { .. }) => assert!(e.to_string().contains("missing.pgm")),
        other => panic!("{other:?}"),
    }
}
