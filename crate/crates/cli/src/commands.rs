use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use serde_json::json;
use varsr_core::dataset::{generate_dataset, load_sources, read_meta, write_sample, DatasetConfig};
use varsr_core::degradation::{degrade as degrade_image, generate_mask_stack, sigma_from_8bit, DegradationSpec};
use varsr_core::io::{read_image, write_image, ImageFormat};
use varsr_core::kernels::KernelSampling;
use varsr_core::manifest::{load_operator, save_operator};
use varsr_core::metrics::{evaluate as evaluate_pair, MetricOptions, MetricReport};
use varsr_core::rng::RngStream;
use varsr_core::solver::{solve, SolverConfig};
use varsr_core::synth::synthetic_scene;
use varsr_core::{Image, ScaleFactor, VarBlurOperator};

use crate::failure::{CliResult, Failure, IO};
use crate::run_manifest::{draw_seed, parent_dir, unix_now, RunManifest};
use crate::{DegradeArgs, EvaluateArgs, GenDatasetArgs, GenKernelArgs, RestoreArgs};

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(IO, format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

fn scale_factor(s: usize) -> CliResult<ScaleFactor> {
    ScaleFactor::new(s).map_err(|e| Failure::config(e.to_string()))
}

fn check_sigma(sigma_8bit: f64) -> CliResult<f64> {
    if !(sigma_8bit >= 0.0) || !sigma_8bit.is_finite() {
        return Err(Failure::config(format!("--sigma must be >= 0, got {sigma_8bit}")));
    }
    Ok(sigma_from_8bit(sigma_8bit))
}

fn create_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn ensure_parent(path: &Path) -> CliResult {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => create_dir(dir),
        _ => Ok(()),
    }
}

pub fn gen_kernel(args: &GenKernelArgs) -> CliResult {
    let started = unix_now();
    if args.count == 0 {
        return Err(Failure::config("--count must be >= 1"));
    }
    let seed = args.seed.unwrap_or_else(draw_seed);
    let sampling = KernelSampling {
        family: args.family.into(),
        size: args.size,
        ..KernelSampling::default()
    };
    let mut rng = RngStream::new(seed);
    let kernels = (0..args.count)
        .map(|_| sampling.sample(&mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    create_dir(&args.out)?;
    match (args.height, args.width) {
        (Some(h), Some(w)) => {
            let masks = generate_mask_stack(h, w, args.count, args.border_sigma, rng.next_u64())?;
            let op = VarBlurOperator::new(kernels, masks)?;
            save_operator(&op, args.out.join("operator.json"))?;
        }
        _ => {
            for (i, k) in kernels.iter().enumerate() {
                write_image(&k.to_image(), args.out.join(format!("k_{i:02}.pfm")))?;
            }
        }
    }
    let config = json!({
        "sampling": to_value(&sampling),
        "count": args.count,
        "height": args.height,
        "width": args.width,
        "border_sigma": args.border_sigma,
    });
    RunManifest::new("gen-kernel", config, Some(seed), started).write(&args.out)
}

pub fn gen_dataset(args: &GenDatasetArgs) -> CliResult {
    let started = unix_now();
    let seed = args.seed.unwrap_or_else(draw_seed);
    let config: DatasetConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => DatasetConfig::default(),
    };
    config.validate()?;

    let mut inputs = Vec::new();
    let sources: Vec<Image> = match &args.sources {
        Some(dir) => {
            let loaded = load_sources(dir)?;
            inputs.extend(loaded.iter().map(|(p, _)| p.clone()));
            loaded.into_iter().map(|(_, img)| img).collect()
        }
        None => {
            if args.scene_size == 0 || args.scene_channels == 0 {
                return Err(Failure::config(
                    "procedural scenes need a positive size and channel count",
                ));
            }
            let mut rng = RngStream::derive(seed, u64::MAX);
            (0..args.count.max(1))
                .map(|_| synthetic_scene(args.scene_size, args.scene_size, args.scene_channels, rng.next_u64()))
                .collect()
        }
    };
    let samples = generate_dataset(&sources, args.count, &config, seed)?;
    create_dir(&args.out)?;
    for s in &samples {
        write_sample(&args.out, s, seed)?;
    }
    info!("wrote {} samples to {}", samples.len(), args.out.display());

    let resolved = json!({
        "dataset": to_value(&config),
        "count": args.count,
        "sources": args.sources.as_ref().map(|p| p.display().to_string()),
        "scene_size": args.scene_size,
        "scene_channels": args.scene_channels,
    });
    let mut manifest = RunManifest::new("gen-dataset", resolved, Some(seed), started);
    if let Some(p) = &args.config {
        manifest.hash_input(p)?;
    }
    for p in &inputs {
        manifest.hash_input(p)?;
    }
    manifest.write(&args.out)
}

pub fn degrade(args: &DegradeArgs) -> CliResult {
    let started = unix_now();
    let seed = args.seed.unwrap_or_else(draw_seed);
    let scale = scale_factor(args.scale)?;
    let sigma = check_sigma(args.sigma)?;
    let hr = read_image(&args.hr)?;
    let op = load_operator(&args.manifest)?;
    let spec = DegradationSpec::new(op, scale, sigma, seed)?;
    let lr = degrade_image(&hr, &spec)?;
    ensure_parent(&args.out)?;
    write_image(&lr, &args.out)?;

    let config = json!({
        "scale": args.scale,
        "sigma_8bit": args.sigma,
        "sigma": sigma,
        "out": args.out.display().to_string(),
    });
    let mut manifest = RunManifest::new("degrade", config, Some(seed), started);
    manifest.hash_input(&args.hr)?;
    manifest.hash_input(&args.manifest)?;
    manifest.write(parent_dir(&args.out))
}

fn load_solver_config(args: &RestoreArgs) -> CliResult<SolverConfig> {
    let cfg: SolverConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => SolverConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_text(path: &Path, text: &str) -> CliResult {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| io_err(path, e))
}

fn restore_one(
    lr_path: &Path,
    op: &VarBlurOperator,
    scale: ScaleFactor,
    sigma: f64,
    cfg: &SolverConfig,
    out: &Path,
    trace: Option<&Path>,
) -> CliResult {
    let lr = read_image(lr_path)?;
    let (x, log) = solve(&lr, op, scale, sigma, cfg)?;
    ensure_parent(out)?;
    write_image(&x, out)?;
    if let Some(t) = trace {
        write_text(t, &log.to_csv())?;
    }
    Ok(())
}

pub fn restore(args: &RestoreArgs) -> CliResult {
    let started = unix_now();
    let mut cfg = load_solver_config(args)?;
    if let Some(t) = &args.trace {
        cfg.trace = Some(t.clone());
    }
    let mut hashed: Vec<PathBuf> = args.config.iter().cloned().collect();

    let manifest_dir = if let Some(dir) = &args.dataset {
        create_dir(&args.out)?;
        let mut samples: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| io_err(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir() && p.join("meta.json").is_file())
            .collect();
        samples.sort();
        if samples.is_empty() {
            return Err(Failure::new(IO, format!("no samples found in {}", dir.display())));
        }
        for sample in &samples {
            let name = sample.file_name().unwrap_or_default().to_string_lossy().into_owned();
            let meta = read_meta(sample)?;
            let op = load_operator(sample.join("operator.json"))?;
            let scale = scale_factor(meta.scale)?;
            let trace = cfg.trace.as_ref().map(|t| t.join(format!("{name}.csv")));
            let lr = sample.join("lr.pfm");
            restore_one(
                &lr,
                &op,
                scale,
                meta.sigma,
                &cfg,
                &args.out.join(format!("{name}.pfm")),
                trace.as_deref(),
            )?;
            hashed.push(lr);
            hashed.push(sample.join("operator.json"));
            info!("restored {name}");
        }
        args.out.clone()
    } else {
        let (Some(lr), Some(manifest), Some(s)) = (&args.lr, &args.manifest, args.scale) else {
            return Err(Failure::config("--lr needs --manifest and --scale"));
        };
        let scale = scale_factor(s)?;
        let sigma = check_sigma(args.sigma)?;
        let op = load_operator(manifest)?;
        restore_one(lr, &op, scale, sigma, &cfg, &args.out, cfg.trace.as_deref())?;
        hashed.push(lr.clone());
        hashed.push(manifest.clone());
        parent_dir(&args.out).to_path_buf()
    };

    let config = json!({
        "solver": to_value(&cfg),
        "scale": args.scale,
        "sigma_8bit": args.sigma,
        "dataset": args.dataset.as_ref().map(|p| p.display().to_string()),
    });
    let mut manifest = RunManifest::new("restore", config, None, started);
    for p in &hashed {
        manifest.hash_input(p)?;
    }
    manifest.write(&manifest_dir)
}

fn image_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && ImageFormat::from_extension(p).is_some())
        .collect();
    files.sort();
    Ok(files)
}

/// `<reference>/<file name>` if present, else `<reference>/<stem>/hr.pfm`.
fn find_reference(reference: &Path, restored: &Path) -> CliResult<PathBuf> {
    let name = restored.file_name().unwrap_or_default();
    let direct = reference.join(name);
    if direct.is_file() {
        return Ok(direct);
    }
    let stem = restored.file_stem().unwrap_or_default();
    let nested = reference.join(stem).join("hr.pfm");
    if nested.is_file() {
        return Ok(nested);
    }
    Err(Failure::new(
        IO,
        format!("no reference for {} in {}", restored.display(), reference.display()),
    ))
}

pub fn format_report(rows: &[(String, MetricReport)]) -> String {
    let mut out = String::from("name,psnr,ssim,mse\n");
    let line = |name: &str, r: &MetricReport| format!("{name},{:.6},{:.6},{:.6e}\n", r.psnr, r.ssim, r.mse);
    for (name, r) in rows {
        out.push_str(&line(name, r));
    }
    let n = rows.len() as f64;
    let mean = MetricReport {
        psnr: rows.iter().map(|(_, r)| r.psnr).sum::<f64>() / n,
        ssim: rows.iter().map(|(_, r)| r.ssim).sum::<f64>() / n,
        mse: rows.iter().map(|(_, r)| r.mse).sum::<f64>() / n,
    };
    out.push_str(&line("mean", &mean));
    out
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult {
    let started = unix_now();
    let opts = MetricOptions {
        quantize: args.quantize,
        luma: args.luma,
        ..MetricOptions::default()
    };
    let files = image_files(&args.restored)?;
    if files.is_empty() {
        return Err(Failure::new(IO, format!("no images in {}", args.restored.display())));
    }
    let mut manifest = RunManifest::new("evaluate", to_value(&opts), None, started);
    let mut rows = Vec::with_capacity(files.len());
    for f in &files {
        let reference = find_reference(&args.reference, f)?;
        let report = evaluate_pair(&read_image(f)?, &read_image(&reference)?, &opts)?;
        let name = f.file_name().unwrap_or_default().to_string_lossy().into_owned();
        rows.push((name, report));
        manifest.hash_input(f)?;
        manifest.hash_input(&reference)?;
    }
    write_text(&args.out, &format_report(&rows))?;
    manifest.write(parent_dir(&args.out))
}
