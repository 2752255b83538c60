//! Wall-clock timings for `varsr bench`.

use std::fmt::Write as _;
use std::fs;
use std::time::Instant;

use serde_json::json;
use varsr_core::degradation::generate_mask_stack;
use varsr_core::kernels::{KernelFamily, KernelSampling};
use varsr_core::rng::RngStream;
use varsr_core::solver::{solve, SolverConfig};
use varsr_core::synth::synthetic_scene;
use varsr_core::{downsample, ScaleFactor, VarBlurOperator};

use crate::failure::{CliResult, Failure, IO};
use crate::run_manifest::{parent_dir, unix_now, RunManifest};
use crate::BenchArgs;

fn millis_per_rep<T>(reps: usize, mut f: impl FnMut() -> varsr_core::Result<T>) -> varsr_core::Result<(f64, T)> {
    let start = Instant::now();
    let mut last = f()?;
    for _ in 1..reps {
        last = f()?;
    }
    Ok((start.elapsed().as_secs_f64() * 1e3 / reps as f64, last))
}

pub fn run(args: &BenchArgs) -> CliResult {
    let started = unix_now();
    if args.reps == 0 {
        return Err(Failure::config("--reps must be >= 1"));
    }
    let s = ScaleFactor::new(2).map_err(|e| Failure::config(e.to_string()))?;
    let sampling = KernelSampling {
        family: KernelFamily::Mixed,
        ..KernelSampling::default()
    };
    let cfg = SolverConfig {
        iterations: 1,
        check_step_size: false,
        ..SolverConfig::default()
    };

    let mut csv = String::from("size,components,reps,apply_ms,adjoint_ms,iteration_ms,checksum\n");
    for &n in &args.sizes {
        if n == 0 || n % 2 != 0 {
            return Err(Failure::config(format!("frame size {n} must be positive and even")));
        }
        let x = synthetic_scene(n, n, 1, args.seed);
        for &p in &args.components {
            let mut rng = RngStream::derive(args.seed, (n * 1000 + p) as u64);
            let kernels = (0..p)
                .map(|_| sampling.sample(&mut rng))
                .collect::<varsr_core::Result<Vec<_>>>()?;
            let masks = generate_mask_stack(n, n, p, 3.0, rng.next_u64())?;
            let op = VarBlurOperator::new(kernels, masks)?;

            let (apply_ms, hx) = millis_per_rep(args.reps, || op.apply(&x))?;
            let (adjoint_ms, hthx) = millis_per_rep(args.reps, || op.apply_adjoint(&hx))?;
            let y = downsample(&hx, s)?;
            let (iteration_ms, (restored, _)) = millis_per_rep(args.reps, || solve(&y, &op, s, 0.0, &cfg))?;
            let checksum =
                hx.data().iter().sum::<f64>() + hthx.data().iter().sum::<f64>() + restored.data().iter().sum::<f64>();
            log::info!(
                "size {n} P {p}: apply {apply_ms:.2} ms, adjoint {adjoint_ms:.2} ms, iteration {iteration_ms:.2} ms"
            );
            let _ = writeln!(
                csv,
                "{n},{p},{},{apply_ms:.3},{adjoint_ms:.3},{iteration_ms:.3},{checksum:.12e}",
                args.reps
            );
        }
    }
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::new(IO, format!("{}: {e}", dir.display())))?;
    }
    fs::write(&args.out, csv).map_err(|e| Failure::new(IO, format!("{}: {e}", args.out.display())))?;

    let config = json!({
        "sizes": args.sizes,
        "components": args.components,
        "reps": args.reps,
        "solver": serde_json::to_value(&cfg).unwrap_or_default(),
    });
    RunManifest::new("bench", config, Some(args.seed), started).write(parent_dir(&args.out))
}
