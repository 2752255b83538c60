//! Fast self-test battery for `varsr check`.

use varsr_core::degradation::generate_mask_stack;
use varsr_core::io::{decode, encode, ImageFormat};
use varsr_core::kernels::{KernelFamily, KernelSampling};
use varsr_core::manifest::load_operator;
use varsr_core::metrics::psnr;
use varsr_core::priors::{denoise, tv_objective, DenoiserKind};
use varsr_core::rng::RngStream;
use varsr_core::solver::data_prox;
use varsr_core::{downsample, upsample_zeropad, Image, ScaleFactor, VarBlurOperator};

use crate::failure::{CliResult, Failure, VALIDATION};
use crate::CheckArgs;

type Outcome = Result<String, String>;

fn random_image(rng: &mut RngStream, h: usize, w: usize) -> Image {
    Image::from_fn(h, w, 1, |_, _, _| rng.uniform_range(-1.0, 1.0))
}

fn random_operator(rng: &mut RngStream, n: usize, max_p: usize) -> varsr_core::Result<VarBlurOperator> {
    let p = rng.int_range(1, max_p);
    let sampling = KernelSampling {
        family: KernelFamily::Mixed,
        size: 7,
        motion_length: (3, 6),
        ..KernelSampling::default()
    };
    let kernels = (0..p)
        .map(|_| sampling.sample(rng))
        .collect::<varsr_core::Result<Vec<_>>>()?;
    let masks = generate_mask_stack(n, n, p, 1.5, rng.next_u64())?;
    VarBlurOperator::new(kernels, masks)
}

fn within(name: &str, err: f64, tol: f64) -> Outcome {
    if err <= tol {
        Ok(format!("{name} {err:.2e} <= {tol:.0e}"))
    } else {
        Err(format!("{name} {err:.2e} > {tol:.0e}"))
    }
}

fn adjoint() -> varsr_core::Result<Outcome> {
    let mut rng = RngStream::new(11);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let op = random_operator(&mut rng, 24, 4)?;
        let a = random_image(&mut rng, 24, 24);
        let b = random_image(&mut rng, 24, 24);
        let lhs = op.apply(&a)?.dot(&b)?;
        let rhs = a.dot(&op.apply_adjoint(&b)?)?;
        worst = worst.max((lhs - rhs).abs() / (a.norm() * b.norm()));
    }
    Ok(within("relative gap", worst, 1e-10))
}

fn zeropad_adjoint() -> varsr_core::Result<Outcome> {
    let mut rng = RngStream::new(12);
    let mut worst: f64 = 0.0;
    for k in 1..=4 {
        let s = ScaleFactor::new(k)?;
        let a = random_image(&mut rng, 6, 5);
        let b = random_image(&mut rng, 6 * k, 5 * k);
        let lhs = upsample_zeropad(&a, s).dot(&b)?;
        let rhs = a.dot(&downsample(&b, s)?)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(within("inner product gap", worst, 1e-12))
}

fn prox_oracle() -> varsr_core::Result<Outcome> {
    let mut rng = RngStream::new(13);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        // scales that divide the 8×8 frame
        let s = ScaleFactor::new([1, 2, 4][rng.int_range(0, 2)])?;
        let sigma = rng.uniform_range(0.01, 0.2);
        let mu = rng.uniform_range(0.1, 50.0);
        let v = random_image(&mut rng, 8, 8);
        let y_up = upsample_zeropad(&random_image(&mut rng, 8 / s.get(), 8 / s.get()), s);
        let z = data_prox(&y_up, &v, sigma * sigma * mu, s)?;
        // stationarity of μ/2(z−v)² + 1/(2σ²)(z−y)² on sampled pixels
        for i in 0..8 {
            for j in 0..8 {
                let (vv, yy) = (v.get(0, i, j), y_up.get(0, i, j));
                let expect = if i % s.get() == 0 && j % s.get() == 0 {
                    (mu * vv + yy / (sigma * sigma)) / (mu + 1.0 / (sigma * sigma))
                } else {
                    vv
                };
                worst = worst.max((z.get(0, i, j) - expect).abs());
            }
        }
    }
    Ok(within("max abs diff", worst, 1e-12))
}

fn psnr_closed_forms() -> varsr_core::Result<Outcome> {
    let a = Image::zeros(16, 16, 1);
    let cases = [(0.1, 20.0), (0.01, 40.0), (1.0, 0.0)];
    let mut worst: f64 = 0.0;
    for (offset, db) in cases {
        worst = worst.max((psnr(&a, &Image::filled(16, 16, 1, offset))? - db).abs());
    }
    Ok(within("dB error", worst, 1e-9))
}

/// A single convolution has norm max|K̂| ≤ 1; a mixture of `P` of them is
/// bounded by √P (row sums are 1, column sums at most `P`).
fn norm_bound() -> varsr_core::Result<Outcome> {
    let mut rng = RngStream::new(14);
    for _ in 0..10 {
        let op = random_operator(&mut rng, 16, 4)?;
        let est = op.operator_norm_estimate();
        let p = op.components();
        if p == 1 {
            let peak = op.spectrum(0).iter().map(|c| c.norm()).fold(0.0, f64::max);
            if (est - peak).abs() > 1e-6 || est > 1.0 + 1e-6 {
                return Ok(Err(format!("single kernel: estimate {est:.9}, max |K̂| {peak:.9}")));
            }
        } else if est > (p as f64).sqrt() + 1e-6 {
            return Ok(Err(format!("{p} components: estimate {est:.9} above sqrt(P)")));
        }
    }
    Ok(Ok("single-kernel norms match max |K̂|, mixtures within sqrt(P)".into()))
}

fn brute_force() -> varsr_core::Result<Outcome> {
    let mut rng = RngStream::new(15);
    let n = 16;
    let op = random_operator(&mut rng, n, 3)?;
    let x = random_image(&mut rng, n, n);
    let fast = op.apply(&x)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for (k, m) in op.kernels().iter().zip(op.masks().masks()) {
                let (ci, cj) = k.center();
                let mut conv = 0.0;
                for a in 0..k.height() {
                    for b in 0..k.width() {
                        let si = (i + n * 4 + ci - a) % n;
                        let sj = (j + n * 4 + cj - b) % n;
                        conv += k.tap(a, b) * x.get(0, si, sj);
                    }
                }
                acc += m.get(0, i, j) * conv;
            }
            worst = worst.max((acc - fast.get(0, i, j)).abs());
        }
    }
    Ok(within("max abs diff", worst, 1e-10))
}

fn tv_decreases_objective() -> varsr_core::Result<Outcome> {
    let mut rng = RngStream::new(16);
    let beta: f64 = 0.15;
    for _ in 0..10 {
        let v = random_image(&mut rng, 16, 16);
        let x = denoise(&DenoiserKind::tv(), &v, beta)?;
        let (fx, fv) = (tv_objective(&x, &v, beta * beta)?, tv_objective(&v, &v, beta * beta)?);
        if fx > fv {
            return Ok(Err(format!("objective rose from {fv:.6} to {fx:.6}")));
        }
    }
    Ok(Ok("objective decreased on 10 inputs".into()))
}

fn pfm_roundtrip() -> varsr_core::Result<Outcome> {
    let mut rng = RngStream::new(17);
    let img = Image::from_fn(7, 5, 3, |_, _, _| rng.uniform_range(-2.0, 2.0) as f32 as f64);
    let back = decode(&encode(&img, ImageFormat::Pfm)?)?;
    Ok(if back == img {
        Ok("bit-exact".into())
    } else {
        Err("decoded image differs".into())
    })
}

pub fn run(args: &CheckArgs) -> CliResult {
    let mut checks: Vec<(&str, Box<dyn Fn() -> varsr_core::Result<Outcome>>)> = vec![
        ("adjoint", Box::new(adjoint)),
        ("zeropad-adjoint", Box::new(zeropad_adjoint)),
        ("prox-oracle", Box::new(prox_oracle)),
        ("psnr-closed-form", Box::new(psnr_closed_forms)),
        ("norm-bound", Box::new(norm_bound)),
        ("operator-brute-force", Box::new(brute_force)),
        ("tv-objective", Box::new(tv_decreases_objective)),
        ("pfm-roundtrip", Box::new(pfm_roundtrip)),
    ];
    if let Some(path) = args.manifest.clone() {
        checks.push((
            "manifest-load",
            Box::new(move || {
                Ok(load_operator(&path)
                    .map(|op| format!("{} components on {:?}", op.components(), op.frame()))
                    .map_err(|e| e.to_string()))
            }),
        ));
    }

    let mut failed = Vec::new();
    for (name, check) in &checks {
        match check() {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(reason)) => {
                println!("FAIL {name}: {reason}");
                failed.push(*name);
            }
            Err(e) => {
                println!("FAIL {name}: {e}");
                failed.push(*name);
            }
        }
    }
    println!("{}/{} checks passed", checks.len() - failed.len(), checks.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            VALIDATION,
            format!("failed checks: {}", failed.join(", ")),
        ))
    }
}
