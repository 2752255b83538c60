use proptest::prelude::*;
use varsr_core::degradation::{degrade, generate_mask_stack, DegradationSpec};
use varsr_core::kernels::{KernelFamily, KernelSampling};
use varsr_core::priors::DenoiserKind;
use varsr_core::rng::RngStream;
use varsr_core::solver::{data_prox, Init, ScheduleSpec};
use varsr_core::synth::synthetic_scene;
use varsr_core::{
    downsample, gaussian_kernel, solve, solve_exact_admm_uniform, upsample_zeropad, Hyper, Image, ScaleFactor,
    SolverConfig, VarBlurOperator,
};

fn scale(k: usize) -> ScaleFactor {
    ScaleFactor::new(k).unwrap()
}

fn random_image(rng: &mut RngStream, h: usize, w: usize) -> Image {
    Image::from_fn(h, w, 1, |_, _, _| rng.uniform())
}

fn explicit(steps: Vec<Hyper>, prior: DenoiserKind) -> SolverConfig {
    SolverConfig {
        iterations: steps.len(),
        prior,
        schedule: ScheduleSpec::Explicit(steps),
        check_step_size: false,
        ..SolverConfig::default()
    }
}

/// Dense matrix of `S·H` (rows: LR pixels, columns: HR pixels).
fn dense_sh(op: &VarBlurOperator, s: ScaleFactor) -> Vec<Vec<f64>> {
    let (h, w) = op.frame();
    let n = h * w;
    let m = n / (s.get() * s.get());
    let mut a = vec![vec![0.0; n]; m];
    for col in 0..n {
        let e = Image::from_fn(h, w, 1, |_, i, j| if i * w + j == col { 1.0 } else { 0.0 });
        let out = downsample(&op.apply(&e).unwrap(), s).unwrap();
        for (row, v) in out.data().iter().enumerate() {
            a[row][col] = *v;
        }
    }
    a
}

/// Gaussian elimination with partial pivoting.
fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - tail) / a[r][r];
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn data_prox_matches_scalar_minimizer(
        seed in any::<u64>(),
        k in 1usize..4,
        sigma in 0.001f64..0.3,
        mu in 0.01f64..100.0,
    ) {
        let s = scale(k);
        let mut rng = RngStream::new(seed);
        let (h, w) = (3 * k * 2, 2 * k * 2);
        let v = random_image(&mut rng, h, w);
        let y_up = upsample_zeropad(&random_image(&mut rng, h / k, w / k), s);
        let z = data_prox(&y_up, &v, sigma * sigma * mu, s).unwrap();
        for i in 0..h {
            for j in 0..w {
                let (vv, yy) = (v.get(0, i, j), y_up.get(0, i, j));
                // argmin_z μ/2(z−v)² + 1/(2σ²)(z−y)²
                let expect = if i % k == 0 && j % k == 0 {
                    (mu * sigma * sigma * vv + yy) / (mu * sigma * sigma + 1.0)
                } else {
                    vv
                };
                prop_assert!((z.get(0, i, j) - expect).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn exact_data_step_matches_dense_solve() {
    for (k, alpha) in [(1, 0.3), (2, 0.05), (2, 1.7), (4, 0.2)] {
        let s = scale(k);
        let op = VarBlurOperator::uniform(gaussian_kernel(1.2, 0.8, 0.4, 5).unwrap(), 8, 8).unwrap();
        let mut rng = RngStream::new(k as u64 * 31 + 7);
        let y = random_image(&mut rng, 8 / k, 8 / k);
        let cfg = explicit(
            vec![Hyper {
                gamma: 1.0,
                beta: 0.0,
                alpha,
            }],
            DenoiserKind::Identity,
        );
        // with the identity prior and one step, v_1 = argmin ½‖SHv − y‖² + α/2‖v − w‖²,  w = init
        let (v, _) = solve_exact_admm_uniform(&y, &op, s, 0.0, &cfg).unwrap();

        let w = varsr_core::upsample_nearest(&y, s);
        let a = dense_sh(&op, s);
        let n = 64;
        let mut normal = vec![vec![0.0; n]; n];
        let mut rhs: Vec<f64> = w.data().iter().map(|v| alpha * v).collect();
        for (row, yv) in a.iter().zip(y.data()) {
            for i in 0..n {
                rhs[i] += row[i] * yv;
                for j in 0..n {
                    normal[i][j] += row[i] * row[j];
                }
            }
        }
        for (i, r) in normal.iter_mut().enumerate() {
            r[i] += alpha;
        }
        let expect = Image::from_planar(8, 8, 1, dense_solve(normal, rhs)).unwrap();
        let d = v.max_abs_diff(&expect).unwrap();
        assert!(d < 1e-9, "s={k} alpha={alpha}: {d}");
    }
}

#[test]
fn identity_prior_residual_oscillates_but_converges() {
    // σ = 0, s = 1: z_k = y, so the primal residual is ‖Hx_k − y‖. Each
    // eigenmode of HHᵀ rotates while it decays, so the residual is not
    // monotone step to step.
    let op = VarBlurOperator::uniform(gaussian_kernel(1.0, 1.0, 0.0, 7).unwrap(), 32, 32).unwrap();
    let x = synthetic_scene(32, 32, 1, 3);
    let y = op.apply(&x).unwrap();
    let n = 300;
    let cfg = explicit(
        vec![
            Hyper {
                gamma: 1.0,
                beta: 0.0,
                alpha: 0.0
            };
            n
        ],
        DenoiserKind::Identity,
    );
    let (_, trace) = solve(&y, &op, scale(1), 0.0, &cfg).unwrap();
    let r = &trace.primal_residual;
    assert!(r.windows(2).any(|p| p[1] > p[0]), "expected at least one increase");
    let peak = |part: &[f64]| part.iter().cloned().fold(0.0, f64::max);
    let thirds: Vec<f64> = r.chunks(n / 3).map(peak).collect();
    assert!(thirds[1] < 0.5 * thirds[0] && thirds[2] < thirds[1], "{thirds:?}");
    assert!(r[n - 1] < 0.05 * r[0], "first {} last {}", r[0], r[n - 1]);
}

#[test]
fn identity_prior_identity_blur_reproduces_samples() {
    let s = scale(2);
    let mut rng = RngStream::new(5);
    let y = random_image(&mut rng, 10, 12);
    let op = VarBlurOperator::identity(20, 24);
    let cfg = SolverConfig {
        prior: DenoiserKind::Identity,
        iterations: 12,
        check_step_size: false,
        ..SolverConfig::default()
    };
    let (x, _) = solve(&y, &op, s, 0.0, &cfg).unwrap();
    assert_eq!(downsample(&x, s).unwrap(), y);
}

#[test]
fn tv_prior_identity_blur_converges_to_samples() {
    let s = scale(2);
    let hr = synthetic_scene(32, 32, 1, 8);
    let y = downsample(&hr, s).unwrap();
    let op = VarBlurOperator::identity(32, 32);
    let residual = |n: usize| {
        let cfg = SolverConfig {
            iterations: n,
            prior: DenoiserKind::tv(),
            schedule: ScheduleSpec::Explicit(vec![
                Hyper {
                    gamma: 1.0,
                    beta: 0.05,
                    alpha: 0.0
                };
                n
            ]),
            check_step_size: false,
            ..SolverConfig::default()
        };
        let (x, _) = solve(&y, &op, s, 0.0, &cfg).unwrap();
        downsample(&x, s).unwrap().sub(&y).unwrap().norm() / y.norm()
    };
    let (early, late) = (residual(5), residual(200));
    assert!(late < 1e-3 && late < early, "early {early} late {late}");
}

#[test]
fn zeropad_and_nearest_init_share_fixed_point_without_prior() {
    let s = scale(2);
    let op = VarBlurOperator::identity(8, 8);
    let mut rng = RngStream::new(6);
    let y = random_image(&mut rng, 4, 4);
    for init in [Init::Nearest, Init::Zeropad] {
        let cfg = SolverConfig {
            init,
            prior: DenoiserKind::Identity,
            iterations: 3,
            check_step_size: false,
            ..SolverConfig::default()
        };
        let (x, _) = solve(&y, &op, s, 0.0, &cfg).unwrap();
        assert_eq!(downsample(&x, s).unwrap(), y);
    }
}

#[test]
fn degrade_without_noise_is_blur_then_decimate() {
    let mut rng = RngStream::new(21);
    let sampling = KernelSampling {
        family: KernelFamily::Mixed,
        size: 9,
        motion_length: (3, 8),
        ..KernelSampling::default()
    };
    for k in 1..=4 {
        let n = 12 * k;
        let kernels = (0..3).map(|_| sampling.sample(&mut rng).unwrap()).collect();
        let masks = generate_mask_stack(n, n, 3, 2.0, rng.next_u64()).unwrap();
        let op = VarBlurOperator::new(kernels, masks).unwrap();
        let x = synthetic_scene(n, n, 2, k as u64);
        let expect = downsample(&op.apply(&x).unwrap(), scale(k)).unwrap();
        let spec = DegradationSpec::new(op, scale(k), 0.0, 99).unwrap();
        assert_eq!(degrade(&x, &spec).unwrap(), expect);
    }
}

#[test]
fn degradation_noise_is_zero_mean_with_requested_spread() {
    let sigma = 0.1;
    let (h, w) = (4, 4);
    let fields = 10_000;
    let zero = Image::zeros(h, w, 1);
    let mut sum = vec![0.0; h * w];
    let mut sq = 0.0;
    for seed in 0..fields {
        let spec = DegradationSpec::new(VarBlurOperator::identity(h, w), scale(1), sigma, seed).unwrap();
        let y = degrade(&zero, &spec).unwrap();
        for (acc, v) in sum.iter_mut().zip(y.data()) {
            *acc += v;
            sq += v * v;
        }
    }
    let se = sigma / (fields as f64).sqrt();
    for acc in &sum {
        let mean = acc / fields as f64;
        assert!(mean.abs() < 5.0 * se, "pixel mean {mean}");
    }
    let total = (fields as usize * h * w) as f64;
    let std = (sq / total).sqrt();
    assert!((std - sigma).abs() < 0.01 * sigma, "std {std}");
}

#[test]
fn degradation_noise_is_reproducible_and_seed_dependent() {
    let x = synthetic_scene(16, 16, 1, 1);
    let spec = |seed| DegradationSpec::new(VarBlurOperator::identity(16, 16), scale(2), 0.05, seed).unwrap();
    assert_eq!(degrade(&x, &spec(4)).unwrap(), degrade(&x, &spec(4)).unwrap());
    assert_ne!(degrade(&x, &spec(4)).unwrap(), degrade(&x, &spec(5)).unwrap());
}

#[test]
fn solver_is_deterministic() {
    let s = scale(2);
    let mut rng = RngStream::new(30);
    let sampling = KernelSampling::default();
    let kernels = (0..3).map(|_| sampling.sample(&mut rng).unwrap()).collect();
    let masks = generate_mask_stack(48, 48, 3, 3.0, 8).unwrap();
    let op = VarBlurOperator::new(kernels, masks).unwrap();
    let x = synthetic_scene(48, 48, 1, 2);
    let y = degrade(&x, &DegradationSpec::new(op.clone(), s, 0.01, 3).unwrap()).unwrap();
    let cfg = SolverConfig {
        check_step_size: false,
        ..SolverConfig::default()
    };
    let (a, ta) = solve(&y, &op, s, 0.01, &cfg).unwrap();
    let (b, tb) = solve(&y, &op, s, 0.01, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(ta.to_csv(), tb.to_csv());
}
