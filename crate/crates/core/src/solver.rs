//! Plug-and-play ADMM for super-resolution under a spatially-varying blur.
//!
//! [`solve`] runs the linearized scheme: with the splitting `z = Hx`, the
//! coupling term is replaced by a gradient step so that `H` is only ever
//! applied, never inverted. Each iteration performs
//!
//! ```text
//! x ← P_β(x − γ·Hᵀ(Hx − z + u))        prior step
//! z ← prox of the data term at Hx + u   closed form, pixelwise
//! u ← u + Hx − z                        dual update
//! ```
//!
//! [`solve_exact_admm_uniform`] is the classical scheme whose data step is
//! the exact prox of `z ↦ g(Hz)`, only tractable when `H` is a single
//! convolution (it is then diagonalized by the FFT).
//!
//! A [`Hyper`] triplet `(γ, β, α)` encodes `γ = μ/ρ`, `β = √(λ/ρ)` and
//! `α = σ²μ`.

use std::fmt::Write as _;
use std::path::PathBuf;

use log::warn;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::image::{downsample, upsample_nearest, upsample_zeropad, Image, ScaleFactor};
use crate::operator::VarBlurOperator;
use crate::priors::{denoise, DenoiserKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub gamma: f64,
    pub beta: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperSchedule(Vec<Hyper>);

impl HyperSchedule {
    pub fn new(steps: Vec<Hyper>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::Config("schedule must have at least one step".into()));
        }
        for (k, h) in steps.iter().enumerate() {
            if !(h.gamma > 0.0 && h.gamma <= 1.0) {
                return Err(Error::Config(format!("step {k}: gamma {} not in (0, 1]", h.gamma)));
            }
            if !(h.beta >= 0.0 && h.beta.is_finite()) {
                return Err(Error::Config(format!("step {k}: beta {} must be >= 0", h.beta)));
            }
            if !(h.alpha >= 0.0 && h.alpha.is_finite()) {
                return Err(Error::Config(format!("step {k}: alpha {} must be >= 0", h.alpha)));
            }
        }
        Ok(HyperSchedule(steps))
    }

    pub fn steps(&self) -> &[Hyper] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Rule that stands in for a learned hyper-parameter predictor: denoiser
/// levels decay geometrically from `beta_start` to `beta_end`, the step
/// `gamma` is constant, and `alpha = σ²·γ·λ/β²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AutoSchedule {
    pub beta_start: f64,
    /// Defaults to `max(σ, 1/255)`.
    pub beta_end: Option<f64>,
    pub gamma: f64,
    pub lambda: f64,
}

impl Default for AutoSchedule {
    fn default() -> Self {
        AutoSchedule {
            beta_start: 49.0 / 255.0,
            beta_end: None,
            gamma: 0.9,
            lambda: 3.0,
        }
    }
}

impl AutoSchedule {
    pub fn build(&self, sigma: f64, iterations: usize) -> Result<HyperSchedule> {
        if iterations == 0 {
            return Err(Error::Config("iteration count must be >= 1".into()));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        let end = self.beta_end.unwrap_or(sigma.max(1.0 / 255.0));
        if !(end > 0.0) {
            return Err(Error::Config(format!("beta_end must be > 0, got {end}")));
        }
        let start = self.beta_start.max(end);
        let steps = (0..iterations)
            .map(|k| {
                let t = if iterations == 1 {
                    1.0
                } else {
                    k as f64 / (iterations - 1) as f64
                };
                let beta = start * (end / start).powf(t);
                let rho = self.lambda / (beta * beta);
                let mu = self.gamma * rho;
                Hyper {
                    gamma: self.gamma,
                    beta,
                    alpha: sigma * sigma * mu,
                }
            })
            .collect();
        HyperSchedule::new(steps)
    }
}

/// Default schedule for noise level `sigma` (intensity units). The rule does
/// not currently depend on the scale factor.
pub fn default_schedule(sigma: f64, _scale: ScaleFactor, iterations: usize) -> Result<HyperSchedule> {
    AutoSchedule::default().build(sigma, iterations)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleSpec {
    Auto(AutoSchedule),
    Explicit(Vec<Hyper>),
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec::Auto(AutoSchedule::default())
    }
}

impl ScheduleSpec {
    pub fn resolve(&self, sigma: f64, iterations: usize) -> Result<HyperSchedule> {
        match self {
            ScheduleSpec::Auto(rule) => rule.build(sigma, iterations),
            ScheduleSpec::Explicit(steps) => {
                if steps.len() != iterations {
                    return Err(Error::Config(format!(
                        "explicit schedule has {} steps for {iterations} iterations",
                        steps.len()
                    )));
                }
                HyperSchedule::new(steps.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    #[default]
    Nearest,
    Zeropad,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub iterations: usize,
    pub init: Init,
    pub prior: DenoiserKind,
    pub schedule: ScheduleSpec,
    /// CSV destination for the per-iteration residual log.
    pub trace: Option<PathBuf>,
    /// Keep every iterate `x_k` in the trace.
    pub snapshots: bool,
    /// Estimate `‖H‖₂` before iterating and warn when it exceeds one.
    pub check_step_size: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            iterations: 8,
            init: Init::Nearest,
            prior: DenoiserKind::default(),
            schedule: ScheduleSpec::default(),
            trace: None,
            snapshots: false,
            check_step_size: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be >= 1".into()));
        }
        self.prior.validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveTrace {
    pub primal_residual: Vec<f64>,
    pub dual_norm: Vec<f64>,
    /// `½σ⁻²‖(Hx)↓ − y‖²`, or the unweighted `½‖(Hx)↓ − y‖²` when `σ = 0`.
    pub data_fidelity: Vec<f64>,
    pub snapshots: Vec<Image>,
}

impl SolveTrace {
    pub fn len(&self) -> usize {
        self.primal_residual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primal_residual.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,primal_residual,dual_norm,data_fidelity\n");
        for k in 0..self.len() {
            let _ = writeln!(
                out,
                "{},{:.12e},{:.12e},{:.12e}",
                k + 1,
                self.primal_residual[k],
                self.dual_norm[k],
                self.data_fidelity[k]
            );
        }
        out
    }

    fn record(&mut self, primal: f64, dual: f64, fidelity: f64, snapshot: Option<&Image>) {
        self.primal_residual.push(primal);
        self.dual_norm.push(dual);
        self.data_fidelity.push(fidelity);
        if let Some(x) = snapshot {
            self.snapshots.push(x.clone());
        }
    }
}

fn check_problem(y: &Image, op: &VarBlurOperator, s: ScaleFactor, sigma: f64) -> Result<()> {
    let (h, w) = op.frame();
    let k = s.get();
    if (y.height() * k, y.width() * k) != (h, w) {
        return Err(Error::mismatch(
            format!("{}x{} observation for a {h}x{w} frame at {s}", h / k, w / k),
            format!("{}x{}", y.height(), y.width()),
        ));
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be >= 0, got {sigma}")));
    }
    Ok(())
}

pub fn initial_estimate(y: &Image, s: ScaleFactor, init: Init) -> Image {
    match init {
        Init::Nearest => upsample_nearest(y, s),
        Init::Zeropad => upsample_zeropad(y, s),
    }
}

/// Proximal map of `z ↦ (1/2σ²)‖z↓s − y‖²` with weight `1/μ`, evaluated at
/// `v`, written with `α = σ²μ`: on the sampling grid
/// `z = (y↑s + α·v)/(α + 1)`, elsewhere `z = v`.
pub fn data_prox(y_up: &Image, v: &Image, alpha: f64, s: ScaleFactor) -> Result<Image> {
    y_up.check_same_shape(v)?;
    let s = s.get();
    let mut z = v.clone();
    let denom = alpha + 1.0;
    for c in 0..v.channels() {
        for i in (0..v.height()).step_by(s) {
            for j in (0..v.width()).step_by(s) {
                z.set(c, i, j, (y_up.get(c, i, j) + alpha * v.get(c, i, j)) / denom);
            }
        }
    }
    Ok(z)
}

fn data_fidelity(hx: &Image, y: &Image, s: ScaleFactor, sigma: f64) -> Result<f64> {
    let r = downsample(hx, s)?.sub(y)?;
    let e = 0.5 * r.dot(&r)?;
    Ok(if sigma > 0.0 { e / (sigma * sigma) } else { e })
}

fn warn_on_large_norm(op: &VarBlurOperator) {
    let norm = op.operator_norm_estimate();
    if norm > 1.0 + 1e-3 {
        warn!("operator norm estimate {norm:.4} exceeds 1; gamma <= 1 no longer guarantees a descent step");
    }
}

/// Linearized plug-and-play ADMM. Returns `x_N` and the per-iteration trace.
pub fn solve(
    y: &Image,
    op: &VarBlurOperator,
    s: ScaleFactor,
    sigma: f64,
    cfg: &SolverConfig,
) -> Result<(Image, SolveTrace)> {
    check_problem(y, op, s, sigma)?;
    cfg.validate()?;
    let schedule = cfg.schedule.resolve(sigma, cfg.iterations)?;
    if cfg.check_step_size {
        warn_on_large_norm(op);
    }

    let y_up = upsample_zeropad(y, s);
    let mut x = initial_estimate(y, s, cfg.init);
    let mut hx = op.apply(&x)?;
    let mut z = hx.clone();
    let mut u = Image::zeros(x.height(), x.width(), x.channels());
    let mut trace = SolveTrace::default();

    for step in schedule.steps() {
        // x-update: gradient step on ½‖Hx − z + u‖², then the denoiser
        let mut r = hx.sub(&z)?;
        r.axpy(1.0, &u)?;
        let grad = op.apply_adjoint(&r)?;
        let mut v = x;
        v.axpy(-step.gamma, &grad)?;
        x = denoise(&cfg.prior, &v, step.beta)?;
        hx = op.apply(&x)?;

        let mut target = hx.clone();
        target.axpy(1.0, &u)?;
        z = data_prox(&y_up, &target, step.alpha, s)?;

        let gap = hx.sub(&z)?;
        u.axpy(1.0, &gap)?;

        trace.record(
            gap.norm(),
            u.norm(),
            data_fidelity(&hx, y, s, sigma)?,
            cfg.snapshots.then_some(&x),
        );
    }
    Ok((x, trace))
}

/// Frequency-domain solver for `(αI + HᵀSᵀSH) v = HᵀSᵀy + αw` when `H` is a
/// single circular convolution and `S` decimates by `s`.
struct UniformDataProx {
    s: ScaleFactor,
    lr_fft: Fft2,
    /// `(1/s²)·Σ |K̂|²` over the `s²` HR frequencies aliasing to each LR bin.
    aliased_power: Vec<f64>,
}

impl UniformDataProx {
    fn new(op: &VarBlurOperator, s: ScaleFactor) -> Self {
        let (h, w) = op.frame();
        let k = s.get();
        let (lh, lw) = (h / k, w / k);
        let spectrum = op.spectrum(0);
        let mut aliased_power = vec![0.0; lh * lw];
        for a in 0..lh {
            for b in 0..lw {
                let mut acc = 0.0;
                for r1 in 0..k {
                    for r2 in 0..k {
                        acc += spectrum[(a + r1 * lh) * w + b + r2 * lw].norm_sqr();
                    }
                }
                aliased_power[a * lw + b] = acc / (k * k) as f64;
            }
        }
        UniformDataProx {
            s,
            lr_fft: Fft2::new(lh, lw),
            aliased_power,
        }
    }

    /// `v = w + HᵀSᵀ(α + SHHᵀSᵀ)⁻¹(y − SHw)`, which stays well defined at
    /// `α = 0`. Frequencies where `α + Λ` vanishes are left untouched.
    fn apply(&self, op: &VarBlurOperator, y: &Image, w: &Image, alpha: f64) -> Result<Image> {
        let residual = y.sub(&downsample(&op.apply(w)?, self.s)?)?;
        let mut corrected = Image::zeros(y.height(), y.width(), y.channels());
        for (src, dst) in residual.planes().zip(corrected.planes_mut()) {
            let mut spec = self.lr_fft.forward_real(src);
            for (f, &p) in spec.iter_mut().zip(&self.aliased_power) {
                let d = alpha + p;
                *f = if d > 1e-12 { *f / d } else { Complex64::default() };
            }
            dst.copy_from_slice(&self.lr_fft.inverse_real(spec));
        }
        let back = op.apply_adjoint(&upsample_zeropad(&corrected, self.s))?;
        w.add(&back)
    }
}

/// Classical PnP-ADMM with the exact data prox, for a uniform blur.
///
/// A schedule triplet is read as the same `(λ, μ, ρ)` as in [`solve`], so
/// the prior step here runs at level `√(λ/μ) = β/√γ` and the data step uses
/// the same `α`; both schemes then target the same MAP problem. Returns the
/// final data-step iterate `v_N`.
pub fn solve_exact_admm_uniform(
    y: &Image,
    op: &VarBlurOperator,
    s: ScaleFactor,
    sigma: f64,
    cfg: &SolverConfig,
) -> Result<(Image, SolveTrace)> {
    if !op.is_uniform() {
        return Err(Error::InvalidParameter(format!(
            "exact ADMM needs a uniform blur, operator has {} components",
            op.components()
        )));
    }
    check_problem(y, op, s, sigma)?;
    cfg.validate()?;
    let schedule = cfg.schedule.resolve(sigma, cfg.iterations)?;
    let prox = UniformDataProx::new(op, s);

    let mut v = initial_estimate(y, s, cfg.init);
    let mut u = Image::zeros(v.height(), v.width(), v.channels());
    let mut trace = SolveTrace::default();
    for step in schedule.steps() {
        let level = step.beta / step.gamma.sqrt();
        let x = denoise(&cfg.prior, &v.sub(&u)?, level)?;
        let w = x.add(&u)?;
        v = prox.apply(op, y, &w, step.alpha)?;
        let gap = x.sub(&v)?;
        u.axpy(1.0, &gap)?;
        let hv = op.apply(&v)?;
        trace.record(
            gap.norm(),
            u.norm(),
            data_fidelity(&hv, y, s, sigma)?,
            cfg.snapshots.then_some(&v),
        );
    }
    Ok((v, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{delta_kernel, gaussian_kernel};
    use crate::rng::RngStream;
    use crate::synth::synthetic_scene;

    fn s(k: usize) -> ScaleFactor {
        ScaleFactor::new(k).unwrap()
    }

    fn random(h: usize, w: usize, c: usize, seed: u64) -> Image {
        let mut rng = RngStream::new(seed);
        Image::from_fn(h, w, c, |_, _, _| rng.uniform())
    }

    fn quiet(cfg: SolverConfig) -> SolverConfig {
        SolverConfig {
            check_step_size: false,
            ..cfg
        }
    }

    #[test]
    fn data_prox_scalar_case() {
        let y = Image::filled(1, 1, 1, 1.0);
        let v = Image::filled(1, 1, 1, 0.0);
        let z = data_prox(&y, &v, 1.0, s(1)).unwrap();
        assert_eq!(z.data(), &[0.5]);
    }

    #[test]
    fn data_prox_passes_through_off_grid() {
        let y = upsample_zeropad(&random(3, 3, 1, 0), s(3));
        let v = random(9, 9, 1, 1);
        let z = data_prox(&y, &v, 0.0, s(3)).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if i % 3 == 0 && j % 3 == 0 {
                    y.get(0, i, j)
                } else {
                    v.get(0, i, j)
                };
                assert_eq!(z.get(0, i, j), expect);
            }
        }
    }

    #[test]
    fn schedule_boundaries() {
        let one = default_schedule(0.01, s(2), 1).unwrap();
        assert_eq!(one.len(), 1);
        let h = one.steps()[0];
        assert_eq!(h.gamma, 0.9);
        assert!((h.beta - 0.01).abs() < 1e-15);
        assert!((h.alpha - 0.9 * 3.0).abs() < 1e-12);

        let noiseless = default_schedule(0.0, s(2), 8).unwrap();
        assert!(noiseless.steps().iter().all(|h| h.alpha == 0.0));
        assert!((noiseless.steps()[7].beta - 1.0 / 255.0).abs() < 1e-15);
        assert!((noiseless.steps()[0].beta - 49.0 / 255.0).abs() < 1e-15);

        let sched = default_schedule(5.0 / 255.0, s(3), 12).unwrap();
        for pair in sched.steps().windows(2) {
            assert!(pair[1].beta <= pair[0].beta);
        }
        // very noisy input: start is clamped up to the end level
        let flat = default_schedule(0.5, s(1), 4).unwrap();
        assert!(flat.steps().iter().all(|h| (h.beta - 0.5).abs() < 1e-15));
    }

    #[test]
    fn schedule_validation() {
        let bad = Hyper {
            gamma: 1.5,
            beta: 0.1,
            alpha: 0.0,
        };
        assert!(HyperSchedule::new(vec![bad]).is_err());
        assert!(HyperSchedule::new(vec![]).is_err());
        let spec = ScheduleSpec::Explicit(vec![Hyper {
            gamma: 0.5,
            beta: 0.1,
            alpha: 0.0,
        }]);
        assert!(spec.resolve(0.0, 2).is_err());
        assert!(spec.resolve(0.0, 1).is_ok());
    }

    #[test]
    fn identity_problem_is_solved_in_one_step() {
        let y = random(8, 8, 3, 4);
        let op = VarBlurOperator::identity(8, 8);
        let cfg = quiet(SolverConfig {
            iterations: 1,
            prior: DenoiserKind::Identity,
            ..SolverConfig::default()
        });
        let (x, trace) = solve(&y, &op, s(1), 0.0, &cfg).unwrap();
        assert!(x.max_abs_diff(&y).unwrap() <= 1e-8);
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn dimension_mismatch() {
        let op = VarBlurOperator::identity(8, 8);
        let cfg = quiet(SolverConfig::default());
        assert!(solve(&Image::zeros(3, 4, 1), &op, s(2), 0.0, &cfg).is_err());
        assert!(solve(&Image::zeros(4, 4, 1), &op, s(2), -1.0, &cfg).is_err());
        assert!(solve_exact_admm_uniform(&Image::zeros(3, 4, 1), &op, s(2), 0.0, &cfg).is_err());
    }

    #[test]
    fn trace_lengths_and_csv() {
        let x = synthetic_scene(16, 16, 1, 2);
        let op = VarBlurOperator::uniform(gaussian_kernel(1.0, 1.0, 0.0, 5).unwrap(), 16, 16).unwrap();
        let y = downsample(&op.apply(&x).unwrap(), s(2)).unwrap();
        let cfg = quiet(SolverConfig {
            iterations: 5,
            snapshots: true,
            ..SolverConfig::default()
        });
        let (_, trace) = solve(&y, &op, s(2), 0.01, &cfg).unwrap();
        assert_eq!(trace.len(), 5);
        assert_eq!(trace.dual_norm.len(), 5);
        assert_eq!(trace.data_fidelity.len(), 5);
        assert_eq!(trace.snapshots.len(), 5);
        let csv = trace.to_csv();
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with("k,primal_residual,dual_norm,data_fidelity\n1,"));
    }

    #[test]
    fn solve_is_deterministic() {
        let x = synthetic_scene(24, 24, 3, 8);
        let op = VarBlurOperator::uniform(gaussian_kernel(1.4, 0.8, 0.3, 7).unwrap(), 24, 24).unwrap();
        let y = downsample(&op.apply(&x).unwrap(), s(2)).unwrap();
        let cfg = quiet(SolverConfig::default());
        let a = solve(&y, &op, s(2), 0.0, &cfg).unwrap();
        let b = solve(&y, &op, s(2), 0.0, &cfg).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn exact_prox_single_scale_matches_wiener_form() {
        // s = 1: v̂ = (α·ŵ + conj(K̂)·ŷ) / (|K̂|² + α)
        let k = gaussian_kernel(1.2, 0.9, 0.5, 5).unwrap();
        let op = VarBlurOperator::uniform(k, 8, 8).unwrap();
        let y = random(8, 8, 1, 1);
        let w = random(8, 8, 1, 2);
        let alpha = 0.3;
        let v = UniformDataProx::new(&op, s(1)).apply(&op, &y, &w, alpha).unwrap();
        let f = Fft2::new(8, 8);
        let (yh, wh) = (f.forward_real(y.data()), f.forward_real(w.data()));
        let spec: Vec<Complex64> = (0..64)
            .map(|i| {
                let kh = op.spectrum(0)[i];
                (wh[i] * alpha + kh.conj() * yh[i]) / (kh.norm_sqr() + alpha)
            })
            .collect();
        let expect = f.inverse_real(spec);
        for (a, b) in v.data().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_admm_rejects_nonuniform() {
        let d = delta_kernel(1).unwrap();
        let m = crate::degradation::generate_mask_stack(8, 8, 2, 1.0, 0).unwrap();
        let op = VarBlurOperator::new(vec![d.clone(), d], m).unwrap();
        let cfg = quiet(SolverConfig::default());
        assert!(solve_exact_admm_uniform(&Image::zeros(8, 8, 1), &op, s(1), 0.0, &cfg).is_err());
    }

    #[test]
    fn exact_admm_delta_noiseless_returns_observation() {
        let y = random(10, 10, 1, 3);
        let op = VarBlurOperator::uniform(delta_kernel(3).unwrap(), 10, 10).unwrap();
        let cfg = quiet(SolverConfig::default());
        let (v, _) = solve_exact_admm_uniform(&y, &op, s(1), 0.0, &cfg).unwrap();
        assert!(v.max_abs_diff(&y).unwrap() < 1e-12);
    }

    #[test]
    fn config_json() {
        let cfg: SolverConfig = serde_json::from_str(
            r#"{"iterations": 12, "init": "zeropad", "prior": {"kind": "dct", "block": 16},
                "schedule": {"auto": {"gamma": 0.8}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.iterations, 12);
        assert_eq!(cfg.init, Init::Zeropad);
        match cfg.schedule {
            ScheduleSpec::Auto(a) => {
                assert_eq!(a.gamma, 0.8);
                assert_eq!(a.lambda, 3.0);
            }
            _ => panic!(),
        }
        let cfg: SolverConfig = serde_json::from_str(
            r#"{"iterations": 1, "schedule": {"explicit": [{"gamma": 1.0, "beta": 0.0, "alpha": 0.0}]}}"#,
        )
        .unwrap();
        assert!(matches!(cfg.schedule, ScheduleSpec::Explicit(ref v) if v.len() == 1));
        assert!(serde_json::from_str::<SolverConfig>(r#"{"iterationz": 3}"#).is_err());
    }
}
