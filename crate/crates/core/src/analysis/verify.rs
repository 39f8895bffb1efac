//! Cross-route verification checks with pass/fail reporting.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::analysis::{
    classify, default_r_grid, run_sweep, ClassLabel, SweepOptions, SweepResult, SweepRoute,
};
use crate::asymptotics::{alpha_coefficient, bessel_asymptotic_check, ratio_series_eval};
use crate::error::{Error, Result};
use crate::kernels::{
    correlation_determinant, hermitized_kernel, kernel_eval, kernel_series_partial, ComplexPoint,
    KernelSpec,
};
use crate::montecarlo::{estimate_moments, McConfig};
use crate::specfun::{bessel_i_scaled, gamma_prefactor, laguerre, regularized_lower_gamma};
use crate::window::{
    c_constant, mean_ball, polydisk_limit_constant, polydisk_moments, ratio_ball_closed,
    variance_ball_closed, variance_ball_integral,
};

/// Named verification checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    BallRoutes,
    GinibreConstant,
    HeisenbergConstant,
    AsymptoticSeries,
    AlphaCoefficients,
    SpectrumRoute,
    LevelConstants,
    LevelLimits,
    KernelSeries,
    GaugeInvariance,
    MonteCarlo,
    Classification,
    SpecialFunctions,
}

impl CheckId {
    pub const ALL: [CheckId; 13] = [
        CheckId::BallRoutes,
        CheckId::GinibreConstant,
        CheckId::HeisenbergConstant,
        CheckId::AsymptoticSeries,
        CheckId::AlphaCoefficients,
        CheckId::SpectrumRoute,
        CheckId::LevelConstants,
        CheckId::LevelLimits,
        CheckId::KernelSeries,
        CheckId::GaugeInvariance,
        CheckId::MonteCarlo,
        CheckId::Classification,
        CheckId::SpecialFunctions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::BallRoutes => "ball-routes",
            CheckId::GinibreConstant => "ginibre-constant",
            CheckId::HeisenbergConstant => "heisenberg-constant",
            CheckId::AsymptoticSeries => "asymptotic-series",
            CheckId::AlphaCoefficients => "alpha-coefficients",
            CheckId::SpectrumRoute => "spectrum-route",
            CheckId::LevelConstants => "level-constants",
            CheckId::LevelLimits => "level-limits",
            CheckId::KernelSeries => "kernel-series",
            CheckId::GaugeInvariance => "gauge-invariance",
            CheckId::MonteCarlo => "monte-carlo",
            CheckId::Classification => "classification",
            CheckId::SpecialFunctions => "special-functions",
        }
    }
}

impl std::fmt::Display for CheckId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CheckId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown check {s:?}")))
    }
}

/// Tolerance settings. Every check tolerance is multiplied by `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub scale: f64,
    pub mc_replicas: u64,
    pub seed: u64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            scale: 1.0,
            mc_replicas: 100_000,
            seed: 20_240_601,
        }
    }
}

impl ToleranceProfile {
    fn tol(&self, base: f64) -> f64 {
        base * self.scale
    }
}

/// Outcome of one check. `worst` is the largest error normalized by its
/// tolerance; the check passes when it is at most 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Largest normalized error over a set of comparisons.
#[derive(Default)]
struct Tally {
    worst: f64,
    worst_item: String,
}

impl Tally {
    fn record(&mut self, label: impl FnOnce() -> String, err: f64, tol: f64) {
        let normalized = if err.is_nan() {
            f64::INFINITY
        } else if tol > 0.0 {
            err / tol
        } else if err == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        if normalized > self.worst || self.worst_item.is_empty() {
            self.worst = normalized;
            self.worst_item = format!("{}: error {err:.3e}, tolerance {tol:.3e}", label());
        }
    }

    fn finish(self, id: CheckId) -> CheckResult {
        CheckResult {
            name: id.name().into(),
            passed: self.worst <= 1.0,
            worst: self.worst,
            detail: self.worst_item,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn check_ball_routes(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut t = Tally::default();
    for d in 1..=3 {
        for r in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let closed = variance_ball_closed(d, r)?;
            let integral = variance_ball_integral(d, r, 1e-8)?;
            t.record(
                || format!("D={d} R={r}"),
                rel(integral, closed),
                p.tol(1e-6),
            );
        }
    }
    Ok(t.finish(CheckId::BallRoutes))
}

fn check_ball_constants(p: &ToleranceProfile, dims: &[usize], id: CheckId) -> Result<CheckResult> {
    let mut t = Tally::default();
    let r = 50.0;
    for &d in dims {
        let target = d as f64 / PI.sqrt();
        t.record(
            || format!("D={d} R={r}"),
            rel(r * ratio_ball_closed(d, r)?, target),
            p.tol(0.02),
        );
    }
    Ok(t.finish(id))
}

fn check_asymptotic_series(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut t = Tally::default();
    for d in 1..=3u32 {
        for r in [5.0, 10.0, 20.0] {
            let exact = ratio_ball_closed(d as usize, r)?;
            let s = ratio_series_eval(d, r, 3)?;
            t.record(
                || format!("D={d} R={r} K=3"),
                (s.value - exact).abs(),
                p.tol(s.first_omitted),
            );
        }
    }
    Ok(t.finish(CheckId::AsymptoticSeries))
}

fn check_alpha(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut t = Tally::default();
    for d in 1..=6u32 {
        let two_d = 2.0 * d as f64;
        t.record(
            || format!("alpha_1({d})"),
            (alpha_coefficient(1, d) - (two_d - 1.0) * (two_d + 1.0)).abs(),
            p.tol(0.0),
        );
    }
    t.record(
        || "alpha_2(1)".into(),
        (alpha_coefficient(2, 1) + 15.0).abs(),
        p.tol(0.0),
    );
    Ok(t.finish(CheckId::AlphaCoefficients))
}

fn check_spectrum_route(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut t = Tally::default();
    let spec = KernelSpec::heisenberg(1)?;
    for r in [1.0, 2.0, 5.0, 10.0] {
        let rep = polydisk_moments(&spec, r, 1e-10)?;
        t.record(
            || format!("mean R={r}"),
            rel(rep.mean, mean_ball(1, r)?),
            p.tol(1e-6),
        );
        t.record(
            || format!("variance R={r}"),
            rel(rep.variance, variance_ball_closed(1, r)?),
            p.tol(1e-6),
        );
    }
    Ok(t.finish(CheckId::SpectrumRoute))
}

fn check_level_constants(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut t = Tally::default();
    let c0 = 1.0 / PI.sqrt();
    t.record(|| "C(0)".into(), (c_constant(0)? - c0).abs(), p.tol(1e-12));
    t.record(
        || "C(1)".into(),
        (c_constant(1)? - 1.75 * c0).abs(),
        p.tol(1e-12),
    );
    let growth = c_constant(1000)? / (8.0 / (PI * PI) * 1000f64.sqrt());
    t.record(
        || "C(1000)/((8/pi^2) sqrt(1000))".into(),
        (growth - 1.0).abs(),
        p.tol(0.02),
    );
    Ok(t.finish(CheckId::LevelConstants))
}

fn check_level_limits(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut t = Tally::default();
    let r = 50.0;
    let cases: [(usize, &[u32]); 5] = [
        (1, &[1]),
        (1, &[2]),
        (2, &[0, 1]),
        (2, &[1, 1]),
        (3, &[0, 1, 2]),
    ];
    for (d, level) in cases {
        let spec = KernelSpec::new(d, level.to_vec())?;
        let rep = polydisk_moments(&spec, r, 1e-9)?;
        let limit = polydisk_limit_constant(&spec)?;
        t.record(
            || format!("level {level:?} R={r}"),
            rel(r * rep.ratio, limit),
            p.tol(0.03),
        );
    }
    Ok(t.finish(CheckId::LevelLimits))
}

fn disk_point<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    let rho = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, 2.0 * PI * rng.random::<f64>())
}

fn check_kernel_series(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut t = Tally::default();
    for m in 0..=5u32 {
        let spec = KernelSpec::new(1, vec![m])?;
        let m_fact: f64 = (1..=m).map(f64::from).product();
        for _ in 0..20 {
            let x = disk_point(&mut rng, 2.0);
            let y = disk_point(&mut rng, 2.0);
            let closed = kernel_eval(
                &spec,
                &ComplexPoint::from_complex(&[x])?,
                &ComplexPoint::from_complex(&[y])?,
            )? / m_fact;
            let series = kernel_series_partial(m, x, y, 100)?;
            t.record(
                || format!("m={m} x={x} y={y}"),
                (series - closed).norm(),
                p.tol(1e-10),
            );
        }
    }
    Ok(t.finish(CheckId::KernelSeries))
}

fn check_gauge(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0x6A09_E667);
    let mut t = Tally::default();
    for trial in 0..100 {
        let d = rng.random_range(1..=3usize);
        let level: Vec<u32> = (0..d).map(|_| rng.random_range(0..=3)).collect();
        let spec = KernelSpec::new(d, level)?;
        let n = rng.random_range(1..=6usize);
        let points: Vec<ComplexPoint> = (0..n)
            .map(|_| {
                let coords: Vec<Complex64> = (0..d).map(|_| disk_point(&mut rng, 2.0)).collect();
                ComplexPoint::from_complex(&coords)
            })
            .collect::<Result<_>>()?;
        // unimodular f(x) = exp(i (a·Re x + b·Im x + c |x|²))
        let a: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let b: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        let c: f64 = rng.random_range(-1.0..1.0);
        let phase = |x: &ComplexPoint| {
            let theta: f64 = (0..d)
                .map(|l| a[l] * x.re()[l] + b[l] * x.im()[l])
                .sum::<f64>()
                + c * x.norm_sqr();
            Complex64::from_polar(1.0, theta)
        };
        let plain = correlation_determinant(&points, |x, y| hermitized_kernel(&spec, x, y))?;
        let gauged = correlation_determinant(&points, |x, y| {
            Ok(phase(x) * hermitized_kernel(&spec, x, y)? * phase(y).conj())
        })?;
        t.record(
            || format!("trial {trial} (D={d}, n={n})"),
            (gauged - plain).norm() / plain.norm(),
            p.tol(1e-9),
        );
    }
    Ok(t.finish(CheckId::GaugeInvariance))
}

/// Level tuples with entries at most `max_level` in dimension `d`.
fn level_grid(d: usize, max_level: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=max_level).map(move |m| {
                    let mut v = prefix.clone();
                    v.push(m);
                    v
                })
            })
            .collect();
    }
    out
}

fn check_monte_carlo(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut cells = 0usize;
    let mut within = 0usize;
    let mut worst = String::new();
    let mut worst_z = 0.0f64;
    let z_bound = p.tol(3.0);
    let mut index = 0u64;
    for d in 1..=2usize {
        for level in level_grid(d, 2) {
            let spec = KernelSpec::new(d, level.clone())?;
            for r in [1.0, 3.0, 5.0] {
                let exact = polydisk_moments(&spec, r, 1e-10)?;
                let cfg = McConfig::new(p.mc_replicas, p.seed.wrapping_add(index), 1e-12)?;
                index += 1;
                let est = estimate_moments(&spec, r, &cfg)?;
                let z_mean = (est.mean_hat - exact.mean).abs() / est.se_mean;
                let z_var = (est.var_hat - exact.variance).abs() / est.se_var;
                let z = z_mean.max(z_var);
                cells += 1;
                if z <= z_bound && est.var_hat < est.mean_hat {
                    within += 1;
                }
                if z > worst_z || worst.is_empty() {
                    worst_z = z;
                    worst = format!("level {level:?} R={r}: z_mean {z_mean:.2}, z_var {z_var:.2}");
                }
            }
        }
    }
    let spec = KernelSpec::new(2, vec![0, 1])?;
    let cfg = McConfig::new(p.mc_replicas.min(20_000), p.seed, 1e-12)?;
    let reproducible = estimate_moments(&spec, 3.0, &cfg)? == estimate_moments(&spec, 3.0, &cfg)?;
    let fraction = within as f64 / cells as f64;
    let failing = 1.0 - fraction;
    let worst_norm = if reproducible {
        failing / 0.05
    } else {
        f64::INFINITY
    };
    Ok(CheckResult {
        name: CheckId::MonteCarlo.name().into(),
        passed: fraction >= 0.95 && reproducible,
        worst: worst_norm,
        detail: format!(
            "{within}/{cells} cells within {z_bound} standard errors, reproducible: {reproducible}; worst {worst}"
        ),
    })
}

fn check_classification(p: &ToleranceProfile) -> Result<CheckResult> {
    let grid = default_r_grid();
    let mut t = Tally::default();
    let mut labels_ok = true;
    let mut labels = Vec::new();
    for d in 1..=3usize {
        let sweep = run_sweep(
            &KernelSpec::heisenberg(d)?,
            crate::window::WindowKind::Ball,
            &grid,
            SweepRoute::Closed,
            &SweepOptions::default(),
        )?;
        let report = classify(&sweep, 0.5)?;
        labels_ok &= report.class_label == ClassLabel::ClassI;
        labels.push(format!("D={d}: {}", report.class_label));
        t.record(
            || format!("slope D={d}"),
            (report.fitted_slope - (2 * d - 1) as f64).abs(),
            p.tol(0.05),
        );
    }
    let control = classify(&SweepResult::poisson_control(1, &grid)?, 0.5)?;
    labels_ok &= control.class_label == ClassLabel::NotHyperuniform;
    labels.push(format!("Poisson: {}", control.class_label));
    let mut result = t.finish(CheckId::Classification);
    result.passed &= labels_ok;
    result.detail = format!("{}; labels {}", result.detail, labels.join(", "));
    Ok(result)
}

fn bessel_i_series(nu: u32, x: f64) -> f64 {
    // e^{-x} Σ_k (x/2)^{2k+ν} / (k! (k+ν)!) in log space
    let half = 0.5 * x;
    let log_power = if nu == 0 { 0.0 } else { nu as f64 * half.ln() };
    let mut term = (log_power - x - (1..=nu).map(|k| (k as f64).ln()).sum::<f64>()).exp();
    let mut sum = term;
    for k in 1..500 {
        term *= half * half / (k as f64 * (k + nu) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

fn check_special_functions(p: &ToleranceProfile) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed ^ 0xBB67_AE85);
    let mut t = Tally::default();
    for _ in 0..200 {
        let n = rng.random_range(1..60u32);
        let alpha = rng.random_range(0.0..20.0);
        let x = rng.random_range(0.0..60.0);
        let (l0, l1, l2) = (
            laguerre(n - 1, alpha, x)?,
            laguerre(n, alpha, x)?,
            laguerre(n + 1, alpha, x)?,
        );
        let nf = n as f64;
        let terms = [
            (nf + 1.0) * l2,
            (2.0 * nf + 1.0 + alpha - x) * l1,
            (nf + alpha) * l0,
        ];
        let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let residual = (terms[0] - terms[1] + terms[2]).abs() / scale;
        t.record(
            || format!("Laguerre n={n} alpha={alpha:.3} x={x:.3}"),
            residual,
            p.tol(1e-9),
        );
    }
    for _ in 0..200 {
        let s = rng.random_range(0.1..80.0);
        let x = rng.random_range(0.0..100.0);
        let residual = (regularized_lower_gamma(s + 1.0, x)? - regularized_lower_gamma(s, x)?
            + gamma_prefactor(s, x)?)
        .abs();
        t.record(
            || format!("P forward recurrence s={s:.3} x={x:.3}"),
            residual,
            p.tol(1e-12),
        );
    }
    for nu in 0..=5u32 {
        for x in [0.01, 0.5, 1.0, 5.0, 10.0, 20.0, 29.9, 30.0] {
            let oracle = bessel_i_series(nu, x);
            t.record(
                || format!("I_{nu}({x}) series"),
                rel(bessel_i_scaled(nu, x)?, oracle),
                p.tol(1e-10),
            );
        }
    }
    for nu in 0..=3u32 {
        let x = 1e4;
        let lead = bessel_asymptotic_check(nu, x, 0)?.value;
        t.record(
            || format!("I_{nu}({x}) asymptote"),
            rel(lead, bessel_i_scaled(nu, x)?),
            p.tol(1e-3),
        );
    }
    Ok(t.finish(CheckId::SpecialFunctions))
}

/// Runs one check; numerical failures inside a check become a failed result.
pub fn run_check(id: CheckId, profile: &ToleranceProfile) -> CheckResult {
    let outcome = match id {
        CheckId::BallRoutes => check_ball_routes(profile),
        CheckId::GinibreConstant => check_ball_constants(profile, &[1], id),
        CheckId::HeisenbergConstant => check_ball_constants(profile, &[2, 3], id),
        CheckId::AsymptoticSeries => check_asymptotic_series(profile),
        CheckId::AlphaCoefficients => check_alpha(profile),
        CheckId::SpectrumRoute => check_spectrum_route(profile),
        CheckId::LevelConstants => check_level_constants(profile),
        CheckId::LevelLimits => check_level_limits(profile),
        CheckId::KernelSeries => check_kernel_series(profile),
        CheckId::GaugeInvariance => check_gauge(profile),
        CheckId::MonteCarlo => check_monte_carlo(profile),
        CheckId::Classification => check_classification(profile),
        CheckId::SpecialFunctions => check_special_functions(profile),
    };
    outcome.unwrap_or_else(|e| CheckResult {
        name: id.name().into(),
        passed: false,
        worst: f64::INFINITY,
        detail: format!("error: {e}"),
    })
}

/// Runs the selected checks in order.
pub fn verify_selected(ids: &[CheckId], profile: &ToleranceProfile) -> VerificationReport {
    VerificationReport {
        checks: ids.iter().map(|&id| run_check(id, profile)).collect(),
    }
}

/// Runs every check.
pub fn verify_all(profile: &ToleranceProfile) -> VerificationReport {
    verify_selected(&CheckId::ALL, profile)
}
