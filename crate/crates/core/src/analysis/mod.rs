//! Radius sweeps, hyperuniformity classification and cross-route
//! verification.

pub mod output;
pub mod verify;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::montecarlo::{estimate_moments, McConfig};
use crate::window::{mean_ball, window_moments, Route, Window, WindowKind, DEFAULT_TAIL_TOL};

/// Route selector for sweeps, including Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepRoute {
    Closed,
    Integral,
    Spectrum,
    Mc,
}

impl SweepRoute {
    fn exact_route(self) -> Option<Route> {
        match self {
            SweepRoute::Closed => Some(Route::ClosedForm),
            SweepRoute::Integral => Some(Route::Integral),
            SweepRoute::Spectrum => Some(Route::Spectrum),
            SweepRoute::Mc => None,
        }
    }
}

impl std::fmt::Display for SweepRoute {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SweepRoute::Closed => "closed",
            SweepRoute::Integral => "integral",
            SweepRoute::Spectrum => "spectrum",
            SweepRoute::Mc => "mc",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SweepRoute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(SweepRoute::Closed),
            "integral" => Ok(SweepRoute::Integral),
            "spectrum" => Ok(SweepRoute::Spectrum),
            "mc" => Ok(SweepRoute::Mc),
            other => Err(Error::InvalidInput(format!("unknown route {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub tail_tol: f64,
    pub integral_tol: f64,
    pub mc: McConfig,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            tail_tol: DEFAULT_TAIL_TOL,
            integral_tol: 1e-9,
            mc: McConfig::default(),
        }
    }
}

/// One radius of a sweep. Standard errors are present for Monte Carlo rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub radius: f64,
    pub mean: f64,
    pub variance: f64,
    pub ratio: f64,
    /// `R · Var/E`.
    pub scaled_ratio: f64,
    pub mean_se: Option<f64>,
    pub variance_se: Option<f64>,
}

impl SweepRow {
    fn exact(radius: f64, mean: f64, variance: f64, ratio: f64) -> Self {
        Self {
            radius,
            mean,
            variance,
            ratio,
            scaled_ratio: radius * ratio,
            mean_se: None,
            variance_se: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub spec: KernelSpec,
    pub window: WindowKind,
    pub route: SweepRoute,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Synthetic Poisson control: variance equal to the ball mean.
    pub fn poisson_control(dimension: usize, grid: &[f64]) -> Result<Self> {
        check_grid(grid)?;
        let rows = grid
            .iter()
            .map(|&r| {
                let mean = mean_ball(dimension, r)?;
                Ok(SweepRow::exact(r, mean, mean, 1.0))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            spec: KernelSpec::heisenberg(dimension)?,
            window: WindowKind::Ball,
            route: SweepRoute::Closed,
            rows,
        })
    }
}

/// Geometric grid of `points` radii from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || points < 2 {
        return Err(Error::InvalidInput(format!(
            "bad geometric grid [{lo}, {hi}] with {points} points"
        )));
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|k| lo * (step * k as f64).exp()).collect();
    grid[points - 1] = hi;
    Ok(grid)
}

/// 16 geometric radii from 1 to 50.
pub fn default_r_grid() -> Vec<f64> {
    geometric_grid(1.0, 50.0, 16).expect("valid default grid")
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("radius grid is empty".into()));
    }
    if grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidInput(
            "radii must be finite and positive".into(),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(
            "radius grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

fn sweep_row(
    spec: &KernelSpec,
    kind: WindowKind,
    r: f64,
    route: SweepRoute,
    opts: &SweepOptions,
) -> Result<SweepRow> {
    let window = Window::new(kind, r, spec.dimension())?;
    match route.exact_route() {
        Some(exact) => {
            let rep = window_moments(spec, &window, exact, opts.tail_tol, opts.integral_tol)?;
            if rep.variance > rep.mean * (1.0 + 1e-12) {
                return Err(Error::Consistency(format!(
                    "variance {} exceeds mean {} at R = {r}",
                    rep.variance, rep.mean
                )));
            }
            Ok(SweepRow::exact(r, rep.mean, rep.variance, rep.ratio))
        }
        None => {
            if kind == WindowKind::Ball && spec.dimension() != 1 {
                return Err(Error::Unsupported(format!(
                    "Monte Carlo applies to balls only for D = 1 (got D = {})",
                    spec.dimension()
                )));
            }
            let est = estimate_moments(spec, r, &opts.mc)?;
            let ratio = est.var_hat / est.mean_hat;
            Ok(SweepRow {
                radius: r,
                mean: est.mean_hat,
                variance: est.var_hat,
                ratio,
                scaled_ratio: r * ratio,
                mean_se: Some(est.se_mean),
                variance_se: Some(est.se_var),
            })
        }
    }
}

/// Moments over a grid of radii by one route.
pub fn run_sweep(
    spec: &KernelSpec,
    kind: WindowKind,
    grid: &[f64],
    route: SweepRoute,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    check_grid(grid)?;
    let rows = grid
        .par_iter()
        .map(|&r| sweep_row(spec, kind, r, route, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        spec: spec.clone(),
        window: kind,
        route,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    ClassI,
    ClassII,
    ClassIII,
    NotHyperuniform,
    Inconclusive,
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ClassLabel::ClassI => "ClassI",
            ClassLabel::ClassII => "ClassII",
            ClassLabel::ClassIII => "ClassIII",
            ClassLabel::NotHyperuniform => "NotHyperuniform",
            ClassLabel::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// Thresholds of the finite-radius decision rule, with `d = 2D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassThresholds {
    /// Half-width of the slope band around `d - 1` (Class I/II) and the
    /// margin below `d` (Class III / not hyperuniform).
    pub slope_tol: f64,
    /// Minimum factor by which a `log log R` term must shrink the residual
    /// sum of squares to count as log curvature.
    pub curvature_improvement: f64,
    /// Minimum fitted `log log R` coefficient for Class II.
    pub curvature_min_coeff: f64,
}

impl Default for ClassThresholds {
    fn default() -> Self {
        Self {
            slope_tol: 0.1,
            curvature_improvement: 10.0,
            curvature_min_coeff: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub fitted_slope: f64,
    pub slope_stderr: f64,
    /// Richardson estimate of `lim R · Var/E`.
    pub leading_constant: f64,
    pub class_label: ClassLabel,
    pub rows_used: usize,
}

/// Minimum number of rows in the fit window.
pub const MIN_FIT_ROWS: usize = 6;

struct LinearFit {
    coeffs: Vec<f64>,
    ssr: f64,
    stderr: Vec<f64>,
}

fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Option<LinearFit> {
    let n = y.len();
    let p = columns.len();
    if n <= p {
        return None;
    }
    let design = DMatrix::from_fn(n, p, |i, j| columns[j][i]);
    let target = DVector::from_column_slice(y);
    let xtx = design.transpose() * &design;
    let inverse = xtx.try_inverse()?;
    let beta = &inverse * design.transpose() * &target;
    let resid = &target - &design * &beta;
    let ssr = resid.norm_squared();
    let sigma2 = ssr / (n - p) as f64;
    let stderr = (0..p)
        .map(|j| (sigma2 * inverse[(j, j)]).max(0.0).sqrt())
        .collect();
    Some(LinearFit {
        coeffs: beta.iter().copied().collect(),
        ssr,
        stderr,
    })
}

/// Two-point Richardson extrapolation of `R · Var/E` in `R^{-2}`.
pub fn richardson_leading_constant(rows: &[SweepRow]) -> f64 {
    match rows {
        [.., a, b] => {
            let (r1, r2) = (a.radius * a.radius, b.radius * b.radius);
            (r2 * b.scaled_ratio - r1 * a.scaled_ratio) / (r2 - r1)
        }
        [a] => a.scaled_ratio,
        [] => f64::NAN,
    }
}

/// [`classify_with`] under the default thresholds.
pub fn classify(sweep: &SweepResult, fit_window: f64) -> Result<ClassReport> {
    classify_with(sweep, fit_window, &ClassThresholds::default())
}

/// Fits `log Var` against `log R` over the largest-`R` fraction
/// `fit_window` of the rows (at least [`MIN_FIT_ROWS`]) and labels the
/// growth. Class II is tested first: slope near `d - 1` together with a
/// `log log R` term that shrinks the residuals by the curvature factor.
/// Then Class I (`|slope - (d-1)| <= tol`), Class III
/// (`d-1+tol < slope < d-tol`) and not hyperuniform (`slope >= d-tol`).
pub fn classify_with(
    sweep: &SweepResult,
    fit_window: f64,
    thresholds: &ClassThresholds,
) -> Result<ClassReport> {
    if !(fit_window > 0.0 && fit_window <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "fit window must lie in (0, 1], got {fit_window}"
        )));
    }
    let total = sweep.rows.len();
    if total < MIN_FIT_ROWS {
        return Err(Error::InvalidInput(format!(
            "classification needs at least {MIN_FIT_ROWS} rows, got {total}"
        )));
    }
    let used = ((fit_window * total as f64).ceil() as usize).clamp(MIN_FIT_ROWS, total);
    let rows = &sweep.rows[total - used..];
    let leading_constant = richardson_leading_constant(rows);
    let inconclusive = ClassReport {
        fitted_slope: f64::NAN,
        slope_stderr: f64::NAN,
        leading_constant,
        class_label: ClassLabel::Inconclusive,
        rows_used: used,
    };
    if rows
        .iter()
        .any(|row| !(row.variance > 0.0) || !row.variance.is_finite())
    {
        return Ok(inconclusive);
    }
    let log_r: Vec<f64> = rows.iter().map(|row| row.radius.ln()).collect();
    let log_v: Vec<f64> = rows.iter().map(|row| row.variance.ln()).collect();
    let ones = vec![1.0; used];
    let Some(fit) = least_squares(&[ones.clone(), log_r.clone()], &log_v) else {
        return Ok(inconclusive);
    };
    let slope = fit.coeffs[1];
    let d = 2.0 * sweep.spec.dimension() as f64;
    let tol = thresholds.slope_tol;

    let mut label = None;
    if log_r.iter().all(|&l| l > 0.0) {
        let log_log: Vec<f64> = log_r.iter().map(|l| l.ln()).collect();
        if let Some(curved) = least_squares(&[ones, log_r, log_log], &log_v) {
            let improves = curved.ssr * thresholds.curvature_improvement < fit.ssr;
            if improves
                && curved.coeffs[2] >= thresholds.curvature_min_coeff
                && (curved.coeffs[1] - (d - 1.0)).abs() <= tol
            {
                label = Some(ClassLabel::ClassII);
            }
        }
    }
    let class_label = label.unwrap_or(if (slope - (d - 1.0)).abs() <= tol {
        ClassLabel::ClassI
    } else if slope > d - 1.0 + tol && slope < d - tol {
        ClassLabel::ClassIII
    } else if slope >= d - tol {
        ClassLabel::NotHyperuniform
    } else {
        ClassLabel::Inconclusive
    });
    Ok(ClassReport {
        fitted_slope: slope,
        slope_stderr: fit.stderr[1],
        leading_constant,
        class_label,
        rows_used: used,
    })
}
