use std::fs::File;
use std::io::{self, Write};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use hyperu_core::analysis::output::{to_json_string, write_csv, Document, Meta, WindowInfo};
use hyperu_core::analysis::verify::{verify_selected, CheckId, ToleranceProfile};
use hyperu_core::analysis::{
    classify_with, default_r_grid, run_sweep, ClassThresholds, SweepOptions,
};
use hyperu_core::asymptotics::c_asymptote;
use hyperu_core::kernels::{hermitized_kernel, kernel_eval};
use hyperu_core::montecarlo::estimate_moments;
use hyperu_core::window::{c_constant, polydisk_moments};
use hyperu_core::{ComplexPoint, KernelSpec, McConfig, SweepResult, SweepRoute, WindowKind};

use crate::args::*;

fn spec_from(args: &SpecArgs) -> Result<KernelSpec> {
    let level = args
        .level
        .clone()
        .unwrap_or_else(|| vec![0; args.dimension]);
    Ok(KernelSpec::new(args.dimension, level)?)
}

fn point_from(values: &[f64], dimension: usize) -> Result<ComplexPoint> {
    if values.len() != 2 * dimension {
        bail!(hyperu_core::Error::InvalidInput(format!(
            "expected {} coordinates (re,im per dimension), got {}",
            2 * dimension,
            values.len()
        )));
    }
    let re = values.iter().step_by(2).copied().collect();
    let im = values.iter().skip(1).step_by(2).copied().collect();
    Ok(ComplexPoint::new(re, im)?)
}

fn window_kind(w: WindowArg) -> WindowKind {
    match w {
        WindowArg::Ball => WindowKind::Ball,
        WindowArg::Polydisk => WindowKind::Polydisk,
    }
}

fn sweep_route(r: RouteArg) -> SweepRoute {
    match r {
        RouteArg::Closed => SweepRoute::Closed,
        RouteArg::Integral => SweepRoute::Integral,
        RouteArg::Spectrum => SweepRoute::Spectrum,
        RouteArg::Mc => SweepRoute::Mc,
    }
}

fn sweep_options(w: &WindowArgs) -> Result<SweepOptions> {
    Ok(SweepOptions {
        tail_tol: w.tail_tol,
        mc: McConfig::new(w.replicas, w.seed, McConfig::default().cell_prob_floor)?,
        ..SweepOptions::default()
    })
}

fn sweep_meta(w: &WindowArgs, opts: &SweepOptions) -> Meta {
    let route = sweep_route(w.route);
    let seed = (route == SweepRoute::Mc).then_some(w.seed);
    let mut meta = Meta::new(seed, Some(route.to_string()))
        .with_tolerance("tail_tol", opts.tail_tol)
        .with_tolerance("integral_tol", opts.integral_tol);
    if route == SweepRoute::Mc {
        meta = meta.with_tolerance("cell_prob_floor", opts.mc.cell_prob_floor);
    }
    meta
}

fn emit<R: Serialize>(doc: &Document<R>, output: &OutputArgs) -> Result<()> {
    let mut sink: Box<dyn Write> = match &output.out {
        Some(path) => {
            Box::new(File::create(path).with_context(|| format!("creating {}", path.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    match output.format {
        Format::Json => sink.write_all(to_json_string(doc)?.as_bytes())?,
        Format::Csv => write_csv(&doc.rows, &mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct KernelRow {
    kernel_re: f64,
    kernel_im: f64,
    hermitized_re: f64,
    hermitized_im: f64,
    hermitized_abs: f64,
}

fn kernel_eval_cmd(args: &KernelEvalArgs) -> Result<()> {
    let spec = spec_from(&args.spec)?;
    let x = point_from(&args.x, spec.dimension())?;
    let y = point_from(&args.y, spec.dimension())?;
    let k = kernel_eval(&spec, &x, &y)?;
    let h = hermitized_kernel(&spec, &x, &y)?;
    let row = KernelRow {
        kernel_re: k.re,
        kernel_im: k.im,
        hermitized_re: h.re,
        hermitized_im: h.im,
        hermitized_abs: h.norm(),
    };
    let doc = Document {
        spec: Some(spec),
        window: None,
        rows: vec![row],
        meta: Meta::new(None, None),
    };
    emit(&doc, &args.output)
}

fn sweep_document(spec: &KernelSpec, w: &WindowArgs, grid: &[f64]) -> Result<(SweepResult, Meta)> {
    let opts = sweep_options(w)?;
    let sweep = run_sweep(
        spec,
        window_kind(w.window),
        grid,
        sweep_route(w.route),
        &opts,
    )?;
    Ok((sweep, sweep_meta(w, &opts)))
}

fn into_document(sweep: SweepResult, meta: Meta) -> Document<hyperu_core::SweepRow> {
    let window = WindowInfo {
        kind: sweep.window,
        dimension: sweep.spec.dimension(),
    };
    Document {
        spec: Some(sweep.spec),
        window: Some(window),
        rows: sweep.rows,
        meta,
    }
}

fn stats_cmd(args: &StatsArgs) -> Result<()> {
    let spec = spec_from(&args.spec)?;
    let (sweep, meta) = sweep_document(&spec, &args.window, &[args.radius])?;
    emit(&into_document(sweep, meta), &args.output)
}

fn sweep_cmd(args: &SweepArgs) -> Result<()> {
    let spec = spec_from(&args.spec)?;
    let grid = args.r_grid.clone().unwrap_or_else(default_r_grid);
    let (sweep, meta) = sweep_document(&spec, &args.window, &grid)?;
    emit(&into_document(sweep, meta), &args.output)
}

fn classify_cmd(args: &ClassifyArgs) -> Result<()> {
    let spec = spec_from(&args.sweep.spec)?;
    let grid = args.sweep.r_grid.clone().unwrap_or_else(default_r_grid);
    let (sweep, meta) = if args.poisson_control {
        (
            SweepResult::poisson_control(spec.dimension(), &grid)?,
            Meta::new(None, Some("poisson-control".into())),
        )
    } else {
        sweep_document(&spec, &args.sweep.window, &grid)?
    };
    let thresholds = ClassThresholds {
        slope_tol: args.slope_tol,
        curvature_improvement: args.curvature_improvement,
        ..ClassThresholds::default()
    };
    let report = classify_with(&sweep, args.fit_window, &thresholds)?;
    let meta = meta
        .with_tolerance("fit_window", args.fit_window)
        .with_tolerance("slope_tol", thresholds.slope_tol)
        .with_tolerance("curvature_improvement", thresholds.curvature_improvement);
    let window = WindowInfo {
        kind: sweep.window,
        dimension: sweep.spec.dimension(),
    };
    let doc = Document {
        spec: Some(sweep.spec),
        window: Some(window),
        rows: vec![report],
        meta,
    };
    emit(&doc, &args.sweep.output)
}

#[derive(Serialize)]
struct McRow {
    radius: f64,
    mean_hat: f64,
    var_hat: f64,
    se_mean: f64,
    se_var: f64,
    replicas: u64,
    exact_mean: f64,
    exact_variance: f64,
}

fn mc_cmd(args: &McArgs) -> Result<()> {
    let spec = spec_from(&args.spec)?;
    if args.radius.is_empty() {
        bail!(hyperu_core::Error::InvalidInput(
            "at least one --radius is required".into()
        ));
    }
    let cfg = McConfig::new(args.replicas, args.seed, args.cell_floor)?;
    let mut rows = Vec::with_capacity(args.radius.len());
    for &r in &args.radius {
        let est = estimate_moments(&spec, r, &cfg)?;
        let exact = polydisk_moments(&spec, r, args.tail_tol)?;
        rows.push(McRow {
            radius: r,
            mean_hat: est.mean_hat,
            var_hat: est.var_hat,
            se_mean: est.se_mean,
            se_var: est.se_var,
            replicas: est.replicas,
            exact_mean: exact.mean,
            exact_variance: exact.variance,
        });
    }
    let meta = Meta::new(Some(args.seed), Some("mc".into()))
        .with_tolerance("cell_prob_floor", args.cell_floor)
        .with_tolerance("tail_tol", args.tail_tol);
    let window = WindowInfo {
        kind: WindowKind::Polydisk,
        dimension: spec.dimension(),
    };
    emit(
        &Document {
            spec: Some(spec),
            window: Some(window),
            rows,
            meta,
        },
        &args.output,
    )
}

#[derive(Serialize)]
struct ConstantRow {
    level: u32,
    c_constant: f64,
    c_asymptote: f64,
}

fn constants_cmd(args: &ConstantsArgs) -> Result<()> {
    let rows = args
        .level
        .iter()
        .map(|&m| {
            Ok(ConstantRow {
                level: m,
                c_constant: c_constant(m)?,
                c_asymptote: c_asymptote(m),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    emit(
        &Document {
            spec: None,
            window: None,
            rows,
            meta: Meta::new(None, None),
        },
        &args.output,
    )
}

/// Returns whether every selected check passed.
fn verify_cmd(args: &VerifyArgs) -> Result<bool> {
    let ids = if args.check.is_empty() {
        CheckId::ALL.to_vec()
    } else {
        args.check
            .iter()
            .map(|name| name.parse::<CheckId>())
            .collect::<hyperu_core::Result<Vec<_>>>()?
    };
    let profile = ToleranceProfile {
        scale: args.tolerance_scale,
        mc_replicas: args.replicas,
        seed: args.seed,
    };
    if profile.scale.is_nan() || profile.scale < 0.0 || profile.mc_replicas == 0 {
        bail!(hyperu_core::Error::InvalidInput(
            "tolerance scale must be >= 0 and replicas >= 1".into()
        ));
    }
    let report = verify_selected(&ids, &profile);
    for check in &report.checks {
        eprintln!(
            "[{}] {}: {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    let meta = Meta::new(Some(args.seed), None).with_tolerance("scale", args.tolerance_scale);
    let passed = report.all_passed();
    emit(
        &Document {
            spec: None,
            window: None,
            rows: report.checks,
            meta,
        },
        &args.output,
    )?;
    Ok(passed)
}

/// Runs a command; `Ok(false)` means a verification failure.
pub fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::KernelEval(a) => kernel_eval_cmd(a).map(|_| true),
        Command::Stats(a) => stats_cmd(a).map(|_| true),
        Command::Sweep(a) => sweep_cmd(a).map(|_| true),
        Command::Classify(a) => classify_cmd(a).map(|_| true),
        Command::Mc(a) => mc_cmd(a).map(|_| true),
        Command::Constants(a) => constants_cmd(a).map(|_| true),
        Command::Verify(a) => verify_cmd(a),
    }
}
