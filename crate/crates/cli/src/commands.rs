//! The five experiment commands. Each resolves its settings (config phase),
//! runs, writes its CSV products into the output directory, and reports an
//! exit status: 0 on success, 1 when an iteration fails to converge or a
//! solve breaks down, 2 on configuration errors.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};

use stefan_core::csv_io;
use stefan_core::{
    refine_boundary, run_iteration, solve_fixed_boundary, stefan_residual_report, BoundaryCurve,
    Discretization, ExactSolution, IterationConfig, IterationReport, OperatorConfig, StudyConfig,
};

use crate::args::{OperatorsArgs, RefineArgs, ResidualArgs, SolveArgs, StudyArgs};
use crate::config::{resolve, RunSettings};
use crate::plot::Chart;

/// Distinguishes "the request was malformed" from "the run failed".
pub enum CliError {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(e) | CliError::Runtime(e) => format!("{e:#}"),
        }
    }
}

type CmdResult = std::result::Result<i32, CliError>;

fn config_err(e: anyhow::Error) -> CliError {
    CliError::Config(e)
}

fn runtime_err(e: anyhow::Error) -> CliError {
    CliError::Runtime(e)
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output dir {}", dir.display()))
}

fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn write_file(path: &Path, writer: impl FnOnce(&mut fs::File) -> std::io::Result<()>) -> Result<()> {
    let mut file =
        fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    writer(&mut file).with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sampled_reference(disc: &Discretization, exact: &ExactSolution) -> BoundaryCurve {
    BoundaryCurve::sample(disc, |t| exact.interface(t))
}

fn boundary_points(disc: &Discretization, curve: &BoundaryCurve) -> Vec<(f64, f64)> {
    (0..=disc.m()).map(|n| (disc.time(n), curve.get(n))).collect()
}

fn delta_points(report: &IterationReport) -> Vec<(f64, f64)> {
    report.deltas.iter().enumerate().map(|(k, d)| ((k + 1) as f64, *d)).collect()
}

pub fn solve(args: &SolveArgs) -> CmdResult {
    let settings = resolve(&args.common).map_err(config_err)?;
    ensure_out_dir(&args.common.out).map_err(config_err)?;
    let RunSettings { spec, exact, disc, iteration, problem_label } = settings;

    let reference = exact.as_ref().map(|e| sampled_reference(&disc, e));
    let report = run_iteration(&spec, &disc, &iteration, reference.as_ref())
        .map_err(|e| runtime_err(e.into()))?;
    let curve = report.final_curve().clone();
    let field = solve_fixed_boundary(&spec, &disc, &curve).map_err(|e| runtime_err(e.into()))?;

    let dir = &args.common.out;
    write_file(&out_path(dir, "boundary.csv"), |f| csv_io::write_boundary_csv(f, &disc, &curve))
        .map_err(runtime_err)?;
    write_file(&out_path(dir, "field.csv"), |f| csv_io::write_field_csv(f, &disc, &field))
        .map_err(runtime_err)?;
    write_file(&out_path(dir, "iterations.csv"), |f| csv_io::write_iterations_csv(f, &report))
        .map_err(runtime_err)?;
    if args.dump_iterates {
        write_file(&out_path(dir, "iterates.csv"), |f| {
            csv_io::write_iterate_dump_csv(f, &disc, &report)
        })
        .map_err(runtime_err)?;
    }

    if args.common.plot {
        let mut chart = Chart::new(&format!("front, {problem_label}"), "t", "s")
            .with_series("computed", boundary_points(&disc, &curve));
        if let Some(reference) = &reference {
            chart = chart.with_series("exact", boundary_points(&disc, reference));
        }
        chart.save(&out_path(dir, "boundary.svg")).map_err(runtime_err)?;
        Chart::new(&format!("convergence, {problem_label}"), "iteration", "sup-norm change")
            .log_y()
            .with_series("delta", delta_points(&report))
            .save(&out_path(dir, "iterations.svg"))
            .map_err(runtime_err)?;
    }

    let last_delta = report.deltas.last().copied().unwrap_or(0.0);
    println!(
        "{problem_label}: {} after {} iterations (last delta {last_delta:.3e}, {} clamped nodes)",
        if report.converged { "converged" } else { "NOT converged" },
        report.iterations(),
        report.clamp_events,
    );
    if let Some(reference) = &reference {
        println!("max front error vs exact: {:.3e}", curve.sup_distance(reference));
    }
    Ok(if report.converged { 0 } else { 1 })
}

pub fn study(args: &StudyArgs) -> CmdResult {
    let settings = resolve(&args.common).map_err(config_err)?;
    ensure_out_dir(&args.common.out).map_err(config_err)?;
    let exact = settings.exact.as_ref().ok_or_else(|| {
        config_err(anyhow!(
            "the refinement study needs an exact solution; use --example i or --example ii"
        ))
    })?;
    let study_cfg = StudyConfig::new((0..args.levels).collect(), args.snapshot)
        .map_err(|e| config_err(e.into()))?;

    let rows = stefan_core::refinement_study(&settings.spec, exact, &study_cfg, &settings.iteration)
        .map_err(|e| runtime_err(e.into()))?;

    let dir = &args.common.out;
    write_file(&out_path(dir, "study.csv"), |f| csv_io::write_study_csv(f, &rows))
        .map_err(runtime_err)?;

    if args.common.plot {
        Chart::new(&format!("error vs step, {}", settings.problem_label), "dxi", "E")
            .log_log()
            .with_series("E", rows.iter().map(|r| (r.dxi, r.error)).collect())
            .save(&out_path(dir, "study.svg"))
            .map_err(runtime_err)?;
    }

    println!("dxi        error        order   iterations");
    for row in &rows {
        println!(
            "{:<10.6} {:<12.4e} {:<7} {}{}",
            row.dxi,
            row.error,
            row.order.map(|p| format!("{p:.3}")).unwrap_or_else(|| "-".into()),
            row.iterations,
            if row.converged { "" } else { "  (not converged)" }
        );
    }
    Ok(if rows.iter().all(|r| r.converged) { 0 } else { 1 })
}

pub fn operators(args: &OperatorsArgs) -> CmdResult {
    let settings = resolve(&args.common).map_err(config_err)?;
    ensure_out_dir(&args.common.out).map_err(config_err)?;
    let alphas: Vec<f64> = args
        .alphas
        .split(',')
        .map(|a| a.trim().parse::<f64>().map_err(|_| anyhow!("bad relaxation weight '{a}'")))
        .collect::<Result<_>>()
        .map_err(config_err)?;
    if alphas.is_empty() {
        return Err(config_err(anyhow!("no relaxation weights given")));
    }

    let RunSettings { spec, exact, disc, iteration, problem_label } = settings;
    let reference = exact.as_ref().map(|e| sampled_reference(&disc, e));
    let mut runs = Vec::new();
    for &alpha in &alphas {
        let cfg = IterationConfig {
            operator: OperatorConfig::new(alpha).map_err(|e| config_err(e.into()))?,
            max_iter: args.sweep_iters.unwrap_or(iteration.max_iter),
            ..iteration.clone()
        };
        let report = run_iteration(&spec, &disc, &cfg, reference.as_ref())
            .map_err(|e| runtime_err(e.into()))?;
        println!(
            "alpha = {alpha}: {} after {} iterations, signs {:?}",
            if report.converged { "converged" } else { "not converged" },
            report.iterations(),
            report.sign_pattern.iter().take(8).collect::<Vec<_>>(),
        );
        runs.push((alpha, report));
    }

    let dir = &args.common.out;
    write_file(&out_path(dir, "operators.csv"), |f| csv_io::write_operators_csv(f, &runs))
        .map_err(runtime_err)?;

    if args.common.plot {
        let mut chart =
            Chart::new(&format!("relaxation sweep, {problem_label}"), "iteration", "sup-norm change")
                .log_y();
        for (alpha, report) in &runs {
            chart = chart.with_series(&format!("alpha = {alpha}"), delta_points(report));
        }
        chart.save(&out_path(dir, "operators.svg")).map_err(runtime_err)?;
    }

    // the undamped (alpha = 1) sweep is an oscillation dump by design;
    // only damped runs are held to convergence
    let damped_ok = runs.iter().filter(|(a, _)| *a < 1.0).all(|(_, r)| r.converged);
    Ok(if damped_ok { 0 } else { 1 })
}

pub fn refine(args: &RefineArgs) -> CmdResult {
    let settings = resolve(&args.common).map_err(config_err)?;
    ensure_out_dir(&args.common.out).map_err(config_err)?;
    let RunSettings { spec, exact, disc, iteration, problem_label } = settings;

    let (curve, solve_converged) = match args.candidate_slope {
        Some(c) => {
            if !(c.is_finite() && c > 0.0) {
                return Err(config_err(anyhow!("candidate slope must be positive, got {c}")));
            }
            (BoundaryCurve::sample(&disc, |t| c * t), true)
        }
        None => {
            let report = run_iteration(&spec, &disc, &iteration, None)
                .map_err(|e| runtime_err(e.into()))?;
            (report.final_curve().clone(), report.converged)
        }
    };

    let outcome = refine_boundary(&spec, &disc, &curve, args.epsilon)
        .map_err(|e| runtime_err(e.into()))?;

    let dir = &args.common.out;
    write_file(&out_path(dir, "refine.csv"), |f| {
        csv_io::write_refine_csv(f, &disc, &curve, &outcome, args.epsilon)
    })
    .map_err(runtime_err)?;

    if args.common.plot {
        let mut chart = Chart::new(&format!("refinement step, {problem_label}"), "t", "s")
            .with_series("input", boundary_points(&disc, &curve))
            .with_series("refined", boundary_points(&disc, &outcome.refined));
        if let Some(exact) = &exact {
            chart = chart.with_series("exact", boundary_points(&disc, &sampled_reference(&disc, exact)));
        }
        chart.save(&out_path(dir, "refine.svg")).map_err(runtime_err)?;
    }

    println!(
        "d1 before {:.4e}, d2 before {:.4e}, projected d2 {:.4e} (ratio {:.4}, target {:.4})",
        outcome.before.d1,
        outcome.before.d2,
        outcome.projected_d2,
        outcome.projected_ratio,
        1.0 - 2.0 * args.epsilon
    );
    Ok(if solve_converged { 0 } else { 1 })
}

pub fn residual(args: &ResidualArgs) -> CmdResult {
    let settings = resolve(&args.common).map_err(config_err)?;
    ensure_out_dir(&args.common.out).map_err(config_err)?;
    let RunSettings { spec, exact: _, disc, iteration, problem_label } = settings;

    let report = run_iteration(&spec, &disc, &iteration, None).map_err(|e| runtime_err(e.into()))?;
    let curve = report.final_curve();
    let discrepancy = stefan_residual_report(&spec, &disc, curve)
        .map_err(|e| runtime_err(e.into()))?;

    let dir = &args.common.out;
    write_file(&out_path(dir, "residual.csv"), |f| {
        csv_io::write_residual_csv(f, &disc, &discrepancy)
    })
    .map_err(runtime_err)?;

    if args.common.plot {
        Chart::new(&format!("flux-balance residual, {problem_label}"), "t", "residual")
            .with_series(
                "residual",
                (0..=disc.m()).map(|n| (disc.time(n), discrepancy.residual_curve[n])).collect(),
            )
            .save(&out_path(dir, "residual.svg"))
            .map_err(runtime_err)?;
    }

    println!(
        "{problem_label}: {} after {} iterations; d1 {:.4e}, max node residual {:.4e}",
        if report.converged { "converged" } else { "NOT converged" },
        report.iterations(),
        discrepancy.d1,
        discrepancy.max_residual()
    );
    Ok(if report.converged { 0 } else { 1 })
}
