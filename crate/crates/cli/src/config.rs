//! Resolution of a run description: defaults, then the JSON config file,
//! then explicit command-line flags, each layer overriding the previous.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use stefan_core::{
    builtin_example, Beta, BoundaryCondition, BoundaryCurve, Discretization, ExactSolution,
    Expr, InitialGuess, IterationConfig, OperatorConfig, OscillationParams, ProblemSpec, TimeFn,
};

use crate::args::CommonArgs;

/// JSON run description. Every field is optional; flags override.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub example: Option<String>,
    pub eps: Option<f64>,
    pub omega: Option<f64>,
    pub dirichlet_g: Option<String>,
    pub neumann_q: Option<String>,
    pub beta: Option<String>,
    pub horizon: Option<f64>,
    pub dxi: Option<f64>,
    pub dt: Option<f64>,
    pub alpha: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub initial: Option<InitialConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: String,
    pub c: Option<f64>,
    pub path: Option<String>,
}

/// A fully resolved run: the problem, its grid, and the iteration controls.
pub struct RunSettings {
    pub spec: ProblemSpec,
    pub exact: Option<ExactSolution>,
    pub disc: Discretization,
    pub iteration: IterationConfig,
    /// Human-readable tag of the problem for chart titles.
    pub problem_label: String,
}

pub fn load_file_config(path: &Path) -> Result<FileConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("malformed config {}", path.display()))
}

fn resolve_initial(
    args: &CommonArgs,
    file: &FileConfig,
    bc_is_neumann: bool,
) -> Result<InitialGuess> {
    // flag layer
    let kind = args.initial.clone().or_else(|| file.initial.as_ref().map(|i| i.kind.clone()));
    let slope = args
        .slope
        .or_else(|| file.initial.as_ref().and_then(|i| i.c))
        .unwrap_or(1.0);
    let path = args
        .initial_file
        .clone()
        .or_else(|| file.initial.as_ref().and_then(|i| i.path.clone().map(Into::into)));

    let kind = match kind.as_deref() {
        None => {
            // benchmark-friendly default: ramp for examples and custom
            // Dirichlet data, flux integral for custom Neumann data
            if args.example.is_none() && file.example.is_none() && bc_is_neumann {
                "flux".to_string()
            } else {
                "linear".to_string()
            }
        }
        Some(k) => k.to_string(),
    };

    match kind.as_str() {
        "linear" => Ok(InitialGuess::LinearSlope { c: slope }),
        "flux" => Ok(InitialGuess::FluxIntegral),
        "file" => {
            let path = path.ok_or_else(|| anyhow!("initial kind 'file' needs a path"))?;
            let reader = BufReader::new(
                fs::File::open(&path)
                    .with_context(|| format!("cannot open initial front {}", path.display()))?,
            );
            let (_, curve) = stefan_core::csv_io::read_boundary_csv(reader)?;
            let curve = BoundaryCurve::new(curve.values().to_vec())?;
            Ok(InitialGuess::UserCurve(curve))
        }
        other => bail!("unknown initial kind '{other}' (expected linear, flux or file)"),
    }
}

/// Builds the problem and iteration settings from config file + flags.
pub fn resolve(args: &CommonArgs) -> Result<RunSettings> {
    let file = match &args.config {
        Some(path) => load_file_config(path)?,
        None => FileConfig::default(),
    };

    let example = args.example.clone().or_else(|| file.example.clone());
    let dirichlet_g = args.dirichlet_g.clone().or_else(|| file.dirichlet_g.clone());
    let neumann_q = args.neumann_q.clone().or_else(|| file.neumann_q.clone());
    let horizon = args.horizon.or(file.horizon).unwrap_or(1.0);

    let (spec, exact, problem_label) = match (example, &dirichlet_g, &neumann_q) {
        (Some(id), None, None) => {
            let id: stefan_core::ExampleId = id.parse()?;
            let params = OscillationParams {
                eps: args.eps.or(file.eps).unwrap_or(0.1),
                omega: args.omega.or(file.omega).unwrap_or(2.0 * std::f64::consts::PI),
            };
            let (mut spec, mut exact) = builtin_example(id, Some(params))?;
            if let Some(h) = args.horizon.or(file.horizon) {
                spec.horizon = h;
            }
            let mut label = format!("example {id}");
            if args.beta.is_some() || file.beta.is_some() {
                // benchmark heating data with a custom latent-heat profile;
                // the exact solution only holds for beta = 1
                spec.beta = resolve_beta(args, &file)?;
                if spec.beta.as_constant() != Some(1.0) {
                    exact = None;
                    label.push_str(" (custom beta)");
                }
            }
            (spec, exact, label)
        }
        (Some(_), _, _) => bail!("give either an example or custom boundary data, not both"),
        (None, Some(_), Some(_)) => bail!("give either Dirichlet or Neumann data, not both"),
        (None, Some(g_src), None) => {
            let expr = Expr::parse(g_src, "t")?;
            let label = format!("dirichlet g = {g_src}");
            let g = TimeFn::with_label(move |t| expr.eval(t), g_src.clone());
            let beta = resolve_beta(args, &file)?;
            (
                ProblemSpec::new(BoundaryCondition::Dirichlet { g }, beta, horizon)?,
                None,
                label,
            )
        }
        (None, None, Some(q_src)) => {
            let expr = Expr::parse(q_src, "t")?;
            let label = format!("neumann q = {q_src}");
            let q = TimeFn::with_label(move |t| expr.eval(t), q_src.clone());
            let beta = resolve_beta(args, &file)?;
            (
                ProblemSpec::new(BoundaryCondition::Neumann { q }, beta, horizon)?,
                None,
                label,
            )
        }
        (None, None, None) => {
            bail!("no problem given: use --example or --dirichlet-g/--neumann-q (or a config file)")
        }
    };

    let dxi = args.dxi.or(file.dxi).unwrap_or(0.05);
    let dt = args.dt.or(file.dt);
    let disc = Discretization::from_steps(dxi, dt, spec.horizon)?;

    let alpha = args.alpha.or(file.alpha).unwrap_or(0.5);
    let tol = args.tol.or(file.tol).unwrap_or(1e-6);
    let max_iter = args.max_iter.or(file.max_iter).unwrap_or(200);
    let initial = resolve_initial(args, &file, spec.bc.is_neumann())?;
    let iteration = IterationConfig::new(tol, max_iter, OperatorConfig::new(alpha)?, initial)?;

    Ok(RunSettings { spec, exact, disc, iteration, problem_label })
}

fn resolve_beta(args: &CommonArgs, file: &FileConfig) -> Result<Beta> {
    match args.beta.clone().or_else(|| file.beta.clone()) {
        None => Ok(Beta::Constant(1.0)),
        Some(src) => {
            let expr = Expr::parse(&src, "x")?;
            Ok(Beta::from_expr(expr))
        }
    }
}
