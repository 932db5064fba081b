use std::fs;
use std::path::Path;

use serde::Serialize;
use skewlab::audit::{run_audit, AuditConfig};
use skewlab::example1::{run_grid, GridSpec, CSV_HEADER};
use skewlab::io::{parse_kraus_list, parse_matrix};
use skewlab::{
    best_bounds, channel_bounds, ChannelProblem, ComplexMatrix, DensityMatrix, KrausChannel, ObservableSet,
    SearchConfig, SkewContext, SkewParams,
};

use crate::args::{AuditArgs, ChannelsArgs, Example1Args, ObservablesArgs, ParamArgs, SkewArgs};
use crate::error::{CliError, Context};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    parse_matrix(&read(path)?).context(path.display().to_string())
}

fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    DensityMatrix::new(load_matrix(path)?).context(path.display().to_string())
}

fn load_channel(path: &Path) -> Result<KrausChannel, CliError> {
    let ops = parse_kraus_list(&read(path)?).context(path.display().to_string())?;
    KrausChannel::new(ops).context(path.display().to_string())
}

fn params(p: &ParamArgs) -> Result<SkewParams, CliError> {
    SkewParams::new(p.alpha, p.beta, p.gamma).context("parameters")
}

fn context(state: &DensityMatrix, p: &ParamArgs) -> Result<SkewContext, CliError> {
    SkewContext::new(state, params(p)?).context("state")
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

#[derive(Serialize)]
struct SkewOutput {
    #[serde(rename = "K")]
    k: f64,
    trace_form: f64,
    agreement: f64,
    imaginary_residue: f64,
    params: SkewParams,
}

pub fn skew(args: &SkewArgs) -> Result<String, CliError> {
    let state = load_state(&args.state)?;
    let ctx = context(&state, &args.params)?;
    let op_name = args.op.display().to_string();
    let values = if args.channel {
        let ch = load_channel(&args.op)?;
        if ch.dim() != state.dim() {
            return Err(CliError::Usage(format!(
                "{op_name}: Kraus dimension {} does not match state dimension {}",
                ch.dim(),
                state.dim()
            )));
        }
        ch.kraus().iter().map(|e| ctx.evaluate_operator(e)).collect::<Result<Vec<_>, _>>().context(op_name)?
    } else {
        vec![ctx.evaluate_observable(&load_matrix(&args.op)?).context(op_name)?]
    };
    let out = SkewOutput {
        k: values.iter().map(|v| v.value).sum(),
        trace_form: values.iter().map(|v| v.trace_form).sum(),
        agreement: values.iter().map(|v| v.agreement).fold(0.0, f64::max),
        imaginary_residue: values.iter().map(|v| v.imaginary_residue).fold(0.0, f64::max),
        params: *ctx.params(),
    };
    Ok(to_json(&out))
}

pub fn bounds_observables(args: &ObservablesArgs) -> Result<String, CliError> {
    let state = load_state(&args.state)?;
    let ctx = context(&state, &args.params)?;
    let ops = args.ops.iter().map(|p| load_matrix(p)).collect::<Result<Vec<_>, _>>()?;
    let set = ObservableSet::new(ops).context("observables")?;
    Ok(to_json(&best_bounds(&ctx, &set).context("observables")?))
}

pub fn bounds_channels(args: &ChannelsArgs) -> Result<String, CliError> {
    let state = load_state(&args.state)?;
    let ctx = context(&state, &args.params)?;
    let channels = args.channels.iter().map(|p| load_channel(p)).collect::<Result<Vec<_>, _>>()?;
    let problem = ChannelProblem::new(&ctx, &channels).context("channels")?;
    let config = SearchConfig { cap: args.cap, restarts: args.restarts, seed: args.seed };
    Ok(to_json(&channel_bounds(&problem, args.strategy.into(), &config)?))
}

fn parse_grid(grid: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("grid must look like THETAxPHI (e.g. 100x200), got {grid:?}"));
    let (a, b) = grid.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

pub fn example1(args: &Example1Args) -> Result<String, CliError> {
    let (n_theta, n_phi) = parse_grid(&args.grid)?;
    let grid = GridSpec::new(n_theta, n_phi, args.t)?;
    let (rows, summary) = run_grid(&grid, params(&args.params)?)?;

    let out = args.out.display().to_string();
    let io = |e: csv::Error| CliError::Io { path: out.clone(), source: e.into() };
    let mut w = csv::Writer::from_path(&args.out).map_err(io)?;
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in &rows {
        let fields = [
            row.theta,
            row.phi,
            row.gamma_surface,
            row.gamma1_surface,
            row.lb0,
            row.lb1,
            row.lb2,
            row.lb3,
            row.lhs,
        ];
        w.write_record(fields.iter().map(|x| x.to_string())).map_err(io)?;
    }
    w.flush().map_err(|source| CliError::Io { path: out.clone(), source })?;

    let json = to_json(&summary);
    if summary.passed() {
        Ok(json)
    } else {
        let points: Vec<String> = summary
            .violations
            .iter()
            .take(20)
            .map(|v| format!("theta={} phi={} {} (residual {:e})", v.theta, v.phi, v.check, v.residual))
            .collect();
        Err(CliError::Identity(format!(
            "{} identity violations; first offending grid points:\n{}\n{json}",
            summary.violations.len(),
            points.join("\n")
        )))
    }
}

pub fn audit(args: &AuditArgs) -> Result<String, CliError> {
    let mut cfg = AuditConfig::new(args.trials, args.seed, args.dims.clone(), args.n_obs.clone())?;
    cfg.flip_sign = args.flip_sign;
    let summary = run_audit(&cfg).context("audit")?;
    let json = to_json(&summary);
    if summary.passed() {
        Ok(json)
    } else {
        Err(CliError::Violation(format!(
            "{} inequality violations; reproduction recipe for the first:\n{}\n{json}",
            summary.violations,
            to_json(&summary.failures[0])
        )))
    }
}
