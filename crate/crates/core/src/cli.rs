//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for argument, parse and I/O errors, 3 for
//! numeric failures (non-convergence, divergence, bracket failures).

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::config::{OutputFormat, RunConfig, CONFIG_ENV};
use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::hardy::{
    concave_deviation_hardy_constant, hardy_constant_gini, hardy_constant_power, sharpness_sweep,
    summarize, ExtendedReal, Family, MeanSpec, SweepRow, SweepSummary, CSV_HEADER,
};
use crate::integral_means::{
    estimate_integral_mean, FunctionHandle, IntegralDeviation, IntegralGini, IntegralMean,
};
use crate::step_functions::StepFunction;
use crate::weighted_means::{
    DeviationMean, DeviationSpec, GiniMean, PowerMean, ScalarFn, WeightedMean, WeightedSample,
};

/// Tolerance on ratios exceeding a finite reference constant.
const OUTER_TOL: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(
    name = "hardy-means",
    version,
    about = "Weighted, integral and Hardy-type means"
)]
pub struct Cli {
    /// Config file (flat key = value); overrides $HARDY_MEANS_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    quad_tol: Option<f64>,
    /// Graded cells before quadrature gives up.
    #[arg(long, global = true)]
    quad_max_depth: Option<usize>,
    /// Width ratio between consecutive graded cells.
    #[arg(long, global = true)]
    quad_grading_ratio: Option<f64>,
    /// Absolute bisection tolerance.
    #[arg(long, global = true)]
    root_tol: Option<f64>,
    #[arg(long, global = true)]
    root_max_iter: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeanKind {
    /// Closed-form Gini mean G(p,q).
    Gini,
    /// Power mean P(p).
    Power,
    /// Gini deviation mean solved by bisection.
    DevGini,
    /// Deviation mean of E(x,y) = ln(x/y).
    ConcaveLog,
    /// Deviation mean of E(x,y) = ((x/y)^p − 1)/p.
    ConcavePower,
}

#[derive(Debug, Args)]
struct MeanArgs {
    #[arg(value_enum)]
    kind: MeanKind,
    /// Parameters of the mean (p, or p q).
    #[arg(allow_negative_numbers = true, value_name = "PARAMS")]
    mean_params: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Quadrature (deviation equation or closed-form Gini integrals).
    Quadrature,
    /// Lower/upper step envelopes along the configured grid sizes.
    Envelope,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weighted mean of a finite sample.
    Mean {
        #[command(flatten)]
        spec: MeanArgs,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        entries: Vec<f64>,
        /// Defaults to equal weights.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        weights: Option<Vec<f64>>,
    },
    /// Integral mean of a function family member or a step function.
    Imean {
        #[command(flatten)]
        spec: MeanArgs,
        #[arg(long, value_enum, conflicts_with = "step", requires = "param")]
        family: Option<Family>,
        /// Family parameter (exponent, decay rate or constant).
        #[arg(long, allow_hyphen_values = true)]
        param: Option<f64>,
        /// Horizon: the function lives on [0, s).
        #[arg(long)]
        s: Option<f64>,
        /// Step-function JSON file.
        #[arg(long)]
        step: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "quadrature")]
        method: Method,
    },
    /// Decreasing rearrangement of a step function ("-" reads stdin).
    Rearrange { input: PathBuf },
    /// Hardy ratios along a function family.
    Hardy {
        #[command(flatten)]
        spec: MeanArgs,
        #[arg(long, value_enum)]
        family: Family,
        /// Comma-separated family parameters.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        params: Vec<f64>,
        /// Horizon: ratios are taken over [0, s).
        #[arg(long)]
        s: Option<f64>,
        /// Cells in the outer Riemann sum.
        #[arg(long)]
        grid: Option<usize>,
        /// Write rows here; the summary then goes to stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Hardy constant of a mean.
    HardyConstant {
        #[command(flatten)]
        spec: MeanArgs,
    },
    /// Hardy ratios over a grid of Gini parameters.
    Sweep {
        /// Comma-separated values of p.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        p: Vec<f64>,
        /// Comma-separated values of q; every (p, q) pair is swept.
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        q: Vec<f64>,
        #[arg(long, value_enum)]
        family: Family,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        params: Vec<f64>,
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn arity(args: &MeanArgs, n: usize) -> Result<()> {
    if args.mean_params.len() != n {
        return Err(Error::Argument(format!(
            "{:?} takes {n} parameter(s), got {}",
            args.kind,
            args.mean_params.len()
        )));
    }
    Ok(())
}

fn concave_power(p: f64) -> Result<ScalarFn> {
    if p == 0.0 {
        return Ok(Arc::new(f64::ln));
    }
    Ok(Arc::new(move |x: f64| (x.powf(p) - 1.0) / p))
}

impl MeanArgs {
    fn mean_spec(&self) -> Result<MeanSpec> {
        Ok(match self.kind {
            MeanKind::Gini => {
                arity(self, 2)?;
                MeanSpec::Gini {
                    p: self.mean_params[0],
                    q: self.mean_params[1],
                }
            }
            MeanKind::Power => {
                arity(self, 1)?;
                MeanSpec::Gini {
                    p: self.mean_params[0],
                    q: 0.0,
                }
            }
            MeanKind::DevGini => {
                arity(self, 2)?;
                MeanSpec::Deviation(DeviationSpec::gini(
                    self.mean_params[0],
                    self.mean_params[1],
                ))
            }
            MeanKind::ConcaveLog => {
                arity(self, 0)?;
                MeanSpec::Deviation(DeviationSpec::ratio_concave(Arc::new(f64::ln))?)
            }
            MeanKind::ConcavePower => {
                arity(self, 1)?;
                MeanSpec::Deviation(DeviationSpec::ratio_concave(concave_power(
                    self.mean_params[0],
                )?)?)
            }
        })
    }

    fn weighted_mean(&self, cfg: &RunConfig) -> Result<Box<dyn WeightedMean>> {
        Ok(match (self.kind, self.mean_spec()?) {
            (MeanKind::Power, MeanSpec::Gini { p, .. }) => Box::new(PowerMean { p }),
            (_, MeanSpec::Gini { p, q }) => Box::new(GiniMean { p, q }),
            (_, MeanSpec::Deviation(spec)) => {
                let mut m = DeviationMean::new(spec, cfg.root_tol);
                m.bisection = cfg.bisection();
                Box::new(m)
            }
        })
    }

    fn integral_mean(&self, cfg: &RunConfig) -> Result<Box<dyn IntegralMean>> {
        Ok(match self.mean_spec()? {
            MeanSpec::Gini { p, q } => Box::new(IntegralGini { p, q }),
            MeanSpec::Deviation(spec) => {
                let mut m = IntegralDeviation::new(spec, cfg.root_tol);
                m.bisection = cfg.bisection();
                Box::new(m)
            }
        })
    }

    fn hardy_constant(&self, cfg: &RunConfig) -> Result<ExtendedReal> {
        match self.kind {
            MeanKind::Gini | MeanKind::DevGini => {
                arity(self, 2)?;
                Ok(hardy_constant_gini(
                    self.mean_params[0],
                    self.mean_params[1],
                ))
            }
            MeanKind::Power => {
                arity(self, 1)?;
                Ok(hardy_constant_power(self.mean_params[0]))
            }
            MeanKind::ConcaveLog => {
                arity(self, 0)?;
                concave_deviation_hardy_constant(&f64::ln, cfg.root_tol, &cfg.quad)
            }
            MeanKind::ConcavePower => {
                arity(self, 1)?;
                let f = concave_power(self.mean_params[0])?;
                concave_deviation_hardy_constant(f.as_ref(), cfg.root_tol, &cfg.quad)
            }
        }
    }
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        let path = self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        if let Some(path) = path {
            cfg.apply_file(&path)?;
        }
        if let Some(v) = self.quad_tol {
            cfg.quad.tol = v;
        }
        if let Some(v) = self.quad_max_depth {
            cfg.quad.max_depth = v;
        }
        if let Some(v) = self.quad_grading_ratio {
            cfg.quad.grading_ratio = v;
        }
        if let Some(v) = self.root_tol {
            cfg.root_tol = v;
        }
        if let Some(v) = self.root_max_iter {
            cfg.root_max_iter = v;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_step_function(path: &Path) -> Result<StepFunction> {
    Ok(serde_json::from_str(&read_input(path)?)?)
}

fn print_value(out: &mut dyn Write, cfg: &RunConfig, v: f64) -> Result<()> {
    match cfg.format {
        OutputFormat::Csv => writeln!(out, "{}", fmt_num(v))?,
        OutputFormat::Json => writeln!(out, "{}", json!({ "value": v }))?,
    }
    Ok(())
}

fn summary_line(s: &SweepSummary) -> String {
    format!(
        "max_ratio={} reference={} within_bound={} failed_rows={}",
        fmt_num(s.max_ratio),
        s.reference.map_or("nan".into(), |r| r.to_string()),
        if s.within_bound { "yes" } else { "no" },
        s.failed_rows
    )
}

fn rows_json(rows: &[SweepRow]) -> serde_json::Value {
    rows.iter()
        .map(|r| {
            let mut v = json!({
                "mean_p": r.mean_p, "mean_q": r.mean_q, "family": r.family,
                "param": r.param, "s": r.s, "grid": r.grid,
            });
            match &r.result {
                Ok(report) => v["report"] = serde_json::to_value(report).unwrap_or_default(),
                Err(e) => v["error"] = json!(e.to_string()),
            }
            v
        })
        .collect()
}

/// Writes rows to `csv` (summary to `out`) or to `out` (summary to `err`),
/// failing with a numeric error when any row failed.
fn emit_rows(
    rows: &[SweepRow],
    cfg: &RunConfig,
    csv: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for r in rows {
                s.push_str(&r.csv_line());
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&rows_json(rows))?),
    };
    let summary = summarize(rows, OUTER_TOL);
    match csv {
        Some(path) => {
            std::fs::write(path, body)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            writeln!(out, "{}", summary_line(&summary))?;
        }
        None => {
            out.write_all(body.as_bytes())?;
            writeln!(err, "{}", summary_line(&summary))?;
        }
    }
    for r in rows {
        if let Err(e) = &r.result {
            writeln!(err, "row param={}: {e}", fmt_num(r.param))?;
        }
    }
    if summary.failed_rows > 0 {
        return Err(Error::Integrability(format!(
            "{} row(s) failed",
            summary.failed_rows
        )));
    }
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = cli.run_config()?;
    match &cli.command {
        Command::Mean {
            spec,
            entries,
            weights,
        } => {
            let weights = weights.clone().unwrap_or_else(|| vec![1.0; entries.len()]);
            let sample = WeightedSample::new(entries.clone(), weights)?;
            let v = spec.weighted_mean(&cfg)?.evaluate(&sample)?;
            print_value(out, &cfg, v)
        }
        Command::Imean {
            spec,
            family,
            param,
            s,
            step,
            method,
        } => {
            let f = match (family, step) {
                (Some(fam), None) => fam.handle(param.unwrap_or(0.0), s.unwrap_or(cfg.horizon))?,
                (None, Some(path)) => FunctionHandle::step(read_step_function(path)?),
                _ => {
                    return Err(Error::Argument(
                        "give exactly one of --family or --step".into(),
                    ))
                }
            };
            match method {
                Method::Quadrature => {
                    let v = spec.integral_mean(&cfg)?.integral_mean(&f, &cfg.quad)?;
                    print_value(out, &cfg, v)
                }
                Method::Envelope => {
                    let m = spec.weighted_mean(&cfg)?;
                    let est = estimate_integral_mean(m.as_ref(), &f, &cfg.grid_sizes)?;
                    match cfg.format {
                        OutputFormat::Csv => {
                            writeln!(out, "grid_size,lower,upper,gap")?;
                            for e in &est {
                                writeln!(
                                    out,
                                    "{},{},{},{}",
                                    e.grid_size,
                                    fmt_num(e.lower),
                                    fmt_num(e.upper),
                                    fmt_num(e.gap)
                                )?;
                            }
                        }
                        OutputFormat::Json => writeln!(out, "{}", serde_json::to_string(&est)?)?,
                    }
                    Ok(())
                }
            }
        }
        Command::Rearrange { input } => {
            let sf = read_step_function(input)?;
            writeln!(
                out,
                "{}",
                serde_json::to_string(&sf.decreasing_rearrangement())?
            )?;
            Ok(())
        }
        Command::Hardy {
            spec,
            family,
            params,
            s,
            grid,
            csv,
        } => {
            let rows = sharpness_sweep(
                &spec.mean_spec()?,
                *family,
                params,
                s.unwrap_or(cfg.horizon),
                grid.unwrap_or(cfg.hardy_grid),
                &cfg.quad,
                cfg.bisection(),
            );
            emit_rows(&rows, &cfg, csv.as_deref(), out, err)
        }
        Command::HardyConstant { spec } => {
            let c = spec.hardy_constant(&cfg)?;
            match cfg.format {
                OutputFormat::Csv => writeln!(out, "{c}")?,
                OutputFormat::Json => writeln!(out, "{}", serde_json::to_string(&c)?)?,
            }
            Ok(())
        }
        Command::Sweep {
            p,
            q,
            family,
            params,
            s,
            grid,
            csv,
        } => {
            let (s, grid) = (s.unwrap_or(cfg.horizon), grid.unwrap_or(cfg.hardy_grid));
            let rows: Vec<SweepRow> = p
                .iter()
                .flat_map(|&p| q.iter().map(move |&q| MeanSpec::Gini { p, q }))
                .flat_map(|m| {
                    sharpness_sweep(&m, *family, params, s, grid, &cfg.quad, cfg.bisection())
                })
                .collect();
            emit_rows(&rows, &cfg, csv.as_deref(), out, err)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_argument_error() {
        2
    } else {
        3
    }
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    let (stdout, stderr) = (std::io::stdout(), std::io::stderr());
    let (mut out, mut err) = (stdout.lock(), stderr.lock());
    match run(&cli, &mut out, &mut err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
