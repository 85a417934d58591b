//! Command-line front end: input resolution, the analysis pipeline, batch
//! ego-subgraph runs and report serialization.

pub mod args;
pub mod ego;
pub mod input;
pub mod report;

use std::path::PathBuf;

use serde::Serialize;
use spectral_moments::bounds::{bounds_auto, bounds_bisect, bounds_s1, bounds_s2};
use spectral_moments::eigencount::{cdf_bound_sweep, primal_lp_oracle, sweep_grid, PrimalLpResult, SweepPoint};
use spectral_moments::estimators::{estimator_report, EstimatorReport};
use spectral_moments::spectrum::{eigenvalues_capped, histogram, spectral_cdf, Histogram};
use spectral_moments::{aggregates, moments_from_census, node_census, Bounds, CensusAggregates, IntervalQuery, Moments};

use args::{Cli, Command, EigencountOpts, Format, Level};
use input::{parse_pair, parse_sweep, resolve, Input};
use report::{analyze, default_omega, eigencount_entries, graph_moments, report_csv, AnalysisReport, EigencountEntry, MomentRoutes};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("input: {0}")]
    Input(String),
    #[error("analysis: {0}")]
    Analysis(#[from] spectral_moments::Error),
}

impl CliError {
    /// 1 for analysis failures, 2 for usage and I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(_) => 1,
            _ => 2,
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_table<I, R>(header: &[&str], rows: I) -> Result<String, CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn primary_moments(input: &Input) -> Result<Moments, CliError> {
    match input {
        Input::Moments { moments, .. } => Ok(moments.clone()),
        Input::Graph { graph, .. } => Ok(moments_from_census(&node_census(graph)?)?.to_sequence()),
    }
}

#[derive(Debug, Serialize)]
struct CensusOutput {
    aggregates: CensusAggregates<u64>,
    nodes: Vec<CensusNode>,
}

#[derive(Debug, Serialize)]
struct CensusNode {
    node: u64,
    d: u64,
    t: u64,
    q: u64,
    p: u64,
}

#[derive(Debug, Serialize)]
struct BoundsOutput {
    source: String,
    n: u64,
    feasibility: Vec<report::FeasibilityEntry>,
    bounds: Vec<Bounds>,
}

#[derive(Debug, Serialize)]
struct EigencountOutput {
    omega: (f64, f64),
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_note: Option<&'static str>,
    intervals: Vec<IntervalOutput>,
    sweep: Vec<SweepOutput>,
}

#[derive(Debug, Serialize)]
struct IntervalOutput {
    #[serde(flatten)]
    entry: EigencountEntry,
    #[serde(skip_serializing_if = "Option::is_none")]
    primal_lp: Option<PrimalLpResult<f64>>,
    /// Exact fraction when the spectrum was computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SweepOutput {
    #[serde(flatten)]
    point: SweepPoint<f64>,
    /// Exact `F(α)` when the spectrum was computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    cdf: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SpectrumOutput {
    n: usize,
    rho: f64,
    lambda_min: f64,
    eigenvalues: Vec<f64>,
    moments: Moments,
    histogram: Histogram<f64>,
}

fn parse_intervals(opts: &EigencountOpts) -> Result<Vec<(f64, f64)>, CliError> {
    opts.interval.iter().map(|s| parse_pair(s, "--interval")).collect()
}

fn parse_omega(opts: &EigencountOpts) -> Result<Option<(f64, f64)>, CliError> {
    opts.omega.as_deref().map(|s| parse_pair(s, "--omega")).transpose()
}

/// Executes one command and returns what it prints on stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", g.tol)));
    }
    match &cli.command {
        Command::Analyze { path, eigencount } => {
            let input = resolve(path.as_deref(), g)?;
            let r = analyze(&input, g, &parse_intervals(eigencount)?, parse_omega(eigencount)?, eigencount.degree)?;
            match g.format {
                Format::Json => to_json(&r),
                Format::Csv => report_csv(std::slice::from_ref(&r)),
            }
        }
        Command::Census { path } => {
            let input = resolve(path.as_deref(), g)?;
            let graph = input.require_graph("census")?;
            let c = node_census(graph)?;
            match g.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    c.write_csv(&mut buf, graph.index_base()).map_err(|e| CliError::Io(e.to_string()))?;
                    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
                }
                Format::Json => {
                    let nodes = (0..graph.node_count())
                        .map(|i| CensusNode { node: graph.label(i), d: c.d[i], t: c.t[i], q: c.q[i], p: c.p[i] })
                        .collect();
                    to_json(&CensusOutput { aggregates: aggregates(&c)?, nodes })
                }
            }
        }
        Command::Moments { path } => {
            let input = resolve(path.as_deref(), g)?;
            let routes = match &input {
                Input::Graph { graph, .. } => graph_moments(graph, g.spectrum_cap)?.0,
                Input::Moments { moments, .. } => MomentRoutes { external: Some(moments.clone()), ..Default::default() },
            };
            match g.format {
                Format::Json => to_json(&routes),
                Format::Csv => {
                    let order = routes.primary().map_or(0, |m| m.order());
                    let col = |m: &Option<Moments>, k: usize| report::cell(m.as_ref().and_then(|m| m.m.get(k).copied()));
                    csv_table(
                        &["k", "census", "walks", "spectrum", "external"],
                        (0..=order).map(|k| {
                            vec![
                                k.to_string(),
                                col(&routes.census, k),
                                col(&routes.walks, k),
                                col(&routes.spectrum, k),
                                col(&routes.external, k),
                            ]
                        }),
                    )
                }
            }
        }
        Command::Bounds { path, level, bisect } => {
            let input = resolve(path.as_deref(), g)?;
            let ms = primary_moments(&input)?;
            let levels: Vec<usize> = match level {
                Level::One => vec![1],
                Level::Two => vec![2],
                Level::Auto => vec![],
            };
            let bounds: Vec<Bounds> = if levels.is_empty() {
                if *bisect {
                    let s = if ms.order() >= 5 { 2 } else { 1 };
                    vec![bounds_bisect(&ms, s, g.tol)?]
                } else {
                    vec![bounds_auto(&ms)?]
                }
            } else {
                levels
                    .iter()
                    .map(|&s| match (*bisect, s) {
                        (true, s) => bounds_bisect(&ms, s, g.tol),
                        (false, 1) => bounds_s1(&ms),
                        (false, _) => bounds_s2(&ms),
                    })
                    .collect::<Result<_, _>>()?
            };
            let out = BoundsOutput {
                source: input.source().to_string(),
                n: ms.n,
                feasibility: report::feasibility_entries(&ms),
                bounds,
            };
            match g.format {
                Format::Json => to_json(&out),
                Format::Csv => csv_table(
                    &["s", "alpha", "beta", "method", "residual"],
                    out.bounds.iter().map(|b| {
                        vec![
                            b.s.to_string(),
                            b.alpha.to_string(),
                            b.beta.to_string(),
                            serde_json::to_value(b.method).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                            b.residual.to_string(),
                        ]
                    }),
                ),
            }
        }
        Command::Estimate { path } => {
            let input = resolve(path.as_deref(), g)?;
            let graph = input.require_graph("estimate")?;
            let agg = aggregates(&node_census(graph)?)?.to_real::<f64>();
            let r: EstimatorReport<f64> = estimator_report(graph, &agg);
            match g.format {
                Format::Json => to_json(&r),
                Format::Csv => csv_table(
                    &["estimator", "value"],
                    [("u1", r.u1), ("u2", r.u2), ("W", r.w), ("lambda_a", r.lambda_a), ("lambda_b", r.lambda_b)]
                        .into_iter()
                        .map(|(k, v)| vec![k.to_string(), report::cell(v)]),
                ),
            }
        }
        Command::Eigencount { path, opts, lp_grid } => {
            let input = resolve(path.as_deref(), g)?;
            let intervals = parse_intervals(opts)?;
            if intervals.is_empty() && opts.sweep.is_none() {
                return Err(CliError::Usage("eigencount needs --interval lo,hi or --sweep lo:step:hi".into()));
            }
            let ms = primary_moments(&input)?;
            let explicit = parse_omega(opts)?;
            let omega = match explicit {
                Some(o) => o,
                None => default_omega(&input, &ms)?,
            };
            IntervalQuery::new(omega, omega, opts.degree)?;
            let spectrum = match input.graph() {
                Some(graph) if graph.node_count() <= g.spectrum_cap => Some(eigenvalues_capped::<f64>(graph, g.spectrum_cap)?),
                _ => None,
            };
            let entries = eigencount_entries(&ms, &intervals, omega, opts.degree, g.tol)?;
            let mut interval_out = Vec::new();
            for e in entries {
                let primal_lp = match (lp_grid, IntervalQuery::clipped(e.t, omega, opts.degree)?) {
                    (Some(grid), Some(q)) => Some(primal_lp_oracle(&ms, &q, *grid)?),
                    _ => None,
                };
                let exact = spectrum.as_ref().map(|s| {
                    s.eigenvalues.iter().filter(|&&x| x >= e.t.0 && x <= e.t.1).count() as f64 / s.eigenvalues.len() as f64
                });
                interval_out.push(IntervalOutput { entry: e, primal_lp, exact });
            }
            let sweep = match &opts.sweep {
                None => Vec::new(),
                Some(s) => {
                    let (lo, step, hi) = parse_sweep(s)?;
                    let alphas = sweep_grid(lo, step, hi)?;
                    cdf_bound_sweep(&ms, &alphas, omega, opts.degree, g.tol)
                        .into_iter()
                        .map(|point| SweepOutput { cdf: spectrum.as_ref().map(|s| spectral_cdf(s, point.alpha)), point })
                        .collect()
                }
            };
            let out = EigencountOutput {
                omega,
                k: opts.degree,
                omega_note: explicit.is_none().then_some(report::OMEGA_NOTE),
                intervals: interval_out,
                sweep,
            };
            match g.format {
                Format::Json => to_json(&out),
                Format::Csv => {
                    let rows = out
                        .intervals
                        .iter()
                        .map(|i| {
                            vec![
                                "interval".to_string(),
                                i.entry.t.0.to_string(),
                                i.entry.t.1.to_string(),
                                report::cell(i.entry.result.as_ref().map(|r| r.z_d)),
                                report::cell(i.exact),
                                report::cell(i.primal_lp.as_ref().map(|p| p.value)),
                            ]
                        })
                        .chain(out.sweep.iter().map(|s| {
                            vec![
                                "sweep".to_string(),
                                omega.0.to_string(),
                                s.point.alpha.to_string(),
                                report::cell(s.point.z_d),
                                report::cell(s.cdf),
                                String::new(),
                            ]
                        }));
                    csv_table(&["kind", "t_lo", "t_hi", "z_d", "exact", "primal_lp"], rows)
                }
            }
        }
        Command::Spectrum { path, bins } => {
            let input = resolve(path.as_deref(), g)?;
            let graph = input.require_graph("spectrum")?;
            let s = eigenvalues_capped::<f64>(graph, g.spectrum_cap)?;
            let h = histogram(&s, *bins)?;
            match g.format {
                Format::Json => to_json(&SpectrumOutput {
                    n: graph.node_count(),
                    rho: s.rho,
                    lambda_min: s.lambda_min,
                    eigenvalues: s.eigenvalues.clone(),
                    moments: s.moments.clone(),
                    histogram: h,
                }),
                Format::Csv => csv_table(
                    &["bin_lo", "bin_hi", "count"],
                    h.counts
                        .iter()
                        .enumerate()
                        .map(|(i, c)| vec![h.edges[i].to_string(), h.edges[i + 1].to_string(), c.to_string()]),
                ),
            }
        }
        Command::SampleEgo { path, count, radius } => {
            let input = resolve(path.as_deref(), g)?;
            let graph = input.require_graph("sample-ego")?;
            let batch = ego::sample_ego(graph, *count, *radius, g.seed, g.threads, g.spectrum_cap)?;
            if let Some(w) = &batch.warning {
                eprintln!("warning: {w}");
            }
            match g.format {
                Format::Json => to_json(&batch),
                Format::Csv => ego::ego_csv(&batch),
            }
        }
        Command::Report { reports } => {
            let parsed = reports.iter().map(read_report).collect::<Result<Vec<_>, _>>()?;
            report_csv(&parsed)
        }
    }
}

pub fn read_report(path: &PathBuf) -> Result<AnalysisReport, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}
