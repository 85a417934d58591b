//! The `analyze` pipeline and its serialized report.

use serde::{Deserialize, Serialize};
use spectral_moments::eigencount::{omega_from_graph, omega_from_moments};
use spectral_moments::estimators::estimator_report;
use spectral_moments::spectrum::eigenvalues_capped;
use spectral_moments::{
    aggregates, bounds_s1, bounds_s2, eigencount_upper, is_feasible_hamburger, moments_from_census, moments_from_walks,
    node_census, strong_duality_holds, Bounds, CensusAggregates, Eigencount, Estimators, Graph, IntervalQuery, Moments,
};

use crate::args::GlobalOpts;
use crate::input::Input;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const OMEGA_NOTE: &str = "eigenvalue fractions are bounded over a compact Ω: [-d_max, d_max] for graphs, \
[-sqrt(n m_2), sqrt(n m_2)] for moment files, or the --omega interval; the real line is not used";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub n: u64,
    /// Absent for moment-file input.
    #[serde(default)]
    pub e: Option<u64>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentRoutes {
    #[serde(default)]
    pub census: Option<Moments>,
    #[serde(default)]
    pub walks: Option<Moments>,
    #[serde(default)]
    pub spectrum: Option<Moments>,
    #[serde(default)]
    pub external: Option<Moments>,
}

impl MomentRoutes {
    /// The sequence downstream analyses use: exact census moments when a
    /// graph is available, otherwise the supplied ones.
    pub fn primary(&self) -> Option<&Moments> {
        self.census.as_ref().or(self.external.as_ref())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityEntry {
    pub s: usize,
    #[serde(default)]
    pub feasible: Option<bool>,
    #[serde(default)]
    pub min_eigenvalue: Option<f64>,
    #[serde(default)]
    pub strong_duality: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub s: usize,
    #[serde(default)]
    pub bounds: Option<Bounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumInfo {
    pub rho: f64,
    pub lambda_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigencountEntry {
    pub t: (f64, f64),
    #[serde(default)]
    pub result: Option<Eigencount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub tol: f64,
    pub seed: u64,
    pub index_base: u64,
    pub dedup: bool,
    pub spectrum_cap: usize,
}

impl Config {
    pub fn from_opts(o: &GlobalOpts) -> Self {
        Config { tol: o.tol, seed: o.seed, index_base: o.index_base, dedup: o.dedup, spectrum_cap: o.spectrum_cap }
    }
}

/// Run metadata. Deliberately free of wall-clock time so identical runs
/// produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config: Config,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_note: Option<String>,
}

impl Provenance {
    pub fn new(opts: &GlobalOpts) -> Self {
        Provenance {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: Config::from_opts(opts),
            omega_note: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub graph_meta: GraphMeta,
    #[serde(default)]
    pub census: Option<CensusAggregates<u64>>,
    pub moments: MomentRoutes,
    #[serde(default)]
    pub feasibility: Vec<FeasibilityEntry>,
    #[serde(default)]
    pub bounds: Vec<BoundEntry>,
    #[serde(default)]
    pub estimators: Option<Estimators>,
    #[serde(default)]
    pub spectrum: Option<SpectrumInfo>,
    #[serde(default)]
    pub eigencount: Vec<EigencountEntry>,
    pub provenance: Provenance,
}

impl AnalysisReport {
    pub fn bound(&self, s: usize) -> Option<&Bounds> {
        self.bounds.iter().find(|b| b.s == s).and_then(|b| b.bounds.as_ref())
    }
}

/// Moment routes for a graph; the spectral route only when `n <= cap`.
pub fn graph_moments(g: &Graph, cap: usize) -> Result<(MomentRoutes, Option<CensusAggregates<u64>>, Option<SpectrumInfo>), CliError> {
    let census = node_census(g)?;
    let agg = aggregates(&census)?;
    let mut routes = MomentRoutes {
        census: Some(moments_from_census(&census)?.to_sequence()),
        walks: Some(moments_from_walks(g, 5)?.to_sequence()),
        ..Default::default()
    };
    let mut info = None;
    if g.node_count() <= cap {
        let s = eigenvalues_capped::<f64>(g, cap)?;
        info = Some(SpectrumInfo { rho: s.rho, lambda_min: s.lambda_min });
        routes.spectrum = Some(s.moments);
    }
    Ok((routes, Some(agg), info))
}

pub fn feasibility_entries(ms: &Moments) -> Vec<FeasibilityEntry> {
    (1..=2)
        .map(|s| match is_feasible_hamburger(ms, s, None) {
            Ok(f) => FeasibilityEntry {
                s,
                feasible: Some(f.feasible),
                min_eigenvalue: Some(f.min_eigenvalue),
                strong_duality: strong_duality_holds(ms, s, None).ok(),
                error: None,
            },
            Err(e) => FeasibilityEntry { s, feasible: None, min_eigenvalue: None, strong_duality: None, error: Some(e.to_string()) },
        })
        .collect()
}

pub fn bound_entries(ms: &Moments) -> Vec<BoundEntry> {
    [(1, bounds_s1(ms)), (2, bounds_s2(ms))]
        .into_iter()
        .map(|(s, r)| match r {
            Ok(b) => BoundEntry { s, bounds: Some(b), error: None },
            Err(e) => BoundEntry { s, bounds: None, error: Some(e.to_string()) },
        })
        .collect()
}

/// Ω for an input: explicit, or the compact default.
pub fn default_omega(input: &Input, ms: &Moments) -> Result<(f64, f64), CliError> {
    Ok(match input.graph() {
        Some(g) => omega_from_graph(g),
        None => omega_from_moments(ms)?,
    })
}

pub fn eigencount_entries(ms: &Moments, intervals: &[(f64, f64)], omega: (f64, f64), k: usize, tol: f64) -> Result<Vec<EigencountEntry>, CliError> {
    intervals
        .iter()
        .map(|&t| {
            let q = IntervalQuery::clipped(t, omega, k)?;
            Ok(match q {
                None => EigencountEntry { t, result: None, error: Some("interval lies outside Ω; the fraction is 0".into()) },
                Some(q) => match eigencount_upper(ms, &q, tol) {
                    Ok(r) => EigencountEntry { t, result: Some(r), error: None },
                    Err(e) => EigencountEntry { t, result: None, error: Some(e.to_string()) },
                },
            })
        })
        .collect()
}

/// census -> moments -> feasibility -> bounds -> estimators (+ spectrum, eigencount).
pub fn analyze(
    input: &Input,
    opts: &GlobalOpts,
    intervals: &[(f64, f64)],
    omega: Option<(f64, f64)>,
    k: usize,
) -> Result<AnalysisReport, CliError> {
    let (moments, census, spectrum, meta) = match input {
        Input::Graph { graph, source } => {
            let (routes, agg, info) = graph_moments(graph, opts.spectrum_cap)?;
            let meta = GraphMeta { n: graph.node_count() as u64, e: Some(graph.edge_count() as u64), source: source.clone() };
            (routes, agg, info, meta)
        }
        Input::Moments { moments, source } => {
            let routes = MomentRoutes { external: Some(moments.clone()), ..Default::default() };
            (routes, None, None, GraphMeta { n: moments.n, e: None, source: source.clone() })
        }
    };
    let ms = moments.primary().expect("every input yields a moment sequence").clone();
    let estimators = match (input.graph(), &census) {
        (Some(g), Some(agg)) => Some(estimator_report(g, &agg.to_real::<f64>())),
        _ => None,
    };
    let mut provenance = Provenance::new(opts);
    let eigencount = if intervals.is_empty() {
        Vec::new()
    } else {
        if omega.is_none() {
            provenance.omega_note = Some(OMEGA_NOTE.into());
        }
        let omega = match omega {
            Some(o) => o,
            None => default_omega(input, &ms)?,
        };
        eigencount_entries(&ms, intervals, omega, k, opts.tol)?
    };
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        graph_meta: meta,
        census,
        feasibility: feasibility_entries(&ms),
        bounds: bound_entries(&ms),
        moments,
        estimators,
        spectrum,
        eigencount,
        provenance,
    })
}

pub const REPORT_COLUMNS: [&str; 20] = [
    "source", "n", "e", "m2", "m3", "m4", "m5", "alpha1", "beta1", "alpha2", "beta2", "u1", "u2", "W", "lambda_a",
    "lambda_b", "rho", "lambda_min", "feasible_s2", "strong_duality_s2",
];

/// Empty for `None`; otherwise the shortest decimal that round-trips.
pub fn cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per report, fixed column order.
pub fn report_csv(reports: &[AnalysisReport]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_COLUMNS).map_err(|e| CliError::Io(e.to_string()))?;
    for r in reports {
        let m = r.moments.primary();
        let mk = |k: usize| cell(m.and_then(|m| m.m.get(k).copied()));
        let est = r.estimators.as_ref();
        let f2 = r.feasibility.iter().find(|f| f.s == 2);
        let row = vec![
            r.graph_meta.source.clone(),
            r.graph_meta.n.to_string(),
            cell(r.graph_meta.e),
            mk(2),
            mk(3),
            mk(4),
            mk(5),
            cell(r.bound(1).map(|b| b.alpha)),
            cell(r.bound(1).map(|b| b.beta)),
            cell(r.bound(2).map(|b| b.alpha)),
            cell(r.bound(2).map(|b| b.beta)),
            cell(est.and_then(|e| e.u1)),
            cell(est.and_then(|e| e.u2)),
            cell(est.and_then(|e| e.w)),
            cell(est.and_then(|e| e.lambda_a)),
            cell(est.and_then(|e| e.lambda_b)),
            cell(r.spectrum.as_ref().map(|s| s.rho)),
            cell(r.spectrum.as_ref().map(|s| s.lambda_min)),
            cell(f2.and_then(|f| f.feasible)),
            cell(f2.and_then(|f| f.strong_duality)),
        ];
        w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
