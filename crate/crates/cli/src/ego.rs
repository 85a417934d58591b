//! Batch analysis of ego subgraphs around randomly chosen roots.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spectral_moments::estimators::{chung_lu_estimator, classical_bounds, social_estimators};
use spectral_moments::graph::{ego_subgraph, EgoSpec};
use spectral_moments::spectrum::eigenvalues_capped;
use spectral_moments::{aggregates, bounds_s1, bounds_s2, moments_from_census, node_census, Graph};

use crate::report::cell;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoRow {
    /// Root label in the input numbering.
    pub root: u64,
    pub nodes: usize,
    pub edges: usize,
    pub rho: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub u1: Option<f64>,
    pub u2: Option<f64>,
    #[serde(rename = "W")]
    pub w: Option<f64>,
    pub lambda_a: Option<f64>,
    pub lambda_b: Option<f64>,
    /// Why some fields are missing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub estimator: String,
    /// Rows where both the estimator and ρ are defined.
    pub pairs: usize,
    pub pearson: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoBatch {
    pub radius: usize,
    pub seed: u64,
    pub requested: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub rows: Vec<EgoRow>,
    pub correlations: Vec<Correlation>,
}

pub const EGO_COLUMNS: [&str; 11] =
    ["root", "nodes", "edges", "rho", "beta1", "beta2", "u1", "u2", "W", "lambda_a", "lambda_b"];

fn analyze_ego(g: &Graph, root: usize, radius: usize, cap: usize) -> Result<EgoRow, CliError> {
    let (sub, _) = ego_subgraph(g, EgoSpec { root, radius })?;
    let mut row = EgoRow {
        root: g.label(root),
        nodes: sub.node_count(),
        edges: sub.edge_count(),
        rho: None,
        beta1: None,
        beta2: None,
        u1: None,
        u2: None,
        w: None,
        lambda_a: None,
        lambda_b: None,
        notes: Vec::new(),
    };
    let census = node_census(&sub)?;
    let ms = moments_from_census(&census)?.to_sequence::<f64>();
    match bounds_s1(&ms) {
        Ok(b) => row.beta1 = Some(b.beta),
        Err(e) => row.notes.push(format!("level-1 bounds: {e}")),
    }
    match bounds_s2(&ms) {
        Ok(b) => row.beta2 = Some(b.beta),
        Err(e) => row.notes.push(format!("level-2 bounds: {e}")),
    }
    match classical_bounds::<f64>(&sub) {
        Ok(c) => {
            row.u1 = Some(c.u1);
            row.u2 = Some(c.u2);
        }
        Err(e) => row.notes.push(format!("classical bounds: {e}")),
    }
    row.w = chung_lu_estimator(&sub.degrees()).ok();
    let (la, lb) = social_estimators(&aggregates(&census)?.to_real::<f64>());
    row.lambda_a = la;
    row.lambda_b = lb;
    match eigenvalues_capped::<f64>(&sub, cap) {
        Ok(s) => row.rho = Some(s.rho),
        Err(e) => row.notes.push(format!("spectrum: {e}")),
    }
    Ok(row)
}

/// Pearson correlation; `None` with fewer than two pairs or zero variance.
pub fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn correlations(rows: &[EgoRow]) -> Vec<Correlation> {
    let fields: [(&str, fn(&EgoRow) -> Option<f64>); 7] = [
        ("beta1", |r| r.beta1),
        ("beta2", |r| r.beta2),
        ("u1", |r| r.u1),
        ("u2", |r| r.u2),
        ("W", |r| r.w),
        ("lambda_a", |r| r.lambda_a),
        ("lambda_b", |r| r.lambda_b),
    ];
    fields
        .iter()
        .map(|(name, get)| {
            let pairs: Vec<(f64, f64)> = rows.iter().filter_map(|r| Some((get(r)?, r.rho?))).collect();
            Correlation { estimator: name.to_string(), pairs: pairs.len(), pearson: pearson(&pairs) }
        })
        .collect()
}

/// Seeded root choice, parallel per-root analysis, rows in root order.
pub fn sample_ego(
    g: &Graph,
    count: usize,
    radius: usize,
    seed: u64,
    threads: Option<usize>,
    cap: usize,
) -> Result<EgoBatch, CliError> {
    if count == 0 {
        return Err(CliError::Usage("--count must be at least 1".into()));
    }
    if radius == 0 {
        return Err(CliError::Usage("--radius must be at least 1".into()));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(CliError::Input("graph has no nodes".into()));
    }
    let mut warning = None;
    let take = if count > n {
        warning = Some(format!("requested {count} roots but the graph has {n} nodes; using all of them"));
        n
    } else {
        count
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roots = sample(&mut rng, n, take).into_vec();
    roots.sort_unstable();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    let rows: Vec<EgoRow> =
        pool.install(|| roots.par_iter().map(|&r| analyze_ego(g, r, radius, cap)).collect::<Result<_, _>>())?;
    let correlations = correlations(&rows);
    Ok(EgoBatch { radius, seed, requested: count, warning, rows, correlations })
}

pub fn ego_csv(batch: &EgoBatch) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(EGO_COLUMNS).map_err(|e| CliError::Io(e.to_string()))?;
    for r in &batch.rows {
        w.write_record([
            r.root.to_string(),
            r.nodes.to_string(),
            r.edges.to_string(),
            cell(r.rho),
            cell(r.beta1),
            cell(r.beta2),
            cell(r.u1),
            cell(r.u2),
            cell(r.w),
            cell(r.lambda_a),
            cell(r.lambda_b),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
