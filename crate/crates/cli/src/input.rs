use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use spectral_moments::graph::{generate, load_edge_list, GenParams, Graph, GraphKind, LoadOptions};
use spectral_moments::{MomentSequence, MomentSource};

use crate::args::GlobalOpts;
use crate::CliError;

/// What a command operates on.
#[derive(Debug, Clone)]
pub enum Input {
    Graph { graph: Graph, source: String },
    Moments { moments: MomentSequence<f64>, source: String },
}

impl Input {
    pub fn source(&self) -> &str {
        match self {
            Input::Graph { source, .. } | Input::Moments { source, .. } => source,
        }
    }

    pub fn graph(&self) -> Option<&Graph> {
        match self {
            Input::Graph { graph, .. } => Some(graph),
            Input::Moments { .. } => None,
        }
    }

    pub fn require_graph(&self, what: &str) -> Result<&Graph, CliError> {
        self.graph().ok_or_else(|| CliError::Usage(format!("{what} needs a graph, not a moments file")))
    }
}

/// `kind:n[:p]`.
pub fn parse_generate(spec: &str, seed: u64) -> Result<Graph, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(CliError::Usage(format!("--generate expects kind:n[:p], got `{spec}`")));
    }
    let kind: GraphKind = parts[0].parse().map_err(|e: spectral_moments::Error| CliError::Usage(e.to_string()))?;
    let n: usize = parts[1].parse().map_err(|_| CliError::Usage(format!("bad node count `{}`", parts[1])))?;
    let p = match parts.get(2) {
        Some(s) => s.parse().map_err(|_| CliError::Usage(format!("bad probability `{s}`")))?,
        None if kind == GraphKind::ErdosRenyi => {
            return Err(CliError::Usage("erdos_renyi needs an edge probability: erdos_renyi:n:p".into()))
        }
        None => 0.0,
    };
    generate(kind, n, GenParams { p, seed }).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn load_graph(path: &Path, opts: &GlobalOpts) -> Result<Graph, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    load_edge_list(BufReader::new(file), LoadOptions { index_base: opts.index_base, allow_duplicates: opts.dedup })
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_moments(path: &Path) -> Result<MomentSequence<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let raw: MomentSequence<f64> =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    MomentSequence::new(raw.n, raw.m, raw.source).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Exactly one of a positional edge list, `--generate` or `--moments-file`.
pub fn resolve(path: Option<&Path>, opts: &GlobalOpts) -> Result<Input, CliError> {
    let given = [path.is_some(), opts.generate.is_some(), opts.moments_file.is_some()].iter().filter(|&&b| b).count();
    if given != 1 {
        return Err(CliError::Usage(
            "give exactly one input: an edge-list path, --generate kind:n[:p] or --moments-file".into(),
        ));
    }
    if let Some(p) = path {
        return Ok(Input::Graph { graph: load_graph(p, opts)?, source: p.display().to_string() });
    }
    if let Some(spec) = &opts.generate {
        return Ok(Input::Graph { graph: parse_generate(spec, opts.seed)?, source: format!("generate:{spec}") });
    }
    let p = opts.moments_file.as_deref().unwrap();
    let mut moments = load_moments(p)?;
    moments.source = MomentSource::External;
    Ok(Input::Moments { moments, source: p.display().to_string() })
}

/// `lo,hi`.
pub fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let mut it = s.split(',').map(|t| t.trim().parse::<f64>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) if a.is_finite() && b.is_finite() => Ok((a, b)),
        _ => Err(CliError::Usage(format!("{what} expects lo,hi, got `{s}`"))),
    }
}

/// `lo:step:hi`.
pub fn parse_sweep(s: &str) -> Result<(f64, f64, f64), CliError> {
    let v: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("--sweep expects lo:step:hi, got `{s}`")))?;
    match v.as_slice() {
        [lo, step, hi] => Ok((*lo, *step, *hi)),
        _ => Err(CliError::Usage(format!("--sweep expects lo:step:hi, got `{s}`"))),
    }
}
