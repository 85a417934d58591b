//! Undirected simple graphs in compressed sorted-adjacency form.

use std::collections::VecDeque;
use std::io::BufRead;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable undirected simple graph.
///
/// Adjacency is stored CSR-style: the neighbors of `i` are
/// `targets[offsets[i]..offsets[i + 1]]`, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    /// Label of node 0 in the source numbering (0 or 1 for edge lists).
    index_base: u64,
}

/// Options for [`load_edge_list`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadOptions {
    pub index_base: u64,
    /// Silently drop duplicate edges and self-loops instead of rejecting them.
    pub allow_duplicates: bool,
}

/// Radius-limited neighborhood request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgoSpec {
    pub root: usize,
    pub radius: usize,
}

/// Synthetic graph families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Ring,
    Complete,
    Star,
    Path,
    ErdosRenyi,
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ring" | "cycle" => Ok(GraphKind::Ring),
            "complete" => Ok(GraphKind::Complete),
            "star" => Ok(GraphKind::Star),
            "path" => Ok(GraphKind::Path),
            "erdos_renyi" | "er" | "gnp" => Ok(GraphKind::ErdosRenyi),
            other => Err(Error::InvalidArgument(format!("unknown graph kind `{other}`"))),
        }
    }
}

/// Parameters for the random families.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GenParams {
    pub p: f64,
    pub seed: u64,
}

impl Graph {
    /// Builds a graph from an edge iterator. Loops and duplicates are
    /// rejected unless `dedup` is set, in which case they are dropped.
    pub fn from_edges<I>(n: usize, edges: I, dedup: bool) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::InvalidArgument(format!("{n} nodes exceed the u32 index space")));
        }
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                if dedup {
                    continue;
                }
                return Err(Error::Validation(format!("self-loop at node {u}")));
            }
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for (i, mut list) in lists.into_iter().enumerate() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before && !dedup {
                return Err(Error::Validation(format!("duplicate edge at node {i}")));
            }
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        let g = Graph { offsets, targets, index_base: 0 };
        debug_assert!(g.validate().is_ok());
        Ok(g)
    }

    pub fn empty(n: usize) -> Graph {
        Graph { offsets: vec![0; n + 1], targets: Vec::new(), index_base: 0 }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Offset of `i`'s adjacency slice in the flat target array; per-edge
    /// data can be stored parallel to it.
    #[inline]
    pub fn adjacency_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.node_count()).map(|i| self.degree(i)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.node_count()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.node_count()).map(|i| self.degree(i)).min().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u).iter().map(|&v| v as usize).filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    pub fn index_base(&self) -> u64 {
        self.index_base
    }

    /// Source label of node `i`.
    pub fn label(&self, i: usize) -> u64 {
        i as u64 + self.index_base
    }

    /// Full structural re-check of the simple-graph invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if self.offsets[0] != 0 || *self.offsets.last().unwrap() != self.targets.len() {
            return Err(Error::Validation("corrupt offsets".into()));
        }
        for i in 0..n {
            let nb = self.neighbors(i);
            for w in nb.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::Validation(format!("adjacency of {i} not strictly increasing")));
                }
            }
            for &j in nb {
                let j = j as usize;
                if j >= n {
                    return Err(Error::Validation(format!("neighbor {j} of {i} out of range")));
                }
                if j == i {
                    return Err(Error::Validation(format!("self-loop at {i}")));
                }
                if !self.has_edge(j, i) {
                    return Err(Error::Validation(format!("edge {i}->{j} has no reverse")));
                }
            }
        }
        if !self.targets.len().is_multiple_of(2) {
            return Err(Error::Validation("odd degree sum".into()));
        }
        Ok(())
    }

    /// Hop distances from `root`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[root] = Some(0);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in self.neighbors(u) {
                let v = v as usize;
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Subgraph induced by `nodes`, renumbered in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut local = vec![u32::MAX; self.node_count()];
        for (k, &v) in nodes.iter().enumerate() {
            local[v] = k as u32;
        }
        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for &v in nodes {
            let start = targets.len();
            targets.extend(self.neighbors(v).iter().map(|&w| local[w as usize]).filter(|&w| w != u32::MAX));
            targets[start..].sort_unstable();
            offsets.push(targets.len());
        }
        Graph { offsets, targets, index_base: 0 }
    }
}

fn parse_token(tok: Option<&str>, line: usize) -> Result<u64> {
    let tok = tok.ok_or_else(|| Error::Parse { line, message: "expected two node indices".into() })?;
    tok.parse::<u64>()
        .map_err(|e| Error::Parse { line, message: format!("bad node index `{tok}`: {e}") })
}

/// Reads a whitespace-delimited edge list. Lines starting with `#` (and blank
/// lines) are skipped; tokens after the first two on a line are ignored.
pub fn load_edge_list<R: BufRead>(reader: R, options: LoadOptions) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_index: Option<usize> = None;
    for (k, line) in reader.lines().enumerate() {
        let lineno = k + 1;
        let line = line.map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let u = parse_token(toks.next(), lineno)?;
        let v = parse_token(toks.next(), lineno)?;
        let rebase = |x: u64| -> Result<usize> {
            x.checked_sub(options.index_base).map(|x| x as usize).ok_or_else(|| Error::Parse {
                line: lineno,
                message: format!("index {x} below index base {}", options.index_base),
            })
        };
        let (u, v) = (rebase(u)?, rebase(v)?);
        if u == v && !options.allow_duplicates {
            return Err(Error::Validation(format!("self-loop at node {} (line {lineno})", u as u64 + options.index_base)));
        }
        max_index = Some(max_index.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v));
    }
    let n = max_index.map_or(0, |m| m + 1);
    let mut g = Graph::from_edges(n, edges, options.allow_duplicates)?;
    g.index_base = options.index_base;
    Ok(g)
}

/// Extracts the subgraph induced by all nodes within `spec.radius` hops of
/// `spec.root`. The returned map lists original node indices in BFS order.
pub fn ego_subgraph(g: &Graph, spec: EgoSpec) -> Result<(Graph, Vec<usize>)> {
    if spec.root >= g.node_count() {
        return Err(Error::InvalidArgument(format!(
            "root {} out of range for {} nodes",
            spec.root,
            g.node_count()
        )));
    }
    if spec.radius == 0 {
        return Err(Error::InvalidArgument("ego radius must be at least 1".into()));
    }
    let mut seen = vec![false; g.node_count()];
    let mut order = vec![spec.root];
    seen[spec.root] = true;
    let mut frontier_start = 0;
    for _ in 0..spec.radius {
        let frontier_end = order.len();
        for k in frontier_start..frontier_end {
            let u = order[k];
            for &v in g.neighbors(u) {
                let v = v as usize;
                if !seen[v] {
                    seen[v] = true;
                    order.push(v);
                }
            }
        }
        if order.len() == frontier_end {
            break;
        }
        frontier_start = frontier_end;
    }
    let sub = g.induced_subgraph(&order);
    Ok((sub, order))
}

/// Deterministic synthetic graphs.
///
/// `Star` with `n` nodes has node 0 as hub. `ErdosRenyi` draws each of the
/// `n(n-1)/2` pairs independently with probability `p` from a ChaCha8 stream
/// seeded by `params.seed`.
pub fn generate(kind: GraphKind, n: usize, params: GenParams) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("graph must have at least one node".into()));
    }
    let edges: Vec<(usize, usize)> = match kind {
        GraphKind::Ring => {
            if n < 3 {
                return Err(Error::InvalidArgument("a simple ring needs at least 3 nodes".into()));
            }
            (0..n).map(|i| (i, (i + 1) % n)).collect()
        }
        GraphKind::Complete => (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect(),
        GraphKind::Star => (1..n).map(|i| (0, i)).collect(),
        GraphKind::Path => (1..n).map(|i| (i - 1, i)).collect(),
        GraphKind::ErdosRenyi => {
            if !(0.0..=1.0).contains(&params.p) || params.p.is_nan() {
                return Err(Error::InvalidArgument(format!("edge probability {} not in [0, 1]", params.p)));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let mut edges = Vec::new();
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen::<f64>() < params.p {
                        edges.push((i, j));
                    }
                }
            }
            edges
        }
    };
    Graph::from_edges(n, edges, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str, options: LoadOptions) -> Result<Graph> {
        load_edge_list(s.as_bytes(), options)
    }

    #[test]
    fn loads_two_edge_path() {
        let g = load("0 1\n1 2", LoadOptions::default()).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (3, 2));
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rebases_one_indexed_input() {
        let g = load("1 2\n2 3", LoadOptions { index_base: 1, allow_duplicates: false }).unwrap();
        let h = load("0 1\n1 2", LoadOptions::default()).unwrap();
        assert_eq!(g.neighbors(1), h.neighbors(1));
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.label(0), 1);
    }

    #[test]
    fn rejects_self_loop_without_flag() {
        assert!(matches!(load("0 0", LoadOptions::default()), Err(Error::Validation(_))));
        let g = load("0 0\n0 1\n1 0", LoadOptions { index_base: 0, allow_duplicates: true }).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rejects_duplicates_without_flag() {
        assert!(matches!(load("0 1\n1 0", LoadOptions::default()), Err(Error::Validation(_))));
    }

    #[test]
    fn reports_line_number_of_malformed_line() {
        let err = load("# header\n0 1\n1 x\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = load("0 1\n7\n", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn ego_on_path() {
        let p5 = generate(GraphKind::Path, 5, GenParams::default()).unwrap();
        let (sub, map) = ego_subgraph(&p5, EgoSpec { root: 2, radius: 1 }).unwrap();
        assert_eq!(map, vec![2, 1, 3]);
        assert_eq!(sub.edge_count(), 2);
        let mut edges: Vec<(usize, usize)> =
            sub.edges().map(|(u, v)| (map[u].min(map[v]), map[u].max(map[v]))).collect();
        edges.sort();
        assert_eq!(edges, vec![(1, 2), (2, 3)]);

        let (whole, _) = ego_subgraph(&p5, EgoSpec { root: 2, radius: 2 }).unwrap();
        assert_eq!((whole.node_count(), whole.edge_count()), (5, 4));
    }

    #[test]
    fn ego_on_complete_graph_is_whole_graph() {
        let k4 = generate(GraphKind::Complete, 4, GenParams::default()).unwrap();
        let (sub, _) = ego_subgraph(&k4, EgoSpec { root: 0, radius: 1 }).unwrap();
        assert_eq!((sub.node_count(), sub.edge_count()), (4, 6));
    }

    #[test]
    fn ego_rejects_bad_root() {
        let g = Graph::empty(3);
        assert!(ego_subgraph(&g, EgoSpec { root: 3, radius: 1 }).is_err());
        let (sub, map) = ego_subgraph(&g, EgoSpec { root: 1, radius: 2 }).unwrap();
        assert_eq!((sub.node_count(), map), (1, vec![1]));
    }

    #[test]
    fn generators_match_definitions() {
        let r6 = generate(GraphKind::Ring, 6, GenParams::default()).unwrap();
        assert!(r6.degrees().iter().all(|&d| d == 2));
        assert_eq!(r6.edge_count(), 6);
        let k4 = generate(GraphKind::Complete, 4, GenParams::default()).unwrap();
        assert_eq!(k4.edge_count(), 6);
        let s5 = generate(GraphKind::Star, 5, GenParams::default()).unwrap();
        assert_eq!(s5.degrees(), vec![4, 1, 1, 1, 1]);
        assert!(generate(GraphKind::Ring, 0, GenParams::default()).is_err());
        assert!(generate(GraphKind::ErdosRenyi, 5, GenParams { p: 1.5, seed: 0 }).is_err());
    }

    #[test]
    fn erdos_renyi_is_deterministic() {
        let params = GenParams { p: 0.2, seed: 7 };
        let a = generate(GraphKind::ErdosRenyi, 30, params).unwrap();
        let b = generate(GraphKind::ErdosRenyi, 30, params).unwrap();
        assert_eq!(a, b);
        let c = generate(GraphKind::ErdosRenyi, 30, GenParams { p: 0.2, seed: 8 }).unwrap();
        assert_ne!(a, c);
    }
}
