//! Local structural counts: degrees, triangles, quadrangles and pentagons per
//! node, plus graph-level aggregates.
//!
//! Triangles come from sorted-list intersection along each edge. Quadrangle
//! and pentagon counts are recovered from the diagonal of `A^4` and `A^5`
//! after subtracting the closed walks that do not trace a simple cycle; the
//! diagonal itself is computed from the sparse two-hop row of `A^2`, so no
//! dense power is ever formed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{from_count, Scalar};

/// Per-node counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeCensus {
    pub d: Vec<u64>,
    pub t: Vec<u64>,
    pub q: Vec<u64>,
    pub p: Vec<u64>,
}

/// Graph totals. Generic over the count type so that published per-node
/// averages (real numbers) can be fed through the same formulas as exact
/// integer census results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusAggregates<C> {
    pub n: u64,
    /// Edges.
    pub e: C,
    /// Triangles.
    #[serde(rename = "Delta")]
    pub delta: C,
    /// Quadrangles.
    #[serde(rename = "Q")]
    pub quadrangles: C,
    /// Pentagons.
    #[serde(rename = "Pi")]
    pub pentagons: C,
    /// Sum of squared degrees.
    #[serde(rename = "W2")]
    pub w2: C,
    /// Degree-triangle correlation, sum of d_i * t_i.
    #[serde(rename = "Cdt")]
    pub cdt: C,
}

/// Diagonals of `A^k` for k = 2..=5.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkDiagonals {
    pub w2: Vec<u64>,
    pub w3: Vec<u64>,
    pub w4: Vec<u64>,
    pub w5: Vec<u64>,
}

/// Closed 4-walks split by the shape of the subgraph they trace:
/// (a) a quadrangle, (b) a two-edge path started at its center,
/// (c) a two-edge path started at an end, (d) a single edge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTypes4 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

/// Closed 5-walks split by shape: (a) a pentagon; a triangle with one pendant
/// edge started at (b) the pendant end, (c) a triangle vertex other than the
/// attachment point, (d) the attachment point; (e)+(f) walks that only use the
/// three triangle edges (8 + 2 per triangle and start node).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkTypes5 {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
    pub e: u64,
    pub f: u64,
}

impl WalkTypes4 {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }
}

impl WalkTypes5 {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d + self.e + self.f
    }
}

/// Everything the census computes on the way to [`NodeCensus`].
#[derive(Debug, Clone)]
pub struct CensusDetail {
    pub census: NodeCensus,
    pub walks: WalkDiagonals,
    /// Triangles through each directed adjacency slot, parallel to the
    /// graph's flat neighbor array (`t_ij = |N(i) ∩ N(j)|`).
    pub edge_triangles: Vec<u64>,
}

fn to_u64(x: u128, what: &'static str) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::Overflow(what))
}

fn half_exact(x: i128, what: &str, node: usize) -> Result<u64> {
    if x < 0 || x % 2 != 0 {
        return Err(Error::Consistency(format!(
            "{what} residual {x} at node {node} is negative or odd"
        )));
    }
    u64::try_from(x / 2).map_err(|_| Error::Overflow("cycle count"))
}

/// Closed-walk counts of length 2..=5 starting at `i`.
///
/// `scratch` must be all zeros of length n on entry and is restored on exit.
fn node_walks(g: &Graph, i: usize, scratch: &mut [u64], touched: &mut Vec<u32>) -> Result<[u128; 4]> {
    touched.clear();
    for &x in g.neighbors(i) {
        for &j in g.neighbors(x as usize) {
            let s = &mut scratch[j as usize];
            if *s == 0 {
                touched.push(j);
            }
            *s += 1;
        }
    }
    let w2 = scratch[i] as u128;
    let w3: u128 = g.neighbors(i).iter().map(|&x| scratch[x as usize] as u128).sum();
    let mut w4: u128 = 0;
    let mut w5: u128 = 0;
    for &j in touched.iter() {
        let wj = scratch[j as usize] as u128;
        w4 = w4.checked_add(wj * wj).ok_or(Error::Overflow("closed 4-walks"))?;
        let inner: u128 = g.neighbors(j as usize).iter().map(|&l| scratch[l as usize] as u128).sum();
        w5 = w5.checked_add(wj * inner).ok_or(Error::Overflow("closed 5-walks"))?;
    }
    for &j in touched.iter() {
        scratch[j as usize] = 0;
    }
    Ok([w2, w3, w4, w5])
}

/// Number of closed walks of length `k` starting and ending at each node.
pub fn walk_diagonal(g: &Graph, k: usize) -> Result<Vec<u64>> {
    match k {
        0 => Ok(vec![1; g.node_count()]),
        1 => Ok(vec![0; g.node_count()]),
        2 => Ok(g.degrees().into_iter().map(|d| d as u64).collect()),
        3..=5 => {
            let all = walk_diagonals(g)?;
            Ok(match k {
                3 => all.w3,
                4 => all.w4,
                _ => all.w5,
            })
        }
        _ => Err(Error::InvalidArgument(format!("closed walks of length {k} are not supported (max 5)"))),
    }
}

/// Diagonals of `A^2..A^5` in one pass.
pub fn walk_diagonals(g: &Graph) -> Result<WalkDiagonals> {
    let n = g.node_count();
    let rows: Vec<[u128; 4]> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u64; n], Vec::new()),
            |(scratch, touched), i| node_walks(g, i, scratch, touched),
        )
        .collect::<Result<_>>()?;
    let mut out = WalkDiagonals {
        w2: Vec::with_capacity(n),
        w3: Vec::with_capacity(n),
        w4: Vec::with_capacity(n),
        w5: Vec::with_capacity(n),
    };
    for r in rows {
        out.w2.push(to_u64(r[0], "closed 2-walks")?);
        out.w3.push(to_u64(r[1], "closed 3-walks")?);
        out.w4.push(to_u64(r[2], "closed 4-walks")?);
        out.w5.push(to_u64(r[3], "closed 5-walks")?);
    }
    Ok(out)
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> u64 {
    let (mut i, mut j, mut c) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Triangles through each adjacency slot, by sorted-list intersection.
pub fn edge_triangle_counts(g: &Graph) -> Vec<u64> {
    let per_node: Vec<Vec<u64>> = (0..g.node_count())
        .into_par_iter()
        .map(|i| {
            let ni = g.neighbors(i);
            ni.iter().map(|&j| sorted_intersection_len(ni, g.neighbors(j as usize))).collect()
        })
        .collect();
    per_node.into_iter().flatten().collect()
}

/// Full census with the intermediate walk and per-edge triangle data.
pub fn census_detail(g: &Graph) -> Result<CensusDetail> {
    let n = g.node_count();
    let walks = walk_diagonals(g)?;
    let edge_triangles = edge_triangle_counts(g);
    let d: Vec<u64> = (0..n).map(|i| g.degree(i) as u64).collect();

    let mut t = Vec::with_capacity(n);
    for i in 0..n {
        let s: u64 = edge_triangles[g.adjacency_range(i)].iter().sum();
        if !s.is_multiple_of(2) {
            return Err(Error::Consistency(format!("odd triangle incidence at node {i}")));
        }
        t.push(s / 2);
        if 2 * t[i] != walks.w3[i] {
            return Err(Error::Consistency(format!(
                "triangle count {} at node {i} disagrees with closed 3-walks {}",
                t[i], walks.w3[i]
            )));
        }
    }

    let qp: Vec<(u64, u64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let types4 = nontrivial_types4(g, &d, i);
            let r4 = walks.w4[i] as i128 - (types4.b + types4.c + types4.d) as i128;
            let q = half_exact(r4, "quadrangle", i)?;
            let types5 = nontrivial_types5(g, &d, &t, &edge_triangles, i);
            let r5 = walks.w5[i] as i128
                - (types5.b as i128 + types5.c as i128 + types5.d as i128 + types5.e as i128 + types5.f as i128);
            let p = half_exact(r5, "pentagon", i)?;
            Ok((q, p))
        })
        .collect::<Result<_>>()?;
    let (q, p) = qp.into_iter().unzip();
    Ok(CensusDetail { census: NodeCensus { d, t, q, p }, walks, edge_triangles })
}

/// Exact per-node triangle, quadrangle and pentagon counts.
pub fn node_census(g: &Graph) -> Result<NodeCensus> {
    Ok(census_detail(g)?.census)
}

// Types (b)-(d) of closed 4-walks from node i; type (a) is left at zero.
fn nontrivial_types4(g: &Graph, d: &[u64], i: usize) -> WalkTypes4 {
    let di = d[i];
    let c = g.neighbors(i).iter().map(|&j| d[j as usize] - 1).sum();
    WalkTypes4 { a: 0, b: di * di.saturating_sub(1), c, d: di }
}

// Types (b)-(f) of closed 5-walks from node i; type (a) is left at zero.
fn nontrivial_types5(g: &Graph, d: &[u64], t: &[u64], tij: &[u64], i: usize) -> WalkTypes5 {
    let mut b = 0u64;
    let mut c = 0u64;
    for (slot, &j) in g.adjacency_range(i).zip(g.neighbors(i)) {
        let j = j as usize;
        b += 2 * (t[j] - tij[slot]);
        // t_ij > 0 implies d_j >= 2
        c += 2 * tij[slot] * d[j].saturating_sub(2);
    }
    let ti = t[i];
    WalkTypes5 { a: 0, b, c, d: 4 * ti * d[i].saturating_sub(2), e: 8 * ti, f: 2 * ti }
}

/// Per-node split of the closed 4- and 5-walks starting at `i` by walk type.
pub fn node_walk_types(g: &Graph, detail: &CensusDetail, i: usize) -> (WalkTypes4, WalkTypes5) {
    let c = &detail.census;
    let mut w4 = nontrivial_types4(g, &c.d, i);
    w4.a = 2 * c.q[i];
    let mut w5 = nontrivial_types5(g, &c.d, &c.t, &detail.edge_triangles, i);
    w5.a = 2 * c.p[i];
    (w4, w5)
}

/// Graph-wide walk-type totals from the per-node census.
pub fn walk_type_totals(c: &NodeCensus) -> (WalkTypes4, WalkTypes5) {
    let mut w4 = WalkTypes4::default();
    let mut w5 = WalkTypes5::default();
    for i in 0..c.d.len() {
        let (d, t) = (c.d[i], c.t[i]);
        w4.a += 2 * c.q[i];
        w4.b += d * d.saturating_sub(1);
        w4.c += d * d.saturating_sub(1);
        w4.d += d;
        let td2 = t * d.saturating_sub(2);
        w5.a += 2 * c.p[i];
        w5.b += 2 * td2;
        w5.c += 4 * td2;
        w5.d += 4 * td2;
        w5.e += 8 * t;
        w5.f += 2 * t;
    }
    (w4, w5)
}

/// Totals from a per-node census. Fails if a cycle total is not divisible by
/// its length, which can only happen if the census is wrong.
pub fn aggregates(c: &NodeCensus) -> Result<CensusAggregates<u64>> {
    let n = c.d.len();
    let sum = |v: &[u64]| -> u128 { v.iter().map(|&x| x as u128).sum() };
    let div = |s: u128, k: u128, what: &str| -> Result<u64> {
        if !s.is_multiple_of(k) {
            return Err(Error::Consistency(format!("sum of per-node {what} counts {s} not divisible by {k}")));
        }
        to_u64(s / k, "aggregate")
    };
    let e = div(sum(&c.d), 2, "degree")?;
    let delta = div(sum(&c.t), 3, "triangle")?;
    let quadrangles = div(sum(&c.q), 4, "quadrangle")?;
    let pentagons = div(sum(&c.p), 5, "pentagon")?;
    let w2 = to_u64(c.d.iter().map(|&d| d as u128 * d as u128).sum(), "sum of squared degrees")?;
    let cdt = to_u64(
        c.d.iter().zip(&c.t).map(|(&d, &t)| d as u128 * t as u128).sum(),
        "degree-triangle correlation",
    )?;
    Ok(CensusAggregates { n: n as u64, e, delta, quadrangles, pentagons, w2, cdt })
}

impl CensusAggregates<u64> {
    pub fn to_real<T: Scalar>(&self) -> CensusAggregates<T> {
        let f = |x: u64| from_count::<T>(x as u128);
        CensusAggregates {
            n: self.n,
            e: f(self.e),
            delta: f(self.delta),
            quadrangles: f(self.quadrangles),
            pentagons: f(self.pentagons),
            w2: f(self.w2),
            cdt: f(self.cdt),
        }
    }
}

impl<T: Scalar> CensusAggregates<T> {
    /// Totals from per-node averages (e/n, Δ/n, Q/n, Π/n, W2/n, Cdt/n), the
    /// form in which network summaries are usually published.
    #[allow(clippy::too_many_arguments)]
    pub fn from_per_node_averages(n: u64, e: T, delta: T, quadrangles: T, pentagons: T, w2: T, cdt: T) -> Self {
        let nn = from_count::<T>(n as u128);
        CensusAggregates {
            n,
            e: e * nn,
            delta: delta * nn,
            quadrangles: quadrangles * nn,
            pentagons: pentagons * nn,
            w2: w2 * nn,
            cdt: cdt * nn,
        }
    }
}

/// Number of distinct `k`-cycles through node `i`, by depth-first enumeration
/// of simple paths. Exponential; intended as a test oracle on small graphs.
pub fn brute_force_cycles(g: &Graph, k: usize, i: usize) -> Result<u64> {
    if !(3..=5).contains(&k) {
        return Err(Error::InvalidArgument(format!("cycle length {k} not in 3..=5")));
    }
    if i >= g.node_count() {
        return Err(Error::InvalidArgument(format!("node {i} out of range")));
    }
    fn extend(g: &Graph, start: usize, path: &mut Vec<usize>, k: usize, count: &mut u64) {
        let last = *path.last().unwrap();
        if path.len() == k {
            if g.has_edge(last, start) {
                *count += 1;
            }
            return;
        }
        for &v in g.neighbors(last) {
            let v = v as usize;
            if !path.contains(&v) {
                path.push(v);
                extend(g, start, path, k, count);
                path.pop();
            }
        }
    }
    let mut count = 0;
    let mut path = vec![i];
    extend(g, i, &mut path, k, &mut count);
    // every cycle is traced once in each direction
    Ok(count / 2)
}

impl NodeCensus {
    pub fn node_count(&self) -> usize {
        self.d.len()
    }

    /// CSV with header `node,d,t,q,p`; `base` offsets the node column.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W, base: u64) -> std::io::Result<()> {
        writeln!(w, "node,d,t,q,p")?;
        for i in 0..self.d.len() {
            writeln!(w, "{},{},{},{},{}", i as u64 + base, self.d[i], self.t[i], self.q[i], self.p[i])?;
        }
        Ok(())
    }
}
