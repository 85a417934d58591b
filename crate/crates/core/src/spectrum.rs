//! Dense spectral ground truth for graphs small enough to decompose.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::moments::{moments_from_spectrum, MomentSequence, MAX_STRUCTURAL_ORDER};
use crate::scalar::Scalar;

/// Largest node count `eigenvalues` accepts by default.
pub const DEFAULT_SPECTRUM_CAP: usize = 5000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary<T> {
    /// Sorted descending.
    pub eigenvalues: Vec<T>,
    pub rho: T,
    pub lambda_min: T,
    pub moments: MomentSequence<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram<T> {
    /// `bins + 1` edges spanning `[lambda_min, rho]`.
    pub edges: Vec<T>,
    pub counts: Vec<usize>,
}

/// Dense adjacency matrix.
pub fn adjacency_matrix<T: Scalar>(g: &Graph) -> Matrix<T> {
    let n = g.node_count();
    let mut a = Matrix::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = T::one();
        a[(v, u)] = T::one();
    }
    a
}

pub fn eigenvalues<T: Scalar>(g: &Graph) -> Result<SpectrumSummary<T>> {
    eigenvalues_capped(g, DEFAULT_SPECTRUM_CAP)
}

pub fn eigenvalues_capped<T: Scalar>(g: &Graph, cap: usize) -> Result<SpectrumSummary<T>> {
    let n = g.node_count();
    if n > cap {
        return Err(Error::TooLarge { n, cap });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no nodes".into()));
    }
    let (mut values, _) = symmetric_eigen(&adjacency_matrix::<T>(g), false)?;
    values.reverse();
    summarize(values)
}

/// Summary of an explicit spectrum; the input order is irrelevant.
pub fn summarize<T: Scalar>(mut values: Vec<T>) -> Result<SpectrumSummary<T>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let moments = moments_from_spectrum(&values, MAX_STRUCTURAL_ORDER)?;
    Ok(SpectrumSummary { rho: values[0], lambda_min: values[values.len() - 1], eigenvalues: values, moments })
}

/// Rounding slack for comparisons against computed eigenvalues: integer
/// spectra such as `-1` for `K_3` come back off by a few ulps.
fn slack<T: Scalar>(s: &SpectrumSummary<T>) -> T {
    T::epsilon() * T::from_usize(64).unwrap() * T::one().max(s.rho.abs()).max(s.lambda_min.abs())
}

/// Fraction of eigenvalues `<= alpha`, up to rounding slack.
pub fn spectral_cdf<T: Scalar>(s: &SpectrumSummary<T>, alpha: T) -> T {
    let tol = slack(s);
    let below = s.eigenvalues.iter().filter(|&&x| x <= alpha + tol).count();
    T::from_usize(below).unwrap() / T::from_usize(s.eigenvalues.len()).unwrap()
}

/// Equal-width histogram over `[lambda_min, rho]`. Bins are half-open except
/// the last; values within rounding slack of an edge count as on the edge.
pub fn histogram<T: Scalar>(s: &SpectrumSummary<T>, bins: usize) -> Result<Histogram<T>> {
    if bins == 0 {
        return Err(Error::InvalidArgument("histogram needs at least one bin".into()));
    }
    let (lo, hi) = (s.lambda_min, s.rho);
    let nb = T::from_usize(bins).unwrap();
    let width = (hi - lo) / nb;
    let edges = (0..=bins).map(|i| lo + width * T::from_usize(i).unwrap()).collect();
    let mut counts = vec![0usize; bins];
    let tol = slack(s);
    for &x in &s.eigenvalues {
        let idx = if width > T::zero() {
            let pos = (x - lo) / width;
            let nearest = pos.round();
            let pos = if (pos - nearest).abs() * width <= tol { nearest } else { pos };
            pos.floor().to_usize().unwrap_or(0)
        } else {
            0
        };
        counts[idx.min(bins - 1)] += 1;
    }
    Ok(Histogram { edges, counts })
}
