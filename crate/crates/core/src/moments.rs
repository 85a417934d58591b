//! Spectral moments `m_k = (1/n) Σ λ_i^k` of the adjacency matrix.
//!
//! Three independent routes are provided: local structure (census or its
//! aggregates), closed-walk counting, and explicit eigenvalues. The first two
//! are exact: they produce [`ExactMoments`], integer numerators over the
//! common denominator `n`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::census::{CensusAggregates, NodeCensus};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{compensated_sum, from_count, lit, Scalar};

/// Highest moment order derived from graph structure.
pub const MAX_STRUCTURAL_ORDER: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    Census,
    Walks,
    Spectrum,
    External,
}

/// Moment sequence `(m_0 = 1, m_1, ..., m_k)` of a spectral measure over `n`
/// eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence<T> {
    pub n: u64,
    pub m: Vec<T>,
    pub source: MomentSource,
}

impl<T: Clone> MomentSequence<T> {
    /// Highest available order `k`.
    pub fn order(&self) -> usize {
        self.m.len().saturating_sub(1)
    }

    pub fn require(&self, k: usize) -> Result<()> {
        if self.m.len() <= k {
            return Err(Error::InsufficientMoments { needed: k, available: self.order() });
        }
        Ok(())
    }

    /// Copy restricted to `m_0..m_k`.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        self.require(k)?;
        Ok(MomentSequence { n: self.n, m: self.m[..=k].to_vec(), source: self.source })
    }
}

impl<T: Scalar> MomentSequence<T> {
    /// Validates `m_0 = 1` (to rounding) and finiteness.
    pub fn new(n: u64, m: Vec<T>, source: MomentSource) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidArgument("moment sequence is empty".into()));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("moment sequence needs n >= 1".into()));
        }
        if (m[0] - T::one()).abs() > lit(1e-9) {
            return Err(Error::InvalidArgument(format!("m_0 must be 1, got {}", m[0])));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("moments must be finite".into()));
        }
        Ok(MomentSequence { n, m, source })
    }

    /// Builds a sequence from `(m_1, ..., m_k)`, prepending `m_0 = 1`.
    pub fn from_tail(n: u64, tail: &[T], source: MomentSource) -> Result<Self> {
        let mut m = Vec::with_capacity(tail.len() + 1);
        m.push(T::one());
        m.extend_from_slice(tail);
        Self::new(n, m, source)
    }

    /// Cauchy-Schwarz style sanity checks that any spectral measure obeys:
    /// `m_2 >= 0` and `m_4 >= m_2^2` when available.
    pub fn check_measure_inequalities(&self) -> Result<()> {
        if self.m.len() > 2 && self.m[2] < T::zero() {
            return Err(Error::InvalidArgument(format!("negative second moment {}", self.m[2])));
        }
        if self.m.len() > 4 {
            let slack = self.m[4] - self.m[2] * self.m[2];
            if slack < -lit::<T>(1e-9) * (T::one() + self.m[4].abs()) {
                return Err(Error::InvalidArgument(format!("m_4 = {} < m_2^2 = {}", self.m[4], self.m[2] * self.m[2])));
            }
        }
        Ok(())
    }

    /// Largest relative difference `|a_k - b_k| / max(1, |a_k|, |b_k|)` over
    /// the common orders.
    pub fn max_relative_difference(&self, other: &Self) -> T {
        self.m
            .iter()
            .zip(&other.m)
            .map(|(&a, &b)| (a - b).abs() / T::one().max(a.abs()).max(b.abs()))
            .fold(T::zero(), T::max)
    }
}

/// Moments as exact closed-walk totals: `closed_walks[k] = n * m_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMoments {
    pub n: u64,
    pub closed_walks: Vec<u128>,
    pub source: MomentSource,
}

impl ExactMoments {
    pub fn order(&self) -> usize {
        self.closed_walks.len() - 1
    }

    pub fn to_sequence<T: Scalar>(&self) -> MomentSequence<T> {
        let n = from_count::<T>(self.n as u128);
        MomentSequence {
            n: self.n,
            m: self.closed_walks.iter().map(|&w| from_count::<T>(w) / n).collect(),
            source: self.source,
        }
    }

    /// Exact rational moments.
    pub fn to_rational(&self) -> MomentSequence<BigRational> {
        let n = BigInt::from(self.n);
        MomentSequence {
            n: self.n,
            m: self.closed_walks.iter().map(|&w| BigRational::new(BigInt::from(w), n.clone())).collect(),
            source: self.source,
        }
    }

    /// Integrality constraints of closed-walk totals on simple graphs:
    /// `n m_1 = 0`, `n m_2` even, `n m_3` divisible by 6.
    pub fn check_integrality(&self) -> Result<()> {
        let w = &self.closed_walks;
        if w.first() != Some(&(self.n as u128)) {
            return Err(Error::Consistency("m_0 numerator must equal n".into()));
        }
        if w.len() > 1 && w[1] != 0 {
            return Err(Error::Consistency(format!("n*m_1 = {} on a loop-free graph", w[1])));
        }
        if w.len() > 2 && !w[2].is_multiple_of(2) {
            return Err(Error::Consistency(format!("n*m_2 = {} is odd", w[2])));
        }
        if w.len() > 3 && !w[3].is_multiple_of(6) {
            return Err(Error::Consistency(format!("n*m_3 = {} not divisible by 6", w[3])));
        }
        Ok(())
    }
}

fn nonempty(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Degenerate("moments of an empty graph (n = 0) are undefined".into()));
    }
    Ok(())
}

fn nonneg(x: i128, what: &'static str) -> Result<u128> {
    u128::try_from(x).map_err(|_| Error::Consistency(format!("negative closed-walk total for {what}")))
}

/// `m_1..m_5` from the per-node census.
pub fn moments_from_census(c: &NodeCensus) -> Result<ExactMoments> {
    let n = c.node_count();
    nonempty(n)?;
    let mut w = [0u128; 6];
    w[0] = n as u128;
    for i in 0..n {
        let (d, t, q, p) = (c.d[i] as u128, c.t[i] as u128, c.q[i] as u128, c.p[i] as u128);
        w[2] += d;
        w[3] += 2 * t;
        w[4] += 2 * q + 2 * d * d.saturating_sub(1) + d;
        // 2p + 10td - 10t, with d >= 2 whenever t > 0
        w[5] += 2 * p + 10 * t * d.saturating_sub(1);
    }
    let out = ExactMoments { n: n as u64, closed_walks: w.to_vec(), source: MomentSource::Census };
    out.check_integrality()?;
    Ok(out)
}

/// `m_1..m_5` from integer graph totals.
pub fn exact_moments_from_aggregates(a: &CensusAggregates<u64>) -> Result<ExactMoments> {
    nonempty(a.n as usize)?;
    let (e, delta, q, pi, w2, cdt) =
        (a.e as i128, a.delta as i128, a.quadrangles as i128, a.pentagons as i128, a.w2 as i128, a.cdt as i128);
    let w = vec![
        a.n as u128,
        0,
        nonneg(2 * e, "m_2")?,
        nonneg(6 * delta, "m_3")?,
        nonneg(8 * q + 2 * w2 - 2 * e, "m_4")?,
        nonneg(10 * pi + 10 * cdt - 30 * delta, "m_5")?,
    ];
    let out = ExactMoments { n: a.n, closed_walks: w, source: MomentSource::Census };
    out.check_integrality()?;
    Ok(out)
}

/// `m_1..m_5` from real-valued graph totals (for instance published
/// per-node averages scaled by `n`).
pub fn moments_from_aggregates<T: Scalar>(a: &CensusAggregates<T>) -> Result<MomentSequence<T>> {
    nonempty(a.n as usize)?;
    let n = from_count::<T>(a.n as u128);
    let two = lit::<T>(2.0);
    let m = vec![
        T::one(),
        T::zero(),
        two * a.e / n,
        lit::<T>(6.0) * a.delta / n,
        (lit::<T>(8.0) * a.quadrangles + two * a.w2 - two * a.e) / n,
        (lit::<T>(10.0) * (a.pentagons + a.cdt) - lit::<T>(30.0) * a.delta) / n,
    ];
    Ok(MomentSequence { n: a.n, m, source: MomentSource::Census })
}

/// `m_1..m_kmax` by counting closed walks.
pub fn moments_from_walks(g: &Graph, kmax: usize) -> Result<ExactMoments> {
    if kmax > MAX_STRUCTURAL_ORDER {
        return Err(Error::InvalidArgument(format!("kmax = {kmax} unsupported (max {MAX_STRUCTURAL_ORDER})")));
    }
    let n = g.node_count();
    nonempty(n)?;
    let mut w = vec![n as u128];
    if kmax >= 1 {
        w.push(0);
    }
    if kmax >= 2 {
        w.push(2 * g.edge_count() as u128);
    }
    if kmax >= 3 {
        let diag = crate::census::walk_diagonals(g)?;
        let total = |v: &[u64]| v.iter().map(|&x| x as u128).sum::<u128>();
        w.push(total(&diag.w3));
        if kmax >= 4 {
            w.push(total(&diag.w4));
        }
        if kmax >= 5 {
            w.push(total(&diag.w5));
        }
    }
    let out = ExactMoments { n: n as u64, closed_walks: w, source: MomentSource::Walks };
    out.check_integrality()?;
    Ok(out)
}

/// `m_1..m_kmax` from eigenvalues, summed in descending magnitude with
/// compensation.
pub fn moments_from_spectrum<T: Scalar>(eigs: &[T], kmax: usize) -> Result<MomentSequence<T>> {
    if eigs.is_empty() {
        return Err(Error::InvalidArgument("empty spectrum".into()));
    }
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap_or(std::cmp::Ordering::Equal));
    let n = from_count::<T>(eigs.len() as u128);
    let mut m = vec![T::one()];
    for k in 1..=kmax {
        let s = compensated_sum(sorted.iter().map(|&x| x.powi(k as i32)));
        m.push(s / n);
    }
    Ok(MomentSequence { n: eigs.len() as u64, m, source: MomentSource::Spectrum })
}
