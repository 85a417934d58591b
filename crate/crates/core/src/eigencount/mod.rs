//! Upper bounds on the fraction of eigenvalues inside an interval `T`.
//!
//! The bound is the optimum of the moment dual: minimize `Σ y_i m_i` over
//! polynomials `p(x) = Σ y_i x^i` of degree `k` with `p >= 1` on `T` and
//! `p >= 0` on a compact interval Ω that holds the whole spectrum. Both
//! nonnegativity conditions are written as weighted sums of squares with
//! PSD Gram matrices in the Chebyshev basis of Ω mapped onto `[-1, 1]`.

pub mod chebyshev;
pub mod lp;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hankel::is_feasible_hamburger;
use crate::linalg::{solve_affine, Matrix};
use crate::moments::MomentSequence;
use crate::scalar::{lit, Scalar};
use crate::sdp::{solve_sdp, SdpBlock, SdpProblem, SdpStatus};
use chebyshev::{chebyshev_moments, eval, mul, to_monomial, unit_to_x, UnitMap};

pub use lp::{primal_lp_oracle, simplex_max, LpSolution, PrimalLpResult};

/// Highest supported polynomial degree.
pub const MAX_DEGREE: usize = 5;

/// Cap on the summed traces of all Gram matrices. Without it the
/// certificate cone is unbounded and the barrier has no center; any point
/// under the cap is still a valid certificate.
pub const GRAM_TRACE_BOUND: f64 = 1e6;

/// Samples used for the certificate check stored in every result.
pub const CERTIFICATE_SAMPLES: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalQuery<T> {
    /// Closed interval `[t_lo, t_hi]`.
    pub t: (T, T),
    /// Closed interval assumed to contain every eigenvalue.
    pub omega: (T, T),
    pub k: usize,
}

impl<T: Scalar> IntervalQuery<T> {
    pub fn new(t: (T, T), omega: (T, T), k: usize) -> Result<Self> {
        if !(2..=MAX_DEGREE).contains(&k) {
            return Err(Error::InvalidArgument(format!("k must be in 2..={MAX_DEGREE}, got {k}")));
        }
        if !(omega.0 < omega.1) || !omega.0.is_finite() || !omega.1.is_finite() {
            return Err(Error::InvalidArgument(format!("Ω = [{}, {}] must be a finite nonempty interval", omega.0, omega.1)));
        }
        if !(t.0 <= t.1) {
            return Err(Error::InvalidArgument(format!("T = [{}, {}] is empty", t.0, t.1)));
        }
        let slack = lit::<T>(1e-12) * (omega.1 - omega.0);
        if t.0 < omega.0 - slack || t.1 > omega.1 + slack {
            return Err(Error::InvalidArgument(format!(
                "T = [{}, {}] is not inside Ω = [{}, {}]",
                t.0, t.1, omega.0, omega.1
            )));
        }
        Ok(IntervalQuery { t: (t.0.max(omega.0), t.1.min(omega.1)), omega, k })
    }

    /// Query for `T ∩ Ω`, or `None` when the intersection is empty. Sound
    /// because no eigenvalue lies outside Ω.
    pub fn clipped(t: (T, T), omega: (T, T), k: usize) -> Result<Option<Self>> {
        let lo = t.0.max(omega.0);
        let hi = t.1.min(omega.1);
        if lo > hi {
            IntervalQuery::new((omega.0, omega.0), omega, k)?;
            return Ok(None);
        }
        Self::new((lo, hi), omega, k).map(Some)
    }

    fn covers_omega(&self) -> bool {
        self.t.0 <= self.omega.0 && self.t.1 >= self.omega.1
    }
}

/// `[-d_max, d_max]`, which contains every adjacency eigenvalue.
pub fn omega_from_graph<T: Scalar>(g: &Graph) -> (T, T) {
    let d = T::from_usize(g.max_degree()).unwrap().max(T::one());
    (-d, d)
}

/// `[-√(n m_2), √(n m_2)]`: no eigenvalue exceeds the root of `Σ λ_i^2`.
pub fn omega_from_moments<T: Scalar>(ms: &MomentSequence<T>) -> Result<(T, T)> {
    ms.require(2)?;
    let r = (T::from_u64(ms.n).unwrap() * ms.m[2]).sqrt().max(T::one());
    Ok((-r, r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate<T> {
    /// Gram matrices of the Ω representation (unweighted term first).
    pub omega_grams: Vec<Matrix<T>>,
    /// Gram matrices of the representation of `p - 1` on `T`.
    pub t_grams: Vec<Matrix<T>>,
    /// Sampled minimum of `p` over Ω.
    pub min_on_omega: T,
    /// Sampled minimum of `p - 1` over `T`.
    pub min_on_t: T,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigencountResult<T> {
    pub z_d: T,
    /// Coefficients `y_0..y_k` of `p` in powers of `x`.
    pub y: Vec<T>,
    /// Coefficients of `p` in the Chebyshev basis of Ω.
    pub chebyshev: Vec<T>,
    pub query: IntervalQuery<T>,
    pub status: SdpStatus,
    pub duality_gap: T,
    pub certificate: Option<Certificate<T>>,
}

/// One weighted SOS term: `weight(u) · v(u)ᵀ G v(u)` with `v = (T_0..T_{size-1})`.
struct Piece<T> {
    weight: Vec<T>,
    size: usize,
}

/// Interval representation of degree-`k` polynomials nonnegative on `[lo, hi]`.
fn interval_pieces<T: Scalar>(lo: T, hi: T, k: usize) -> Vec<Piece<T>> {
    let d = k / 2;
    let up = vec![-lo, T::one()];
    let down = vec![hi, -T::one()];
    if k.is_multiple_of(2) {
        let mut out = vec![Piece { weight: vec![T::one()], size: d + 1 }];
        if d >= 1 {
            out.push(Piece { weight: mul(&up, &down), size: d });
        }
        out
    } else {
        vec![Piece { weight: up, size: d + 1 }, Piece { weight: down, size: d + 1 }]
    }
}

/// Upper-triangle entries `(r, c)` of a `size x size` Gram matrix.
fn gram_entries(size: usize) -> Vec<(usize, usize)> {
    (0..size).flat_map(|r| (r..size).map(move |c| (r, c))).collect()
}

/// Chebyshev coefficients (length `k + 1`) contributed by one Gram entry.
fn entry_poly<T: Scalar>(piece: &Piece<T>, r: usize, c: usize, k: usize) -> Vec<T> {
    let mut tr = vec![T::zero(); r + 1];
    tr[r] = T::one();
    let mut tc = vec![T::zero(); c + 1];
    tc[c] = T::one();
    let mut p = mul(&piece.weight, &mul(&tr, &tc));
    if r != c {
        p.iter_mut().for_each(|x| *x = *x + *x);
    }
    p.resize(k + 1, T::zero());
    debug_assert!(p.len() == k + 1);
    p
}

fn entry_matrix<T: Scalar>(size: usize, r: usize, c: usize) -> Matrix<T> {
    Matrix::from_fn(size, size, |i, j| if (i, j) == (r, c) || (i, j) == (c, r) { T::one() } else { T::zero() })
}

/// Gram-variable layout of a list of pieces: per piece the range of
/// variable indices and the `(r, c)` entries.
struct Layout<T> {
    pieces: Vec<Piece<T>>,
    entries: Vec<Vec<(usize, usize)>>,
    offset: Vec<usize>,
    count: usize,
}

impl<T: Scalar> Layout<T> {
    fn new(pieces: Vec<Piece<T>>, start: usize) -> Self {
        let entries: Vec<_> = pieces.iter().map(|p| gram_entries(p.size)).collect();
        let mut offset = Vec::new();
        let mut at = start;
        for e in &entries {
            offset.push(at);
            at += e.len();
        }
        Layout { pieces, entries, offset, count: at - start }
    }

    /// Columns of the linear map Gram entries -> Chebyshev coefficients.
    fn poly_columns(&self, k: usize) -> Vec<Vec<T>> {
        let mut cols = Vec::new();
        for (piece, entries) in self.pieces.iter().zip(&self.entries) {
            for &(r, c) in entries {
                cols.push(entry_poly(piece, r, c, k));
            }
        }
        cols
    }

    fn grams(&self, z: &[T]) -> Vec<Matrix<T>> {
        self.pieces
            .iter()
            .zip(&self.entries)
            .zip(&self.offset)
            .map(|((p, entries), &off)| {
                let mut g = Matrix::zeros(p.size, p.size);
                for (i, &(r, c)) in entries.iter().enumerate() {
                    g[(r, c)] = z[off + i];
                    g[(c, r)] = z[off + i];
                }
                g
            })
            .collect()
    }
}

fn trivial_result<T: Scalar>(q: IntervalQuery<T>, value: T) -> EigencountResult<T> {
    let mut y = vec![T::zero(); q.k + 1];
    y[0] = value;
    EigencountResult {
        z_d: value,
        chebyshev: y.clone(),
        y,
        query: q,
        status: SdpStatus::Optimal,
        duality_gap: T::zero(),
        certificate: None,
    }
}

/// Optimal upper bound on the fraction of eigenvalues in `q.t`.
pub fn eigencount_upper<T: Scalar>(ms: &MomentSequence<T>, q: &IntervalQuery<T>, tol: T) -> Result<EigencountResult<T>> {
    ms.require(q.k)?;
    let feas = is_feasible_hamburger(ms, q.k / 2, None)?;
    if !feas.feasible {
        return Err(Error::InfeasibleMoments { min_eigenvalue: feas.min_eigenvalue.to_f64().unwrap_or(f64::NAN) });
    }
    if q.covers_omega() {
        return Ok(trivial_result(*q, T::one()));
    }
    let k = q.k;
    let map = UnitMap::new(q.omega.0, q.omega.1);
    let tau = chebyshev_moments(&ms.m, &map, k);
    let (tl, th) = (map.to_unit(q.t.0).max(-T::one()), map.to_unit(q.t.1).min(T::one()));

    let omega = Layout::new(interval_pieces(-T::one(), T::one(), k), 0);
    let omega_cols = omega.poly_columns(k);
    let point = th - tl <= lit::<T>(1e-12);
    let t_layout = (!point).then(|| Layout::new(interval_pieces(tl, th, k), omega.count));
    let nz = omega.count + t_layout.as_ref().map_or(0, |l| l.count);

    // z = z0 + N w
    let (z0, basis) = match &t_layout {
        Some(tlay) => {
            let t_cols = tlay.poly_columns(k);
            let a = Matrix::from_fn(k + 1, nz, |row, col| {
                if col < omega.count {
                    omega_cols[col][row]
                } else {
                    -t_cols[col - omega.count][row]
                }
            });
            let mut rhs = vec![T::zero(); k + 1];
            rhs[0] = T::one();
            let sol = solve_affine(&a, &rhs)?;
            (sol.particular, sol.basis)
        }
        None => (vec![T::zero(); nz], Matrix::identity(nz)),
    };
    let nw = basis.cols();
    let gain: Vec<T> = omega_cols.iter().map(|col| col.iter().zip(&tau).map(|(a, b)| *a * *b).sum()).collect();

    let mut blocks = Vec::new();
    let mut push_layout = |lay: &Layout<T>| {
        for ((piece, entries), &off) in lay.pieces.iter().zip(&lay.entries).zip(&lay.offset) {
            let n = piece.size;
            let mut constant = Matrix::<T>::zeros(n, n);
            let mut coefficients = vec![Matrix::<T>::zeros(n, n); nw];
            for (i, &(r, c)) in entries.iter().enumerate() {
                let e = entry_matrix::<T>(n, r, c);
                let idx = off + i;
                constant = constant.add_scaled(&e, -z0[idx]);
                for (j, coef) in coefficients.iter_mut().enumerate() {
                    let v = basis[(idx, j)];
                    if v != T::zero() {
                        *coef = coef.add_scaled(&e, v);
                    }
                }
            }
            blocks.push(SdpBlock { constant, coefficients });
        }
    };
    push_layout(&omega);
    if let Some(tlay) = &t_layout {
        push_layout(tlay);
    } else {
        // single point: p(t) - 1 >= 0
        let at: Vec<T> = omega_cols.iter().map(|col| eval(col, tl)).collect();
        let coefficients = (0..nw)
            .map(|j| {
                let v: T = (0..nz).map(|i| at[i] * basis[(i, j)]).sum();
                Matrix::from_fn(1, 1, |_, _| v)
            })
            .collect();
        blocks.push(SdpBlock { constant: Matrix::from_fn(1, 1, |_, _| T::one()), coefficients });
    }
    // Σ tr G <= GRAM_TRACE_BOUND keeps the feasible set compact
    let diagonal: Vec<bool> = omega
        .entries
        .iter()
        .chain(t_layout.iter().flat_map(|l| l.entries.iter()))
        .flat_map(|e| e.iter().map(|&(r, c)| r == c))
        .collect();
    let trace0: T = (0..nz).filter(|&i| diagonal[i]).map(|i| z0[i]).sum();
    blocks.push(SdpBlock {
        constant: Matrix::from_fn(1, 1, |_, _| trace0 - lit::<T>(GRAM_TRACE_BOUND)),
        coefficients: (0..nw)
            .map(|j| {
                let v: T = (0..nz).filter(|&i| diagonal[i]).map(|i| basis[(i, j)]).sum();
                Matrix::from_fn(1, 1, |_, _| -v)
            })
            .collect(),
    });
    let objective: Vec<T> = (0..nw).map(|j| (0..omega.count).map(|i| gain[i] * basis[(i, j)]).sum()).collect();
    let problem = SdpProblem { num_vars: nw, objective, blocks, var_bounds: None };
    let sol = solve_sdp(&problem, tol, 1000)?;
    match sol.status {
        SdpStatus::Infeasible => return Err(Error::Solver("no strictly feasible dual polynomial found".into())),
        SdpStatus::Unbounded => {
            return Err(Error::Solver("dual is unbounded: the moments are inconsistent with Ω".into()))
        }
        _ => {}
    }

    let z: Vec<T> = (0..nz).map(|i| z0[i] + (0..nw).map(|j| basis[(i, j)] * sol.y[j]).sum::<T>()).collect();
    let mut cheb = vec![T::zero(); k + 1];
    for (i, col) in omega_cols.iter().enumerate() {
        for (c, v) in cheb.iter_mut().zip(col) {
            *c += *v * z[i];
        }
    }
    let z_d = cheb.iter().zip(&tau).map(|(a, b)| *a * *b).sum();
    let y = unit_to_x(&to_monomial(&cheb), &map);
    let (min_on_omega, min_on_t) = sample_margins(&cheb, (tl, th), CERTIFICATE_SAMPLES);
    let certificate = Certificate {
        omega_grams: omega.grams(&z),
        t_grams: t_layout.as_ref().map_or_else(Vec::new, |l| l.grams(&z)),
        min_on_omega,
        min_on_t,
        samples: CERTIFICATE_SAMPLES,
    };
    Ok(EigencountResult {
        z_d,
        y,
        chebyshev: cheb,
        query: *q,
        status: sol.status,
        duality_gap: sol.duality_gap_estimate,
        certificate: Some(certificate),
    })
}

/// `(min p over [-1, 1], min p - 1 over [tl, th])` on uniform samples plus
/// endpoints, in the unit variable.
fn sample_margins<T: Scalar>(cheb: &[T], (tl, th): (T, T), samples: usize) -> (T, T) {
    let samples = samples.max(2);
    let grid = |lo: T, hi: T| {
        let step = (hi - lo) / T::from_usize(samples - 1).unwrap();
        (0..samples).map(move |i| if i + 1 == samples { hi } else { lo + step * T::from_usize(i).unwrap() })
    };
    let on_omega = grid(-T::one(), T::one()).map(|u| eval(cheb, u)).fold(T::infinity(), T::min);
    let on_t = grid(tl, th).map(|u| eval(cheb, u) - T::one()).fold(T::infinity(), T::min);
    (on_omega, on_t)
}

/// Re-checks a result's dual polynomial: sampled minima of `p` on Ω and of
/// `p - 1` on `T`.
pub fn verify_certificate<T: Scalar>(r: &EigencountResult<T>, samples: usize) -> (T, T) {
    let map = UnitMap::new(r.query.omega.0, r.query.omega.1);
    sample_margins(&r.chebyshev, (map.to_unit(r.query.t.0), map.to_unit(r.query.t.1)), samples)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint<T> {
    pub alpha: T,
    pub z_d: Option<T>,
    pub status: Option<SdpStatus>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// `lo, lo + step, ..., <= hi` without accumulating rounding.
pub fn sweep_grid<T: Scalar>(lo: T, step: T, hi: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(hi >= lo) {
        return Err(Error::InvalidArgument(format!("bad sweep {lo}:{step}:{hi}")));
    }
    let count = ((hi - lo) / step + lit(1e-9)).floor().to_usize().unwrap_or(0) + 1;
    if count > 1_000_000 {
        return Err(Error::InvalidArgument(format!("sweep has {count} points")));
    }
    Ok((0..count).map(|i| lo + step * T::from_usize(i).unwrap()).collect())
}

/// Upper bounds on the spectral CDF `F(α)` for each `α`, via `T = [ω_lo, α]`.
/// Points are solved in parallel; the output follows the input order and a
/// failing point does not stop the sweep.
pub fn cdf_bound_sweep<T: Scalar>(
    ms: &MomentSequence<T>,
    alphas: &[T],
    omega: (T, T),
    k: usize,
    tol: T,
) -> Vec<SweepPoint<T>> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let solved = IntervalQuery::clipped((omega.0, alpha), omega, k).and_then(|q| match q {
                None => Ok((T::zero(), SdpStatus::Optimal)),
                Some(q) => eigencount_upper(ms, &q, tol).map(|r| (r.z_d, r.status)),
            });
            match solved {
                Ok((z, status)) => SweepPoint { alpha, z_d: Some(z), status: Some(status), error: None },
                Err(e) => SweepPoint { alpha, z_d: None, status: None, error: Some(e.to_string()) },
            }
        })
        .collect()
}
