//! Bounds `α_s >= λ_min` and `β_s <= λ_max` from a truncated moment sequence.
//!
//! `β_s` is the smallest `c` with `c R_{2s} - R_{2s+1} ⪰ 0` and `α_s` the
//! largest `c` with `R_{2s+1} - c R_{2s} ⪰ 0`. Levels 1 and 2 have closed
//! forms as extreme roots of `det H_s(c)`; any level can be bisected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{default_tol, hankel_pair, HankelPair};
use crate::linalg::{jacobi_eigen, min_eig, Matrix};
use crate::moments::MomentSequence;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    ClosedForm,
    Bisection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportBounds<T> {
    pub s: usize,
    /// Upper bound on the smallest eigenvalue.
    pub alpha: T,
    /// Lower bound on the largest eigenvalue.
    pub beta: T,
    pub method: BoundMethod,
    /// Largest |λ_min| of the localizing matrices at the returned endpoints;
    /// zero means both sit exactly on the PSD boundary.
    pub residual: T,
    /// Final `(lo, hi)` brackets for alpha and beta when bisection was used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brackets: Option<[(T, T); 2]>,
    /// Set when the closed form was abandoned.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

fn require_feasible<T: Scalar>(pair: &HankelPair<T>) -> Result<()> {
    let (lmin, _) = min_eig(&pair.r_even)?;
    if lmin < -default_tol(&pair.r_even) {
        return Err(Error::InfeasibleMoments { min_eigenvalue: lmin.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}

fn require_spread<T: Scalar>(ms: &MomentSequence<T>) -> Result<()> {
    let var = ms.m[2] - ms.m[1] * ms.m[1];
    if var <= lit::<T>(1e-12) * (T::one() + ms.m[2].abs()) {
        return Err(Error::Degenerate(format!(
            "zero spectral variance (m_2 - m_1^2 = {var}); the localizing determinant has no roots"
        )));
    }
    Ok(())
}

/// Largest |λ_min| of `H(α)` and `-H(β)`.
fn boundary_residual<T: Scalar>(pair: &HankelPair<T>, alpha: T, beta: T) -> Result<T> {
    let at_alpha = min_eig(&pair.localizing(alpha).h)?.0;
    let neg_beta = Matrix::from_fn(pair.r_even.rows(), pair.r_even.cols(), |i, j| {
        beta * pair.r_even[(i, j)] - pair.r_odd[(i, j)]
    });
    let at_beta = min_eig(&neg_beta)?.0;
    Ok(at_alpha.abs().max(at_beta.abs()))
}

/// Level-1 bounds: roots of
/// `c^2 (m_2 - m_1^2) + c (m_1 m_2 - m_3) + (m_1 m_3 - m_2^2)`.
pub fn bounds_s1<T: Scalar>(ms: &MomentSequence<T>) -> Result<SupportBounds<T>> {
    let pair = hankel_pair(ms, 1)?;
    require_feasible(&pair)?;
    require_spread(ms)?;
    let (m1, m2, m3) = (ms.m[1], ms.m[2], ms.m[3]);
    let roots = solve_quadratic(m2 - m1 * m1, m1 * m2 - m3, m1 * m3 - m2 * m2);
    if roots.len() != 2 {
        return Err(Error::Solver("level-1 localizing determinant has no real roots".into()));
    }
    let (alpha, beta) = (roots[0], roots[1]);
    Ok(SupportBounds {
        s: 1,
        alpha,
        beta,
        method: BoundMethod::ClosedForm,
        residual: boundary_residual(&pair, alpha, beta)?,
        brackets: None,
        diagnostic: None,
    })
}

/// Coefficients `(d_3, d_2, d_1, d_0)` of `p_3(c) = det H_2(c)`.
pub fn p3_coefficients<T: Scalar>(m: &[T]) -> [T; 4] {
    let (m1, m2, m3, m4, m5) = (m[1], m[2], m[3], m[4], m[5]);
    let two = lit::<T>(2.0);
    let d0 = two * m2 * m3 * m4 - m5 * m2 * m2 - m3 * m3 * m3 + m1 * m5 * m3 - m1 * m4 * m4;
    let d1 = m2 * m3 * m3 - m2 * m2 * m4 + m1 * m5 * m2 - m1 * m3 * m4 - m5 * m3 + m4 * m4;
    let d2 = m4 * m1 * m2 - m5 * m1 * m1 + m1 * m3 * m3 - m2 * m2 * m3 + m5 * m2 - m4 * m3;
    let d3 = m4 * m1 * m1 - two * m1 * m2 * m3 + m2 * m2 * m2 - m4 * m2 + m3 * m3;
    [d3, d2, d1, d0]
}

/// Level-2 bounds: extreme roots of `p_3`. Falls back to bisection when
/// `R_4` is numerically singular or the cubic lacks three real roots.
pub fn bounds_s2<T: Scalar>(ms: &MomentSequence<T>) -> Result<SupportBounds<T>> {
    let pair = hankel_pair(ms, 2)?;
    require_feasible(&pair)?;
    require_spread(ms)?;
    let (lmin, _) = min_eig(&pair.r_even)?;
    let fallback = |why: String| -> Result<SupportBounds<T>> {
        let tol = lit::<T>(1e-10) * (T::one() + ms.m[1].abs() + ms.m[2].abs().sqrt());
        let mut b = bounds_bisect(ms, 2, tol)?;
        b.diagnostic = Some(why);
        Ok(b)
    };
    if lmin <= default_tol(&pair.r_even) {
        return fallback(format!("R_4 is numerically singular (λ_min = {lmin}); used bisection"));
    }
    let [d3, d2, d1, d0] = p3_coefficients(&ms.m);
    let roots = solve_cubic(d3, d2, d1, d0)?;
    if roots.len() != 3 {
        return fallback(format!("p_3 has {} real roots; used bisection", roots.len()));
    }
    let (alpha, beta) = (roots[0], roots[2]);
    Ok(SupportBounds {
        s: 2,
        alpha,
        beta,
        method: BoundMethod::ClosedForm,
        residual: boundary_residual(&pair, alpha, beta)?,
        brackets: None,
        diagnostic: None,
    })
}

/// Level 2 when `m_5` is available, otherwise level 1.
pub fn bounds_auto<T: Scalar>(ms: &MomentSequence<T>) -> Result<SupportBounds<T>> {
    if ms.order() >= 5 {
        bounds_s2(ms)
    } else {
        bounds_s1(ms)
    }
}

/// Restriction of the pencil `(R_odd, R_even)` to the numerical range of
/// `R_even`. For moments of a genuine measure the null space of `R_even`
/// is annihilated by `R_odd`, so nothing is lost.
fn reduced_pencil<T: Scalar>(pair: &HankelPair<T>) -> (Matrix<T>, Matrix<T>) {
    let (vals, vecs) = jacobi_eigen(&pair.r_even);
    let cut = default_tol(&pair.r_even);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cut).collect();
    let u = Matrix::from_fn(vecs.rows(), keep.len(), |i, j| vecs[(i, keep[j])]);
    let ut = u.transpose();
    let mut even = ut.matmul(&pair.r_even).matmul(&u);
    let mut odd = ut.matmul(&pair.r_odd).matmul(&u);
    even.symmetrize();
    odd.symmetrize();
    (even, odd)
}

/// Smallest `c` with `c E - O ⪰ 0` for `E ≻ 0`, by bisection.
fn upper_edge<T: Scalar>(e: &Matrix<T>, o: &Matrix<T>, start: T, tol: T) -> Result<(T, T, T)> {
    let margin = |c: T| -> Result<T> {
        let m = Matrix::from_fn(e.rows(), e.cols(), |i, j| c * e[(i, j)] - o[(i, j)]);
        Ok(min_eig(&m)?.0)
    };
    let mut lo = -start;
    let mut hi = start;
    let mut expansions = 0;
    while margin(lo)? >= T::zero() {
        lo *= lit(2.0);
        expansions += 1;
        if expansions > 200 {
            return Err(Error::Bisection("no PSD transition below the bracket".into()));
        }
    }
    while margin(hi)? < T::zero() {
        hi *= lit(2.0);
        expansions += 1;
        if expansions > 200 {
            return Err(Error::Bisection("no PSD transition above the bracket".into()));
        }
    }
    for _ in 0..4000 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if margin(mid)? >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + (hi - lo) * lit(0.5), lo, hi))
}

/// Bounds at any level by bisection on the PSD boundary of the localizing
/// matrix, stopping once the bracket is narrower than `tol`.
pub fn bounds_bisect<T: Scalar>(ms: &MomentSequence<T>, s: usize, tol: T) -> Result<SupportBounds<T>> {
    if s == 0 {
        return Err(Error::InvalidArgument("level must be at least 1".into()));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let pair = hankel_pair(ms, s)?;
    require_feasible(&pair)?;
    let (e, o) = reduced_pencil(&pair);
    if e.rows() == 0 {
        return Err(Error::Degenerate("moment matrix is numerically zero".into()));
    }
    // moment-magnitude scale of the support, |m_k|^{1/k}
    let start = ms.m[1..=2 * s + 1]
        .iter()
        .enumerate()
        .map(|(k, x)| x.abs().powf(T::one() / T::from_usize(k + 1).unwrap()))
        .fold(T::one(), T::max)
        + T::one();
    let (beta, blo, bhi) = upper_edge(&e, &o, start, tol)?;
    let neg_o = o.map(|x| -*x);
    let (neg_alpha, alo, ahi) = upper_edge(&e, &neg_o, start, tol)?;
    let alpha = -neg_alpha;
    Ok(SupportBounds {
        s,
        alpha,
        beta,
        method: BoundMethod::Bisection,
        residual: boundary_residual(&pair, alpha, beta)?,
        brackets: Some([(-ahi, -alo), (blo, bhi)]),
        diagnostic: None,
    })
}

fn eval_poly<T: Scalar>(c: &[T], x: T) -> T {
    c.iter().fold(T::zero(), |acc, &a| acc * x + a)
}

fn eval_deriv<T: Scalar>(c: &[T], x: T) -> T {
    let n = c.len() - 1;
    c[..n]
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, &a)| acc * x + a * T::from_usize(n - i).unwrap())
}

/// Newton steps that are kept only while they reduce |p|.
fn polish<T: Scalar>(c: &[T], mut x: T) -> T {
    let mut fx = eval_poly(c, x).abs();
    for _ in 0..4 {
        let d = eval_deriv(c, x);
        if d == T::zero() || fx == T::zero() {
            break;
        }
        let nx = x - eval_poly(c, x) / d;
        let nf = eval_poly(c, nx).abs();
        if !(nf < fx) {
            break;
        }
        x = nx;
        fx = nf;
    }
    x
}

/// Real roots of `a x^2 + b x + c` in ascending order (repeated roots listed
/// twice), using the cancellation-free form of the quadratic formula.
pub fn solve_quadratic<T: Scalar>(a: T, b: T, c: T) -> Vec<T> {
    if a == T::zero() {
        return if b == T::zero() { Vec::new() } else { vec![-c / b] };
    }
    let mut disc = b * b - lit::<T>(4.0) * a * c;
    if disc < T::zero() {
        let noise = lit::<T>(8.0) * T::epsilon() * (b * b + (lit::<T>(4.0) * a * c).abs());
        if disc < -noise {
            return Vec::new();
        }
        disc = T::zero();
    }
    let sq = disc.sqrt();
    let q = if b >= T::zero() { -(b + sq) * lit(0.5) } else { (sq - b) * lit(0.5) };
    let (r1, r2) = if q == T::zero() { (T::zero(), T::zero()) } else { (q / a, c / q) };
    let mut r = vec![r1, r2];
    r.sort_by(|x, y| x.partial_cmp(y).unwrap());
    r
}

/// Real roots of `d3 x^3 + d2 x^2 + d1 x + d0`, ascending.
///
/// One root is isolated by bisection inside the Cauchy bound, the cubic is
/// deflated to a quadratic, and every root is Newton-polished against the
/// original polynomial.
pub fn solve_cubic<T: Scalar>(d3: T, d2: T, d1: T, d0: T) -> Result<Vec<T>> {
    let coeffs = [d3, d2, d1, d0];
    if coeffs.iter().all(|&c| c == T::zero()) {
        return Err(Error::InvalidArgument("all polynomial coefficients are zero".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
    }
    if d3 == T::zero() {
        let mut r = solve_quadratic(d2, d1, d0);
        let lead = if d2 == T::zero() { &coeffs[2..] } else { &coeffs[1..] };
        for x in r.iter_mut() {
            *x = polish(lead, *x);
        }
        r.sort_by(|x, y| x.partial_cmp(y).unwrap());
        return Ok(r);
    }
    let (b, c, d) = (d2 / d3, d1 / d3, d0 / d3);
    let monic = [T::one(), b, c, d];
    let bound = T::one() + b.abs().max(c.abs()).max(d.abs());
    let (mut lo, mut hi) = (-bound, bound);
    let mut root = None;
    for _ in 0..4000 {
        let mid = lo + (hi - lo) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = eval_poly(&monic, mid);
        if f == T::zero() {
            root = Some(mid);
            break;
        }
        if f < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = polish(&monic, root.unwrap_or(lo + (hi - lo) * lit(0.5)));
    let mut roots = vec![r];
    // x^3 + b x^2 + c x + d = (x - r)(x^2 + (b + r) x + (c + r (b + r)))
    let qb = b + r;
    let qc = c + r * qb;
    for x in solve_quadratic(T::one(), qb, qc) {
        roots.push(polish(&monic, x));
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(roots)
}
