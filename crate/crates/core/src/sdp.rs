//! Small dense semidefinite programs in linear-matrix-inequality form:
//!
//! ```text
//! minimize   bᵀy
//! subject to S_k(y) = Σ_j y_j A_kj - C_k ⪰ 0   for every block k
//! ```
//!
//! solved by a log-barrier path-following method with damped Newton
//! centering. A phase-1 problem finds a strictly feasible start.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, lower_inverse, min_eig, spd_inverse, Matrix};
use crate::scalar::{lit, Scalar};

/// Largest block dimension accepted.
pub const MAX_BLOCK_SIZE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpBlock<T> {
    pub constant: Matrix<T>,
    /// One coefficient matrix per variable.
    pub coefficients: Vec<Matrix<T>>,
}

impl<T: Scalar> SdpBlock<T> {
    pub fn size(&self) -> usize {
        self.constant.rows()
    }

    /// `Σ_j y_j A_j - C`.
    pub fn evaluate(&self, y: &[T]) -> Matrix<T> {
        let mut s = self.constant.map(|x| -*x);
        for (a, &yj) in self.coefficients.iter().zip(y) {
            if yj != T::zero() {
                s = s.add_scaled(a, yj);
            }
        }
        s
    }

    fn direction(&self, dy: &[T]) -> Matrix<T> {
        let n = self.size();
        let mut s = Matrix::zeros(n, n);
        for (a, &d) in self.coefficients.iter().zip(dy) {
            if d != T::zero() {
                s = s.add_scaled(a, d);
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpProblem<T> {
    pub num_vars: usize,
    pub objective: Vec<T>,
    pub blocks: Vec<SdpBlock<T>>,
    /// Optional `(lower, upper)` per variable.
    #[serde(default)]
    pub var_bounds: Option<Vec<(Option<T>, Option<T>)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SdpSolution<T> {
    pub y: Vec<T>,
    pub objective_value: T,
    pub status: SdpStatus,
    /// `λ_min` of every block (variable bounds included, appended last).
    pub psd_margins: Vec<T>,
    pub duality_gap_estimate: T,
    pub iterations: usize,
}

impl<T: Scalar> SdpProblem<T> {
    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.num_vars {
            return Err(Error::InvalidArgument(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                self.num_vars
            )));
        }
        for (k, b) in self.blocks.iter().enumerate() {
            let n = b.size();
            if n == 0 || n > MAX_BLOCK_SIZE {
                return Err(Error::InvalidArgument(format!("block {k} has size {n}, supported 1..={MAX_BLOCK_SIZE}")));
            }
            if b.coefficients.len() != self.num_vars {
                return Err(Error::InvalidArgument(format!(
                    "block {k} has {} coefficient matrices for {} variables",
                    b.coefficients.len(),
                    self.num_vars
                )));
            }
            b.constant.check_symmetric()?;
            for a in &b.coefficients {
                if a.rows() != n || a.cols() != n {
                    return Err(Error::InvalidArgument(format!("block {k} coefficient has wrong shape")));
                }
                a.check_symmetric()?;
            }
        }
        if let Some(vb) = &self.var_bounds {
            if vb.len() != self.num_vars {
                return Err(Error::InvalidArgument("var_bounds length differs from num_vars".into()));
            }
        }
        Ok(())
    }

    /// All constraints as LMI blocks, variable bounds turned into 1x1 blocks.
    fn lmi_blocks(&self) -> Vec<SdpBlock<T>> {
        let mut out = self.blocks.clone();
        let unit = |j: usize, sign: T| -> Vec<Matrix<T>> {
            (0..self.num_vars)
                .map(|i| Matrix::from_fn(1, 1, |_, _| if i == j { sign } else { T::zero() }))
                .collect()
        };
        if let Some(vb) = &self.var_bounds {
            for (j, &(lo, hi)) in vb.iter().enumerate() {
                if let Some(l) = lo {
                    out.push(SdpBlock { constant: Matrix::from_fn(1, 1, |_, _| l), coefficients: unit(j, T::one()) });
                }
                if let Some(h) = hi {
                    out.push(SdpBlock { constant: Matrix::from_fn(1, 1, |_, _| -h), coefficients: unit(j, -T::one()) });
                }
            }
        }
        out
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn margins<T: Scalar>(blocks: &[SdpBlock<T>], y: &[T]) -> Result<Vec<T>> {
    blocks.iter().map(|b| Ok(min_eig(&b.evaluate(y))?.0)).collect()
}

/// `-Σ log det S_k(y)`, or `None` outside the interior.
fn barrier<T: Scalar>(blocks: &[SdpBlock<T>], y: &[T]) -> Option<T> {
    let mut acc = T::zero();
    for b in blocks {
        let l = cholesky(&b.evaluate(y))?;
        for i in 0..l.rows() {
            acc -= lit::<T>(2.0) * l[(i, i)].ln();
        }
    }
    Some(acc)
}

/// Largest step keeping `S(y + a dy)` positive definite, `None` if unlimited.
fn max_step<T: Scalar>(blocks: &[SdpBlock<T>], y: &[T], dy: &[T]) -> Result<Option<T>> {
    let mut best: Option<T> = None;
    for b in blocks {
        let l = cholesky(&b.evaluate(y)).ok_or_else(|| Error::Solver("iterate left the interior".into()))?;
        let li = lower_inverse(&l);
        let mut m = li.matmul(&b.direction(dy)).matmul(&li.transpose());
        m.symmetrize();
        let (lmin, _) = min_eig(&m)?;
        if lmin < T::zero() {
            let a = -T::one() / lmin;
            best = Some(best.map_or(a, |x: T| x.min(a)));
        }
    }
    Ok(best)
}

enum Centering {
    Converged,
    Unbounded,
    Stalled,
}

struct Barrier<'a, T> {
    blocks: &'a [SdpBlock<T>],
    objective: &'a [T],
    iterations: usize,
    max_iter: usize,
}

impl<T: Scalar> Barrier<'_, T> {
    /// Gradient and Hessian of `t bᵀy - Σ log det S_k(y)`.
    fn derivatives(&self, y: &[T], t: T) -> Result<(Vec<T>, Matrix<T>)> {
        let m = y.len();
        let mut grad: Vec<T> = self.objective.iter().map(|&b| t * b).collect();
        let mut hess = Matrix::<T>::zeros(m, m);
        for b in self.blocks {
            let s_inv = spd_inverse(&b.evaluate(y)).ok_or_else(|| Error::Solver("iterate left the interior".into()))?;
            let prods: Vec<Option<Matrix<T>>> = b
                .coefficients
                .iter()
                .map(|a| (a.max_abs() > T::zero()).then(|| s_inv.matmul(a)))
                .collect();
            for i in 0..m {
                let Some(pi) = &prods[i] else { continue };
                grad[i] -= pi.trace();
                for j in i..m {
                    let Some(pj) = &prods[j] else { continue };
                    let n = pi.rows();
                    let mut tr = T::zero();
                    for r in 0..n {
                        for c in 0..n {
                            tr += pi[(r, c)] * pj[(c, r)];
                        }
                    }
                    hess[(i, j)] += tr;
                    if i != j {
                        hess[(j, i)] += tr;
                    }
                }
            }
        }
        Ok((grad, hess))
    }

    /// True when a far point along `dy` is still strictly feasible and
    /// improves the objective by orders of magnitude beyond its current value.
    fn feasible_ray(&self, y: &[T], dy: &[T]) -> bool {
        let slope = dot(self.objective, dy);
        if !(slope < T::zero()) {
            return false;
        }
        let ymax = y.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let dmax = dy.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let reach = lit::<T>(1e8) * (T::one() + ymax) / dmax;
        let far: Vec<T> = y.iter().zip(dy).map(|(v, d)| *v + reach * *d).collect();
        let here = dot(self.objective, y);
        let there = dot(self.objective, &far);
        there < here - lit::<T>(1e6) * (T::one() + here.abs()) && barrier(self.blocks, &far).is_some()
    }

    fn newton_direction(&self, grad: &[T], hess: &Matrix<T>) -> Option<Vec<T>> {
        let neg: Vec<T> = grad.iter().map(|g| -*g).collect();
        let scale = (0..hess.rows()).map(|i| hess[(i, i)].abs()).fold(T::zero(), T::max);
        for reg in [T::zero(), lit(1e-14), lit(1e-10), lit(1e-6)] {
            let mut h = hess.clone();
            for i in 0..h.rows() {
                h[(i, i)] += reg * (T::one() + scale);
            }
            if let Some(l) = cholesky(&h) {
                return Some(cholesky_solve(&l, &neg));
            }
        }
        None
    }

    /// Damped Newton minimization of the barrier function at fixed `t`.
    /// `stop` is checked after each step to allow early exit.
    fn center(&mut self, y: &mut [T], t: T, stop: &dyn Fn(&[T]) -> bool) -> Result<Centering> {
        loop {
            if self.iterations >= self.max_iter {
                return Ok(Centering::Stalled);
            }
            let (grad, hess) = self.derivatives(y, t)?;
            let Some(dy) = self.newton_direction(&grad, &hess) else {
                return Ok(Centering::Stalled);
            };
            let decrement = -dot(&grad, &dy);
            if decrement <= lit(1e-12) {
                return Ok(Centering::Converged);
            }
            self.iterations += 1;
            let limit = max_step(self.blocks, y, &dy)?;
            if limit.is_none() && self.feasible_ray(y, &dy) {
                return Ok(Centering::Unbounded);
            }
            let mut a = limit.map_or(T::one(), |l| (lit::<T>(0.99) * l).min(T::one()));
            let f0 = t * dot(self.objective, y) + barrier(self.blocks, y).unwrap();
            let mut progress = None;
            for _ in 0..60 {
                let trial: Vec<T> = y.iter().zip(&dy).map(|(v, d)| *v + a * *d).collect();
                if let Some(phi) = barrier(self.blocks, &trial) {
                    let f = t * dot(self.objective, &trial) + phi;
                    if f <= f0 - lit::<T>(0.25) * a * decrement {
                        y.copy_from_slice(&trial);
                        progress = Some(f0 - f);
                        break;
                    }
                }
                a *= lit(0.5);
            }
            match progress {
                None => return Ok(Centering::Stalled),
                // centered as far as the working precision allows
                Some(gain) if gain <= lit::<T>(8.0) * T::epsilon() * (T::one() + f0.abs()) => {
                    return Ok(Centering::Converged)
                }
                _ => {}
            }
            if y.iter().any(|v| v.abs() > lit(1e15)) {
                return Ok(Centering::Unbounded);
            }
            if stop(y) {
                return Ok(Centering::Converged);
            }
            if decrement <= lit(1e-9) {
                return Ok(Centering::Converged);
            }
        }
    }
}

/// Phase 1: maximize `s` subject to `S_k(y) - s I ⪰ 0` and `s <= 1`.
/// Returns a point with all margins positive, or the best margin found.
fn phase_one<T: Scalar>(blocks: &[SdpBlock<T>], m: usize, tol: T, budget: usize) -> Result<(Vec<T>, T, usize)> {
    let y0 = vec![T::zero(); m];
    let start = margins(blocks, &y0)?.into_iter().fold(T::infinity(), T::min);
    if start > T::zero() {
        return Ok((y0, start, 0));
    }
    let mut lifted: Vec<SdpBlock<T>> = blocks
        .iter()
        .map(|b| {
            let mut coefficients = b.coefficients.clone();
            coefficients.push(Matrix::<T>::identity(b.size()).map(|x| -*x));
            SdpBlock { constant: b.constant.clone(), coefficients }
        })
        .collect();
    let mut cap = vec![Matrix::zeros(1, 1); m];
    cap.push(Matrix::from_fn(1, 1, |_, _| -T::one()));
    lifted.push(SdpBlock { constant: Matrix::from_fn(1, 1, |_, _| -T::one()), coefficients: cap });

    let mut objective = vec![T::zero(); m];
    objective.push(-T::one());
    let mut z = y0;
    z.push(start - T::one());
    let nu = T::from_usize(lifted.iter().map(|b| b.size()).sum()).unwrap();
    let mut solver = Barrier { blocks: &lifted, objective: &objective, iterations: 0, max_iter: budget };
    let mut t = T::one();
    let positive = |z: &[T]| z[m] > T::zero();
    loop {
        let outcome = solver.center(&mut z, t, &positive)?;
        if positive(&z) {
            break;
        }
        if matches!(outcome, Centering::Stalled) || nu / t < tol {
            break;
        }
        t *= lit(10.0);
    }
    let s = z[m];
    z.truncate(m);
    Ok((z, s, solver.iterations))
}

/// Solves `p` to relative accuracy `tol` within `max_iter` Newton steps.
pub fn solve_sdp<T: Scalar>(p: &SdpProblem<T>, tol: T, max_iter: usize) -> Result<SdpSolution<T>> {
    p.validate()?;
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let blocks = p.lmi_blocks();
    let m = p.num_vars;
    let finish = |y: Vec<T>, status: SdpStatus, gap: T, iterations: usize| -> Result<SdpSolution<T>> {
        let psd_margins = margins(&blocks, &y)?;
        Ok(SdpSolution { objective_value: dot(&p.objective, &y), y, status, psd_margins, duality_gap_estimate: gap, iterations })
    };
    if blocks.is_empty() {
        let status = if p.objective.iter().all(|b| *b == T::zero()) { SdpStatus::Optimal } else { SdpStatus::Unbounded };
        return finish(vec![T::zero(); m], status, T::zero(), 0);
    }

    let (mut y, s, used) = phase_one(&blocks, m, tol, max_iter)?;
    if s <= T::zero() {
        let status = if used >= max_iter { SdpStatus::MaxIter } else { SdpStatus::Infeasible };
        return finish(y, status, T::infinity(), used);
    }

    let nu = T::from_usize(blocks.iter().map(|b| b.size()).sum()).unwrap();
    let mut solver = Barrier { blocks: &blocks, objective: &p.objective, iterations: used, max_iter };
    let mut t = T::one();
    let never = |_: &[T]| false;
    loop {
        match solver.center(&mut y, t, &never)? {
            Centering::Unbounded => return finish(y, SdpStatus::Unbounded, T::infinity(), solver.iterations),
            Centering::Stalled if solver.iterations >= max_iter => {
                return finish(y, SdpStatus::MaxIter, nu / t, solver.iterations)
            }
            _ => {}
        }
        let gap = nu / t;
        if gap <= tol * (T::one() + dot(&p.objective, &y).abs()) {
            return finish(y, SdpStatus::Optimal, gap, solver.iterations);
        }
        t *= lit(10.0);
    }
}
