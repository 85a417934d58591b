//! Dense two-phase simplex for `max cᵀx, A x = b, x >= 0`, and the
//! discretized primal interval-mass problem built on it.

use serde::{Deserialize, Serialize};

use super::chebyshev::{chebyshev_moments, eval, UnitMap};
use super::IntervalQuery;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::moments::MomentSequence;
use crate::scalar::{lit, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub value: T,
}

struct Tableau<T> {
    /// `m` constraint rows followed by the reduced-cost row; last column is the rhs.
    t: Matrix<T>,
    basis: Vec<usize>,
    m: usize,
}

impl<T: Scalar> Tableau<T> {
    fn width(&self) -> usize {
        self.t.cols() - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.t.cols();
        let p = self.t[(row, col)];
        for j in 0..w {
            self.t[(row, j)] /= p;
        }
        for i in 0..=self.m {
            if i == row {
                continue;
            }
            let f = self.t[(i, col)];
            if f != T::zero() {
                for j in 0..w {
                    let v = self.t[(row, j)];
                    self.t[(i, j)] -= f * v;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Pivots until no allowed column has a positive reduced cost.
    fn optimize(&mut self, allowed: &dyn Fn(usize) -> bool, tol: T) -> Result<()> {
        let obj = self.m;
        let rhs = self.width();
        let limit = 50 * (self.m + self.width()) + 1000;
        let mut degenerate_run = 0usize;
        for _ in 0..limit {
            let bland = degenerate_run > 50;
            let mut enter = None;
            let mut best = tol;
            for j in (0..self.width()).filter(|&j| allowed(j)) {
                let r = self.t[(obj, j)];
                if r > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = r;
                }
            }
            let Some(col) = enter else { return Ok(()) };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.m {
                let a = self.t[(i, col)];
                if a > tol {
                    let ratio = self.t[(i, rhs)] / a;
                    let better = match leave {
                        None => true,
                        Some((r, best_ratio)) => {
                            ratio < best_ratio || (ratio == best_ratio && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Solver("linear program is unbounded".into()));
            };
            degenerate_run = if ratio <= tol { degenerate_run + 1 } else { 0 };
            self.pivot(row, col);
        }
        Err(Error::Solver("simplex iteration limit reached".into()))
    }
}

/// Maximizes `cᵀx` subject to `A x = b`, `x >= 0`.
pub fn simplex_max<T: Scalar>(a: &Matrix<T>, b: &[T], c: &[T], tol: T) -> Result<LpSolution<T>> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m || c.len() != n {
        return Err(Error::InvalidArgument("linear program dimensions disagree".into()));
    }
    // columns: x (n), artificials (m), rhs
    let mut t = Matrix::<T>::zeros(m + 1, n + m + 1);
    for i in 0..m {
        let sign = if b[i] < T::zero() { -T::one() } else { T::one() };
        for j in 0..n {
            t[(i, j)] = sign * a[(i, j)];
        }
        t[(i, n + i)] = T::one();
        t[(i, n + m)] = sign * b[i];
    }
    // phase 1 maximizes minus the artificial sum
    for j in 0..n {
        t[(m, j)] = (0..m).map(|i| t[(i, j)]).sum();
    }
    t[(m, n + m)] = (0..m).map(|i| t[(i, n + m)]).sum();
    let mut tab = Tableau { t, basis: (n..n + m).collect(), m };
    let scale = T::one() + b.iter().fold(T::zero(), |s, x| s.max(x.abs()));
    tab.optimize(&|j| j < n, tol)?;
    let residual = tab.t[(m, n + m)];
    if residual > tol * scale * lit(10.0) {
        return Err(Error::LpInfeasible(residual.to_f64().unwrap_or(f64::NAN)));
    }
    // drive artificials out of the basis where possible
    for row in 0..m {
        if tab.basis[row] >= n {
            if let Some(col) = (0..n).find(|&j| tab.t[(row, j)].abs() > tol) {
                tab.pivot(row, col);
            }
        }
    }
    // phase 2 reduced costs r_j = c_j - c_Bᵀ B⁻¹ A_j
    for j in 0..=n + m {
        let cj = if j < n { c[j] } else { T::zero() };
        let mut r = if j == n + m { T::zero() } else { cj };
        for i in 0..m {
            let cb = if tab.basis[i] < n { c[tab.basis[i]] } else { T::zero() };
            r -= cb * tab.t[(i, j)];
        }
        tab.t[(m, j)] = r;
    }
    tab.optimize(&|j| j < n, tol)?;
    let mut x = vec![T::zero(); n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.t[(i, n + m)];
        }
    }
    let value = x.iter().zip(c).map(|(a, b)| *a * *b).sum();
    Ok(LpSolution { x, value })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalLpResult<T> {
    /// Largest mass on `T` over measures supported on the grid.
    pub value: T,
    pub grid_points: usize,
    /// Atoms `(x, weight)` of the optimal discrete measure.
    pub support: Vec<(T, T)>,
}

/// Discretized primal: the largest mass a nonnegative measure on a grid
/// over Ω can put on `T` while matching `m_0..m_k`. A lower estimate of the
/// primal optimum that tightens as the grid is refined.
pub fn primal_lp_oracle<T: Scalar>(
    ms: &MomentSequence<T>,
    q: &IntervalQuery<T>,
    grid_size: usize,
) -> Result<PrimalLpResult<T>> {
    if grid_size < 100 {
        return Err(Error::InvalidArgument(format!("grid_size must be at least 100, got {grid_size}")));
    }
    ms.require(q.k)?;
    let map = UnitMap::new(q.omega.0, q.omega.1);
    let (tl, th) = (map.to_unit(q.t.0), map.to_unit(q.t.1));
    let step = lit::<T>(2.0) / T::from_usize(grid_size - 1).unwrap();
    let mut grid: Vec<T> = (0..grid_size).map(|i| -T::one() + step * T::from_usize(i).unwrap()).collect();
    grid.push(tl);
    grid.push(th);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * lit(4.0));
    let tau = chebyshev_moments(&ms.m, &map, q.k);
    let a = Matrix::from_fn(q.k + 1, grid.len(), |j, g| {
        let mut e = vec![T::zero(); j + 1];
        e[j] = T::one();
        eval(&e, grid[g])
    });
    let slack = T::epsilon() * lit(16.0);
    let c: Vec<T> = grid.iter().map(|&u| if u >= tl - slack && u <= th + slack { T::one() } else { T::zero() }).collect();
    let sol = simplex_max(&a, &tau, &c, lit(1e-11))?;
    let support = grid
        .iter()
        .zip(&sol.x)
        .filter(|(_, &w)| w > T::zero())
        .map(|(&u, &w)| (map.from_unit(u), w))
        .collect();
    Ok(PrimalLpResult { value: sol.value, grid_points: grid.len(), support })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::MomentSource;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_lp() {
        // max x0 + 2 x1, x0 + x1 + x2 = 4, x0 + 3 x1 + x3 = 6
        let a = Matrix::from_rows(vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]]);
        let s = simplex_max(&a, &[4.0, 6.0], &[1.0, 2.0, 0.0, 0.0], 1e-12).unwrap();
        assert_abs_diff_eq!(s.value, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.x[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn infeasible_lp() {
        let a = Matrix::from_rows(vec![vec![1.0, 1.0]]);
        assert!(matches!(simplex_max(&a, &[-1.0], &[1.0, 0.0], 1e-12), Err(Error::LpInfeasible(_))));
    }

    #[test]
    fn cantelli_two_moment_bound() {
        // mean 0, variance 1: P(X >= 2) <= 1 / (1 + 4)
        let ms = MomentSequence::from_tail(1, &[0.0, 1.0], MomentSource::External).unwrap();
        let q = IntervalQuery::new((2.0, 3.0), (-3.0, 3.0), 2).unwrap();
        let r = primal_lp_oracle(&ms, &q, 601).unwrap();
        assert_abs_diff_eq!(r.value, 0.2, epsilon = 1e-9);
    }

    #[test]
    fn whole_support_gets_full_mass() {
        let ms = MomentSequence::from_tail(9, &[0.0, 4.0 / 3.0, 0.0, 4.0, 0.0], MomentSource::External).unwrap();
        let q = IntervalQuery::new((-3.0, 3.0), (-3.0, 3.0), 4).unwrap();
        let r = primal_lp_oracle(&ms, &q, 601).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
        let mass: f64 = r.support.iter().map(|(_, w)| w).sum();
        assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn grid_too_small() {
        let ms = MomentSequence::from_tail(1, &[0.0, 1.0], MomentSource::External).unwrap();
        let q = IntervalQuery::new((0.0, 1.0), (-3.0, 3.0), 2).unwrap();
        assert!(primal_lp_oracle(&ms, &q, 10).is_err());
    }
}
