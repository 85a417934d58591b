//! Small dense linear algebra.
//!
//! Everything here is written for the sizes this crate needs: Hankel and Gram
//! blocks of at most a handful of rows, and dense adjacency matrices of desk
//! scale graphs for the spectral oracle.

use std::ops::{Index, IndexMut};

use num_traits::{Num, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    /// Entrywise `self + scale * other`.
    pub fn add_scaled(&self, other: &Matrix<T>, scale: T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.clone() + scale.clone() * b.clone())
            .collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.rows);
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| {
                acc + self[(i, k)].clone() * other[(k, j)].clone()
            })
        })
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Determinant by cofactor expansion. Exact for exact number types; meant
    /// for the small Hankel matrices only.
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of non-square matrix");
        cofactor_det(&self.to_rows())
    }

    /// Determinants of every principal submatrix, keyed by index subset.
    pub fn principal_minors(&self) -> Vec<(Vec<usize>, T)> {
        assert!(self.is_square());
        let n = self.rows;
        assert!(n <= 16, "principal minor enumeration is exponential");
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let sub: Vec<Vec<T>> = idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self[(i, j)].clone()).collect())
                .collect();
            out.push((idx, cofactor_det(&sub)));
        }
        out
    }
}

impl<T: Clone + Num + Signed + PartialOrd> Matrix<T> {
    /// Sylvester test: every leading principal minor strictly positive.
    pub fn is_positive_definite_exact(&self) -> bool {
        (1..=self.rows).all(|k| {
            let sub: Vec<Vec<T>> =
                (0..k).map(|i| (0..k).map(|j| self[(i, j)].clone()).collect()).collect();
            cofactor_det(&sub).is_positive()
        })
    }

    /// Semidefiniteness test: every principal minor nonnegative.
    pub fn is_positive_semidefinite_exact(&self) -> bool {
        self.principal_minors().iter().all(|(_, d)| !d.is_negative())
    }
}

fn cofactor_det<T: Clone + Num>(m: &[Vec<T>]) -> T {
    match m.len() {
        0 => T::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        n => {
            let mut acc = T::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<T>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect()
                    })
                    .collect();
                let term = m[0][j].clone() * cofactor_det(&minor);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Largest |a_ij - a_ji|.
    pub fn skew(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                s = s.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        s
    }

    pub fn check_symmetric(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::InvalidArgument(format!(
                "expected square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let skew = self.skew();
        if skew > lit::<T>(1e-12) * (T::one() + self.max_abs()) {
            return Err(Error::NotSymmetric(skew.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    pub fn symmetrize(&mut self) {
        let half = lit::<T>(0.5);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let v = half * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = v;
                self[(j, i)] = v;
            }
        }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as the
/// columns of the second matrix. Intended for blocks up to roughly 10x10.
pub fn jacobi_eigen<T: Scalar>(m: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let n = m.rows();
    let mut a = m.clone();
    a.symmetrize();
    let mut v = Matrix::<T>::identity(n);
    let norm: T = a.data.iter().map(|x| *x * *x).sum::<T>().sqrt();
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= eps * lit::<T>(0.5) * norm || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (lit::<T>(2.0) * apq);
                let t = if theta.is_infinite() {
                    T::zero()
                } else {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                if t == T::zero() {
                    continue;
                }
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Smallest eigenvalue and a unit eigenvector of a small symmetric matrix.
pub fn min_eig<T: Scalar>(m: &Matrix<T>) -> Result<(T, Vec<T>)> {
    m.check_symmetric()?;
    if m.rows() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let (values, vectors) = jacobi_eigen(m);
    let v = (0..m.rows()).map(|r| vectors[(r, 0)]).collect();
    Ok((values[0], v))
}

/// Largest eigenvalue and a unit eigenvector of a small symmetric matrix.
pub fn max_eig<T: Scalar>(m: &Matrix<T>) -> Result<(T, Vec<T>)> {
    m.check_symmetric()?;
    if m.rows() == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let (values, vectors) = jacobi_eigen(m);
    let last = m.rows() - 1;
    let v = (0..m.rows()).map(|r| vectors[(r, last)]).collect();
    Ok((values[last], v))
}

/// Lower-triangular Cholesky factor, or `None` when the matrix is not
/// numerically positive definite.
pub fn cholesky<T: Scalar>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let n = m.rows();
    let mut l = Matrix::<T>::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` given the Cholesky factor.
pub fn cholesky_solve<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l[(k, i)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse<T: Scalar>(l: &Matrix<T>) -> Matrix<T> {
    let n = l.rows();
    let mut inv = Matrix::<T>::zeros(n, n);
    for col in 0..n {
        for i in col..n {
            let mut s = if i == col { T::one() } else { T::zero() };
            for k in col..i {
                s -= l[(i, k)] * inv[(k, col)];
            }
            inv[(i, col)] = s / l[(i, i)];
        }
    }
    inv
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
pub fn spd_inverse<T: Scalar>(m: &Matrix<T>) -> Option<Matrix<T>> {
    let l = cholesky(m)?;
    let li = lower_inverse(&l);
    let mut inv = li.transpose().matmul(&li);
    inv.symmetrize();
    Some(inv)
}

/// Reduced row echelon form with full column scan and partial pivoting.
///
/// Returns the pivot columns. Rows whose pivot falls below `tol` are treated
/// as dependent.
pub fn rref<T: Scalar>(a: &mut Matrix<T>, rhs: &mut [T], tol: T) -> Vec<usize> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, best_val) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_val <= tol {
            continue;
        }
        if best != r {
            for j in 0..cols {
                let tmp = a[(r, j)];
                a[(r, j)] = a[(best, j)];
                a[(best, j)] = tmp;
            }
            rhs.swap(r, best);
        }
        let p = a[(r, c)];
        for j in 0..cols {
            a[(r, j)] /= p;
        }
        rhs[r] /= p;
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != T::zero() {
                    for j in 0..cols {
                        let v = a[(r, j)];
                        a[(i, j)] -= f * v;
                    }
                    let v = rhs[r];
                    rhs[i] -= f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Affine parametrization `x = x0 + N w` of the solution set of `A x = b`.
#[derive(Debug, Clone)]
pub struct AffineSolutionSet<T> {
    pub particular: Vec<T>,
    /// Columns span the null space of `A`.
    pub basis: Matrix<T>,
}

/// Solves `A x = b` for the full affine solution set by elimination.
pub fn solve_affine<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<AffineSolutionSet<T>> {
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = T::one().max(a.max_abs());
    let tol = lit::<T>(1e-12) * scale;
    let pivots = rref(&mut m, &mut rhs, tol);
    let rank = pivots.len();
    if rhs[rank..].iter().any(|v| v.abs() > lit::<T>(1e-9) * (T::one() + scale)) {
        return Err(Error::Solver("inconsistent linear equality constraints".into()));
    }
    let n = a.cols();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut particular = vec![T::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = rhs[r];
    }
    let mut basis = Matrix::<T>::zeros(n, free.len());
    for (k, &f) in free.iter().enumerate() {
        basis[(f, k)] = T::one();
        for (r, &c) in pivots.iter().enumerate() {
            basis[(c, k)] = -m[(r, f)];
        }
    }
    Ok(AffineSolutionSet { particular, basis })
}

/// Full symmetric eigen-decomposition by Householder tridiagonalization and
/// implicit QL iteration (EISPACK tred2/tql2 lineage).
///
/// Eigenvalues come back in ascending order. When `want_vectors` is false the
/// accumulation of the orthogonal transform is skipped.
pub fn symmetric_eigen<T: Scalar>(m: &Matrix<T>, want_vectors: bool) -> Result<(Vec<T>, Option<Matrix<T>>)> {
    m.check_symmetric()?;
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), want_vectors.then(|| Matrix::zeros(0, 0))));
    }
    let mut v = m.clone();
    v.symmetrize();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e, want_vectors);
    ql_implicit(&mut d, &mut e, want_vectors.then_some(&mut v))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = want_vectors.then(|| Matrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok((values, vectors))
}

fn tridiagonalize<T: Scalar>(v: &mut Matrix<T>, d: &mut [T], e: &mut [T], accumulate: bool) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[(k, j)] -= upd;
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = v[(j, j)];
        }
        e[0] = T::zero();
        return;
    }

    for i in 0..(n - 1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[(k, j)] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

fn ql_implicit<T: Scalar>(d: &mut [T], e: &mut [T], mut v: Option<&mut Matrix<T>>) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 200 {
                    return Err(Error::Solver("QL iteration did not converge".into()));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (lit::<T>(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        for k in 0..n {
                            let hk = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * hk;
                            v[(k, i)] = c * v[(k, i)] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn residual(m: &Matrix<f64>, val: f64, vec: &[f64]) -> f64 {
        let mv = m.matvec(vec);
        mv.iter().zip(vec).map(|(a, b)| (a - val * b).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn min_eig_of_swap_matrix() {
        let m = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let (val, vec) = min_eig(&m).unwrap();
        assert_abs_diff_eq!(val, -1.0, epsilon = 1e-14);
        assert!(residual(&m, val, &vec) < 1e-12);
        assert_abs_diff_eq!(vec[0].abs(), 1.0 / 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(vec[0], -vec[1], epsilon = 1e-12);
    }

    #[test]
    fn min_eig_of_identity() {
        let m = Matrix::<f64>::identity(4);
        let (val, vec) = min_eig(&m).unwrap();
        assert_eq!(val, 1.0);
        assert_abs_diff_eq!(vec.iter().map(|x| x * x).sum::<f64>(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn min_eig_rejects_skew_input() {
        let m = Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.5, 0.0]]);
        assert!(matches!(min_eig(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn exact_determinant_over_rationals() {
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        // R4 for moments (1, 0, 1, 0, 1/2): det = 1/2 - 1 < 0.
        let m = Matrix::from_rows(vec![
            vec![r(1, 1), r(0, 1), r(1, 1)],
            vec![r(0, 1), r(1, 1), r(0, 1)],
            vec![r(1, 1), r(0, 1), r(1, 2)],
        ]);
        assert_eq!(m.determinant(), r(-1, 2));
        assert!(!m.is_positive_semidefinite_exact());
        assert!(!m.is_positive_definite_exact());
    }

    #[test]
    fn affine_solution_set_spans_solutions() {
        let a = Matrix::from_rows(vec![vec![1.0, 1.0, 0.0, 2.0], vec![0.0, 1.0, 1.0, -1.0]]);
        let b = [3.0, 1.0];
        let set = solve_affine(&a, &b).unwrap();
        assert_eq!(set.basis.cols(), 2);
        for w in [[0.0, 0.0], [1.0, -2.0], [0.3, 5.0]] {
            let x: Vec<f64> = (0..4)
                .map(|i| set.particular[i] + set.basis[(i, 0)] * w[0] + set.basis[(i, 1)] * w[1])
                .collect();
            let ax = a.matvec(&x);
            assert_abs_diff_eq!(ax[0], 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(ax[1], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn tridiagonal_ql_matches_jacobi_on_small_matrix() {
        let m = Matrix::from_rows(vec![
            vec![4.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ]);
        let (jv, _) = jacobi_eigen(&m);
        let (qv, vecs) = symmetric_eigen(&m, true).unwrap();
        let (qv2, _) = symmetric_eigen(&m, false).unwrap();
        let vecs = vecs.unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(jv[i], qv[i], epsilon = 1e-12);
            assert_abs_diff_eq!(qv2[i], qv[i], epsilon = 1e-12);
            let col: Vec<f64> = (0..4).map(|r| vecs[(r, i)]).collect();
            assert!(residual(&m, qv[i], &col) < 1e-12);
        }
    }

    #[test]
    fn f32_jacobi_works() {
        let m = Matrix::from_rows(vec![vec![2.0f32, 1.0], vec![1.0, 2.0]]);
        let (vals, _) = jacobi_eigen(&m);
        assert!((vals[0] - 1.0).abs() < 1e-6 && (vals[1] - 3.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn jacobi_pairs_have_small_residual(entries in proptest::collection::vec(-10.0f64..10.0, 36)) {
            let n = 6;
            let mut m = Matrix::from_fn(n, n, |i, j| entries[i * n + j]);
            m.symmetrize();
            let (vals, vecs) = jacobi_eigen(&m);
            let norm = m.max_abs().max(1.0);
            for (k, &val) in vals.iter().enumerate() {
                let col: Vec<f64> = (0..n).map(|r| vecs[(r, k)]).collect();
                prop_assert!(residual(&m, val, &col) <= 1e-12 * norm * n as f64);
            }
            let (qv, _) = symmetric_eigen(&m, false).unwrap();
            for k in 0..n {
                prop_assert!((qv[k] - vals[k]).abs() <= 1e-11 * norm);
            }
        }

        #[test]
        fn psd_test_agrees_with_quadratic_form_sampling(
            entries in proptest::collection::vec(-3.0f64..3.0, 9),
            probes in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 3), 50),
        ) {
            let mut m = Matrix::from_fn(3, 3, |i, j| entries[i * 3 + j]);
            m.symmetrize();
            let (lmin, _) = min_eig(&m).unwrap();
            for v in &probes {
                let q: f64 = m.matvec(v).iter().zip(v).map(|(a, b)| a * b).sum();
                let vv: f64 = v.iter().map(|x| x * x).sum();
                prop_assert!(q >= lmin * vv - 1e-10);
            }
        }
    }
}
