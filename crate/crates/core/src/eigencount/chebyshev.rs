//! Chebyshev-basis polynomial helpers on `[-1, 1]` and the affine map from
//! an interval `[a, b]` onto it.

use crate::scalar::{lit, Scalar};

/// Affine map `x -> u = (2x - a - b) / (b - a)` and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitMap<T> {
    pub center: T,
    pub half_width: T,
}

impl<T: Scalar> UnitMap<T> {
    pub fn new(a: T, b: T) -> Self {
        let half = lit::<T>(0.5);
        UnitMap { center: (a + b) * half, half_width: (b - a) * half }
    }

    pub fn to_unit(&self, x: T) -> T {
        (x - self.center) / self.half_width
    }

    pub fn from_unit(&self, u: T) -> T {
        self.center + self.half_width * u
    }
}

/// Product of two Chebyshev series, via `T_i T_j = (T_{i+j} + T_{|i-j|}) / 2`.
pub fn mul<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let half = lit::<T>(0.5);
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            let v = half * x * y;
            out[i + j] += v;
            out[i.abs_diff(j)] += v;
        }
    }
    out
}

/// Clenshaw evaluation of `Σ c_k T_k(u)`.
pub fn eval<T: Scalar>(c: &[T], u: T) -> T {
    let two_u = u + u;
    let (mut b1, mut b2) = (T::zero(), T::zero());
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + two_u * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    match c.first() {
        Some(&c0) => c0 + u * b1 - b2,
        None => T::zero(),
    }
}

/// Monomial coefficients of `T_0..T_k`: row `j` holds `T_j(u) = Σ_i row[i] u^i`.
pub fn monomial_table(k: usize) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i64>> = vec![vec![1]];
    if k >= 1 {
        rows.push(vec![0, 1]);
    }
    for j in 2..=k {
        let mut next = vec![0i64; j + 1];
        for (i, &c) in rows[j - 1].iter().enumerate() {
            next[i + 1] += 2 * c;
        }
        for (i, &c) in rows[j - 2].iter().enumerate() {
            next[i] -= c;
        }
        rows.push(next);
    }
    rows
}

/// Chebyshev coefficients to monomial coefficients in `u`.
pub fn to_monomial<T: Scalar>(c: &[T]) -> Vec<T> {
    if c.is_empty() {
        return Vec::new();
    }
    let table = monomial_table(c.len() - 1);
    let mut out = vec![T::zero(); c.len()];
    for (j, &cj) in c.iter().enumerate() {
        for (i, &t) in table[j].iter().enumerate() {
            out[i] += cj * T::from_i64(t).unwrap();
        }
    }
    out
}

fn binomial<T: Scalar>(n: usize, k: usize) -> T {
    let mut r = T::one();
    for i in 0..k {
        r = r * T::from_usize(n - i).unwrap() / T::from_usize(i + 1).unwrap();
    }
    r
}

/// Monomial coefficients in `u` rewritten in `x`, with `u = (x - center) / half_width`.
pub fn unit_to_x<T: Scalar>(mono_u: &[T], map: &UnitMap<T>) -> Vec<T> {
    let mut out = vec![T::zero(); mono_u.len()];
    for (j, &cj) in mono_u.iter().enumerate() {
        let scale = cj / map.half_width.powi(j as i32);
        for i in 0..=j {
            out[i] += scale * binomial::<T>(j, i) * (-map.center).powi((j - i) as i32);
        }
    }
    out
}

/// `E[u^j]` for `j = 0..=k` from the moments `m_0..m_k` in `x`.
pub fn unit_moments<T: Scalar>(m: &[T], map: &UnitMap<T>, k: usize) -> Vec<T> {
    (0..=k)
        .map(|j| {
            let mut acc = T::zero();
            for i in 0..=j {
                acc += binomial::<T>(j, i) * m[i] * (-map.center).powi((j - i) as i32);
            }
            acc / map.half_width.powi(j as i32)
        })
        .collect()
}

/// `E[T_j(u)]` for `j = 0..=k`.
pub fn chebyshev_moments<T: Scalar>(m: &[T], map: &UnitMap<T>, k: usize) -> Vec<T> {
    let mu = unit_moments(m, map, k);
    monomial_table(k)
        .iter()
        .map(|row| row.iter().zip(&mu).map(|(&t, &x)| T::from_i64(t).unwrap() * x).sum())
        .collect()
}
