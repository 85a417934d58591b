//! Hankel moment matrices, Hamburger feasibility and localizing matrices.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{min_eig, Matrix};
use crate::moments::MomentSequence;
use crate::scalar::{lit, Scalar};

/// `R_{2s}[i][j] = m_{i+j}` and `R_{2s+1}[i][j] = m_{i+j+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HankelPair<T> {
    pub s: usize,
    pub r_even: Matrix<T>,
    pub r_odd: Matrix<T>,
}

/// `H_s(c) = R_{2s+1} - c R_{2s}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizingMatrix<T> {
    pub s: usize,
    pub c: T,
    pub h: Matrix<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feasibility<T> {
    pub feasible: bool,
    pub min_eigenvalue: T,
}

fn hankel<T: Clone>(m: &[T], s: usize, shift: usize) -> Matrix<T> {
    Matrix::from_fn(s + 1, s + 1, |i, j| m[i + j + shift].clone())
}

/// `R_{2s}` alone; needs `m_0..m_{2s}`.
pub fn hankel_even<T: Clone>(ms: &MomentSequence<T>, s: usize) -> Result<Matrix<T>> {
    ms.require(2 * s)?;
    Ok(hankel(&ms.m, s, 0))
}

/// Both Hankel matrices of level `s`; needs `m_0..m_{2s+1}`.
pub fn hankel_pair<T: Clone>(ms: &MomentSequence<T>, s: usize) -> Result<HankelPair<T>> {
    ms.require(2 * s + 1)?;
    Ok(HankelPair { s, r_even: hankel(&ms.m, s, 0), r_odd: hankel(&ms.m, s, 1) })
}

impl<T: Scalar> HankelPair<T> {
    pub fn localizing(&self, c: T) -> LocalizingMatrix<T> {
        LocalizingMatrix { s: self.s, c, h: self.r_odd.add_scaled(&self.r_even, -c) }
    }
}

pub fn localizing_matrix<T: Scalar>(pair: &HankelPair<T>, c: T) -> LocalizingMatrix<T> {
    pair.localizing(c)
}

/// Relative PSD tolerance `1e-9 (1 + max |R_ij|)`.
pub fn default_tol<T: Scalar>(r: &Matrix<T>) -> T {
    lit::<T>(1e-9) * (T::one() + r.max_abs())
}

/// Hamburger test at level `s`: `R_{2s}` positive semidefinite up to `tol`
/// (default relative tolerance when `None`). Reports `λ_min(R_{2s})`.
pub fn is_feasible_hamburger<T: Scalar>(ms: &MomentSequence<T>, s: usize, tol: Option<T>) -> Result<Feasibility<T>> {
    let r = hankel_even(ms, s)?;
    let tol = tol.unwrap_or_else(|| default_tol(&r));
    let (lmin, _) = min_eig(&r)?;
    Ok(Feasibility { feasible: lmin >= -tol, min_eigenvalue: lmin })
}

/// Strict positive definiteness of `R_{2s}`, under which the primal and dual
/// interval-mass problems have equal value.
pub fn strong_duality_holds<T: Scalar>(ms: &MomentSequence<T>, s: usize, tol: Option<T>) -> Result<bool> {
    let r = hankel_even(ms, s)?;
    let tol = tol.unwrap_or_else(|| default_tol(&r));
    Ok(min_eig(&r)?.0 > tol)
}

/// Exact Hamburger test on rational moments (all principal minors >= 0).
pub fn is_feasible_hamburger_exact(ms: &MomentSequence<BigRational>, s: usize) -> Result<bool> {
    Ok(hankel_even(ms, s)?.is_positive_semidefinite_exact())
}

/// Exact positive definiteness of `R_{2s}` (leading minors > 0).
pub fn strong_duality_holds_exact(ms: &MomentSequence<BigRational>, s: usize) -> Result<bool> {
    Ok(hankel_even(ms, s)?.is_positive_definite_exact())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{moments_from_spectrum, MomentSource};
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn seq(m: &[f64]) -> MomentSequence<f64> {
        MomentSequence::new(1, m.to_vec(), MomentSource::External).unwrap()
    }

    fn example2() -> MomentSequence<f64> {
        seq(&[1.0, 0.0, 4.0 / 3.0, 0.0, 4.0, 0.0])
    }

    #[test]
    fn example2_level_one_assembly() {
        let p = hankel_pair(&example2(), 1).unwrap();
        assert_eq!(p.r_even.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 4.0 / 3.0]]);
        assert_eq!(p.r_odd.to_rows(), vec![vec![0.0, 4.0 / 3.0], vec![4.0 / 3.0, 0.0]]);
    }

    #[test]
    fn level_zero_and_k4() {
        let p = hankel_pair(&seq(&[1.0, 0.25]), 0).unwrap();
        assert_eq!(p.r_even.to_rows(), vec![vec![1.0]]);
        assert_eq!(p.r_odd.to_rows(), vec![vec![0.25]]);
        let k4 = seq(&[1.0, 0.0, 3.0, 6.0, 21.0, 60.0]);
        let p = hankel_pair(&k4, 2).unwrap();
        assert_eq!(p.r_even.row(0), &[1.0, 0.0, 3.0]);
        assert_eq!(p.r_odd.row(0), &[0.0, 3.0, 6.0]);
        assert!(hankel_pair(&k4, 3).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let neg = is_feasible_hamburger(&seq(&[1.0, 0.0, -1.0]), 1, None).unwrap();
        assert!(!neg.feasible);
        let bad = seq(&[1.0, 0.0, 1.0, 0.0, 0.5]);
        assert!(!is_feasible_hamburger(&bad, 2, None).unwrap().feasible);
        let det = hankel_even(&bad, 2).unwrap().determinant();
        assert!((det + 0.5).abs() < 1e-15);
        let k3 = moments_from_spectrum(&[2.0, -1.0, -1.0], 5).unwrap();
        assert!(is_feasible_hamburger(&k3, 2, None).unwrap().feasible);
    }

    #[test]
    fn strong_duality_examples() {
        assert!(strong_duality_holds(&example2(), 2, None).unwrap());
        let k4 = seq(&[1.0, 0.0, 3.0, 6.0, 21.0, 60.0]);
        assert!(strong_duality_holds(&k4, 1, None).unwrap());
        // two atoms: R_4 is singular
        assert!(!strong_duality_holds(&k4, 2, None).unwrap());
        let atom = seq(&[1.0, 2.5, 6.25]);
        assert!(!strong_duality_holds(&atom, 1, None).unwrap());
    }

    #[test]
    fn exact_checks_on_rationals() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        let ex2 = MomentSequence {
            n: 9,
            m: vec![r(1, 1), r(0, 1), r(4, 3), r(0, 1), r(4, 1), r(0, 1)],
            source: MomentSource::External,
        };
        assert!(is_feasible_hamburger_exact(&ex2, 2).unwrap());
        assert!(strong_duality_holds_exact(&ex2, 2).unwrap());
        let bad = MomentSequence { n: 1, m: vec![r(1, 1), r(0, 1), r(1, 1), r(0, 1), r(1, 2)], source: MomentSource::External };
        assert!(!is_feasible_hamburger_exact(&bad, 2).unwrap());
    }

    #[test]
    fn localizing_level_one_shape() {
        let (m2, m3) = (2.2, 3.7);
        let p = hankel_pair(&seq(&[1.0, 0.0, m2, m3]), 1).unwrap();
        let c = 0.6;
        let h = p.localizing(c).h;
        let expect = [[-c, m2], [m2, m3 - c * m2]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[(i, j)] - expect[i][j]).abs() < 1e-15);
            }
        }
        assert_eq!(p.localizing(0.0).h, p.r_odd);
    }

    #[test]
    fn localizing_level_two_entries() {
        let m = [1.0, 0.3, 2.0, 1.1, 7.0, 4.0];
        let p = hankel_pair(&seq(&m), 2).unwrap();
        let c = -1.3;
        let h = localizing_matrix(&p, c).h;
        for i in 0..3 {
            for j in 0..3 {
                assert!((h[(i, j)] - (m[i + j + 1] - c * m[i + j])).abs() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn localizing_is_affine_in_c(c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, t in 0.0f64..1.0) {
            let p = hankel_pair(&seq(&[1.0, 0.1, 2.0, 0.5, 9.0, 3.0]), 2).unwrap();
            let mid = p.localizing(t * c1 + (1.0 - t) * c2).h;
            let blend = p.localizing(c1).h.add_scaled(&p.localizing(c2).h.add_scaled(&p.localizing(c1).h, -1.0), 1.0 - t);
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((mid[(i, j)] - blend[(i, j)]).abs() < 1e-10);
                }
            }
        }

        #[test]
        fn psd_verdict_matches_quadratic_form_sampling(
            atoms in proptest::collection::vec(-3.0f64..3.0, 1..8),
            shift in -2.0f64..0.5,
            probes in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 3), 200),
        ) {
            // perturbing m_2 by `shift` may or may not destroy feasibility
            let mut ms = moments_from_spectrum(&atoms, 4).unwrap();
            ms.m[2] += shift;
            let r = hankel_even(&ms, 2).unwrap();
            let verdict = is_feasible_hamburger(&ms, 2, Some(0.0)).unwrap();
            let worst = probes.iter().map(|v| {
                let rv = r.matvec(v);
                let norm2: f64 = v.iter().map(|x| x * x).sum();
                v.iter().zip(&rv).map(|(a, b)| a * b).sum::<f64>() / norm2.max(1e-300)
            }).fold(f64::INFINITY, f64::min);
            // sampled Rayleigh quotients never undercut the minimum eigenvalue
            prop_assert!(worst >= verdict.min_eigenvalue - 1e-9);
            if worst < -1e-9 {
                prop_assert!(!verdict.feasible);
            }
        }

        #[test]
        fn true_moments_are_feasible(atoms in proptest::collection::vec(-10.0f64..10.0, 1..30)) {
            let ms = moments_from_spectrum(&atoms, 5).unwrap();
            for s in 1..=2 {
                prop_assert!(is_feasible_hamburger(&ms, s, None).unwrap().feasible);
            }
        }
    }
}
