//! Closed-form spectral-radius estimates: two degree-based upper bounds, the
//! Chung-Lu estimator and the cycle-dominance estimators.

use serde::{Deserialize, Serialize};

use crate::census::CensusAggregates;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::{from_count, lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBounds<T> {
    pub u1: T,
    pub u2: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport<T> {
    pub u1: Option<T>,
    pub u2: Option<T>,
    #[serde(rename = "W")]
    pub w: Option<T>,
    pub lambda_a: Option<T>,
    pub lambda_b: Option<T>,
    pub inputs_summary: CensusAggregates<T>,
}

/// `u1 = sqrt(2e - (n-1) d_min + (d_min - 1) d_max)` and
/// `u2 = max sqrt(d_i m_j)` over both orientations of every edge, where `m_j`
/// is the mean degree of the neighbors of `j`.
pub fn classical_bounds<T: Scalar>(g: &Graph) -> Result<ClassicalBounds<T>> {
    let e = g.edge_count();
    if e == 0 {
        return Err(Error::Degenerate("classical bounds need at least one edge".into()));
    }
    let n = g.node_count() as f64;
    let (dmin, dmax) = (g.min_degree() as f64, g.max_degree() as f64);
    let radicand = 2.0 * e as f64 - (n - 1.0) * dmin + (dmin - 1.0) * dmax;
    let u1 = lit::<T>(radicand.max(0.0)).sqrt();

    let degrees = g.degrees();
    let neighbor_mean: Vec<f64> = (0..g.node_count())
        .map(|j| {
            if degrees[j] == 0 {
                0.0
            } else {
                let s: usize = g.neighbors(j).iter().map(|&l| degrees[l as usize]).sum();
                s as f64 / degrees[j] as f64
            }
        })
        .collect();
    let best = g
        .edges()
        .flat_map(|(i, j)| [degrees[i] as f64 * neighbor_mean[j], degrees[j] as f64 * neighbor_mean[i]])
        .fold(0.0f64, f64::max);
    Ok(ClassicalBounds { u1, u2: lit::<T>(best).sqrt() })
}

/// `W = Σ d_i² / Σ d_i`.
pub fn chung_lu_estimator<T: Scalar>(degrees: &[usize]) -> Result<T> {
    let s1: u128 = degrees.iter().map(|&d| d as u128).sum();
    if s1 == 0 {
        return Err(Error::Degenerate("all degrees are zero".into()));
    }
    let s2: u128 = degrees.iter().map(|&d| (d as u128) * (d as u128)).sum();
    Ok(from_count::<T>(s2) / from_count::<T>(s1))
}

/// `(10Π + 10C_dt - 30Δ)^{1/5}` and `(10Π + 10C_dt)^{1/5}` on graph totals;
/// `None` where the radicand is not positive.
pub fn social_estimators<T: Scalar>(a: &CensusAggregates<T>) -> (Option<T>, Option<T>) {
    let ten = lit::<T>(10.0);
    let base = ten * a.pentagons + ten * a.cdt;
    let fifth = |x: T| (x > T::zero()).then(|| x.powf(lit(0.2)));
    (fifth(base - lit::<T>(30.0) * a.delta), fifth(base))
}

/// Every estimator for one graph, given its census totals.
pub fn estimator_report<T: Scalar>(g: &Graph, agg: &CensusAggregates<T>) -> EstimatorReport<T> {
    let classical = classical_bounds::<T>(g).ok();
    let (lambda_a, lambda_b) = social_estimators(agg);
    EstimatorReport {
        u1: classical.map(|c| c.u1),
        u2: classical.map(|c| c.u2),
        w: chung_lu_estimator(&g.degrees()).ok(),
        lambda_a,
        lambda_b,
        inputs_summary: agg.clone(),
    }
}

/// Estimators available from totals alone, without the graph.
pub fn estimator_report_from_aggregates<T: Scalar>(agg: &CensusAggregates<T>) -> EstimatorReport<T> {
    let (lambda_a, lambda_b) = social_estimators(agg);
    let w = (agg.e > T::zero()).then(|| agg.w2 / (agg.e + agg.e));
    EstimatorReport { u1: None, u2: None, w, lambda_a, lambda_b, inputs_summary: agg.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::{aggregates, brute_force_cycles, node_census};
    use crate::graph::{generate, GenParams, GraphKind};
    use crate::moments::{moments_from_aggregates, moments_from_census};
    use crate::spectrum::eigenvalues;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn make(kind: GraphKind, n: usize) -> Graph {
        generate(kind, n, GenParams::default()).unwrap()
    }

    fn totals(g: &Graph) -> CensusAggregates<f64> {
        aggregates(&node_census(g).unwrap()).unwrap().to_real()
    }

    #[test]
    fn complete_graph_is_tight() {
        let b = classical_bounds::<f64>(&make(GraphKind::Complete, 4)).unwrap();
        assert_abs_diff_eq!(b.u1, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.u2, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn ring_u1() {
        let b = classical_bounds::<f64>(&make(GraphKind::Ring, 6)).unwrap();
        assert_abs_diff_eq!(b.u1, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.u2, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn star_u2_orientations() {
        // hub -> leaf: d_hub * m_leaf = 4 * 4; leaf -> hub: 1 * 1
        let b = classical_bounds::<f64>(&make(GraphKind::Star, 5)).unwrap();
        assert_abs_diff_eq!(b.u2, 4.0, epsilon = 1e-12);
        assert!(b.u2 >= 2.0);
    }

    #[test]
    fn edgeless_refused() {
        assert!(classical_bounds::<f64>(&Graph::empty(3)).is_err());
        assert!(chung_lu_estimator::<f64>(&[0, 0]).is_err());
    }

    #[test]
    fn chung_lu() {
        assert_abs_diff_eq!(chung_lu_estimator::<f64>(&[4, 1, 1, 1, 1]).unwrap(), 2.5);
        assert_abs_diff_eq!(chung_lu_estimator::<f64>(&[3; 8]).unwrap(), 3.0);
    }

    #[test]
    fn complete_six_dominance() {
        let g = make(GraphKind::Complete, 6);
        let pentagons: u64 = (0..6).map(|i| brute_force_cycles(&g, 5, i).unwrap()).sum::<u64>() / 5;
        assert_eq!(pentagons, 72);
        let a = totals(&g);
        assert_eq!(a.pentagons, 72.0);
        assert_eq!(a.delta, 20.0);
        assert_eq!(a.cdt, 300.0);
        let (la, lb) = social_estimators(&a);
        // 5^5 + 5 * (-1)^5
        assert_abs_diff_eq!(la.unwrap(), 3120f64.powf(0.2), epsilon = 1e-12);
        assert_abs_diff_eq!(lb.unwrap(), 3720f64.powf(0.2), epsilon = 1e-12);
        let s = eigenvalues::<f64>(&g).unwrap();
        let n_m5: f64 = s.eigenvalues.iter().map(|x| x.powi(5)).sum();
        assert_abs_diff_eq!(la.unwrap().powi(5), n_m5, epsilon = 1e-9);
    }

    #[test]
    fn cycle_free_undefined() {
        let (la, lb) = social_estimators(&totals(&make(GraphKind::Ring, 6)));
        assert!(la.is_none() && lb.is_none());
    }

    #[test]
    fn published_social_aggregates() {
        let a = CensusAggregates::from_per_node_averages(2404, 9.478f64, 28.15, 825.3, 31794.0, 1318.0, 8520.0);
        let (la, _) = social_estimators(&a);
        assert!((la.unwrap() - 62.6).abs() <= 0.5, "{la:?}");
        let m = moments_from_aggregates(&a).unwrap();
        assert_abs_diff_eq!(la.unwrap().powi(5), 2404.0 * m.m[5], epsilon = 1e-6 * la.unwrap().powi(5));
    }

    #[test]
    fn report_from_aggregates_matches_graph_report() {
        let g = generate(GraphKind::ErdosRenyi, 40, GenParams { p: 0.2, seed: 3 }).unwrap();
        let a = totals(&g);
        let full = estimator_report(&g, &a);
        let partial = estimator_report_from_aggregates(&a);
        assert_abs_diff_eq!(full.w.unwrap(), partial.w.unwrap(), epsilon = 1e-12);
        assert_eq!(full.lambda_a, partial.lambda_a);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn classical_bounds_dominate_rho(n in 3usize..40, p in 0.05f64..0.9, seed in 0u64..10_000) {
            let g = generate(GraphKind::ErdosRenyi, n, GenParams { p, seed }).unwrap();
            prop_assume!(g.edge_count() > 0);
            let rho = eigenvalues::<f64>(&g).unwrap().rho;
            let b = classical_bounds::<f64>(&g).unwrap();
            prop_assert!(b.u1 >= rho - 1e-8, "u1 {} < rho {}", b.u1, rho);
            prop_assert!(b.u2 >= rho - 1e-8, "u2 {} < rho {}", b.u2, rho);
        }

        #[test]
        fn dominance_identity(n in 3usize..30, p in 0.1f64..0.9, seed in 0u64..10_000) {
            let g = generate(GraphKind::ErdosRenyi, n, GenParams { p, seed }).unwrap();
            let c = node_census(&g).unwrap();
            let a = aggregates(&c).unwrap().to_real::<f64>();
            let m5 = moments_from_census(&c).unwrap().to_sequence::<f64>().m[5];
            let (la, lb) = social_estimators(&a);
            if let Some(la) = la {
                prop_assert!((la.powi(5) - n as f64 * m5).abs() <= 1e-9 * (1.0 + n as f64 * m5));
                prop_assert!(lb.unwrap() >= la);
            }
        }
    }
}
