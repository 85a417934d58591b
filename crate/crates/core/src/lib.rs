//! Spectral information about large graphs from a handful of local subgraph
//! counts: closed-walk moments, Hankel-matrix support bounds on the spectrum,
//! and semidefinite upper bounds on eigenvalue counts in intervals.
//!
//! Numerical code is generic over [`Scalar`] (`f32`/`f64`); the exact
//! feasibility checks run on `BigRational`. The aliases below fix `f64`.

// negated comparisons are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod census;
pub mod eigencount;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod hankel;
pub mod linalg;
pub mod moments;
pub mod scalar;
pub mod sdp;
pub mod spectrum;

pub use bounds::{bounds_auto, bounds_bisect, bounds_s1, bounds_s2, BoundMethod, SupportBounds};
pub use census::{aggregates, node_census, CensusAggregates, NodeCensus};
pub use eigencount::{cdf_bound_sweep, eigencount_upper, EigencountResult, IntervalQuery, SweepPoint};
pub use error::{Error, Result};
pub use estimators::{classical_bounds, social_estimators, ClassicalBounds, EstimatorReport};
pub use graph::{generate, load_edge_list, GenParams, Graph, GraphKind, LoadOptions};
pub use hankel::{is_feasible_hamburger, strong_duality_holds, Feasibility, HankelPair};
pub use moments::{
    moments_from_aggregates, moments_from_census, moments_from_spectrum, moments_from_walks, ExactMoments,
    MomentSequence, MomentSource,
};
pub use scalar::Scalar;
pub use spectrum::{eigenvalues, SpectrumSummary};

pub type Moments = MomentSequence<f64>;
pub type Aggregates = CensusAggregates<f64>;
pub type Bounds = SupportBounds<f64>;
pub type Estimators = EstimatorReport<f64>;
pub type Eigencount = EigencountResult<f64>;
pub type Query = IntervalQuery<f64>;
pub type Spectrum = SpectrumSummary<f64>;
pub type Matrix = linalg::Matrix<f64>;
