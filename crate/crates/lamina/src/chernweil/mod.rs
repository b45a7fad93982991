//! Numerical characteristic numbers from connections and curvature.
//!
//! Bundles are presented as analytic fields of hermitian projections over
//! charted 2- or 4-dimensional bases; the induced connection differentiates
//! and reprojects. Invariant polynomials of the normalized curvature are
//! integrated against a smooth partition of unity, and the resulting
//! charges are checked against integers, against deformations of the
//! connection, and across direct sums.

pub mod curvature;
pub mod forms;
pub mod geometry;
pub mod matrix;

pub use curvature::{
    connection_independence_check, curvature_form, integrate_invariant, whitney_sum_check,
    ChernWeilError, CurvatureOptions, Defects, IndependenceReport, IntegralReport, Perturbation,
    WhitneyReport,
};
pub use forms::{coordinate_pairs, even_det, EvenElement, InvariantPolynomial, MatrixTwoForm};
pub use geometry::{
    bump, named_geometry, Cp1Tautological, Cp2StableTangent, DirectSum, Expr, ExprGeometry,
    FlatRank, Geometry, GeometrySpec, RankOneBlocks, TrivialSummand,
};
pub use matrix::CMatrix;
