//! Inversive-distance circle packing metrics on triangulated surfaces.
//!
//! A radius per vertex and an inversive distance per edge induce edge
//! lengths, inner angles, and a discrete curvature (angle deficit) per
//! vertex, in Euclidean or hyperbolic background geometry. This crate
//! computes those, solves the prescribed-curvature problem by a Newton
//! iteration on the concave packing energy, and checks the discrete
//! Schwarz-Pick comparison — including the four-vertex disk where the
//! comparison fails for disjoint circles.
//!
//! Modules:
//! - [`complex`]: triangulations, subcomplex combinatorics, doubling;
//! - [`geometry`]: lengths, validity, angles, curvature, degeneration
//!   limits;
//! - [`variational`]: u-coordinates, angle Jacobians, the energy and
//!   its gradient, the prescribed-curvature solver;
//! - [`comparison`]: comparison verdicts, the counterexample and its
//!   double, solver-driven pair generation;
//! - [`io`]: JSON file formats and wire shapes.
//!
//! Vertices are indexed from 0 everywhere, including files; printed
//! tables in the CLI shift to 1-based labels.

pub mod complex;
pub mod comparison;
pub mod error;
pub mod geometry;
pub mod io;
pub mod variational;

pub use crate::complex::{
    build_triangulation, double, normalize_face, Doubling, Edge, Face, Triangulation,
    VertexSubset, WeightedSurface,
};
pub use crate::comparison::{
    build_counterexample, check_comparison, doubled_counterexample, generate_comparison_pair,
    ComparisonInstance, ComparisonVerdict, PartitionAB, VerdictTolerance,
};
pub use crate::error::{Error, Result};
pub use crate::geometry::{
    curvature_lower_bound_check, degeneration_limit, edge_length, face_lengths, gamma_weights,
    inner_angles, metric_report, triangle_valid_direct, triangle_valid_polynomial, Background,
    CurvatureBound, GammaWeights, MetricReport, RadiusVector,
};
pub use crate::variational::{
    angle_jacobian, energy_base_u, energy_gradient, face_energy, face_oneform_integral, from_u,
    from_u_values, solve_prescribed_curvature, to_u, total_energy, AngleJacobian, IterationRecord,
    SolveOptions, SolveOutcome, UCoordinates,
};
