use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("face {face:?} repeats a vertex")]
    NonSimplicial { face: [usize; 3] },

    #[error("face {face:?} appears more than once")]
    DuplicateFace { face: [usize; 3] },

    #[error("edge ({}, {}) lies in more than two faces", .edge.0, .edge.1)]
    EdgeInTooManyFaces { edge: (usize, usize) },

    #[error("the 1-skeleton is not connected")]
    Disconnected,

    #[error("faces around vertex {vertex} do not form a single fan")]
    NonManifoldVertex { vertex: usize },

    #[error("surface is already closed; doubling needs a nonempty boundary")]
    AlreadyClosed,

    #[error("inversive distance {value} on edge ({}, {}) is outside {range}", .edge.0, .edge.1)]
    InversiveOutOfRange {
        edge: (usize, usize),
        value: f64,
        range: &'static str,
    },

    #[error("edge ({}, {}) has no inversive distance", .edge.0, .edge.1)]
    MissingInversive { edge: (usize, usize) },

    #[error("edge ({}, {}) was assigned an inversive distance twice", .edge.0, .edge.1)]
    DuplicateInversive { edge: (usize, usize) },

    #[error("edge ({}, {}) is not an edge of the triangulation", .edge.0, .edge.1)]
    UnknownEdge { edge: (usize, usize) },

    #[error("expected {expected} radii, got {got}")]
    RadiusCountMismatch { expected: usize, got: usize },

    #[error("radius at position {vertex} must be positive, got {value}")]
    NonPositiveRadius { vertex: usize, value: f64 },

    #[error("vertex {vertex} is out of range for a surface with {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },

    #[error("lengths ({}, {}, {}) do not satisfy the triangle inequality", .lengths[0], .lengths[1], .lengths[2])]
    DegenerateTriangle { lengths: [f64; 3] },

    #[error("u-coordinate {value} at position {vertex} is outside the hyperbolic domain (u < 0)")]
    DomainError { vertex: usize, value: f64 },

    #[error("{metric} is not a packing metric: face {face:?} is degenerate")]
    NotAPackingMetric { metric: String, face: [usize; 3] },

    #[error("outside the concave regime: {detail}")]
    NotConcaveRegion { detail: String },

    #[error(
        "target curvature is infeasible: sum {sum} over vertices {subset:?} is at or below the degeneration limit {limit}"
    )]
    InfeasibleTarget {
        subset: Vec<usize>,
        sum: f64,
        limit: f64,
    },

    #[error("solver did not converge within {0} iterations")]
    MaxIterations(usize),

    #[error("invalid A/B partition: {0}")]
    BadPartition(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
