//! Discrete Schwarz-Pick comparison checking, the four-vertex
//! counterexample disk where the comparison fails for disjoint
//! circles, its double, and solver-driven generation of comparison
//! pairs in the regime where the comparison provably holds.

use std::collections::BTreeMap;

use crate::complex::{double, Triangulation, VertexSubset, WeightedSurface};
use crate::error::{Error, Result};
use crate::geometry::{metric_report, Background, RadiusVector};
use crate::variational::{solve_prescribed_curvature, SolveOptions};

/// A partition of the vertex set into the compared part A and the
/// anchored part B. A must be nonempty; B may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionAB {
    a: VertexSubset,
    b: VertexSubset,
}

impl PartitionAB {
    pub fn new(a: VertexSubset, b: VertexSubset, vertex_count: usize) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::BadPartition("A is empty".into()));
        }
        for v in 0..vertex_count {
            match (a.contains(v), b.contains(v)) {
                (true, true) => {
                    return Err(Error::BadPartition(format!("vertex {} is in both A and B", v)))
                }
                (false, false) => {
                    return Err(Error::BadPartition(format!(
                        "vertex {} is in neither A nor B",
                        v
                    )))
                }
                _ => {}
            }
        }
        if a.len() + b.len() != vertex_count {
            return Err(Error::BadPartition("partition members out of range".into()));
        }
        Ok(PartitionAB { a, b })
    }

    /// B is the complement of A.
    pub fn from_a(a: VertexSubset, vertex_count: usize) -> Result<Self> {
        let b = VertexSubset::new((0..vertex_count).filter(|&v| !a.contains(v)));
        Self::new(a, b, vertex_count)
    }

    pub fn a(&self) -> &VertexSubset {
        &self.a
    }

    pub fn b(&self) -> &VertexSubset {
        &self.b
    }
}

/// Slack applied when reading the inequalities off floating-point
/// metrics. `hypothesis_slack` lets a hypothesis pass when it fails by
/// no more than that; `violation_threshold` suppresses conclusion
/// violations smaller than solver noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictTolerance {
    pub hypothesis_slack: f64,
    pub violation_threshold: f64,
}

impl VerdictTolerance {
    /// Strict componentwise comparisons.
    pub const EXACT: VerdictTolerance = VerdictTolerance {
        hypothesis_slack: 0.0,
        violation_threshold: 0.0,
    };

    /// Slack sized for metrics produced by the Newton solver, so its
    /// residual noise cannot manufacture fake counterexamples.
    pub const SOLVER_NOISE: VerdictTolerance = VerdictTolerance {
        hypothesis_slack: 1e-9,
        violation_threshold: 1e-6,
    };
}

impl Default for VerdictTolerance {
    fn default() -> Self {
        VerdictTolerance::EXACT
    }
}

/// Outcome of checking the comparison on a pair of packing metrics r
/// (reference) and R (candidate): whether the two hypotheses
/// R|_B >= r|_B and K_R|_A >= K_r|_A hold, and whether the conclusion
/// R >= r does.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonVerdict {
    pub hyp_radii_ok: bool,
    pub hyp_curv_ok: bool,
    pub conclusion_ok: bool,
    /// Vertices where the candidate falls below the reference by more
    /// than the violation threshold.
    pub violating_vertices: Vec<usize>,
    /// candidate - reference, per vertex.
    pub margins: Vec<f64>,
}

/// Evaluates the three inequality families on two packing metrics.
/// Errors with `NotAPackingMetric` (naming "r" or "R") if either
/// metric degenerates a face.
pub fn check_comparison(
    surface: &WeightedSurface,
    partition: &PartitionAB,
    reference: &RadiusVector,
    candidate: &RadiusVector,
    tolerance: VerdictTolerance,
) -> Result<ComparisonVerdict> {
    let curvature_of = |r: &RadiusVector, name: &str| -> Result<Vec<f64>> {
        let report = metric_report(surface, r);
        report.curvatures().ok_or_else(|| Error::NotAPackingMetric {
            metric: name.into(),
            face: report.first_invalid_face().unwrap(),
        })
    };
    let k_reference = curvature_of(reference, "r")?;
    let k_candidate = curvature_of(candidate, "R")?;

    let slack = tolerance.hypothesis_slack;
    let hyp_radii_ok = partition
        .b()
        .iter()
        .all(|v| candidate.get(v) - reference.get(v) >= -slack);
    let hyp_curv_ok = partition
        .a()
        .iter()
        .all(|v| k_candidate[v] - k_reference[v] >= -slack);

    let margins: Vec<f64> = (0..surface.vertex_count())
        .map(|v| candidate.get(v) - reference.get(v))
        .collect();
    let violating_vertices: Vec<usize> = margins
        .iter()
        .enumerate()
        .filter(|(_, &m)| m < -tolerance.violation_threshold)
        .map(|(v, _)| v)
        .collect();

    Ok(ComparisonVerdict {
        hyp_radii_ok,
        hyp_curv_ok,
        conclusion_ok: violating_vertices.is_empty(),
        violating_vertices,
        margins,
    })
}

/// A weighted surface with two packing metrics and a partition, ready
/// for [`check_comparison`].
#[derive(Debug, Clone)]
pub struct ComparisonInstance {
    pub surface: WeightedSurface,
    /// The metric playing r in the comparison.
    pub reference: RadiusVector,
    /// The metric playing R.
    pub candidate: RadiusVector,
    pub partition: PartitionAB,
}

/// The four-vertex Euclidean disk on which both hypotheses hold but
/// the conclusion fails at the interior vertex: faces {1,2,4}, {1,3,4},
/// {2,3,4} in 1-based labels, I(2,4) = 4 and I(3,4) = 3, tangent
/// elsewhere, r = (100, 100, 100, 155), R = (110, 240, 220, 150).
pub fn build_counterexample() -> ComparisonInstance {
    let t = Triangulation::build(&[[0, 1, 3], [0, 2, 3], [1, 2, 3]]).expect("valid disk");
    let surface = WeightedSurface::new(
        t,
        Background::Euclidean,
        &[
            ((0, 1), 1.0),
            ((0, 2), 1.0),
            ((1, 2), 1.0),
            ((0, 3), 1.0),
            ((1, 3), 4.0),
            ((2, 3), 3.0),
        ],
    )
    .expect("valid weights");
    ComparisonInstance {
        surface,
        reference: RadiusVector::new(vec![100.0, 100.0, 100.0, 155.0]).unwrap(),
        candidate: RadiusVector::new(vec![110.0, 240.0, 220.0, 150.0]).unwrap(),
        partition: PartitionAB::from_a(VertexSubset::new([3]), 4).unwrap(),
    }
}

/// The counterexample carried to a closed surface: two copies of the
/// disk glued along the shared boundary, metrics copied onto the
/// mirror, A holding both copies of the interior vertex.
pub fn doubled_counterexample() -> ComparisonInstance {
    let disk = build_counterexample();
    let doubling = double(&disk.surface).expect("disk has boundary");
    let mirror = &doubling.into_double[1];
    let n = disk.surface.vertex_count();
    let doubled_n = doubling.surface.vertex_count();

    let extend = |metric: &RadiusVector| {
        let mut values = vec![0.0; doubled_n];
        for v in 0..n {
            values[v] = metric.get(v);
            values[mirror[v]] = metric.get(v);
        }
        RadiusVector::new(values).unwrap()
    };
    let reference = extend(&disk.reference);
    let candidate = extend(&disk.candidate);

    let interior: Vec<usize> = (0..n)
        .filter(|v| !disk.surface.triangulation().boundary_vertices().contains(v))
        .flat_map(|v| [v, mirror[v]])
        .collect();
    let partition = PartitionAB::from_a(VertexSubset::new(interior), doubled_n).unwrap();

    ComparisonInstance {
        surface: doubling.surface,
        reference,
        candidate,
        partition,
    }
}

/// Builds a comparison pair from a reference metric by solving for the
/// candidate: fixed radii r|_B + radius_bumps, target curvature
/// K_r|_A + curvature_bumps. In the concave regime the result is
/// guaranteed to dominate the reference componentwise.
pub fn generate_comparison_pair(
    surface: &WeightedSurface,
    partition: &PartitionAB,
    reference: &RadiusVector,
    radius_bumps: &BTreeMap<usize, f64>,
    curvature_bumps: &BTreeMap<usize, f64>,
    options: &SolveOptions,
) -> Result<RadiusVector> {
    for (&v, &bump) in radius_bumps.iter().chain(curvature_bumps.iter()) {
        if bump.is_nan() || bump < 0.0 {
            return Err(Error::Parse(format!("bump at vertex {} is negative: {}", v, bump)));
        }
    }
    for v in radius_bumps.keys() {
        if !partition.b().contains(*v) {
            return Err(Error::BadPartition(format!("radius bump at vertex {} outside B", v)));
        }
    }
    for v in curvature_bumps.keys() {
        if !partition.a().contains(*v) {
            return Err(Error::BadPartition(format!(
                "curvature bump at vertex {} outside A",
                v
            )));
        }
    }

    let report = metric_report(surface, reference);
    let curvature = report.curvatures().ok_or_else(|| Error::NotAPackingMetric {
        metric: "r".into(),
        face: report.first_invalid_face().unwrap(),
    })?;

    let fixed: BTreeMap<usize, f64> = partition
        .b()
        .iter()
        .map(|v| (v, reference.get(v) + radius_bumps.get(&v).copied().unwrap_or(0.0)))
        .collect();
    let target: BTreeMap<usize, f64> = partition
        .a()
        .iter()
        .map(|v| (v, curvature[v] + curvature_bumps.get(&v).copied().unwrap_or(0.0)))
        .collect();

    Ok(solve_prescribed_curvature(surface, &fixed, &target, options)?.radii)
}
