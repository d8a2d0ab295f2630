//! JSON file formats: surfaces, radius vectors, solver inputs, and the
//! wire shapes of reports and verdicts. All vertex indices in files
//! are 0-based.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

use crate::complex::{Triangulation, WeightedSurface};
use crate::comparison::ComparisonVerdict;
use crate::error::{Error, Result};
use crate::geometry::{Background, MetricReport, RadiusVector};

/// On-disk surface description:
/// `{"background": "euclidean"|"hyperbolic", "faces": [[i,j,k],...],
///   "inversive": [[i,j,value],...]}`.
/// Every edge of the triangulation must receive exactly one inversive
/// value; there is no default.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub background: Background,
    pub faces: Vec<[usize; 3]>,
    pub inversive: Vec<(usize, usize, f64)>,
}

impl SurfaceFile {
    pub fn from_surface(surface: &WeightedSurface) -> Self {
        let t = surface.triangulation();
        SurfaceFile {
            background: surface.background(),
            faces: t.faces().to_vec(),
            inversive: t
                .edges()
                .iter()
                .enumerate()
                .map(|(ei, e)| (e.0, e.1, surface.inversive_by_index(ei)))
                .collect(),
        }
    }

    pub fn into_surface(self) -> Result<WeightedSurface> {
        let t = Triangulation::build(&self.faces)?;
        let weights: Vec<((usize, usize), f64)> = self
            .inversive
            .iter()
            .map(|&(a, b, v)| ((a, b), v))
            .collect();
        WeightedSurface::new(t, self.background, &weights)
    }
}

/// `{"radii": [r_0, ..., r_{N-1}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusFile {
    pub radii: Vec<f64>,
}

impl RadiusFile {
    pub fn from_radii(r: &RadiusVector) -> Self {
        RadiusFile {
            radii: r.values().to_vec(),
        }
    }

    pub fn into_radii(self, vertex_count: usize) -> Result<RadiusVector> {
        if self.radii.len() != vertex_count {
            return Err(Error::RadiusCountMismatch {
                expected: vertex_count,
                got: self.radii.len(),
            });
        }
        RadiusVector::new(self.radii)
    }
}

/// Solver input, B side: `{"fixed": [[vertex, radius], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FixedRadiiFile {
    pub fixed: Vec<(usize, f64)>,
}

/// Solver input, A side: `{"target": [[vertex, curvature], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetCurvatureFile {
    pub target: Vec<(usize, f64)>,
}

pub fn pairs_to_map(pairs: &[(usize, f64)], what: &str) -> Result<BTreeMap<usize, f64>> {
    let mut map = BTreeMap::new();
    for &(v, x) in pairs {
        if map.insert(v, x).is_some() {
            return Err(Error::Parse(format!("duplicate {} entry for vertex {}", what, v)));
        }
    }
    Ok(map)
}

/// Metric report as JSON: edge lengths keyed `"i-j"` (i < j), angles
/// keyed `"i-j-k@v"`, curvature as an array with `null` where a vertex
/// touches an invalid face.
pub fn report_to_json(report: &MetricReport) -> Value {
    let mut edge_lengths = Map::new();
    for (e, l) in &report.edge_lengths {
        edge_lengths.insert(format!("{}-{}", e.0, e.1), json!(l));
    }
    let mut face_angles = Map::new();
    for ((f, v), theta) in &report.face_angles {
        face_angles.insert(format!("{}-{}-{}@{}", f[0], f[1], f[2], v), json!(theta));
    }
    let mut face_valid = Map::new();
    for (f, ok) in &report.face_valid {
        face_valid.insert(format!("{}-{}-{}", f[0], f[1], f[2]), json!(ok));
    }
    json!({
        "background": report.background,
        "edge_lengths": edge_lengths,
        "face_angles": face_angles,
        "face_valid": face_valid,
        "curvature": report.curvature,
        "is_packing_metric": report.is_packing_metric,
    })
}

/// Verdict as JSON:
/// `{"hyp_radii": bool, "hyp_curv": bool, "conclusion": bool,
///   "violations": [{"vertex": i, "r": x, "R": y}]}`.
pub fn verdict_to_json(
    verdict: &ComparisonVerdict,
    reference: &RadiusVector,
    candidate: &RadiusVector,
) -> Value {
    let violations: Vec<Value> = verdict
        .violating_vertices
        .iter()
        .map(|&v| {
            json!({
                "vertex": v,
                "r": reference.get(v),
                "R": candidate.get(v),
            })
        })
        .collect();
    json!({
        "hyp_radii": verdict.hyp_radii_ok,
        "hyp_curv": verdict.hyp_curv_ok,
        "conclusion": verdict.conclusion_ok,
        "violations": violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::{build_counterexample, check_comparison, VerdictTolerance};
    use crate::geometry::metric_report;

    #[test]
    fn surface_file_round_trip() {
        let instance = build_counterexample();
        let file = SurfaceFile::from_surface(&instance.surface);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: SurfaceFile = serde_json::from_str(&text).unwrap();
        let restored = parsed.into_surface().unwrap();
        assert_eq!(restored, instance.surface);
    }

    #[test]
    fn surface_file_rejects_missing_inversive() {
        let text = r#"{"background": "euclidean", "faces": [[0,1,2]],
                       "inversive": [[0,1,1.0], [0,2,1.0]]}"#;
        let parsed: SurfaceFile = serde_json::from_str(text).unwrap();
        assert_eq!(
            parsed.into_surface().unwrap_err(),
            Error::MissingInversive { edge: (1, 2) }
        );
    }

    #[test]
    fn radius_file_checks_count_and_sign() {
        let file = RadiusFile { radii: vec![1.0, 2.0] };
        assert!(matches!(
            file.clone().into_radii(3),
            Err(Error::RadiusCountMismatch { expected: 3, got: 2 })
        ));
        assert!(file.into_radii(2).is_ok());
        assert!(RadiusFile { radii: vec![1.0, -2.0] }.into_radii(2).is_err());
    }

    #[test]
    fn report_and_verdict_wire_shapes() {
        let instance = build_counterexample();
        let report = metric_report(&instance.surface, &instance.reference);
        let value = report_to_json(&report);
        assert_eq!(value["edge_lengths"]["0-1"], json!(200.0));
        assert_eq!(value["face_valid"]["0-1-3"], json!(true));
        assert_eq!(value["is_packing_metric"], json!(true));
        assert!(value["face_angles"]["0-1-3@0"].is_number());
        assert_eq!(value["curvature"].as_array().unwrap().len(), 4);

        let verdict = check_comparison(
            &instance.surface,
            &instance.partition,
            &instance.reference,
            &instance.candidate,
            VerdictTolerance::EXACT,
        )
        .unwrap();
        let value = verdict_to_json(&verdict, &instance.reference, &instance.candidate);
        assert_eq!(value["hyp_radii"], json!(true));
        assert_eq!(value["hyp_curv"], json!(true));
        assert_eq!(value["conclusion"], json!(false));
        assert_eq!(
            value["violations"],
            json!([{"vertex": 3, "r": 155.0, "R": 150.0}])
        );
    }
}
