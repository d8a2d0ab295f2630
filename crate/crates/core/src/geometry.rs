//! Induced edge lengths, triangle validity, inner angles, discrete
//! curvature, and the degeneration-limit bound.
//!
//! Face-local quantities follow the opposite-edge convention: for a
//! face `[i, j, k]` (sorted), slot `m` of a length/weight triple refers
//! to the edge opposite `face[m]`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::complex::{opposite_edges, Edge, Face, VertexSubset, WeightedSurface};
use crate::error::{Error, Result};

/// Background geometry the face triangles are realized in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Background {
    Euclidean,
    Hyperbolic,
}

/// One positive radius per vertex: a candidate circle-packing metric.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusVector {
    values: Vec<f64>,
}

impl RadiusVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (v, &r) in values.iter().enumerate() {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::NonPositiveRadius { vertex: v, value: r });
            }
        }
        Ok(RadiusVector { values })
    }

    pub fn uniform(n: usize, r: f64) -> Self {
        Self::new(vec![r; n]).expect("positive radius")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.values[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Radii at the three vertices of a face, in face order.
    pub fn at_face(&self, face: Face) -> [f64; 3] {
        [self.values[face[0]], self.values[face[1]], self.values[face[2]]]
    }
}

/// Length of the edge between circles of radii `r_i`, `r_j` at
/// inversive distance `inversive`.
///
/// Euclidean: sqrt(r_i^2 + r_j^2 + 2 r_i r_j I).
/// Hyperbolic: arcosh(cosh r_i cosh r_j + I sinh r_i sinh r_j).
/// Both are finite and positive whenever the radii are positive and
/// I > -1.
pub fn edge_length(background: Background, r_i: f64, r_j: f64, inversive: f64) -> f64 {
    debug_assert!(r_i > 0.0 && r_j > 0.0 && inversive > -1.0);
    // Products are grouped so the result is bitwise symmetric in
    // (r_i, r_j).
    let l = match background {
        Background::Euclidean => {
            (r_i * r_i + r_j * r_j + 2.0 * (r_i * r_j) * inversive).sqrt()
        }
        Background::Hyperbolic => {
            let arg = r_i.cosh() * r_j.cosh() + inversive * (r_i.sinh() * r_j.sinh());
            // arg >= cosh(r_i - r_j) >= 1; guard the rounding at I -> -1.
            arg.max(1.0).acosh()
        }
    };
    assert!(l.is_finite() && l > 0.0, "induced length out of range");
    l
}

/// Induced lengths of a face's three edges, opposite-indexed.
pub fn face_lengths(surface: &WeightedSurface, face: Face, radii: [f64; 3]) -> [f64; 3] {
    let inv = surface.face_inversive(face);
    let bg = surface.background();
    [
        edge_length(bg, radii[1], radii[2], inv[0]),
        edge_length(bg, radii[0], radii[2], inv[1]),
        edge_length(bg, radii[0], radii[1], inv[2]),
    ]
}

/// Per-face weight triple gamma^a = I_a + I_b I_c, opposite-indexed:
/// `values[m]` belongs to `face[m]` and uses the inversive distance of
/// the edge opposite it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaWeights {
    pub face: Face,
    pub values: [f64; 3],
}

impl GammaWeights {
    pub fn min(&self) -> f64 {
        self.values[0].min(self.values[1]).min(self.values[2])
    }
}

pub fn gamma_weights(surface: &WeightedSurface, face: Face) -> GammaWeights {
    let [i_i, i_j, i_k] = surface.face_inversive(face);
    GammaWeights {
        face,
        values: [i_i + i_j * i_k, i_j + i_i * i_k, i_k + i_i * i_j],
    }
}

/// Triangle inequality via the quartic product
/// (l1+l2+l3)(l1+l2-l3)(l1+l3-l2)(l2+l3-l1) > 0.
pub fn triangle_valid_direct(lengths: [f64; 3]) -> bool {
    let [a, b, c] = lengths;
    debug_assert!(a > 0.0 && b > 0.0 && c > 0.0);
    (a + b + c) * (a + b - c) * (a + c - b) * (b + c - a) > 0.0
}

/// Triangle inequality straight from radii and weights, without
/// forming the lengths: the polynomial criteria of the two cosine
/// laws. Agrees with [`triangle_valid_direct`] on the induced lengths.
pub fn triangle_valid_polynomial(surface: &WeightedSurface, face: Face, radii: [f64; 3]) -> bool {
    let [i_i, i_j, i_k] = surface.face_inversive(face);
    let g = gamma_weights(surface, face).values;
    match surface.background() {
        Background::Euclidean => {
            let [ri, rj, rk] = radii;
            let q = ri * ri * rj * rj * (1.0 - i_k * i_k)
                + ri * ri * rk * rk * (1.0 - i_j * i_j)
                + rj * rj * rk * rk * (1.0 - i_i * i_i)
                + 2.0 * ri * rj * rk * (ri * g[0] + rj * g[1] + rk * g[2]);
            q > 0.0
        }
        Background::Hyperbolic => {
            let [si, sj, sk] = [radii[0].sinh(), radii[1].sinh(), radii[2].sinh()];
            let [ci, cj, ck] = [radii[0].cosh(), radii[1].cosh(), radii[2].cosh()];
            let q = 2.0 * si * si * sj * sj * sk * sk * (1.0 + i_i * i_j * i_k)
                + si * si * sj * sj * (1.0 - i_k * i_k)
                + si * si * sk * sk * (1.0 - i_j * i_j)
                + sj * sj * sk * sk * (1.0 - i_i * i_i)
                + 2.0 * si * sj * sk * (si * cj * ck * g[0] + ci * sj * ck * g[1] + ci * cj * sk * g[2]);
            q > 0.0
        }
    }
}

/// Inner angles of a triangle with the given side lengths,
/// opposite-indexed (`angles[m]` sits across `lengths[m]`). Euclidean
/// angles sum to pi, hyperbolic to strictly less.
pub fn inner_angles(background: Background, lengths: [f64; 3]) -> Result<[f64; 3]> {
    if !triangle_valid_direct(lengths) {
        return Err(Error::DegenerateTriangle { lengths });
    }
    let angle = |m: usize| {
        let (a, b, c) = (lengths[m], lengths[(m + 1) % 3], lengths[(m + 2) % 3]);
        let cos = match background {
            Background::Euclidean => (b * b + c * c - a * a) / (2.0 * b * c),
            Background::Hyperbolic => (b.cosh() * c.cosh() - a.cosh()) / (b.sinh() * c.sinh()),
        };
        cos.clamp(-1.0, 1.0).acos()
    };
    Ok([angle(0), angle(1), angle(2)])
}

/// Everything a radius vector induces on a weighted surface: edge
/// lengths, per-face validity and angles, and the per-vertex angle
/// deficit K(v) = 2 pi - sum of angles at v.
///
/// Invalid faces are data, not errors: their angles are absent and the
/// curvature of every vertex touching one is `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub background: Background,
    pub edge_lengths: BTreeMap<Edge, f64>,
    /// Keyed by (face, vertex), vertex being a member of the face.
    pub face_angles: BTreeMap<(Face, usize), f64>,
    pub face_valid: BTreeMap<Face, bool>,
    pub curvature: Vec<Option<f64>>,
    pub is_packing_metric: bool,
}

impl MetricReport {
    /// All curvatures, available only for a packing metric.
    pub fn curvatures(&self) -> Option<Vec<f64>> {
        self.curvature.iter().copied().collect()
    }

    pub fn first_invalid_face(&self) -> Option<Face> {
        self.face_valid
            .iter()
            .find(|(_, &ok)| !ok)
            .map(|(f, _)| *f)
    }
}

pub fn metric_report(surface: &WeightedSurface, r: &RadiusVector) -> MetricReport {
    let t = surface.triangulation();
    assert_eq!(r.len(), t.vertex_count(), "radius count must match vertex count");

    let mut edge_lengths = BTreeMap::new();
    for (ei, e) in t.edges().iter().enumerate() {
        let l = edge_length(
            surface.background(),
            r.get(e.0),
            r.get(e.1),
            surface.inversive_by_index(ei),
        );
        edge_lengths.insert(*e, l);
    }

    let mut face_angles = BTreeMap::new();
    let mut face_valid = BTreeMap::new();
    let mut angle_sum = vec![0.0f64; t.vertex_count()];
    let mut vertex_ok = vec![true; t.vertex_count()];
    for f in t.faces() {
        let lengths: [f64; 3] = {
            let e = opposite_edges(*f);
            [edge_lengths[&e[0]], edge_lengths[&e[1]], edge_lengths[&e[2]]]
        };
        match inner_angles(surface.background(), lengths) {
            Ok(angles) => {
                face_valid.insert(*f, true);
                for (m, &v) in f.iter().enumerate() {
                    face_angles.insert((*f, v), angles[m]);
                    angle_sum[v] += angles[m];
                }
            }
            Err(_) => {
                face_valid.insert(*f, false);
                for &v in f {
                    vertex_ok[v] = false;
                }
            }
        }
    }

    let curvature = (0..t.vertex_count())
        .map(|v| vertex_ok[v].then(|| 2.0 * PI - angle_sum[v]))
        .collect();
    let is_packing_metric = face_valid.values().all(|&ok| ok);

    MetricReport {
        background: surface.background(),
        edge_lengths,
        face_angles,
        face_valid,
        curvature,
        is_packing_metric,
    }
}

/// The value sum_J K approaches as the radii on J shrink to zero:
/// 2 pi chi(F_J) - sum over link pairs of (pi - Phi), with Phi the
/// intersection angle of the edge opposite the link vertex. Needs
/// every inversive distance in (-1, 1] so that Phi = arccos(I) exists.
pub fn degeneration_limit(surface: &WeightedSurface, subset: &VertexSubset) -> Result<f64> {
    let t = surface.triangulation();
    for (ei, e) in t.edges().iter().enumerate() {
        let i = surface.inversive_by_index(ei);
        if i > 1.0 {
            return Err(Error::InversiveOutOfRange {
                edge: e.as_pair(),
                value: i,
                range: "(-1, 1]",
            });
        }
    }
    let chi = t.euler_characteristic_of_subcomplex(subset) as f64;
    let mut link_sum = 0.0;
    for (face, v) in t.link(subset) {
        let m = face.iter().position(|&w| w == v).unwrap();
        let opposite = opposite_edges(face)[m];
        let phi = surface.inversive(opposite).clamp(-1.0, 1.0).acos();
        link_sum += PI - phi;
    }
    Ok(2.0 * PI * chi - link_sum)
}

/// Outcome of testing sum_J K(r) against the degeneration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks the strict lower bound sum_J K_r > degeneration limit, valid
/// for packing metrics when I is in (-1, 1] and every gamma weight is
/// nonnegative. An empty J reports (0, 0) and holds by convention.
pub fn curvature_lower_bound_check(
    surface: &WeightedSurface,
    r: &RadiusVector,
    subset: &VertexSubset,
) -> Result<CurvatureBound> {
    for f in surface.triangulation().faces() {
        let g = gamma_weights(surface, *f);
        if g.min() < 0.0 {
            return Err(Error::NotConcaveRegion {
                detail: format!("face {:?} has a negative gamma weight {}", f, g.min()),
            });
        }
    }
    if subset.is_empty() {
        return Ok(CurvatureBound {
            lhs: 0.0,
            rhs: 0.0,
            holds: true,
        });
    }
    let rhs = degeneration_limit(surface, subset)?;
    let report = metric_report(surface, r);
    if let Some(face) = report.first_invalid_face() {
        return Err(Error::NotAPackingMetric {
            metric: "r".into(),
            face,
        });
    }
    let curvatures = report.curvatures().expect("packing metric has curvatures");
    let lhs: f64 = subset.iter().map(|v| curvatures[v]).sum();
    Ok(CurvatureBound {
        lhs,
        rhs,
        holds: lhs > rhs,
    })
}
