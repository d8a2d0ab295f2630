//! Simplicial data model for triangulated surfaces: building a
//! triangulation from a face list, subcomplex combinatorics, and the
//! doubling construction.
//!
//! Vertices are 0-based `usize` indices throughout (file formats
//! included); the literature this follows numbers them from 1.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::geometry::Background;

/// Unordered pair of distinct vertex indices, stored smaller-first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    /// Normalizes the pair; panics if `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an edge needs two distinct vertices");
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    pub fn as_pair(&self) -> (usize, usize) {
        (self.0, self.1)
    }
}

/// Unordered vertex triple of a face, kept sorted ascending.
pub type Face = [usize; 3];

/// Sorts a raw triple into the canonical face representation.
pub fn normalize_face(f: [usize; 3]) -> Face {
    let mut f = f;
    f.sort_unstable();
    f
}

/// The three edges of a face, each opposite the face vertex with the
/// same position: `edges[m]` does not contain `face[m]`.
pub fn opposite_edges(face: Face) -> [Edge; 3] {
    [
        Edge::new(face[1], face[2]),
        Edge::new(face[0], face[2]),
        Edge::new(face[0], face[1]),
    ]
}

/// A subset J of the vertex set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VertexSubset {
    members: BTreeSet<usize>,
}

impl VertexSubset {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Self {
        VertexSubset {
            members: members.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }
}

/// A finite simplicial triangulation of a surface, with edges derived
/// from the face list and boundary classified.
///
/// Build-time checks: faces are simplicial and unique, every edge lies
/// in one or two faces, the faces around each vertex form a single fan
/// (disk or half-disk), and the 1-skeleton is connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    vertex_count: usize,
    faces: Vec<Face>,
    edges: Vec<Edge>,
    edge_index: BTreeMap<Edge, usize>,
    /// Face indices incident to each edge (1 or 2 entries).
    edge_faces: Vec<Vec<usize>>,
    /// Face indices incident to each vertex.
    vertex_faces: Vec<Vec<usize>>,
    boundary_edges: BTreeSet<Edge>,
    boundary_vertices: BTreeSet<usize>,
}

/// Builds a [`Triangulation`] from a list of vertex triples. The vertex
/// count is one past the largest index that appears.
pub fn build_triangulation(face_list: &[[usize; 3]]) -> Result<Triangulation> {
    Triangulation::build(face_list)
}

impl Triangulation {
    pub fn build(face_list: &[[usize; 3]]) -> Result<Self> {
        if face_list.is_empty() {
            return Err(Error::Parse("face list is empty".into()));
        }

        let mut faces = Vec::with_capacity(face_list.len());
        let mut seen = BTreeSet::new();
        for raw in face_list {
            let f = normalize_face(*raw);
            if f[0] == f[1] || f[1] == f[2] {
                return Err(Error::NonSimplicial { face: *raw });
            }
            if !seen.insert(f) {
                return Err(Error::DuplicateFace { face: f });
            }
            faces.push(f);
        }
        let vertex_count = faces.iter().flatten().max().copied().unwrap() + 1;

        let mut edge_index: BTreeMap<Edge, usize> = BTreeMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        for (fi, f) in faces.iter().enumerate() {
            for e in opposite_edges(*f) {
                let ei = *edge_index.entry(e).or_insert_with(|| {
                    edges.push(e);
                    edge_faces.push(Vec::new());
                    edges.len() - 1
                });
                edge_faces[ei].push(fi);
                if edge_faces[ei].len() > 2 {
                    return Err(Error::EdgeInTooManyFaces { edge: e.as_pair() });
                }
            }
        }

        let mut vertex_faces = vec![Vec::new(); vertex_count];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                vertex_faces[v].push(fi);
            }
        }

        let mut boundary_edges = BTreeSet::new();
        let mut boundary_vertices = BTreeSet::new();
        for (ei, e) in edges.iter().enumerate() {
            if edge_faces[ei].len() == 1 {
                boundary_edges.insert(*e);
                boundary_vertices.insert(e.0);
                boundary_vertices.insert(e.1);
            }
        }

        let t = Triangulation {
            vertex_count,
            faces,
            edges,
            edge_index,
            edge_faces,
            vertex_faces,
            boundary_edges,
            boundary_vertices,
        };
        t.check_vertex_fans()?;
        t.check_connected()?;
        Ok(t)
    }

    /// Each vertex's incident faces must form one fan: the link graph
    /// (neighbors joined by the opposite edges of incident faces) is
    /// connected. Degrees are already capped at 2 by the edge check, so
    /// a connected link is a single path or cycle.
    fn check_vertex_fans(&self) -> Result<()> {
        for v in 0..self.vertex_count {
            let incident = &self.vertex_faces[v];
            if incident.is_empty() {
                continue; // caught as disconnected below
            }
            let mut adjacency: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for &fi in incident {
                let others: Vec<usize> = self.faces[fi].iter().copied().filter(|&w| w != v).collect();
                adjacency.entry(others[0]).or_default().push(others[1]);
                adjacency.entry(others[1]).or_default().push(others[0]);
            }
            let start = *adjacency.keys().next().unwrap();
            let mut visited = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            visited.insert(start);
            while let Some(w) = queue.pop_front() {
                for &next in &adjacency[&w] {
                    if visited.insert(next) {
                        queue.push_back(next);
                    }
                }
            }
            if visited.len() != adjacency.len() {
                return Err(Error::NonManifoldVertex { vertex: v });
            }
        }
        Ok(())
    }

    fn check_connected(&self) -> Result<()> {
        let mut visited = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        visited[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &fi in &self.vertex_faces[v] {
                for &w in &self.faces[fi] {
                    if !visited[w] {
                        visited[w] = true;
                        reached += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        if reached != self.vertex_count {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edge_index.get(&e).copied()
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edge_index.contains_key(&e)
    }

    /// Face indices containing the given edge (one or two).
    pub fn faces_at_edge(&self, e: Edge) -> &[usize] {
        &self.edge_faces[self.edge_index[&e]]
    }

    /// Face indices containing the given vertex.
    pub fn faces_at_vertex(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn boundary_edges(&self) -> &BTreeSet<Edge> {
        &self.boundary_edges
    }

    pub fn boundary_vertices(&self) -> &BTreeSet<usize> {
        &self.boundary_vertices
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_edges.is_empty()
    }

    /// Euler characteristic V - E + F of the whole complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    fn assert_subset_in_range(&self, subset: &VertexSubset) {
        for v in subset.iter() {
            assert!(
                v < self.vertex_count,
                "vertex {} out of range for {} vertices",
                v,
                self.vertex_count
            );
        }
    }

    /// Euler characteristic of the full subcomplex F_J spanned by J:
    /// vertices in J, edges with both endpoints in J, faces with all
    /// three vertices in J.
    pub fn euler_characteristic_of_subcomplex(&self, subset: &VertexSubset) -> i64 {
        self.assert_subset_in_range(subset);
        let v = subset.len() as i64;
        let e = self
            .edges
            .iter()
            .filter(|e| subset.contains(e.0) && subset.contains(e.1))
            .count() as i64;
        let f = self
            .faces
            .iter()
            .filter(|f| f.iter().all(|&w| subset.contains(w)))
            .count() as i64;
        v - e + f
    }

    /// All pairs (face, v) with v in J and the face meeting J exactly
    /// in {v}.
    pub fn link(&self, subset: &VertexSubset) -> Vec<(Face, usize)> {
        self.assert_subset_in_range(subset);
        let mut pairs = Vec::new();
        for f in &self.faces {
            let in_j: Vec<usize> = f.iter().copied().filter(|&w| subset.contains(w)).collect();
            if let [v] = in_j[..] {
                pairs.push((*f, v));
            }
        }
        pairs
    }
}

/// A triangulation with a background geometry and one inversive
/// distance per edge, each in (-1, inf).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSurface {
    triangulation: Triangulation,
    background: Background,
    /// Aligned with `triangulation.edges()`.
    inversive: Vec<f64>,
}

impl WeightedSurface {
    /// `weights` must cover every edge of the triangulation exactly
    /// once, with every value strictly above -1.
    pub fn new(
        triangulation: Triangulation,
        background: Background,
        weights: &[((usize, usize), f64)],
    ) -> Result<Self> {
        let mut inversive = vec![None; triangulation.edges().len()];
        for &((a, b), value) in weights {
            if a == b || a >= triangulation.vertex_count() || b >= triangulation.vertex_count() {
                return Err(Error::UnknownEdge { edge: (a, b) });
            }
            let e = Edge::new(a, b);
            let ei = triangulation
                .edge_index(e)
                .ok_or(Error::UnknownEdge { edge: e.as_pair() })?;
            if value.is_nan() || value <= -1.0 {
                return Err(Error::InversiveOutOfRange {
                    edge: e.as_pair(),
                    value,
                    range: "(-1, inf)",
                });
            }
            if inversive[ei].replace(value).is_some() {
                return Err(Error::DuplicateInversive { edge: e.as_pair() });
            }
        }
        if let Some(ei) = inversive.iter().position(Option::is_none) {
            return Err(Error::MissingInversive {
                edge: triangulation.edges()[ei].as_pair(),
            });
        }
        Ok(WeightedSurface {
            inversive: inversive.into_iter().map(Option::unwrap).collect(),
            triangulation,
            background,
        })
    }

    /// Constant inversive distance on every edge.
    pub fn with_uniform_inversive(
        triangulation: Triangulation,
        background: Background,
        value: f64,
    ) -> Result<Self> {
        let weights: Vec<((usize, usize), f64)> = triangulation
            .edges()
            .iter()
            .map(|e| (e.as_pair(), value))
            .collect();
        Self::new(triangulation, background, &weights)
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn vertex_count(&self) -> usize {
        self.triangulation.vertex_count()
    }

    /// Inversive distance on an existing edge; panics on a non-edge.
    pub fn inversive(&self, e: Edge) -> f64 {
        self.inversive[self.triangulation.edge_index(e).expect("edge of the surface")]
    }

    pub fn inversive_by_index(&self, edge_index: usize) -> f64 {
        self.inversive[edge_index]
    }

    /// Inversive distances on the three edges opposite the face's
    /// vertices: `result[m]` belongs to the edge not containing `face[m]`.
    pub fn face_inversive(&self, face: Face) -> [f64; 3] {
        let e = opposite_edges(face);
        [self.inversive(e[0]), self.inversive(e[1]), self.inversive(e[2])]
    }

    /// True when every inversive distance lies in (-1, 1], the regime
    /// where intersection angles exist.
    pub fn all_intersecting(&self) -> bool {
        self.inversive.iter().all(|&i| i <= 1.0)
    }
}

/// Result of doubling a disk: the closed surface together with the two
/// vertex maps from the original disk into it. `into_double[0]` is the
/// identity copy, `into_double[1]` maps interior vertices to their
/// mirror images and boundary vertices to themselves.
#[derive(Debug, Clone)]
pub struct Doubling {
    pub surface: WeightedSurface,
    pub into_double: [Vec<usize>; 2],
}

/// Glues two copies of a disk along their shared boundary. Inversive
/// distances are copied edge-for-edge onto the mirror copy.
pub fn double(disk: &WeightedSurface) -> Result<Doubling> {
    let t = disk.triangulation();
    if t.is_closed() {
        return Err(Error::AlreadyClosed);
    }
    let n = t.vertex_count();
    let mut mirror = vec![0usize; n];
    let mut next = n;
    for (v, image) in mirror.iter_mut().enumerate() {
        if t.boundary_vertices().contains(&v) {
            *image = v;
        } else {
            *image = next;
            next += 1;
        }
    }

    let mut faces: Vec<[usize; 3]> = t.faces().to_vec();
    for f in t.faces() {
        faces.push([mirror[f[0]], mirror[f[1]], mirror[f[2]]]);
    }
    let doubled = Triangulation::build(&faces)?;

    let mut weights: BTreeMap<Edge, f64> = BTreeMap::new();
    for (ei, e) in t.edges().iter().enumerate() {
        let value = disk.inversive_by_index(ei);
        weights.insert(*e, value);
        weights.insert(Edge::new(mirror[e.0], mirror[e.1]), value);
    }
    let weights: Vec<((usize, usize), f64)> =
        weights.into_iter().map(|(e, v)| (e.as_pair(), v)).collect();
    let surface = WeightedSurface::new(doubled, disk.background(), &weights)?;

    Ok(Doubling {
        surface,
        into_double: [(0..n).collect(), mirror],
    })
}
