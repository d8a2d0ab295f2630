//! The variational side: u-coordinates, angle Jacobians, the packing
//! energy W (a line integral of the closed 1-form sum theta_a du_a),
//! and the Newton solver for the prescribed-curvature problem.
//!
//! Everything here assumes faces stay valid along the way, which is
//! automatic in the concave regime (inversive distances in (-1, 1],
//! nonnegative gamma weights); outside it, operations report
//! `DegenerateTriangle` where the metric breaks down.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{Cholesky, DMatrix, DVector, Matrix3};

use crate::complex::{Face, VertexSubset, WeightedSurface};
use crate::error::{Error, Result};
use crate::geometry::{
    degeneration_limit, face_lengths, gamma_weights, inner_angles, metric_report, Background,
    RadiusVector,
};

/// Absolute tolerance for each quadrature segment.
const QUADRATURE_TOL: f64 = 1e-12;
/// Pre-splitting threshold: panels are sized so the inner angles vary
/// by at most this much across each one.
const ANGLE_VARIATION_PER_PANEL: f64 = 0.1;
const MAX_SPLIT_DEPTH: usize = 32;

fn radius_to_u(background: Background, r: f64) -> f64 {
    match background {
        Background::Euclidean => r.ln(),
        Background::Hyperbolic => (0.5 * r).tanh().ln(),
    }
}

fn u_to_radius(background: Background, u: f64) -> f64 {
    match background {
        Background::Euclidean => u.exp(),
        Background::Hyperbolic => 2.0 * u.exp().atanh(),
    }
}

/// dr/du, the factor the chain rule picks up at each vertex.
fn dradius_du(background: Background, r: f64) -> f64 {
    match background {
        Background::Euclidean => r,
        Background::Hyperbolic => r.sinh(),
    }
}

/// Logarithmic coordinates for radii: u = ln r (Euclidean) or
/// u = ln tanh(r/2) (hyperbolic, hence strictly negative).
#[derive(Debug, Clone, PartialEq)]
pub struct UCoordinates {
    background: Background,
    values: Vec<f64>,
}

impl UCoordinates {
    pub fn new(background: Background, values: Vec<f64>) -> Result<Self> {
        if background == Background::Hyperbolic {
            for (v, &u) in values.iter().enumerate() {
                if u.is_nan() || u >= 0.0 {
                    return Err(Error::DomainError { vertex: v, value: u });
                }
            }
        }
        Ok(UCoordinates { background, values })
    }

    pub fn background(&self) -> Background {
        self.background
    }

    pub fn values(&self) -> &[f64] {
        &self.values
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

    pub fn at_face(&self, face: Face) -> [f64; 3] {
        [self.values[face[0]], self.values[face[1]], self.values[face[2]]]
    }
}

/// Coordinate change r -> u, a bijection onto R^N (Euclidean) or
/// (-inf, 0)^N (hyperbolic).
pub fn to_u(background: Background, r: &RadiusVector) -> UCoordinates {
    UCoordinates {
        background,
        values: r.values().iter().map(|&r| radius_to_u(background, r)).collect(),
    }
}

/// Inverse coordinate change u -> r; total on the validated domain.
pub fn from_u(u: &UCoordinates) -> RadiusVector {
    let bg = u.background;
    RadiusVector::new(u.values.iter().map(|&x| u_to_radius(bg, x)).collect())
        .expect("u-coordinates map to positive radii")
}

/// Raw-slice variant of [`from_u`]; rejects hyperbolic entries outside
/// u < 0.
pub fn from_u_values(background: Background, values: &[f64]) -> Result<RadiusVector> {
    Ok(from_u(&UCoordinates::new(background, values.to_vec())?))
}

/// Per-face matrix of angle derivatives in u-coordinates:
/// `matrix[a][b]` = d theta_(face[a]) / d u_(face[b]).
///
/// In the concave regime it is symmetric and negative semidefinite,
/// with positive off-diagonal and negative diagonal entries; the
/// Euclidean version annihilates (1, 1, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleJacobian {
    pub face: Face,
    pub matrix: [[f64; 3]; 3],
}

impl AngleJacobian {
    pub fn symmetry_defect(&self) -> f64 {
        let m = &self.matrix;
        [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(a, b)| (m[a][b] - m[b][a]).abs())
            .fold(0.0, f64::max)
    }

    pub fn row_sums(&self) -> [f64; 3] {
        let m = &self.matrix;
        [
            m[0][0] + m[0][1] + m[0][2],
            m[1][0] + m[1][1] + m[1][2],
            m[2][0] + m[2][1] + m[2][2],
        ]
    }

    /// Largest eigenvalue of the symmetrized matrix; at most zero (up
    /// to rounding) in the concave regime.
    pub fn max_eigenvalue(&self) -> f64 {
        let m = &self.matrix;
        let sym = Matrix3::from_fn(|a, b| 0.5 * (m[a][b] + m[b][a]));
        sym.symmetric_eigenvalues().max()
    }
}

/// Analytic angle Jacobian of one face, by the chain rule through the
/// cosine law (angles <- lengths <- radii <- u).
pub fn angle_jacobian(
    surface: &WeightedSurface,
    face: Face,
    u_face: [f64; 3],
) -> Result<AngleJacobian> {
    let bg = surface.background();
    let radii = [
        u_to_radius(bg, u_face[0]),
        u_to_radius(bg, u_face[1]),
        u_to_radius(bg, u_face[2]),
    ];
    let inv = surface.face_inversive(face);
    let lengths = face_lengths(surface, face, radii);
    let angles = inner_angles(bg, lengths)?;

    // d theta_m / d l_x via theta = arccos(c), dtheta = -dc / sin.
    let mut dtheta_dl = [[0.0f64; 3]; 3];
    for m in 0..3 {
        let (p, q) = ((m + 1) % 3, (m + 2) % 3);
        let (a, b, c) = (lengths[m], lengths[p], lengths[q]);
        let sin = angles[m].sin();
        let (dcos_da, dcos_db, dcos_dc) = match bg {
            Background::Euclidean => (
                -a / (b * c),
                (b * b - c * c + a * a) / (2.0 * b * b * c),
                (c * c - b * b + a * a) / (2.0 * b * c * c),
            ),
            Background::Hyperbolic => {
                let (sa, sb, sc) = (a.sinh(), b.sinh(), c.sinh());
                let (ca, cb, cc) = (a.cosh(), b.cosh(), c.cosh());
                (
                    -sa / (sb * sc),
                    (sb * sb * cc - (cb * cc - ca) * cb) / (sb * sb * sc),
                    (sc * sc * cb - (cb * cc - ca) * cc) / (sb * sc * sc),
                )
            }
        };
        dtheta_dl[m][m] = -dcos_da / sin;
        dtheta_dl[m][p] = -dcos_db / sin;
        dtheta_dl[m][q] = -dcos_dc / sin;
    }

    // d l_m / d r_x: the edge opposite m joins the other two vertices.
    let mut dl_dr = [[0.0f64; 3]; 3];
    for m in 0..3 {
        let (p, q) = ((m + 1) % 3, (m + 2) % 3);
        match bg {
            Background::Euclidean => {
                dl_dr[m][p] = (radii[p] + radii[q] * inv[m]) / lengths[m];
                dl_dr[m][q] = (radii[q] + radii[p] * inv[m]) / lengths[m];
            }
            Background::Hyperbolic => {
                let sl = lengths[m].sinh();
                dl_dr[m][p] =
                    (radii[p].sinh() * radii[q].cosh() + inv[m] * radii[p].cosh() * radii[q].sinh()) / sl;
                dl_dr[m][q] =
                    (radii[q].sinh() * radii[p].cosh() + inv[m] * radii[q].cosh() * radii[p].sinh()) / sl;
            }
        }
    }

    let mut matrix = [[0.0f64; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut sum = 0.0;
            for e in 0..3 {
                sum += dtheta_dl[a][e] * dl_dr[e][b];
            }
            matrix[a][b] = sum * dradius_du(bg, radii[b]);
        }
    }
    Ok(AngleJacobian { face, matrix })
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// 16-point Gauss-Legendre nodes and weights on [-1, 1], computed once
/// by Newton iteration on the Legendre recurrence.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static NODES: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    NODES.get_or_init(|| {
        let n = 16;
        (0..n)
            .map(|k| {
                let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
                for _ in 0..64 {
                    let (p, dp) = legendre_and_derivative(n, x);
                    let dx = p / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                let (_, dp) = legendre_and_derivative(n, x);
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn gl_panel<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for &(x, w) in gauss_legendre() {
        sum += w * f(mid + half * x)?;
    }
    Ok(sum * half)
}

fn integrate_adaptive<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let whole = gl_panel(f, a, b)?;
    let mid = 0.5 * (a + b);
    let refined = gl_panel(f, a, mid)? + gl_panel(f, mid, b)?;
    if (whole - refined).abs() <= tol || depth == 0 {
        Ok(refined)
    } else {
        Ok(integrate_adaptive(f, a, mid, 0.5 * tol, depth - 1)?
            + integrate_adaptive(f, mid, b, 0.5 * tol, depth - 1)?)
    }
}

/// Base point of the energy integral: u of the unit-radius metric.
/// (The all-zero point would sit outside the hyperbolic domain.)
pub fn energy_base_u(background: Background) -> f64 {
    radius_to_u(background, 1.0)
}

/// Line integral of the closed 1-form sum_a theta_a du_a along the
/// straight u-segment from `u_from` to `u_to`, for one face. Errors if
/// the face degenerates anywhere on the segment.
pub fn face_oneform_integral(
    surface: &WeightedSurface,
    face: Face,
    u_from: [f64; 3],
    u_to: [f64; 3],
) -> Result<f64> {
    let bg = surface.background();
    if bg == Background::Hyperbolic {
        for (slot, &u) in u_from.iter().chain(u_to.iter()).enumerate() {
            if u.is_nan() || u >= 0.0 {
                return Err(Error::DomainError {
                    vertex: face[slot % 3],
                    value: u,
                });
            }
        }
    }
    let direction = [
        u_to[0] - u_from[0],
        u_to[1] - u_from[1],
        u_to[2] - u_from[2],
    ];
    if direction.iter().all(|&d| d == 0.0) {
        return Ok(0.0);
    }

    let angles_at = |t: f64| -> Result<[f64; 3]> {
        let radii = [
            u_to_radius(bg, u_from[0] + t * direction[0]),
            u_to_radius(bg, u_from[1] + t * direction[1]),
            u_to_radius(bg, u_from[2] + t * direction[2]),
        ];
        inner_angles(bg, face_lengths(surface, face, radii))
    };

    let at_start = angles_at(0.0)?;
    let at_end = angles_at(1.0)?;
    let variation = (0..3)
        .map(|m| (at_end[m] - at_start[m]).abs())
        .fold(0.0f64, f64::max);
    let panels = ((variation / ANGLE_VARIATION_PER_PANEL).ceil() as usize).max(1);

    let mut integrand = |t: f64| -> Result<f64> {
        let theta = angles_at(t)?;
        Ok(theta[0] * direction[0] + theta[1] * direction[1] + theta[2] * direction[2])
    };
    let mut total = 0.0;
    for p in 0..panels {
        let a = p as f64 / panels as f64;
        let b = (p + 1) as f64 / panels as f64;
        total += integrate_adaptive(&mut integrand, a, b, QUADRATURE_TOL / panels as f64, MAX_SPLIT_DEPTH)?;
    }
    Ok(total)
}

/// Face energy W_tau(u): the 1-form integrated from the base point.
/// Its gradient is the triple of inner angles.
pub fn face_energy(surface: &WeightedSurface, face: Face, u_face: [f64; 3]) -> Result<f64> {
    let base = energy_base_u(surface.background());
    face_oneform_integral(surface, face, [base; 3], u_face)
}

/// Total energy W(u) = sum of face energies.
pub fn total_energy(surface: &WeightedSurface, u: &UCoordinates) -> Result<f64> {
    assert_eq!(u.len(), surface.vertex_count());
    let mut sum = 0.0;
    for f in surface.triangulation().faces() {
        sum += face_energy(surface, *f, u.at_face(*f))?;
    }
    Ok(sum)
}

/// Gradient of the total energy: 2 pi - K at the metric `from_u(u)`,
/// computed through the curvature rather than the integral.
pub fn energy_gradient(surface: &WeightedSurface, u: &UCoordinates) -> Result<Vec<f64>> {
    assert_eq!(u.len(), surface.vertex_count());
    let r = from_u(u);
    let report = metric_report(surface, &r);
    match report.curvatures() {
        Some(k) => Ok(k.into_iter().map(|k| 2.0 * PI - k).collect()),
        None => {
            let face = report.first_invalid_face().unwrap();
            Err(Error::DegenerateTriangle {
                lengths: face_lengths(surface, face, r.at_face(face)),
            })
        }
    }
}

/// Knobs for the Newton solver. `damping` is the backtracking shrink
/// factor of the line search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 100,
            damping: 0.5,
        }
    }
}

/// One line of the convergence log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// max |K - target| over A before the step.
    pub residual: f64,
    /// Infinity norm of the applied u-step (0 for the final record).
    pub step_size: f64,
}

/// Result of a successful prescribed-curvature solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub radii: RadiusVector,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub trace: Vec<IterationRecord>,
}

/// Solves the prescribed-curvature problem: find radii agreeing with
/// `fixed` on B whose curvature matches `target` on A, by Newton
/// iteration on the strictly concave restricted energy.
///
/// Requires the concave regime (I in (-1, 1], gamma >= 0 per face), a
/// partition A ⊔ B = V with A nonempty, and B nonempty for Euclidean
/// background. Targets must respect the degeneration lower bounds.
pub fn solve_prescribed_curvature(
    surface: &WeightedSurface,
    fixed: &BTreeMap<usize, f64>,
    target: &BTreeMap<usize, f64>,
    options: &SolveOptions,
) -> Result<SolveOutcome> {
    let bg = surface.background();
    let n = surface.vertex_count();

    if target.is_empty() {
        return Err(Error::BadPartition("A is empty".into()));
    }
    if bg == Background::Euclidean && fixed.is_empty() {
        return Err(Error::BadPartition(
            "Euclidean background needs a nonempty fixed set B".into(),
        ));
    }
    for v in 0..n {
        match (fixed.contains_key(&v), target.contains_key(&v)) {
            (true, true) => {
                return Err(Error::BadPartition(format!("vertex {} is in both A and B", v)))
            }
            (false, false) => {
                return Err(Error::BadPartition(format!("vertex {} is in neither A nor B", v)))
            }
            _ => {}
        }
    }
    for (&v, &r) in fixed {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, vertex_count: n });
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::NonPositiveRadius { vertex: v, value: r });
        }
    }
    for (&v, &k) in target {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, vertex_count: n });
        }
        if k.is_nan() || k >= 2.0 * PI {
            return Err(Error::InfeasibleTarget {
                subset: vec![v],
                sum: k,
                limit: 2.0 * PI,
            });
        }
    }

    if !surface.all_intersecting() {
        return Err(Error::NotConcaveRegion {
            detail: "some inversive distance exceeds 1".into(),
        });
    }
    for f in surface.triangulation().faces() {
        let g = gamma_weights(surface, *f);
        if g.min() < 0.0 {
            return Err(Error::NotConcaveRegion {
                detail: format!("face {:?} has a negative gamma weight {}", f, g.min()),
            });
        }
    }

    check_target_feasibility(surface, target)?;

    let a_verts: Vec<usize> = target.keys().copied().collect();
    let a_index: BTreeMap<usize, usize> =
        a_verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let m = a_verts.len();

    // Start the free radii at the geometric mean of the fixed ones so
    // the initial scale matches the data.
    let initial_free = if fixed.is_empty() {
        1.0
    } else {
        (fixed.values().map(|r| r.ln()).sum::<f64>() / fixed.len() as f64).exp()
    };
    let mut u: Vec<f64> = (0..n)
        .map(|v| radius_to_u(bg, fixed.get(&v).copied().unwrap_or(initial_free)))
        .collect();

    let objective = |u_values: &[f64]| -> Result<f64> {
        let coords = UCoordinates::new(bg, u_values.to_vec())?;
        let w = total_energy(surface, &coords)?;
        let linear: f64 = target
            .iter()
            .map(|(&a, &k)| (2.0 * PI - k) * u_values[a])
            .sum();
        Ok(w - linear)
    };

    let mut trace = Vec::new();
    let mut last_step = 0.0f64;
    for iteration in 0..options.max_iter {
        let coords = UCoordinates::new(bg, u.clone())?;
        let radii = from_u(&coords);
        let report = metric_report(surface, &radii);
        let curvature = report
            .curvatures()
            .expect("metrics stay valid in the concave regime");

        let gradient = DVector::from_fn(m, |i, _| target[&a_verts[i]] - curvature[a_verts[i]]);
        let residual = gradient.amax();
        trace.push(IterationRecord {
            iteration,
            residual,
            step_size: last_step,
        });
        if residual <= options.tol {
            return Ok(SolveOutcome {
                radii,
                iterations: iteration,
                residual,
                converged: true,
                trace,
            });
        }

        // Hessian of the restricted energy: assembled per-face angle
        // Jacobians over A x A. Negative definite on this slice.
        let mut hessian = DMatrix::zeros(m, m);
        for f in surface.triangulation().faces() {
            if !f.iter().any(|v| a_index.contains_key(v)) {
                continue;
            }
            let jac = angle_jacobian(surface, *f, coords.at_face(*f))?;
            for (p_slot, p) in f.iter().enumerate() {
                let Some(&pi) = a_index.get(p) else { continue };
                for (q_slot, q) in f.iter().enumerate() {
                    if let Some(&qi) = a_index.get(q) {
                        hessian[(pi, qi)] += jac.matrix[p_slot][q_slot];
                    }
                }
            }
        }

        let step = newton_step(&hessian, &gradient)?;
        let slope: f64 = gradient.dot(&step);

        let f_current = objective(&u)?;
        // Near the optimum the true increase per step is of order
        // residual^2, far below what the quadrature energy resolves;
        // below this floor the Newton step is taken on trust (F is
        // strictly concave there, so it is an ascent step).
        let noise_floor = 1e-9 * (1.0 + f_current.abs());
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..64 {
            let mut trial = u.clone();
            let mut in_domain = true;
            for (i, &a) in a_verts.iter().enumerate() {
                trial[a] += alpha * step[i];
                if bg == Background::Hyperbolic && (trial[a].is_nan() || trial[a] >= 0.0) {
                    in_domain = false;
                }
            }
            if in_domain {
                let expected_gain = 1e-4 * alpha * slope;
                if expected_gain <= noise_floor {
                    accepted = Some(trial);
                    break;
                }
                if let Ok(f_trial) = objective(&trial) {
                    if f_trial >= f_current + expected_gain {
                        accepted = Some(trial);
                        break;
                    }
                }
            }
            alpha *= options.damping;
        }
        let Some(next) = accepted else {
            return Err(Error::MaxIterations(iteration + 1));
        };
        last_step = (0..m)
            .map(|i| (alpha * step[i]).abs())
            .fold(0.0f64, f64::max);
        u = next;

        // A collapsing radius on A means the iterates are running into
        // a degeneration bound the pre-check did not cover.
        let collapsed: Vec<usize> = a_verts
            .iter()
            .copied()
            .filter(|&a| u_to_radius(bg, u[a]) < 1e-12)
            .collect();
        if !collapsed.is_empty() {
            let subset = VertexSubset::new(collapsed.iter().copied());
            let limit = degeneration_limit(surface, &subset)?;
            let sum: f64 = collapsed.iter().map(|a| target[a]).sum();
            return Err(Error::InfeasibleTarget {
                subset: collapsed,
                sum,
                limit,
            });
        }
    }
    Err(Error::MaxIterations(options.max_iter))
}

/// Solves (-H) s = g for the ascent direction, adding a diagonal
/// jitter only if the Cholesky factorization fails (it can, at the
/// boundary gamma = 0 where strict concavity is not guaranteed).
fn newton_step(hessian: &DMatrix<f64>, gradient: &DVector<f64>) -> Result<DVector<f64>> {
    let mut positive = -hessian.clone();
    let scale = positive.diagonal().amax().max(1e-300);
    let mut jitter = 0.0;
    for _ in 0..40 {
        if let Some(chol) = Cholesky::new(positive.clone()) {
            return Ok(chol.solve(gradient));
        }
        jitter = if jitter == 0.0 { 1e-14 * scale } else { jitter * 10.0 };
        for i in 0..positive.nrows() {
            positive[(i, i)] += jitter;
        }
    }
    Err(Error::NotConcaveRegion {
        detail: "energy Hessian is not negative definite on the fixed-B slice".into(),
    })
}

/// Necessary feasibility from the degeneration bounds: every subset J
/// of A must satisfy sum target > limit(J). Enumerates all subsets
/// when A is small, otherwise singletons and the whole of A.
fn check_target_feasibility(
    surface: &WeightedSurface,
    target: &BTreeMap<usize, f64>,
) -> Result<()> {
    let a_verts: Vec<usize> = target.keys().copied().collect();
    let check = |subset: Vec<usize>| -> Result<()> {
        let sum: f64 = subset.iter().map(|v| target[v]).sum();
        let limit = degeneration_limit(surface, &VertexSubset::new(subset.iter().copied()))?;
        if sum <= limit {
            return Err(Error::InfeasibleTarget { subset, sum, limit });
        }
        Ok(())
    };
    if a_verts.len() <= 12 {
        for mask in 1u32..(1 << a_verts.len()) {
            let subset: Vec<usize> = a_verts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect();
            check(subset)?;
        }
    } else {
        for &v in &a_verts {
            check(vec![v])?;
        }
        check(a_verts)?;
    }
    Ok(())
}
