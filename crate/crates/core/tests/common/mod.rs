//! Shared fixtures for the integration suites: small test surfaces and
//! seeded sampling of admissible weights and radii.
#![allow(dead_code)] // each test binary uses a different subset

use std::collections::BTreeMap;

use circlepack::{
    double, gamma_weights, Background, PartitionAB, RadiusVector, Triangulation, VertexSubset,
    WeightedSurface,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn tetra_faces() -> Vec<[usize; 3]> {
    vec![[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
}

pub fn octa_faces() -> Vec<[usize; 3]> {
    vec![
        [0, 1, 2],
        [0, 2, 3],
        [0, 3, 4],
        [0, 4, 1],
        [5, 1, 2],
        [5, 2, 3],
        [5, 3, 4],
        [5, 4, 1],
    ]
}

pub fn disk_faces() -> Vec<[usize; 3]> {
    vec![[0, 1, 3], [0, 2, 3], [1, 2, 3]]
}

/// The closed 5-vertex surface obtained by doubling the 4-vertex disk.
pub fn doubled_disk() -> Triangulation {
    let t = Triangulation::build(&disk_faces()).unwrap();
    let disk = WeightedSurface::with_uniform_inversive(t, Background::Euclidean, 1.0).unwrap();
    double(&disk).unwrap().surface.triangulation().clone()
}

/// Single triangle, for face-local sampling.
pub fn one_triangle() -> Triangulation {
    Triangulation::build(&[[0, 1, 2]]).unwrap()
}

/// Samples inversive distances in (-1, 1] with every face's gamma
/// triple nonnegative. Half the attempts admit obtuse intersections
/// (negative I) and resample on a gamma violation; the fallback of
/// nonnegative I always satisfies the constraint.
pub fn sample_admissible_surface(
    rng: &mut ChaCha8Rng,
    triangulation: &Triangulation,
    background: Background,
) -> WeightedSurface {
    let edges = triangulation.edges().to_vec();
    for attempt in 0..64 {
        let allow_negative = attempt < 32 && rng.random_bool(0.5);
        let weights: Vec<((usize, usize), f64)> = edges
            .iter()
            .map(|e| {
                let lo = if allow_negative { -0.4 } else { 0.0 };
                (e.as_pair(), rng.random_range(lo..=1.0))
            })
            .collect();
        let surface = WeightedSurface::new(triangulation.clone(), background, &weights).unwrap();
        let admissible = triangulation
            .faces()
            .iter()
            .all(|f| gamma_weights(&surface, *f).min() >= 0.0);
        if admissible {
            return surface;
        }
    }
    unreachable!("nonnegative weights are always admissible");
}

pub fn sample_radii(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> RadiusVector {
    RadiusVector::new((0..n).map(|_| rng.random_range(lo..hi)).collect()).unwrap()
}

/// Random partition with nonempty A; B is forced nonempty for the
/// Euclidean background and allowed (rarely) to be empty otherwise.
pub fn sample_partition(
    rng: &mut ChaCha8Rng,
    n: usize,
    background: Background,
) -> PartitionAB {
    loop {
        let a: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if a.is_empty() || a.len() == n && background == Background::Euclidean {
            continue;
        }
        if a.len() == n && rng.random_bool(0.7) {
            continue; // keep all-of-V partitions rare even hyperbolically
        }
        return PartitionAB::from_a(VertexSubset::new(a), n).unwrap();
    }
}

/// Nonnegative bumps for B-radii and A-curvatures, sized to stay well
/// inside the feasible range (curvature targets must remain under 2pi).
pub fn sample_bumps(
    rng: &mut ChaCha8Rng,
    partition: &PartitionAB,
    curvatures: &[f64],
) -> (BTreeMap<usize, f64>, BTreeMap<usize, f64>) {
    let radius_bumps: BTreeMap<usize, f64> = partition
        .b()
        .iter()
        .map(|v| (v, rng.random_range(0.0..0.3)))
        .collect();
    let curvature_bumps: BTreeMap<usize, f64> = partition
        .a()
        .iter()
        .map(|v| {
            let headroom = 2.0 * std::f64::consts::PI - curvatures[v];
            (v, rng.random_range(0.0..0.15f64).min(0.3 * headroom))
        })
        .collect();
    (radius_bumps, curvature_bumps)
}
