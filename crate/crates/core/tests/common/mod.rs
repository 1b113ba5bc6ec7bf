#![allow(dead_code)]

use k3_motivic::builders::{self, Triangulation};
use k3_motivic::complexes::DeltaSet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Spheres of a few dozen to a few hundred faces: a base solid, optional
/// barycentric steps, then stellar subdivision of random faces.
pub fn refined_spheres(rng: &mut ChaCha8Rng, count: usize, max_faces: usize) -> Vec<DeltaSet> {
    let bases = [Triangulation::Tetrahedron, Triangulation::Octahedron, Triangulation::Icosahedron];
    let mut out = vec![];
    while out.len() < count {
        let base = bases[rng.gen_range(0..3)].complex();
        let steps = rng.gen_range(0..=2);
        let mut s = builders::refine_sphere(&base, steps).unwrap();
        if s.count(2) > max_faces {
            continue;
        }
        let room = (max_faces - s.count(2)) / 2;
        let k = rng.gen_range(0..=room.min(s.count(2)));
        let mut faces: Vec<usize> = (0..s.count(2)).collect();
        for i in 0..k {
            let j = rng.gen_range(i..faces.len());
            faces.swap(i, j);
        }
        faces.truncate(k);
        s = builders::stellar_subdivide(&s, &faces).unwrap();
        out.push(s);
    }
    out
}

/// Random profile of `len` non-negative entries summing to `total`.
pub fn random_profile(rng: &mut ChaCha8Rng, len: usize, total: u64) -> Vec<u64> {
    let mut cuts: Vec<u64> = (0..len - 1).map(|_| rng.gen_range(0..=total)).collect();
    cuts.sort_unstable();
    let mut out = vec![];
    let mut prev = 0;
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(total - prev);
    out
}
