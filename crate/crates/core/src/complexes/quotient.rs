//! Quotients of Δ-sets by simplicial involutions.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{ComplexError, DeltaSet};

/// Simplicial involution given by `maps[q][s] = σ(s)` in each dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Involution {
    pub maps: Vec<Vec<usize>>,
}

/// Projection onto the quotient: orbit ids and the orientation sign of each
/// upstairs simplex relative to its quotient cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMap {
    pub orbit: Vec<Vec<usize>>,
    pub sign: Vec<Vec<i8>>,
}

impl QuotientMap {
    /// Pushes a q-chain down to the quotient.
    pub fn push_chain(&self, q: usize, chain: &[BigInt], quotient_count: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); quotient_count];
        for (s, c) in chain.iter().enumerate() {
            let o = self.orbit[q][s];
            if self.sign[q][s] > 0 {
                out[o] += c;
            } else {
                out[o] -= c;
            }
        }
        out
    }
}

fn permutation_sign(order: &[usize]) -> i8 {
    let mut sign = 1;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            if order[i] > order[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn validate(ds: &DeltaSet, inv: &Involution) -> Result<(), ComplexError> {
    let top = ds.dimension().unwrap_or(0);
    if inv.maps.len() < top + 1 {
        return Err(ComplexError::BadInvolution(format!("maps cover {} dimensions, need {}", inv.maps.len(), top + 1)));
    }
    for q in 0..=top {
        let m = &inv.maps[q];
        if m.len() != ds.count(q) {
            return Err(ComplexError::BadInvolution(format!("dimension {q} map has length {}, expected {}", m.len(), ds.count(q))));
        }
        for (s, &t) in m.iter().enumerate() {
            if t >= m.len() || m[t] != s {
                return Err(ComplexError::BadInvolution(format!("map does not square to the identity at {q}-simplex {s}")));
            }
        }
    }
    Ok(())
}

/// Quotient of `ds` by an involution. A positive-dimensional simplex may only
/// be mapped to itself if it is fixed pointwise. Quotient cells list their
/// vertex orbits in ascending order, so every simplex must have its vertices in
/// distinct orbits.
pub fn quotient_by_involution(ds: &DeltaSet, inv: &Involution) -> Result<(DeltaSet, QuotientMap), ComplexError> {
    validate(ds, inv)?;
    let top = ds.dimension().unwrap_or(0);
    let sigma = |q: usize, s: usize| inv.maps[q][s];

    let mut orbit: Vec<Vec<usize>> = Vec::with_capacity(top + 1);
    let mut reps: Vec<Vec<usize>> = Vec::with_capacity(top + 1);
    for q in 0..=top {
        let n = ds.count(q);
        let mut ids = vec![usize::MAX; n];
        let mut r = vec![];
        for s in 0..n {
            let t = sigma(q, s);
            if q > 0 && t == s && ds.vertices(q, s).iter().any(|&v| sigma(0, v) != v) {
                return Err(ComplexError::StabilizedSimplex { dim: q, id: s });
            }
            if ids[s] == usize::MAX {
                ids[s] = r.len();
                ids[t] = r.len();
                r.push(s);
            }
        }
        orbit.push(ids);
        reps.push(r);
    }

    let mut sign: Vec<Vec<i8>> = vec![vec![1; ds.count(0)]];
    let mut vertex_orbits: Vec<Vec<Vec<usize>>> = vec![(0..ds.count(0)).map(|v| vec![orbit[0][v]]).collect()];
    for q in 1..=top {
        let mut signs = Vec::with_capacity(ds.count(q));
        let mut vos = Vec::with_capacity(ds.count(q));
        for s in 0..ds.count(q) {
            let vo: Vec<usize> = ds.vertices(q, s).iter().map(|&v| orbit[0][v]).collect();
            let mut sorted = vo.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != vo.len() {
                return Err(ComplexError::IdentifiedVertices { dim: q, id: s });
            }
            signs.push(permutation_sign(&vo));
            vos.push(vo);
        }
        sign.push(signs);
        vertex_orbits.push(vos);
    }

    // σ must carry the face omitting v to the face of σ(s) omitting σ(v).
    for q in 1..=top {
        for s in 0..ds.count(q) {
            let t = sigma(q, s);
            let sv = ds.vertices(q, s);
            let tv = ds.vertices(q, t);
            let mut image: Vec<usize> = sv.iter().map(|&v| sigma(0, v)).collect();
            let mut tv_sorted = tv.clone();
            image.sort_unstable();
            tv_sorted.sort_unstable();
            if image != tv_sorted {
                return Err(ComplexError::BadInvolution(format!("vertices of {q}-simplex {s} do not map to those of its image")));
            }
            for (j, &v) in sv.iter().enumerate() {
                let k = tv.iter().position(|&w| w == sigma(0, v)).expect("checked above");
                if sigma(q - 1, ds.face(q, s, j)) != ds.face(q, t, k) {
                    return Err(ComplexError::BadInvolution(format!("face {j} of {q}-simplex {s} does not map to the matching face of its image")));
                }
            }
        }
    }

    let mut faces: Vec<Vec<Vec<usize>>> = vec![vec![vec![]; reps[0].len()]];
    for q in 1..=top {
        let mut level = Vec::with_capacity(reps[q].len());
        for &s in &reps[q] {
            let vo = &vertex_orbits[q][s];
            let mut sorted = vo.clone();
            sorted.sort_unstable();
            let fs = sorted
                .iter()
                .map(|o| {
                    let j = vo.iter().position(|x| x == o).unwrap();
                    orbit[q - 1][ds.face(q, s, j)]
                })
                .collect();
            level.push(fs);
        }
        faces.push(level);
    }
    let quotient = DeltaSet::new(faces)?;
    Ok((quotient, QuotientMap { orbit, sign }))
}
