//! Abstract triangulated sets (Δ-sets) and their integral homology.
//!
//! A q-simplex is an id in dimension q together with its faces `δ_0..δ_q`,
//! where `δ_j` omits the j-th vertex. Several simplices may share a vertex
//! set, which is what polygon cycles with two edges and quotient complexes
//! need.

mod quotient;
pub mod standard;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_linalg::{self, IntMatrix};

pub use quotient::{quotient_by_involution, Involution, QuotientMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("malformed faces: {0}")]
    MalformedFaces(String),
    #[error("simplicial identity fails on {dim}-simplex {id}: d{i}d{j} != d{}d{i}", .j - 1)]
    SimplicialIdentity { dim: usize, id: usize, i: usize, j: usize },
    #[error("H_{dim} modulo torsion has rank {rank}, expected 1")]
    NotRankOne { dim: usize, rank: usize },
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("invalid involution: {0}")]
    BadInvolution(String),
    #[error("involution stabilizes the {dim}-simplex {id}; refine the complex first")]
    StabilizedSimplex { dim: usize, id: usize },
    #[error("the {dim}-simplex {id} has two vertices in one orbit; refine the complex first")]
    IdentifiedVertices { dim: usize, id: usize },
}

/// Finite Δ-set. `faces[q][s]` lists the q+1 faces of the q-simplex `s`
/// (empty for vertices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaSet {
    faces: Vec<Vec<Vec<usize>>>,
}

/// `H_q` or `H^q` as a free rank plus invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub betti: usize,
    #[serde(with = "crate::exact_linalg::bigint_strings")]
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn free(betti: usize) -> Self {
        HomologyGroup { betti, torsion: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomotopyType {
    Point,
    Interval,
    Sphere2,
    Other,
}

/// An integral chain which is a cycle of a particular Δ-set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleVector {
    pub dim: usize,
    #[serde(with = "crate::exact_linalg::bigint_strings")]
    pub coefficients: Vec<BigInt>,
}

impl DeltaSet {
    /// Validates face arities, id ranges and the simplicial identities.
    pub fn new(faces: Vec<Vec<Vec<usize>>>) -> Result<Self, ComplexError> {
        let mut faces = faces;
        while faces.len() > 1 && faces.last().is_some_and(Vec::is_empty) {
            faces.pop();
        }
        if faces.is_empty() {
            faces.push(vec![]);
        }
        for (q, level) in faces.iter().enumerate() {
            for (s, fs) in level.iter().enumerate() {
                let arity = if q == 0 { 0 } else { q + 1 };
                if fs.len() != arity {
                    return Err(ComplexError::MalformedFaces(format!(
                        "{q}-simplex {s} has {} faces, expected {arity}",
                        fs.len()
                    )));
                }
                if q > 0 {
                    if let Some(&bad) = fs.iter().find(|&&f| f >= faces[q - 1].len()) {
                        return Err(ComplexError::MalformedFaces(format!(
                            "{q}-simplex {s} names missing face {bad}"
                        )));
                    }
                }
            }
        }
        let ds = DeltaSet { faces };
        ds.check_identities()?;
        Ok(ds)
    }

    fn check_identities(&self) -> Result<(), ComplexError> {
        for q in 2..self.faces.len() {
            for s in 0..self.faces[q].len() {
                for j in 1..=q {
                    for i in 0..j {
                        let lhs = self.face(q - 1, self.face(q, s, j), i);
                        let rhs = self.face(q - 1, self.face(q, s, i), j - 1);
                        if lhs != rhs {
                            return Err(ComplexError::SimplicialIdentity { dim: q, id: s, i, j });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The empty complex.
    pub fn empty() -> Self {
        DeltaSet { faces: vec![vec![]] }
    }

    /// Highest dimension with a simplex; `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        (0..self.faces.len()).rev().find(|&q| !self.faces[q].is_empty())
    }

    pub fn count(&self, q: usize) -> usize {
        self.faces.get(q).map_or(0, Vec::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.faces.iter().map(Vec::len).collect()
    }

    /// `δ_j` of the q-simplex `s`.
    pub fn face(&self, q: usize, s: usize, j: usize) -> usize {
        self.faces[q][s][j]
    }

    pub fn faces_of(&self, q: usize, s: usize) -> &[usize] {
        &self.faces[q][s]
    }

    /// Ordered vertices `v_0..v_q` of the q-simplex `s`.
    pub fn vertices(&self, q: usize, s: usize) -> Vec<usize> {
        if q == 0 {
            return vec![s];
        }
        let front = self.vertices(q - 1, self.face(q, s, q));
        let mut out = vec![front[0]];
        out.extend(self.vertices(q - 1, self.face(q, s, 0)));
        out
    }

    /// Face of the q-simplex `s` spanned by the vertex positions in `mask`
    /// (bit i = vertex i), returned as `(dimension, id)`.
    pub fn restrict(&self, q: usize, s: usize, mask: u32) -> (usize, usize) {
        let (mut dim, mut id) = (q, s);
        for i in (0..=q).rev() {
            if mask & (1 << i) == 0 {
                id = self.face(dim, id, i);
                dim -= 1;
            }
        }
        (dim, id)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.faces.iter().enumerate().map(|(q, l)| if q % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) }).sum()
    }

    /// `∂_q : C_q -> C_{q-1}` as an `n_{q-1} x n_q` matrix.
    pub fn boundary_matrix(&self, q: usize) -> IntMatrix {
        let cols = self.count(q);
        if q == 0 {
            return IntMatrix::zeros(0, cols);
        }
        let rows = self.count(q - 1);
        let mut m = IntMatrix::zeros(rows, cols);
        for s in 0..cols {
            for (j, &f) in self.faces[q][s].iter().enumerate() {
                let sign = if j % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                let cur = m.get(f, s) + sign;
                m.set(f, s, cur);
            }
        }
        m
    }

    /// Boundary of a q-chain.
    pub fn boundary_of(&self, q: usize, chain: &[BigInt]) -> Vec<BigInt> {
        self.boundary_matrix(q).mul_vec(chain).expect("chain length matches")
    }

    pub fn is_cycle(&self, cycle: &CycleVector) -> bool {
        cycle.coefficients.len() == self.count(cycle.dim)
            && self.boundary_of(cycle.dim, &cycle.coefficients).iter().all(Zero::is_zero)
    }

    pub fn homology(&self, q: usize) -> HomologyGroup {
        let n = self.count(q);
        let out = exact_linalg::invariant_factors(&self.boundary_matrix(q));
        let inc = exact_linalg::invariant_factors(&self.boundary_matrix(q + 1));
        let rank_out = out.iter().filter(|d| !d.is_zero()).count();
        let rank_in = inc.iter().filter(|d| !d.is_zero()).count();
        HomologyGroup {
            betti: n - rank_out - rank_in,
            torsion: inc.into_iter().filter(|d| *d > BigInt::one()).collect(),
        }
    }

    /// Integral cohomology from the transposed (coboundary) matrices.
    pub fn cohomology(&self, q: usize) -> HomologyGroup {
        let n = self.count(q);
        let out = exact_linalg::invariant_factors(&self.boundary_matrix(q + 1).transpose());
        let inc = if q == 0 {
            IntMatrix::zeros(n, 0)
        } else {
            self.boundary_matrix(q).transpose()
        };
        let inc = exact_linalg::invariant_factors(&inc);
        let rank_out = out.iter().filter(|d| !d.is_zero()).count();
        let rank_in = inc.iter().filter(|d| !d.is_zero()).count();
        HomologyGroup {
            betti: n - rank_out - rank_in,
            torsion: inc.into_iter().filter(|d| *d > BigInt::one()).collect(),
        }
    }

    /// Homology in every dimension `0..=dim`.
    pub fn homology_all(&self) -> Vec<HomologyGroup> {
        let top = self.dimension().unwrap_or(0);
        let factors: Vec<Vec<BigInt>> = (0..=top + 1).map(|q| exact_linalg::invariant_factors(&self.boundary_matrix(q))).collect();
        let rank = |q: usize| factors[q].iter().filter(|d| !d.is_zero()).count();
        (0..=top)
            .map(|q| HomologyGroup {
                betti: self.count(q) - rank(q) - rank(q + 1),
                torsion: factors[q + 1].iter().filter(|d| **d > BigInt::one()).cloned().collect(),
            })
            .collect()
    }

    /// Generator of `H_d` modulo torsion, sign-normalized so the first nonzero
    /// coefficient is positive.
    pub fn top_cycle_generator(&self, d: usize) -> Result<CycleVector, ComplexError> {
        let cycles = exact_linalg::kernel_basis(&self.boundary_matrix(d));
        let k = cycles.cols();
        let boundaries = self.boundary_matrix(d + 1);
        // Boundaries in the coordinates of the (saturated) cycle basis.
        let coords = if boundaries.cols() == 0 || k == 0 {
            IntMatrix::zeros(k, boundaries.cols())
        } else {
            let snf = exact_linalg::smith_normal_form(&cycles);
            let ub = snf.u.mul(&boundaries).expect("shapes chain");
            let mut top = IntMatrix::zeros(k, boundaries.cols());
            for i in 0..k {
                for j in 0..boundaries.cols() {
                    top.set(i, j, ub.get(i, j).clone());
                }
            }
            snf.v.mul(&top).expect("shapes chain")
        };
        let quotient = exact_linalg::smith_with_inverses(&coords);
        let rank = quotient.decomposition.rank();
        if k - rank != 1 {
            return Err(ComplexError::NotRankOne { dim: d, rank: k - rank });
        }
        let x = quotient.u_inv.column(rank);
        let mut coefficients = cycles.mul_vec(&x).expect("shapes chain");
        exact_linalg::normalize_sign(&mut coefficients);
        Ok(CycleVector { dim: d, coefficients })
    }

    /// Vertex incidence count of edges (a loop counts twice).
    fn vertex_valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.count(0)];
        for fs in self.faces.get(1).into_iter().flatten() {
            for &v in fs {
                val[v] += 1;
            }
        }
        val
    }

    /// Number of triangles having each edge as a face, with multiplicity.
    fn edge_incidences(&self) -> Vec<usize> {
        let mut inc = vec![0; self.count(1)];
        for fs in self.faces.get(2).into_iter().flatten() {
            for &e in fs {
                inc[e] += 1;
            }
        }
        inc
    }

    pub fn recognize(&self) -> HomotopyType {
        let Some(top) = self.dimension() else { return HomotopyType::Other };
        match top {
            0 if self.count(0) == 1 => HomotopyType::Point,
            1 => {
                let h = self.homology_all();
                let val = self.vertex_valences();
                let ends = val.iter().filter(|&&v| v == 1).count();
                if h[0] == HomologyGroup::free(1) && h[1].is_zero() && val.iter().all(|&v| (1..=2).contains(&v)) && ends == 2 {
                    HomotopyType::Interval
                } else {
                    HomotopyType::Other
                }
            }
            2 => {
                let pure = self.vertex_valences().iter().all(|&v| v > 0) && self.edge_incidences().iter().all(|&c| c > 0);
                let manifold_like = self.edge_incidences().iter().all(|&c| c == 2);
                if !(pure && manifold_like) {
                    return HomotopyType::Other;
                }
                let h = self.homology_all();
                if h[0] == HomologyGroup::free(1) && h[1].is_zero() && h[2] == HomologyGroup::free(1) {
                    HomotopyType::Sphere2
                } else {
                    HomotopyType::Other
                }
            }
            _ => HomotopyType::Other,
        }
    }

    /// Relabels simplices: `perms[q][old] = new`.
    pub fn permuted(&self, perms: &[Vec<usize>]) -> Result<DeltaSet, ComplexError> {
        let mut faces: Vec<Vec<Vec<usize>>> = self.faces.iter().map(|l| vec![vec![]; l.len()]).collect();
        for (q, level) in self.faces.iter().enumerate() {
            let perm = perms.get(q).ok_or_else(|| ComplexError::Mismatch(format!("no permutation for dimension {q}")))?;
            if perm.len() != level.len() {
                return Err(ComplexError::Mismatch(format!("permutation of dimension {q} has wrong length")));
            }
            for (s, fs) in level.iter().enumerate() {
                let mapped = fs.iter().map(|&f| perms[q - 1][f]).collect();
                faces[q][perm[s]] = mapped;
            }
        }
        DeltaSet::new(faces)
    }

    /// Barycentric subdivision. A k-simplex of the result is a simplex `σ` of
    /// dimension n together with a chain of vertex subsets
    /// `F_0 ⊊ ... ⊊ F_k = [n]`; ids are assigned in order of (dim σ, σ, chain).
    pub fn refine_barycentric(&self) -> DeltaSet {
        let top = self.dimension().unwrap_or(0);
        assert!(top < 31, "dimension too large for subset masks");
        type Key = (usize, usize, Vec<u32>);
        let mut index: Vec<HashMap<Key, usize>> = vec![HashMap::new(); top + 1];
        let mut faces: Vec<Vec<Vec<usize>>> = vec![vec![]; top + 1];
        for k in 0..=top {
            for n in k..=top {
                let full: u32 = (1u32 << (n + 1)) - 1;
                let chains = subset_chains(n, k, full);
                for s in 0..self.count(n) {
                    for chain in &chains {
                        let id = faces[k].len();
                        let mut fs = Vec::with_capacity(if k == 0 { 0 } else { k + 1 });
                        if k > 0 {
                            for j in 0..k {
                                let mut sub = chain.clone();
                                sub.remove(j);
                                fs.push(index[k - 1][&(n, s, sub)]);
                            }
                            // Dropping the top set moves into the face spanned by F_{k-1}.
                            let face_mask = chain[k - 1];
                            let (fd, fid) = self.restrict(n, s, face_mask);
                            let sub: Vec<u32> = chain[..k].iter().map(|&m| compress_mask(m, face_mask)).collect();
                            fs.push(index[k - 1][&(fd, fid, sub)]);
                        }
                        faces[k].push(fs);
                        index[k].insert((n, s, chain.clone()), id);
                    }
                }
            }
        }
        DeltaSet::new(faces).expect("barycentric subdivision is a valid Δ-set")
    }

    /// Triangles as ordered vertex triples (for simplicial surfaces).
    pub fn vertex_triples(&self) -> Vec<[usize; 3]> {
        (0..self.count(2))
            .map(|t| {
                let v = self.vertices(2, t);
                [v[0], v[1], v[2]]
            })
            .collect()
    }
}

/// Chains `F_0 ⊊ ... ⊊ F_k = full` of nonempty subsets of an (n+1)-set.
fn subset_chains(n: usize, k: usize, full: u32) -> Vec<Vec<u32>> {
    // Build from the top down: each step picks a nonempty proper subset.
    fn extend(acc: &mut Vec<Vec<u32>>, chain: &mut Vec<u32>, remaining: usize) {
        if remaining == 0 {
            let mut c = chain.clone();
            c.reverse();
            acc.push(c);
            return;
        }
        let cur = *chain.last().unwrap();
        // Proper nonempty subsets of cur, ascending for determinism.
        let mut sub = (cur - 1) & cur;
        let mut subsets = vec![];
        while sub != 0 {
            subsets.push(sub);
            sub = (sub - 1) & cur;
        }
        subsets.sort_unstable();
        for s in subsets {
            if (s.count_ones() as usize) < remaining {
                continue;
            }
            chain.push(s);
            extend(acc, chain, remaining - 1);
            chain.pop();
        }
    }
    let _ = n;
    let mut acc = vec![];
    extend(&mut acc, &mut vec![full], k);
    acc
}

/// Re-indexes `mask ⊆ within` onto positions `0..|within|`.
fn compress_mask(mask: u32, within: u32) -> u32 {
    let mut out = 0;
    let mut pos = 0;
    for i in 0..32 {
        if within & (1 << i) != 0 {
            if mask & (1 << i) != 0 {
                out |= 1 << pos;
            }
            pos += 1;
        }
    }
    out
}

/// `Σ_v a_v b_v` over the simplices of the common dimension.
pub fn cycle_pairing(x: &CycleVector, y: &CycleVector) -> Result<BigInt, ComplexError> {
    if x.dim != y.dim || x.coefficients.len() != y.coefficients.len() {
        return Err(ComplexError::Mismatch(format!(
            "cannot pair a {}-chain of length {} with a {}-chain of length {}",
            x.dim,
            x.coefficients.len(),
            y.dim,
            y.coefficients.len()
        )));
    }
    Ok(x.coefficients.iter().zip(&y.coefficients).map(|(a, b)| a * b).sum())
}

#[derive(Serialize, Deserialize)]
struct DeltaSetRepr {
    dims: Vec<usize>,
    /// `boundary[q - 1][s]` are the faces of the q-simplex `s`.
    boundary: Vec<Vec<Vec<usize>>>,
}

impl Serialize for DeltaSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DeltaSetRepr { dims: self.counts(), boundary: self.faces[1..].to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DeltaSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = DeltaSetRepr::deserialize(d)?;
        let n0 = *repr.dims.first().unwrap_or(&0);
        if repr.boundary.len() + 1 != repr.dims.len().max(1) {
            return Err(D::Error::custom("boundary must list every dimension above 0"));
        }
        let mut faces = vec![vec![vec![]; n0]];
        for (q, level) in repr.boundary.into_iter().enumerate() {
            if level.len() != repr.dims[q + 1] {
                return Err(D::Error::custom(format!("dimension {} lists {} simplices, dims says {}", q + 1, level.len(), repr.dims[q + 1])));
            }
            faces.push(level);
        }
        DeltaSet::new(faces).map_err(D::Error::custom)
    }
}
