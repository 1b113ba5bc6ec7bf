//! Standard small complexes.

use std::collections::BTreeMap;

use super::{ComplexError, DeltaSet, Involution};

/// Simplicial surface from vertex triples. Each triangle's vertices are
/// sorted; edges get ids in lexicographic order of their vertex pairs and
/// triangles keep their input order.
pub fn from_triangles(n_vertices: usize, triangles: &[[usize; 3]]) -> Result<DeltaSet, ComplexError> {
    let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut sorted = Vec::with_capacity(triangles.len());
    for t in triangles {
        let mut t = *t;
        t.sort_unstable();
        if t[0] == t[1] || t[1] == t[2] {
            return Err(ComplexError::MalformedFaces(format!("degenerate triangle {t:?}")));
        }
        if t[2] >= n_vertices {
            return Err(ComplexError::MalformedFaces(format!("triangle {t:?} names a missing vertex")));
        }
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            edges.insert((a, b), 0);
        }
        sorted.push(t);
    }
    for (i, id) in edges.values_mut().enumerate() {
        *id = i;
    }
    let edge_faces = edges.keys().map(|&(a, b)| vec![b, a]).collect();
    let tri_faces = sorted.iter().map(|t| vec![edges[&(t[1], t[2])], edges[&(t[0], t[2])], edges[&(t[0], t[1])]]).collect();
    DeltaSet::new(vec![vec![vec![]; n_vertices], edge_faces, tri_faces])
}

pub fn point() -> DeltaSet {
    DeltaSet::new(vec![vec![vec![]]]).unwrap()
}

/// Path with `m` edges `v_i -> v_{i+1}`.
pub fn interval(m: usize) -> DeltaSet {
    let edges = (0..m).map(|i| vec![i + 1, i]).collect();
    DeltaSet::new(vec![vec![vec![]; m + 1], edges]).unwrap()
}

/// Cycle of `m >= 1` edges `v_i -> v_{i+1 mod m}`; `m = 1` is a loop.
pub fn circle(m: usize) -> DeltaSet {
    assert!(m >= 1);
    let edges = (0..m).map(|i| vec![(i + 1) % m, i]).collect();
    DeltaSet::new(vec![vec![vec![]; m], edges]).unwrap()
}

pub fn tetrahedron_boundary() -> DeltaSet {
    from_triangles(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
}

/// Vertices `±e_1, ±e_2, ±e_3` numbered 0..6 as `+x, -x, +y, -y, +z, -z`.
pub fn octahedron() -> DeltaSet {
    let mut tris = vec![];
    for x in [0, 1] {
        for y in [2, 3] {
            for z in [4, 5] {
                tris.push([x, y, z]);
            }
        }
    }
    from_triangles(6, &tris).unwrap()
}

pub fn icosahedron() -> DeltaSet {
    // Apex 0, upper ring 1..=5, lower ring 6..=10, apex 11.
    let mut tris = vec![];
    for i in 0..5 {
        let (u, u1) = (1 + i, 1 + (i + 1) % 5);
        let (l, l1) = (6 + i, 6 + (i + 1) % 5);
        tris.push([0, u, u1]);
        tris.push([u, u1, l]);
        tris.push([u1, l, l1]);
        tris.push([11, l, l1]);
    }
    from_triangles(12, &tris).unwrap()
}

/// Two-triangle Δ-set structure on the real projective plane.
pub fn projective_plane() -> DeltaSet {
    // Edges a, b: v0 -> v1; c: loop at v0.
    DeltaSet::new(vec![vec![vec![]; 2], vec![vec![1, 0], vec![1, 0], vec![0, 0]], vec![vec![1, 0, 2], vec![0, 1, 2]]]).unwrap()
}

/// Ids used by [`torus_grid`].
#[derive(Clone, Copy, Debug)]
pub struct TorusGrid {
    pub m1: usize,
    pub m2: usize,
}

impl TorusGrid {
    fn n(&self) -> usize {
        self.m1 * self.m2
    }

    pub fn vertex(&self, i: i64, j: i64) -> usize {
        let i = i.rem_euclid(self.m1 as i64) as usize;
        let j = j.rem_euclid(self.m2 as i64) as usize;
        i * self.m2 + j
    }

    /// Edge `(i,j) -> (i+1,j)`.
    pub fn horizontal(&self, i: i64, j: i64) -> usize {
        self.vertex(i, j)
    }

    /// Edge `(i,j) -> (i,j+1)`.
    pub fn vertical(&self, i: i64, j: i64) -> usize {
        self.n() + self.vertex(i, j)
    }

    /// Edge `(i,j) -> (i+1,j+1)`.
    pub fn diagonal(&self, i: i64, j: i64) -> usize {
        2 * self.n() + self.vertex(i, j)
    }

    /// Triangle `(i,j), (i+1,j), (i+1,j+1)`.
    pub fn lower(&self, i: i64, j: i64) -> usize {
        self.vertex(i, j)
    }

    /// Triangle `(i,j), (i,j+1), (i+1,j+1)`.
    pub fn upper(&self, i: i64, j: i64) -> usize {
        self.n() + self.vertex(i, j)
    }

    /// The involution `x -> -x`, which reverses the vertex order of every
    /// edge and swaps lower and upper triangles.
    pub fn negation(&self) -> Involution {
        let n = self.n();
        let mut v = vec![0; n];
        let mut e = vec![0; 3 * n];
        let mut t = vec![0; 2 * n];
        for i in 0..self.m1 as i64 {
            for j in 0..self.m2 as i64 {
                v[self.vertex(i, j)] = self.vertex(-i, -j);
                e[self.horizontal(i, j)] = self.horizontal(-i - 1, -j);
                e[self.vertical(i, j)] = self.vertical(-i, -j - 1);
                e[self.diagonal(i, j)] = self.diagonal(-i - 1, -j - 1);
                t[self.lower(i, j)] = self.upper(-i - 1, -j - 1);
                t[self.upper(i, j)] = self.lower(-i - 1, -j - 1);
            }
        }
        Involution { maps: vec![v, e, t] }
    }

    pub fn complex(&self) -> DeltaSet {
        let n = self.n();
        let mut edges = vec![vec![]; 3 * n];
        let mut tris = vec![vec![]; 2 * n];
        for i in 0..self.m1 as i64 {
            for j in 0..self.m2 as i64 {
                edges[self.horizontal(i, j)] = vec![self.vertex(i + 1, j), self.vertex(i, j)];
                edges[self.vertical(i, j)] = vec![self.vertex(i, j + 1), self.vertex(i, j)];
                edges[self.diagonal(i, j)] = vec![self.vertex(i + 1, j + 1), self.vertex(i, j)];
                tris[self.lower(i, j)] = vec![self.vertical(i + 1, j), self.diagonal(i, j), self.horizontal(i, j)];
                tris[self.upper(i, j)] = vec![self.horizontal(i, j + 1), self.diagonal(i, j), self.vertical(i, j)];
            }
        }
        DeltaSet::new(vec![vec![vec![]; n], edges, tris]).unwrap()
    }
}

/// `m1 x m2` grid on the torus `R^2 / Z^2`, each square cut along its diagonal.
pub fn torus_grid(m1: usize, m2: usize) -> DeltaSet {
    assert!(m1 >= 1 && m2 >= 1);
    TorusGrid { m1, m2 }.complex()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn platonic_counts() {
        assert_eq!(tetrahedron_boundary().counts(), vec![4, 6, 4]);
        assert_eq!(icosahedron().counts(), vec![12, 30, 20]);
        assert_eq!(torus_grid(2, 3).counts(), vec![6, 18, 12]);
    }

    #[test]
    fn triangle_vertices_are_sorted() {
        let ds = from_triangles(4, &[[3, 1, 0]]).unwrap();
        assert_eq!(ds.vertices(2, 0), vec![0, 1, 3]);
        assert!(from_triangles(3, &[[0, 0, 1]]).is_err());
        assert!(from_triangles(2, &[[0, 1, 2]]).is_err());
    }

    #[test]
    fn torus_vertices() {
        let g = TorusGrid { m1: 2, m2: 2 };
        let ds = g.complex();
        assert_eq!(ds.vertices(2, g.lower(1, 1)), vec![g.vertex(1, 1), g.vertex(0, 1), g.vertex(0, 0)]);
        assert_eq!(ds.vertices(2, g.upper(0, 1)), vec![g.vertex(0, 1), g.vertex(0, 0), g.vertex(1, 0)]);
    }
}
