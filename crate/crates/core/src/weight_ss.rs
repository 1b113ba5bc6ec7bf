//! The combinatorial rows of the weight spectral sequence of a surface
//! degeneration, the type II `H^1` row, and the monodromy Gram pairing.
//!
//! The E1 term is
//! `E1^{p,q} = ⊕_{i >= max(0,p)} H^{q+2p-2i}(Y^(2i-p))(p-i)`.
//! Only rows fixed by the fiber's combinatorics are synthesized; the middle
//! row depends on restriction maps of Néron-Severi classes and must be
//! supplied by the caller.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::CycleVector;
use crate::degeneration::{DegenerationError, DegenerationFiber};
use crate::exact_linalg::{self, IntMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error(transparent)]
    Fiber(#[from] DegenerationError),
    #[error("row q={q}: {msg}")]
    Shape { q: i64, msg: String },
    #[error("row q={q}: differentials {i} and {} do not compose to zero", .i + 1)]
    NotAComplex { q: i64, i: usize },
    #[error("chain length must be at least 1, got {0}")]
    BadChainLength(usize),
    #[error("H_2 of the dual complex is zero: the fiber is not maximally degenerate")]
    NotMaximal,
}

/// One summand `H^degree(Y^(stratum))(twist)` of an E1 term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct E1Summand {
    pub stratum: usize,
    pub degree: usize,
    pub twist: i64,
    pub rank: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct E1Page {
    pub entries: BTreeMap<(i64, i64), Vec<E1Summand>>,
}

impl E1Page {
    pub fn rank(&self, p: i64, q: i64) -> u64 {
        self.entries.get(&(p, q)).map_or(0, |s| s.iter().map(|x| x.rank).sum())
    }

    /// `Σ (-1)^{p+q} rank E1^{p,q}`.
    pub fn alternating_sum(&self) -> i64 {
        self.entries.keys().map(|&(p, q)| if (p + q) % 2 == 0 { 1 } else { -1 } * self.rank(p, q) as i64).sum()
    }
}

/// Betti numbers `b_0..b_{2(2-j)}` of the strata `Y^(j)`.
fn strata_betti(f: &DegenerationFiber) -> Result<[Vec<u64>; 3], WeightError> {
    let mut y0 = vec![0u64; 5];
    for c in &f.components {
        let b = c.kind.betti().ok_or(DegenerationError::MissingBetti(c.id))?;
        for (k, v) in [b[0], b[1], b[2], b[1], b[0]].into_iter().enumerate() {
            y0[k] += v;
        }
    }
    let mut y1 = vec![0u64; 3];
    for d in &f.double_curves {
        for (k, v) in d.genus.betti().into_iter().enumerate() {
            y1[k] += v;
        }
    }
    Ok([y0, y1, vec![f.triple_points.len() as u64]])
}

pub fn e1_page(f: &DegenerationFiber) -> Result<E1Page, WeightError> {
    let errs = f.validate();
    if !errs.is_empty() {
        return Err(DegenerationError::Invalid(errs).into());
    }
    let betti = strata_betti(f)?;
    let mut page = E1Page::default();
    for (j, b) in betti.iter().enumerate() {
        for i in 0..=j {
            let p = 2 * i as i64 - j as i64;
            for (k, &rank) in b.iter().enumerate() {
                if rank == 0 {
                    continue;
                }
                let q = k as i64 + 2 * j as i64 - 2 * i as i64;
                page.entries.entry((p, q)).or_default().push(E1Summand { stratum: j, degree: k, twist: p - i as i64, rank });
            }
        }
    }
    Ok(page)
}

/// A bounded complex `M_0 -> M_1 -> ...` of free modules placed at
/// `E1^{p_start + i, q}`; `differentials[i]` maps `M_i` to `M_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralRow {
    pub q: i64,
    pub p_start: i64,
    pub modules: Vec<usize>,
    pub differentials: Vec<IntMatrix>,
}

impl SpectralRow {
    pub fn new(q: i64, p_start: i64, modules: Vec<usize>, differentials: Vec<IntMatrix>) -> Result<Self, WeightError> {
        let row = SpectralRow { q, p_start, modules, differentials };
        row.check()?;
        Ok(row)
    }

    pub fn check(&self) -> Result<(), WeightError> {
        let q = self.q;
        if self.differentials.len() + 1 != self.modules.len().max(1) {
            return Err(WeightError::Shape { q, msg: format!("{} modules need {} differentials", self.modules.len(), self.modules.len().saturating_sub(1)) });
        }
        for (i, d) in self.differentials.iter().enumerate() {
            if d.shape() != (self.modules[i + 1], self.modules[i]) {
                return Err(WeightError::Shape { q, msg: format!("differential {i} is {:?}, expected {:?}", d.shape(), (self.modules[i + 1], self.modules[i])) });
            }
        }
        for i in 1..self.differentials.len() {
            if !self.differentials[i].mul(&self.differentials[i - 1]).expect("shapes chain").is_zero() {
                return Err(WeightError::NotAComplex { q, i: i - 1 });
            }
        }
        Ok(())
    }
}

/// The `q = 0` row (simplicial cochains of the dual complex) and the
/// `q = 4` row (simplicial chains, read from `p = -dim`).
pub fn boundary_rows(f: &DegenerationFiber) -> Result<(SpectralRow, SpectralRow), WeightError> {
    let cl = f.clemens_polytope()?;
    let top = cl.dimension().unwrap_or(0);
    let modules: Vec<usize> = (0..=top).map(|j| cl.count(j)).collect();
    let cochain = SpectralRow::new(0, 0, modules.clone(), (1..=top).map(|j| cl.boundary_matrix(j).transpose()).collect())?;
    let chain = SpectralRow::new(4, -(top as i64), modules.into_iter().rev().collect(), (1..=top).rev().map(|j| cl.boundary_matrix(j)).collect())?;
    Ok((cochain, chain))
}

/// `E2` at one position of a row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionReport {
    pub position: (i64, i64),
    pub betti: usize,
    #[serde(with = "crate::exact_linalg::bigint_strings")]
    pub torsion: Vec<BigInt>,
}

/// Cohomology of every row at every position.
pub fn e2_report(rows: &[SpectralRow]) -> Result<Vec<PositionReport>, WeightError> {
    let mut out = vec![];
    for row in rows {
        row.check()?;
        let factors: Vec<Vec<BigInt>> = row.differentials.iter().map(exact_linalg::invariant_factors).collect();
        let rank = |i: usize| factors[i].iter().filter(|d| !d.is_zero()).count();
        for (i, &n) in row.modules.iter().enumerate() {
            let out_rank = if i < row.differentials.len() { rank(i) } else { 0 };
            let (in_rank, torsion) = if i > 0 {
                (rank(i - 1), factors[i - 1].iter().filter(|d| **d > BigInt::one()).cloned().collect())
            } else {
                (0, vec![])
            };
            out.push(PositionReport { position: (row.p_start + i as i64, row.q), betti: n - out_rank - in_rank, torsion });
        }
    }
    Ok(out)
}

pub fn has_torsion(report: &[PositionReport]) -> bool {
    report.iter().any(|r| !r.torsion.is_empty())
}

/// The `H^1` row of a type II chain of length `m` with `H = Z^h`, plus the
/// maps entering `N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Type2H1Row {
    pub m: usize,
    /// `H^{m-1} -> H^m`.
    pub delta1: IntMatrix,
    /// `H^m -> H^{m-1}`.
    pub delta3: IntMatrix,
    /// Diagonal map `H -> H^m`.
    pub diagonal: IntMatrix,
    /// Summation map `H^m -> H`.
    pub summation: IntMatrix,
    pub n: IntMatrix,
    pub r1: BigInt,
}

pub fn type2_h1_row(m: usize) -> Result<Type2H1Row, WeightError> {
    type2_h1_row_with_rank(m, 2)
}

pub fn type2_h1_row_with_rank(m: usize, h: usize) -> Result<Type2H1Row, WeightError> {
    if m < 1 {
        return Err(WeightError::BadChainLength(m));
    }
    let one = BigInt::one;
    let mut delta1 = IntMatrix::zeros(h * m, h * (m - 1));
    // Input block k (u_{k+1}) lands with +1 in output block k and -1 in block k+1.
    for k in 0..m - 1 {
        for t in 0..h {
            delta1.set(h * k + t, h * k + t, one());
            delta1.set(h * (k + 1) + t, h * k + t, -one());
        }
    }
    let mut delta3 = IntMatrix::zeros(h * (m - 1), h * m);
    // Output block k is u_{k+1} - u_k.
    for k in 0..m - 1 {
        for t in 0..h {
            delta3.set(h * k + t, h * (k + 1) + t, one());
            delta3.set(h * k + t, h * k + t, -one());
        }
    }
    let mut diagonal = IntMatrix::zeros(h * m, h);
    let mut summation = IntMatrix::zeros(h, h * m);
    for k in 0..m {
        for t in 0..h {
            diagonal.set(h * k + t, t, one());
            summation.set(t, h * k + t, one());
        }
    }
    let n = summation.mul(&diagonal).expect("shapes chain");
    let coker = exact_linalg::cokernel_structure(&n);
    let r1 = if coker.free_rank == 0 { coker.torsion_order() } else { BigInt::zero() };
    Ok(Type2H1Row { m, delta1, delta3, diagonal, summation, n, r1 })
}

impl Type2H1Row {
    /// The row `H^{m-1} -> H^m` placed at `E1^{0,1}, E1^{1,1}`.
    pub fn as_row(&self) -> SpectralRow {
        let (rows, cols) = self.delta1.shape();
        SpectralRow::new(1, 0, vec![cols, rows], vec![self.delta1.clone()]).expect("two-term row")
    }
}

/// Gram matrix of the coefficient pairing on `H_2` of the dual complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromyGram {
    pub basis: Vec<CycleVector>,
    pub gram: IntMatrix,
    pub r_d: BigRational,
}

impl MonodromyGram {
    /// Sylvester's criterion on the leading principal minors.
    pub fn is_positive_definite(&self) -> bool {
        let k = self.gram.rows();
        (1..=k).all(|s| {
            let mut minor = IntMatrix::zeros(s, s);
            for i in 0..s {
                for j in 0..s {
                    minor.set(i, j, self.gram.get(i, j).clone());
                }
            }
            minor.determinant().expect("square").is_positive()
        })
    }
}

/// `r_2` as the determinant of `[Σ_v a_v b_v]` over a basis of `H_2` of the
/// dual complex. Surfaces have no 3-simplices, so `H_2` is the kernel of
/// the top boundary and is free.
pub fn monodromy_gram(f: &DegenerationFiber) -> Result<MonodromyGram, WeightError> {
    let cl = f.clemens_polytope()?;
    let kernel = exact_linalg::kernel_basis(&cl.boundary_matrix(2));
    if kernel.cols() == 0 {
        return Err(WeightError::NotMaximal);
    }
    let vectors = kernel.columns();
    let n = cl.count(2);
    let gram = exact_linalg::gram_matrix(&vectors, &IntMatrix::identity(n)).expect("kernel vectors have length n");
    let r_d = BigRational::from_integer(gram.determinant().expect("square"));
    let basis = vectors.into_iter().map(|coefficients| CycleVector { dim: 2, coefficients }).collect();
    Ok(MonodromyGram { basis, gram, r_d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::standard;
    use crate::degeneration::{ComponentData, ComponentKind, CurveGenus, DoubleCurve, TriplePoint};

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Fiber whose dual complex is the given simplicial surface.
    fn sphere_fiber(ds: &crate::complexes::DeltaSet, a: u64) -> DegenerationFiber {
        DegenerationFiber {
            label: "s".into(),
            components: (0..ds.count(0) as u64).map(|id| ComponentData { id, kind: ComponentKind::Rational { a } }).collect(),
            double_curves: (0..ds.count(1))
                .map(|e| DoubleCurve { id: e as u64, on: [ds.face(1, e, 1) as u64, ds.face(1, e, 0) as u64], genus: CurveGenus::Rational, self_intersections: None })
                .collect(),
            triple_points: (0..ds.count(2)).map(|t| TriplePoint { id: t as u64, on: [0, 1, 2].map(|j| ds.face(2, t, j) as u64) }).collect(),
        }
    }

    fn chain(m: u64) -> DegenerationFiber {
        let components = (0..=m)
            .map(|i| {
                let kind = if i == 0 || i == m {
                    ComponentKind::Rational { a: 10 }
                } else {
                    ComponentKind::RuledElliptic { curve: "E".into(), a: 0 }
                };
                ComponentData { id: i, kind }
            })
            .collect();
        let double_curves =
            (0..m).map(|i| DoubleCurve { id: i, on: [i, i + 1], genus: CurveGenus::Elliptic("E".into()), self_intersections: None }).collect();
        DegenerationFiber { label: "chain".into(), components, double_curves, triple_points: vec![] }
    }

    #[test]
    fn e1_ranks() {
        let page = e1_page(&chain(2)).unwrap();
        assert_eq!(page.rank(0, 1), 2);
        // H^0 of the three components and of the two curves.
        assert_eq!(page.rank(0, 0), 3);
        assert_eq!(page.rank(1, 0), 2);
        assert_eq!(page.alternating_sum(), 24);
        let tetra = sphere_fiber(&standard::tetrahedron_boundary(), 7);
        let page = e1_page(&tetra).unwrap();
        assert_eq!(page.rank(-2, 4), 4);
        assert_eq!(page.rank(2, 0), 4);
        assert_eq!(page.alternating_sum(), 24);
        let smooth = DegenerationFiber { label: "k3".into(), components: vec![ComponentData { id: 0, kind: ComponentKind::K3Smooth }], double_curves: vec![], triple_points: vec![] };
        let page = e1_page(&smooth).unwrap();
        assert!(page.entries.keys().all(|&(p, _)| p == 0));
        assert_eq!((0..=4).map(|q| page.rank(0, q)).collect::<Vec<_>>(), vec![1, 0, 22, 0, 1]);
        assert!(page.entries.keys().all(|&(p, q)| p.abs() <= 2 && (0..=4).contains(&q)));
    }

    #[test]
    fn missing_betti() {
        let mut f = chain(1);
        f.components[0].kind = ComponentKind::Other { class: crate::motive_ring::MotiveClass::one(), betti: None };
        assert_eq!(e1_page(&f), Err(WeightError::Fiber(DegenerationError::MissingBetti(0))));
    }

    #[test]
    fn boundary_row_cohomology() {
        let (co, ch) = boundary_rows(&sphere_fiber(&standard::tetrahedron_boundary(), 7)).unwrap();
        assert_eq!(co.modules, vec![4, 6, 4]);
        let r = e2_report(&[co]).unwrap();
        assert_eq!(r.iter().map(|x| x.betti).collect::<Vec<_>>(), vec![1, 0, 1]);
        assert!(!has_torsion(&r));
        let r = e2_report(&[ch]).unwrap();
        assert_eq!(r.iter().map(|x| (x.position, x.betti)).collect::<Vec<_>>(), vec![((-2, 4), 1), ((-1, 4), 0), ((0, 4), 1)]);
        for m in 1..5 {
            let (co, _) = boundary_rows(&chain(m)).unwrap();
            assert_eq!(co.modules, vec![m as usize + 1, m as usize]);
            let r = e2_report(&[co]).unwrap();
            assert_eq!(r.iter().map(|x| x.betti).collect::<Vec<_>>(), vec![1, 0]);
        }
        let smooth = DegenerationFiber { label: "k3".into(), components: vec![ComponentData { id: 0, kind: ComponentKind::K3Smooth }], double_curves: vec![], triple_points: vec![] };
        let (co, _) = boundary_rows(&smooth).unwrap();
        assert_eq!(co.modules, vec![1]);
        assert_eq!(e2_report(&[co]).unwrap()[0].betti, 1);
    }

    #[test]
    fn torsion_flagged() {
        let row = SpectralRow::new(2, 0, vec![1, 1], vec![IntMatrix::from_rows(&[vec![2]])]).unwrap();
        let r = e2_report(&[row]).unwrap();
        assert_eq!(r[1].torsion, vec![big(2)]);
        assert!(has_torsion(&r));
        assert!(SpectralRow::new(2, 0, vec![1, 2], vec![IntMatrix::from_rows(&[vec![2]])]).is_err());
        let d = IntMatrix::from_rows(&[vec![1]]);
        assert!(matches!(SpectralRow::new(2, 0, vec![1, 1, 1], vec![d.clone(), d]), Err(WeightError::NotAComplex { .. })));
    }

    #[test]
    fn type2_row() {
        let row = type2_h1_row(3).unwrap();
        assert_eq!(row.n, IntMatrix::from_rows(&[vec![3, 0], vec![0, 3]]));
        assert_eq!(row.r1, big(9));
        let row = type2_h1_row(1).unwrap();
        assert_eq!(row.delta1.shape(), (2, 0));
        assert_eq!(row.n, IntMatrix::identity(2));
        assert_eq!(row.r1, big(1));
        let row = type2_h1_row(2).unwrap();
        assert_eq!(row.delta1.shape(), (4, 2));
        let coker = exact_linalg::cokernel_structure(&row.delta1);
        assert_eq!((coker.free_rank, coker.is_torsion_free()), (2, true));
        let r = e2_report(&[row.as_row()]).unwrap();
        assert_eq!(r[1].betti, 2);
        assert!(!has_torsion(&r));
        assert_eq!(type2_h1_row(0), Err(WeightError::BadChainLength(0)));
    }

    #[test]
    fn type2_row_formula() {
        // δ1(u1, u2) = (u1, u2 - u1, -u2) with H = Z.
        let row = type2_h1_row_with_rank(3, 1).unwrap();
        assert_eq!(row.delta1, IntMatrix::from_rows(&[vec![1, 0], vec![-1, 1], vec![0, -1]]));
        assert_eq!(row.delta3, IntMatrix::from_rows(&[vec![-1, 1, 0], vec![0, -1, 1]]));
        for m in 1..=50 {
            let row = type2_h1_row(m).unwrap();
            assert_eq!(row.r1, big((m * m) as i64));
            assert_eq!(row.n, IntMatrix::diagonal(2, 2, &[big(m as i64), big(m as i64)]));
            assert!(row.summation.mul(&row.delta1).unwrap().is_zero());
            assert!(row.delta3.mul(&row.diagonal).unwrap().is_zero());
        }
    }

    #[test]
    fn gram_on_spheres() {
        for (ds, faces) in [(standard::octahedron(), 8), (standard::tetrahedron_boundary(), 4), (standard::icosahedron(), 20)] {
            let g = monodromy_gram(&sphere_fiber(&ds, 0)).unwrap();
            assert_eq!(g.gram, IntMatrix::from_rows(&[vec![faces]]));
            assert_eq!(g.r_d, BigRational::from_integer(big(faces)));
            assert!(g.is_positive_definite());
        }
        assert_eq!(monodromy_gram(&chain(2)), Err(WeightError::NotMaximal));
    }
}
