//! Standard fibers: type II chains, type III spheres and Kummer quotients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::standard::{self, TorusGrid};
use crate::complexes::{self, ComplexError, DeltaSet, HomotopyType};
use crate::degeneration::{ComponentData, ComponentKind, CurveGenus, DegenerationFiber, DoubleCurve, TriplePoint, WeakNeronData};
use crate::exact_linalg::IntMatrix;
use crate::motive_ring::MotiveClass;
use crate::motivic_integral;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("chain length must be at least 1")]
    ChainTooShort,
    #[error("a-profile has {got} entries, expected {expected}")]
    ProfileLength { expected: usize, got: usize },
    #[error("a-profile sums to {got}, expected {expected}")]
    ProfileSum { expected: u64, got: u64 },
    #[error("triangulation is not a 2-sphere")]
    NotSphere,
    #[error("triangulation has a triangle or edge with repeated vertices")]
    NotSimplicial,
    #[error("Kummer parameters must be even and at least 2, got ({0}, {1})")]
    BadKummer(usize, usize),
    #[error("internal invariant failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn check_profile(profile: &[u64], expected_len: usize, expected_sum: u64) -> Result<(), BuildError> {
    if profile.len() != expected_len {
        return Err(BuildError::ProfileLength { expected: expected_len, got: profile.len() });
    }
    let sum: u64 = profile.iter().sum();
    if sum != expected_sum {
        return Err(BuildError::ProfileSum { expected: expected_sum, got: sum });
    }
    Ok(())
}

/// `V_0, ..., V_m` with rational ends, elliptic ruled middles over `E`, and
/// the `m` elliptic double curves `V_i ∩ V_{i+1}`. The profile sums to 20.
pub fn build_type2_chain(m: usize, a_profile: Option<&[u64]>) -> Result<DegenerationFiber, BuildError> {
    if m < 1 {
        return Err(BuildError::ChainTooShort);
    }
    let profile: Vec<u64> = match a_profile {
        Some(p) => {
            check_profile(p, m + 1, 20)?;
            p.to_vec()
        }
        None => (0..=m).map(|i| if i == 0 || i == m { 10 } else { 0 }).collect(),
    };
    let components = (0..=m)
        .map(|i| {
            let a = profile[i];
            let kind = if i == 0 || i == m {
                ComponentKind::Rational { a }
            } else {
                ComponentKind::RuledElliptic { curve: "E".into(), a }
            };
            ComponentData { id: i as u64, kind }
        })
        .collect();
    let double_curves = (0..m as u64)
        .map(|i| DoubleCurve { id: i, on: [i, i + 1], genus: CurveGenus::Elliptic("E".into()), self_intersections: None })
        .collect();
    Ok(DegenerationFiber { label: format!("type2-m{m}"), components, double_curves, triple_points: vec![] })
}

/// Built-in or user-supplied sphere triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triangulation {
    Tetrahedron,
    Octahedron,
    Icosahedron,
    Custom(DeltaSet),
}

impl Triangulation {
    pub fn complex(&self) -> DeltaSet {
        match self {
            Triangulation::Tetrahedron => standard::tetrahedron_boundary(),
            Triangulation::Octahedron => standard::octahedron(),
            Triangulation::Icosahedron => standard::icosahedron(),
            Triangulation::Custom(ds) => ds.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Triangulation::Tetrahedron => "tetrahedron",
            Triangulation::Octahedron => "octahedron",
            Triangulation::Icosahedron => "icosahedron",
            Triangulation::Custom(_) => "custom",
        }
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "tetrahedron" => Some(Triangulation::Tetrahedron),
            "octahedron" => Some(Triangulation::Octahedron),
            "icosahedron" => Some(Triangulation::Icosahedron),
            _ => None,
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TriangulationFile {
    Faces { faces: Vec<[usize; 3]> },
    Delta(DeltaSet),
}

/// Reads `{"faces": [[a,b,c], ...]}` or a Δ-set document.
pub fn parse_triangulation(text: &str) -> Result<DeltaSet, String> {
    match serde_json::from_str::<TriangulationFile>(text).map_err(|e| format!("unreadable triangulation: {e}"))? {
        TriangulationFile::Faces { faces } => {
            let n = faces.iter().flatten().max().map_or(0, |m| m + 1);
            standard::from_triangles(n, &faces).map_err(|e| e.to_string())
        }
        TriangulationFile::Delta(ds) => Ok(ds),
    }
}

fn is_simplicial_surface(ds: &DeltaSet) -> bool {
    let edges_ok = (0..ds.count(1)).all(|e| ds.face(1, e, 0) != ds.face(1, e, 1));
    let tris_ok = (0..ds.count(2)).all(|t| {
        let mut v = ds.vertices(2, t);
        v.sort_unstable();
        v.dedup();
        v.len() == 3
    });
    edges_ok && tris_ok
}

/// Default profile: `20 + 2F` spread as evenly as integers allow, extra
/// units on the first components.
pub fn default_type3_profile(vertices: usize, faces: usize) -> Vec<u64> {
    let total = 20 + 2 * faces as u64;
    let n = vertices as u64;
    (0..n).map(|i| total / n + u64::from(i < total % n)).collect()
}

/// Rational components on the vertices, rational double curves on the edges
/// and triple points on the triangles.
pub fn build_type3(tri: &DeltaSet, a_profile: Option<&[u64]>) -> Result<DegenerationFiber, BuildError> {
    if tri.recognize() != HomotopyType::Sphere2 {
        return Err(BuildError::NotSphere);
    }
    if !is_simplicial_surface(tri) {
        return Err(BuildError::NotSimplicial);
    }
    let (v, f) = (tri.count(0), tri.count(2));
    let profile = match a_profile {
        Some(p) => {
            check_profile(p, v, 20 + 2 * f as u64)?;
            p.to_vec()
        }
        None => default_type3_profile(v, f),
    };
    let components = (0..v).map(|i| ComponentData { id: i as u64, kind: ComponentKind::Rational { a: profile[i] } }).collect();
    let double_curves = (0..tri.count(1))
        .map(|e| DoubleCurve {
            id: e as u64,
            on: [tri.face(1, e, 1) as u64, tri.face(1, e, 0) as u64],
            genus: CurveGenus::Rational,
            self_intersections: None,
        })
        .collect();
    let triple_points = (0..f).map(|t| TriplePoint { id: t as u64, on: [0, 1, 2].map(|j| tri.face(2, t, j) as u64) }).collect();
    Ok(DegenerationFiber { label: format!("type3-f{f}"), components, double_curves, triple_points })
}

pub fn refine_sphere(tri: &DeltaSet, steps: usize) -> Result<DeltaSet, BuildError> {
    if tri.recognize() != HomotopyType::Sphere2 {
        return Err(BuildError::NotSphere);
    }
    let mut out = tri.clone();
    for _ in 0..steps {
        out = out.refine_barycentric();
    }
    Ok(out)
}

/// Stellar subdivision of the listed triangles of a simplicial surface: each
/// gets a new central vertex joined to its corners.
pub fn stellar_subdivide(tri: &DeltaSet, faces: &[usize]) -> Result<DeltaSet, BuildError> {
    if !is_simplicial_surface(tri) {
        return Err(BuildError::NotSimplicial);
    }
    let mut n = tri.count(0);
    let mut triples = vec![];
    for (t, [a, b, c]) in tri.vertex_triples().into_iter().enumerate() {
        if faces.contains(&t) {
            triples.extend([[a, b, n], [a, c, n], [b, c, n]]);
            n += 1;
        } else {
            triples.push([a, b, c]);
        }
    }
    Ok(standard::from_triangles(n, &triples)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KummerParams {
    pub m1: usize,
    pub m2: usize,
}

impl KummerParams {
    pub fn validate(&self) -> Result<(), BuildError> {
        if self.m1 < 2 || self.m2 < 2 || self.m1 % 2 == 1 || self.m2 % 2 == 1 {
            return Err(BuildError::BadKummer(self.m1, self.m2));
        }
        Ok(())
    }

    /// `|C| = m1 m2`.
    pub fn component_group_order(&self) -> usize {
        self.m1 * self.m2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCensus {
    pub generic: usize,
    pub special: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KummerReport {
    pub params: KummerParams,
    /// Carrier of the quotient combinatorics; components hold the classes of
    /// their open parts.
    pub fiber: DegenerationFiber,
    pub nerve: DeltaSet,
    pub component_census: ComponentCensus,
    pub lattice_pairing: BigRational,
    pub r2_abelian: BigInt,
    pub r2_kummer: BigInt,
    pub integral: MotiveClass,
    /// `Σ b^2` over the generator of `H_2` of the grid quotient.
    pub grid_coefficient_sum: BigInt,
}

/// Class of a generic component, `G_m x G_m`.
pub fn kummer_generic_class() -> MotiveClass {
    MotiveClass::tate_polynomial(&[1, -2, 1])
}

/// Class of a component over a fixed point of the inversion.
pub fn kummer_special_class() -> MotiveClass {
    MotiveClass::tate_polynomial(&[1, 4, 1])
}

/// Monodromy pairing on `⋀^2 Λ*` for the valuation matrix `diag(m1, m2)`:
/// `N^2(u1 ∧ u2) = 2 N(u1) ∧ N(u2) = 2 det(ρ) v1* ∧ v2*`, so the generator
/// pairs to `1 / (2 det ρ)`.
pub fn kummer_lattice_pairing(p: &KummerParams) -> Result<BigRational, BuildError> {
    p.validate()?;
    let rho = IntMatrix::diagonal(2, 2, &[BigInt::from(p.m1), BigInt::from(p.m2)]);
    let det = rho.determinant().expect("square");
    Ok(BigRational::new(BigInt::one(), 2 * det))
}

/// `(r_2(A), r_2(X))`: the discriminant of the dual pairing on the abelian
/// surface, and half of it for the Kummer surface (the quotient map has
/// degree 2).
pub fn kummer_r2_abelian(p: &KummerParams) -> Result<(BigInt, BigInt), BuildError> {
    let pairing = kummer_lattice_pairing(p)?;
    let dual = pairing.recip();
    if !dual.is_integer() {
        return Err(BuildError::Internal(format!("dual pairing {dual} is not integral")));
    }
    let r2_a = dual.to_integer();
    let two = BigInt::from(2);
    if !(&r2_a % &two).is_zero() {
        return Err(BuildError::Internal(format!("r_2(A) = {r2_a} is odd")));
    }
    let r2_x = &r2_a / two;
    Ok((r2_a, r2_x))
}

pub fn build_kummer(p: KummerParams) -> Result<KummerReport, BuildError> {
    p.validate()?;
    let grid = TorusGrid { m1: p.m1, m2: p.m2 };
    let torus = grid.complex();
    let sigma = grid.negation();
    let (nerve, map) = complexes::quotient_by_involution(&torus, &sigma)?;
    if nerve.recognize() != HomotopyType::Sphere2 {
        return Err(BuildError::Internal("torus quotient is not a 2-sphere".into()));
    }
    let fixed = (0..torus.count(0)).filter(|&v| sigma.maps[0][v] == v).map(|v| map.orbit[0][v]).collect::<Vec<_>>();
    let classes: Vec<MotiveClass> =
        (0..nerve.count(0)).map(|o| if fixed.contains(&o) { kummer_special_class() } else { kummer_generic_class() }).collect();
    let census = ComponentCensus { special: fixed.len(), generic: nerve.count(0) - fixed.len() };
    let integral = motivic_integral::integral_from_neron(&WeakNeronData::reduced(classes.clone()).expect("at least one component"));

    let components = classes
        .into_iter()
        .enumerate()
        .map(|(i, class)| ComponentData { id: i as u64, kind: ComponentKind::Other { class, betti: None } })
        .collect();
    let double_curves = (0..nerve.count(1))
        .map(|e| DoubleCurve { id: e as u64, on: [nerve.face(1, e, 1) as u64, nerve.face(1, e, 0) as u64], genus: CurveGenus::Rational, self_intersections: None })
        .collect();
    let triple_points = (0..nerve.count(2)).map(|t| TriplePoint { id: t as u64, on: [0, 1, 2].map(|j| nerve.face(2, t, j) as u64) }).collect();
    let fiber = DegenerationFiber { label: format!("kummer-{}x{}", p.m1, p.m2), components, double_curves, triple_points };

    let generator = nerve.top_cycle_generator(2)?;
    let grid_coefficient_sum = complexes::cycle_pairing(&generator, &generator)?;
    let lattice_pairing = kummer_lattice_pairing(&p)?;
    let (r2_abelian, r2_kummer) = kummer_r2_abelian(&p)?;
    Ok(KummerReport { params: p, fiber, nerve, component_census: census, lattice_pairing, r2_abelian, r2_kummer, integral, grid_coefficient_sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motivic_integral::{integral_kulikov, theorem1_closed_form, RamifiedParams};

    fn tate(c: &[i64]) -> MotiveClass {
        MotiveClass::tate_polynomial(c)
    }

    #[test]
    fn chains() {
        let f = build_type2_chain(2, None).unwrap();
        assert_eq!((f.components.len(), f.double_curves.len()), (3, 2));
        assert_eq!(f.clemens_polytope().unwrap().recognize(), HomotopyType::Interval);
        let f = build_type2_chain(1, None).unwrap();
        assert_eq!(f.components.len(), 2);
        assert!(f.components.iter().all(|c| matches!(c.kind, ComponentKind::Rational { a: 10 })));
        let f = build_type2_chain(4, Some(&[5, 2, 3, 4, 6])).unwrap();
        assert_eq!(integral_kulikov(&f).unwrap(), theorem1_closed_form(&RamifiedParams::type2(1, 16, "E")).unwrap());
        assert_eq!(build_type2_chain(2, Some(&[1, 2, 3])), Err(BuildError::ProfileSum { expected: 20, got: 6 }));
        assert!(build_type2_chain(0, None).is_err());
    }

    #[test]
    fn spheres() {
        let f = build_type3(&standard::tetrahedron_boundary(), None).unwrap();
        assert_eq!((f.components.len(), f.double_curves.len(), f.triple_points.len()), (4, 6, 4));
        let f = build_type3(&standard::octahedron(), None).unwrap();
        let sum: u64 = f.components.iter().map(|c| if let ComponentKind::Rational { a } = c.kind { a } else { 0 }).sum();
        assert_eq!(sum, 36);
        let f = build_type3(&standard::icosahedron(), None).unwrap();
        assert_eq!(f.triple_points.len(), 20);
        assert_eq!(integral_kulikov(&f).unwrap().coeff(&crate::motive_ring::Atom::Point, 1), BigInt::zero());
        assert_eq!(build_type3(&standard::torus_grid(3, 3), None), Err(BuildError::NotSphere));
        assert!(matches!(build_type3(&standard::tetrahedron_boundary(), Some(&[7, 7, 7, 7, 0])), Err(BuildError::ProfileLength { .. })));
        assert!(matches!(build_type3(&standard::tetrahedron_boundary(), Some(&[7, 7, 7, 8])), Err(BuildError::ProfileSum { .. })));
        assert_eq!(default_type3_profile(6, 8), vec![6; 6]);
        assert_eq!(default_type3_profile(4, 4).iter().sum::<u64>(), 28);
    }

    #[test]
    fn refinements() {
        let t = refine_sphere(&standard::tetrahedron_boundary(), 1).unwrap();
        assert_eq!(t.count(2), 24);
        assert_eq!(t.recognize(), HomotopyType::Sphere2);
        assert_eq!(refine_sphere(&standard::octahedron(), 0).unwrap(), standard::octahedron());
        let o = refine_sphere(&standard::octahedron(), 1).unwrap();
        assert_eq!(o.count(2), 48);
        let g = o.top_cycle_generator(2).unwrap();
        assert!(g.coefficients.iter().all(|c| c == &BigInt::one() || c == &-BigInt::one()));
        assert!(refine_sphere(&standard::torus_grid(2, 2), 1).is_err());
        let s = stellar_subdivide(&standard::octahedron(), &[0, 3]).unwrap();
        assert_eq!(s.counts(), vec![8, 18, 12]);
        assert_eq!(s.recognize(), HomotopyType::Sphere2);
    }

    #[test]
    fn triangulation_files() {
        let ds = parse_triangulation(r#"{"faces":[[0,1,2],[0,1,3],[0,2,3],[1,2,3]]}"#).unwrap();
        assert_eq!(ds, standard::tetrahedron_boundary());
        let text = serde_json::to_string(&standard::octahedron()).unwrap();
        assert_eq!(parse_triangulation(&text).unwrap(), standard::octahedron());
        assert!(parse_triangulation("{}").is_err());
    }

    #[test]
    fn kummer_small() {
        let r = build_kummer(KummerParams { m1: 2, m2: 2 }).unwrap();
        assert_eq!(r.component_census, ComponentCensus { generic: 0, special: 4 });
        assert_eq!(r.integral, tate(&[4, 16, 4]));
        assert_eq!(r.integral, theorem1_closed_form(&RamifiedParams::type3(1, 4)).unwrap());
        let r = build_kummer(KummerParams { m1: 2, m2: 4 }).unwrap();
        assert_eq!(r.component_census, ComponentCensus { generic: 2, special: 4 });
        assert_eq!(r.integral, tate(&[6, 12, 6]));
        let r = build_kummer(KummerParams { m1: 4, m2: 4 }).unwrap();
        assert_eq!(r.nerve.euler_characteristic(), 2);
        assert_eq!(r.r2_kummer, BigInt::from(16));
        assert_eq!(r.grid_coefficient_sum, BigInt::from(16));
        assert!(r.fiber.validate().is_empty());
        assert_eq!(build_kummer(KummerParams { m1: 3, m2: 2 }).unwrap_err(), BuildError::BadKummer(3, 2));
    }

    #[test]
    fn kummer_lattice() {
        let r = |m1, m2| kummer_r2_abelian(&KummerParams { m1, m2 }).unwrap();
        assert_eq!(r(2, 2), (BigInt::from(8), BigInt::from(4)));
        assert_eq!(r(2, 4), (BigInt::from(16), BigInt::from(8)));
        assert_eq!(r(6, 6), (BigInt::from(72), BigInt::from(36)));
        assert_eq!(RamifiedParams::type3(1, 36).warnings().len(), 1);
        assert_eq!(kummer_lattice_pairing(&KummerParams { m1: 2, m2: 4 }).unwrap(), BigRational::new(1.into(), 16.into()));
    }

    #[test]
    fn special_class_oracle() {
        use crate::motive_ring::EPolynomial;
        // Compactly supported cohomology of G_m as (p, q, degree, inversion sign):
        // H^1_c of type (0,0) is negated, H^2_c of type (1,1) is fixed.
        let gm = [(0i64, 0i64, 1i64, -1i64), (1, 1, 2, 1)];
        let mut invariant = EPolynomial::zero();
        for a in gm {
            for b in gm {
                if a.3 * b.3 == 1 {
                    let sign = if (a.2 + b.2) % 2 == 0 { 1 } else { -1 };
                    invariant = &invariant + &EPolynomial::monomial(a.0 + b.0, a.1 + b.1, sign);
                }
            }
        }
        // Resolving the four A_1 points replaces each point by a P^1.
        let p1_minus_point = EPolynomial::monomial(1, 1, 1);
        let resolved = &invariant + &p1_minus_point.scale(&BigInt::from(4));
        assert_eq!(kummer_special_class().e_polynomial().unwrap(), resolved);
        assert_eq!(resolved.eval_at_one(), BigInt::from(6));
        let gm_class = EPolynomial::from_terms(&[(1, 1, 1), (0, 0, -1)]);
        assert_eq!(kummer_generic_class().e_polynomial().unwrap(), gm_class.mul(&gm_class));
    }
}
