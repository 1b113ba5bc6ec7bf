//! Special fibers of semi-stable surface degenerations: components, double
//! curves and triple points, with their strata classes and dual complex.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complexes::{DeltaSet, HomotopyType};
use crate::motive_ring::{Atom, EPolynomial, MotiveClass};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    /// Rational surface with class `1 + aL + L^2`.
    Rational { a: u64 },
    /// Blown-up elliptic ruled surface with class `[E](1 + L) + aL`.
    RuledElliptic { curve: String, a: u64 },
    K3Smooth,
    /// Anything else, with optional Betti numbers `(b0, b1, b2)`.
    Other { class: MotiveClass, betti: Option<[u64; 3]> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentData {
    pub id: u64,
    pub kind: ComponentKind,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurveGenus {
    Rational,
    Elliptic(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCurve {
    pub id: u64,
    pub on: [u64; 2],
    pub genus: CurveGenus,
    /// Self-intersection numbers in the two components, if recorded.
    pub self_intersections: Option<[i64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplePoint {
    pub id: u64,
    /// Ids of the three double curves through the point.
    pub on: [u64; 3],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegenerationFiber {
    pub label: String,
    pub components: Vec<ComponentData>,
    pub double_curves: Vec<DoubleCurve>,
    pub triple_points: Vec<TriplePoint>,
}

/// Components of a weak Néron model with the multiplicities `m_i` of the
/// gauge form along them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakNeronData {
    items: Vec<(MotiveClass, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateId { kind: &'static str, id: u64 },
    UnknownComponent { curve: u64, component: u64 },
    SelfIntersecting { curve: u64, component: u64 },
    UnnamedEllipticCurve { curve: u64 },
    UnknownCurve { point: u64, curve: u64 },
    RepeatedCurve { point: u64 },
    NotPairwiseAdjacent { point: u64 },
    BettiMismatch { component: u64, declared: [u64; 3], computed: [i64; 3] },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { kind, id } => write!(f, "duplicate {kind} id {id}"),
            Violation::UnknownComponent { curve, component } => write!(f, "double curve {curve} lies on unknown component {component}"),
            Violation::SelfIntersecting { curve, component } => {
                write!(f, "self-intersecting double curve {curve} on component {component}")
            }
            Violation::UnnamedEllipticCurve { curve } => write!(f, "elliptic double curve {curve} has an empty curve name"),
            Violation::UnknownCurve { point, curve } => write!(f, "triple point {point} lies on unknown double curve {curve}"),
            Violation::RepeatedCurve { point } => write!(f, "triple point {point} repeats a double curve"),
            Violation::NotPairwiseAdjacent { point } => {
                write!(f, "triple point {point}: double curves do not pairwise meet in one component across three components")
            }
            Violation::BettiMismatch { component, declared, computed } => {
                write!(f, "component {component}: declared Betti numbers {declared:?} disagree with class ({computed:?})")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DegenerationError {
    #[error("invalid fiber: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("not a Kulikov fiber: {0}")]
    NotKulikov(String),
    #[error("component {0} has no Betti data")]
    MissingBetti(u64),
    #[error("weak Néron data must be nonempty")]
    EmptyNeronData,
}

fn k3_e_polynomial() -> EPolynomial {
    EPolynomial::from_terms(&[(0, 0, 1), (2, 0, 1), (1, 1, 20), (0, 2, 1), (2, 2, 1)])
}

impl ComponentKind {
    pub fn class(&self) -> MotiveClass {
        match self {
            ComponentKind::Rational { a } => MotiveClass::tate_polynomial(&[1, *a as i64, 1]),
            ComponentKind::RuledElliptic { curve, a } => {
                let e = MotiveClass::elliptic(curve);
                &(&e + &e.tate_twist(-1)) + &MotiveClass::lefschetz(1).scale(*a)
            }
            ComponentKind::K3Smooth => MotiveClass::of_atom(Atom::opaque("K3", Some(k3_e_polynomial()))),
            ComponentKind::Other { class, .. } => class.clone(),
        }
    }

    /// `(b0, b1, b2)`; `b3 = b1` and `b4 = b0` for these compact surfaces.
    pub fn betti(&self) -> Option<[u64; 3]> {
        match self {
            ComponentKind::Rational { a } => Some([1, 0, *a]),
            ComponentKind::RuledElliptic { a, .. } => Some([1, 2, 2 + a]),
            ComponentKind::K3Smooth => Some([1, 0, 22]),
            ComponentKind::Other { betti, .. } => *betti,
        }
    }
}

impl CurveGenus {
    pub fn class(&self) -> MotiveClass {
        match self {
            CurveGenus::Rational => MotiveClass::projective_line(),
            CurveGenus::Elliptic(name) => MotiveClass::elliptic(name),
        }
    }

    /// `(b0, b1, b2)`.
    pub fn betti(&self) -> [u64; 3] {
        match self {
            CurveGenus::Rational => [1, 0, 1],
            CurveGenus::Elliptic(_) => [1, 2, 1],
        }
    }
}

impl WeakNeronData {
    pub fn new(items: Vec<(MotiveClass, i64)>) -> Result<Self, DegenerationError> {
        if items.is_empty() {
            return Err(DegenerationError::EmptyNeronData);
        }
        Ok(WeakNeronData { items })
    }

    pub fn items(&self) -> &[(MotiveClass, i64)] {
        &self.items
    }

    /// Every component with multiplicity zero, as for a Kulikov model.
    pub fn reduced(classes: Vec<MotiveClass>) -> Result<Self, DegenerationError> {
        Self::new(classes.into_iter().map(|c| (c, 0)).collect())
    }
}

/// Strata classes `[Y^(0)], [Y^(1)], [Y^(2)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrataClasses {
    pub y0: MotiveClass,
    pub y1: MotiveClass,
    pub y2: MotiveClass,
}

impl StrataClasses {
    pub fn as_array(&self) -> [&MotiveClass; 3] {
        [&self.y0, &self.y1, &self.y2]
    }
}

impl DegenerationFiber {
    pub fn component(&self, id: u64) -> Option<&ComponentData> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn curve(&self, id: u64) -> Option<&DoubleCurve> {
        self.double_curves.iter().find(|c| c.id == id)
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = vec![];
        let mut seen = BTreeSet::new();
        for c in &self.components {
            if !seen.insert(c.id) {
                out.push(Violation::DuplicateId { kind: "component", id: c.id });
            }
            if let ComponentKind::Other { class, betti: Some(declared) } = &c.kind {
                if let Ok(e) = class.e_polynomial() {
                    let b = e.betti_numbers();
                    let get = |k: i64| b.get(&k).cloned().unwrap_or_default();
                    let to_i64 = |x: BigInt| i64::try_from(x).unwrap_or(i64::MAX);
                    let computed = [to_i64(get(0)), to_i64(get(1)), to_i64(get(2))];
                    if computed.iter().zip(declared).any(|(c, d)| *c != *d as i64) {
                        out.push(Violation::BettiMismatch { component: c.id, declared: *declared, computed });
                    }
                }
            }
        }
        let components: BTreeSet<u64> = self.components.iter().map(|c| c.id).collect();
        let mut seen = BTreeSet::new();
        for d in &self.double_curves {
            if !seen.insert(d.id) {
                out.push(Violation::DuplicateId { kind: "double curve", id: d.id });
            }
            for &c in &d.on {
                if !components.contains(&c) {
                    out.push(Violation::UnknownComponent { curve: d.id, component: c });
                }
            }
            if d.on[0] == d.on[1] {
                out.push(Violation::SelfIntersecting { curve: d.id, component: d.on[0] });
            }
            if matches!(&d.genus, CurveGenus::Elliptic(n) if n.is_empty()) {
                out.push(Violation::UnnamedEllipticCurve { curve: d.id });
            }
        }
        let mut seen = BTreeSet::new();
        for t in &self.triple_points {
            if !seen.insert(t.id) {
                out.push(Violation::DuplicateId { kind: "triple point", id: t.id });
            }
            let curves: Vec<Option<&DoubleCurve>> = t.on.iter().map(|&c| self.curve(c)).collect();
            let mut missing = false;
            for (&id, c) in t.on.iter().zip(&curves) {
                if c.is_none() {
                    missing = true;
                    out.push(Violation::UnknownCurve { point: t.id, curve: id });
                }
            }
            if missing {
                continue;
            }
            if t.on[0] == t.on[1] || t.on[0] == t.on[2] || t.on[1] == t.on[2] {
                out.push(Violation::RepeatedCurve { point: t.id });
                continue;
            }
            let pairs: Vec<BTreeSet<u64>> = curves.iter().map(|c| c.unwrap().on.iter().copied().collect()).collect();
            let union: BTreeSet<u64> = pairs.iter().flatten().copied().collect();
            let pairwise = (0..3).all(|i| (i + 1..3).all(|j| pairs[i].intersection(&pairs[j]).count() == 1));
            if union.len() != 3 || !pairwise || pairs.iter().any(|p| p.len() != 2) {
                out.push(Violation::NotPairwiseAdjacent { point: t.id });
            }
        }
        out
    }

    fn ensure_valid(&self) -> Result<(), DegenerationError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(DegenerationError::Invalid(v))
        }
    }

    /// Position of each component id in increasing id order.
    fn component_index(&self) -> BTreeMap<u64, usize> {
        let mut ids: Vec<u64> = self.components.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        ids.into_iter().enumerate().map(|(i, id)| (id, i)).collect()
    }

    /// Dual complex: vertices are components and edges double curves, both
    /// in increasing id order, triangles are triple points; edge faces run
    /// from the larger component id to the smaller.
    pub fn clemens_polytope(&self) -> Result<DeltaSet, DegenerationError> {
        self.ensure_valid()?;
        let vidx = self.component_index();
        let mut curves: Vec<&DoubleCurve> = self.double_curves.iter().collect();
        curves.sort_by_key(|c| c.id);
        let eidx: BTreeMap<u64, usize> = curves.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
        let edges = curves
            .iter()
            .map(|c| {
                let (a, b) = (vidx[&c.on[0]], vidx[&c.on[1]]);
                vec![a.max(b), a.min(b)]
            })
            .collect();
        let mut points: Vec<&TriplePoint> = self.triple_points.iter().collect();
        points.sort_by_key(|t| t.id);
        let tris = points
            .iter()
            .map(|t| {
                let mut verts: Vec<usize> = t.on.iter().flat_map(|c| self.curve(*c).unwrap().on).map(|c| vidx[&c]).collect();
                verts.sort_unstable();
                verts.dedup();
                // δ_k omits the k-th smallest vertex.
                (0..3)
                    .map(|k| {
                        let keep: Vec<usize> = verts.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| *v).collect();
                        let curve = t
                            .on
                            .iter()
                            .find(|&&c| {
                                let on = self.curve(c).unwrap().on;
                                let mut e = [vidx[&on[0]], vidx[&on[1]]];
                                e.sort_unstable();
                                e == [keep[0], keep[1]]
                            })
                            .unwrap();
                        eidx[curve]
                    })
                    .collect()
            })
            .collect();
        DeltaSet::new(vec![vec![vec![]; self.components.len()], edges, tris]).map_err(|e| DegenerationError::NotKulikov(e.to_string()))
    }

    pub fn strata_classes(&self) -> Result<StrataClasses, DegenerationError> {
        self.ensure_valid()?;
        Ok(StrataClasses {
            y0: self.components.iter().map(|c| c.kind.class()).sum(),
            y1: self.double_curves.iter().map(|d| d.genus.class()).sum(),
            y2: MotiveClass::integer(self.triple_points.len() as i64),
        })
    }

    /// `[Y^(0)] - 2[Y^(1)] + 3[Y^(2)]`.
    pub fn smooth_locus_class(&self) -> Result<MotiveClass, DegenerationError> {
        let s = self.strata_classes()?;
        Ok(&(&s.y0 - &s.y1.scale(2)) + &s.y2.scale(3))
    }

    /// Kulikov type: 1 (smooth), 2 (chain) or 3 (sphere).
    pub fn degeneration_type(&self) -> Result<u8, DegenerationError> {
        let polytope = self.clemens_polytope()?;
        match polytope.recognize() {
            HomotopyType::Point => Ok(1),
            HomotopyType::Interval => {
                let order = self.component_index();
                let valence = |id: u64| self.double_curves.iter().filter(|d| d.on.contains(&id)).count();
                let mut names = BTreeSet::new();
                for d in &self.double_curves {
                    match &d.genus {
                        CurveGenus::Elliptic(n) => {
                            names.insert(n.clone());
                        }
                        CurveGenus::Rational => return Err(DegenerationError::NotKulikov(format!("type II double curve {} is rational", d.id))),
                    }
                }
                for c in &self.components {
                    let end = valence(c.id) == 1;
                    match (&c.kind, end) {
                        (ComponentKind::Rational { .. }, true) => {}
                        (ComponentKind::RuledElliptic { curve, .. }, false) => {
                            names.insert(curve.clone());
                        }
                        _ => {
                            return Err(DegenerationError::NotKulikov(format!(
                                "component {} (position {}) does not fit a type II chain",
                                c.id, order[&c.id]
                            )))
                        }
                    }
                }
                if names.len() != 1 {
                    return Err(DegenerationError::NotKulikov(format!("type II chain uses {} elliptic curves, expected one", names.len())));
                }
                Ok(2)
            }
            HomotopyType::Sphere2 => {
                if let Some(c) = self.components.iter().find(|c| !matches!(c.kind, ComponentKind::Rational { .. })) {
                    return Err(DegenerationError::NotKulikov(format!("type III component {} is not rational", c.id)));
                }
                if let Some(d) = self.double_curves.iter().find(|d| d.genus != CurveGenus::Rational) {
                    return Err(DegenerationError::NotKulikov(format!("type III double curve {} is not rational", d.id)));
                }
                Ok(3)
            }
            HomotopyType::Other => Err(DegenerationError::NotKulikov("dual complex is not a point, an interval or a 2-sphere".into())),
        }
    }

    /// The elliptic curve name of a type II fiber.
    pub fn elliptic_name(&self) -> Option<String> {
        self.double_curves.iter().find_map(|d| match &d.genus {
            CurveGenus::Elliptic(n) => Some(n.clone()),
            CurveGenus::Rational => None,
        })
    }

    /// Relabels component ids through `f`, keeping everything else.
    pub fn map_component_ids(&self, f: impl Fn(u64) -> u64) -> DegenerationFiber {
        let mut out = self.clone();
        for c in &mut out.components {
            c.id = f(c.id);
        }
        for d in &mut out.double_curves {
            d.on = [f(d.on[0]), f(d.on[1])];
        }
        out
    }
}

// JSON representation.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentRepr {
    id: u64,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curve: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class: Option<MotiveClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    betti: Option<[u64; 3]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveRepr {
    id: u64,
    on: [u64; 2],
    genus: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    curve: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    self_intersection: Option<[i64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRepr {
    id: u64,
    on: [u64; 3],
}

#[derive(Serialize, Deserialize)]
struct FiberRepr {
    label: String,
    components: Vec<ComponentRepr>,
    #[serde(default)]
    double_curves: Vec<CurveRepr>,
    #[serde(default)]
    triple_points: Vec<PointRepr>,
}

impl Serialize for DegenerationFiber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let components = self
            .components
            .iter()
            .map(|c| {
                let base = ComponentRepr { id: c.id, kind: String::new(), a: None, curve: None, class: None, betti: None };
                match &c.kind {
                    ComponentKind::Rational { a } => ComponentRepr { kind: "rational".into(), a: Some(*a), ..base },
                    ComponentKind::RuledElliptic { curve, a } => {
                        ComponentRepr { kind: "ruled_elliptic".into(), a: Some(*a), curve: Some(curve.clone()), ..base }
                    }
                    ComponentKind::K3Smooth => ComponentRepr { kind: "k3".into(), ..base },
                    ComponentKind::Other { class, betti } => ComponentRepr { kind: "other".into(), class: Some(class.clone()), betti: *betti, ..base },
                }
            })
            .collect();
        let double_curves = self
            .double_curves
            .iter()
            .map(|d| CurveRepr {
                id: d.id,
                on: d.on,
                genus: matches!(d.genus, CurveGenus::Elliptic(_)) as u8,
                curve: match &d.genus {
                    CurveGenus::Elliptic(n) => Some(n.clone()),
                    CurveGenus::Rational => None,
                },
                self_intersection: d.self_intersections,
            })
            .collect();
        let triple_points = self.triple_points.iter().map(|t| PointRepr { id: t.id, on: t.on }).collect();
        FiberRepr { label: self.label.clone(), components, double_curves, triple_points }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DegenerationFiber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = FiberRepr::deserialize(d)?;
        let mut components = vec![];
        for c in repr.components {
            let need_a = || c.a.ok_or_else(|| D::Error::custom(format!("component {} needs `a`", c.id)));
            let kind = match c.kind.as_str() {
                "rational" => ComponentKind::Rational { a: need_a()? },
                "ruled_elliptic" => ComponentKind::RuledElliptic { curve: c.curve.clone().unwrap_or_else(|| "E".into()), a: need_a()? },
                "k3" => ComponentKind::K3Smooth,
                "other" => ComponentKind::Other {
                    class: c.class.clone().ok_or_else(|| D::Error::custom(format!("component {} needs `class`", c.id)))?,
                    betti: c.betti,
                },
                other => return Err(D::Error::custom(format!("unknown component kind `{other}`"))),
            };
            components.push(ComponentData { id: c.id, kind });
        }
        let mut double_curves = vec![];
        for c in repr.double_curves {
            let genus = match c.genus {
                0 => CurveGenus::Rational,
                1 => CurveGenus::Elliptic(c.curve.unwrap_or_else(|| "E".into())),
                g => return Err(D::Error::custom(format!("double curve {} has unsupported genus {g}", c.id))),
            };
            double_curves.push(DoubleCurve { id: c.id, on: c.on, genus, self_intersections: c.self_intersection });
        }
        let triple_points = repr.triple_points.into_iter().map(|t| TriplePoint { id: t.id, on: t.on }).collect();
        Ok(DegenerationFiber { label: repr.label, components, double_curves, triple_points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(id: u64, a: u64) -> ComponentData {
        ComponentData { id, kind: ComponentKind::Rational { a } }
    }

    fn curve(id: u64, on: [u64; 2]) -> DoubleCurve {
        DoubleCurve { id, on, genus: CurveGenus::Rational, self_intersections: None }
    }

    /// Tetrahedron by hand: curve ids index the six pairs.
    fn tetra(a: [u64; 4]) -> DegenerationFiber {
        let pairs = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
        let curve_id = |x: u64, y: u64| pairs.iter().position(|p| *p == [x.min(y), x.max(y)]).unwrap() as u64;
        let triples = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
        DegenerationFiber {
            label: "tetra".into(),
            components: (0..4).map(|i| rational(i, a[i as usize])).collect(),
            double_curves: pairs.iter().enumerate().map(|(i, p)| curve(i as u64, *p)).collect(),
            triple_points: triples
                .iter()
                .enumerate()
                .map(|(i, t)| TriplePoint { id: i as u64, on: [curve_id(t[0], t[1]), curve_id(t[0], t[2]), curve_id(t[1], t[2])] })
                .collect(),
        }
    }

    fn chain(m: u64, a: &[u64]) -> DegenerationFiber {
        let components = (0..=m)
            .map(|i| {
                let kind = if i == 0 || i == m {
                    ComponentKind::Rational { a: a[i as usize] }
                } else {
                    ComponentKind::RuledElliptic { curve: "E".into(), a: a[i as usize] }
                };
                ComponentData { id: i, kind }
            })
            .collect();
        let double_curves =
            (0..m).map(|i| DoubleCurve { id: i, on: [i, i + 1], genus: CurveGenus::Elliptic("E".into()), self_intersections: None }).collect();
        DegenerationFiber { label: "chain".into(), components, double_curves, triple_points: vec![] }
    }

    fn smooth() -> DegenerationFiber {
        DegenerationFiber { label: "smooth".into(), components: vec![ComponentData { id: 0, kind: ComponentKind::K3Smooth }], double_curves: vec![], triple_points: vec![] }
    }

    #[test]
    fn validation() {
        assert!(tetra([7; 4]).validate().is_empty());
        let mut f = tetra([7; 4]);
        f.double_curves[0].on = [2, 2];
        let v = f.validate();
        assert!(v.iter().any(|x| x.to_string().contains("self-intersecting double curve")));
        let mut f = tetra([7; 4]);
        f.triple_points = vec![TriplePoint { id: 0, on: [0, 1, 5] }];
        // Curves {0,1}, {0,2}, {2,3}: {0,1} and {2,3} are disjoint.
        assert_eq!(f.validate(), vec![Violation::NotPairwiseAdjacent { point: 0 }]);
        let mut f = tetra([7; 4]);
        f.triple_points[0].on[2] = 99;
        assert_eq!(f.validate(), vec![Violation::UnknownCurve { point: 0, curve: 99 }]);
        assert!(matches!(f.clemens_polytope(), Err(DegenerationError::Invalid(_))));
    }

    #[test]
    fn polytopes() {
        let t = tetra([7; 4]).clemens_polytope().unwrap();
        assert_eq!(t.counts(), vec![4, 6, 4]);
        assert_eq!(t, crate::complexes::standard::tetrahedron_boundary());
        assert_eq!(t.recognize(), HomotopyType::Sphere2);
        let c = chain(2, &[10, 0, 10]).clemens_polytope().unwrap();
        assert_eq!(c.counts(), vec![3, 2]);
        assert_eq!(c.recognize(), HomotopyType::Interval);
        assert_eq!(smooth().clemens_polytope().unwrap().recognize(), HomotopyType::Point);
    }

    #[test]
    fn strata() {
        let s = tetra([7; 4]).strata_classes().unwrap();
        assert_eq!(s.y0, MotiveClass::tate_polynomial(&[4, 28, 4]));
        assert_eq!(s.y1, MotiveClass::tate_polynomial(&[6, 6]));
        assert_eq!(s.y2, MotiveClass::integer(4));
        let e = MotiveClass::elliptic("E");
        let s = chain(2, &[10, 0, 10]).strata_classes().unwrap();
        assert_eq!(s.y0, &(&e + &e.tate_twist(-1)) + &MotiveClass::tate_polynomial(&[2, 20, 2]));
        assert_eq!(s.y1, e.scale(2));
        assert!(s.y2.is_zero());
    }

    #[test]
    fn smooth_locus() {
        assert_eq!(tetra([7; 4]).smooth_locus_class().unwrap(), MotiveClass::tate_polynomial(&[4, 16, 4]));
        let e = MotiveClass::elliptic("E");
        let expected = &(&MotiveClass::tate_polynomial(&[2, 20, 2]) - &e.scale(3)) + &e.tate_twist(-1);
        assert_eq!(chain(2, &[10, 0, 10]).smooth_locus_class().unwrap(), expected);
        let f = smooth();
        assert_eq!(f.smooth_locus_class().unwrap(), ComponentKind::K3Smooth.class());
        assert_eq!(f.smooth_locus_class().unwrap().euler_characteristic().unwrap(), BigInt::from(24));
    }

    #[test]
    fn kulikov_types() {
        assert_eq!(chain(3, &[10, 0, 0, 10]).degeneration_type().unwrap(), 2);
        assert_eq!(tetra([7; 4]).degeneration_type().unwrap(), 3);
        assert_eq!(smooth().degeneration_type().unwrap(), 1);
        let mut bad = chain(3, &[10, 0, 0, 10]);
        bad.components[1].kind = ComponentKind::Rational { a: 0 };
        assert!(matches!(bad.degeneration_type(), Err(DegenerationError::NotKulikov(_))));
        let mut bad = chain(3, &[10, 0, 0, 10]);
        bad.double_curves[2].genus = CurveGenus::Elliptic("F".into());
        assert!(matches!(bad.degeneration_type(), Err(DegenerationError::NotKulikov(_))));
    }

    #[test]
    fn torus_dual_complex_is_rejected() {
        // 3x3 torus grid as a fiber: vertices are components.
        let g = crate::complexes::standard::torus_grid(3, 3);
        let components = (0..g.count(0) as u64).map(|i| rational(i, 0)).collect();
        let double_curves = (0..g.count(1)).map(|e| curve(e as u64, [g.face(1, e, 0) as u64, g.face(1, e, 1) as u64])).collect();
        let triple_points = (0..g.count(2)).map(|t| TriplePoint { id: t as u64, on: [0, 1, 2].map(|j| g.face(2, t, j) as u64) }).collect();
        let f = DegenerationFiber { label: "torus".into(), components, double_curves, triple_points };
        assert!(f.validate().is_empty());
        assert!(matches!(f.degeneration_type(), Err(DegenerationError::NotKulikov(_))));
    }

    #[test]
    fn permuting_ids_keeps_homology() {
        let f = tetra([7; 4]);
        let g = f.map_component_ids(|i| 10 - i);
        assert_eq!(f.clemens_polytope().unwrap().homology_all(), g.clemens_polytope().unwrap().homology_all());
    }

    #[test]
    fn json_roundtrip() {
        for f in [tetra([1, 2, 3, 22]), chain(3, &[5, 5, 0, 10]), smooth()] {
            let text = serde_json::to_string(&f).unwrap();
            let back: DegenerationFiber = serde_json::from_str(&text).unwrap();
            assert_eq!(back, f);
        }
        let text = r#"{"label":"x","components":[{"id":0,"kind":"rational","a":1}],"double_curves":[{"id":0,"on":[0,0],"genus":2}]}"#;
        assert!(serde_json::from_str::<DegenerationFiber>(text).is_err());
        let text = r#"{"label":"x","components":[{"id":0,"kind":"rational"}]}"#;
        assert!(serde_json::from_str::<DegenerationFiber>(text).is_err());
    }

    #[test]
    fn other_betti_consistency() {
        let class = MotiveClass::tate_polynomial(&[1, 1, 1]);
        let ok = ComponentData { id: 0, kind: ComponentKind::Other { class: class.clone(), betti: Some([1, 0, 1]) } };
        let bad = ComponentData { id: 1, kind: ComponentKind::Other { class, betti: Some([1, 0, 2]) } };
        let f = DegenerationFiber { label: "o".into(), components: vec![ok, bad], double_curves: vec![], triple_points: vec![] };
        assert_eq!(f.validate().len(), 1);
    }

    #[test]
    fn neron_data_nonempty() {
        assert_eq!(WeakNeronData::new(vec![]), Err(DegenerationError::EmptyNeronData));
    }
}
