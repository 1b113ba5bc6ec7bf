//! Motivic integrals of degenerating K3 surfaces and the identities they
//! satisfy.
//!
//! Twists follow `Z(n) = L^{-n}`. For weak Néron data `(V_i°, m_i)` the
//! integral is `Σ [V_i°] Z(m_i - min m)`; for a Kulikov fiber it is the
//! class of the smooth locus.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degeneration::{DegenerationError, DegenerationFiber, WeakNeronData};
use crate::exact_linalg;
use crate::motive_ring::{EPolynomial, LaurentPolynomial, MotiveClass, MotiveError};
use crate::weight_ss::{self, WeightError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegralError {
    #[error(transparent)]
    Fiber(#[from] DegenerationError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Motive(#[from] MotiveError),
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

pub fn integral_from_neron(data: &WeakNeronData) -> MotiveClass {
    let min = data.items().iter().map(|(_, m)| *m).min().expect("weak Néron data is nonempty");
    data.items().iter().map(|(c, m)| c.tate_twist(m - min)).sum()
}

pub fn integral_kulikov(f: &DegenerationFiber) -> Result<MotiveClass, IntegralError> {
    f.degeneration_type()?;
    Ok(f.smooth_locus_class()?)
}

/// Parameters of the closed forms: ramification index `e`, type `s` and the
/// invariant `r` (`r_1` for `s = 2`, `r_2` for `s = 3`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamifiedParams {
    pub e: u64,
    pub s: u8,
    pub r: BigInt,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elliptic_atom: Option<String>,
}

impl RamifiedParams {
    pub fn type2(e: u64, r1: impl Into<BigInt>, atom: &str) -> Self {
        RamifiedParams { e, s: 2, r: r1.into(), elliptic_atom: Some(atom.to_string()) }
    }

    pub fn type3(e: u64, r2: impl Into<BigInt>) -> Self {
        RamifiedParams { e, s: 3, r: r2.into(), elliptic_atom: None }
    }

    fn e_squared_r(&self) -> BigInt {
        BigInt::from(self.e) * BigInt::from(self.e) * &self.r
    }

    pub fn validate(&self) -> Result<(), IntegralError> {
        if self.e == 0 {
            return Err(IntegralError::BadParams("ramification index must be positive".into()));
        }
        if self.r <= BigInt::zero() {
            return Err(IntegralError::BadParams(format!("r must be positive, got {}", self.r)));
        }
        match self.s {
            2 => {
                if exact_linalg::exact_sqrt(&self.r).is_none() {
                    return Err(IntegralError::BadParams(format!("r_1 = {} is not a perfect square", self.r)));
                }
            }
            3 => {
                if self.e_squared_r().is_odd() {
                    return Err(IntegralError::BadParams(format!("e^2 r_2 = {} is odd", self.e_squared_r())));
                }
            }
            s => return Err(IntegralError::BadParams(format!("closed forms exist for s = 2, 3, got {s}"))),
        }
        Ok(())
    }

    /// Geometric realizability warnings; the closed form stays evaluable.
    pub fn warnings(&self) -> Vec<String> {
        if self.s == 3 && self.e_squared_r() > BigInt::from(20) {
            vec![format!("e^2 r_2 = {} exceeds 20: negative middle coefficient, no K3 fiber realizes it", self.e_squared_r())]
        } else {
            vec![]
        }
    }
}

/// The closed forms: for `s = 2` with `k = e sqrt(r_1)`
/// `2 - (k+1)[E] + 20L + (k-1)[E]L + 2L^2`; for `s = 3` with `n = e^2 r_2`
/// `(n/2 + 2) + (20 - n)L + (n/2 + 2)L^2`.
pub fn theorem1_closed_form(p: &RamifiedParams) -> Result<MotiveClass, IntegralError> {
    p.validate()?;
    let l = MotiveClass::lefschetz;
    match p.s {
        2 => {
            let k = BigInt::from(p.e) * exact_linalg::exact_sqrt(&p.r).unwrap();
            let e = MotiveClass::elliptic(p.elliptic_atom.as_deref().unwrap_or("E"));
            let mut out = MotiveClass::integer(2);
            out += &e.scale(-(&k + BigInt::from(1)));
            out += &l(1).scale(20);
            out += &e.tate_twist(-1).scale(&k - 1);
            out += &l(2).scale(2);
            Ok(out)
        }
        _ => {
            let n = p.e_squared_r();
            let c: BigInt = &n / 2 + 2;
            let mut out = MotiveClass::integer(c.clone());
            out += &l(1).scale(BigInt::from(20) - &n);
            out += &l(2).scale(c);
            Ok(out)
        }
    }
}

/// The conjectured integral over an extension of ramification index `e`,
/// written with Tate twists `Q(0), Q(-1), Q(-2)`.
pub fn conjecture_formula(e: u64, r2: &BigInt) -> Result<MotiveClass, IntegralError> {
    let e2r = BigInt::from(e).pow(2) * r2;
    if e == 0 || r2 <= &BigInt::zero() || e2r.is_odd() {
        return Err(IntegralError::BadParams(format!("need e >= 1, r_2 >= 1 and e^2 r_2 even (e = {e}, r_2 = {r2})")));
    }
    let outer: BigInt = &e2r / 2 + 2;
    Ok(&(&MotiveClass::tate(0).scale(outer.clone()) + &MotiveClass::tate(-1).scale(BigInt::from(20) - e2r)) + &MotiveClass::tate(-2).scale(outer))
}

/// `Σ_j (-1)^j [Y^(j)] (1 + L + ... + L^j)`.
pub fn lim_class(f: &DegenerationFiber) -> Result<MotiveClass, IntegralError> {
    let strata = f.strata_classes()?;
    let mut out = MotiveClass::zero();
    for (j, y) in strata.as_array().into_iter().enumerate() {
        let partial: MotiveClass = (0..=j as i64).map(|a| y.tate_twist(-a)).sum();
        out += &if j % 2 == 0 { partial } else { -partial };
    }
    Ok(out)
}

/// Realization of the limit Hodge structure of a type `s` K3 degeneration
/// in `Z[u, u^{-1}]` after `v = u^{-1}`.
pub fn limit_hodge_reduction(s: u8) -> LaurentPolynomial {
    let e = match s {
        1 => EPolynomial::from_terms(&[(0, 0, 1), (2, 0, 1), (1, 1, 20), (0, 2, 1), (2, 2, 1)]),
        2 => EPolynomial::from_terms(&[(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 18), (2, 1, 1), (1, 2, 1), (2, 2, 1)]),
        _ => EPolynomial::from_terms(&[(0, 0, 2), (1, 1, 20), (2, 2, 2)]),
    };
    e.reduce_uv_to_one()
}

/// Both sides of the Serre-invariant identity agree, and they agree with the
/// realization of the limit Hodge structure for the fiber's type.
pub fn serre_hodge_check(f: &DegenerationFiber) -> Result<bool, IntegralError> {
    let s = f.degeneration_type()?;
    let lhs = integral_kulikov(f)?.serre_reduce()?;
    let rhs = lim_class(f)?.serre_reduce()?;
    Ok(lhs == rhs && lhs == limit_hodge_reduction(s))
}

/// Euler characteristic of the integral; `24` for every K3 fiber.
pub fn acampo_chi(f: &DegenerationFiber) -> Result<BigInt, IntegralError> {
    Ok(integral_kulikov(f)?.euler_characteristic()?)
}

/// `closed_form(e e', r) == closed_form(e', e^2 r)`.
pub fn scaling_check(p: &RamifiedParams, e_prime: u64) -> Result<bool, IntegralError> {
    p.validate()?;
    let lhs = theorem1_closed_form(&RamifiedParams { e: p.e * e_prime, ..p.clone() })?;
    let r = BigInt::from(p.e).pow(2) * &p.r;
    let rhs = theorem1_closed_form(&RamifiedParams { e: e_prime, r, ..p.clone() })?;
    Ok(lhs == rhs)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralReport {
    pub fiber_label: String,
    pub s: u8,
    /// `r_1` or `r_2`; absent for smooth fibers.
    #[serde(with = "opt_bigint")]
    pub r: Option<BigInt>,
    pub integral: MotiveClass,
    pub e_poly: EPolynomial,
    #[serde(with = "bigint_string")]
    pub chi: BigInt,
    pub serre_residue: LaurentPolynomial,
    pub closed_form: MotiveClass,
    #[serde(rename = "match")]
    pub matches: bool,
    pub serre_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form_e: Option<ClosedFormAt>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// The closed form over a ramified extension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormAt {
    pub e: u64,
    pub class: MotiveClass,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

mod opt_bigint {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&x.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?.map(|x| x.parse().map_err(serde::de::Error::custom)).transpose()
    }
}

/// Reads `s` and `r` off the fiber and compares the integral with the closed
/// form at `e = 1`. With `e > 1` the ramified closed form is attached too.
pub fn integral_report(f: &DegenerationFiber, e: u64) -> Result<IntegralReport, IntegralError> {
    let s = f.degeneration_type()?;
    let integral = integral_kulikov(f)?;
    let (r, params) = match s {
        1 => (None, None),
        2 => {
            let row = weight_ss::type2_h1_row(f.double_curves.len())?;
            let atom = f.elliptic_name().unwrap_or_else(|| "E".into());
            (Some(row.r1.clone()), Some(RamifiedParams::type2(1, row.r1, &atom)))
        }
        _ => {
            let gram = weight_ss::monodromy_gram(f)?;
            if !gram.r_d.is_integer() {
                return Err(IntegralError::BadParams(format!("r_2 = {} is not an integer", gram.r_d)));
            }
            let r2 = gram.r_d.to_integer();
            (Some(r2.clone()), Some(RamifiedParams::type3(1, r2)))
        }
    };
    let closed_form = match &params {
        Some(p) => theorem1_closed_form(p)?,
        None => integral.clone(),
    };
    let (closed_form_e, warnings) = match (&params, e) {
        (Some(p), e) if e != 1 => {
            let ramified = RamifiedParams { e, ..p.clone() };
            (Some(ClosedFormAt { e, class: theorem1_closed_form(&ramified)? }), ramified.warnings())
        }
        _ => (None, vec![]),
    };
    let e_poly = integral.e_polynomial()?;
    Ok(IntegralReport {
        fiber_label: f.label.clone(),
        s,
        r,
        chi: e_poly.eval_at_one(),
        serre_residue: e_poly.reduce_uv_to_one(),
        e_poly,
        matches: integral == closed_form,
        closed_form,
        integral,
        serre_ok: serre_hodge_check(f)?,
        closed_form_e,
        warnings,
    })
}

/// `χ` of a closed form, as a machine integer when it fits.
pub fn closed_form_chi(p: &RamifiedParams) -> Result<Option<i64>, IntegralError> {
    Ok(theorem1_closed_form(p)?.euler_characteristic()?.to_i64())
}

impl IntegralReport {
    pub fn passed(&self) -> bool {
        self.matches && self.serre_ok && self.chi == BigInt::from(24)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degeneration::{ComponentData, ComponentKind, CurveGenus, DoubleCurve, TriplePoint};

    fn e() -> MotiveClass {
        MotiveClass::elliptic("E")
    }

    fn tate(c: &[i64]) -> MotiveClass {
        MotiveClass::tate_polynomial(c)
    }

    fn sphere(ds: &crate::complexes::DeltaSet, a: &[u64]) -> DegenerationFiber {
        DegenerationFiber {
            label: "s".into(),
            components: (0..ds.count(0)).map(|i| ComponentData { id: i as u64, kind: ComponentKind::Rational { a: a[i] } }).collect(),
            double_curves: (0..ds.count(1))
                .map(|x| DoubleCurve { id: x as u64, on: [ds.face(1, x, 1) as u64, ds.face(1, x, 0) as u64], genus: CurveGenus::Rational, self_intersections: None })
                .collect(),
            triple_points: (0..ds.count(2)).map(|t| TriplePoint { id: t as u64, on: [0, 1, 2].map(|j| ds.face(2, t, j) as u64) }).collect(),
        }
    }

    fn chain(a: &[u64]) -> DegenerationFiber {
        let m = a.len() as u64 - 1;
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
        DegenerationFiber { label: "k3".into(), components: vec![ComponentData { id: 0, kind: ComponentKind::K3Smooth }], double_curves: vec![], triple_points: vec![] }
    }

    #[test]
    fn neron_integral() {
        let a = tate(&[1, 2]);
        let b = e();
        let d = WeakNeronData::new(vec![(a.clone(), 2), (b.clone(), 2)]).unwrap();
        assert_eq!(integral_from_neron(&d), &a + &b);
        let d = WeakNeronData::new(vec![(a.clone(), 0), (b.clone(), 1)]).unwrap();
        assert_eq!(integral_from_neron(&d), &a + &b.tate_twist(1));
    }

    #[test]
    fn kulikov_integrals() {
        use crate::complexes::standard::*;
        assert_eq!(integral_kulikov(&sphere(&octahedron(), &[6; 6])).unwrap(), tate(&[6, 12, 6]));
        assert_eq!(integral_kulikov(&sphere(&icosahedron(), &[5; 12])).unwrap(), tate(&[12, 0, 12]));
        let expected = &tate(&[2, 20, 2]) - &e().scale(2);
        assert_eq!(integral_kulikov(&chain(&[10, 10])).unwrap(), expected);
        let tetra = sphere(&tetrahedron_boundary(), &[7; 4]);
        let d = WeakNeronData::reduced(vec![tetra.smooth_locus_class().unwrap()]).unwrap();
        assert_eq!(integral_from_neron(&d), integral_kulikov(&tetra).unwrap());
    }

    #[test]
    fn closed_forms() {
        assert_eq!(theorem1_closed_form(&RamifiedParams::type3(1, 4)).unwrap(), tate(&[4, 16, 4]));
        assert_eq!(theorem1_closed_form(&RamifiedParams::type3(2, 5)).unwrap(), tate(&[12, 0, 12]));
        let expected = &(&tate(&[2, 20, 2]) - &e().scale(4)) + &e().tate_twist(-1).scale(2);
        assert_eq!(theorem1_closed_form(&RamifiedParams::type2(1, 9, "E")).unwrap(), expected);
        assert!(theorem1_closed_form(&RamifiedParams::type2(1, 8, "E")).is_err());
        assert!(theorem1_closed_form(&RamifiedParams::type3(1, 5)).is_err());
        assert!(theorem1_closed_form(&RamifiedParams::type3(0, 4)).is_err());
        assert!(theorem1_closed_form(&RamifiedParams { e: 1, s: 1, r: 1.into(), elliptic_atom: None }).is_err());
        assert!(RamifiedParams::type3(2, 6).warnings().len() == 1);
        assert!(RamifiedParams::type3(1, 20).warnings().is_empty());
    }

    #[test]
    fn conjecture_matches_closed_form() {
        for e in 1..6u64 {
            for r in 1..30i64 {
                let p = RamifiedParams::type3(e, r);
                match (conjecture_formula(e, &BigInt::from(r)), theorem1_closed_form(&p)) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b),
                    (Err(_), Err(_)) => {}
                    other => panic!("disagreement at e={e}, r={r}: {other:?}"),
                }
            }
        }
    }

    #[test]
    fn limit_classes() {
        use crate::complexes::standard::*;
        let tetra = sphere(&tetrahedron_boundary(), &[7; 4]);
        let one_l = tate(&[1, 1]);
        let expected = &(&tate(&[4, 28, 4]) - &one_l.mul(&one_l).unwrap().scale(6)) + &tate(&[1, 1, 1]).scale(4);
        assert_eq!(lim_class(&tetra).unwrap(), expected);
        assert_eq!(lim_class(&smooth()).unwrap(), smooth().smooth_locus_class().unwrap());
        let f = chain(&[10, 10]);
        let y0 = f.strata_classes().unwrap().y0;
        assert_eq!(lim_class(&f).unwrap(), &y0 - &e().mul(&one_l).unwrap());
    }

    #[test]
    fn serre_and_chi() {
        use crate::complexes::standard::*;
        for f in [sphere(&tetrahedron_boundary(), &[7; 4]), chain(&[10, 10]), chain(&[5, 2, 3, 4, 6]), smooth()] {
            assert!(serre_hodge_check(&f).unwrap(), "{}", f.label);
            assert_eq!(acampo_chi(&f).unwrap(), BigInt::from(24));
            assert_eq!(lim_class(&f).unwrap().euler_characteristic().unwrap(), BigInt::from(24));
        }
        let bad = sphere(&tetrahedron_boundary(), &[7, 7, 7, 8]);
        assert!(!serre_hodge_check(&bad).unwrap());
        assert_ne!(acampo_chi(&bad).unwrap(), BigInt::from(24));
        let bad = chain(&[10, 3, 10]);
        assert!(!serre_hodge_check(&bad).unwrap());
    }

    #[test]
    fn scaling() {
        let p = RamifiedParams::type3(2, 2);
        assert!(scaling_check(&p, 1).unwrap());
        assert_eq!(theorem1_closed_form(&p).unwrap(), theorem1_closed_form(&RamifiedParams::type3(1, 8)).unwrap());
        assert!(scaling_check(&RamifiedParams::type3(1, 4), 1).unwrap());
        let p = RamifiedParams::type2(3, 1, "E");
        assert!(scaling_check(&p, 1).unwrap());
        assert_eq!(theorem1_closed_form(&p).unwrap(), theorem1_closed_form(&RamifiedParams::type2(1, 9, "E")).unwrap());
    }

    #[test]
    fn report() {
        use crate::complexes::standard::*;
        let r = integral_report(&sphere(&octahedron(), &[6; 6]), 1).unwrap();
        assert!(r.passed());
        assert_eq!(r.r, Some(BigInt::from(8)));
        assert_eq!(r.serre_residue, LaurentPolynomial::constant(24));
        let r = integral_report(&chain(&[5, 2, 3, 4, 6]), 2).unwrap();
        assert!(r.matches);
        assert_eq!(r.r, Some(BigInt::from(16)));
        assert_eq!(r.closed_form_e.unwrap().class, theorem1_closed_form(&RamifiedParams::type2(1, 64, "E")).unwrap());
        assert_eq!(integral_report(&smooth(), 1).unwrap().r, None);
        let text = serde_json::to_string(&integral_report(&smooth(), 1).unwrap()).unwrap();
        assert!(text.contains(r#""match":true"#));
    }
}
