//! Classes in the localized Grothendieck ring of varieties.
//!
//! A [`MotiveClass`] is a finite integer combination of `atom * L^k`, where `L`
//! is the class of the affine line and `k` may be negative. Atoms are the
//! point, named elliptic curves and opaque varieties carrying a user-declared
//! E-polynomial. Rational surfaces and ruled elliptic surfaces are written out
//! over these atoms (`1 + aL + L^2`, `[E](1 + L) + aL`), which keeps equality of
//! classes decidable.
//!
//! Tate twists follow `[Z](n) = [Z] * L^{-n}`, so `tate_twist(x, n)` lowers every
//! stored Lefschetz power by `n`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MotiveError {
    #[error("unsupported product {left} * {right}: neither factor is a point class")]
    UnsupportedProduct { left: String, right: String },
    #[error("atom {0} has no declared E-polynomial")]
    UndeclaredRealization(String),
    #[error("no point count declared for atom {0}")]
    MissingAtomCount(String),
    #[error("malformed atom tag {0:?}")]
    BadAtomTag(String),
}

/// Integer Laurent polynomial in one variable.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i64, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c.into());
        p
    }

    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        let mut p = Self::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(k as i64, BigInt::from(c));
        }
        p
    }

    fn add_term(&mut self, exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn terms(&self) -> &BTreeMap<i64, BigInt> {
        &self.terms
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at 1, i.e. the sum of the coefficients.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero();
        for (e, x) in &self.terms {
            out.add_term(*e, x * c);
        }
        out
    }

    pub fn shift(&self, by: i64) -> Self {
        LaurentPolynomial { terms: self.terms.iter().map(|(e, c)| (e + by, c.clone())).collect() }
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mono = match *e {
                0 => String::new(),
                1 => var.to_string(),
                k => format!("{var}^{k}"),
            };
            push_signed_term(&mut out, i == 0, c, &mono);
        }
        out
    }
}

impl Add for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, rhs: Self) -> LaurentPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, rhs: Self) -> LaurentPolynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            exp: i64,
            coeff: String,
        }
        s.collect_seq(self.terms.iter().map(|(e, c)| Term { exp: *e, coeff: c.to_string() }))
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Term {
            exp: i64,
            coeff: String,
        }
        let mut p = LaurentPolynomial::zero();
        for t in Vec::<Term>::deserialize(d)? {
            p.add_term(t.exp, t.coeff.parse().map_err(D::Error::custom)?);
        }
        Ok(p)
    }
}

/// Bivariate Laurent polynomial in `u`, `v` (the Hodge-Deligne polynomial).
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EPolynomial {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl EPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, 1)
    }

    pub fn monomial(p: i64, q: i64, c: impl Into<BigInt>) -> Self {
        let mut e = Self::zero();
        e.add_term(p, q, c.into());
        e
    }

    /// Builds from `(u-exponent, v-exponent, coefficient)` triples.
    pub fn from_terms(terms: &[(i64, i64, i64)]) -> Self {
        let mut e = Self::zero();
        for &(p, q, c) in terms {
            e.add_term(p, q, BigInt::from(c));
        }
        e
    }

    /// `1 - u - v + uv`.
    pub fn elliptic_curve() -> Self {
        Self::from_terms(&[(0, 0, 1), (1, 0, -1), (0, 1, -1), (1, 1, 1)])
    }

    fn add_term(&mut self, p: i64, q: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((p, q)).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(p, q));
        }
    }

    pub fn terms(&self) -> &BTreeMap<(i64, i64), BigInt> {
        &self.terms
    }

    pub fn coeff(&self, p: i64, q: i64) -> BigInt {
        self.terms.get(&(p, q)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                out.add_term(a + c, b + d, x * y);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero();
        for ((p, q), x) in &self.terms {
            out.add_term(*p, *q, x * c);
        }
        out
    }

    /// Multiplies by `(uv)^k`.
    pub fn shift_uv(&self, k: i64) -> Self {
        EPolynomial { terms: self.terms.iter().map(|((p, q), c)| ((p + k, q + k), c.clone())).collect() }
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Image in `Z[u, v, (uv)^-1] / (uv - 1)`, written in `u` alone.
    pub fn reduce_uv_to_one(&self) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for ((p, q), c) in &self.terms {
            out.add_term(p - q, c.clone());
        }
        out
    }

    /// Betti numbers `b_k = sum_{p+q=k} (-1)^k e_{p,q}`, valid for the
    /// E-polynomial of a smooth projective variety.
    pub fn betti_numbers(&self) -> BTreeMap<i64, BigInt> {
        let mut out: BTreeMap<i64, BigInt> = BTreeMap::new();
        for ((p, q), c) in &self.terms {
            let k = p + q;
            let signed = if k % 2 == 0 { c.clone() } else { -c };
            *out.entry(k).or_default() += signed;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

impl Add for &EPolynomial {
    type Output = EPolynomial;
    fn add(self, rhs: Self) -> EPolynomial {
        let mut out = self.clone();
        for ((p, q), c) in &rhs.terms {
            out.add_term(*p, *q, c.clone());
        }
        out
    }
}

impl fmt::Display for EPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        for (i, ((p, q), c)) in self.terms.iter().enumerate() {
            let mut mono = String::new();
            for (var, e) in [("u", *p), ("v", *q)] {
                match e {
                    0 => {}
                    1 => mono.push_str(var),
                    k => mono.push_str(&format!("{var}^{k}")),
                }
            }
            push_signed_term(&mut out, i == 0, c, &mono);
        }
        write!(f, "{out}")
    }
}

impl Serialize for EPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term {
            u: i64,
            v: i64,
            coeff: String,
        }
        s.collect_seq(self.terms.iter().map(|((u, v), c)| Term { u: *u, v: *v, coeff: c.to_string() }))
    }
}

impl<'de> Deserialize<'de> for EPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Term {
            u: i64,
            v: i64,
            coeff: String,
        }
        let mut e = EPolynomial::zero();
        for t in Vec::<Term>::deserialize(d)? {
            e.add_term(t.u, t.v, t.coeff.parse().map_err(D::Error::custom)?);
        }
        Ok(e)
    }
}

fn push_signed_term(out: &mut String, first: bool, c: &BigInt, mono: &str) {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if mono.is_empty() || !mag.is_one() {
        out.push_str(&mag.to_string());
    }
    out.push_str(mono);
}

/// A variety the ring treats as indecomposable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpaqueAtom {
    pub name: String,
    pub e_polynomial: Option<EPolynomial>,
}

/// Basis atoms. The derived order (point, elliptic, opaque, then name) is the
/// canonical serialization order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Point,
    Elliptic(String),
    Opaque(OpaqueAtom),
}

impl Atom {
    pub fn elliptic(name: &str) -> Self {
        Atom::Elliptic(name.to_string())
    }

    pub fn opaque(name: &str, e_polynomial: Option<EPolynomial>) -> Self {
        Atom::Opaque(OpaqueAtom { name: name.to_string(), e_polynomial })
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Atom::Point => None,
            Atom::Elliptic(n) => Some(n),
            Atom::Opaque(o) => Some(&o.name),
        }
    }

    pub fn e_polynomial(&self) -> Result<EPolynomial, MotiveError> {
        match self {
            Atom::Point => Ok(EPolynomial::one()),
            Atom::Elliptic(_) => Ok(EPolynomial::elliptic_curve()),
            Atom::Opaque(o) => o.e_polynomial.clone().ok_or_else(|| MotiveError::UndeclaredRealization(o.name.clone())),
        }
    }

    fn tag(&self) -> String {
        match self {
            Atom::Point => "point".into(),
            Atom::Elliptic(n) => format!("elliptic:{n}"),
            Atom::Opaque(o) => format!("opaque:{}", o.name),
        }
    }

    fn label(&self) -> String {
        match self {
            Atom::Point => String::new(),
            Atom::Elliptic(n) => format!("[{n}]"),
            Atom::Opaque(o) => format!("[{}]", o.name),
        }
    }
}

/// Element of `K_0(Var)[L^-1]`, stored as `(atom, power) -> coefficient`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MotiveClass {
    terms: BTreeMap<(Atom, i64), BigInt>,
}

impl MotiveClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::lefschetz(0)
    }

    /// `L^k`, i.e. `Z(-k)`.
    pub fn lefschetz(k: i64) -> Self {
        Self::term(Atom::Point, k, 1)
    }

    /// The Tate object `Z(n) = L^{-n}`.
    pub fn tate(n: i64) -> Self {
        Self::lefschetz(-n)
    }

    pub fn integer(c: impl Into<BigInt>) -> Self {
        Self::term(Atom::Point, 0, c)
    }

    pub fn of_atom(atom: Atom) -> Self {
        Self::term(atom, 0, 1)
    }

    pub fn elliptic(name: &str) -> Self {
        Self::of_atom(Atom::elliptic(name))
    }

    pub fn term(atom: Atom, power: i64, c: impl Into<BigInt>) -> Self {
        let mut m = Self::zero();
        m.add_term(atom, power, c.into());
        m
    }

    /// `sum_k coeffs[k] * L^k`.
    pub fn tate_polynomial(coeffs: &[i64]) -> Self {
        let mut m = Self::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            m.add_term(Atom::Point, k as i64, BigInt::from(c));
        }
        m
    }

    /// `[P^1] = 1 + L`.
    pub fn projective_line() -> Self {
        Self::tate_polynomial(&[1, 1])
    }

    fn add_term(&mut self, atom: Atom, power: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let key = (atom, power);
        let slot = self.terms.entry(key.clone()).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(Atom, i64), BigInt> {
        &self.terms
    }

    pub fn coeff(&self, atom: &Atom, power: i64) -> BigInt {
        self.terms.get(&(atom.clone(), power)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every atom is the point (a pure Tate class).
    pub fn is_tate(&self) -> bool {
        self.terms.keys().all(|(a, _)| *a == Atom::Point)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        let mut seen: Vec<&Atom> = self.terms.keys().map(|(a, _)| a).collect();
        seen.dedup();
        seen.into_iter()
    }

    pub fn scale(&self, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut out = Self::zero();
        for ((a, k), x) in &self.terms {
            out.add_term(a.clone(), *k, x * &c);
        }
        out
    }

    /// `[Z](n) = [Z] * L^{-n}`.
    pub fn tate_twist(&self, n: i64) -> Self {
        MotiveClass { terms: self.terms.iter().map(|((a, k), c)| ((a.clone(), k - n), c.clone())).collect() }
    }

    /// Product on the fragment where one factor of every cross term is a
    /// point class. Two curve (or opaque) atoms never multiply.
    pub fn mul(&self, other: &Self) -> Result<Self, MotiveError> {
        let mut out = Self::zero();
        for ((a, j), x) in &self.terms {
            for ((b, k), y) in &other.terms {
                let atom = match (a, b) {
                    (Atom::Point, other) | (other, Atom::Point) => other.clone(),
                    _ => {
                        return Err(MotiveError::UnsupportedProduct { left: a.tag(), right: b.tag() });
                    }
                };
                out.add_term(atom, j + k, x * y);
            }
        }
        Ok(out)
    }

    pub fn e_polynomial(&self) -> Result<EPolynomial, MotiveError> {
        let mut out = EPolynomial::zero();
        for ((a, k), c) in &self.terms {
            out = &out + &a.e_polynomial()?.shift_uv(*k).scale(c);
        }
        Ok(out)
    }

    pub fn euler_characteristic(&self) -> Result<BigInt, MotiveError> {
        Ok(self.e_polynomial()?.eval_at_one())
    }

    /// Image in the quotient by `Z(1) - Z`, through the E-polynomial.
    pub fn serre_reduce(&self) -> Result<LaurentPolynomial, MotiveError> {
        Ok(self.e_polynomial()?.reduce_uv_to_one())
    }

    /// Point count as a Laurent polynomial in `q`; `L` counts as `q` and
    /// every non-point atom needs an entry in `atom_counts`.
    pub fn point_count(&self, atom_counts: &BTreeMap<String, LaurentPolynomial>) -> Result<LaurentPolynomial, MotiveError> {
        let mut out = LaurentPolynomial::zero();
        for ((a, k), c) in &self.terms {
            let base = match a.name() {
                None => LaurentPolynomial::constant(1),
                Some(name) => atom_counts.get(name).cloned().ok_or_else(|| MotiveError::MissingAtomCount(name.to_string()))?,
            };
            out = &out + &base.shift(*k).scale(c);
        }
        Ok(out)
    }

    /// Residue of the point count at `q = 1`, the mod `(q - 1)` Serre invariant.
    pub fn serre_invariant_mod_q(&self, atom_counts: &BTreeMap<String, LaurentPolynomial>) -> Result<BigInt, MotiveError> {
        Ok(self.point_count(atom_counts)?.eval_at_one())
    }
}

impl fmt::Display for MotiveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        // Group by power first so the output reads like a polynomial in L.
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|((a1, k1), _), ((a2, k2), _)| k1.cmp(k2).then_with(|| a1.cmp(a2)));
        for (i, ((atom, k), c)) in ordered.into_iter().enumerate() {
            let lef = match *k {
                0 => String::new(),
                1 => "L".into(),
                k => format!("L^{k}"),
            };
            push_signed_term(&mut out, i == 0, c, &format!("{}{}", atom.label(), lef));
        }
        write!(f, "{out}")
    }
}

impl Add for &MotiveClass {
    type Output = MotiveClass;
    fn add(self, rhs: Self) -> MotiveClass {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for MotiveClass {
    type Output = MotiveClass;
    fn add(mut self, rhs: Self) -> MotiveClass {
        self += &rhs;
        self
    }
}

impl AddAssign<&MotiveClass> for MotiveClass {
    fn add_assign(&mut self, rhs: &MotiveClass) {
        for ((a, k), c) in &rhs.terms {
            self.add_term(a.clone(), *k, c.clone());
        }
    }
}

impl Sub for &MotiveClass {
    type Output = MotiveClass;
    fn sub(self, rhs: Self) -> MotiveClass {
        self + &(-rhs)
    }
}

impl Sub for MotiveClass {
    type Output = MotiveClass;
    fn sub(self, rhs: Self) -> MotiveClass {
        &self - &rhs
    }
}

impl Neg for &MotiveClass {
    type Output = MotiveClass;
    fn neg(self) -> MotiveClass {
        MotiveClass { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }
}

impl Neg for MotiveClass {
    type Output = MotiveClass;
    fn neg(self) -> MotiveClass {
        -&self
    }
}

impl std::iter::Sum for MotiveClass {
    fn sum<I: Iterator<Item = MotiveClass>>(iter: I) -> Self {
        iter.fold(MotiveClass::zero(), |acc, x| acc + x)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    atom: String,
    lefschetz_power: i64,
    coeff: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e_polynomial: Option<EPolynomial>,
}

impl Serialize for MotiveClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.terms.iter().map(|((a, k), c)| TermRepr {
            atom: a.tag(),
            lefschetz_power: *k,
            coeff: c.to_string(),
            e_polynomial: match a {
                Atom::Opaque(o) => o.e_polynomial.clone(),
                _ => None,
            },
        }))
    }
}

fn parse_atom(tag: &str, e_polynomial: Option<EPolynomial>) -> Result<Atom, MotiveError> {
    if tag == "point" {
        return Ok(Atom::Point);
    }
    match tag.split_once(':') {
        Some(("elliptic", name)) if !name.is_empty() => Ok(Atom::elliptic(name)),
        Some(("opaque", name)) if !name.is_empty() => Ok(Atom::opaque(name, e_polynomial)),
        _ => Err(MotiveError::BadAtomTag(tag.to_string())),
    }
}

impl<'de> Deserialize<'de> for MotiveClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let mut out = MotiveClass::zero();
        for t in Vec::<TermRepr>::deserialize(d)? {
            let atom = parse_atom(&t.atom, t.e_polynomial).map_err(D::Error::custom)?;
            let c: BigInt = t.coeff.trim().parse().map_err(D::Error::custom)?;
            out.add_term(atom, t.lefschetz_power, c);
        }
        Ok(out)
    }
}
