//! Exact integer matrix algebra.
//!
//! Every homology group, cokernel order and Gram discriminant in the crate is
//! computed here, over arbitrary-precision integers. The Smith normal form uses
//! the smallest-absolute-value pivot of the remaining submatrix (ties broken by
//! row-major position), which keeps the result deterministic for a fixed input.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix shape {rows}x{cols} does not match {len} entries")]
    EntryCount { rows: usize, cols: usize, len: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LinalgError> {
        if entries.len() != rows * cols {
            return Err(LinalgError::EntryCount { rows, cols, len: entries.len() });
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows of machine integers. Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Copy>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            entries.extend(row.iter().map(|&x| x.into()));
        }
        IntMatrix { rows: r, cols: c, entries }
    }

    /// Builds a `rows x cols` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let cols = columns.len();
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (i, x) in col.iter().enumerate() {
                m.entries[i * cols + j] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.entries[i * cols + i] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "determinant of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        invariant_factors(self).iter().filter(|d| !d.is_zero()).count()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<IntLiteral>,
}

/// Integers travel as decimal strings; plain JSON numbers are accepted on input.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntLiteral {
    Text(String),
    Number(i64),
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| IntLiteral::Text(x.to_string())).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        let entries = repr
            .entries
            .into_iter()
            .map(|lit| match lit {
                IntLiteral::Text(s) => s
                    .trim()
                    .parse::<BigInt>()
                    .map_err(|e| D::Error::custom(format!("bad integer {s:?}: {e}"))),
                IntLiteral::Number(n) => Ok(BigInt::from(n)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        IntMatrix::new(repr.rows, repr.cols, entries).map_err(D::Error::custom)
    }
}

/// `U * A * V = S` with `U`, `V` unimodular and `S` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// `min(rows, cols)` entries; zero exactly past the rational rank.
    #[serde(with = "bigint_strings")]
    pub diagonal: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Structure of `Z^rows / im(A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CokernelStructure {
    pub free_rank: usize,
    #[serde(with = "bigint_strings")]
    pub torsion: Vec<BigInt>,
}

impl CokernelStructure {
    /// Order of the torsion subgroup (1 when torsion-free).
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.is_empty()
    }
}

pub(crate) mod bigint_strings {
    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| s.parse::<BigInt>().map_err(D::Error::custom))
            .collect()
    }
}

#[derive(Clone, Copy, Default)]
struct Track {
    u: bool,
    u_inv: bool,
    v: bool,
    v_inv: bool,
}

/// Working state of the elimination. `vt` and `u_inv_t` are stored transposed
/// so that the column operations they receive become row operations.
struct SnfWork {
    m: usize,
    n: usize,
    a: Vec<Vec<BigInt>>,
    u: Option<Vec<Vec<BigInt>>>,
    u_inv_t: Option<Vec<Vec<BigInt>>>,
    vt: Option<Vec<Vec<BigInt>>>,
    v_inv: Option<Vec<Vec<BigInt>>>,
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::one();
            r
        })
        .collect()
}

/// `dst += c * src` where both are rows of the same table.
fn axpy_rows(table: &mut [Vec<BigInt>], dst: usize, src: usize, c: &BigInt) {
    debug_assert_ne!(dst, src);
    let (d, s) = if dst < src {
        let (lo, hi) = table.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = table.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in d.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x += c * y;
        }
    }
}

impl SnfWork {
    fn new(a: &IntMatrix, track: Track) -> Self {
        let (m, n) = a.shape();
        SnfWork {
            m,
            n,
            a: (0..m).map(|i| a.row(i).to_vec()).collect(),
            u: track.u.then(|| identity_rows(m)),
            u_inv_t: track.u_inv.then(|| identity_rows(m)),
            vt: track.v.then(|| identity_rows(n)),
            v_inv: track.v_inv.then(|| identity_rows(n)),
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
        if let Some(t) = &mut self.u_inv_t {
            t.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(vt) = &mut self.vt {
            vt.swap(i, j);
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap(i, j);
        }
    }

    /// row_dst += c * row_src, starting at column `from` (earlier columns of
    /// the working rows are already zero).
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt, from: usize) {
        let (d, s) = if dst < src {
            let (lo, hi) = self.a.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = self.a.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        for (x, y) in d[from..].iter_mut().zip(s[from..].iter()) {
            if !y.is_zero() {
                *x += c * y;
            }
        }
        if let Some(u) = &mut self.u {
            axpy_rows(u, dst, src, c);
        }
        if let Some(t) = &mut self.u_inv_t {
            // U^{-1} <- U^{-1} E^{-1}: column src -= c * column dst.
            axpy_rows(t, src, dst, &-c);
        }
    }

    /// col_dst += c * col_src, touching rows `from..`.
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt, from: usize) {
        for row in &mut self.a[from..] {
            if !row[src].is_zero() {
                let delta = c * &row[src];
                row[dst] += delta;
            }
        }
        if let Some(vt) = &mut self.vt {
            axpy_rows(vt, dst, src, c);
        }
        if let Some(vi) = &mut self.v_inv {
            // V^{-1} <- F^{-1} V^{-1}: row src -= c * row dst.
            axpy_rows(vi, src, dst, &-c);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -std::mem::take(x);
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -std::mem::take(x);
            }
        }
        if let Some(t) = &mut self.u_inv_t {
            for x in &mut t[i] {
                *x = -std::mem::take(x);
            }
        }
    }

    /// Smallest nonzero |entry| in rows/cols `t..`, first in row-major order.
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if x.magnitude().is_one() {
                    return Some((i, j));
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => x.magnitude().cmp(self.a[bi][bj].magnitude()) == Ordering::Less,
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    fn run(&mut self) {
        let steps = self.m.min(self.n);
        let mut t = 0;
        while t < steps {
            let Some((pi, pj)) = self.find_pivot(t) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut remainder = false;
                for i in t + 1..self.m {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = &self.a[i][t] / &self.a[t][t];
                    if !q.is_zero() {
                        self.add_row(i, t, &-q, t);
                    }
                    if !self.a[i][t].is_zero() {
                        remainder = true;
                    }
                }
                for j in t + 1..self.n {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = &self.a[t][j] / &self.a[t][t];
                    if !q.is_zero() {
                        self.add_col(j, t, &-q, t);
                    }
                    if !self.a[t][j].is_zero() {
                        remainder = true;
                    }
                }
                if remainder {
                    let (pi, pj) = self.find_pivot(t).expect("nonzero entries remain");
                    self.swap_rows(t, pi);
                    self.swap_cols(t, pj);
                    continue;
                }
                // Pivot row and column are clear; enforce divisibility.
                let pivot = self.a[t][t].clone();
                let offender = (t + 1..self.m).find(|&i| {
                    self.a[i][t + 1..].iter().any(|x| !x.is_zero() && !x.is_multiple_of(&pivot))
                });
                match offender {
                    Some(i) => self.add_row(t, i, &BigInt::one(), t),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
    }

    fn diagonal(&self) -> Vec<BigInt> {
        (0..self.m.min(self.n)).map(|i| self.a[i][i].clone()).collect()
    }
}

fn rows_to_matrix(rows: Vec<Vec<BigInt>>, m: usize, n: usize) -> IntMatrix {
    IntMatrix::new(m, n, rows.into_iter().flatten().collect()).expect("shape is consistent")
}

/// Smith decomposition together with the inverses of both transforms.
#[derive(Clone, Debug)]
pub struct SmithWithInverses {
    pub decomposition: SmithDecomposition,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let mut w = SnfWork::new(a, Track { u: true, v: true, ..Track::default() });
    w.run();
    finish(w)
}

pub fn smith_with_inverses(a: &IntMatrix) -> SmithWithInverses {
    let mut w = SnfWork::new(a, Track { u: true, u_inv: true, v: true, v_inv: true });
    w.run();
    let (m, n) = (w.m, w.n);
    let u_inv = rows_to_matrix(w.u_inv_t.take().unwrap(), m, m).transpose();
    let v_inv = rows_to_matrix(w.v_inv.take().unwrap(), n, n);
    SmithWithInverses { decomposition: finish(w), u_inv, v_inv }
}

fn finish(mut w: SnfWork) -> SmithDecomposition {
    let (m, n) = (w.m, w.n);
    let diagonal = w.diagonal();
    let u = rows_to_matrix(w.u.take().unwrap(), m, m);
    let v = rows_to_matrix(w.vt.take().unwrap(), n, n).transpose();
    SmithDecomposition { u, s: IntMatrix::diagonal(m, n, &diagonal), v, diagonal }
}

/// Diagonal of the Smith form without building either transform.
pub fn invariant_factors(a: &IntMatrix) -> Vec<BigInt> {
    let mut w = SnfWork::new(a, Track::default());
    w.run();
    w.diagonal()
}

pub fn cokernel_structure(a: &IntMatrix) -> CokernelStructure {
    let diag = invariant_factors(a);
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    CokernelStructure {
        free_rank: a.rows() - rank,
        torsion: diag.into_iter().filter(|d| *d > BigInt::one()).collect(),
    }
}

/// Flips the sign of a vector so that its first nonzero entry is positive.
pub fn normalize_sign(v: &mut [BigInt]) {
    if v.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
        for x in v.iter_mut() {
            *x = -std::mem::take(x);
        }
    }
}

/// A Z-basis of `{x : A x = 0}` as the columns of a `cols x k` matrix.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let mut w = SnfWork::new(a, Track { v: true, ..Track::default() });
    w.run();
    let rank = w.diagonal().iter().filter(|d| !d.is_zero()).count();
    let n = a.cols();
    let vt = w.vt.take().unwrap();
    let basis: Vec<Vec<BigInt>> = vt
        .into_iter()
        .skip(rank)
        .map(|mut col| {
            normalize_sign(&mut col);
            col
        })
        .collect();
    IntMatrix::from_columns(n, &basis)
}

/// Determinant of `[v_i^T P v_j]`. The empty family has determinant 1.
pub fn gram_determinant(vectors: &[Vec<BigInt>], pairing: &IntMatrix) -> Result<BigRational, LinalgError> {
    Ok(BigRational::from_integer(gram_matrix(vectors, pairing)?.determinant()?))
}

pub fn gram_matrix(vectors: &[Vec<BigInt>], pairing: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    if pairing.rows() != pairing.cols() {
        return Err(LinalgError::DimensionMismatch("pairing matrix is not square".into()));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != pairing.rows()) {
        return Err(LinalgError::DimensionMismatch(format!(
            "vector of length {} against a {}x{} pairing",
            v.len(),
            pairing.rows(),
            pairing.cols()
        )));
    }
    let images: Vec<Vec<BigInt>> = vectors.iter().map(|v| pairing.mul_vec(v)).collect::<Result<_, _>>()?;
    let k = vectors.len();
    let mut g = IntMatrix::zeros(k, k);
    for (i, x) in vectors.iter().enumerate() {
        for (j, y) in images.iter().enumerate() {
            let dot: BigInt = x.iter().zip(y).map(|(a, b)| a * b).sum();
            g.set(i, j, dot);
        }
    }
    Ok(g)
}

/// Exact integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}
