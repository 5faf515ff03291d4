//! Exact integer and rational linear algebra.
//!
//! Everything here works over arbitrary-precision integers or reduced
//! rationals. Nothing in the crate touches floating point.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("vectors must have dimension at least 2 (got {0})")]
    Dimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation needs 3-dimensional vectors (got {0})")]
    NotThreeDimensional(usize),
    #[error("generators span the zero lattice")]
    ZeroSpan,
    #[error("no generators given")]
    NoGenerators,
    #[error("shape mismatch: {0}")]
    Shape(String),
}

impl LatticeError {
    pub fn code(&self) -> &'static str {
        match self {
            LatticeError::Dimension(_) => "DIMENSION",
            LatticeError::DimensionMismatch(..) | LatticeError::NotThreeDimensional(_) => {
                "DIMENSION_MISMATCH"
            }
            LatticeError::ZeroSpan => "ZERO_SPAN",
            LatticeError::NoGenerators => "NO_GENERATORS",
            LatticeError::Shape(_) => "SHAPE_MISMATCH",
        }
    }
}

/// Integer vector of dimension at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(coords: Vec<BigInt>) -> Result<Self, LatticeError> {
        if coords.len() < 2 {
            return Err(LatticeError::Dimension(coords.len()));
        }
        Ok(IntVector(coords))
    }

    pub fn from_i64s(coords: &[i64]) -> Result<Self, LatticeError> {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 2, "IntVector dimension must be at least 2");
        IntVector(vec![BigInt::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<BigInt> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Euclidean pairing. Panics on a dimension mismatch.
    pub fn dot(&self, other: &IntVector) -> BigInt {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.dim(), other.dim(), "add: dimension mismatch");
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.dim(), other.dim(), "sub: dimension mismatch");
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|a| a * k).collect())
    }

    /// Exact division of every coordinate; `None` if some coordinate is not divisible.
    pub fn div_exact(&self, k: &BigInt) -> Option<IntVector> {
        if k.is_zero() {
            return None;
        }
        let mut out = Vec::with_capacity(self.dim());
        for c in &self.0 {
            let (q, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(IntVector(out))
    }

    /// gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn to_rational(&self) -> RationalVector {
        RationalVector(self.0.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Coordinates as `i64` when they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|c| i64::try_from(c).ok()).collect()
    }
}

impl From<[i64; 2]> for IntVector {
    fn from(c: [i64; 2]) -> Self {
        IntVector(c.iter().map(|&x| BigInt::from(x)).collect())
    }
}

impl From<[i64; 3]> for IntVector {
    fn from(c: [i64; 3]) -> Self {
        IntVector(c.iter().map(|&x| BigInt::from(x)).collect())
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Point of the affine space with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(Vec<BigRational>);

impl RationalVector {
    pub fn new(coords: Vec<BigRational>) -> Result<Self, LatticeError> {
        if coords.len() < 2 {
            return Err(LatticeError::Dimension(coords.len()));
        }
        Ok(RationalVector(coords))
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 2, "RationalVector dimension must be at least 2");
        RationalVector(vec![BigRational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }

    pub fn sub(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), other.dim(), "sub: dimension mismatch");
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &RationalVector) -> RationalVector {
        assert_eq!(self.dim(), other.dim(), "add: dimension mismatch");
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self + t * dir`.
    pub fn offset(&self, dir: &IntVector, t: &BigRational) -> RationalVector {
        assert_eq!(self.dim(), dir.dim(), "offset: dimension mismatch");
        RationalVector(
            self.0
                .iter()
                .zip(dir.coords())
                .map(|(a, d)| a + t * BigRational::from_integer(d.clone()))
                .collect(),
        )
    }

    pub fn dot_int(&self, v: &IntVector) -> BigRational {
        assert_eq!(self.dim(), v.dim(), "dot: dimension mismatch");
        self.0
            .iter()
            .zip(v.coords())
            .map(|(a, b)| a * BigRational::from_integer(b.clone()))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// The scalar `t` with `self == t * dir`, if it exists.
    pub fn as_multiple_of(&self, dir: &IntVector) -> Option<BigRational> {
        if self.dim() != dir.dim() || dir.is_zero() {
            return None;
        }
        let pivot = dir.coords().iter().position(|c| !c.is_zero())?;
        let t = &self.0[pivot] / BigRational::from_integer(dir.coords()[pivot].clone());
        let matches = self
            .0
            .iter()
            .zip(dir.coords())
            .all(|(a, d)| *a == &t * BigRational::from_integer(d.clone()));
        matches.then_some(t)
    }

    pub fn midpoint(&self, other: &RationalVector) -> RationalVector {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        RationalVector(self.0.iter().zip(&other.0).map(|(a, b)| (a + b) * &half).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

const SAFE_INTEGER: i64 = (1 << 53) - 1;

/// Serializes an integer as a JSON number inside the safe range, else as a string.
pub fn serialize_int<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(x) {
        Ok(v) if v.abs() <= SAFE_INTEGER => s.serialize_i64(v),
        _ => s.serialize_str(&x.to_string()),
    }
}

/// `p/q` in lowest terms, or `p` for integers.
pub fn format_rational(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn serialize_rational<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

impl serde::Serialize for IntVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for c in &self.0 {
            seq.serialize_element(&IntJson(c))?;
        }
        seq.end()
    }
}

impl serde::Serialize for RationalVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for c in &self.0 {
            seq.serialize_element(&format_rational(c))?;
        }
        seq.end()
    }
}

/// Wrapper giving a `BigInt` the JSON integer encoding.
pub struct IntJson<'a>(pub &'a BigInt);

impl serde::Serialize for IntJson<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_int(self.0, s)
    }
}

/// Splits `v` as `g * u` with `g >= 0` and `u` primitive.
///
/// `u` is normalized so its first nonzero coordinate is positive, so
/// `v == g * u` holds up to sign.
pub fn gcd_primitive(v: &IntVector) -> (BigInt, IntVector) {
    let g = v.content();
    if g.is_zero() {
        return (g, v.clone());
    }
    let u = v.div_exact(&g).expect("content divides every coordinate");
    (g, normalize_sign(u))
}

/// Primitive integer vector positively parallel to a nonzero rational vector.
pub fn primitive_direction(v: &RationalVector) -> Option<IntVector> {
    if v.is_zero() {
        return None;
    }
    let l = v.coords().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = v.coords().iter().map(|c| (c * BigRational::from_integer(l.clone())).to_integer()).collect();
    let iv = IntVector(ints);
    let g = iv.content();
    iv.div_exact(&g)
}

/// Flips `v` so its first nonzero coordinate is positive.
pub fn normalize_sign(v: IntVector) -> IntVector {
    match v.coords().iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_negative() => v.neg(),
        _ => v,
    }
}

fn require_3d(v: &IntVector) -> Result<(), LatticeError> {
    if v.dim() != 3 {
        return Err(LatticeError::NotThreeDimensional(v.dim()));
    }
    Ok(())
}

/// Standard vector product in Z^3.
pub fn cross(u: &IntVector, v: &IntVector) -> Result<IntVector, LatticeError> {
    require_3d(u)?;
    require_3d(v)?;
    let a = u.coords();
    let b = v.coords();
    Ok(IntVector(vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]))
}

/// Mixed product `(u x v) . w`, the determinant with rows `u, v, w`.
pub fn mixed(u: &IntVector, v: &IntVector, w: &IntVector) -> Result<BigInt, LatticeError> {
    require_3d(w)?;
    Ok(cross(u, v)?.dot(w))
}

/// 2x2 determinant of planar vectors.
pub fn det2(u: &IntVector, v: &IntVector) -> Result<BigInt, LatticeError> {
    if u.dim() != 2 || v.dim() != 2 {
        return Err(LatticeError::DimensionMismatch(u.dim(), v.dim()));
    }
    let a = u.coords();
    let b = v.coords();
    Ok(&a[0] * &b[1] - &a[1] * &b[0])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, LatticeError> {
        if rows == 0 || cols == 0 {
            return Err(LatticeError::Shape(format!("{rows}x{cols} matrix")));
        }
        if entries.len() != rows * cols {
            return Err(LatticeError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LatticeError::Shape("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flat_map(|row| row.iter().map(|&x| BigInt::from(x))).collect())
    }

    pub fn from_rows(rows: &[IntVector]) -> Result<Self, LatticeError> {
        let c = rows.first().ok_or(LatticeError::NoGenerators)?.dim();
        if let Some(bad) = rows.iter().find(|r| r.dim() != c) {
            return Err(LatticeError::DimensionMismatch(c, bad.dim()));
        }
        Self::new(rows.len(), c, rows.iter().flat_map(|r| r.coords().iter().cloned()).collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        IntMatrix { rows: n, cols: n, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
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

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        IntMatrix::new(self.rows, other.cols, out)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j).clone());
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, entries: out }
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LatticeError> {
        if !self.is_square() {
            return Err(LatticeError::Shape(format!(
                "determinant of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
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
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * k;
            self.entries[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * k;
            self.entries[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `U * M * V == D`, with `U` and `V` unimodular and `D` the Smith form.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// Nonzero diagonal entries of `D`, in order.
    pub fn divisors(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n)
            .map(|i| self.d.get(i, i).clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().len()
    }
}

/// Smith normal form by elementary row and column operations.
///
/// The pivot is the entry of smallest absolute value in the trailing
/// submatrix (lowest row, then lowest column, on ties).
pub fn smith_normal_form(m: &IntMatrix) -> SnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = a.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if pivot.is_none_or(|(pi, pj)| x.abs() < a.get(pi, pj).abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return SnfResult { u, d: a, v };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -a.get(i, t).div_floor(&p);
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                clean &= a.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -a.get(t, j).div_floor(&p);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                clean &= a.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a.get(i, j).mod_floor(&p).is_zero());
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfResult { u, d: a, v }
}

/// Index of the lattice generated by `gens` inside its saturation.
pub fn lattice_index(gens: &[IntVector]) -> Result<BigInt, LatticeError> {
    if gens.is_empty() {
        return Err(LatticeError::NoGenerators);
    }
    if gens.iter().all(IntVector::is_zero) {
        return Err(LatticeError::ZeroSpan);
    }
    let m = IntMatrix::from_rows(gens)?;
    Ok(smith_normal_form(&m).divisors().iter().product())
}

/// Extended gcd: returns `(g, x, y)` with `a*x + b*y == g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Unimodular `V` (columns) with `row . V == (g, 0, ..., 0)`, `g >= 0`.
///
/// Coordinates are folded into the first column left to right.
pub fn reduce_row(row: &IntVector) -> (BigInt, IntMatrix) {
    let n = row.dim();
    let mut v = IntMatrix::identity(n);
    let mut r: Vec<BigInt> = row.coords().to_vec();
    for j in 1..n {
        if r[j].is_zero() {
            continue;
        }
        let (g, x, y) = ext_gcd(&r[0], &r[j]);
        let a = &r[0] / &g;
        let b = &r[j] / &g;
        // [c0 cj] <- [c0 cj] * [[x, -b], [y, a]], determinant x*a + y*b == 1
        for i in 0..n {
            let c0 = v.get(i, 0).clone();
            let cj = v.get(i, j).clone();
            v.set(i, 0, &x * &c0 + &y * &cj);
            v.set(i, j, &a * &cj - &b * &c0);
        }
        r[0] = g;
        r[j] = BigInt::zero();
    }
    if r[0].is_negative() {
        for i in 0..n {
            let c = -v.get(i, 0);
            v.set(i, 0, c);
        }
        r[0] = -r[0].clone();
    }
    (r[0].clone(), v)
}

/// An integer vector `a` with `a . c == 1`, for primitive `c`.
pub fn unit_pairing_vector(c: &IntVector) -> Option<IntVector> {
    let (g, v) = reduce_row(c);
    if !g.is_one() {
        return None;
    }
    IntVector::new(v.column(0)).ok()
}

/// Integer vectors `(a, b)` with `det(u, a, b) == 1`, for primitive `u` in Z^3.
pub fn complete_basis(u: &IntVector) -> Option<(IntVector, IntVector)> {
    if u.dim() != 3 || !u.is_primitive() {
        return None;
    }
    // u . V == (1, 0, 0), so u is the first row of V^-1.
    let (_, v) = reduce_row(u);
    let inv_t = inverse_unimodular(&v)?.transpose();
    let a = IntVector(inv_t.column(1));
    let mut b = IntVector(inv_t.column(2));
    let c0 = IntVector(inv_t.column(0));
    debug_assert_eq!(c0, *u);
    if mixed(u, &a, &b).ok()?.is_negative() {
        b = b.neg();
    }
    Some((a, b))
}

/// Inverse of a unimodular matrix via the adjugate.
pub fn inverse_unimodular(m: &IntMatrix) -> Option<IntMatrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let det = m.det().ok()?;
    if det.abs() != BigInt::one() {
        return None;
    }
    if n == 1 {
        return IntMatrix::new(1, 1, vec![det]).ok();
    }
    let mut out = vec![BigInt::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<BigInt> = (0..n)
                .filter(|&r| r != i)
                .flat_map(|r| (0..n).filter(move |&c| c != j).map(move |c| (r, c)))
                .map(|(r, c)| m.get(r, c).clone())
                .collect();
            let cof = IntMatrix::new(n - 1, n - 1, minor).ok()?.det().ok()?;
            let cof = if (i + j) % 2 == 0 { cof } else { -cof };
            // adj[j][i] = cof[i][j]
            out[j * n + i] = &cof * &det;
        }
    }
    IntMatrix::new(n, n, out).ok()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Result<Self, LatticeError> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(LatticeError::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, entries })
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        RationalMatrix {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Unique(Vec<BigRational>),
    Inconsistent,
    Underdetermined {
        particular: Vec<BigRational>,
        kernel: Vec<Vec<BigRational>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSolution {
    pub outcome: SolveOutcome,
    pub rank: usize,
    /// Determinant, present for square systems.
    pub det: Option<BigRational>,
}

/// Gaussian elimination over the rationals.
pub fn solve_exact(m: &RationalMatrix, b: &[BigRational]) -> Result<ExactSolution, LatticeError> {
    if b.len() != m.rows() {
        return Err(LatticeError::Shape(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            m.rows()
        )));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let mut r: Vec<BigRational> = (0..cols).map(|j| m.get(i, j).clone()).collect();
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut det = BigRational::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            det = -det;
        }
        let inv = a[r][c].recip();
        det *= &a[r][c];
        for x in &mut a[r][c..=cols] {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            let pivot_row = a[r].clone();
            for (x, p) in a[i][c..=cols].iter_mut().zip(&pivot_row[c..=cols]) {
                *x -= p * &f;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let rank = pivots.len();
    let det = (rows == cols).then(|| if rank == rows { det } else { BigRational::zero() });
    if (rank..rows).any(|i| !a[i][cols].is_zero()) {
        return Ok(ExactSolution { outcome: SolveOutcome::Inconsistent, rank, det });
    }
    let mut particular = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = a[i][cols].clone();
    }
    if rank == cols {
        return Ok(ExactSolution { outcome: SolveOutcome::Unique(particular), rank, det });
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut k = vec![BigRational::zero(); cols];
            k[f] = BigRational::one();
            for (i, &c) in pivots.iter().enumerate() {
                k[c] = -a[i][f].clone();
            }
            k
        })
        .collect();
    Ok(ExactSolution {
        outcome: SolveOutcome::Underdetermined { particular, kernel },
        rank,
        det,
    })
}

/// Rank of a list of integer vectors over Q.
pub fn rank(vectors: &[IntVector]) -> usize {
    if vectors.is_empty() || vectors.iter().all(IntVector::is_zero) {
        return 0;
    }
    match IntMatrix::from_rows(vectors) {
        Ok(m) => smith_normal_form(&m).rank(),
        Err(_) => 0,
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> IntVector {
        IntVector::from_i64s(c).unwrap()
    }

    #[test]
    fn gcd_primitive_examples() {
        let (g, u) = gcd_primitive(&v(&[0, 0, 0]));
        assert_eq!(g, BigInt::zero());
        assert_eq!(u, v(&[0, 0, 0]));

        let (g, u) = gcd_primitive(&v(&[2, -3, 0]));
        assert_eq!(g, BigInt::one());
        assert_eq!(u, v(&[2, -3, 0]));

        let (g, u) = gcd_primitive(&v(&[-6, 4, -10]));
        assert_eq!(g, BigInt::from(2));
        assert_eq!(u, v(&[3, -2, 5]));
        assert_eq!(u.scale(&g), v(&[6, -4, 10]));
    }

    #[test]
    fn cross_examples() {
        assert_eq!(cross(&v(&[-1, 0, 0]), &v(&[0, 1, 2])).unwrap(), v(&[0, 2, -1]));
        assert_eq!(cross(&v(&[1, 1, 0]), &v(&[0, 1, 5])).unwrap(), v(&[5, -5, 1]));
        assert!(cross(&v(&[4, -7, 2]), &v(&[4, -7, 2])).unwrap().is_zero());
        assert_eq!(
            cross(&v(&[1, 0]), &v(&[0, 1, 0])).unwrap_err().code(),
            "DIMENSION_MISMATCH"
        );
    }

    #[test]
    fn mixed_examples() {
        assert_eq!(mixed(&v(&[1, 0, 0]), &v(&[0, 1, 0]), &v(&[0, 0, 1])).unwrap(), BigInt::one());
        assert_eq!(
            mixed(&v(&[0, 2, -1]), &v(&[-3, 0, 1]), &v(&[5, -5, 1])).unwrap(),
            BigInt::one()
        );
        for (p, q) in [(1, 0), (5, 2), (7, 3), (12, -5)] {
            assert_eq!(
                mixed(&v(&[1, 0, 0]), &v(&[-q, p, 0]), &v(&[0, 0, 1])).unwrap(),
                BigInt::from(p)
            );
        }
    }

    #[test]
    fn snf_examples() {
        let id = IntMatrix::identity(3);
        let r = smith_normal_form(&id);
        assert_eq!(r.d, id);

        let m = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]).unwrap();
        let r = smith_normal_form(&m);
        assert_eq!(r.divisors(), vec![BigInt::from(1), BigInt::from(6)]);

        let m = IntMatrix::from_i64_rows(&[&[2, 4, 6]]).unwrap();
        let r = smith_normal_form(&m);
        assert_eq!(r.divisors(), vec![BigInt::from(2)]);
        assert_eq!(r.u.mul(&m).unwrap().mul(&r.v).unwrap(), r.d);
    }

    #[test]
    fn lattice_index_examples() {
        assert_eq!(lattice_index(&[v(&[0, -1, -1]), v(&[1, 1, -1])]).unwrap(), BigInt::one());
        assert_eq!(lattice_index(&[v(&[1, 0, 0]), v(&[0, 2, 0])]).unwrap(), BigInt::from(2));
        assert_eq!(lattice_index(&[v(&[1, 0, 0])]).unwrap(), BigInt::one());
        assert_eq!(lattice_index(&[v(&[0, 0, 0])]).unwrap_err(), LatticeError::ZeroSpan);
        assert_eq!(lattice_index(&[]).unwrap_err(), LatticeError::NoGenerators);
    }

    #[test]
    fn solve_exact_examples() {
        let id = RationalMatrix::from_int(&IntMatrix::identity(3));
        let b = vec![rational(1, 2), rational(-3, 1), rational(0, 1)];
        let s = solve_exact(&id, &b).unwrap();
        assert_eq!(s.outcome, SolveOutcome::Unique(b.clone()));
        assert_eq!(s.det, Some(BigRational::one()));

        let rho = IntMatrix::from_i64_rows(&[&[0, 2, -1], &[-3, 0, 1], &[5, -5, 1]]).unwrap();
        let s = solve_exact(&RationalMatrix::from_int(&rho), &vec![BigRational::zero(); 3]).unwrap();
        assert_eq!(s.outcome, SolveOutcome::Unique(vec![BigRational::zero(); 3]));
        assert_eq!(s.det.unwrap().abs(), BigRational::one());

        let sing = IntMatrix::from_i64_rows(&[&[1, 2], &[2, 4]]).unwrap();
        let s = solve_exact(&RationalMatrix::from_int(&sing), &vec![BigRational::zero(); 2]).unwrap();
        match s.outcome {
            SolveOutcome::Underdetermined { kernel, .. } => assert_eq!(kernel.len(), 1),
            other => panic!("expected underdetermined, got {other:?}"),
        }
        assert_eq!(s.det, Some(BigRational::zero()));

        let s = solve_exact(&RationalMatrix::from_int(&sing), &[rational(1, 1), rational(0, 1)])
            .unwrap();
        assert_eq!(s.outcome, SolveOutcome::Inconsistent);
    }

    #[test]
    fn bareiss_matches_small_cases() {
        let m = IntMatrix::from_i64_rows(&[&[0, 2, -1], &[-3, 0, 1], &[5, -5, 1]]).unwrap();
        assert_eq!(m.det().unwrap(), BigInt::one());
        let m = IntMatrix::from_i64_rows(&[&[1, 2], &[1, 2]]).unwrap();
        assert_eq!(m.det().unwrap(), BigInt::zero());
    }

    #[test]
    fn reduce_row_is_unimodular() {
        for c in [[0, 2, -1], [6, 10, 15], [-4, 0, 0], [0, 0, 7]] {
            let row = v(&c);
            let (g, vm) = reduce_row(&row);
            assert_eq!(vm.det().unwrap().abs(), BigInt::one());
            let r = IntMatrix::from_rows(std::slice::from_ref(&row)).unwrap().mul(&vm).unwrap();
            assert_eq!(r.get(0, 0), &g);
            assert!(r.row(0)[1..].iter().all(Zero::is_zero));
            assert_eq!(g, row.content());
        }
    }

    #[test]
    fn complete_basis_examples() {
        for c in [[0, 0, 1], [1, 1, 0], [2, 3, 5], [-3, 7, 11]] {
            let u = v(&c);
            let (a, b) = complete_basis(&u).unwrap();
            assert_eq!(mixed(&u, &a, &b).unwrap().abs(), BigInt::one());
        }
        assert!(complete_basis(&v(&[2, 4, 6])).is_none());
    }
}
