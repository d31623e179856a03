//! Exact integer and rational linear algebra.
//!
//! Scalars are arbitrary precision (`BigInt`, `BigRational`); rationals are
//! kept in lowest terms with a positive denominator by construction. The
//! module also hosts the conformal order `⊑`, canonical sign representatives,
//! and an integer kernel lattice basis computed by unimodular column
//! reduction.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntScalar = BigInt;
pub type RatScalar = BigRational;

/// An integer vector of fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(entries: Vec<BigInt>) -> Self {
        IntVector(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        IntVector(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        IntVector(vec![BigInt::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = BigInt::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<BigInt> {
        self.0
    }

    pub fn get(&self, i: usize) -> &BigInt {
        &self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        assert_eq!(self.dim(), other.dim(), "dot product dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Exact inner product with a rational vector.
    pub fn dot_rat(&self, other: &[BigRational]) -> BigRational {
        assert_eq!(self.dim(), other.len(), "dot product dimension mismatch");
        self.0
            .iter()
            .zip(other)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, b)| b * BigRational::from_integer(a.clone()))
            .sum()
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn norm_inf(&self) -> BigInt {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn norm_1(&self) -> BigInt {
        self.0.iter().map(|x| x.abs()).sum()
    }

    /// The first `n` components.
    pub fn head(&self, n: usize) -> IntVector {
        IntVector(self.0[..n].to_vec())
    }

    pub fn concat(&self, other: &IntVector) -> IntVector {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        IntVector(v)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|x| !x.is_negative())
    }

    /// Componentwise `self <= other`.
    pub fn le_componentwise(&self, other: &IntVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|x| i64::try_from(x).ok()).collect()
    }
}

impl From<Vec<BigInt>> for IntVector {
    fn from(v: Vec<BigInt>) -> Self {
        IntVector(v)
    }
}

impl Add<&IntVector> for &IntVector {
    type Output = IntVector;
    fn add(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&IntVector> for &IntVector {
    type Output = IntVector;
    fn sub(self, rhs: &IntVector) -> IntVector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        IntVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        IntVector(self.0.iter().map(|x| -x).collect())
    }
}

impl Neg for IntVector {
    type Output = IntVector;
    fn neg(self) -> IntVector {
        -&self
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Dense row-major integer matrix with at least one column.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::InvalidInput("matrix must have at least one column".into()));
        }
        Error::check_dim(rows * cols, data.len())?;
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols > 0, "matrix must have at least one column");
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from `i64` rows; `cols` fixes the width when there are no rows.
    pub fn from_i64_rows(cols: usize, rows: &[Vec<i64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            Error::check_dim(cols, r.len())?;
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_rows(cols: usize, rows: &[IntVector]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            Error::check_dim(cols, r.dim())?;
            data.extend(r.entries().iter().cloned());
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> IntVector {
        IntVector(self.data[r * self.cols..(r + 1) * self.cols].to_vec())
    }

    pub fn row_vectors(&self) -> Vec<IntVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> IntVector {
        IntVector((0..self.rows).map(|r| self.get(r, c).clone()).collect())
    }

    pub fn mul_vec(&self, v: &IntVector) -> Result<IntVector> {
        Error::check_dim(self.cols, v.dim())?;
        Ok(IntVector(
            (0..self.rows)
                .map(|r| {
                    self.data[r * self.cols..(r + 1) * self.cols]
                        .iter()
                        .zip(v.entries())
                        .filter(|(_, b)| !b.is_zero())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        ))
    }

    /// True when `self · v = 0`.
    pub fn annihilates(&self, v: &IntVector) -> bool {
        self.mul_vec(v).map(|w| w.is_zero()).unwrap_or(false)
    }

    /// Appends `col` as a new last column.
    pub fn with_column(&self, col: &IntVector) -> Result<IntMatrix> {
        Error::check_dim(self.rows, col.dim())?;
        let cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend(self.data[r * self.cols..(r + 1) * self.cols].iter().cloned());
            data.push(col.get(r).clone());
        }
        IntMatrix::new(self.rows, cols, data)
    }

    /// Side-by-side concatenation `(self | other)`.
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        Error::check_dim(self.rows, other.rows)?;
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend(self.data[r * self.cols..(r + 1) * self.cols].iter().cloned());
            data.extend(other.data[r * other.cols..(r + 1) * other.cols].iter().cloned());
        }
        IntMatrix::new(self.rows, cols, data)
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        Error::check_dim(self.cols, other.cols)?;
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix::new(self.rows + other.rows, self.cols, data)
    }

    /// Rank over the rationals, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows).map(|r| self.row(r).0).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for r in rank + 1..m.len() {
                if m[r][c].is_zero() {
                    continue;
                }
                let (a, b) = (m[rank][c].clone(), m[r][c].clone());
                let pivot = m[rank].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot).skip(c) {
                    *x = &*x * &a - p * &b;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Parses the shared text layout: a `rows cols` header, then `rows × cols`
    /// whitespace-separated integers. Lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<IntMatrix> {
        let (rows, cols, entries) = parse_matrix_tokens(text)?;
        let mut data = Vec::with_capacity(entries.len());
        for (line, tok) in entries {
            data.push(parse_int(tok).ok_or_else(|| {
                Error::parse(line, format!("expected an integer, found `{tok}`"))
            })?);
        }
        IntMatrix::new(rows, cols, data)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).0.iter().map(|x| x.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigRational>) -> Result<Self> {
        Error::check_dim(rows * cols, data.len())?;
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigRational::one();
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::new();
        for r in rows {
            Error::check_dim(cols, r.len())?;
            data.extend(r.iter().map(|&x| BigRational::from_integer(x.into())));
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        RatMatrix {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<BigRational> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix> {
        Error::check_dim(self.cols, other.rows)?;
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix> {
        Error::check_dim(self.rows, other.rows)?;
        Error::check_dim(self.cols, other.cols)?;
        Ok(RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    /// Adds `lambda` to every diagonal entry.
    pub fn shift_diagonal(&self, lambda: &BigRational) -> RatMatrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            let v = m.get(i, i) + lambda;
            m.set(i, i, v);
        }
        m
    }

    /// Quadratic form `zᵀ M z` at an integer point.
    pub fn quadratic_form(&self, z: &IntVector) -> BigRational {
        let mut acc = BigRational::zero();
        for i in 0..self.rows {
            if z.get(i).is_zero() {
                continue;
            }
            for j in 0..self.cols {
                if z.get(j).is_zero() {
                    continue;
                }
                let zz = BigRational::from_integer(z.get(i) * z.get(j));
                acc += self.get(i, j) * zz;
            }
        }
        acc
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigRational>> = (0..self.rows).map(|r| self.row(r)).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for r in rank + 1..m.len() {
                if m[r][c].is_zero() {
                    continue;
                }
                let f = &m[r][c] / &m[rank][c];
                let pivot = m[rank].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot).skip(c) {
                    *x = &*x - &f * p;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Same layout as [`IntMatrix::parse`] with entries `p/q` or integers.
    pub fn parse(text: &str) -> Result<RatMatrix> {
        let (rows, cols, entries) = parse_matrix_tokens(text)?;
        let mut data = Vec::with_capacity(entries.len());
        for (line, tok) in entries {
            data.push(parse_rational(tok).ok_or_else(|| {
                Error::parse(line, format!("expected a rational, found `{tok}`"))
            })?);
        }
        RatMatrix::new(rows, cols, data)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(format_rational).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

type MatrixTokens<'a> = (usize, usize, Vec<(usize, &'a str)>);

fn parse_matrix_tokens(text: &str) -> Result<MatrixTokens<'_>> {
    let mut tokens = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));
    let mut header = |what: &str| -> Result<usize> {
        let (line, tok) = tokens
            .next()
            .ok_or_else(|| Error::parse(1, format!("missing {what} count in header")))?;
        tok.parse::<usize>()
            .map_err(|_| Error::parse(line, format!("invalid {what} count `{tok}`")))
    };
    let rows = header("row")?;
    let cols = header("column")?;
    if cols == 0 {
        return Err(Error::parse(1, "matrix must have at least one column"));
    }
    let entries: Vec<(usize, &str)> = tokens.collect();
    if entries.len() != rows * cols {
        let line = entries.last().map_or(1, |(l, _)| *l);
        return Err(Error::parse(
            line,
            format!("expected {} entries, found {}", rows * cols, entries.len()),
        ));
    }
    Ok((rows, cols, entries))
}

pub(crate) fn parse_int(tok: &str) -> Option<BigInt> {
    tok.parse::<BigInt>().ok()
}

/// Parses `p/q` or an integer literal; the result is in lowest terms.
pub fn parse_rational(tok: &str) -> Option<BigRational> {
    match tok.split_once('/') {
        Some((p, q)) => {
            let p = parse_int(p)?;
            let q = parse_int(q)?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => parse_int(tok).map(BigRational::from_integer),
    }
}

/// Integers print bare, everything else as `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(p.into())
}

/// The conformal order: `u ⊑ v` iff every component has `u_j v_j ≥ 0` and `|u_j| ≤ |v_j|`.
pub fn conformal_leq(u: &IntVector, v: &IntVector) -> Result<bool> {
    Error::check_dim(u.dim(), v.dim())?;
    Ok(u.entries().iter().zip(v.entries()).all(|(a, b)| {
        a.is_zero() || (a.signum() == b.signum() && a.abs() <= b.abs())
    }))
}

/// The representative of `±v` whose first nonzero entry is positive.
pub fn canonical_rep(v: &IntVector) -> Result<IntVector> {
    match v.entries().iter().find(|x| !x.is_zero()) {
        None => Err(Error::ZeroVector),
        Some(x) if x.is_negative() => Ok(-v),
        Some(_) => Ok(v.clone()),
    }
}

/// A lattice basis of `{v ∈ Zⁿ : A v = 0}`, in echelon form with positive pivots.
pub fn kernel_lattice_basis(a: &IntMatrix) -> Vec<IntVector> {
    let (d, n) = (a.rows(), a.cols());
    // Each working column carries its image under A on top of its coordinates.
    let mut cols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut c = a.column(j).into_entries();
            c.extend(IntVector::unit(n, j).into_entries());
            c
        })
        .collect();

    let mut pivot = 0;
    for r in 0..d {
        if pivot == n {
            break;
        }
        loop {
            let best = (pivot..n)
                .filter(|&k| !cols[k][r].is_zero())
                .min_by(|&x, &y| cols[x][r].abs().cmp(&cols[y][r].abs()));
            let Some(best) = best else { break };
            cols.swap(pivot, best);
            let mut done = true;
            for k in pivot + 1..n {
                if cols[k][r].is_zero() {
                    continue;
                }
                let q = cols[k][r].div_floor(&cols[pivot][r]);
                let (head, tail) = cols.split_at_mut(k);
                for (x, p) in tail[0].iter_mut().zip(&head[pivot]) {
                    *x -= &q * p;
                }
                if !cols[k][r].is_zero() {
                    done = false;
                }
            }
            if done {
                pivot += 1;
                break;
            }
        }
    }

    let basis: Vec<Vec<BigInt>> = cols[pivot..].iter().map(|c| c[d..].to_vec()).collect();
    echelon_reduce(basis).into_iter().map(IntVector).collect()
}

/// Row-echelon form of a lattice basis by unimodular row operations, with
/// positive pivots and entries above each pivot reduced into a centred range.
fn echelon_reduce(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let n = rows.first().map_or(0, Vec::len);
    let mut top = 0;
    for c in 0..n {
        if top == rows.len() {
            break;
        }
        loop {
            let best = (top..rows.len())
                .filter(|&r| !rows[r][c].is_zero())
                .min_by(|&x, &y| rows[x][c].abs().cmp(&rows[y][c].abs()));
            let Some(best) = best else { break };
            rows.swap(top, best);
            let mut done = true;
            for r in top + 1..rows.len() {
                if rows[r][c].is_zero() {
                    continue;
                }
                let q = rows[r][c].div_floor(&rows[top][c]);
                let (head, tail) = rows.split_at_mut(r);
                for (x, p) in tail[0].iter_mut().zip(&head[top]) {
                    *x -= &q * p;
                }
                if !rows[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                if rows[top][c].is_negative() {
                    for x in rows[top].iter_mut() {
                        *x = -&*x;
                    }
                }
                let p = rows[top][c].clone();
                for r in 0..top {
                    let q = centred_quotient(&rows[r][c], &p);
                    if q.is_zero() {
                        continue;
                    }
                    let (head, tail) = rows.split_at_mut(top);
                    for (x, y) in head[r].iter_mut().zip(&tail[0]) {
                        *x -= &q * y;
                    }
                }
                top += 1;
                break;
            }
        }
    }
    rows
}

/// `q` with `x - q p` in `(-p/2, p/2]`, for `p > 0`.
fn centred_quotient(x: &BigInt, p: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (x * &two + p - BigInt::one()).div_floor(&(p * &two))
}
