//! Exact rational linear algebra.
//!
//! Everything downstream (cocycle tests, cohomology, extension and
//! deformation solves) reduces to rank, kernel and affine solves over ℚ.
//! Elimination always produces the reduced row echelon form, so kernel bases
//! and particular solutions are canonical and reproducible bit-for-bit.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. `BigRational` keeps numerator and denominator
/// coprime with a positive denominator.
pub type Scalar = BigRational;

pub fn q(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"` (optional sign, surrounding whitespace ignored).
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

/// Canonical text form: `"p"` when the denominator is one, else `"p/q"`.
pub fn format_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn zeros(n: usize) -> Vec<Scalar> {
    vec![Scalar::zero(); n]
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `y += s * x`
pub fn axpy(y: &mut [Scalar], s: &Scalar, x: &[Scalar]) {
    debug_assert_eq!(y.len(), x.len());
    if s.is_zero() {
        return;
    }
    for (yi, xi) in y.iter_mut().zip(x) {
        if !xi.is_zero() {
            *yi += s * xi;
        }
    }
}

pub fn add_vec(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_vec(s: &Scalar, a: &[Scalar]) -> Vec<Scalar> {
    a.iter().map(|x| s * x).collect()
}

/// Dense row-major matrix over ℚ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: zeros(rows * cols) }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn diag(d: &[Scalar]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Matrix { rows, cols, entries })
    }

    /// Builds from row vectors; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
            .expect("rectangular literal")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.entries)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { rows: self.rows, cols: self.cols, entries: add_vec(&self.entries, &other.entries) }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { rows: self.rows, cols: self.cols, entries: sub_vec(&self.entries, &other.entries) }
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, entries: scale_vec(s, &self.entries) }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&-Scalar::one())
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square());
        (0..e).fold(Matrix::identity(self.rows), |acc, _| acc.mul(self))
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &Matrix, b: &Matrix, c: &Matrix, d: &Matrix) -> Matrix {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = Matrix::zeros(a.rows + c.rows, a.cols + b.cols);
        for (blk, r0, c0) in [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)] {
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    m[(r0 + i, c0 + j)] = blk[(i, j)].clone();
                }
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(format_scalar).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination to reduced row echelon form. Pivot rows are
/// chosen as the first nonzero entry at or below the current row, which
/// keeps the result independent of anything but the input.
pub fn rref(m: &Matrix) -> Echelon {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in c..cols {
                a.entries.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a[(r, c)].recip();
        for j in c..cols {
            if !a[(r, j)].is_zero() {
                let v = &a[(r, j)] * &inv;
                a[(r, j)] = v;
            }
        }
        let pivot_row: Vec<(usize, Scalar)> =
            (c..cols).filter(|&j| !a[(r, j)].is_zero()).map(|j| (j, a[(r, j)].clone())).collect();
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let factor = a[(i, c)].clone();
            for (j, x) in &pivot_row {
                let v = &a[(i, *j)] - &factor * x;
                a[(i, *j)] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { reduced: a, pivots }
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).pivots.len()
}

/// Canonical basis of the right null space: one vector per free column,
/// with a 1 in that column and zeros in the other free columns.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    let Echelon { reduced, pivots } = rref(m);
    let cols = m.cols;
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = zeros(cols);
            v[free] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -reduced[(r, free)].clone();
            }
            v
        })
        .collect()
}

/// Some `x` with `m·x = b`, or `None` when the system is inconsistent. The
/// returned solution sets every free variable to zero.
pub fn solve_affine(m: &Matrix, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.rows, "right-hand side length");
    let cols = m.cols;
    let mut aug = Matrix::zeros(m.rows, cols + 1);
    for i in 0..m.rows {
        for j in 0..cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, cols)] = b[i].clone();
    }
    let Echelon { reduced, pivots } = rref(&aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = zeros(cols);
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = reduced[(r, cols)].clone();
    }
    Some(x)
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    assert!(m.is_square(), "inverse of a non-square matrix");
    let n = m.rows;
    let aug = Matrix::block(m, &Matrix::identity(n), &Matrix::zeros(0, n), &Matrix::zeros(0, n));
    let Echelon { reduced, pivots } = rref(&aug);
    if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    let mut inv = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv[(i, j)] = reduced[(i, n + j)].clone();
        }
    }
    Some(inv)
}

/// Columns of `a` followed by columns of `b`.
pub fn hstack(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.rows, b.rows);
    Matrix::block(a, b, &Matrix::zeros(0, a.cols), &Matrix::zeros(0, b.cols))
}

/// Rows of `a` followed by rows of `b`.
pub fn vstack(a: &Matrix, b: &Matrix) -> Matrix {
    assert_eq!(a.cols, b.cols);
    Matrix::block(a, &Matrix::zeros(a.rows, 0), b, &Matrix::zeros(b.rows, 0))
}

/// `dim ker(kernel_of) − rank(boundary)`, after checking that
/// `kernel_of · boundary = 0`.
pub fn quotient_dim(boundary: &Matrix, kernel_of: &Matrix) -> Result<usize> {
    if boundary.rows != kernel_of.cols {
        return Err(Error::Shape(format!(
            "boundary has {} rows but kernel map has {} columns",
            boundary.rows, kernel_of.cols
        )));
    }
    if !kernel_of.mul(boundary).is_zero() {
        return Err(Error::BrokenComplex("image not contained in kernel".into()));
    }
    let dim_ker = kernel_of.cols - rank(kernel_of);
    Ok(dim_ker - rank(boundary))
}

/// Row-echelon span of vectors added one at a time; used to pick
/// independent representatives deterministically.
#[derive(Clone, Debug, Default)]
pub struct EchelonSpan {
    /// (pivot column, row normalized to 1 at the pivot)
    rows: Vec<(usize, Vec<Scalar>)>,
}

impl EchelonSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut r = v.to_vec();
        for (p, row) in &self.rows {
            if !r[*p].is_zero() {
                let f = -r[*p].clone();
                axpy(&mut r, &f, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        is_zero_vec(&self.reduce(v))
    }

    /// Adds `v`; returns false (and changes nothing) if it is already in the span.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        let r = scale_vec(&inv, &r);
        // keep existing rows reduced against the new pivot
        for (_, row) in &mut self.rows {
            if !row[p].is_zero() {
                let f = -row[p].clone();
                axpy(row, &f, &r);
            }
        }
        self.rows.push((p, r));
        true
    }
}

/// Indices of the vectors of `candidates` that extend `base` to a larger
/// independent set, chosen greedily in order.
pub fn extend_independent(base: &[Vec<Scalar>], candidates: &[Vec<Scalar>]) -> Vec<usize> {
    let mut span = EchelonSpan::new();
    for b in base {
        span.insert(b);
    }
    candidates.iter().enumerate().filter(|(_, v)| span.insert(v)).map(|(i, _)| i).collect()
}
