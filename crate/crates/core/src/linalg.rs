//! Exact integer and rational matrices: Hermite and Smith normal forms,
//! integer kernels and determinants.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rational>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: vec![T::zero(); rows * cols] }
    }

    /// Builds a matrix from rows. All rows must share the length `cols`.
    pub fn from_rows(rows: Vec<Vec<T>>, cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            entries.extend(row);
        }
        Matrix { rows: n, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out[(i, k)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + for<'a> core::ops::Mul<&'a T, Output = T>,
{
    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matrix product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a.clone() * &other[(k, j)];
                    let cell = &mut out[(i, j)];
                    *cell = core::mem::replace(cell, T::zero()) + prod;
                }
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entries[i * self.cols + j])?;
            }
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
            cols,
        )
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }

    /// Adds `factor * row src` to row `dst`.
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.entries[src * self.cols + j] * factor;
            self.entries[dst * self.cols + j] += v;
        }
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        if factor.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.entries[i * self.cols + src] * factor;
            self.entries[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let cell = &mut self.entries[r * self.cols + j];
            *cell = -core::mem::take(cell);
        }
    }

    /// Replaces rows `(a, b)` by `(x*a + y*b, p*a + q*b)`.
    fn combine_rows(&mut self, a: usize, b: usize, [x, y, p, q]: [&BigInt; 4]) {
        for j in 0..self.cols {
            let ra = self.entries[a * self.cols + j].clone();
            let rb = self.entries[b * self.cols + j].clone();
            self.entries[a * self.cols + j] = x * &ra + y * &rb;
            self.entries[b * self.cols + j] = p * &ra + q * &rb;
        }
    }

    fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(Zero::is_zero)
    }
}

/// Row-style Hermite normal form.
///
/// Returns `(h, u)` with `u` unimodular and `h = u * m`. Pivots are positive,
/// entries above a pivot lie in `[0, pivot)`, zero rows come last.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut pivot_row = 0;
    for col in 0..h.cols {
        if pivot_row == h.rows {
            break;
        }
        for r in pivot_row + 1..h.rows {
            if h[(r, col)].is_zero() {
                continue;
            }
            let a = h[(pivot_row, col)].clone();
            let b = h[(r, col)].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let p = -(&b / &g);
            let q = &a / &g;
            h.combine_rows(pivot_row, r, [&x, &y, &p, &q]);
            u.combine_rows(pivot_row, r, [&x, &y, &p, &q]);
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        let pivot = h[(pivot_row, col)].clone();
        for r in 0..pivot_row {
            let q = h[(r, col)].div_floor(&pivot);
            if !q.is_zero() {
                let neg = -q;
                h.add_row_multiple(r, pivot_row, &neg);
                u.add_row_multiple(r, pivot_row, &neg);
            }
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Rank over the rationals.
pub fn rank(m: &IntMatrix) -> usize {
    let (h, _) = hnf(m);
    (0..h.rows).filter(|&r| !h.is_zero_row(r)).count()
}

/// Nonzero rows of the Hermite normal form: the canonical basis of the row lattice.
pub fn row_lattice_basis(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let (h, _) = hnf(&IntMatrix::from_rows(rows.to_vec(), cols));
    (0..h.rows).filter(|&r| !h.is_zero_row(r)).map(|r| h.row(r).to_vec()).collect()
}

/// Column indices of the pivots of a Hermite basis.
pub fn pivot_columns(basis: &[Vec<BigInt>]) -> Vec<usize> {
    basis.iter().filter_map(|row| row.iter().position(|x| !x.is_zero())).collect()
}

/// Smith normal form invariant factors `d_1 | d_2 | ...`, padded with zeros
/// to `min(rows, cols)` entries.
pub fn snf(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let n = a.rows.min(a.cols);
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..a.rows {
                for j in t..a.cols {
                    let v = &a[(i, j)];
                    if !v.is_zero() && best.map_or(true, |(bi, bj)| v.abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap_rows(t, bi);
            a.swap_cols(t, bj);
            let pivot = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..a.rows {
                let q = a[(i, t)].div_floor(&pivot);
                a.add_row_multiple(i, t, &-q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..a.cols {
                let q = a[(t, j)].div_floor(&pivot);
                a.add_col_multiple(j, t, &-q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..a.rows)
                .find(|&i| (t + 1..a.cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => a.add_row_multiple(t, i, &BigInt::one()),
                None => break,
            }
        }
        diag.push(a[(t, t)].abs());
    }
    diag
}

/// Integer basis of `{x : m x = 0}`, in Hermite normal form.
pub fn int_kernel(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let (h, u) = hnf(&m.transpose());
    let rank = (0..h.rows).filter(|&r| !h.is_zero_row(r)).count();
    let kernel: Vec<Vec<BigInt>> = (rank..u.rows).map(|r| u.row(r).to_vec()).collect();
    row_lattice_basis(&kernel, m.cols)
}

/// Smallest saturated lattice containing the given rows.
pub fn saturation(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = IntMatrix::from_rows(rows.to_vec(), cols);
    let orth = int_kernel(&m);
    if orth.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
    }
    int_kernel(&IntMatrix::from_rows(orth, cols))
}

/// Exact determinant by Gaussian elimination over the rationals.
pub fn det(m: &RatMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut result = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            a.swap_rows(p, c);
            result = -result;
        }
        let pivot = a[(c, c)].clone();
        result *= &pivot;
        for r in c + 1..n {
            if a[(r, c)].is_zero() {
                continue;
            }
            let factor = &a[(r, c)] / &pivot;
            for j in c..n {
                let v = &factor * &a[(c, j)];
                a[(r, j)] -= v;
            }
        }
    }
    Ok(result)
}

pub fn int_det(m: &IntMatrix) -> Result<BigInt> {
    Ok(det(&m.to_rational())?.to_integer())
}

/// Gcd of a vector's entries (zero for the zero vector).
pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

pub fn is_unimodular(m: &IntMatrix) -> bool {
    m.is_square() && int_det(m).map_or(false, |d| d.abs().is_one())
}

pub fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}
