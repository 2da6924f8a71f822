use std::ops::{Index, IndexMut};

use super::real::{PrecisionContext, Real};
use crate::error::{Error, Result};

/// Row-major dense matrix of high-precision reals.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(ctx: &PrecisionContext, rows: usize, cols: usize) -> Self {
        let z: T = ctx.zero();
        Self { rows, cols, data: vec![z; rows * cols] }
    }

    pub fn identity(ctx: &PrecisionContext, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = ctx.one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Builds a matrix from `f64` literals in the given precision.
    pub fn from_f64_rows(ctx: &PrecisionContext, rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| ctx.real(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        let mut best = self.data[0].zero_like();
        for i in 0..self.rows {
            let mut s = best.zero_like();
            for x in self.row(i) {
                s += x.abs();
            }
            best = best.max_of(s);
        }
        best
    }

    pub fn max_abs(&self) -> T {
        let mut best = self.data[0].zero_like();
        for x in &self.data {
            let a = x.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    pub fn column_sums(&self) -> Vec<T> {
        let mut sums = vec![self.data[0].zero_like(); self.cols];
        for i in 0..self.rows {
            for (s, x) in sums.iter_mut().zip(self.row(i)) {
                *s += x;
            }
        }
        sums
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let zero = self.data[0].zero_like();
        let mut out = vec![zero; self.rows * other.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(other.row(k)) {
                    o.add_mul(a, b);
                }
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, data: out })
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("shape differs".into()));
        }
        let mut best = self.data[0].zero_like();
        for (a, b) in self.data.iter().zip(&other.data) {
            let d = (a.clone() - b).abs();
            if d > best {
                best = d;
            }
        }
        Ok(best)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Matrix-vector product in the active precision.
pub fn matvec<T: Real>(m: &DenseMatrix<T>, v: &[T]) -> Result<Vec<T>> {
    if m.cols() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix applied to vector of length {}",
            m.rows(),
            m.cols(),
            v.len()
        )));
    }
    let zero = m.data()[0].zero_like();
    Ok((0..m.rows())
        .map(|i| {
            let mut acc = zero.clone();
            for (a, x) in m.row(i).iter().zip(v) {
                acc.add_mul(a, x);
            }
            acc
        })
        .collect())
}

/// Row-vector times matrix, `wᵀ M`.
pub fn vecmat<T: Real>(w: &[T], m: &DenseMatrix<T>) -> Result<Vec<T>> {
    if m.rows() != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} times {}x{} matrix",
            w.len(),
            m.rows(),
            m.cols()
        )));
    }
    let mut out = vec![m.data()[0].zero_like(); m.cols()];
    for (i, wi) in w.iter().enumerate() {
        if wi.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(m.row(i)) {
            o.add_mul(wi, a);
        }
    }
    Ok(out)
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = a[0].zero_like();
    for (x, y) in a.iter().zip(b) {
        acc.add_mul(x, y);
    }
    acc
}

pub fn norm_inf_vec<T: Real>(v: &[T]) -> T {
    let mut best = v[0].zero_like();
    for x in v {
        let a = x.abs();
        if a > best {
            best = a;
        }
    }
    best
}
