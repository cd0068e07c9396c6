use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

/// Dense complex matrix, row-major, with an external scale factor `exp(log_scale)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
    log_scale: T,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols], log_scale: T::zero() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data, log_scale: T::zero() }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Domain(format!(
                "expected {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data, log_scale: T::zero() })
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Domain("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.concat())
    }

    /// Real-valued matrix from `f64` rows (test and preset convenience).
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let v: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
            .collect();
        Self::from_rows(&v)
    }

    pub fn diag(d: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
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

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn log_scale(&self) -> T {
        self.log_scale
    }

    pub fn with_log_scale(mut self, s: T) -> Self {
        self.log_scale = s;
        self
    }

    pub fn set_log_scale(&mut self, s: T) {
        self.log_scale = s;
    }

    /// Entry including the external scale.
    pub fn scaled_entry(&self, i: usize, j: usize) -> Complex<T> {
        self[(i, j)] * self.log_scale.exp()
    }

    /// Folds `log_scale` into the entries.
    pub fn to_plain(&self) -> Self {
        if self.log_scale == T::zero() {
            return self.clone();
        }
        let f = self.log_scale.exp();
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * f).collect(),
            log_scale: T::zero(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Moves the largest entry modulus into `log_scale`.
    pub fn normalize(&mut self) {
        let m = self.max_abs();
        if m > T::zero() && m.is_finite() {
            let inv = T::one() / m;
            for z in &mut self.data {
                *z = *z * inv;
            }
            self.log_scale = self.log_scale + m.ln();
        }
    }

    /// Renormalizes only when entries leave `[1e-100, 1e100]`.
    pub fn renormalize_if_needed(&mut self) {
        let m = self.max_abs();
        let lo = T::lit(1e-100);
        let hi = T::lit(1e100);
        if m > T::zero() && (m < lo || m > hi) {
            self.normalize();
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj()).with_log_scale(self.log_scale)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)]).with_log_scale(self.log_scale)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
            log_scale: self.log_scale,
        }
    }

    pub fn norm_fro(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt() * self.log_scale.exp()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).fold(czero(), |a, b| a + b)
            * self.log_scale.exp()
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)]).with_log_scale(self.log_scale)
    }

    /// Writes `b` (scales reconciled into `self`'s scale) at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        let f = (b.log_scale - self.log_scale).exp();
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)] * f;
            }
        }
    }

    /// `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let (r, k) = (a.rows, a.cols);
        let mut m = Self::zeros(r + c.rows, k + b.cols);
        m.set_block(0, 0, a);
        m.set_block(0, k, b);
        m.set_block(r, 0, c);
        m.set_block(r, k, d);
        m
    }

    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let z1 = Self::zeros(a.rows, b.cols);
        let z2 = Self::zeros(b.rows, a.cols);
        Self::from_blocks(a, &z1, &z2, b)
    }

    pub fn column(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn from_columns(cols: &[Vec<Complex<T>>]) -> Self {
        let n = cols.first().map_or(0, |c| c.len());
        Self::from_fn(n, cols.len(), |i, j| cols[j][i])
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let f = self.log_scale.exp();
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).fold(czero(), |a, (&m, &v)| a + m * v) * f
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == czero() {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = *d + a * b;
                }
            }
        }
        out.log_scale = self.log_scale + other.log_scale;
        out
    }

    fn combine(&self, other: &Self, sign: T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let s = self.log_scale.max(other.log_scale);
        let fa = (self.log_scale - s).exp();
        let fb = (other.log_scale - s).exp() * sign;
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a * fa + b * fb).collect(),
            log_scale: s,
        }
    }

    /// Largest entrywise modulus of `self - other` (scales applied).
    pub fn max_diff(&self, other: &Self) -> T {
        self.combine(other, -T::one()).to_plain().max_abs()
    }

    pub fn is_hermitian_within(&self, tol: T) -> bool {
        self.is_square() && self.max_diff(&self.adjoint()) <= tol
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Real> Mul<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: &'a ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<'a, T: Real> Add<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: &'a ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.combine(rhs, T::one())
    }
}

impl<'a, T: Real> Sub<&'a ComplexMatrix<T>> for &'a ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: &'a ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.combine(rhs, -T::one())
    }
}

/// `<x, y> = sum conj(x_i) y_i`.
pub fn inner<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(czero(), |a, (&p, &q)| a + p.conj() * q)
}

pub fn vec_norm<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}
