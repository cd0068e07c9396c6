use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

/// Determinant stored as `mantissa * exp(log_abs)` with `|mantissa| = 1`, or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet<T: Real> {
    pub mantissa: Complex<T>,
    pub log_abs: T,
}

impl<T: Real> LogDet<T> {
    pub fn zero() -> Self {
        Self { mantissa: czero(), log_abs: T::neg_infinity() }
    }

    pub fn one() -> Self {
        Self { mantissa: cone(), log_abs: T::zero() }
    }

    pub fn from_value(z: Complex<T>) -> Self {
        let r = z.norm();
        if r == T::zero() {
            Self::zero()
        } else {
            Self { mantissa: z / r, log_abs: r.ln() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == czero()
    }

    /// May overflow for large `log_abs`.
    pub fn value(&self) -> Complex<T> {
        if self.is_zero() {
            czero()
        } else {
            self.mantissa * self.log_abs.exp()
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self { mantissa: self.mantissa * other.mantissa, log_abs: self.log_abs + other.log_abs }
    }

    pub fn div(self, other: Self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self { mantissa: self.mantissa / other.mantissa, log_abs: self.log_abs - other.log_abs }
    }
}

/// Partial-pivoting LU factorization `P A = L U` stored compactly.
#[derive(Clone, Debug)]
pub struct Lu<T: Real> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &ComplexMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Domain(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f != czero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] = lu[(i, j)] - f * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm, swaps, singular })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn log_det(&self) -> LogDet<T> {
        if self.singular {
            return LogDet::zero();
        }
        let n = self.lu.rows();
        let mut out = LogDet::one();
        for i in 0..n {
            out = out.mul(LogDet::from_value(self.lu[(i, i)]));
        }
        if self.swaps % 2 == 1 {
            out.mantissa = -out.mantissa;
        }
        out.log_abs = out.log_abs + T::from_usize(n).unwrap() * self.lu.log_scale();
        out
    }

    /// Solves `A x = b` (ignores the external scale of `A`'s copy, then applies it).
    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if self.singular {
            return Err(Error::Singular("matrix is singular".into()));
        }
        let n = self.lu.rows();
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        let f = (-self.lu.log_scale()).exp();
        Ok(x.into_iter().map(|z| z * f).collect())
    }

    pub fn inverse(&self) -> Result<ComplexMatrix<T>> {
        let n = self.lu.rows();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![czero(); n];
            e[j] = cone();
            cols.push(self.solve(&e)?);
        }
        Ok(ComplexMatrix::from_columns(&cols))
    }
}

/// Determinant with overflow-safe logarithmic magnitude.
pub fn lu_det<T: Real>(m: &ComplexMatrix<T>) -> Result<LogDet<T>> {
    Ok(Lu::new(m)?.log_det())
}

pub fn inverse<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Lu::new(m)?.inverse()
}
