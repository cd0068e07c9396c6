use num_complex::Complex;

use super::matrix::{inner, vec_norm, ComplexMatrix};
use crate::scalar::{cone, czero, Real};

/// `M = W diag(sigma) V^*` (times `exp(log_scale)`).
#[derive(Clone, Debug)]
pub struct SvdResult<T: Real> {
    pub singular_values: Vec<T>,
    pub log_scale: T,
    /// Left vectors `w_j` as columns.
    pub left: ComplexMatrix<T>,
    /// Right vectors `v_j` as columns.
    pub right: ComplexMatrix<T>,
}

impl<T: Real> SvdResult<T> {
    pub fn log_singular_values(&self) -> Vec<T> {
        self.singular_values.iter().map(|s| s.ln() + self.log_scale).collect()
    }

    pub fn sigma(&self, j: usize) -> T {
        self.singular_values[j] * self.log_scale.exp()
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let k = self.singular_values.len();
        let s: Vec<Complex<T>> = self.singular_values.iter().map(|&x| Complex::new(x, T::zero())).collect();
        let w = self.left.block(0, 0, self.left.rows(), k);
        let v = self.right.block(0, 0, self.right.rows(), k);
        w.matmul(&ComplexMatrix::diag(&s)).matmul(&v.adjoint()).with_log_scale(self.log_scale)
    }
}

/// One-sided (Hestenes) Jacobi SVD; columns orthogonalized in cyclic order.
pub fn svd<T: Real>(m: &ComplexMatrix<T>) -> SvdResult<T> {
    if m.rows() < m.cols() {
        let t = svd(&m.adjoint());
        return SvdResult {
            singular_values: t.singular_values,
            log_scale: t.log_scale,
            left: t.right,
            right: t.left,
        };
    }
    let (rows, n) = (m.rows(), m.cols());
    let mut u: Vec<Vec<Complex<T>>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<Complex<T>>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { cone() } else { czero() }).collect())
        .collect();
    let eps = T::epsilon();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let a: T = u[p].iter().map(|z| z.norm_sqr()).sum();
                let b: T = u[q].iter().map(|z| z.norm_sqr()).sum();
                let g = inner(&u[p], &u[q]);
                let gn = g.norm();
                if gn == T::zero() || gn <= eps * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = g / gn;
                let zeta = (b - a) / (T::lit(2.0) * gn);
                let sgn = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, p, q, c, s, ph);
                rotate(&mut v, p, q, c, s, ph);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sig: Vec<T> = u.iter().map(|c| vec_norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sig[b].partial_cmp(&sig[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut left: Vec<Vec<Complex<T>>> = Vec::with_capacity(rows);
    let mut right: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let tiny = sig.iter().cloned().fold(T::zero(), T::max) * eps * T::lit(16.0);
    for &k in &order {
        right.push(v[k].clone());
        if sig[k] > tiny && sig[k] > T::zero() {
            let inv = T::one() / sig[k];
            left.push(u[k].iter().map(|&z| z * inv).collect());
        } else {
            left.push(Vec::new());
        }
    }
    sig = order.iter().map(|&k| sig[k]).collect();
    complete_basis(&mut left, rows);
    SvdResult {
        singular_values: sig,
        log_scale: m.log_scale(),
        left: ComplexMatrix::from_columns(&left),
        right: ComplexMatrix::from_columns(&right),
    }
}

fn rotate<T: Real>(cols: &mut [Vec<Complex<T>>], p: usize, q: usize, c: T, s: T, ph: Complex<T>) {
    let (lo, hi) = cols.split_at_mut(q);
    let up = &mut lo[p];
    let uq = &mut hi[0];
    for (x, y) in up.iter_mut().zip(uq.iter_mut()) {
        let xp = *x * c - *y * ph.conj() * s;
        let yq = *x * ph * s + *y * c;
        *x = xp;
        *y = yq;
    }
}

/// Fills empty slots and appends vectors until `dim` orthonormal columns exist.
fn complete_basis<T: Real>(cols: &mut Vec<Vec<Complex<T>>>, dim: usize) {
    let mut e = 0;
    let fill = |basis: &Vec<Vec<Complex<T>>>, e: &mut usize| -> Vec<Complex<T>> {
        loop {
            let mut x: Vec<Complex<T>> = (0..dim).map(|i| if i == *e { cone() } else { czero() }).collect();
            *e += 1;
            for _ in 0..2 {
                for b in basis.iter().filter(|b| !b.is_empty()) {
                    let c = inner(b, &x);
                    for (xi, bi) in x.iter_mut().zip(b) {
                        *xi = *xi - *bi * c;
                    }
                }
            }
            let nx = vec_norm(&x);
            if nx > T::lit(1e-3) {
                return x.into_iter().map(|z| z / nx).collect();
            }
            if *e > dim {
                return vec![czero(); dim];
            }
        }
    };
    for i in 0..cols.len() {
        if cols[i].is_empty() {
            let x = fill(cols, &mut e);
            cols[i] = x;
        }
    }
    while cols.len() < dim {
        let x = fill(cols, &mut e);
        cols.push(x);
    }
}

/// Operator 2-norm via SVD.
pub fn op_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    let s = svd(m);
    s.singular_values.first().map_or(T::zero(), |&x| x * s.log_scale.exp())
}
