use num_complex::Complex;

use super::lu::{Lu, LogDet};
use super::matrix::ComplexMatrix;
use crate::error::Result;
use crate::scalar::{cone, czero, Real};

/// `A P = Q R` with `Q` unitary (square), `R` upper trapezoidal, `P` a column permutation.
#[derive(Clone, Debug)]
pub struct Qr<T: Real> {
    pub q: ComplexMatrix<T>,
    pub r: ComplexMatrix<T>,
    /// `perm[k]` is the original column placed at position `k`.
    pub perm: Vec<usize>,
}

/// Householder QR; with `pivot` the column of largest remaining norm is moved forward each step.
pub fn householder_qr<T: Real>(a: &ComplexMatrix<T>, pivot: bool) -> Qr<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone().with_log_scale(T::zero());
    let mut q = ComplexMatrix::<T>::identity(m);
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = m.min(n);
    for k in 0..steps {
        if pivot {
            let mut best = k;
            let mut bn = T::neg_infinity();
            for j in k..n {
                let s: T = (k..m).map(|i| r[(i, j)].norm_sqr()).sum();
                if s > bn {
                    bn = s;
                    best = j;
                }
            }
            if best != k {
                for i in 0..m {
                    let t = r[(i, k)];
                    r[(i, k)] = r[(i, best)];
                    r[(i, best)] = t;
                }
                perm.swap(k, best);
            }
        }
        let norm: T = (k..m).map(|i| r[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == T::zero() { cone() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex<T>> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] = v[0] - alpha;
        let vn: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vn == T::zero() {
            continue;
        }
        let tau = T::lit(2.0) / vn;
        for j in k..n {
            let s = (0..v.len()).fold(czero(), |acc, t| acc + v[t].conj() * r[(k + t, j)]) * tau;
            for t in 0..v.len() {
                r[(k + t, j)] = r[(k + t, j)] - v[t] * s;
            }
        }
        for i in 0..m {
            let s = (0..v.len()).fold(czero(), |acc, t| acc + q[(i, k + t)] * v[t]) * tau;
            for t in 0..v.len() {
                q[(i, k + t)] = q[(i, k + t)] - s * v[t].conj();
            }
        }
        for i in k + 1..m {
            r[(i, k)] = czero();
        }
    }
    Qr { q, r: r.with_log_scale(a.log_scale()), perm }
}

/// Product `G_n ... G_1 = Q diag(D) T` kept in graded form: `Q` unitary, `D` stored as
/// (log modulus, phase) sorted by decreasing modulus, `T` well conditioned.
#[derive(Clone, Debug)]
pub struct GradedProduct<T: Real> {
    pub q: ComplexMatrix<T>,
    pub log_d: Vec<T>,
    pub phase_d: Vec<Complex<T>>,
    pub t: Option<ComplexMatrix<T>>,
    pub steps: usize,
}

impl<T: Real> GradedProduct<T> {
    pub fn new(n: usize, track_t: bool) -> Self {
        Self {
            q: ComplexMatrix::identity(n),
            log_d: vec![T::zero(); n],
            phase_d: vec![cone(); n],
            t: if track_t { Some(ComplexMatrix::identity(n)) } else { None },
            steps: 0,
        }
    }

    /// Left-multiplies the accumulated product by `g`.
    pub fn push(&mut self, g: &ComplexMatrix<T>) {
        let n = self.q.rows();
        let gq = g.to_plain_scaled_out().matmul(&self.q);
        let qr = householder_qr(&gq, false);
        let mut new_log = Vec::with_capacity(n);
        let mut new_phase = Vec::with_capacity(n);
        for i in 0..n {
            let rii = qr.r[(i, i)];
            let m = rii.norm();
            new_log.push(m.ln() + self.log_d[i] + g.log_scale());
            let ph = if m == T::zero() { cone() } else { rii / m };
            new_phase.push(ph * self.phase_d[i]);
        }
        // Middle factor D'^{-1} R D, entries bounded because D is sorted.
        let mid = self.t.as_ref().map(|_| {
            ComplexMatrix::from_fn(n, n, |i, j| {
                if j < i {
                    return czero();
                }
                if i == j {
                    return cone();
                }
                let rij = qr.r[(i, j)];
                if rij == czero() {
                    return czero();
                }
                let ratio = (rij.norm().ln() + self.log_d[j] + g.log_scale() - new_log[i]).exp();
                let ph = (rij / rij.norm()) * self.phase_d[j] / new_phase[i];
                ph * ratio
            })
        });
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| new_log[b].partial_cmp(&new_log[a]).unwrap_or(std::cmp::Ordering::Equal));
        self.q = ComplexMatrix::from_fn(n, n, |i, j| qr.q[(i, order[j])]);
        self.log_d = order.iter().map(|&k| new_log[k]).collect();
        self.phase_d = order.iter().map(|&k| new_phase[k]).collect();
        if let (Some(t), Some(mid)) = (self.t.as_ref(), mid) {
            let nt = mid.matmul(t);
            self.t = Some(ComplexMatrix::from_fn(n, n, |i, j| nt[(order[i], j)]));
        }
        self.steps += 1;
    }

    /// Sorted log singular-value estimates `log|D_i|`.
    pub fn log_values(&self) -> &[T] {
        &self.log_d
    }

    /// `det(product - I)` without forming the product.
    pub fn det_minus_identity(&self) -> Result<LogDet<T>> {
        let n = self.q.rows();
        let t = self.t.clone().unwrap_or_else(|| ComplexMatrix::identity(n));
        let qh = self.q.adjoint();
        let mut big = LogDet::one();
        let mut k = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            let ld = self.log_d[i];
            let (b, s) = if ld > T::zero() { (ld, T::zero()) } else { (T::zero(), ld) };
            big = big.mul(LogDet { mantissa: cone(), log_abs: b });
            let ds = self.phase_d[i] * s.exp();
            let inv_b = (-b).exp();
            for j in 0..n {
                k[(i, j)] = ds * t[(i, j)] - qh[(i, j)] * inv_b;
            }
        }
        let dq = Lu::new(&self.q)?.log_det();
        let dk = Lu::new(&k)?.log_det();
        Ok(dq.mul(big).mul(dk))
    }

    /// Dense product (only safe when it does not overflow).
    pub fn to_matrix(&self) -> ComplexMatrix<T> {
        let n = self.q.rows();
        let t = self.t.clone().unwrap_or_else(|| ComplexMatrix::identity(n));
        let shift = self.log_d.iter().cloned().fold(T::neg_infinity(), T::max);
        let shift = if shift.is_finite() { shift } else { T::zero() };
        let d: Vec<Complex<T>> =
            (0..n).map(|i| self.phase_d[i] * (self.log_d[i] - shift).exp()).collect();
        self.q.matmul(&ComplexMatrix::diag(&d)).matmul(&t).with_log_scale(shift)
    }
}

impl<T: Real> ComplexMatrix<T> {
    /// Copy with `log_scale` reset to zero (entries untouched).
    pub(crate) fn to_plain_scaled_out(&self) -> ComplexMatrix<T> {
        self.clone().with_log_scale(T::zero())
    }
}
