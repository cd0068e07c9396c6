use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

/// Eigenvalues ascending with orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

/// Householder tridiagonalization followed by implicit QL.
pub fn hermitian_eigen<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let (vals, vecs) = hermitian_impl(m, true)?;
    Ok(HermitianEigen { values: vals, vectors: vecs.unwrap() })
}

pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    Ok(hermitian_impl(m, false)?.0)
}

fn hermitian_impl<T: Real>(m: &ComplexMatrix<T>, want: bool) -> Result<(Vec<T>, Option<ComplexMatrix<T>>)> {
    if !m.is_square() {
        return Err(Error::Domain("eigenproblem needs a square matrix".into()));
    }
    let n = m.rows();
    let a0 = m.to_plain();
    let scale = a0.max_abs().max(T::min_positive_value());
    if a0.max_diff(&a0.adjoint()) > T::lit(1e-10) * scale {
        return Err(Error::Domain("matrix is not Hermitian within tolerance".into()));
    }
    if n == 0 {
        return Ok((Vec::new(), Some(ComplexMatrix::zeros(0, 0))));
    }
    let mut a = a0;
    let mut q = ComplexMatrix::<T>::identity(n);
    for k in 0..n.saturating_sub(2) {
        let norm: T = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == T::zero() { cone() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v = vec![czero(); n];
        for i in k + 1..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] = v[k + 1] - alpha;
        let vn: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vn == T::zero() {
            continue;
        }
        let tau = T::lit(2.0) / vn;
        // p = tau A v, w = p - (tau/2)(v^* p) v, A <- A - v w^* - w v^*
        let mut p = vec![czero(); n];
        for i in k..n {
            let mut s = czero();
            for j in k + 1..n {
                s = s + a[(i, j)] * v[j];
            }
            p[i] = s * tau;
        }
        let vp = (k + 1..n).fold(czero(), |acc, i| acc + v[i].conj() * p[i]);
        let half = vp * (tau * T::lit(0.5));
        let w: Vec<Complex<T>> = (0..n).map(|i| p[i] - half * v[i]).collect();
        for i in k..n {
            for j in k..n {
                a[(i, j)] = a[(i, j)] - v[i] * w[j].conj() - w[i] * v[j].conj();
            }
        }
        if want {
            for i in 0..n {
                let s = (k + 1..n).fold(czero(), |acc, t| acc + q[(i, t)] * v[t]) * tau;
                for t in k + 1..n {
                    q[(i, t)] = q[(i, t)] - s * v[t].conj();
                }
            }
        }
    }
    let mut d: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![T::zero(); n];
    let mut delta = vec![cone(); n];
    for i in 0..n - 1 {
        let sub = a[(i + 1, i)];
        let r = sub.norm();
        e[i] = r;
        delta[i + 1] = if r == T::zero() { delta[i] } else { delta[i] * sub / r };
    }
    let mut z: Vec<Vec<T>> = if want {
        (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
    } else {
        Vec::new()
    };
    tql(&mut d, &mut e, &mut z, want)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<T> = order.iter().map(|&k| d[k]).collect();
    if !want {
        return Ok((values, None));
    }
    // eigenvectors = Q diag(delta) Z
    let vecs = ComplexMatrix::from_fn(n, n, |i, col| {
        let k = order[col];
        let mut s = czero();
        for t in 0..n {
            if z[t][k] != T::zero() {
                s = s + q[(i, t)] * delta[t] * z[t][k];
            }
        }
        s
    });
    Ok((values, Some(vecs)))
}

fn tql<T: Real>(d: &mut [T], e: &mut [T], z: &mut [Vec<T>], want: bool) -> Result<()> {
    let n = d.len();
    let eps = T::epsilon();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (T::lit(2.0) * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + if g >= T::zero() { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut early = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::lit(2.0) * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if want {
                    for row in z.iter_mut() {
                        let f2 = row[i + 1];
                        row[i + 1] = s * row[i] + c * f2;
                        row[i] = c * row[i] - s * f2;
                    }
                }
            }
            if early {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

/// Eigenvalues of a general square matrix (Hessenberg reduction + shifted complex QR),
/// sorted by descending modulus, then descending real and imaginary part.
pub fn general_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    if !m.is_square() {
        return Err(Error::Domain("eigenvalues need a square matrix".into()));
    }
    let n = m.rows();
    let mut h = m.clone().with_log_scale(T::zero());
    let ls = m.log_scale().exp();
    // Hessenberg reduction
    for k in 0..n.saturating_sub(2) {
        let norm: T = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == T::zero() { cone() } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v = vec![czero(); n];
        for i in k + 1..n {
            v[i] = h[(i, k)];
        }
        v[k + 1] = v[k + 1] - alpha;
        let vn: T = v.iter().map(|z| z.norm_sqr()).sum();
        if vn == T::zero() {
            continue;
        }
        let tau = T::lit(2.0) / vn;
        for j in 0..n {
            let s = (k + 1..n).fold(czero(), |acc, i| acc + v[i].conj() * h[(i, j)]) * tau;
            for i in k + 1..n {
                h[(i, j)] = h[(i, j)] - v[i] * s;
            }
        }
        for i in 0..n {
            let s = (k + 1..n).fold(czero(), |acc, j| acc + h[(i, j)] * v[j]) * tau;
            for j in k + 1..n {
                h[(i, j)] = h[(i, j)] - s * v[j].conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
    let mut out = Vec::with_capacity(n);
    let eps = T::epsilon();
    let mut hi = n;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = 60 * n.max(1);
    while hi > 0 {
        let top = hi - 1;
        let mut l = top;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == T::zero() { T::one() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == top {
            out.push(h[(top, top)] * ls);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::Numeric(format!(
                "shifted QR did not converge after {total} iterations ({hi} eigenvalues pending)"
            )));
        }
        let mu = if iter % 11 == 10 {
            h[(top, top)] + Complex::new(h[(top, top - 1)].norm() * T::lit(0.75), T::zero())
        } else {
            wilkinson(h[(top - 1, top - 1)], h[(top - 1, top)], h[(top, top - 1)], h[(top, top)])
        };
        for i in l..=top {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let mut rots = Vec::with_capacity(top - l);
        for k in l..top {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == T::zero() { (cone(), czero()) } else { (a / r, b / r) };
            // [c^*, s^*; -s, c] applied to rows k, k+1
            for j in k..=top {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c.conj() * x + s.conj() * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
            rots.push((c, s));
        }
        for (idx, k) in (l..top).enumerate() {
            let (c, s) = rots[idx];
            let last = (k + 2).min(top);
            for i in l..=last {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s;
                h[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for i in l..=top {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    sort_eigenvalues(&mut out);
    Ok(out)
}

fn wilkinson<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let tr = a + d;
    let det = a * d - b * c;
    let half = tr * T::lit(0.5);
    let disc = (half * half - det).sqrt();
    let l1 = half + disc;
    let l2 = half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

pub fn sort_eigenvalues<T: Real>(v: &mut [Complex<T>]) {
    v.sort_by(|x, y| {
        y.norm()
            .partial_cmp(&x.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y.re.partial_cmp(&x.re).unwrap_or(std::cmp::Ordering::Equal))
            .then(y.im.partial_cmp(&x.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}
