use num_complex::Complex;

use super::lu::lu_det;
use super::matrix::{inner, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lexicographically ordered `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn minor<T: Real>(m: &ComplexMatrix<T>, rows: &[usize], cols: &[usize]) -> Complex<T> {
    let k = rows.len();
    match k {
        1 => m[(rows[0], cols[0])],
        2 => {
            m[(rows[0], cols[0])] * m[(rows[1], cols[1])] - m[(rows[0], cols[1])] * m[(rows[1], cols[0])]
        }
        _ => {
            let sub = ComplexMatrix::from_fn(k, k, |i, j| m[(rows[i], cols[j])]);
            lu_det(&sub).map(|d| d.value()).unwrap_or_else(|_| Complex::new(T::nan(), T::nan()))
        }
    }
}

/// `k`-th exterior power: entries are `k x k` minors over lexicographic subsets.
pub fn compound_matrix<T: Real>(m: &ComplexMatrix<T>, k: usize) -> Result<ComplexMatrix<T>> {
    let n = m.rows().min(m.cols());
    if k == 0 || k > n {
        return Err(Error::Domain(format!("compound order {k} outside 1..={n}")));
    }
    let rs = subsets(m.rows(), k);
    let cs = subsets(m.cols(), k);
    let out = ComplexMatrix::from_fn(rs.len(), cs.len(), |i, j| minor(m, &rs[i], &cs[j]));
    Ok(out.with_log_scale(m.log_scale() * T::from_usize(k).unwrap()))
}

/// `det(<v_j, w_k>)`, i.e. `<v_1 ^ ... ^ v_d, w_1 ^ ... ^ w_d>`.
pub fn gram_pairing<T: Real>(v: &[Vec<Complex<T>>], w: &[Vec<Complex<T>>]) -> Result<Complex<T>> {
    if v.len() != w.len() {
        return Err(Error::Domain("pairing needs equally many vectors".into()));
    }
    let d = v.len();
    let dim = v.first().map_or(0, |x| x.len());
    if v.iter().chain(w).any(|x| x.len() != dim) || dim < d {
        return Err(Error::Domain("vector dimension mismatch".into()));
    }
    if d == 0 {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let g = ComplexMatrix::from_fn(d, d, |i, j| inner(&v[i], &w[j]));
    Ok(lu_det(&g)?.value())
}
