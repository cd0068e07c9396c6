//! Potentials, block data, finite-volume and cyclic operators.
//!
//! Finite-volume matrices use natural site order: row/column `s` is site `s`.
//! Block vectors use the reversed intra-block order `Phi_n = (phi_{nd+d-1}, ..., phi_{nd})`,
//! so block index `i` of block `n` is site `nd + d - 1 - i`.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inverse, svd, ComplexMatrix};
use crate::random::QpRng;
use crate::scalar::{cis, cone, czero, e2pi, re, Real};

/// Trigonometric polynomial `v(x) = sum_{1<=|k|<=d} vhat_k e^{2 pi i k x}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPotential<T: Real> {
    d: usize,
    /// `coeffs[k + d] = vhat_k`; the zero mode is always 0.
    coeffs: Vec<Complex<T>>,
    real_symmetric: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffSpec {
    pub k: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// On-disk form `{"d": int, "coeffs": [{"k", "re", "im"}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub d: usize,
    pub coeffs: Vec<CoeffSpec>,
}

impl<T: Real> TrigPotential<T> {
    /// Builds from `(k, vhat_k)` pairs; missing modes are zero.
    pub fn new(d: usize, pairs: &[(i64, Complex<T>)]) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("degree must be at least 1".into()));
        }
        let mut coeffs = vec![czero(); 2 * d + 1];
        for &(k, c) in pairs {
            if k == 0 || k.unsigned_abs() as usize > d {
                return Err(Error::Domain(format!("mode {k} outside 1 <= |k| <= {d}")));
            }
            coeffs[(k + d as i64) as usize] = c;
        }
        if coeffs[0] == czero() || coeffs[2 * d] == czero() {
            return Err(Error::Domain("top coefficients vhat_{+-d} must be non-zero".into()));
        }
        let tol = T::lit(1e-12) * coeffs.iter().fold(T::one(), |m, z| m.max(z.norm()));
        let real_symmetric = (1..=d).all(|k| (coeffs[d + k] - coeffs[d - k].conj()).norm() <= tol);
        Ok(Self { d, coeffs, real_symmetric })
    }

    /// Almost Mathieu: `v(x) = 2 lambda cos(2 pi x)`.
    pub fn amo(lambda: T) -> Result<Self> {
        Self::new(1, &[(1, re(lambda)), (-1, re(lambda))])
    }

    /// `2 lambda cos(2 pi x) + nu w(x)`.
    pub fn pamo(lambda: T, nu: T, w: &Self) -> Result<Self> {
        let d = w.d.max(1);
        let mut pairs = Vec::new();
        for k in 1..=d as i64 {
            for s in [k, -k] {
                let mut c = w.coeff(s) * nu;
                if k == 1 {
                    c = c + re(lambda);
                }
                pairs.push((s, c));
            }
        }
        Self::new(d, &pairs)
    }

    /// Random real-symmetric potential of degree `d`, `|vhat_{+-d}| >= 0.3`.
    pub fn random_real(rng: &mut QpRng, d: usize) -> Self {
        let mut pairs = Vec::new();
        for k in 1..=d {
            let (mut a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if k == d && (a * a + b * b).sqrt() < 0.3 {
                a = if a >= 0.0 { a + 0.5 } else { a - 0.5 };
            }
            let c = Complex::new(T::lit(a), T::lit(b));
            pairs.push((k as i64, c));
            pairs.push((-(k as i64), c.conj()));
        }
        Self::new(d, &pairs).expect("valid random potential")
    }

    pub fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        let pairs: Vec<(i64, Complex<T>)> =
            spec.coeffs.iter().map(|c| (c.k, Complex::new(T::lit(c.re), T::lit(c.im)))).collect();
        Self::new(spec.d, &pairs)
    }

    pub fn to_spec(&self) -> PotentialSpec {
        let mut coeffs = Vec::new();
        for k in -(self.d as i64)..=self.d as i64 {
            let c = self.coeff(k);
            if k != 0 && c != czero() {
                coeffs.push(CoeffSpec { k, re: c.re.to_f64_lossy(), im: c.im.to_f64_lossy() });
            }
        }
        PotentialSpec { d: self.d, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.real_symmetric
    }

    /// `vhat_k` (zero outside `1 <= |k| <= d`).
    pub fn coeff(&self, k: i64) -> Complex<T> {
        if k.unsigned_abs() as usize > self.d {
            czero()
        } else {
            self.coeffs[(k + self.d as i64) as usize]
        }
    }

    /// Dual hopping `vhat_k e^{-2 pi k eps}`.
    pub fn hop(&self, k: i64, eps: T) -> Complex<T> {
        self.coeff(k) * (-T::two_pi() * T::from_i64(k).unwrap() * eps).exp()
    }

    /// `v(x)` at complex `x`.
    pub fn eval(&self, x: Complex<T>) -> Complex<T> {
        let mut s = czero();
        for k in -(self.d as i64)..=self.d as i64 {
            if k != 0 {
                s = s + self.coeff(k) * e2pi(x * T::from_i64(k).unwrap());
            }
        }
        s
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

pub fn potential_eval<T: Real>(v: &TrigPotential<T>, x: Complex<T>) -> Complex<T> {
    v.eval(x)
}

pub(crate) fn two_cos<T: Real>(x: T) -> Complex<T> {
    re(T::lit(2.0) * (T::two_pi() * x).cos())
}

/// `B_eps`, `Btilde_eps`, `F_eps` and the data needed for `C_eps(theta)`.
#[derive(Clone, Debug)]
pub struct BlockData<T: Real> {
    pub v: TrigPotential<T>,
    pub alpha: T,
    pub epsilon: T,
    pub b: ComplexMatrix<T>,
    pub b_tilde: ComplexMatrix<T>,
    pub f: ComplexMatrix<T>,
    b_inv: ComplexMatrix<T>,
}

impl<T: Real> BlockData<T> {
    /// `C_eps(theta)`; diagonal `2cos 2pi(theta + (d-1-i) alpha)`.
    pub fn c(&self, theta: T) -> ComplexMatrix<T> {
        let d = self.v.degree();
        ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                two_cos(theta + T::from_usize(d - 1 - i).unwrap() * self.alpha)
            } else {
                self.v.hop(j as i64 - i as i64, self.epsilon)
            }
        })
    }

    pub fn b_inv(&self) -> &ComplexMatrix<T> {
        &self.b_inv
    }
}

pub fn build_blocks<T: Real>(v: &TrigPotential<T>, alpha: T, epsilon: T) -> Result<BlockData<T>> {
    let d = v.degree();
    let di = d as i64;
    let b = ComplexMatrix::from_fn(d, d, |i, j| v.hop(j as i64 - i as i64 - di, epsilon));
    let b_tilde = ComplexMatrix::from_fn(d, d, |i, j| v.hop(di - i as i64 + j as i64, epsilon));
    let f = ComplexMatrix::diag(
        &(1..=d).map(|k| re((T::two_pi() * T::from_usize(k).unwrap() * epsilon).exp())).collect::<Vec<_>>(),
    );
    let b_inv = inverse(&b).map_err(|_| Error::Domain("B_eps is singular".into()))?;
    Ok(BlockData { v: v.clone(), alpha, epsilon, b, b_tilde, f, b_inv })
}

fn banded<T: Real>(
    alpha: T,
    theta: T,
    v: &TrigPotential<T>,
    size: usize,
    epsilon: T,
    periodic: bool,
) -> ComplexMatrix<T> {
    let d = v.degree() as i64;
    let n = size as i64;
    let mut m = ComplexMatrix::zeros(size, size);
    for s in 0..n {
        m[(s as usize, s as usize)] = two_cos(theta + T::from_i64(s).unwrap() * alpha);
        for k in -d..=d {
            if k == 0 {
                continue;
            }
            let t = s - k;
            let t = if periodic {
                t.rem_euclid(n)
            } else if (0..n).contains(&t) {
                t
            } else {
                continue;
            };
            let c = v.hop(k, epsilon);
            m[(s as usize, t as usize)] = m[(s as usize, t as usize)] + c;
        }
    }
    m
}

/// Dual operator restricted to sites `[0, nd-1]`.
pub fn dirichlet_matrix<T: Real>(alpha: T, theta: T, v: &TrigPotential<T>, n: usize, epsilon: T) -> Result<ComplexMatrix<T>> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    Ok(banded(alpha, theta, v, n * v.degree(), epsilon, false))
}

/// Dual operator on `nd` sites with periodic wrap; corners carry `B` and `B^*`.
pub fn periodic_matrix<T: Real>(alpha: T, theta: T, v: &TrigPotential<T>, n: usize, epsilon: T) -> Result<ComplexMatrix<T>> {
    if n < 3 {
        return Err(Error::Domain("periodic matrix needs n >= 3".into()));
    }
    Ok(banded(alpha, theta, v, n * v.degree(), epsilon, true))
}

/// Block display of the periodic matrix: block row `r` holds `C(theta + (n-1-r) d alpha)`,
/// `B` below and `Btilde` above the diagonal, `B` top-right and `Btilde` bottom-left.
pub fn periodic_block_form<T: Real>(blocks: &BlockData<T>, theta: T, n: usize) -> ComplexMatrix<T> {
    let d = blocks.v.degree();
    let mut m = ComplexMatrix::zeros(n * d, n * d);
    for r in 0..n {
        let shift = T::from_usize((n - 1 - r) * d).unwrap() * blocks.alpha;
        m.set_block(r * d, r * d, &blocks.c(theta + shift));
        m.set_block(r * d, ((r + 1) % n) * d, &blocks.b_tilde);
        m.set_block(r * d, ((r + n - 1) % n) * d, &blocks.b);
    }
    m
}

/// Site reversal `J M J`, mapping natural order to the block display order.
pub fn reverse_sites<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = m.rows();
    ComplexMatrix::from_fn(n, n, |i, j| m[(n - 1 - i, n - 1 - j)]).with_log_scale(m.log_scale())
}

/// `H`, `Htilde`, `Hhat` on `l^2(Z_q)`.
#[derive(Clone, Debug)]
pub struct CyclicOperators<T: Real> {
    pub h: ComplexMatrix<T>,
    pub h_tilde: ComplexMatrix<T>,
    pub h_hat: ComplexMatrix<T>,
}

fn coprime(p: u64, q: u64) -> bool {
    num_integer::gcd(p, q) == 1
}

/// `e^{2 pi i j / q}` with the exponent reduced mod `q`.
fn root<T: Real>(j: i64, q: u64) -> Complex<T> {
    let r = j.rem_euclid(q as i64);
    cis(T::two_pi() * T::from_i64(r).unwrap() / T::from_u64(q).unwrap())
}

pub fn cyclic_operators<T: Real>(p: u64, q: u64, theta: T, epsilon: T, v: &TrigPotential<T>) -> Result<CyclicOperators<T>> {
    if q < 3 {
        return Err(Error::Domain("need q >= 3".into()));
    }
    if !coprime(p, q) {
        return Err(Error::Domain(format!("gcd({p}, {q}) != 1")));
    }
    let qi = q as i64;
    let qs = q as usize;
    let frac = |n: i64| T::from_i64((n * p as i64).rem_euclid(qi)).unwrap() / T::from_u64(q).unwrap();
    let ie = Complex::new(T::zero(), epsilon);
    let mut h = ComplexMatrix::zeros(qs, qs);
    let mut ht = ComplexMatrix::zeros(qs, qs);
    let mut hh = ComplexMatrix::zeros(qs, qs);
    let fwd = cis(T::two_pi() * theta);
    for n in 0..qi {
        let u = n as usize;
        let up = (n + 1).rem_euclid(qi) as usize;
        let dn = (n - 1).rem_euclid(qi) as usize;
        h[(u, up)] = h[(u, up)] + re(T::one());
        h[(u, dn)] = h[(u, dn)] + re(T::one());
        h[(u, u)] = h[(u, u)] + v.eval(re(theta + frac(n)) + ie);
        ht[(u, up)] = ht[(u, up)] + fwd;
        ht[(u, dn)] = ht[(u, dn)] + fwd.conj();
        ht[(u, u)] = ht[(u, u)] + v.eval(re(frac(n)) + ie);
        let d = v.degree() as i64;
        for k in -d..=d {
            if k != 0 {
                let t = (n - k).rem_euclid(qi) as usize;
                hh[(u, t)] = hh[(u, t)] + v.hop(k, epsilon);
            }
        }
        hh[(u, u)] = hh[(u, u)] + two_cos(theta + frac(n));
    }
    Ok(CyclicOperators { h, h_tilde: ht, h_hat: hh })
}

/// `(F phi)_n = q^{-1/2} sum_m e^{2 pi i m n p / q} phi_m`.
pub fn cyclic_fourier<T: Real>(p: u64, q: u64) -> Result<ComplexMatrix<T>> {
    if q == 0 || !coprime(p, q) {
        return Err(Error::Domain(format!("gcd({p}, {q}) != 1")));
    }
    let s = T::one() / T::from_u64(q).unwrap().sqrt();
    Ok(ComplexMatrix::from_fn(q as usize, q as usize, |n, m| root::<T>((m * n) as i64 * p as i64, q) * s))
}

/// `|| F^{-1} Htilde F - Hhat ||` in operator norm, i.e. `F Hhat F^{-1} = Htilde`.
pub fn duality_conjugation_residual<T: Real>(p: u64, q: u64, theta: T, epsilon: T, v: &TrigPotential<T>) -> Result<T> {
    let ops = cyclic_operators(p, q, theta, epsilon, v)?;
    let f = cyclic_fourier::<T>(p, q)?;
    let lhs = f.adjoint().matmul(&ops.h_tilde).matmul(&f);
    let diff = &lhs - &ops.h_hat;
    Ok(svd(&diff).singular_values[0])
}

/// `|| F Htilde F^{-1} - Hhat ||` (the opposite conjugation direction), for comparison.
pub fn duality_conjugation_residual_reversed<T: Real>(
    p: u64,
    q: u64,
    theta: T,
    epsilon: T,
    v: &TrigPotential<T>,
) -> Result<T> {
    let ops = cyclic_operators(p, q, theta, epsilon, v)?;
    let f = cyclic_fourier::<T>(p, q)?;
    let lhs = f.matmul(&ops.h_tilde).matmul(&f.adjoint());
    Ok(svd(&(&lhs - &ops.h_hat)).singular_values[0])
}

/// Scalar operator `phi_{n+1} + phi_{n-1} + v(theta + n alpha) phi_n` on `[0, n-1]`.
pub fn scalar_dirichlet_matrix<T: Real>(alpha: T, theta: T, v: &TrigPotential<T>, n: usize) -> Result<ComplexMatrix<T>> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            v.eval(re(theta + T::from_usize(i).unwrap() * alpha))
        } else if i.abs_diff(j) == 1 {
            cone()
        } else {
            czero()
        }
    }))
}

/// Eigenvalues of the `n`-site scalar Dirichlet matrix whose eigenvectors keep at most
/// `edge_mass` of their weight in the outer tenth on each side.
pub fn interior_energies(alpha: f64, theta: f64, v: &TrigPotential<f64>, n: usize, edge_mass: f64) -> Result<Vec<f64>> {
    let h = scalar_dirichlet_matrix(alpha, theta, v, n)?;
    let eig = crate::linalg::hermitian_eigen(&h)?;
    let edge = (n / 10).max(1);
    Ok((0..n)
        .filter(|&k| {
            let w: f64 = (0..n).filter(|&i| i < edge || i >= n - edge).map(|i| eig.vectors[(i, k)].norm_sqr()).sum();
            w <= edge_mass
        })
        .map(|k| eig.values[k])
        .collect())
}
