//! Transfer matrices, cocycle products, finite-scale Lyapunov spectra, acceleration,
//! and structural identities of the block cocycle.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{compound_matrix, general_eigenvalues, lu_det, svd, ComplexMatrix, GradedProduct};
use crate::operators::{build_blocks, BlockData, TrigPotential};
use crate::report::IdentityResidualReport;
use crate::scalar::{cone, czero, e2pi, re, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `A_{E,eps}(theta) = [[E - v(theta + i eps), -1], [1, 0]]` over `alpha`.
    Scalar,
    /// One-step `2d x 2d` dual transfer matrix over `alpha`.
    DualOneStep,
    /// Block transfer matrix `M_E^eps` over `d alpha`.
    DualBlock,
}

#[derive(Clone, Debug)]
pub struct CocycleSpec<T: Real> {
    pub alpha: T,
    pub v: TrigPotential<T>,
    pub energy: Complex<T>,
    pub epsilon: T,
    pub side: Side,
}

impl<T: Real> CocycleSpec<T> {
    pub fn new(alpha: T, v: TrigPotential<T>, energy: Complex<T>, epsilon: T, side: Side) -> Self {
        Self { alpha, v, energy, epsilon, side }
    }

    pub fn with_epsilon(&self, epsilon: T) -> Self {
        Self { epsilon, ..self.clone() }
    }

    pub fn with_side(&self, side: Side) -> Self {
        Self { side, ..self.clone() }
    }

    pub fn with_alpha(&self, alpha: T) -> Self {
        Self { alpha, ..self.clone() }
    }
}

/// An analytic matrix-valued function over a rotation.
pub trait MatrixCocycle<T: Real>: Sync {
    fn dim(&self) -> usize;
    /// Rotation step of the base dynamics.
    fn frequency(&self) -> T;
    fn at(&self, theta: Complex<T>) -> ComplexMatrix<T>;
}

/// Cocycle built from a [`CocycleSpec`].
#[derive(Clone, Debug)]
pub struct Cocycle<T: Real> {
    pub spec: CocycleSpec<T>,
    blocks: Option<BlockData<T>>,
}

impl<T: Real> Cocycle<T> {
    pub fn new(spec: CocycleSpec<T>) -> Result<Self> {
        let blocks = match spec.side {
            Side::Scalar => None,
            _ => Some(build_blocks(&spec.v, spec.alpha, spec.epsilon)?),
        };
        Ok(Self { spec, blocks })
    }

    pub fn blocks(&self) -> Option<&BlockData<T>> {
        self.blocks.as_ref()
    }

    fn scalar(&self, theta: Complex<T>) -> ComplexMatrix<T> {
        let s = &self.spec;
        let v = s.v.eval(theta + Complex::new(T::zero(), s.epsilon));
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 0)] = s.energy - v;
        m[(0, 1)] = -cone::<T>();
        m[(1, 0)] = cone();
        m
    }

    fn one_step(&self, theta: Complex<T>) -> ComplexMatrix<T> {
        let s = &self.spec;
        let d = s.v.degree();
        let di = d as i64;
        let lead = s.v.hop(-di, s.epsilon);
        let mut m = ComplexMatrix::zeros(2 * d, 2 * d);
        for j in 0..2 * d {
            let k = j as i64 + 1 - di;
            m[(0, j)] = if j == d - 1 {
                (s.energy - two_cos_c(theta)) / lead
            } else {
                -s.v.hop(k, s.epsilon) / lead
            };
        }
        for r in 1..2 * d {
            m[(r, r - 1)] = cone();
        }
        m
    }

    fn block(&self, theta: Complex<T>) -> ComplexMatrix<T> {
        let b = self.blocks.as_ref().expect("dual side has blocks");
        let d = self.spec.v.degree();
        let mut emc = ComplexMatrix::zeros(d, d);
        let c = block_c(b, theta);
        for i in 0..d {
            for j in 0..d {
                emc[(i, j)] = -c[(i, j)] + if i == j { self.spec.energy } else { czero() };
            }
        }
        let ul = emc.matmul(b.b_inv());
        let ur = b.b_tilde.scale(-cone::<T>());
        ComplexMatrix::from_blocks(&ul, &ur, b.b_inv(), &ComplexMatrix::zeros(d, d))
    }
}

/// `2 cos(2 pi z)` at complex `z`.
pub fn two_cos_c<T: Real>(z: Complex<T>) -> Complex<T> {
    e2pi(z) + e2pi(-z)
}

/// `C_eps(theta)` at complex `theta`.
pub fn block_c<T: Real>(b: &BlockData<T>, theta: Complex<T>) -> ComplexMatrix<T> {
    let d = b.v.degree();
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            two_cos_c(theta + re(T::from_usize(d - 1 - i).unwrap() * b.alpha))
        } else {
            b.v.hop(j as i64 - i as i64, b.epsilon)
        }
    })
}

impl<T: Real> MatrixCocycle<T> for Cocycle<T> {
    fn dim(&self) -> usize {
        match self.spec.side {
            Side::Scalar => 2,
            _ => 2 * self.spec.v.degree(),
        }
    }

    fn frequency(&self) -> T {
        match self.spec.side {
            Side::DualBlock => T::from_usize(self.spec.v.degree()).unwrap() * self.spec.alpha,
            _ => self.spec.alpha,
        }
    }

    fn at(&self, theta: Complex<T>) -> ComplexMatrix<T> {
        match self.spec.side {
            Side::Scalar => self.scalar(theta),
            Side::DualOneStep => self.one_step(theta),
            Side::DualBlock => self.block(theta),
        }
    }
}

/// `theta`-independent cocycle.
#[derive(Clone, Debug)]
pub struct ConstantCocycle<T: Real> {
    pub matrix: ComplexMatrix<T>,
    pub alpha: T,
}

impl<T: Real> MatrixCocycle<T> for ConstantCocycle<T> {
    fn dim(&self) -> usize {
        self.matrix.rows()
    }
    fn frequency(&self) -> T {
        self.alpha
    }
    fn at(&self, _theta: Complex<T>) -> ComplexMatrix<T> {
        self.matrix.clone()
    }
}

/// Cocycle given by a closure.
pub struct FnCocycle<T: Real, F: Fn(Complex<T>) -> ComplexMatrix<T> + Sync> {
    pub dim: usize,
    pub alpha: T,
    pub f: F,
}

impl<T: Real, F: Fn(Complex<T>) -> ComplexMatrix<T> + Sync> MatrixCocycle<T> for FnCocycle<T, F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn frequency(&self) -> T {
        self.alpha
    }
    fn at(&self, theta: Complex<T>) -> ComplexMatrix<T> {
        (self.f)(theta)
    }
}

pub fn transfer_matrix<T: Real>(spec: &CocycleSpec<T>, theta: Complex<T>) -> Result<ComplexMatrix<T>> {
    Ok(Cocycle::new(spec.clone())?.at(theta))
}

/// `A(theta + (n-1) w) ... A(theta)` with renormalization into `log_scale`.
pub fn product<T: Real>(c: &dyn MatrixCocycle<T>, theta: Complex<T>, n: usize) -> ComplexMatrix<T> {
    let w = re(c.frequency());
    let mut acc = ComplexMatrix::identity(c.dim());
    let mut th = theta;
    for _ in 0..n {
        acc = c.at(th).matmul(&acc);
        acc.renormalize_if_needed();
        th = th + w;
    }
    acc
}

pub fn cocycle_product<T: Real>(spec: &CocycleSpec<T>, theta: Complex<T>, n: usize) -> Result<ComplexMatrix<T>> {
    if n == 0 {
        return Err(Error::Domain("need n >= 1".into()));
    }
    Ok(product(&Cocycle::new(spec.clone())?, theta, n))
}

/// Graded (QR-cascade) product over `n` steps.
pub fn graded_product<T: Real>(c: &dyn MatrixCocycle<T>, theta: Complex<T>, n: usize, track_t: bool) -> GradedProduct<T> {
    let w = re(c.frequency());
    let mut g = GradedProduct::new(c.dim(), track_t);
    let mut th = theta;
    for _ in 0..n {
        g.push(&c.at(th));
        th = th + w;
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LyapunovMethod {
    QrCascade,
    CompoundNorms,
    RationalSpectralRadius,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSpectrum {
    /// `L_1 >= ... >= L_k`.
    pub exponents: Vec<f64>,
    /// `L^j = L_1 + ... + L_j`.
    pub partial_sums: Vec<f64>,
    pub scale: usize,
    pub grid_size: usize,
    pub method: LyapunovMethod,
    /// Max partial-sum gap against the compound-norm method on a sub-grid (`None` if not run).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_method_gap: Option<f64>,
}

impl LyapunovSpectrum {
    fn from_partial(partial: Vec<f64>, scale: usize, grid: usize, method: LyapunovMethod) -> Self {
        let mut exps = Vec::with_capacity(partial.len());
        let mut prev = 0.0;
        for &p in &partial {
            exps.push(p - prev);
            prev = p;
        }
        let partial_sums = prefix(&exps);
        Self { exponents: exps, partial_sums, scale, grid_size: grid, method, cross_method_gap: None }
    }

    fn from_exponents(exps: Vec<f64>, scale: usize, grid: usize, method: LyapunovMethod) -> Self {
        let partial_sums = prefix(&exps);
        Self { exponents: exps, partial_sums, scale, grid_size: grid, method, cross_method_gap: None }
    }

    pub fn top(&self) -> f64 {
        self.exponents[0]
    }
}

fn prefix(x: &[f64]) -> Vec<f64> {
    let mut s = 0.0;
    x.iter()
        .map(|v| {
            s += v;
            s
        })
        .collect()
}

/// Index-ordered parallel map; the caller reduces sequentially.
pub fn grid_map<R: Send, F: Fn(usize) -> R + Sync + Send>(grid: usize, f: F) -> Vec<R> {
    (0..grid).into_par_iter().map(f).collect()
}

fn grid_theta<T: Real>(j: usize, grid: usize, shift: Complex<T>) -> Complex<T> {
    re(T::from_usize(j).unwrap() / T::from_usize(grid).unwrap()) + shift
}

/// Per-`theta` sorted `(1/n) log |D_i|` from the QR cascade.
pub fn qr_exponents_at<T: Real>(c: &dyn MatrixCocycle<T>, theta: Complex<T>, n: usize) -> Vec<f64> {
    let g = graded_product(c, theta, n, false);
    g.log_values().iter().map(|x| x.to_f64_lossy() / n as f64).collect()
}

/// Per-`theta` partial sums `(1/n) log ||wedge^j A_n||` via compound products.
pub fn compound_partial_sums_at<T: Real>(c: &dyn MatrixCocycle<T>, theta: Complex<T>, n: usize) -> Vec<f64> {
    let k = c.dim();
    let w = re(c.frequency());
    let mut acc: Vec<ComplexMatrix<T>> = (1..=k)
        .map(|j| ComplexMatrix::identity(crate::linalg::subsets(k, j).len()))
        .collect();
    let mut th = theta;
    for _ in 0..n {
        let m = c.at(th);
        for (j, a) in acc.iter_mut().enumerate() {
            let cj = compound_matrix(&m, j + 1).expect("valid order");
            *a = cj.matmul(a);
            a.normalize();
        }
        th = th + w;
    }
    acc.iter()
        .map(|a| {
            let s = svd(a);
            (s.singular_values[0].ln() + s.log_scale).to_f64_lossy() / n as f64
        })
        .collect()
}

/// Grid-average Lyapunov spectrum of `c` at scale `n`, `theta_j = j/grid + shift`.
pub fn lyapunov_of<T: Real>(c: &dyn MatrixCocycle<T>, n: usize, grid: usize, shift: Complex<T>) -> LyapunovSpectrum {
    let rows = grid_map(grid, |j| qr_exponents_at(c, grid_theta(j, grid, shift), n));
    let k = c.dim();
    let mut avg = vec![0.0; k];
    for r in &rows {
        for i in 0..k {
            avg[i] += r[i];
        }
    }
    for a in &mut avg {
        *a /= grid as f64;
    }
    LyapunovSpectrum::from_exponents(avg, n, grid, LyapunovMethod::QrCascade)
}

/// Compound-norm spectrum on the same grid.
pub fn lyapunov_compound_of<T: Real>(c: &dyn MatrixCocycle<T>, n: usize, grid: usize, shift: Complex<T>) -> LyapunovSpectrum {
    let rows = grid_map(grid, |j| compound_partial_sums_at(c, grid_theta(j, grid, shift), n));
    let k = c.dim();
    let mut avg = vec![0.0; k];
    for r in &rows {
        for i in 0..k {
            avg[i] += r[i];
        }
    }
    for a in &mut avg {
        *a /= grid as f64;
    }
    LyapunovSpectrum::from_partial(avg, n, grid, LyapunovMethod::CompoundNorms)
}

/// Largest partial-sum discrepancy between the two methods on a `sub_grid`-point grid.
pub fn cross_method_gap<T: Real>(c: &dyn MatrixCocycle<T>, n: usize, sub_grid: usize) -> f64 {
    let a = lyapunov_of(c, n, sub_grid, czero());
    let b = lyapunov_compound_of(c, n, sub_grid, czero());
    a.partial_sums.iter().zip(&b.partial_sums).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// QR-cascade spectrum; `cross_check` sub-grid size adds the compound-norm comparison.
pub fn finite_lyapunov_spectrum<T: Real>(
    spec: &CocycleSpec<T>,
    n: usize,
    grid: usize,
    cross_check: Option<usize>,
) -> Result<LyapunovSpectrum> {
    if n == 0 || grid == 0 {
        return Err(Error::Domain("need n >= 1 and grid >= 1".into()));
    }
    let c = Cocycle::new(spec.clone())?;
    let mut out = lyapunov_of(&c, n, grid, czero());
    if let Some(g) = cross_check {
        out.cross_method_gap = Some(cross_method_gap(&c, n, g.max(1)));
    }
    Ok(out)
}

/// `L^j(p/q, A, theta) = (1/q) log rho(wedge^j A_q(p/q, theta))`.
pub fn rational_lyapunov<T: Real>(p: u64, q: u64, spec: &CocycleSpec<T>, theta: T) -> Result<LyapunovSpectrum> {
    if q == 0 {
        return Err(Error::Domain("q must be positive".into()));
    }
    let s = spec.with_alpha(T::from_u64(p).unwrap() / T::from_u64(q).unwrap());
    let c = Cocycle::new(s)?;
    let mut a = product(&c, re(theta), q as usize);
    a.normalize();
    let k = c.dim();
    let mut partial = Vec::with_capacity(k);
    for j in 1..=k {
        let cj = compound_matrix(&a, j)?;
        let ev = general_eigenvalues(&cj.clone().with_log_scale(T::zero()))?;
        let rho = ev.first().map_or(T::zero(), |z| z.norm());
        partial.push((rho.ln() + cj.log_scale()).to_f64_lossy() / q as f64);
    }
    Ok(LyapunovSpectrum::from_partial(partial, q as usize, 1, LyapunovMethod::RationalSpectralRadius))
}

/// Same quantity from the eigenvalues of `A_q` directly: top-`m` log-moduli summed.
pub fn rational_lyapunov_eigen_route<T: Real>(p: u64, q: u64, spec: &CocycleSpec<T>, theta: T) -> Result<Vec<f64>> {
    let s = spec.with_alpha(T::from_u64(p).unwrap() / T::from_u64(q).unwrap());
    let c = Cocycle::new(s)?;
    let mut a = product(&c, re(theta), q as usize);
    a.normalize();
    let ls = a.log_scale();
    let ev = general_eigenvalues(&a.with_log_scale(T::zero()))?;
    let logs: Vec<f64> = ev.iter().map(|z| (z.norm().ln() + ls).to_f64_lossy() / q as f64).collect();
    Ok(prefix(&logs))
}

fn rel_report(name: &str, lhs: &ComplexMatrix<f64>, rhs: &ComplexMatrix<f64>, tol: f64, params: serde_json::Value) -> IdentityResidualReport {
    let abs = lhs.max_diff(rhs);
    let scale = lhs.to_plain().max_abs().max(rhs.to_plain().max_abs()).max(1.0);
    IdentityResidualReport::new(name, params, abs, abs / scale, tol)
}

fn to_f64<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m[(i, j)];
        Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
    })
    .with_log_scale(m.log_scale().to_f64_lossy())
}

/// Symplecticity (at `eps = 0`), block recursions at scales `1..=n`, the `d`-step
/// conjugation to the one-step cocycle, and the `F_eps` conjugation.
pub fn structural_residuals<T: Real>(spec: &CocycleSpec<T>, theta: T, n: usize) -> Result<Vec<IdentityResidualReport>> {
    let tol = 1e-9;
    let d = spec.v.degree();
    let params = serde_json::json!({
        "alpha": spec.alpha.to_f64_lossy(), "d": d, "theta": theta.to_f64_lossy(),
        "epsilon": spec.epsilon.to_f64_lossy(), "n": n,
        "energy": [spec.energy.re.to_f64_lossy(), spec.energy.im.to_f64_lossy()],
    });
    let th = re(theta);
    let block = Cocycle::new(spec.with_side(Side::DualBlock))?;
    let block0 = Cocycle::new(spec.with_side(Side::DualBlock).with_epsilon(T::zero()))?;
    let one = Cocycle::new(spec.with_side(Side::DualOneStep))?;
    let mut out = Vec::new();

    // (i) M^* Omega M = Omega for the eps = 0 block cocycle
    let m0 = to_f64(&block0.at(th));
    let omega = omega_matrix(d);
    let lhs = m0.adjoint().matmul(&omega).matmul(&m0);
    out.push(rel_report("symplectic", &lhs, &omega, tol, params.clone()));

    // (ii) block recursions at scales 1..=n
    let bd = block.blocks().unwrap();
    let dw = re(T::from_usize(d).unwrap() * spec.alpha);
    let x = to_f64(&block.at(th).block(0, 0, d, d));
    let bt = to_f64(&bd.b_tilde);
    let binv = to_f64(bd.b_inv());
    let mut worst = (0.0f64, 0.0f64);
    for k in 1..=n {
        let mk = to_f64(&product(&block, th, k));
        let (ul, ur, ll, lr) = (mk.block(0, 0, d, d), mk.block(0, d, d, d), mk.block(d, 0, d, d), mk.block(d, d, d, d));
        let (eul, eur, ell, elr) = if k == 1 {
            (x.clone(), bt.scale(Complex::new(-1.0, 0.0)), binv.clone(), ComplexMatrix::zeros(d, d))
        } else {
            let prev = to_f64(&product(&block, th + dw, k - 1));
            let (pul, pur, pll, plr) =
                (prev.block(0, 0, d, d), prev.block(0, d, d, d), prev.block(d, 0, d, d), prev.block(d, d, d, d));
            (
                &pul.matmul(&x) + &pur.matmul(&binv),
                pul.matmul(&bt).scale(Complex::new(-1.0, 0.0)),
                &pll.matmul(&x) + &plr.matmul(&binv),
                pll.matmul(&bt).scale(Complex::new(-1.0, 0.0)),
            )
        };
        let scale = mk.to_plain().max_abs().max(1.0);
        for (a, b) in [(&ul, &eul), (&ur, &eur), (&ll, &ell), (&lr, &elr)] {
            let r = a.max_diff(b);
            if r / scale > worst.1 {
                worst = (r, r / scale);
            }
        }
    }
    out.push(IdentityResidualReport::new("block_recursions", params.clone(), worst.0, worst.1, tol));

    // (iii) M(theta) = diag(B, I) Ahat_d(theta) diag(B^{-1}, I)
    let ad = to_f64(&product(&one, th, d));
    let b = to_f64(&bd.b);
    let id = ComplexMatrix::identity(d);
    let rhs = ComplexMatrix::block_diag(&b, &id).matmul(&ad).matmul(&ComplexMatrix::block_diag(&binv, &id));
    out.push(rel_report("d_step_conjugation", &to_f64(&block.at(th)), &rhs, tol, params.clone()));

    // (iv) M^eps = e^{-2 pi d eps} diag(F, F) M^0 diag(F^{-1}, F^{-1})
    let f = to_f64(&bd.f);
    let finv = ComplexMatrix::diag(&(0..d).map(|i| Complex::new(1.0 / f[(i, i)].re, 0.0)).collect::<Vec<_>>());
    let pre = (-std::f64::consts::TAU * d as f64 * spec.epsilon.to_f64_lossy()).exp();
    let rhs = ComplexMatrix::block_diag(&f, &f)
        .matmul(&m0)
        .matmul(&ComplexMatrix::block_diag(&finv, &finv))
        .scale(Complex::new(pre, 0.0));
    out.push(rel_report("f_eps_conjugation", &to_f64(&block.at(th)), &rhs, tol, params));
    Ok(out)
}

/// `Omega = [[0, I], [-I, 0]]`.
pub fn omega_matrix(d: usize) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| {
        if j == i + d {
            Complex::new(1.0, 0.0)
        } else if i == j + d {
            Complex::new(-1.0, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    })
}

/// `det M_E^eps(theta)`; has unit modulus and equals `conj(det B_0) / det B_0`.
pub fn block_det<T: Real>(spec: &CocycleSpec<T>, theta: T) -> Result<Complex<T>> {
    let c = Cocycle::new(spec.with_side(Side::DualBlock))?;
    Ok(lu_det(&c.at(re(theta)))?.value())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentShiftReport {
    pub max_residual: f64,
    /// `(eps, m, residual)` per entry.
    pub entries: Vec<(f64, usize, f64)>,
}

/// `max_{m, eps} |Lhat_m(eps) - Lhat_m(0) + 2 pi eps|` for the one-step dual cocycle.
pub fn exponent_shift_residual<T: Real>(spec: &CocycleSpec<T>, n: usize, grid: usize, eps_list: &[T]) -> Result<ExponentShiftReport> {
    let base = finite_lyapunov_spectrum(&spec.with_side(Side::DualOneStep).with_epsilon(T::zero()), n, grid, None)?;
    let mut entries = Vec::new();
    let mut worst: f64 = 0.0;
    for &e in eps_list {
        let ef = e.to_f64_lossy();
        let l = if ef == 0.0 {
            base.clone()
        } else {
            finite_lyapunov_spectrum(&spec.with_side(Side::DualOneStep).with_epsilon(e), n, grid, None)?
        };
        for m in 0..l.exponents.len() {
            let r = (l.exponents[m] - base.exponents[m] + std::f64::consts::TAU * ef).abs();
            worst = worst.max(r);
            entries.push((ef, m + 1, r));
        }
    }
    Ok(ExponentShiftReport { max_residual: worst, entries })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccelerationReport {
    pub kappa: f64,
    pub nearest_integer: i64,
    pub integer_distance: f64,
    /// `|L(e1) - 2 L(e2) + L(e3)| / (2 pi delta)`.
    pub collinearity: f64,
    pub near_kink: bool,
    /// `(eps, L^1(eps))` samples.
    pub curve: Vec<(f64, f64)>,
}

/// Top exponent of `c` with `theta` complexified by `i eta`.
pub fn top_exponent_complexified<T: Real>(c: &dyn MatrixCocycle<T>, eta: T, n: usize, grid: usize) -> f64 {
    let shift = Complex::new(T::zero(), eta);
    let vals = grid_map(grid, |j| {
        qr_exponents_at(c, grid_theta(j, grid, shift), n)[0]
    });
    vals.iter().sum::<f64>() / grid as f64
}

/// Right slope of `L^1(eps) / 2 pi` from three points above `eps_center`.
pub fn acceleration_of<T: Real>(c: &dyn MatrixCocycle<T>, eps_center: T, delta: T, n: usize, grid: usize) -> Result<AccelerationReport> {
    if delta <= T::zero() {
        return Err(Error::Domain("delta must be positive".into()));
    }
    let mut curve = Vec::with_capacity(3);
    for k in 1..=3 {
        let e = eps_center + delta * T::from_usize(k).unwrap();
        curve.push((e.to_f64_lossy(), top_exponent_complexified(c, e, n, grid)));
    }
    let dl = delta.to_f64_lossy();
    let tau = std::f64::consts::TAU;
    let slope = (curve[2].1 - curve[0].1) / (2.0 * dl);
    let kappa = slope / tau;
    let nearest = kappa.round();
    let collinearity = (curve[0].1 - 2.0 * curve[1].1 + curve[2].1).abs() / (tau * dl);
    Ok(AccelerationReport {
        kappa,
        nearest_integer: nearest as i64,
        integer_distance: (kappa - nearest).abs(),
        collinearity,
        near_kink: collinearity > 1e-2,
        curve,
    })
}

/// Acceleration of the cocycle in `spec` (its own `epsilon` is kept as the base strip).
pub fn acceleration<T: Real>(spec: &CocycleSpec<T>, eps_center: T, delta: T, n: usize, grid: usize) -> Result<AccelerationReport> {
    acceleration_of(&Cocycle::new(spec.clone())?, eps_center, delta, n, grid)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Supercritical,
    Subcritical,
    Critical,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub regime: Regime,
    pub lyapunov: f64,
    pub kappa: f64,
    pub l_tol: f64,
}

/// Regime from `(L, kappa)` of the scalar cocycle at `eps = 0`.
pub fn classify_energy<T: Real>(spec: &CocycleSpec<T>, n: usize, grid: usize, l_tol: f64) -> Result<Classification> {
    if spec.side != Side::Scalar {
        return Err(Error::Domain("classification needs the scalar side".into()));
    }
    let s0 = spec.with_epsilon(T::zero());
    let l = finite_lyapunov_spectrum(&s0, n, grid, None)?.top();
    let acc = acceleration(&s0, T::zero(), T::lit(0.01), n, grid)?;
    let k = acc.kappa;
    let regime = match (l > l_tol, k >= 0.5) {
        (true, true) => Regime::Supercritical,
        (false, false) => Regime::Subcritical,
        (false, true) => Regime::Critical,
        (true, false) => Regime::Outside,
    };
    Ok(Classification { regime, lyapunov: l, kappa: k, l_tol })
}
