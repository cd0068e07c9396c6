//! Finite-volume diagnostics: periodic Green's functions, Poisson formula, numerator and
//! denominator measurements, large deviations, symplectic singular subspaces, the
//! avalanche principle, uniformity, eigenfunction decay and the almost-reducibility demo.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{admissible_sequence, epsilon_resonances, Resonance};
use crate::cocycles::{
    finite_lyapunov_spectrum, grid_map, product, Cocycle, CocycleSpec, MatrixCocycle, Side,
};
use crate::error::{Error, Result};
use crate::linalg::{gram_pairing, hermitian_eigen, inverse, lu_det, op_norm, svd, ComplexMatrix, LogDet};
use crate::operators::{dirichlet_matrix, periodic_matrix, TrigPotential};
use crate::scalar::{e2pi, re};

type C = Complex<f64>;

/// `log|f|` below this is treated as a periodic eigenvalue.
pub const SINGULAR_LOG_FLOOR: f64 = -250.0;

fn shift_diag(m: &ComplexMatrix<f64>, e: C) -> ComplexMatrix<f64> {
    let mut a = m.clone();
    for i in 0..a.rows() {
        a[(i, i)] -= e;
    }
    a
}

/// `G = (P_n(theta) - E)^{-1}` in natural site order, with `f = det(P_n - E)`.
#[derive(Clone, Debug)]
pub struct GreensBundle {
    pub n: usize,
    pub theta: f64,
    pub energy: C,
    pub g: ComplexMatrix<f64>,
    pub f: LogDet<f64>,
    /// `P_n(theta) - E`.
    pub shifted: ComplexMatrix<f64>,
    /// `max |((P - E) G - I)_{ij}|`.
    pub inverse_residual: f64,
}

impl GreensBundle {
    pub fn size(&self) -> usize {
        self.g.rows()
    }

    /// Signed cofactor `(-1)^{x+y} det(P - E with row y, column x removed)`, so that `G(x,y) = mu / f`.
    pub fn numerator(&self, x: usize, y: usize) -> Result<LogDet<f64>> {
        let n = self.size();
        if x >= n || y >= n {
            return Err(Error::IndexRange(format!("({x}, {y}) outside {n} sites")));
        }
        if n == 1 {
            return Ok(LogDet::one());
        }
        let rows: Vec<usize> = (0..n).filter(|&i| i != y).collect();
        let cols: Vec<usize> = (0..n).filter(|&j| j != x).collect();
        let minor = ComplexMatrix::from_fn(n - 1, n - 1, |i, j| self.shifted[(rows[i], cols[j])]);
        let mut d = lu_det(&minor)?;
        if (x + y) % 2 == 1 {
            d.mantissa = -d.mantissa;
        }
        Ok(d)
    }

    /// `|G(x,y) - mu/f| / max(|G(x,y)|, tiny)`.
    pub fn cramer_residual(&self, x: usize, y: usize) -> Result<f64> {
        let ratio = self.numerator(x, y)?.div(self.f).value();
        let g = self.g[(x, y)];
        let scale = g.norm().max(self.g.max_abs() * 1e-12);
        Ok((g - ratio).norm() / scale)
    }
}

pub fn greens_bundle(alpha: f64, theta: f64, v: &TrigPotential<f64>, n: usize, e: C) -> Result<GreensBundle> {
    let p = periodic_matrix(alpha, theta, v, n, 0.0)?;
    let shifted = shift_diag(&p, e);
    let f = lu_det(&shifted)?;
    if f.is_zero() || f.log_abs < SINGULAR_LOG_FLOOR {
        return Err(Error::Singular("energy is a periodic eigenvalue".into()));
    }
    let g = inverse(&shifted).map_err(|_| Error::Singular("energy is a periodic eigenvalue".into()))?;
    let prod = shifted.matmul(&g);
    let inverse_residual = prod.max_diff(&ComplexMatrix::identity(prod.rows()));
    Ok(GreensBundle { n, theta, energy: e, g, f, shifted, inverse_residual })
}

/// Dual solution samples `u[i] = u_{start + i}`.
#[derive(Clone, Debug)]
pub struct DualSolution<'a> {
    pub values: &'a [C],
    pub start: i64,
}

impl DualSolution<'_> {
    fn get(&self, k: i64) -> Option<C> {
        let i = k - self.start;
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied()
    }

    fn sup(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Max equation defect `|(H u - E u)_s|` over `s` in `[lo, hi]`.
pub fn dual_equation_defect(alpha: f64, theta: f64, v: &TrigPotential<f64>, e: C, u: &DualSolution, lo: i64, hi: i64) -> Result<f64> {
    let d = v.degree() as i64;
    let mut worst: f64 = 0.0;
    for s in lo..=hi {
        let mut acc = (re(2.0) * (2.0 * std::f64::consts::PI * (theta + s as f64 * alpha)).cos() - e)
            * u.get(s).ok_or_else(|| Error::Precondition(format!("no sample at {s}")))?;
        for k in -d..=d {
            if k != 0 {
                let t = u.get(s - k).ok_or_else(|| Error::Precondition(format!("no sample at {}", s - k)))?;
                acc += v.hop(k, 0.0) * t;
            }
        }
        worst = worst.max(acc.norm());
    }
    Ok(worst)
}

/// `|u_m - sum_s G(m - k, s) b_s|` with `G` the Green's function of the window `[k, k + nd - 1]`.
#[allow(clippy::too_many_arguments)]
pub fn poisson_residual(
    alpha: f64,
    theta: f64,
    v: &TrigPotential<f64>,
    n: usize,
    e: C,
    u: &DualSolution,
    k: i64,
    m: i64,
) -> Result<f64> {
    let d = v.degree() as i64;
    let size = n as i64 * d;
    if m < k || m >= k + size {
        return Err(Error::IndexRange(format!("m = {m} outside [{k}, {}]", k + size - 1)));
    }
    let defect = dual_equation_defect(alpha, theta, v, e, u, k, k + size - 1)?;
    let tol = 1e-8 * u.sup().max(1e-300);
    if defect > tol {
        return Err(Error::Precondition(format!("u fails the eigenvalue equation: defect {defect:.3e}")));
    }
    let bundle = greens_bundle(alpha, theta + k as f64 * alpha, v, n, e)?;
    let local = |s: i64| u.get(k + s).unwrap();
    let mut b = vec![C::new(0.0, 0.0); size as usize];
    for (s, bs) in b.iter_mut().enumerate() {
        let s = s as i64;
        for j in -d..=d {
            let t = s - j;
            if j != 0 && !(0..size).contains(&t) {
                *bs += v.hop(j, 0.0) * (local(t.rem_euclid(size)) - u.get(k + t).unwrap());
            }
        }
    }
    let row = (m - k) as usize;
    let sum: C = (0..size as usize).map(|s| bundle.g[(row, s)] * b[s]).sum();
    Ok((u.get(m).unwrap() - sum).norm())
}

fn block_spectrum(alpha: f64, v: &TrigPotential<f64>, e: f64, n: usize, grid: usize) -> Result<Vec<f64>> {
    let spec = CocycleSpec::new(alpha, v.clone(), C::new(e, 0.0), 0.0, Side::DualBlock);
    Ok(finite_lyapunov_spectrum(&spec, n, grid, None)?.partial_sums)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumeratorReport {
    pub x: usize,
    pub y: usize,
    pub ell: usize,
    /// `sup_theta (1/n)(log|mu| - n log|det B|)`.
    pub measured: f64,
    /// `(2 log||B^{-1}|| + max(l L^{d-1} + (n-l) L^d, l L^d + (n-l) L^{d-1})) / n`.
    pub bound: f64,
    pub margin: f64,
    /// `L^{d-1}, L^d` of the block cocycle.
    pub exponents: [f64; 2],
}

/// Lyapunov scale used for the exponents entering the numerator bound.
pub const NUMERATOR_LYAP_N: usize = 2000;

/// Numerator growth for indices in the block display order (block row 0 carries `C(theta + (n-1) d alpha)`).
pub fn numerator_bound_profile(
    alpha: f64,
    theta_grid: &[f64],
    v: &TrigPotential<f64>,
    n: usize,
    e: f64,
    x: usize,
    y: usize,
) -> Result<NumeratorReport> {
    let d = v.degree();
    let size = n * d;
    if n < 5 {
        return Err(Error::IndexRange("need n >= 5".into()));
    }
    if !(x < d || (x >= (n - 1) * d && x < size)) {
        return Err(Error::IndexRange(format!("x = {x} not in the first or last block row")));
    }
    if !(3 * d..=(n - 1) * d - 1).contains(&y) {
        return Err(Error::IndexRange(format!("y = {y} outside [{}, {}]", 3 * d, (n - 1) * d - 1)));
    }
    let ell = y / d;
    let sums = block_spectrum(alpha, v, e, NUMERATOR_LYAP_N, 64)?;
    let l_d = sums[d - 1];
    let l_dm1 = if d >= 2 { sums[d - 2] } else { 0.0 };
    let (lf, nf) = (ell as f64, n as f64);
    let b_inv = crate::operators::build_blocks(v, alpha, 0.0)?.b_inv().clone();
    let prefactor = 2.0 * op_norm(&b_inv).ln() / nf;
    let bound = prefactor + (lf * l_dm1 + (nf - lf) * l_d).max(lf * l_d + (nf - lf) * l_dm1) / nf;
    let log_det_b = (v.coeff(-(d as i64)).norm().ln()) * d as f64;
    let (xn, yn) = (size - 1 - x, size - 1 - y);
    let vals: Vec<Result<f64>> = theta_grid
        .iter()
        .map(|&th| {
            let p = periodic_matrix(alpha, th, v, n, 0.0)?;
            let shifted = shift_diag(&p, C::new(e, 0.0));
            let rows: Vec<usize> = (0..size).filter(|&i| i != xn).collect();
            let cols: Vec<usize> = (0..size).filter(|&j| j != yn).collect();
            let minor = ComplexMatrix::from_fn(size - 1, size - 1, |i, j| shifted[(rows[i], cols[j])]);
            Ok(lu_det(&minor)?.log_abs)
        })
        .collect();
    let mut measured = f64::NEG_INFINITY;
    for val in vals {
        measured = measured.max((val? - nf * log_det_b) / nf);
    }
    Ok(NumeratorReport { x, y, ell, measured, bound, margin: bound - measured, exponents: [l_dm1, l_d] })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenominatorReport {
    pub n: usize,
    pub epsilon: f64,
    pub threshold: f64,
    pub fraction: f64,
    pub admissible: bool,
    pub flags: Vec<String>,
}

pub const DEFAULT_KAPPA0: f64 = 0.1;

/// Fraction of `theta` with `(1/n) log|f_{E,n}| < log|det B| + (1 - 8 eps) L^d`.
pub fn denominator_stats(
    alpha: f64,
    v: &TrigPotential<f64>,
    e: f64,
    n: usize,
    epsilon: f64,
    grid: usize,
    kappa0: f64,
) -> Result<DenominatorReport> {
    let d = v.degree();
    let l_d = block_spectrum(alpha, v, e, NUMERATOR_LYAP_N, 64)?[d - 1];
    let log_det_b = v.coeff(-(d as i64)).norm().ln() * d as f64;
    let threshold = log_det_b + (1.0 - 8.0 * epsilon) * l_d;
    let logs = grid_map(grid, |j| {
        let th = j as f64 / grid as f64;
        periodic_matrix(alpha, th, v, n, 0.0).and_then(|p| lu_det(&shift_diag(&p, C::new(e, 0.0)))).map(|f| f.log_abs)
    });
    let mut below = 0usize;
    for l in logs {
        if l? / (n as f64) < threshold {
            below += 1;
        }
    }
    let admissible = admissible_sequence(alpha, d as u64, kappa0, n as u64, n as u64)?.contains(&(n as u64));
    let flags = if admissible { vec![] } else { vec!["non-admissible".to_string()] };
    Ok(DenominatorReport { n, epsilon, threshold, fraction: below as f64 / grid as f64, admissible, flags })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeDeviationReport {
    pub n: usize,
    pub epsilon: f64,
    pub reference: f64,
    pub fraction: f64,
    /// `-log(fraction) / (n eps^2 L^d)`; `None` when the fraction is zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_c1: Option<f64>,
}

/// Fraction of `theta` with `(1/n) log||wedge^d M_n(theta)|| <= (1 - eps) L^d`.
pub fn large_deviation_measure(
    alpha: f64,
    v: &TrigPotential<f64>,
    e: f64,
    n: usize,
    epsilon: f64,
    grid: usize,
) -> Result<LargeDeviationReport> {
    let d = v.degree();
    let reference = block_spectrum(alpha, v, e, NUMERATOR_LYAP_N, 64)?[d - 1];
    let c = Cocycle::new(CocycleSpec::new(alpha, v.clone(), C::new(e, 0.0), 0.0, Side::DualBlock))?;
    let vals = grid_map(grid, |j| {
        let m = product(&c, re(j as f64 / grid as f64), n);
        let s = svd(&m).log_singular_values();
        s[..d].iter().sum::<f64>() / n as f64
    });
    let below = vals.iter().filter(|&&x| x <= (1.0 - epsilon) * reference).count();
    let fraction = below as f64 / grid as f64;
    let fitted_c1 = if fraction > 0.0 && reference > 0.0 {
        Some(-fraction.ln() / (n as f64 * epsilon * epsilon * reference))
    } else {
        None
    };
    Ok(LargeDeviationReport { n, epsilon, reference, fraction, fitted_c1 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub d: usize,
    pub sigma_ratio: f64,
    /// `sin` of the largest principal angle between `Omega span(v_1..v_d)` and `span(v_{d+1}..v_{2d})`.
    pub right_subspace_distance: f64,
    pub left_subspace_distance: f64,
    pub top_pairing: f64,
    pub bottom_pairing: f64,
    pub pairing_gap: f64,
    /// `eps_mach * sigma_1 / (sigma_d - sigma_{d+1})`, the attainable subspace accuracy.
    pub subspace_accuracy: f64,
    /// Subspace distances are only meaningful when `subspace_accuracy` is small.
    pub subspace_resolved: bool,
}

fn subspace_distance(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    // max over unit combinations of a of the residual after projecting onto span(b)
    let rows = a[0].len();
    let proj = ComplexMatrix::from_fn(rows, a.len(), |i, j| {
        let x = &a[j];
        let mut r = x[i];
        for bv in b {
            let c: C = bv.iter().zip(x).map(|(p, q)| p.conj() * q).sum();
            r -= c * bv[i];
        }
        r
    });
    op_norm(&proj)
}

/// Singular-subspace duality of a symplectic `M` (`M^* Omega M = Omega`).
pub fn symplectic_pairing_check(m: &ComplexMatrix<f64>) -> Result<PairingReport> {
    if !m.is_square() || m.rows() % 2 == 1 {
        return Err(Error::Domain("need a 2d x 2d matrix".into()));
    }
    let d = m.rows() / 2;
    let plain = m.to_plain();
    let omega = crate::cocycles::omega_matrix(d);
    let norm2 = plain.norm_fro().powi(2).max(1.0);
    let sym = plain.adjoint().matmul(&omega).matmul(&plain).max_diff(&omega) / norm2;
    if sym > 1e-8 {
        return Err(Error::Precondition(format!("not symplectic: residual {sym:.3e}")));
    }
    let s = svd(&plain);
    let sigma_ratio = s.singular_values[d - 1] / s.singular_values[d];
    if !(sigma_ratio > 1.0 + 1e-6) {
        return Err(Error::Degenerate("gap too small".into()));
    }
    let sv = &s.singular_values;
    let subspace_accuracy = f64::EPSILON * sv[0] / (sv[d - 1] - sv[d]);
    let cols = |mat: &ComplexMatrix<f64>, r: std::ops::Range<usize>| -> Vec<Vec<C>> { r.map(|j| mat.column(j)).collect() };
    let (v_top, v_bot) = (cols(&s.right, 0..d), cols(&s.right, d..2 * d));
    let (w_top, w_bot) = (cols(&s.left, 0..d), cols(&s.left, d..2 * d));
    let apply = |x: &[Vec<C>]| -> Vec<Vec<C>> { x.iter().map(|c| omega.mul_vec(c)).collect() };
    let right_subspace_distance = subspace_distance(&apply(&v_top), &v_bot);
    let left_subspace_distance = subspace_distance(&apply(&w_top), &w_bot);
    let top_pairing = gram_pairing(&v_top, &w_top)?.norm();
    let bottom_pairing = gram_pairing(&v_bot, &w_bot)?.norm();
    Ok(PairingReport {
        d,
        sigma_ratio,
        right_subspace_distance,
        left_subspace_distance,
        top_pairing,
        bottom_pairing,
        pairing_gap: (top_pairing - bottom_pairing).abs(),
        subspace_accuracy,
        subspace_resolved: subspace_accuracy < 1e-9,
    })
}

pub const DEFAULT_AVALANCHE_C0: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum AvalancheReport {
    Checked { defect: f64, bound: f64, c0: f64, min_gap_ratio: f64, min_alignment: f64, pass: bool },
    HypothesesNotMet { gap_violations: Vec<usize>, alignment_violations: Vec<usize> },
}

fn log_norm(m: &ComplexMatrix<f64>) -> f64 {
    op_norm(&m.clone().with_log_scale(0.0)).ln() + m.log_scale()
}

/// Avalanche-principle defect of the chain `g_0, ..., g_{n-1}` (applied right to left).
pub fn avalanche_check(g: &[ComplexMatrix<f64>], eps: f64, kappa: f64, c0: f64) -> Result<AvalancheReport> {
    let n = g.len();
    if n < 2 {
        return Err(Error::Domain("need at least two matrices".into()));
    }
    let mut gap_violations = Vec::new();
    let mut min_gap_ratio = f64::INFINITY;
    for (j, gj) in g.iter().enumerate() {
        let s = svd(gj);
        let ratio = if s.singular_values.len() < 2 || s.singular_values[1] == 0.0 {
            f64::INFINITY
        } else {
            s.singular_values[0] / s.singular_values[1]
        };
        min_gap_ratio = min_gap_ratio.min(ratio);
        if !(ratio > 1.0 / kappa) {
            gap_violations.push(j);
        }
    }
    let pair_logs: Vec<f64> = (1..n).map(|j| log_norm(&g[j].matmul(&g[j - 1]))).collect();
    let single_logs: Vec<f64> = g.iter().map(log_norm).collect();
    let mut alignment_violations = Vec::new();
    let mut min_alignment = f64::INFINITY;
    for j in 1..n {
        let a = (pair_logs[j - 1] - single_logs[j] - single_logs[j - 1]).exp();
        min_alignment = min_alignment.min(a);
        if !(a > eps) {
            alignment_violations.push(j);
        }
    }
    if !gap_violations.is_empty() || !alignment_violations.is_empty() {
        return Ok(AvalancheReport::HypothesesNotMet { gap_violations, alignment_violations });
    }
    let mut acc = ComplexMatrix::identity(g[0].rows());
    for gj in g {
        acc = gj.matmul(&acc);
        acc.renormalize_if_needed();
    }
    let total = log_norm(&acc);
    let inner: f64 = single_logs[1..n - 1].iter().sum();
    let pairs: f64 = pair_logs.iter().sum();
    let defect = (total + inner - pairs).abs();
    let bound = c0 * n as f64 * kappa / (eps * eps);
    Ok(AvalancheReport::Checked { defect, bound, c0, min_gap_ratio, min_alignment, pass: defect <= bound })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub m: usize,
    pub kappa: f64,
    pub worst_node: usize,
    pub worst_z: f64,
}

/// Node separation below which `cos(2 pi theta_l)` values count as coincident.
pub const NODE_TOL: f64 = 1e-6;

/// `(1/m) log max_{z, j} |prod_{l != j} (z - c_l) / (c_j - c_l)|` with `c_l = cos(2 pi theta_l)`.
pub fn uniformity_measure(thetas: &[f64], z_grid: &[f64]) -> Result<UniformityReport> {
    if thetas.len() < 2 || z_grid.is_empty() {
        return Err(Error::Domain("need at least two nodes and one z".into()));
    }
    let c: Vec<f64> = thetas.iter().map(|t| (2.0 * std::f64::consts::PI * t).cos()).collect();
    for i in 0..c.len() {
        for j in 0..i {
            if (c[i] - c[j]).abs() < NODE_TOL {
                return Err(Error::Degenerate(format!("nodes {j} and {i} coincide")));
            }
        }
    }
    let m = c.len() - 1;
    let mut best = (f64::NEG_INFINITY, 0, z_grid[0]);
    for &z in z_grid {
        for j in 0..c.len() {
            let s: f64 = (0..c.len()).filter(|&l| l != j).map(|l| ((z - c[l]) / (c[j] - c[l])).abs().ln()).sum();
            if s > best.0 {
                best = (s, j, z);
            }
        }
    }
    Ok(UniformityReport { m, kappa: best.0 / m as f64, worst_node: best.1, worst_z: best.2 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenSelect {
    Index(usize),
    Energy(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub energy: f64,
    pub center: usize,
    pub fit_rate: f64,
    pub r_squared: f64,
    pub points: usize,
    /// Lyapunov-based reference `L_d / 10`.
    pub reference_rate: f64,
    pub localized: bool,
    pub edge_mass: f64,
    pub resonances: Vec<Resonance>,
    pub excluded_distances: Vec<usize>,
    /// `(k - k0, log|u_k|)`.
    pub profile: Vec<(i64, f64)>,
}

/// Below this rate the profile is reported as non-localized.
pub const NON_LOCALIZED_RATE: f64 = 0.02;
const DECAY_FLOOR: f64 = 1e-12;
/// Resonance strength used by the decay fit: `||2 theta - k alpha|| <= exp(-DECAY_EPS0 |k|)`.
pub const DECAY_EPS0: f64 = 0.5;

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let r2 = if sxx > 0.0 && syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
    (slope, my - slope * mx, r2)
}

/// Decay fit of a dual Dirichlet eigenvector on `n_sites` sites.
pub fn eigen_decay_profile(
    alpha: f64,
    theta: f64,
    v: &TrigPotential<f64>,
    n_sites: usize,
    which: EigenSelect,
) -> Result<DecayReport> {
    let d = v.degree();
    if n_sites % d != 0 || n_sites < 20 {
        return Err(Error::Domain("n_sites must be a multiple of d and at least 20".into()));
    }
    if !v.is_real_symmetric() {
        return Err(Error::Precondition("needs a real potential".into()));
    }
    let h = dirichlet_matrix(alpha, theta, v, n_sites / d, 0.0)?;
    let eig = hermitian_eigen(&h)?;
    let idx = match which {
        EigenSelect::Index(i) if i < n_sites => i,
        EigenSelect::Index(i) => return Err(Error::IndexRange(format!("eigen index {i} >= {n_sites}"))),
        EigenSelect::Energy(e) => (0..n_sites)
            .min_by(|&a, &b| (eig.values[a] - e).abs().total_cmp(&(eig.values[b] - e).abs()))
            .unwrap(),
    };
    let u = eig.vectors.column(idx);
    let mags: Vec<f64> = u.iter().map(|z| z.norm()).collect();
    let (k0, &umax) = mags.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let edge = (n_sites / 20).max(1);
    let edge_mass: f64 = (0..n_sites).filter(|&i| i < edge || i >= n_sites - edge).map(|i| mags[i] * mags[i]).sum();
    let profile: Vec<(i64, f64)> =
        (0..n_sites).map(|k| (k as i64 - k0 as i64, (mags[k] / umax).max(1e-300).ln())).collect();
    let phase = theta + k0 as f64 * alpha;
    let res = epsilon_resonances(alpha, phase, DECAY_EPS0, (n_sites / 2) as u64)?;
    let mut excluded = Vec::new();
    for r in &res.resonances {
        let a = r.k.unsigned_abs() as usize;
        if a > 0 {
            let w = 1 + a / 10;
            excluded.extend(a.saturating_sub(w)..=a + w);
        }
    }
    excluded.sort_unstable();
    excluded.dedup();
    let pts: Vec<(f64, f64)> = profile
        .iter()
        .filter(|(dk, l)| *dk != 0 && *l > DECAY_FLOOR.ln() && excluded.binary_search(&(dk.unsigned_abs() as usize)).is_err())
        .map(|&(dk, l)| (dk.abs() as f64, l))
        .collect();
    let (slope, _, r2) = if pts.len() >= 3 { linear_fit(&pts) } else { (0.0, 0.0, 0.0) };
    let fit_rate = -slope;
    let localized = fit_rate > NON_LOCALIZED_RATE;
    if localized && edge_mass > 0.1 {
        return Err(Error::NotAdmissible(format!("boundary-dominated (edge mass {edge_mass:.3}), enlarge n")));
    }
    let energy = eig.values[idx];
    let l = block_spectrum(alpha, v, energy, 1000, 32)?;
    let l_small = l[d - 1] - if d >= 2 { l[d - 2] } else { 0.0 };
    Ok(DecayReport {
        energy,
        center: k0,
        fit_rate,
        r_squared: r2,
        points: pts.len(),
        reference_rate: l_small / 10.0,
        localized,
        edge_mass,
        resonances: res.resonances,
        excluded_distances: excluded,
        profile,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Balancing {
    /// `s = c * L_d * n`.
    Rate(f64),
    Fixed(f64),
    /// `s = (1/4) log(max|a12| / max|a21|)`.
    Optimal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugationDemo {
    pub window: [i64; 2],
    pub strip: f64,
    pub grid: usize,
    pub energy: f64,
    pub theta_proxy: f64,
    pub balance: f64,
    pub residual_to_rotation: f64,
    /// `max |A_E U - e^{2 pi i theta} U(. + alpha)|`.
    pub defect: f64,
    pub max_det_error: f64,
    pub min_u_norm: f64,
    /// `max ||M^I||`, bounded by the conjugation's second column.
    pub max_m_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoConfig {
    pub dual_sites: usize,
    pub theta0: f64,
    pub balancing: Balancing,
    pub u_floor: f64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        Self { dual_sites: 400, theta0: 0.0, balancing: Balancing::Optimal, u_floor: 1e-6 }
    }
}

struct WindowSolution {
    coeffs: Vec<(i64, C)>,
}

impl WindowSolution {
    fn eval(&self, x: C) -> C {
        self.coeffs.iter().map(|&(k, c)| c * e2pi(x * k as f64)).sum()
    }
}

fn big_u(sol: &WindowSolution, theta: f64, alpha: f64, x: C) -> [C; 2] {
    [e2pi(re(theta)) * sol.eval(x), sol.eval(x - alpha)]
}

fn sample_points(strip: f64, grid: usize) -> Vec<C> {
    let heights: Vec<f64> = if strip == 0.0 { vec![0.0] } else { vec![-strip, 0.0, strip] };
    heights
        .iter()
        .flat_map(|&h| (0..grid).map(move |j| C::new(j as f64 / grid as f64, h)))
        .collect()
}

fn scalar_cocycle(alpha: f64, v: &TrigPotential<f64>, e: f64) -> Result<Cocycle<f64>> {
    Cocycle::new(CocycleSpec::new(alpha, v.clone(), C::new(e, 0.0), 0.0, Side::Scalar))
}

fn au_defect(c: &Cocycle<f64>, sol: &WindowSolution, theta: f64, alpha: f64, pts: &[C]) -> f64 {
    pts.iter()
        .map(|&x| {
            let a = c.at(x);
            let u = big_u(sol, theta, alpha, x);
            let up = big_u(sol, theta, alpha, x + alpha);
            let ph = e2pi(re(theta));
            let r0 = a[(0, 0)] * u[0] + a[(0, 1)] * u[1] - ph * up[0];
            let r1 = a[(1, 0)] * u[0] + a[(1, 1)] * u[1] - ph * up[1];
            (r0.norm_sqr() + r1.norm_sqr()).sqrt()
        })
        .fold(0.0, f64::max)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

fn m_matrix(u: [C; 2]) -> ComplexMatrix<f64> {
    let nrm = u[0].norm_sqr() + u[1].norm_sqr();
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => u[0],
        (1, 0) => u[1],
        (0, 1) => -u[1].conj() / nrm,
        _ => u[0].conj() / nrm,
    })
}

fn inv2(m: &ComplexMatrix<f64>) -> ComplexMatrix<f64> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => m[(1, 1)] / det,
        (1, 1) => m[(0, 0)] / det,
        (0, 1) => -m[(0, 1)] / det,
        _ => -m[(1, 0)] / det,
    })
}

/// Truncated-dual-solution conjugation of the scalar cocycle `A_E` towards a rotation.
pub fn almost_reducibility_demo(
    alpha: f64,
    v: &TrigPotential<f64>,
    e: f64,
    window_n: usize,
    strip: f64,
    grid: usize,
    cfg: &DemoConfig,
) -> Result<ConjugationDemo> {
    if window_n < 2 || grid < 4 {
        return Err(Error::Domain("need window n >= 2 and grid >= 4".into()));
    }
    let d = v.degree();
    let sites = cfg.dual_sites - cfg.dual_sites % d;
    let h = dirichlet_matrix(alpha, cfg.theta0, v, sites / d, 0.0)?;
    let eig = hermitian_eigen(&h)?;
    let idx = (0..sites).min_by(|&a, &b| (eig.values[a] - e).abs().total_cmp(&(eig.values[b] - e).abs())).unwrap();
    let energy = eig.values[idx];
    let vec = eig.vectors.column(idx);
    let (k0, _) = vec.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap();
    let norm0 = vec[k0];
    let lo = -((window_n / 2) as i64) + 1;
    let hi = (window_n / 2) as i64;
    let mut coeffs = Vec::new();
    for k in lo..=hi {
        let i = k0 as i64 + k;
        if i < 0 || i >= sites as i64 {
            return Err(Error::NotAdmissible(format!("window [{lo}, {hi}] leaves the dual box; enlarge dual_sites")));
        }
        coeffs.push((k, vec[i as usize] / norm0));
    }
    let sol = WindowSolution { coeffs };
    let c = scalar_cocycle(alpha, v, energy)?;
    let pts = sample_points(strip, grid);
    let base = (cfg.theta0 + k0 as f64 * alpha).rem_euclid(1.0);
    let step = 0.5 / grid as f64;
    let theta = golden_min(|t| au_defect(&c, &sol, t, alpha, &pts), base - step, base + step, 60).rem_euclid(1.0);
    let defect = au_defect(&c, &sol, theta, alpha, &pts);

    let mut min_u_norm = f64::INFINITY;
    let mut max_det_error: f64 = 0.0;
    let mut max_m_norm: f64 = 0.0;
    let mut conj = Vec::with_capacity(pts.len());
    for &x in &pts {
        let u = big_u(&sol, theta, alpha, x);
        let un = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
        min_u_norm = min_u_norm.min(un);
        if un < cfg.u_floor {
            return Err(Error::NotAdmissible(format!(
                "|U^I| = {un:.2e} below floor; try n = r q_m - 1"
            )));
        }
        let m0 = m_matrix(u);
        let m1 = m_matrix(big_u(&sol, theta, alpha, x + alpha));
        let det = m0[(0, 0)] * m0[(1, 1)] - m0[(0, 1)] * m0[(1, 0)];
        max_det_error = max_det_error.max((det - 1.0).norm());
        max_m_norm = max_m_norm.max(op_norm(&m0));
        conj.push(inv2(&m1).matmul(&c.at(x)).matmul(&m0));
    }
    let balance = match cfg.balancing {
        Balancing::Fixed(s) => s,
        Balancing::Rate(rate) => {
            let l = block_spectrum(alpha, v, energy, 1000, 32)?;
            let l_small = l[d - 1] - if d >= 2 { l[d - 2] } else { 0.0 };
            rate * l_small * window_n as f64
        }
        Balancing::Optimal => {
            let a12 = conj.iter().map(|m| m[(0, 1)].norm()).fold(0.0, f64::max);
            let a21 = conj.iter().map(|m| m[(1, 0)].norm()).fold(0.0, f64::max);
            if a12 > 0.0 && a21 > 0.0 {
                0.25 * (a12 / a21).ln()
            } else {
                0.0
            }
        }
    };
    let ph = e2pi(re(theta));
    let target = ComplexMatrix::diag(&[ph, ph.inv()]);
    let (up, down) = (balance.exp(), (-balance).exp());
    let mut residual: f64 = 0.0;
    for m in &conj {
        let mut b = m.clone();
        b[(0, 1)] = b[(0, 1)] * down * down;
        b[(1, 0)] = b[(1, 0)] * up * up;
        let diff = ComplexMatrix::from_fn(2, 2, |i, j| b[(i, j)] - target[(i, j)]);
        residual = residual.max(op_norm(&diff));
    }
    Ok(ConjugationDemo {
        window: [lo, hi],
        strip,
        grid,
        energy,
        theta_proxy: theta,
        balance,
        residual_to_rotation: residual,
        defect,
        max_det_error,
        min_u_norm,
        max_m_norm,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub exponent: f64,
    pub log_constant: f64,
    pub r_squared: f64,
    pub max_k: usize,
    /// `(k, log sup_x ||A_k(x)||)`.
    pub curve: Vec<(usize, f64)>,
}

/// Fit `sup_x ||A_k(x)|| ~ C (1 + k)^{C4}` over `1 <= k <= max_k` on the strip `|Im x| <= strip`.
pub fn polynomial_growth_fit(alpha: f64, v: &TrigPotential<f64>, e: f64, max_k: usize, strip: f64, grid: usize) -> Result<GrowthFit> {
    if max_k < 2 {
        return Err(Error::Domain("need max_k >= 2".into()));
    }
    let c = scalar_cocycle(alpha, v, e)?;
    let pts = sample_points(strip, grid);
    let curves = grid_map(pts.len(), |j| {
        let mut acc = ComplexMatrix::identity(2);
        let mut x = pts[j];
        let mut out = Vec::with_capacity(max_k);
        for _ in 0..max_k {
            acc = c.at(x).matmul(&acc);
            acc.renormalize_if_needed();
            out.push(log_norm(&acc));
            x += alpha;
        }
        out
    });
    let curve: Vec<(usize, f64)> =
        (0..max_k).map(|k| (k + 1, curves.iter().map(|cv| cv[k]).fold(f64::NEG_INFINITY, f64::max))).collect();
    let pts: Vec<(f64, f64)> = curve.iter().map(|&(k, l)| ((1.0 + k as f64).ln(), l)).collect();
    let (slope, icpt, r2) = linear_fit(&pts);
    Ok(GrowthFit { exponent: slope, log_constant: icpt, r_squared: r2, max_k, curve })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub n: usize,
    pub max_abs_f: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
}

/// `max |f_{E,N}(theta) - f_{E,N}(-theta - (dN - 1) alpha)|` over the grid, also relative to `max|f|`.
pub fn cos_polynomial_symmetry(alpha: f64, v: &TrigPotential<f64>, n: usize, e: f64, grid: usize) -> Result<SymmetryReport> {
    let d = v.degree();
    let shift = (d * n - 1) as f64 * alpha;
    let vals = grid_map(grid, |j| -> Result<(C, C)> {
        let th = (j as f64 + 0.5) / grid as f64;
        let f = |t: f64| -> Result<C> {
            Ok(lu_det(&shift_diag(&periodic_matrix(alpha, t, v, n, 0.0)?, C::new(e, 0.0)))?.value())
        };
        Ok((f(th)?, f(-th - shift)?))
    });
    let mut max_abs_f: f64 = 0.0;
    let mut abs_residual: f64 = 0.0;
    for r in vals {
        let (a, b) = r?;
        max_abs_f = max_abs_f.max(a.norm()).max(b.norm());
        abs_residual = abs_residual.max((a - b).norm());
    }
    Ok(SymmetryReport { n, max_abs_f, abs_residual, rel_residual: abs_residual / max_abs_f.max(1e-300) })
}
