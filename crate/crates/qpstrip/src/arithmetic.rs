//! Continued fractions, torus norms, Diophantine estimates, resonances, admissible scales.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Why an expansion stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// The input was rational and the expansion ended exactly.
    Exact,
    MaxTerms,
    /// Further quotients would not be determined by the input precision.
    PrecisionExhausted,
}

/// `alpha = [0; a_1, a_2, ...]` with convergents `p_n / q_n`, `n = 0..=len`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub alpha: f64,
    /// `a[i]` is the quotient `a_{i+1}`.
    pub a: Vec<u64>,
    /// `p[n]`, `q[n]` for `n = 0..=a.len()`, starting at `p_0/q_0 = 0/1`.
    pub p: Vec<u128>,
    pub q: Vec<u128>,
    pub termination: Termination,
}

impl ContinuedFraction {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `q_1, ..., q_N`.
    pub fn denominators(&self) -> Vec<u128> {
        self.q[1..].to_vec()
    }

    /// Builds an expansion from explicit partial quotients.
    pub fn from_quotients(a: &[u64]) -> Result<Self> {
        if a.is_empty() || a.contains(&0) {
            return Err(Error::Domain("partial quotients must be positive and non-empty".into()));
        }
        let (p, q) = convergents(a)?;
        let alpha = p[a.len()] as f64 / q[a.len()] as f64;
        Ok(Self { alpha, a: a.to_vec(), p, q, termination: Termination::MaxTerms })
    }

    /// Exact rational `num/den` in (0,1).
    pub fn from_rational(num: u64, den: u64, max_terms: usize) -> Result<Self> {
        if num == 0 || num >= den {
            return Err(Error::Domain(format!("{num}/{den} is not in (0,1)")));
        }
        let x = BigRational::new(BigInt::from(num), BigInt::from(den));
        expand(x, max_terms, None, num as f64 / den as f64)
    }

    /// Exact decimal string such as `"0.6180339887"`; precision budget follows the digit count.
    pub fn from_decimal(s: &str, max_terms: usize) -> Result<Self> {
        let s = s.trim();
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Domain(format!("not a decimal: {s}")));
        }
        let digits = frac.len() as u32;
        let num: BigInt = format!("{int}{frac}").parse::<BigInt>().map_err(|e| Error::Domain(e.to_string()))?;
        let den = BigInt::from(10u8).pow(digits);
        let x = BigRational::new(num, den.clone());
        let approx = x.to_f64().unwrap_or(f64::NAN);
        if !(approx > 0.0 && approx < 1.0) {
            return Err(Error::Domain(format!("{s} is not in (0,1)")));
        }
        // Expansion of the decimal is trusted while q_n q_{n+1} stays below 10^digits / 4.
        expand(x, max_terms, Some(BigRational::new(den, BigInt::from(4u8))), approx)
    }

    pub fn golden(terms: usize) -> Self {
        let mut cf = Self::from_quotients(&vec![1; terms.max(1)]).expect("valid quotients");
        cf.alpha = (5f64.sqrt() - 1.0) / 2.0;
        cf
    }

    pub fn sqrt2(terms: usize) -> Self {
        let mut cf = Self::from_quotients(&vec![2; terms.max(1)]).expect("valid quotients");
        cf.alpha = 2f64.sqrt() - 1.0;
        cf
    }
}

fn convergents(a: &[u64]) -> Result<(Vec<u128>, Vec<u128>)> {
    let mut p = vec![0u128, 1];
    let mut q = vec![1u128, a[0] as u128];
    for n in 1..a.len() {
        let an = a[n] as u128;
        let pn = an
            .checked_mul(p[n])
            .and_then(|x| x.checked_add(p[n - 1]))
            .ok_or_else(|| Error::Numeric("convergent overflow".into()))?;
        let qn = an
            .checked_mul(q[n])
            .and_then(|x| x.checked_add(q[n - 1]))
            .ok_or_else(|| Error::Numeric("convergent overflow".into()))?;
        p.push(pn);
        q.push(qn);
    }
    Ok((p, q))
}

fn expand(x: BigRational, max_terms: usize, budget: Option<BigRational>, alpha: f64) -> Result<ContinuedFraction> {
    if max_terms == 0 {
        return Err(Error::Domain("max_terms must be at least 1".into()));
    }
    let mut a = Vec::new();
    let mut rest = x;
    let mut termination = Termination::MaxTerms;
    let mut q_prev = BigInt::one();
    let mut q_prev2 = BigInt::zero();
    while a.len() < max_terms {
        if rest.is_zero() {
            termination = Termination::Exact;
            break;
        }
        let inv = rest.recip();
        let ak = inv.floor().to_integer();
        let qk = &ak * &q_prev + &q_prev2;
        if let Some(b) = &budget {
            if BigRational::from_integer(&qk * &q_prev) > *b {
                termination = Termination::PrecisionExhausted;
                break;
            }
        }
        let Some(ak64) = ak.to_u64() else {
            termination = Termination::PrecisionExhausted;
            break;
        };
        a.push(ak64);
        rest = inv - BigRational::from_integer(ak);
        q_prev2 = std::mem::replace(&mut q_prev, qk);
    }
    if a.len() == max_terms && rest.is_zero() {
        termination = Termination::Exact;
    }
    let (p, q) = convergents(&a)?;
    Ok(ContinuedFraction { alpha, a, p, q, termination })
}

/// Expansion of a floating `alpha`, read as its exact dyadic value and truncated
/// once the 53-bit mantissa no longer determines further quotients.
pub fn continued_fraction(alpha: f64, max_terms: usize) -> Result<ContinuedFraction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in (0,1)")));
    }
    let x = BigRational::from_float(alpha).ok_or_else(|| Error::Domain("non-finite alpha".into()))?;
    let budget = BigRational::from_integer(BigInt::from(1u64 << 50));
    let mut cf = expand(x, max_terms, Some(budget), alpha)?;
    // A terminating dyadic expansion says nothing about rationality of the real input.
    if cf.termination == Termination::Exact && cf.q.last().copied().unwrap_or(1) > (1u128 << 25) {
        cf.termination = Termination::PrecisionExhausted;
    }
    Ok(cf)
}

/// Distance to the nearest integer.
pub fn torus_norm(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// `||q_n alpha|| - min_{1 <= k < q_{n+1}} ||k alpha||` by brute scan.
pub fn best_approx_residual(cf: &ContinuedFraction, n: usize) -> Result<f64> {
    if n == 0 || n + 1 >= cf.q.len() {
        if n + 1 == cf.q.len() && cf.termination == Termination::Exact && n > 0 {
            // last denominator of a rational: ||q alpha|| = 0 exactly
            return Ok(0.0);
        }
        return Err(Error::IndexRange(format!("n = {n} outside 1..{}", cf.q.len().saturating_sub(1))));
    }
    let qn = cf.q[n];
    let qn1 = cf.q[n + 1];
    let target = torus_norm(qn as f64 * cf.alpha);
    let mut best = f64::INFINITY;
    for k in 1..qn1 {
        best = best.min(torus_norm(k as f64 * cf.alpha));
    }
    Ok(target - best)
}

/// Per-index values `log(q_{n+1}) / q_n`, `n = 1..N-1`.
pub fn beta_tail(cf: &ContinuedFraction) -> Vec<f64> {
    (1..cf.q.len().saturating_sub(1)).map(|n| (cf.q[n + 1] as f64).ln() / cf.q[n] as f64).collect()
}

/// Finite truncation of `limsup log(q_{n+1}) / q_n`.
pub fn beta_estimate(cf: &ContinuedFraction) -> Result<f64> {
    if cf.q.len() < 4 {
        return Err(Error::Domain("need at least 3 convergents".into()));
    }
    Ok(beta_tail(cf).into_iter().fold(0.0, f64::max))
}

/// Largest `c` with `||n alpha|| >= c / n^b` for `1 <= n <= n_max`.
pub fn dc_witness(alpha: f64, b: f64, n_max: u64) -> f64 {
    (1..=n_max).map(|n| torus_norm(n as f64 * alpha) * (n as f64).powf(b)).fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub k: i64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub theta: f64,
    pub epsilon0: f64,
    pub resonances: Vec<Resonance>,
    /// `max(0, sup -log||2 theta + n alpha|| / |n|)` over `n_max/2 <= |n| <= n_max`.
    pub gamma_estimate: f64,
}

fn res_norm(alpha: f64, theta: f64, k: i64) -> f64 {
    torus_norm(2.0 * theta - k as f64 * alpha)
}

/// All `|k| <= n_max` with `||2 theta - k alpha|| <= exp(-eps0 |k|)` that are minimal among `|j| <= |k|`.
pub fn epsilon_resonances(alpha: f64, theta: f64, epsilon0: f64, n_max: u64) -> Result<ResonanceReport> {
    if epsilon0 <= 0.0 || n_max == 0 {
        return Err(Error::Domain("need epsilon0 > 0 and n_max >= 1".into()));
    }
    let n_max = n_max as i64;
    let mut out = Vec::new();
    let mut best_below = f64::INFINITY;
    for m in 0..=n_max {
        let cand: Vec<i64> = if m == 0 { vec![0] } else { vec![m, -m] };
        let norms: Vec<f64> = cand.iter().map(|&k| res_norm(alpha, theta, k)).collect();
        let level_min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        for (&k, &nk) in cand.iter().zip(&norms) {
            if nk < best_below && nk <= level_min && nk <= (-epsilon0 * m as f64).exp() {
                out.push(Resonance { k, norm: nk });
            }
        }
        best_below = best_below.min(level_min);
    }
    let lo = (n_max / 2).max(1);
    let mut gamma: f64 = 0.0;
    for m in lo..=n_max {
        for k in [m, -m] {
            let x = torus_norm(2.0 * theta + k as f64 * alpha).max(1e-300);
            gamma = gamma.max(-x.ln() / m as f64);
        }
    }
    Ok(ResonanceReport { theta, epsilon0, resonances: out, gamma_estimate: gamma })
}

/// All `n` in `[n_min, n_max]` with `||n d alpha|| <= kappa0`, ascending.
pub fn admissible_sequence(alpha: f64, d: u64, kappa0: f64, n_min: u64, n_max: u64) -> Result<Vec<u64>> {
    if !(kappa0 > 0.0 && kappa0 <= 0.5) || d == 0 {
        return Err(Error::Domain("need kappa0 in (0, 1/2] and d >= 1".into()));
    }
    Ok((n_min..=n_max).filter(|&n| torus_norm((n * d) as f64 * alpha) <= kappa0).collect())
}

/// Exact variant for rational `alpha = num/den`.
pub fn admissible_sequence_rational(num: u64, den: u64, d: u64, kappa0: f64, n_min: u64, n_max: u64) -> Vec<u64> {
    (n_min..=n_max)
        .filter(|&n| {
            let r = (n as u128 * d as u128 * num as u128 % den as u128) as f64 / den as f64;
            torus_norm(r) <= kappa0
        })
        .collect()
}

/// Reduced `(d p_n + 1) / (d q_n)`; its denominator is always divisible by `d`.
pub fn rational_approx_divisible(cf: &ContinuedFraction, d: u64, n: usize) -> Result<(u128, u128)> {
    if n == 0 || n >= cf.q.len() || d == 0 {
        return Err(Error::IndexRange(format!("n = {n} outside 1..{}", cf.q.len().saturating_sub(1))));
    }
    let num = d as u128 * cf.p[n] + 1;
    let den = d as u128 * cf.q[n];
    let g = num.gcd(&den);
    Ok((num / g, den / g))
}
