//! Seeded randomness: one ChaCha family, streams split by hashing.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::linalg::ComplexMatrix;
use crate::scalar::Real;

pub type QpRng = ChaCha8Rng;

pub fn rng(seed: u64) -> QpRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream derived from `(seed, stream)`.
pub fn stream(seed: u64, stream: u64) -> QpRng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(stream.to_le_bytes());
    let d = h.finalize();
    let mut k = [0u8; 32];
    k.copy_from_slice(&d);
    ChaCha8Rng::from_seed(k)
}

pub fn complex<T: Real>(r: &mut QpRng) -> Complex<T> {
    Complex::new(T::lit(r.gen_range(-1.0..1.0)), T::lit(r.gen_range(-1.0..1.0)))
}

/// Entries uniform in the unit square of the complex plane.
pub fn matrix<T: Real>(r: &mut QpRng, rows: usize, cols: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex(r))
}

pub fn hermitian<T: Real>(r: &mut QpRng, n: usize) -> ComplexMatrix<T> {
    let a: ComplexMatrix<T> = matrix(r, n, n);
    let h = &a + &a.adjoint();
    h.scale(Complex::new(T::lit(0.5), T::zero()))
}
