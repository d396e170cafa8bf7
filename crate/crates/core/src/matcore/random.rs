//! Seeded generation of test objects. Every generator draws from a
//! [`ChaCha8Rng`] so that a 64-bit seed reproduces bit-identical output on
//! every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{Matrix, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex number with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Skew-symmetric `m × m` matrix with entries of modulus about `scale`.
pub fn random_skew<R: Rng>(rng: &mut R, m: usize, scale: f64) -> Matrix {
    let mut s = Matrix::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let z = random_complex(rng) * scale;
            s[(i, j)] = z;
            s[(j, i)] = -z;
        }
    }
    s
}

/// Symmetric `m × m` matrix `rᵀ·r` with `r` a random `rank × m` matrix, so
/// the result has the requested rank (generically) and O(1) entries.
pub fn random_symmetric_of_rank<R: Rng>(rng: &mut R, m: usize, rank: usize) -> Matrix {
    let r = random_matrix(rng, rank, m);
    r.transpose().matmul(&r).symmetrized()
}
