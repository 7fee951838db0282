//! Seeded random inputs for the property suites.
//!
//! Each trial draws from its own ChaCha stream, selected by the trial
//! index, so results do not depend on how trials are scheduled.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{Matrix, ShapeOperatorStack};

/// The random stream for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Entries i.i.d. uniform on `[-1, 1]`.
pub fn random_matrix(rng: &mut impl Rng, n: usize) -> Matrix {
    Matrix::from_fn(n, |_, _| rng.random_range(-1.0..=1.0))
}

pub fn random_stack(rng: &mut impl Rng, n: usize, l: usize) -> ShapeOperatorStack {
    ShapeOperatorStack::new((0..l).map(|_| random_matrix(rng, n)).collect()).expect("n, l ≥ 1")
}

/// Random orthogonal matrix from the QR factorization of a uniform matrix,
/// with signs fixed so `R` has a positive diagonal.
pub fn random_orthogonal(rng: &mut impl Rng, k: usize) -> Matrix {
    let m = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..=1.0));
    let qr = m.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..k {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Matrix::from_fn(k, |i, j| q[(i, j)])
}

/// `len` uniform entries on `[-1, 1]`.
pub fn random_array(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect()
}
