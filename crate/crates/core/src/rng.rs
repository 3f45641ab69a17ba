//! Seeded random matrices. Every generator takes an explicit seed (and an
//! optional stream index) so fixtures are reproducible bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{diag_real, svd, ComplexMatrix};
use crate::Complex64;

pub fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Matrix of independent standard complex Gaussians.
pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    // Fill row-major so the draw order matches the document layout.
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn unit_phase<R: Rng>(rng: &mut R) -> Complex64 {
    let t: f64 = rng.random_range(0.0..core::f64::consts::TAU);
    Complex64::new(crate::float::cos(t), crate::float::sin(t))
}

/// `U diag(singular) V*` with Haar `U`, `V`.
pub fn with_singular_values<R: Rng>(rng: &mut R, singular: &[f64]) -> ComplexMatrix {
    let n = singular.len();
    let u = unitary(rng, n);
    let v = unitary(rng, n);
    u * diag_real(singular) * v.adjoint()
}

/// Gaussian matrix rescaled so its largest singular value is `sigma_max`.
pub fn contraction_with_norm<R: Rng>(rng: &mut R, n: usize, sigma_max: f64) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let top = svd(&g).map(|s| s.sigma.first().copied().unwrap_or(0.0)).unwrap_or(0.0);
    if top == 0.0 {
        return g;
    }
    g * Complex64::new(sigma_max / top, 0.0)
}
