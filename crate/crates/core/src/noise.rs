//! Reproducible additive Gaussian noise.
//!
//! Samples come from a ChaCha8 stream seeded with the user seed. Pixel
//! `(i, j)` always consumes the four 32-bit words starting at word
//! position `4·(i·cols + j)`, so the noise at a pixel depends only on the
//! seed and its index, not on evaluation order. The two 64-bit draws feed
//! a Box–Muller transform (cosine branch):
//!
//! ```text
//! u1 = (x1 >> 11 + 1) / 2^53   in (0, 1]
//! u2 = (x2 >> 11) / 2^53       in [0, 1)
//! z  = sqrt(-2 ln u1) · cos(2π u2)
//! ```

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Result};
use crate::grid::ScalarField;

/// Gaussian noise level and seed. `variance` is the variance `σ`, so the
/// standard deviation is `√σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub variance: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(variance: f64, seed: u64) -> Self {
        Self { variance, seed }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

const TWO_POW_53: f64 = (1u64 << 53) as f64;

/// Standard normal samples laid out like a `rows × cols` field.
pub fn standard_normal(rows: usize, cols: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        rng.set_word_pos(4 * (i * cols) as u128);
        for _ in 0..cols {
            let u1 = ((rng.next_u64() >> 11) + 1) as f64 / TWO_POW_53;
            let u2 = (rng.next_u64() >> 11) as f64 / TWO_POW_53;
            out.push((-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos());
        }
    }
    out
}

/// `f + √σ·z` with `z` standard normal. No clipping.
pub fn add_gaussian_noise(f: &ScalarField, spec: NoiseSpec) -> Result<ScalarField> {
    ensure(spec.variance >= 0.0 && spec.variance.is_finite(), || {
        format!("noise variance must be ≥ 0, got {}", spec.variance)
    })?;
    if spec.variance == 0.0 {
        return Ok(f.clone());
    }
    let sd = spec.std_dev();
    let z = standard_normal(f.rows(), f.cols(), spec.seed);
    Ok(f.zip_map(
        &ScalarField::from_vec(f.rows(), f.cols(), f.spacing(), z),
        |x, n| x + sd * n,
    ))
}
