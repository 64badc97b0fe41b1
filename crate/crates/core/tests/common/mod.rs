//! Fixtures and independent oracles shared by the integration targets.

#![allow(dead_code)]

pub mod invariants;

use gcsplit::grid::{divergence, gradient, ScalarField, Scheme};
use gcsplit::{add_gaussian_noise, synth, Geometry, NoiseSpec, SynthKind};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_field(rng: &mut StdRng, rows: usize, cols: usize, h: f64) -> ScalarField {
    ScalarField::from_fn(rows, cols, h, |_, _| rng.random_range(-1.0..1.0))
}

/// The 64×64 reference cone: apex 0.32 at the centre, radius 16 samples.
pub fn reference_cone() -> ScalarField {
    synth(SynthKind::Cone, 64, 64, 1.0, &Geometry::default()).unwrap()
}

/// Reference cone plus noise of variance `1e-4`.
pub fn noisy_cone(seed: u64) -> ScalarField {
    add_gaussian_noise(&reference_cone(), NoiseSpec::new(1e-4, seed)).unwrap()
}

/// Piecewise-constant blocks plus a cone, values in `[0, 1]`. The cone
/// radius scales with `n` so that the picture is the same at every size.
pub fn test_image(n: usize) -> ScalarField {
    let steps = synth(
        SynthKind::Steps,
        n,
        n,
        1.0,
        &Geometry {
            height: 0.6,
            levels: 4,
            ..Default::default()
        },
    )
    .unwrap();
    let r0 = n as f64 / 4.0;
    let cone = synth(
        SynthKind::Cone,
        n,
        n,
        1.0,
        &Geometry {
            r0,
            slope: 0.4 / r0,
            ..Default::default()
        },
    )
    .unwrap();
    steps.add(&cone)
}

/// Dense matrix of a linear field operator, assembled column by column
/// from unit impulses.
pub fn assemble(
    rows: usize,
    cols: usize,
    h: f64,
    op: impl Fn(&ScalarField) -> ScalarField,
) -> DMatrix<f64> {
    let n = rows * cols;
    let mut a = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = ScalarField::zeros(rows, cols, h);
        e.data_mut()[k] = 1.0;
        let col = op(&e);
        for (r, v) in col.data().iter().enumerate() {
            a[(r, k)] = *v;
        }
    }
    a
}

/// `div⁺∇⁻` as a dense matrix.
pub fn laplacian_fb(rows: usize, cols: usize, h: f64) -> DMatrix<f64> {
    assemble(rows, cols, h, |v| {
        divergence(&gradient(v, Scheme::Backward), Scheme::Forward)
    })
}

/// `div⁻∇⁺` as a dense matrix.
pub fn laplacian_bf(rows: usize, cols: usize, h: f64) -> DMatrix<f64> {
    assemble(rows, cols, h, |v| {
        divergence(&gradient(v, Scheme::Forward), Scheme::Backward)
    })
}

/// Solves `a x = rhs` by LU and returns `x` shaped like `rhs`.
pub fn dense_solve(a: &DMatrix<f64>, rhs: &ScalarField) -> ScalarField {
    let b = DVector::from_column_slice(rhs.data());
    let x = a.clone().lu().solve(&b).expect("oracle matrix is singular");
    ScalarField::from_vec(rhs.rows(), rhs.cols(), rhs.spacing(), x.as_slice().to_vec())
}
