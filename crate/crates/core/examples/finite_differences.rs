//! Periodic difference operators: adjointness, and the Hessian determinant
//! of a cone versus a paraboloid.

use gcsplit::grid::{det, divergence, gradient, jacobian, ScalarField, Scheme, VectorField};
use gcsplit::{synth, Geometry, SynthKind};

fn main() {
    let (m, n, h) = (32, 48, 0.5);
    let u = ScalarField::from_fn(m, n, h, |i, j| {
        (0.3 * i as f64).sin() * (0.2 * j as f64).cos()
    });
    let q = VectorField::new(
        ScalarField::from_fn(m, n, h, |i, j| ((i * j) as f64).cos()),
        ScalarField::from_fn(m, n, h, |i, j| (i as f64 - j as f64).sin()),
    );
    for s in [Scheme::Forward, Scheme::Backward] {
        let lhs = gradient(&u, s).dot(&q);
        let rhs = -u.dot(&divergence(&q, s.adjoint()));
        println!(
            "<∇{s:?} u, q> = {lhs:+.12}   -<u, div{:?} q> = {rhs:+.12}",
            s.adjoint()
        );
    }

    let (size, c, r0, slope) = (128, 64.0, 56.0, 0.01);
    let cone = synth(
        SynthKind::Cone,
        size,
        size,
        1.0,
        &Geometry {
            r0,
            slope,
            ..Default::default()
        },
    )
    .unwrap();
    let bowl = ScalarField::from_fn(size, size, 1.0, |i, j| {
        let d2 = (i as f64 - c).powi(2) + (j as f64 - c).powi(2);
        slope * (r0 - d2 / r0).max(0.0)
    });
    let ring: Vec<(usize, usize)> = (0..size)
        .flat_map(|i| (0..size).map(move |j| (i, j)))
        .filter(|&(i, j)| (20.0..=44.0).contains(&(i as f64 - c).hypot(j as f64 - c)))
        .collect();
    for (name, f) in [("cone", &cone), ("paraboloid", &bowl)] {
        let d = det(&jacobian(&gradient(f, Scheme::Forward), Scheme::Backward));
        let vals: Vec<f64> = ring.iter().map(|&(i, j)| d.get(i, j).abs()).collect();
        let worst = vals.iter().copied().fold(0.0, f64::max);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        println!("{name:>10}: |det D²u| on the ring 20 ≤ r ≤ 44: max {worst:.3e}, mean {mean:.3e}");
    }
}
