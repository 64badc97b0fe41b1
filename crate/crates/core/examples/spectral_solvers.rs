//! The FFT elliptic solves, checked against their discrete equations.

use gcsplit::grid::{divergence, gradient, ScalarField, Scheme};
use gcsplit::SpectralSymbols;

fn main() {
    let (m, n, h) = (64, 64, 1.0 / 64.0);
    let (gamma, tau, beta, eps) = (1.0, 0.05, 0.6, 0.1);
    let sym = SpectralSymbols::new(m, n, h, gamma, tau, beta, eps).unwrap();
    let f = ScalarField::from_fn(m, n, h, |i, j| {
        let (x, y) = (i as f64 * h, j as f64 * h);
        (std::f64::consts::TAU * x).sin()
            + 0.5 * (4.0 * std::f64::consts::TAU * y).cos()
            + x * (1.0 - x)
    });
    let lap = |v: &ScalarField| divergence(&gradient(v, Scheme::Forward), Scheme::Backward);

    let u0 = sym.smooth_init(&f).unwrap();
    let r = u0.sub(&lap(&u0).scale(eps)).sub(&f).max_abs();
    println!("smooth_init    residual of u − ε∇²u = f:            {r:.2e}");

    let p = gradient(&f, Scheme::Forward);
    let u = sym.solve_u(&p, &f).unwrap();
    let lhs = u.scale(tau / beta).sub(&lap(&u).scale(gamma));
    let rhs = f
        .scale(tau / beta)
        .sub(&divergence(&p, Scheme::Backward).scale(gamma));
    println!(
        "solve_u        residual of (τ/β)u − γ∇²u = rhs:     {:.2e}",
        lhs.sub(&rhs).max_abs()
    );
    println!(
        "               |u − f| with p = ∇f:                 {:.2e}",
        u.sub(&f).max_abs()
    );

    let v = sym.reconstruct_v(&p, &f).unwrap();
    println!(
        "reconstruct_v  |v − f| from ∇f and mean(f):         {:.2e}",
        v.sub(&f).max_abs()
    );
}
