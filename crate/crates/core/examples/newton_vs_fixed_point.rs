//! Per-pixel solvers for the curvature-weighted p equation: iteration
//! counts and agreement.

use gcsplit::local::{fixed_point_pixel, newton_pixel, InnerSolverParams};
use rand::{Rng, SeedableRng};

fn main() {
    let prm = InnerSolverParams::default();
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for tau in [0.01, 0.05, 0.1] {
        let (mut fp_it, mut nt_it, mut gap) = (0usize, 0usize, 0.0f64);
        let trials = 1000;
        for _ in 0..trials {
            let b = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let d1 = rng.random_range(-1.0..1.0);
            let fp = fixed_point_pixel(b, d1, 1.0, tau, &prm);
            let nt = newton_pixel(b, d1, 1.0, tau, &prm);
            fp_it += fp.iterations;
            nt_it += nt.iterations;
            gap = gap.max((fp.q[0] - nt.q[0]).abs().max((fp.q[1] - nt.q[1]).abs()));
        }
        let n = trials as f64;
        println!(
            "τ = {tau:<5} mean iterations: fixed point {:.2}, Newton {:.2}; max |q_fp − q_newton| = {gap:.1e}",
            fp_it as f64 / n,
            nt_it as f64 / n
        );
    }
}
