//! Wall time per outer iteration as the grid grows.

use std::time::Instant;

use gcsplit::{add_gaussian_noise, synth, Geometry, NoiseSpec, SplitParams, SynthKind};

fn main() {
    let prm = SplitParams {
        tol: 1e-300,
        max_outer: 30,
        ..SplitParams::image()
    };
    let mut previous: Option<f64> = None;
    for n in [32, 64, 128, 256] {
        let geom = Geometry {
            r0: n as f64 / 4.0,
            slope: 1.6 / n as f64,
            ..Default::default()
        };
        let clean = synth(SynthKind::Cone, n, n, 1.0, &geom).unwrap();
        let f = add_gaussian_noise(&clean, NoiseSpec::new(0.01, 7)).unwrap();
        let start = Instant::now();
        let out = gcsplit::run(&f, &prm).unwrap();
        let per = start.elapsed().as_secs_f64() / out.iterations() as f64;
        let growth = previous
            .map(|p| format!("  ×{:.2}", per / p))
            .unwrap_or_default();
        println!("{n:>4}×{n:<4} {:>9.3} ms/iteration{growth}", per * 1e3);
        previous = Some(per);
    }
}
