//! Curvature-plus-TV against plain TV on a noisy cone, each with α tuned
//! over a small grid.

use gcsplit::{
    add_gaussian_noise, lp_errors, run, synth, Geometry, NoiseSpec, SplitParams, SynthKind,
};

fn main() {
    let clean = synth(SynthKind::Cone, 64, 64, 1.0, &Geometry::default()).unwrap();
    let f = add_gaussian_noise(&clean, NoiseSpec::new(1e-4, 1)).unwrap();
    println!(
        "noisy input: L∞ error {:.4}",
        lp_errors(&f, &clean).unwrap().linf
    );
    for (name, skip_gc) in [("GC-TV", false), ("TV", true)] {
        for alpha in [0.01, 0.03, 0.1] {
            let prm = SplitParams {
                alpha,
                skip_gc,
                ..SplitParams::surface()
            };
            let out = run(&f, &prm).unwrap();
            let e = lp_errors(&out.u_star, &clean).unwrap();
            println!(
                "{name:>6} α = {alpha:<5} {:>5} iterations  L∞ {:.4}  L2 {:.4}",
                out.iterations(),
                e.linf,
                e.l2
            );
        }
    }
}
