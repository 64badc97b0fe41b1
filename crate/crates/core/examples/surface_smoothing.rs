//! Smoothing a noisy cone with the surface preset, tracing the energy.

use gcsplit::{add_gaussian_noise, run_with, synth, Geometry, NoiseSpec, SplitParams, SynthKind};

fn main() {
    let cone = synth(SynthKind::Cone, 64, 64, 1.0, &Geometry::default()).unwrap();
    let f = add_gaussian_noise(&cone, NoiseSpec::new(1e-4, 1)).unwrap();
    let prm = SplitParams::surface();
    let out = run_with(&f, &prm, |st| {
        if st.n == 1 || st.n % 40 == 0 {
            let (ip, ih) = *st.inner_iters_history().last().unwrap();
            println!(
                "n = {:>4}  E = {:>8.4}  rel = {:.2e}  inner (p, H) = ({ip}, {ih})",
                st.n,
                st.energy_history.last().unwrap(),
                st.last_relerr().unwrap()
            );
        }
    })
    .unwrap();
    println!(
        "{:?} after {} iterations; energy {:.3} → {:.3}",
        out.status,
        out.iterations(),
        out.state.initial_energy,
        out.state.energy_history.last().unwrap()
    );
}
