//! PSNR, SSIM and Lp errors of a clean field under increasing noise.

use gcsplit::{
    add_gaussian_noise, lp_errors, psnr, ssim, synth, Geometry, NoiseSpec, SsimParams, SynthKind,
};

fn main() {
    let clean = synth(
        SynthKind::Steps,
        96,
        96,
        1.0,
        &Geometry {
            height: 0.8,
            ..Default::default()
        },
    )
    .unwrap();
    let prm = SsimParams::default();
    println!(
        "{:>9} {:>8} {:>7} {:>9} {:>9}",
        "variance", "PSNR", "SSIM", "L2", "L∞"
    );
    for variance in [1e-4, 1e-3, 1e-2, 5e-2] {
        let noisy = add_gaussian_noise(&clean, NoiseSpec::new(variance, 3)).unwrap();
        let e = lp_errors(&noisy, &clean).unwrap();
        println!(
            "{variance:>9.0e} {:>8.2} {:>7.4} {:>9.4} {:>9.4}",
            psnr(&noisy, &clean, 1.0).unwrap(),
            ssim(&noisy, &clean, &prm).unwrap(),
            e.l2,
            e.linf
        );
    }
}
