//! Denoising a synthetic image and saving the fields as PGM.
//!
//! `cargo run --release --example image_denoising [out_dir]`

use std::path::PathBuf;

use gcsplit::io::write_field;
use gcsplit::{
    add_gaussian_noise, psnr, run, ssim, synth, Geometry, NoiseSpec, SplitParams, SsimParams,
    SynthKind,
};

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let steps = synth(
        SynthKind::Steps,
        64,
        64,
        1.0,
        &Geometry {
            height: 0.6,
            ..Default::default()
        },
    )
    .unwrap();
    let cone = synth(
        SynthKind::Cone,
        64,
        64,
        1.0,
        &Geometry {
            r0: 16.0,
            slope: 0.025,
            ..Default::default()
        },
    )
    .unwrap();
    let clean = steps.add(&cone);
    let noisy = add_gaussian_noise(&clean, NoiseSpec::new(0.01, 7)).unwrap();

    let s = SsimParams::default();
    for (name, prm) in [
        ("GC-TV", SplitParams::image()),
        (
            "TV",
            SplitParams {
                skip_gc: true,
                ..SplitParams::image()
            },
        ),
    ] {
        let out = run(&noisy, &prm).unwrap();
        println!(
            "{name:>6}: {} iterations, PSNR {:.2} → {:.2} dB, SSIM {:.3} → {:.3}",
            out.iterations(),
            psnr(&noisy, &clean, 1.0).unwrap(),
            psnr(&out.u_star, &clean, 1.0).unwrap(),
            ssim(&noisy, &clean, &s).unwrap(),
            ssim(&out.u_star, &clean, &s).unwrap()
        );
        write_field(
            &dir.join(format!("denoised_{}.pgm", name.to_lowercase())),
            &out.u_star,
        )
        .unwrap();
    }
    write_field(&dir.join("clean.pgm"), &clean).unwrap();
    write_field(&dir.join("noisy.pgm"), &noisy).unwrap();
    println!("images written to {}", dir.display());
}
