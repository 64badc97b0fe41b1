//! Image-quality measures: PSNR, SSIM and unnormalised `Lp` errors.
//!
//! SSIM uses a Gaussian window applied with periodic wrap-around, in line
//! with the periodic convention of the rest of the crate. Numbers therefore
//! differ slightly near the borders from implementations that crop to the
//! valid region.

use crate::error::{ensure, Error, Result};
use crate::grid::ScalarField;

fn check_dims(a: &ScalarField, b: &ScalarField) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: b.dims(),
            got: a.dims(),
        });
    }
    Ok(())
}

pub fn mse(u: &ScalarField, reference: &ScalarField) -> Result<f64> {
    check_dims(u, reference)?;
    let sq: f64 = u
        .data()
        .iter()
        .zip(reference.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sq / u.len() as f64)
}

/// `10 log10(peak² / MSE)` in dB; `f64::INFINITY` when the fields agree.
pub fn psnr(u: &ScalarField, reference: &ScalarField, peak: f64) -> Result<f64> {
    ensure(peak > 0.0, || format!("peak must be positive, got {peak}"))?;
    let e = mse(u, reference)?;
    Ok(if e == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / e).log10()
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    /// Odd window width.
    pub window: usize,
    pub window_sigma: f64,
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range `L`.
    pub peak: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            window_sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            peak: 1.0,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.window >= 3 && self.window % 2 == 1, || {
            format!("SSIM window must be odd and ≥ 3, got {}", self.window)
        })?;
        ensure(self.window_sigma > 0.0, || {
            "SSIM window sigma must be positive".into()
        })?;
        ensure(self.k1 > 0.0 && self.k2 > 0.0, || {
            "SSIM constants must be positive".into()
        })?;
        ensure(self.peak > 0.0, || "SSIM peak must be positive".into())
    }

    fn kernel(&self) -> Vec<f64> {
        let r = (self.window / 2) as f64;
        let w: Vec<f64> = (0..self.window)
            .map(|k| {
                (-(k as f64 - r).powi(2) / (2.0 * self.window_sigma * self.window_sigma)).exp()
            })
            .collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    }
}

/// Separable periodic convolution with a centred odd kernel.
fn blur(data: &[f64], rows: usize, cols: usize, kernel: &[f64]) -> Vec<f64> {
    let r = kernel.len() / 2;
    let mut tmp = vec![0.0; data.len()];
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                let jj = (j + cols + k - r) % cols;
                acc += w * data[i * cols + jj];
            }
            tmp[i * cols + j] = acc;
        }
    }
    let mut out = vec![0.0; data.len()];
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                let ii = (i + rows + k - r) % rows;
                acc += w * tmp[ii * cols + j];
            }
            out[i * cols + j] = acc;
        }
    }
    out
}

/// Mean structural similarity over all pixels.
pub fn ssim(u: &ScalarField, reference: &ScalarField, prm: &SsimParams) -> Result<f64> {
    prm.validate()?;
    check_dims(u, reference)?;
    let (m, n) = u.dims();
    ensure(m >= prm.window && n >= prm.window, || {
        format!(
            "field {m}×{n} is smaller than the {0}×{0} SSIM window",
            prm.window
        )
    })?;
    let kernel = prm.kernel();
    let (x, y) = (u.data(), reference.data());
    let prod = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).collect::<Vec<_>>();
    let mu_x = blur(x, m, n, &kernel);
    let mu_y = blur(y, m, n, &kernel);
    let xx = blur(&prod(x, x), m, n, &kernel);
    let yy = blur(&prod(y, y), m, n, &kernel);
    let xy = blur(&prod(x, y), m, n, &kernel);
    let c1 = (prm.k1 * prm.peak).powi(2);
    let c2 = (prm.k2 * prm.peak).powi(2);
    let total: f64 = (0..x.len())
        .map(|k| {
            let (mx, my) = (mu_x[k], mu_y[k]);
            let vx = xx[k] - mx * mx;
            let vy = yy[k] - my * my;
            let cov = xy[k] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / x.len() as f64)
}

/// Unnormalised error norms of `u − reference`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpErrors {
    /// `Σ|d|`
    pub l1: f64,
    /// `√Σd²`
    pub l2: f64,
    /// `max|d|`
    pub linf: f64,
}

pub fn lp_errors(u: &ScalarField, reference: &ScalarField) -> Result<LpErrors> {
    check_dims(u, reference)?;
    let mut e = LpErrors {
        l1: 0.0,
        l2: 0.0,
        linf: 0.0,
    };
    for (a, b) in u.data().iter().zip(reference.data()) {
        let d = (a - b).abs();
        e.l1 += d;
        e.l2 += d * d;
        e.linf = e.linf.max(d);
    }
    e.l2 = e.l2.sqrt();
    Ok(e)
}
