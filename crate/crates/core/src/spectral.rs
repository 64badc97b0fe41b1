//! FFT solvers for the periodic linear substeps.
//!
//! Every elliptic problem in the scheme has constant coefficients on a
//! periodic grid, so the 5-point operators are circulant and diagonalise
//! under the 2-D DFT. With `z_i = 2π i / M` and `z_j = 2π j / N`
//! (zero-based), the discrete Laplacian `-h² div∇` has symbol
//! `lap = 4 − 2 cos z_i − 2 cos z_j` and the three solver symbols are
//!
//! ```text
//! a = γ h² + lap            p-projection step
//! b = (τ/β) h² + γ lap      u step
//! c = h² + ε lap            initial smoother
//! ```
//!
//! A [`SpectralSymbols`] value caches the symbol tables together with the
//! FFT plans for one grid size and parameter set. It is immutable after
//! construction and can be shared between threads.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{ensure, Error, Result};
use crate::grid::{divergence, matrix_divergence, MatrixField, ScalarField, Scheme, VectorField};

/// Which cached symbol a solve divides by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// `a = γh² + lap`
    PStep,
    /// `b = (τ/β)h² + γ·lap`
    UStep,
    /// `c = h² + ε·lap`
    Smoother,
}

/// Result of a raw spectral division, before projection onto the reals.
#[derive(Debug, Clone)]
pub struct SpectralSolve {
    pub field: ScalarField,
    /// Largest `|Im|` left after the inverse transform.
    pub max_imag: f64,
}

#[derive(Clone)]
struct Plans {
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

/// Cached symbol tables and FFT plans for one `M × N` grid.
#[derive(Clone)]
pub struct SpectralSymbols {
    rows: usize,
    cols: usize,
    h: f64,
    gamma: f64,
    tau: f64,
    beta: f64,
    epsilon: f64,
    zi: Vec<f64>,
    zj: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    lap: Vec<f64>,
    plans: Plans,
}

impl fmt::Debug for SpectralSymbols {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralSymbols")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("h", &self.h)
            .field("gamma", &self.gamma)
            .field("tau", &self.tau)
            .field("beta", &self.beta)
            .field("epsilon", &self.epsilon)
            .finish_non_exhaustive()
    }
}

impl SpectralSymbols {
    /// Tabulates every symbol for an `rows × cols` grid.
    pub fn new(
        rows: usize,
        cols: usize,
        h: f64,
        gamma: f64,
        tau: f64,
        beta: f64,
        epsilon: f64,
    ) -> Result<Self> {
        ensure(rows >= 2 && cols >= 2, || {
            format!("grid must be at least 2×2, got {rows}×{cols}")
        })?;
        ensure(h.is_finite() && h > 0.0, || {
            format!("h must be positive, got {h}")
        })?;
        ensure(gamma.is_finite() && gamma > 0.0, || {
            format!("gamma must be positive, got {gamma}")
        })?;
        ensure(tau.is_finite() && tau > 0.0, || {
            format!("tau must be positive, got {tau}")
        })?;
        ensure(beta.is_finite() && beta > 0.0, || {
            format!("beta must be positive, got {beta}")
        })?;
        ensure(epsilon.is_finite() && epsilon >= 0.0, || {
            format!("epsilon must be non-negative, got {epsilon}")
        })?;

        let zi: Vec<f64> = (0..rows)
            .map(|i| 2.0 * PI * i as f64 / rows as f64)
            .collect();
        let zj: Vec<f64> = (0..cols)
            .map(|j| 2.0 * PI * j as f64 / cols as f64)
            .collect();
        let mut lap = Vec::with_capacity(rows * cols);
        for &x in &zi {
            for &y in &zj {
                lap.push(4.0 - 2.0 * x.cos() - 2.0 * y.cos());
            }
        }
        // cos(0) is exact, but keep the zero mode exactly zero regardless.
        lap[0] = 0.0;
        let h2 = h * h;
        let a = lap.iter().map(|&l| gamma * h2 + l).collect();
        let b = lap.iter().map(|&l| tau / beta * h2 + gamma * l).collect();
        let c = lap.iter().map(|&l| h2 + epsilon * l).collect();

        let mut planner = FftPlanner::new();
        let plans = Plans {
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        };

        Ok(Self {
            rows,
            cols,
            h,
            gamma,
            tau,
            beta,
            epsilon,
            zi,
            zj,
            a,
            b,
            c,
            lap,
            plans,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Frequency angles along axis 1.
    pub fn zi(&self) -> &[f64] {
        &self.zi
    }

    /// Frequency angles along axis 2.
    pub fn zj(&self) -> &[f64] {
        &self.zj
    }

    pub fn symbol(&self, kind: SymbolKind) -> &[f64] {
        match kind {
            SymbolKind::PStep => &self.a,
            SymbolKind::UStep => &self.b,
            SymbolKind::Smoother => &self.c,
        }
    }

    /// Pure Laplacian symbol `4 − 2cos z_i − 2cos z_j`.
    pub fn laplacian(&self) -> &[f64] {
        &self.lap
    }

    fn check(&self, f: &ScalarField) -> Result<()> {
        if f.dims() != self.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                got: f.dims(),
            });
        }
        ensure(f.spacing() == self.h, || {
            format!(
                "field spacing {} does not match solver spacing {}",
                f.spacing(),
                self.h
            )
        })
    }

    fn forward(&self, f: &ScalarField) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = f.data().iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.transform(&mut buf, &self.plans.row_fwd, &self.plans.col_fwd);
        buf
    }

    /// Unnormalised inverse, then scaled by `1/(M·N)`.
    fn inverse(&self, buf: &mut [Complex<f64>]) {
        self.transform(buf, &self.plans.row_inv, &self.plans.col_inv);
        let scale = 1.0 / (self.rows * self.cols) as f64;
        for z in buf.iter_mut() {
            *z *= scale;
        }
    }

    fn transform(
        &self,
        buf: &mut [Complex<f64>],
        row: &Arc<dyn Fft<f64>>,
        col: &Arc<dyn Fft<f64>>,
    ) {
        let (m, n) = (self.rows, self.cols);
        row.process(buf);
        let mut t = vec![Complex::new(0.0, 0.0); m * n];
        transpose(buf, &mut t, m, n);
        col.process(&mut t);
        transpose(&t, buf, n, m);
    }

    fn finish(&self, template: &ScalarField, buf: Vec<Complex<f64>>) -> SpectralSolve {
        let max_imag = buf.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        let field = ScalarField::from_vec(
            self.rows,
            self.cols,
            template.spacing(),
            buf.iter().map(|z| z.re).collect(),
        );
        SpectralSolve { field, max_imag }
    }

    /// Solves `symbol · F(x) = F(rhs)` and returns the real part together
    /// with the imaginary residue.
    pub fn apply_inverse(&self, rhs: &ScalarField, kind: SymbolKind) -> Result<SpectralSolve> {
        self.check(rhs)?;
        let mut buf = self.forward(rhs);
        for (z, &s) in buf.iter_mut().zip(self.symbol(kind)) {
            *z /= s;
        }
        self.inverse(&mut buf);
        Ok(self.finish(rhs, buf))
    }

    /// Screened-Poisson solve for the projection step:
    /// `−div⁺∇⁻p_k + γ p_k = γ p24_k − div_rhs H_k` for `k = 1, 2`.
    ///
    /// `rhs_scheme` picks the divergence applied to `H` rows. `Forward` is
    /// the adjoint of the `∇⁻` that builds `H`, so `H = ∇⁻p24` returns
    /// `p24` unchanged; `Backward` does not have that fixed point.
    pub fn solve_p34(
        &self,
        p24: &VectorField,
        h24: &MatrixField,
        rhs_scheme: Scheme,
    ) -> Result<VectorField> {
        self.check(&p24.c1)?;
        self.check(&h24.m11)?;
        let h2 = self.h * self.h;
        let div_h = matrix_divergence(h24, rhs_scheme);
        let g1 = p24
            .c1
            .zip_map(&div_h.c1, |p, d| self.gamma * h2 * p - h2 * d);
        let g2 = p24
            .c2
            .zip_map(&div_h.c2, |p, d| self.gamma * h2 * p - h2 * d);
        Ok(VectorField::new(
            self.apply_inverse(&g1, SymbolKind::PStep)?.field,
            self.apply_inverse(&g2, SymbolKind::PStep)?.field,
        ))
    }

    /// `−γ div⁻∇⁺u + (τ/β) u = (τ/β) f − γ div⁻ p34`.
    pub fn solve_u(&self, p34: &VectorField, f: &ScalarField) -> Result<ScalarField> {
        self.check(f)?;
        self.check(&p34.c1)?;
        let h2 = self.h * self.h;
        let w = self.tau / self.beta * h2;
        let div_p = divergence(p34, Scheme::Backward);
        let g = f.zip_map(&div_p, |fv, d| w * fv - self.gamma * h2 * d);
        Ok(self.apply_inverse(&g, SymbolKind::UStep)?.field)
    }

    /// Periodic solution of `u0 − ε∇²u0 = f`. Returns `f` itself when
    /// `ε = 0`.
    pub fn smooth_init(&self, f: &ScalarField) -> Result<ScalarField> {
        self.check(f)?;
        if self.epsilon == 0.0 {
            return Ok(f.clone());
        }
        let g = f.scale(self.h * self.h);
        Ok(self.apply_inverse(&g, SymbolKind::Smoother)?.field)
    }

    /// Recovers the scalar field whose forward gradient best matches `q`:
    /// solves `div⁻∇⁺v = div⁻q` with the mean of `v` pinned to the mean of
    /// `f`.
    pub fn reconstruct_v(&self, q: &VectorField, f: &ScalarField) -> Result<ScalarField> {
        self.check(f)?;
        self.check(&q.c1)?;
        let h2 = self.h * self.h;
        let rhs = divergence(q, Scheme::Backward);
        let mut buf = self.forward(&rhs);
        for (z, &l) in buf.iter_mut().zip(&self.lap).skip(1) {
            *z *= -h2 / l;
        }
        buf[0] = Complex::new((self.rows * self.cols) as f64 * f.mean(), 0.0);
        self.inverse(&mut buf);
        Ok(self.finish(f, buf).field)
    }
}

fn transpose(src: &[Complex<f64>], dst: &mut [Complex<f64>], rows: usize, cols: usize) {
    for i in 0..rows {
        for j in 0..cols {
            dst[j * rows + i] = src[i * cols + j];
        }
    }
}
